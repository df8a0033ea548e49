//! Thin wrappers over dense eigendecompositions and small utilities shared
//! by the spectral, Wigner, and Liouvillian modules.

use faer::{Mat, Side};
use num_complex::Complex64;

/// Eigendecomposition of a real symmetric matrix, ascending eigenvalues.
pub fn sym_eig(a: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .expect("symmetric eigendecomposition failed");
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    let s = evd.S();
    order.sort_by(|&i, &j| s[i].partial_cmp(&s[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    let u = evd.U();
    let mut vecs = Mat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            vecs[(r, col)] = u[(r, i)];
        }
    }
    (vals, vecs)
}

/// Eigendecomposition of a complex Hermitian matrix, ascending eigenvalues.
pub fn herm_eig(a: &Mat<Complex64>) -> (Vec<f64>, Mat<Complex64>) {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .expect("hermitian eigendecomposition failed");
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    let s = evd.S();
    order.sort_by(|&i, &j| s[i].re.partial_cmp(&s[j].re).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| s[i].re).collect();
    let u = evd.U();
    let mut vecs = Mat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            vecs[(r, col)] = u[(r, i)];
        }
    }
    (vals, vecs)
}

/// Eigenvalues and right eigenvectors of a real (nonsymmetric) matrix.
pub fn real_evd(a: &Mat<f64>) -> (Vec<Complex64>, Mat<Complex64>) {
    let evd: faer::linalg::solvers::Eigen<f64> = a.eigen().expect("eigendecomposition failed");
    let s = evd.S();
    let n = a.nrows();
    let vals: Vec<Complex64> = (0..n).map(|i| s[i]).collect();
    let u = evd.U();
    let mut vecs = Mat::zeros(n, n);
    for c in 0..n {
        for r in 0..n {
            vecs[(r, c)] = u[(r, c)];
        }
    }
    (vals, vecs)
}

/// Solve `A x = b` for complex dense `A` by partial-pivot LU.
pub fn solve_complex(a: &Mat<Complex64>, b: &[Complex64]) -> Vec<Complex64> {
    use faer::linalg::solvers::Solve;
    let lu = a.partial_piv_lu();
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = lu.solve(&rhs);
    (0..b.len()).map(|i| x[(i, 0)]).collect()
}

/// `exp(i s A) |v>` given the eigendecomposition of Hermitian `A`.
pub fn apply_phase_exponential(
    eigvals: &[f64],
    eigvecs: &Mat<Complex64>,
    s: f64,
    v: &[Complex64],
) -> Vec<Complex64> {
    let n = eigvals.len();
    // coeffs = U† v
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for m in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..n {
            acc += eigvecs[(r, m)].conj() * v[r];
        }
        coeffs[m] = acc;
    }
    for (m, c) in coeffs.iter_mut().enumerate() {
        *c *= Complex64::from_polar(1.0, s * eigvals[m]);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for m in 0..n {
        let c = coeffs[m];
        if c.norm_sqr() == 0.0 {
            continue;
        }
        for r in 0..n {
            out[r] += eigvecs[(r, m)] * c;
        }
    }
    out
}

/// Dense `C = A† B` for complex matrices.
pub fn adjoint_mul(a: &Mat<Complex64>, b: &Mat<Complex64>) -> Mat<Complex64> {
    a.adjoint() * b
}

/// Gaussian of unit weight.
pub fn gaussian(x: f64, sigma: f64) -> f64 {
    let z = x / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}
