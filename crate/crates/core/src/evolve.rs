//! Krylov time evolution and time-domain observables.

use crate::error::{Error, Result};
use crate::linalg;
use crate::models::SparseHamiltonian;
use crate::sparse::BasisRef;
use num_complex::Complex64;

/// A normalized pure state over an enumerated basis.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub basis: BasisRef,
    pub amp: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(basis: BasisRef, amp: Vec<Complex64>) -> StateVector {
        assert_eq!(basis.len(), amp.len());
        StateVector { basis, amp }
    }

    /// Computational basis state for a configuration.
    pub fn basis_state(basis: BasisRef, config: u32) -> Result<StateVector> {
        let idx = basis
            .index_of(config)
            .ok_or_else(|| Error::invalid(format!("configuration {config:b} not in basis")))?;
        let mut amp = vec![Complex64::new(0.0, 0.0); basis.len()];
        amp[idx] = Complex64::new(1.0, 0.0);
        Ok(StateVector { basis, amp })
    }

    /// `|0...0>`.
    pub fn vacuum(basis: BasisRef) -> StateVector {
        StateVector::basis_state(basis, 0).expect("vacuum is always legal")
    }

    /// Period-`p` crystal `|100..0 100..0 ...>` (site 0 excited).
    pub fn crystal(basis: BasisRef, period: usize) -> Result<StateVector> {
        let n = basis.n_sites();
        let mut config = 0u32;
        for j in (0..n).step_by(period) {
            config |= 1 << j;
        }
        StateVector::basis_state(basis, config)
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amp {
                *a /= n;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// Evolution controls.
#[derive(Clone, Copy, Debug)]
pub struct KrylovOptions {
    pub krylov_dim: usize,
    pub tol: f64,
    /// Hard cap on adaptive halvings of the time step.
    pub max_splits: u32,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            krylov_dim: 30,
            tol: 1e-10,
            max_splits: 24,
        }
    }
}

/// One Lanczos step of `exp(-i H dt)` with an a-posteriori error estimate.
fn lanczos_step(
    h: &SparseHamiltonian,
    psi: &[Complex64],
    dt: f64,
    opts: &KrylovOptions,
) -> (Vec<Complex64>, f64) {
    let dim = psi.len();
    let m_max = opts.krylov_dim.min(dim);
    let norm0 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm0 == 0.0 {
        return (psi.to_vec(), 0.0);
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_max);
    basis.push(psi.iter().map(|a| a / norm0).collect());
    let mut alphas: Vec<f64> = Vec::with_capacity(m_max);
    let mut betas: Vec<f64> = Vec::with_capacity(m_max);
    let mut breakdown = false;
    for j in 0..m_max {
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        h.mat.matvec_complex(&basis[j], &mut w);
        let alpha: f64 = basis[j]
            .iter()
            .zip(&w)
            .map(|(v, x)| (v.conj() * x).re)
            .sum();
        alphas.push(alpha);
        // Full reorthogonalization keeps the small tridiagonal faithful.
        for v in &basis {
            let c: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= c * vi;
            }
        }
        let beta = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if beta < 1e-14 || j + 1 == m_max {
            breakdown = beta < 1e-14;
            betas.push(beta);
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|a| a / beta).collect());
    }
    let m = alphas.len();
    // exp(-i dt T) e_1 through the tridiagonal eigendecomposition.
    let mut t = faer::Mat::<f64>::zeros(m, m);
    for j in 0..m {
        t[(j, j)] = alphas[j];
        if j + 1 < m {
            t[(j, j + 1)] = betas[j];
            t[(j + 1, j)] = betas[j];
        }
    }
    let (vals, vecs) = linalg::sym_eig(&t);
    let mut small = vec![Complex64::new(0.0, 0.0); m];
    for col in 0..m {
        let phase = Complex64::from_polar(1.0, -dt * vals[col]);
        let w0 = vecs[(0, col)];
        for r in 0..m {
            small[r] += vecs[(r, col)] * w0 * phase;
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (j, v) in basis.iter().enumerate() {
        let c = small[j] * norm0;
        for (o, vi) in out.iter_mut().zip(v) {
            *o += c * vi;
        }
    }
    let err = if breakdown {
        0.0
    } else {
        (betas[m - 1] * small[m - 1].norm() * dt.abs()).abs()
    };
    (out, err)
}

/// Propagate `psi` by `exp(-i H dt)` within a local error budget.
///
/// The step is split in half recursively whenever the Lanczos residual
/// estimate exceeds the tolerance; the result is renormalized to unit norm.
pub fn propagate(
    h: &SparseHamiltonian,
    psi: &StateVector,
    dt: f64,
    opts: &KrylovOptions,
) -> Result<StateVector> {
    assert!(h.basis.same_space(&psi.basis), "state/Hamiltonian mismatch");
    if !dt.is_finite() {
        return Err(Error::invalid("time step must be finite"));
    }
    if dt == 0.0 {
        return Ok(psi.clone());
    }
    let mut segments = vec![dt];
    let mut state = psi.amp.clone();
    let mut splits = 0u32;
    while let Some(seg) = segments.pop() {
        let (out, err) = lanczos_step(h, &state, seg, opts);
        if err > opts.tol {
            if splits >= opts.max_splits {
                return Err(Error::numerical(format!(
                    "Krylov propagation failed to reach tolerance {} (residual estimate {err:.3e})",
                    opts.tol
                )));
            }
            splits += 1;
            segments.push(seg / 2.0);
            segments.push(seg / 2.0);
            continue;
        }
        state = out;
    }
    let mut result = StateVector {
        basis: psi.basis.clone(),
        amp: state,
    };
    result.normalize();
    Ok(result)
}

/// A trajectory sampled on a time grid (states stored).
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
}

/// Sample the evolution of `psi0` on a sorted time grid (first entry may be
/// 0 to include the initial state).
pub fn sample_trajectory(
    h: &SparseHamiltonian,
    psi0: &StateVector,
    times: &[f64],
    opts: &KrylovOptions,
) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(times.len());
    let mut current = psi0.clone();
    let mut t_now = 0.0;
    for &t in times {
        let dt = t - t_now;
        if dt != 0.0 {
            current = propagate(h, &current, dt, opts)?;
            t_now = t;
        }
        states.push(current.clone());
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
    })
}

/// Streaming variant: apply `visit(t, state)` at each grid time without
/// retaining the trajectory.
pub fn evolve_with<F: FnMut(f64, &StateVector)>(
    h: &SparseHamiltonian,
    psi0: &StateVector,
    times: &[f64],
    opts: &KrylovOptions,
    mut visit: F,
) -> Result<()> {
    let mut current = psi0.clone();
    let mut t_now = 0.0;
    for &t in times {
        let dt = t - t_now;
        if dt != 0.0 {
            current = propagate(h, &current, dt, opts)?;
            t_now = t;
        }
        visit(t, &current);
    }
    Ok(())
}

/// Equal-time connected two-point correlators over a trajectory.
#[derive(Clone, Debug)]
pub struct CorrelatorSeries {
    pub times: Vec<f64>,
    pub distances: Vec<usize>,
    /// `values[it][id]`.
    pub values: Vec<Vec<f64>>,
    pub connected: bool,
    /// Whether the `(-1)^d` electric-field sign was applied.
    pub field_mapping: bool,
}

/// `Z` diagonal values per site for one configuration.
fn z_of(config: u32, j: usize) -> f64 {
    if config >> j & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Connected `Z`-`Z` (or, with `field_mapping`, `E`-`E`) correlators,
/// spatially averaged: all sites on rings, an interior window on open
/// chains (`edge_exclusion` sites dropped at each edge; the default is
/// `ceil(N/6)`).
pub fn connected_correlator_series(
    traj: &Trajectory,
    field_mapping: bool,
    edge_exclusion: Option<usize>,
) -> CorrelatorSeries {
    use crate::hilbert::Boundary;
    let basis = &traj.states[0].basis;
    let n = basis.n_sites();
    let boundary = basis.boundary();
    let distances: Vec<usize> = (1..=n / 2).collect();
    let excl = edge_exclusion.unwrap_or_else(|| n.div_ceil(6));
    let mut values = Vec::with_capacity(traj.states.len());
    for state in &traj.states {
        let probs: Vec<f64> = state.amp.iter().map(|a| a.norm_sqr()).collect();
        let mut mean = vec![0.0; n];
        for (i, &p) in probs.iter().enumerate() {
            let c = basis.config(i);
            for (j, m) in mean.iter_mut().enumerate() {
                *m += p * z_of(c, j);
            }
        }
        let mut row = Vec::with_capacity(distances.len());
        for &d in &distances {
            let sites: Vec<usize> = match boundary {
                Boundary::Periodic => (0..n).collect(),
                Boundary::Open => (excl..n.saturating_sub(excl + d)).collect(),
            };
            if sites.is_empty() {
                row.push(f64::NAN);
                continue;
            }
            let mut acc = 0.0;
            for &j in &sites {
                let jd = (j + d) % n;
                let g: f64 = probs
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| {
                        let c = basis.config(i);
                        p * z_of(c, j) * z_of(c, jd)
                    })
                    .sum();
                acc += g - mean[j] * mean[jd];
            }
            let mut v = acc / sites.len() as f64;
            if field_mapping && d % 2 == 1 {
                v = -v;
            }
            row.push(v);
        }
        values.push(row);
    }
    CorrelatorSeries {
        times: traj.times.clone(),
        distances,
        values,
        connected: true,
        field_mapping,
    }
}

/// Per-time mean and variance of the electric-field mode `E(q)`.
///
/// `E(q) = Z(k = q + π)`; both `<E(q)>` and `<E(q)E(-q)>` are diagonal in
/// the computational basis. The variance uses
/// `var[E(q)] = <E(q)E(-q)> - |<E(q)>|²`.
#[derive(Clone, Debug)]
pub struct FieldModeSeries {
    pub times: Vec<f64>,
    pub q: f64,
    pub mean: Vec<Complex64>,
    pub variance: Vec<f64>,
}

pub fn field_mode_series(traj: &Trajectory, q_index: usize) -> FieldModeSeries {
    let basis = &traj.states[0].basis;
    let n = basis.n_sites();
    let q = 2.0 * std::f64::consts::PI * q_index as f64 / n as f64;
    // Per-configuration field amplitude E(q)|c> = A(c)|c>.
    let amps: Vec<Complex64> = (0..basis.len())
        .map(|i| {
            let c = basis.config(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let stagger = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += Complex64::from_polar(1.0, q * j as f64) * stagger * z_of(c, j);
            }
            acc / (n as f64).sqrt()
        })
        .collect();
    let mut mean = Vec::with_capacity(traj.states.len());
    let mut variance = Vec::with_capacity(traj.states.len());
    for state in &traj.states {
        let mut m = Complex64::new(0.0, 0.0);
        let mut ee = 0.0;
        for (a, s) in amps.iter().zip(&state.amp) {
            let p = s.norm_sqr();
            m += p * a;
            ee += p * a.norm_sqr();
        }
        mean.push(m);
        variance.push(ee - m.norm_sqr());
    }
    FieldModeSeries {
        times: traj.times.clone(),
        q,
        mean,
        variance,
    }
}

/// Mean and variance time series of a Hermitian matrix observable.
pub fn observable_series(
    traj: &Trajectory,
    op: &crate::sparse::CsrMatrixC,
) -> (Vec<f64>, Vec<f64>) {
    let mut means = Vec::with_capacity(traj.states.len());
    let mut vars = Vec::with_capacity(traj.states.len());
    let dim = op.n;
    let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
    for state in &traj.states {
        op.matvec(&state.amp, &mut tmp);
        let mean: Complex64 = state.amp.iter().zip(&tmp).map(|(a, b)| a.conj() * b).sum();
        let sq: f64 = tmp.iter().map(|a| a.norm_sqr()).sum();
        means.push(mean.re);
        vars.push(sq - mean.norm_sqr());
    }
    (means, vars)
}

/// Infinite-temperature autocorrelator `tr[O_{j+d}(t) O_j] / D`, exact via
/// an eigendecomposition (deterministic mode).
pub fn inf_temp_autocorrelator(
    eig: &crate::spectral::EigenDecomposition,
    probe: &crate::ops::OperatorString,
    anchor: usize,
    distances: &[usize],
    times: &[f64],
) -> Vec<Vec<Complex64>> {
    let basis = &eig.basis;
    let dim = basis.len();
    let m0 = eig.operator_in_eigenbasis(&probe.clone().at(anchor as i64).to_sum());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); times.len()]; distances.len()];
    for (idx, &d) in distances.iter().enumerate() {
        let shifted = probe.clone().at(((anchor + d) % basis.n_sites()) as i64);
        let md = eig.operator_in_eigenbasis(&shifted.to_sum());
        // C(t) = Σ_{mn} e^{i(E_m - E_n)t} (M_d)_{mn} (M_0)_{nm} / D.
        use rayon::prelude::*;
        let row: Vec<Complex64> = times
            .par_iter()
            .map(|&t| {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..dim {
                    for n in 0..dim {
                        let w = md[(m, n)] * m0[(n, m)];
                        if w.norm_sqr() > 0.0 {
                            acc += w * Complex64::from_polar(1.0, (eig.energies[m] - eig.energies[n]) * t);
                        }
                    }
                }
                acc / dim as f64
            })
            .collect();
        out[idx] = row;
    }
    out
}

/// Stochastic estimate of the same autocorrelator for larger chains.
///
/// Uses Hutchinson random-phase vectors and Krylov propagation; returns
/// values and standard errors per (distance, time).
pub fn inf_temp_autocorrelator_stochastic(
    h: &SparseHamiltonian,
    probe: &crate::ops::OperatorString,
    anchor: usize,
    distances: &[usize],
    times: &[f64],
    samples: usize,
    seed: u64,
    opts: &KrylovOptions,
) -> Result<(Vec<Vec<Complex64>>, Vec<Vec<f64>>)> {
    use rand::Rng;
    use rand::SeedableRng;
    let basis = &h.basis;
    let dim = basis.len();
    let n = basis.n_sites();
    let m0 = crate::sparse::operator_matrix(&probe.clone().at(anchor as i64).to_sum(), basis);
    let mds: Vec<_> = distances
        .iter()
        .map(|&d| {
            crate::sparse::operator_matrix(&probe.clone().at(((anchor + d) % n) as i64).to_sum(), basis)
        })
        .collect();
    let mut sums = vec![vec![Complex64::new(0.0, 0.0); times.len()]; distances.len()];
    let mut sq_sums = vec![vec![0.0; times.len()]; distances.len()];
    for s in 0..samples {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(s as u64));
        let r: Vec<Complex64> = (0..dim)
            .map(|_| {
                let phase: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                Complex64::from_polar(1.0 / (dim as f64).sqrt(), phase)
            })
            .collect();
        let mut br = vec![Complex64::new(0.0, 0.0); dim];
        m0.matvec(&r, &mut br);
        let mut x = StateVector {
            basis: basis.clone(),
            amp: r.clone(),
        };
        let mut y = StateVector {
            basis: basis.clone(),
            amp: br,
        };
        let mut t_now = 0.0;
        for (it, &t) in times.iter().enumerate() {
            let dt = t - t_now;
            if dt != 0.0 {
                // Unnormalized evolution: propagate handles normalization,
                // so rescale by the stored norms.
                let nx = x.norm();
                let ny = y.norm();
                x = propagate(h, &x, dt, opts)?;
                y = propagate(h, &y, dt, opts)?;
                for a in &mut x.amp {
                    *a *= nx;
                }
                for a in &mut y.amp {
                    *a *= ny;
                }
                t_now = t;
            }
            for (id, md) in mds.iter().enumerate() {
                let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
                md.matvec(&y.amp, &mut tmp);
                let val: Complex64 = x.amp.iter().zip(&tmp).map(|(a, b)| a.conj() * b).sum();
                let val = val * dim as f64;
                sums[id][it] += val;
                sq_sums[id][it] += val.norm_sqr();
            }
        }
    }
    let mut means = vec![vec![Complex64::new(0.0, 0.0); times.len()]; distances.len()];
    let mut errs = vec![vec![0.0; times.len()]; distances.len()];
    for id in 0..distances.len() {
        for it in 0..times.len() {
            let mean = sums[id][it] / samples as f64;
            means[id][it] = mean;
            let var = (sq_sums[id][it] / samples as f64 - mean.norm_sqr()).max(0.0);
            errs[id][it] = (var / samples as f64).sqrt();
        }
    }
    Ok((means, errs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{enumerate_basis, Boundary};
    use crate::models::build_pxp;
    use std::sync::Arc;

    fn pxp(n: usize) -> (SparseHamiltonian, BasisRef) {
        let basis = Arc::new(enumerate_basis(n, Boundary::Periodic).unwrap());
        let h = build_pxp(&basis);
        let b = h.basis.clone();
        (h, b)
    }

    #[test]
    fn zero_step_is_identity() {
        let (h, basis) = pxp(8);
        let psi = StateVector::vacuum(basis);
        let out = propagate(&h, &psi, 0.0, &KrylovOptions::default()).unwrap();
        assert_eq!(out.amp, psi.amp);
    }

    #[test]
    fn krylov_matches_dense_exponential_oracle() {
        // N = 10, t = 5: fidelity against exp(-iHt) by full diagonalization.
        let (h, basis) = pxp(10);
        let psi = StateVector::vacuum(basis.clone());
        let t = 5.0;
        let out = propagate(&h, &psi, t, &KrylovOptions::default()).unwrap();
        let (vals, vecs) = crate::linalg::sym_eig(&h.mat.to_dense());
        let dim = basis.len();
        let vecs_c = faer::Mat::<Complex64>::from_fn(dim, dim, |i, j| {
            Complex64::new(vecs[(i, j)], 0.0)
        });
        let exact = crate::linalg::apply_phase_exponential(&vals, &vecs_c, -t, &psi.amp);
        let fid: Complex64 = exact.iter().zip(&out.amp).map(|(a, b)| a.conj() * b).sum();
        assert!(
            fid.norm_sqr() >= 1.0 - 1e-8,
            "fidelity {} too small",
            fid.norm_sqr()
        );
    }

    #[test]
    fn eigenstate_only_gains_a_phase() {
        let (h, basis) = pxp(8);
        let (vals, vecs) = crate::linalg::sym_eig(&h.mat.to_dense());
        let dim = basis.len();
        let psi = StateVector {
            basis,
            amp: (0..dim).map(|i| Complex64::new(vecs[(i, 3)], 0.0)).collect(),
        };
        let out = propagate(&h, &psi, 1.7, &KrylovOptions::default()).unwrap();
        let overlap = psi.inner(&out);
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
        assert!((overlap.arg() - (-1.7 * vals[3])).rem_euclid(2.0 * std::f64::consts::PI) < 1e-8
            || (overlap.arg() - (-1.7 * vals[3])).rem_euclid(2.0 * std::f64::consts::PI)
                > 2.0 * std::f64::consts::PI - 1e-8);
    }

    #[test]
    fn energy_is_conserved_to_long_times() {
        let (h, basis) = pxp(10);
        let psi0 = StateVector::vacuum(basis);
        let times: Vec<f64> = (1..=10).map(|i| 2.0 * i as f64).collect();
        let traj = sample_trajectory(&h, &psi0, &times, &KrylovOptions::default()).unwrap();
        let dim = h.dim();
        let energy = |s: &StateVector| -> f64 {
            let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
            h.mat.matvec_complex(&s.amp, &mut tmp);
            s.amp
                .iter()
                .zip(&tmp)
                .map(|(a, b)| (a.conj() * b).re)
                .sum()
        };
        let e0 = energy(&psi0);
        for s in &traj.states {
            assert!((energy(s) - e0).abs() <= 1e-6);
            assert!((s.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn forward_backward_returns_initial_state() {
        let (h, basis) = pxp(10);
        let psi0 = StateVector::crystal(basis, 2).unwrap();
        let opts = KrylovOptions::default();
        let fwd = propagate(&h, &psi0, 3.3, &opts).unwrap();
        let back = propagate(&h, &fwd, -3.3, &opts).unwrap();
        let dev: f64 = back
            .amp
            .iter()
            .zip(&psi0.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-7, "round trip deviation {dev}");
    }

    #[test]
    fn product_state_has_no_connected_correlations_at_t0() {
        let (h, basis) = pxp(12);
        let psi0 = StateVector::vacuum(basis);
        let traj = sample_trajectory(&h, &psi0, &[0.0], &KrylovOptions::default()).unwrap();
        let series = connected_correlator_series(&traj, true, None);
        for &v in &series.values[0] {
            assert!(v.abs() < 1e-14);
        }
    }

    #[test]
    fn field_mode_mean_vanishes_for_vacuum_quench() {
        let (h, basis) = pxp(12);
        let psi0 = StateVector::vacuum(basis);
        let times: Vec<f64> = (0..8).map(|i| 0.5 * i as f64).collect();
        let traj = sample_trajectory(&h, &psi0, &times, &KrylovOptions::default()).unwrap();
        for q_index in [0, 1, 3] {
            let series = field_mode_series(&traj, q_index);
            for (it, m) in series.mean.iter().enumerate() {
                assert!(
                    m.norm() <= 1e-8,
                    "q_index {q_index} t={} |mean| {}",
                    times[it],
                    m.norm()
                );
            }
        }
        // Variance starts at zero for the Z-basis product state.
        let series = field_mode_series(&traj, 2);
        assert!(series.variance[0].abs() < 1e-12);
    }

    #[test]
    fn blockade_violation_stays_small_at_paper_drive_parameters() {
        // Rydberg chain on the full product space, N = 10 fine-time dataset
        // parameters; weight outside the blockaded space stays below 1e-3
        // for t <= 3.3 cycles.
        use crate::models::{build_rydberg, ModelSpec};
        let n = 10;
        let spec = ModelSpec::RydbergLongRange {
            n_sites: n,
            boundary: Boundary::Open,
            omega: 5.3,
            delta: 0.6,
            c6_ghz_um6: 254.0,
            spacing_um: 3.77,
        };
        let basis = BasisRef::Full {
            n_sites: n,
            boundary: Boundary::Open,
        };
        let h = build_rydberg(&spec, basis.clone()).unwrap();
        let psi0 = StateVector::vacuum(basis.clone());
        let cycles = [0.8, 1.65, 2.5, 3.3];
        let times: Vec<f64> = cycles.iter().map(|&c| spec.evolution_time(c)).collect();
        let traj = sample_trajectory(&h, &psi0, &times, &KrylovOptions::default()).unwrap();
        for (i, state) in traj.states.iter().enumerate() {
            let mut bad = 0.0;
            for (idx, a) in state.amp.iter().enumerate() {
                let config = basis.config(idx);
                if !crate::hilbert::is_blockaded(config, n, Boundary::Open) {
                    bad += a.norm_sqr();
                }
            }
            assert!(
                bad < 1e-3,
                "blockade-violating weight {bad:.2e} at {} cycles",
                cycles[i]
            );
        }
    }

    #[test]
    fn stochastic_autocorrelator_brackets_exact_value() {
        let (h, _) = pxp(8);
        let probe = crate::ops::OperatorString::parse("Z").unwrap();
        let times = [0.0, 1.0];
        let eig = crate::spectral::diagonalize(&h);
        let exact = inf_temp_autocorrelator(&eig, &probe, 4, &[0], &times);
        let (est, err) = inf_temp_autocorrelator_stochastic(
            &h,
            &probe,
            4,
            &[0],
            &times,
            64,
            7,
            &KrylovOptions::default(),
        )
        .unwrap();
        for it in 0..times.len() {
            let dev = (est[0][it] - exact[0][it]).norm();
            assert!(
                dev < 5.0 * err[0][it].max(1e-3),
                "t={}: dev {dev}, err {}",
                times[it],
                err[0][it]
            );
        }
    }
}
