//! Compressed sparse row matrices and the realization of symbolic operators
//! as matrices over an enumerated basis.

use crate::error::{Error, Result};
use crate::hilbert::{BlockadedBasis, Boundary};
use crate::ops::{MomentumOperator, OperatorSum, SiteOp};
use num_complex::Complex64;
use std::sync::Arc;

/// The space a matrix acts on: an enumerated blockaded basis or the full
/// `2^N` product space.
#[derive(Clone, Debug)]
pub enum BasisRef {
    Blockaded(Arc<BlockadedBasis>),
    Full { n_sites: usize, boundary: Boundary },
}

impl BasisRef {
    pub fn len(&self) -> usize {
        match self {
            BasisRef::Blockaded(b) => b.len(),
            BasisRef::Full { n_sites, .. } => 1usize << n_sites,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_sites(&self) -> usize {
        match self {
            BasisRef::Blockaded(b) => b.n_sites,
            BasisRef::Full { n_sites, .. } => *n_sites,
        }
    }

    pub fn boundary(&self) -> Boundary {
        match self {
            BasisRef::Blockaded(b) => b.boundary,
            BasisRef::Full { boundary, .. } => *boundary,
        }
    }

    pub fn config(&self, index: usize) -> u32 {
        match self {
            BasisRef::Blockaded(b) => b.states[index],
            BasisRef::Full { .. } => index as u32,
        }
    }

    pub fn index_of(&self, config: u32) -> Option<usize> {
        match self {
            BasisRef::Blockaded(b) => b.index_of(config),
            BasisRef::Full { n_sites, .. } => {
                if (config as usize) < (1usize << n_sites) {
                    Some(config as usize)
                } else {
                    None
                }
            }
        }
    }

    /// Two references describe the same space.
    pub fn same_space(&self, other: &BasisRef) -> bool {
        match (self, other) {
            (BasisRef::Blockaded(a), BasisRef::Blockaded(b)) => {
                a.n_sites == b.n_sites && a.boundary == b.boundary
            }
            (BasisRef::Full { n_sites: a, .. }, BasisRef::Full { n_sites: b, .. }) => a == b,
            _ => false,
        }
    }
}

/// Real CSR matrix.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub data: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_triplets(n: usize, mut triplets: Vec<(u32, u32, f64)>) -> CsrMatrix {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; n + 1];
        let mut indices: Vec<u32> = Vec::with_capacity(triplets.len());
        let mut data: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut cur_row = 0u32;
        let mut row_start = 0usize;
        for (r, c, v) in triplets {
            while cur_row < r {
                indptr[cur_row as usize + 1] = indices.len();
                cur_row += 1;
                row_start = indices.len();
            }
            if indices.len() > row_start && *indices.last().unwrap() == c {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
            }
        }
        while (cur_row as usize) < n {
            indptr[cur_row as usize + 1] = indices.len();
            cur_row += 1;
        }
        CsrMatrix {
            n,
            indptr,
            indices,
            data,
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn matvec_complex(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for r in 0..self.n {
            let mut acc = Complex64::new(0.0, 0.0);
            for idx in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[idx] * x[self.indices[idx] as usize];
            }
            y[r] = acc;
        }
    }

    pub fn matvec_real(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let mut acc = 0.0;
            for idx in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[idx] * x[self.indices[idx] as usize];
            }
            y[r] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for r in 0..self.n {
            for idx in self.indptr[r]..self.indptr[r + 1] {
                if self.indices[idx] as usize == r {
                    d[r] += self.data[idx];
                }
            }
        }
        d
    }

    pub fn to_dense(&self) -> faer::Mat<f64> {
        let mut m = faer::Mat::zeros(self.n, self.n);
        for r in 0..self.n {
            for idx in self.indptr[r]..self.indptr[r + 1] {
                m[(r, self.indices[idx] as usize)] += self.data[idx];
            }
        }
        m
    }

    /// Largest absolute asymmetry `max |A - Aᵀ|`.
    pub fn max_asymmetry(&self) -> f64 {
        use std::collections::HashMap;
        let mut map: HashMap<(u32, u32), f64> = HashMap::new();
        for r in 0..self.n {
            for idx in self.indptr[r]..self.indptr[r + 1] {
                *map.entry((r as u32, self.indices[idx])).or_insert(0.0) += self.data[idx];
            }
        }
        let mut worst: f64 = 0.0;
        for (&(r, c), &v) in &map {
            let vt = map.get(&(c, r)).copied().unwrap_or(0.0);
            worst = worst.max((v - vt).abs());
        }
        worst
    }
}

/// Complex CSR matrix.
#[derive(Clone, Debug)]
pub struct CsrMatrixC {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub data: Vec<Complex64>,
}

impl CsrMatrixC {
    pub fn from_triplets(n: usize, mut triplets: Vec<(u32, u32, Complex64)>) -> CsrMatrixC {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; n + 1];
        let mut indices: Vec<u32> = Vec::with_capacity(triplets.len());
        let mut data: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut cur_row = 0u32;
        let mut row_start = 0usize;
        for (r, c, v) in triplets {
            while cur_row < r {
                indptr[cur_row as usize + 1] = indices.len();
                cur_row += 1;
                row_start = indices.len();
            }
            if indices.len() > row_start && *indices.last().unwrap() == c {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
            }
        }
        while (cur_row as usize) < n {
            indptr[cur_row as usize + 1] = indices.len();
            cur_row += 1;
        }
        CsrMatrixC {
            n,
            indptr,
            indices,
            data,
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for r in 0..self.n {
            let mut acc = Complex64::new(0.0, 0.0);
            for idx in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[idx] * x[self.indices[idx] as usize];
            }
            y[r] = acc;
        }
    }

    pub fn to_dense(&self) -> faer::Mat<Complex64> {
        let mut m = faer::Mat::zeros(self.n, self.n);
        for r in 0..self.n {
            for idx in self.indptr[r]..self.indptr[r + 1] {
                m[(r, self.indices[idx] as usize)] += self.data[idx];
            }
        }
        m
    }
}

/// Apply a single monomial to a configuration.
///
/// Returns the image configuration, or `None` when the amplitude vanishes.
pub fn apply_monomial_to_config(factors: &[(i64, SiteOp)], config: u32, n: usize) -> Option<u32> {
    let mut out = config;
    for &(site, op) in factors {
        let s = site.rem_euclid(n as i64) as usize;
        let bit = out >> s & 1;
        match op {
            SiteOp::I => {}
            SiteOp::P => {
                if bit == 1 {
                    return None;
                }
            }
            SiteOp::N => {
                if bit == 0 {
                    return None;
                }
            }
            SiteOp::Up => {
                if bit == 1 {
                    return None;
                }
                out ^= 1 << s;
            }
            SiteOp::Dn => {
                if bit == 0 {
                    return None;
                }
                out ^= 1 << s;
            }
        }
    }
    Some(out)
}

pub(crate) fn monomial_factors(m: &crate::ops::Monomial) -> Vec<(i64, SiteOp)> {
    m.ops
        .iter()
        .enumerate()
        .map(|(i, &op)| (m.start + i as i64, op))
        .collect()
}

/// Realize a local operator sum (placed at absolute sites) as a matrix.
///
/// For open chains, any monomial whose support leaves `[0, N)` is dropped;
/// for periodic chains sites wrap. Matrix elements landing outside a
/// blockaded basis are projected out.
pub fn operator_matrix(op: &OperatorSum, basis: &BasisRef) -> CsrMatrixC {
    let n = basis.n_sites();
    let dim = basis.len();
    let mut triplets = Vec::new();
    for m in &op.terms {
        if m.is_identity() {
            for i in 0..dim {
                triplets.push((i as u32, i as u32, m.coeff));
            }
            continue;
        }
        if basis.boundary() == Boundary::Open && (m.start < 0 || m.end() >= n as i64) {
            continue;
        }
        let factors = monomial_factors(m);
        for col in 0..dim {
            let config = basis.config(col);
            if let Some(out) = apply_monomial_to_config(&factors, config, n) {
                if let Some(row) = basis.index_of(out) {
                    triplets.push((row as u32, col as u32, m.coeff));
                }
            }
        }
    }
    CsrMatrixC::from_triplets(dim, triplets)
}

/// Realize a momentum operator `O(k) = N^{-1/2} Σ_j e^{ik(j+c)} O_j`.
///
/// Periodic chains sum all `N` translations (with `k` on the momentum grid);
/// open chains keep the translations whose support stays inside the chain.
pub fn momentum_operator_matrix(op: &MomentumOperator, basis: &BasisRef) -> Result<CsrMatrixC> {
    let n = basis.n_sites();
    let dim = basis.len();
    if basis.boundary() == Boundary::Periodic {
        let j = op.k * n as f64 / (2.0 * std::f64::consts::PI);
        if (j - j.round()).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "momentum {} is not on the {n}-site grid",
                op.k
            )));
        }
    }
    let norm = if op.normalized {
        1.0 / (n as f64).sqrt()
    } else {
        1.0
    };
    let mut triplets = Vec::new();
    for j in 0..n {
        let phase = Complex64::from_polar(norm, op.k * (j as f64 + op.centroid));
        for m in &op.local.terms {
            let shifted = m.shifted(j as i64);
            if basis.boundary() == Boundary::Open && (shifted.start < 0 || shifted.end() >= n as i64)
            {
                continue;
            }
            let factors = monomial_factors(&shifted);
            for col in 0..dim {
                let config = basis.config(col);
                if let Some(out) = apply_monomial_to_config(&factors, config, n) {
                    if let Some(row) = basis.index_of(out) {
                        triplets.push((row as u32, col as u32, phase * m.coeff));
                    }
                }
            }
        }
    }
    Ok(CsrMatrixC::from_triplets(dim, triplets))
}
