//! Exact traces and Hilbert-Schmidt inner products on the blockaded space.
//!
//! Finite-size traces are pure counting problems and are evaluated with
//! integer transfer-matrix sweeps; floats appear only in the final division
//! by the dimension. Thermodynamic-limit values come from the leading
//! eigenvector of the 2x2 transfer matrix, with connected long-range pieces
//! (present only for the bare `Z` operator) resummed as exact geometric
//! series in the subleading eigenvalue.
//!
//! All momentum-space inner products returned here are *connected*: the
//! identity components of both operators are subtracted, matching the
//! convention used to orthonormalize the operator basis.

use crate::error::{Error, Result};
use crate::hilbert::Boundary;
use crate::ops::{Monomial, MomentumOperator, OperatorString, SiteOp};
use crate::PHI;
use num_bigint::BigInt;
use num_complex::Complex64;

/// An exact trace as an integer numerator over the space dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactTrace {
    pub numerator: BigInt,
    pub dimension: BigInt,
}

impl ExactTrace {
    pub fn as_f64(&self) -> f64 {
        // Both integers fit comfortably in f64 for any chain this crate
        // enumerates; fall back to string parsing for larger counts.
        let num = f64_of(&self.numerator);
        let den = f64_of(&self.dimension);
        num / den
    }
}

fn f64_of(x: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().expect("finite")
}

/// Finite-N or thermodynamic-limit evaluation mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceMode {
    FiniteN(usize, Boundary),
    Tdl,
}

// --- finite-N counting engine ------------------------------------------------

/// Fold absolute-site operators into per-site weights modulo the chain.
///
/// Returns `None` when the sitewise product vanishes or an off-diagonal
/// factor survives (integer trace 0 in both cases).
fn site_weights_mod_n(
    factors: &[(i64, SiteOp)],
    n: usize,
) -> Option<Vec<(usize, (i64, i64))>> {
    use std::collections::BTreeMap;
    let mut map: BTreeMap<usize, SiteOp> = BTreeMap::new();
    for &(site, op) in factors {
        let s = site.rem_euclid(n as i64) as usize;
        let cur = map.remove(&s).unwrap_or(SiteOp::I);
        map.insert(s, cur.mul(op)?);
    }
    let mut out = Vec::with_capacity(map.len());
    for (s, op) in map {
        let (w0, w1) = op.diagonal_weights()?;
        out.push((s, (w0 as i64, w1 as i64)));
    }
    Some(out)
}

/// Integer-weighted count over all blockaded configurations.
///
/// Computes `Σ_config Π_j w_j(bit_j)` where unlisted sites have weight 1.
fn weighted_count(weights: &[(usize, (i64, i64))], n: usize, boundary: Boundary) -> i128 {
    let mut w = vec![(1i128, 1i128); n];
    for &(s, (w0, w1)) in weights {
        w[s] = (w[s].0 * w0 as i128, w[s].1 * w1 as i128);
    }
    match boundary {
        Boundary::Open => {
            // f[b] = weighted count of prefixes ending with bit b.
            let (mut f0, mut f1) = (w[0].0, w[0].1);
            for site in w.iter().take(n).skip(1) {
                let (n0, n1) = (site.0 * (f0 + f1), site.1 * f0);
                f0 = n0;
                f1 = n1;
            }
            f0 + f1
        }
        Boundary::Periodic => {
            if n == 1 {
                return w[0].0;
            }
            let mut total = 0i128;
            for first in 0..2usize {
                let (mut f0, mut f1) = match first {
                    0 => (w[0].0, 0),
                    _ => (0, w[0].1),
                };
                for site in w.iter().take(n).skip(1) {
                    let (n0, n1) = (site.0 * (f0 + f1), site.1 * f0);
                    f0 = n0;
                    f1 = n1;
                }
                // Close the ring: last bit adjacent to the first.
                total += if first == 1 { f0 } else { f0 + f1 };
            }
            total
        }
    }
}

fn monomial_factors(m: &Monomial) -> Vec<(i64, SiteOp)> {
    m.ops
        .iter()
        .enumerate()
        .map(|(i, &op)| (m.start + i as i64, op))
        .collect()
}

/// Exact `tr(m) / D` of a monomial on a finite chain (coefficient excluded).
fn finite_trace_count(m: &Monomial, n: usize, boundary: Boundary) -> i128 {
    match site_weights_mod_n(&monomial_factors(m), n) {
        Some(w) => weighted_count(&w, n, boundary),
        None => 0,
    }
}

/// Exact trace ratio of a symbolic string on a finite chain.
///
/// Any term with a surviving `σ±` contributes exactly zero. The string must
/// fit on the chain.
pub fn string_trace(s: &OperatorString, n_sites: usize, boundary: Boundary) -> Result<ExactTrace> {
    if s.len() > n_sites {
        return Err(Error::invalid(format!(
            "operator string of length {} does not fit on {} sites",
            s.len(),
            n_sites
        )));
    }
    let sum = s.to_sum();
    let mut numerator = BigInt::from(0);
    for t in &sum.terms {
        let count = finite_trace_count(t, n_sites, boundary);
        // String expansions over {I,P,Z,n,X,Y,σ±} have integer coefficients
        // on their diagonal terms.
        debug_assert!(t.coeff.im.abs() < 1e-12 || count == 0);
        let c = t.coeff.re.round() as i128;
        debug_assert!((t.coeff.re - c as f64).abs() < 1e-12);
        numerator += BigInt::from(c) * BigInt::from(count);
    }
    let dim = BigInt::from(weighted_count(&[], n_sites, boundary) as u128);
    Ok(ExactTrace {
        numerator,
        dimension: dim,
    })
}

// --- thermodynamic-limit engine ----------------------------------------------

/// Transfer-matrix data for the golden-ratio chain.
struct Transfer {
    /// Normalized Perron vector (φ, 1)/√(1+φ²).
    v: [f64; 2],
    /// Normalized subleading eigenvector (-1/φ, 1)/√(1+1/φ²).
    u: [f64; 2],
    /// Subleading-to-leading eigenvalue ratio, -1/φ².
    r: f64,
}

impl Transfer {
    fn new() -> Self {
        let nv = (1.0 + PHI * PHI).sqrt();
        let l2 = 1.0 - PHI; // = -1/φ
        let nu = (1.0 + l2 * l2).sqrt();
        Transfer {
            v: [PHI / nv, 1.0 / nv],
            u: [l2 / nu, 1.0 / nu],
            r: l2 / PHI,
        }
    }

    /// Apply the normalized transfer matrix `T/φ` to a 2-vector.
    fn step(x: [f64; 2]) -> [f64; 2] {
        [(x[0] + x[1]) / PHI, x[0] / PHI]
    }
}

/// `M̂ = W_0 T̂ W_1 ⋯ T̂ W_{m-1}` contracted against (left, right) vectors.
///
/// Returns `None` for off-diagonal monomials.
fn block_contract(m: &Monomial, left: [f64; 2], right: [f64; 2]) -> Option<f64> {
    if m.is_identity() {
        return Some(left[0] * right[0] + left[1] * right[1]);
    }
    let mut x = right;
    for (i, &op) in m.ops.iter().enumerate().rev() {
        let (w0, w1) = op.diagonal_weights()?;
        x = [w0 * x[0], w1 * x[1]];
        if i > 0 {
            x = Transfer::step(x);
        }
    }
    Some(left[0] * x[0] + left[1] * x[1])
}

/// Thermodynamic-limit `tr(m)/D` of a monomial (coefficient excluded).
pub fn tdl_trace_ratio(m: &Monomial) -> f64 {
    let t = Transfer::new();
    block_contract(m, t.v, t.v).unwrap_or(0.0)
}

/// Infinite-temperature expectation of a string in the thermodynamic limit.
pub fn tdl_expectation(s: &OperatorString) -> f64 {
    s.to_sum()
        .terms
        .iter()
        .map(|m| {
            debug_assert!(m.coeff.im.abs() < 1e-12 || !m.is_diagonal());
            m.coeff.re * tdl_trace_ratio(m)
        })
        .sum()
}

/// Finite-size infinite-temperature expectation of a string.
pub fn finite_expectation(s: &OperatorString, n: usize, boundary: Boundary) -> Result<f64> {
    Ok(string_trace(s, n, boundary)?.as_f64())
}

// --- connected momentum-space inner products ----------------------------------

/// Connected trace `tr(a b_δ)/D - tr(a)/D · tr(b)/D` for one placement of
/// unit-coefficient monomials.
fn tdl_connected_pair(a: &Monomial, b: &Monomial, delta: i64) -> f64 {
    let full = match a.mul(&b.shifted(delta)) {
        Some(p) if p.is_diagonal() => tdl_trace_ratio(&p),
        _ => 0.0,
    };
    full - tdl_trace_ratio(a) * tdl_trace_ratio(b)
}

/// Connected inner product `<A(k), B(k)>` in the thermodynamic limit.
///
/// Overlapping placements are evaluated directly; the exponential tails of
/// diagonal-diagonal pairs (nonzero only for bare `Z`-like content) are
/// resummed as geometric series in the subleading transfer eigenvalue.
pub fn inner_product_tdl(a: &MomentumOperator, b: &MomentumOperator) -> Complex64 {
    assert!(
        (a.k - b.k).abs() < 1e-12,
        "operators at different momenta are orthogonal by translation invariance"
    );
    let k = a.k;
    let t = Transfer::new();
    let dphase = b.centroid - a.centroid;
    let mut total = Complex64::new(0.0, 0.0);
    let adag = a.local.dagger();
    for ma in &adag.terms {
        for mb in &b.local.terms {
            let coeff = ma.coeff * mb.coeff;
            if ma.is_identity() || mb.is_identity() {
                // Identity components carry no connected weight.
                continue;
            }
            // Direct evaluation over all placements with support overlap.
            let lo = ma.start - mb.end();
            let hi = ma.end() - mb.start;
            for delta in lo..=hi {
                let unit_a = Monomial::new(Complex64::new(1.0, 0.0), ma.start, ma.ops.clone());
                let unit_b = Monomial::new(Complex64::new(1.0, 0.0), mb.start, mb.ops.clone());
                let val = tdl_connected_pair(&unit_a, &unit_b, delta);
                if val != 0.0 {
                    let phase = Complex64::from_polar(1.0, k * (delta as f64 + dphase));
                    total += coeff * val * phase;
                }
            }
            // Geometric tails for detached placements. Connected value at
            // gap g is <v|M_a|u><u|M_b|v> r^{g+1}, so the phase-weighted sum
            // over g >= 0 closes to r/(1 - r e^{±ik}).
            if ma.is_diagonal() && mb.is_diagonal() {
                let one = Complex64::new(1.0, 0.0);
                let unit_a = Monomial::new(one, ma.start, ma.ops.clone());
                let unit_b = Monomial::new(one, mb.start, mb.ops.clone());
                let ca = block_contract(&unit_a, t.v, t.u).unwrap();
                let cb = block_contract(&unit_b, t.u, t.v).unwrap();
                if ca * cb != 0.0 {
                    // b strictly to the right of a.
                    let delta0 = (ma.end() + 1 - mb.start) as f64;
                    let geom = t.r / (one - t.r * Complex64::from_polar(1.0, k));
                    total += coeff
                        * ca
                        * cb
                        * Complex64::from_polar(1.0, k * (delta0 + dphase))
                        * geom;
                }
                let cv = block_contract(&unit_b, t.v, t.u).unwrap();
                let cu = block_contract(&unit_a, t.u, t.v).unwrap();
                if cv * cu != 0.0 {
                    // b strictly to the left of a.
                    let delta0 = (ma.start - 1 - mb.end()) as f64;
                    let geom = t.r / (one - t.r * Complex64::from_polar(1.0, -k));
                    total += coeff
                        * cv
                        * cu
                        * Complex64::from_polar(1.0, k * (delta0 + dphase))
                        * geom;
                }
            }
        }
    }
    total
}

/// Connected inner product `<A(k), B(k)>` on a finite periodic chain.
///
/// `k` must lie on the `2π j / N` momentum grid. Exact integer counting is
/// used for every placement, including wrapped ones.
pub fn inner_product_finite(
    a: &MomentumOperator,
    b: &MomentumOperator,
    n: usize,
    boundary: Boundary,
) -> Result<Complex64> {
    assert!((a.k - b.k).abs() < 1e-12);
    let k = a.k;
    let j = k * n as f64 / (2.0 * std::f64::consts::PI);
    if (j - j.round()).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "momentum {k} is not on the {n}-site grid"
        )));
    }
    if boundary != Boundary::Periodic {
        return Err(Error::invalid(
            "finite-size momentum inner products require periodic boundaries",
        ));
    }
    let dim = weighted_count(&[], n, boundary);
    let dphase = b.centroid - a.centroid;
    let adag = a.local.dagger();
    let mut total = Complex64::new(0.0, 0.0);
    for ma in &adag.terms {
        for mb in &b.local.terms {
            if ma.is_identity() || mb.is_identity() {
                continue;
            }
            let ta = finite_trace_count(ma, n, boundary);
            let tb = finite_trace_count(mb, n, boundary);
            let disconnect = (ta as f64 / dim as f64) * (tb as f64 / dim as f64);
            for delta in 0..n as i64 {
                let mut factors = monomial_factors(ma);
                factors.extend(
                    monomial_factors(mb)
                        .into_iter()
                        .map(|(s, o)| (s + delta, o)),
                );
                let full = match site_weights_mod_n(&factors, n) {
                    Some(w) => weighted_count(&w, n, boundary) as f64 / dim as f64,
                    None => 0.0,
                };
                let val = full - disconnect;
                if val != 0.0 {
                    let phase = Complex64::from_polar(1.0, k * (delta as f64 + dphase));
                    total += ma.coeff * mb.coeff * val * phase;
                }
            }
        }
    }
    Ok(total)
}

/// Connected inner product in either mode.
pub fn inner_product(
    a: &MomentumOperator,
    b: &MomentumOperator,
    mode: TraceMode,
) -> Result<Complex64> {
    match mode {
        TraceMode::Tdl => Ok(inner_product_tdl(a, b)),
        TraceMode::FiniteN(n, boundary) => inner_product_finite(a, b, n, boundary),
    }
}

/// Connected infinite-temperature correlator of two strings at distance `d`.
pub fn inf_temp_connected(
    a: &OperatorString,
    b: &OperatorString,
    d: usize,
    mode: TraceMode,
) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("distance must be at least 1"));
    }
    match mode {
        TraceMode::Tdl => {
            let sa = a.to_sum();
            let sb = b.to_sum().shifted(d as i64);
            let mut full = 0.0;
            for ma in &sa.terms {
                for mb in &sb.terms {
                    if let Some(p) = ma.mul(mb) {
                        if p.is_diagonal() {
                            full += p.coeff.re * tdl_trace_ratio(&Monomial::new(
                                Complex64::new(1.0, 0.0),
                                p.start,
                                p.ops,
                            ));
                        }
                    }
                }
            }
            Ok(full - tdl_expectation(a) * tdl_expectation(b))
        }
        TraceMode::FiniteN(n, boundary) => {
            let sa = a.to_sum();
            let sb = b.to_sum().shifted(d as i64);
            let dim = weighted_count(&[], n, boundary) as f64;
            let mut full = 0.0;
            for ma in &sa.terms {
                for mb in &sb.terms {
                    let mut factors = monomial_factors(ma);
                    factors.extend(monomial_factors(mb));
                    if let Some(w) = site_weights_mod_n(&factors, n) {
                        full += (ma.coeff * mb.coeff).re * weighted_count(&w, n, boundary) as f64
                            / dim;
                    }
                }
            }
            let ea = finite_expectation(a, n, boundary)?;
            let eb = finite_expectation(b, n, boundary)?;
            Ok(full - ea * eb)
        }
    }
}

/// `<P>' = <P_j P_{j+1}> / <P_j>`: the expectation of `P` conditioned on a
/// neighboring site being in the `0` state.
pub fn conditioned_expectation(mode: TraceMode) -> f64 {
    match mode {
        TraceMode::Tdl => 1.0 / PHI,
        TraceMode::FiniteN(n, _) => {
            // D_{N-2}^{(OBC)} / D_{N-1}^{(OBC)} from the exact counts.
            let d1 = crate::hilbert::dimension(n - 2, Boundary::Open) as f64;
            let d2 = crate::hilbert::dimension(n - 1, Boundary::Open) as f64;
            d1 / d2
        }
    }
}

/// Closed form of the connected `Z`-`Z` correlator, `(4/5)(-φ^{-2})^d`.
pub fn zz_connected_closed_form(d: usize) -> f64 {
    0.8 * (-1.0 / (PHI * PHI)).powi(d as i32)
}

/// Closed form of `||Z(k)||²` (identity-subtracted), `4/(√5 (3+2cos k))`.
pub fn z_norm_sq_closed_form(k: f64) -> f64 {
    4.0 / (5.0f64.sqrt() * (3.0 + 2.0 * k.cos()))
}
