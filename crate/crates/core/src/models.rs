//! Sparse Hamiltonians for the models studied: the PXP chain, the long-range
//! Rydberg chain, the spin form of the lattice Schwinger model, and the
//! Ising/XXZ comparison models.
//!
//! Conventions: `P = |0><0|`, `n = |1><1|`, `Z = P - n` (so `<Z> > 0` at
//! infinite temperature on the blockaded space), `X = σ⁺ + σ⁻`. The PXP
//! model uses unit flip amplitude, under which one drive cycle lasts `π`.
//! The Rydberg Hamiltonian is stored as `H/h` in MHz; one cycle is `1/Ω` µs
//! and the evolution phase for `t` µs is `2π (H/h) t`.

use crate::error::{Error, Result};
use crate::hilbert::{BlockadedBasis, Boundary};
use crate::sparse::{BasisRef, CsrMatrix};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Parameters of a model run, deserializable from a JSON document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum ModelSpec {
    /// `H = Σ_j P_{j-1} X_j P_{j+1}` with unit amplitude.
    #[serde(rename = "PXP")]
    Pxp { n_sites: usize, boundary: Boundary },
    /// `H/h = Ω Σ S^x - Δ Σ n + (C₆/a⁶) Σ_{i>j} n_i n_j / |i-j|⁶`, MHz.
    #[serde(rename = "RydbergLongRange")]
    RydbergLongRange {
        n_sites: usize,
        boundary: Boundary,
        /// Rabi frequency, MHz.
        omega: f64,
        /// Detuning, MHz.
        delta: f64,
        /// van der Waals coefficient, GHz · µm⁶.
        c6_ghz_um6: f64,
        /// Lattice spacing, µm.
        spacing_um: f64,
    },
    /// Gauge-eliminated lattice Schwinger model on the full spin space:
    /// `H = w Σ (σ⁺σ⁻ + h.c.) + (m/2) Σ (-1)^n σ^z_n + J Σ L_n²` with
    /// `L_n = ε₀ + ½ Σ_{l<=n} (σ^z_l + (-1)^l)` and the staggering starting
    /// negative at the first site.
    #[serde(rename = "SchwingerSpin")]
    SchwingerSpin {
        n_sites: usize,
        w: f64,
        mass: f64,
        coupling: f64,
        background: f64,
    },
    /// `H = Σ_j h_x X_j + h_z Z_j + J X_j X_{j+1}` (longitudinal+transverse).
    #[serde(rename = "MixedFieldIsing")]
    MixedFieldIsing {
        n_sites: usize,
        boundary: Boundary,
        h_x: f64,
        h_z: f64,
        j: f64,
    },
    /// Integrable `h_x = 0` limit of the above.
    #[serde(rename = "TransverseFieldIsing")]
    TransverseFieldIsing {
        n_sites: usize,
        boundary: Boundary,
        h_z: f64,
        j: f64,
    },
    /// `H = Σ_j X_jX_{j+1} + Y_jY_{j+1} + Δ Z_jZ_{j+1}`.
    #[serde(rename = "XXZ")]
    Xxz {
        n_sites: usize,
        boundary: Boundary,
        delta_aniso: f64,
    },
}

impl ModelSpec {
    pub fn n_sites(&self) -> usize {
        match self {
            ModelSpec::Pxp { n_sites, .. }
            | ModelSpec::RydbergLongRange { n_sites, .. }
            | ModelSpec::SchwingerSpin { n_sites, .. }
            | ModelSpec::MixedFieldIsing { n_sites, .. }
            | ModelSpec::TransverseFieldIsing { n_sites, .. }
            | ModelSpec::Xxz { n_sites, .. } => *n_sites,
        }
    }

    pub fn boundary(&self) -> Boundary {
        match self {
            ModelSpec::Pxp { boundary, .. }
            | ModelSpec::RydbergLongRange { boundary, .. }
            | ModelSpec::MixedFieldIsing { boundary, .. }
            | ModelSpec::TransverseFieldIsing { boundary, .. }
            | ModelSpec::Xxz { boundary, .. } => *boundary,
            ModelSpec::SchwingerSpin { .. } => Boundary::Open,
        }
    }

    /// Duration of one drive cycle in the model's natural time unit.
    ///
    /// PXP-style models with unit amplitude: `π`. Rydberg: `1/Ω` µs, with
    /// the extra `2π` of the frequency-to-phase conversion folded into
    /// [`ModelSpec::evolution_time`].
    pub fn cycle_time(&self) -> f64 {
        match self {
            ModelSpec::RydbergLongRange { omega, .. } => 1.0 / omega,
            _ => crate::PXP_CYCLE,
        }
    }

    /// Phase-accumulation time for `cycles` drive cycles, suitable for
    /// passing to the propagator together with this model's Hamiltonian.
    pub fn evolution_time(&self, cycles: f64) -> f64 {
        match self {
            // H is stored as H/h in MHz: phase = 2π (H/h) t_µs.
            ModelSpec::RydbergLongRange { omega, .. } => {
                2.0 * std::f64::consts::PI * cycles / omega
            }
            _ => cycles * crate::PXP_CYCLE,
        }
    }
}

/// A Hermitian sparse operator over a basis.
#[derive(Clone, Debug)]
pub struct SparseHamiltonian {
    pub basis: BasisRef,
    pub mat: CsrMatrix,
    pub hermitian: bool,
}

impl SparseHamiltonian {
    pub fn dim(&self) -> usize {
        self.mat.n
    }

    fn from_triplets(basis: BasisRef, triplets: Vec<(u32, u32, f64)>) -> SparseHamiltonian {
        let mat = CsrMatrix::from_triplets(basis.len(), triplets);
        debug_assert_eq!(mat.max_asymmetry(), 0.0);
        SparseHamiltonian {
            basis,
            mat,
            hermitian: true,
        }
    }
}

fn neighbors_unexcited(config: u32, j: usize, n: usize, boundary: Boundary) -> bool {
    let left_ok = match (j, boundary) {
        (0, Boundary::Open) => true,
        (0, Boundary::Periodic) => config >> (n - 1) & 1 == 0,
        _ => config >> (j - 1) & 1 == 0,
    };
    let right_ok = if j + 1 == n {
        match boundary {
            Boundary::Open => true,
            Boundary::Periodic => config & 1 == 0,
        }
    } else {
        config >> (j + 1) & 1 == 0
    };
    left_ok && right_ok
}

/// Build the PXP Hamiltonian on a blockaded basis: off-diagonal unit entries
/// exactly where a single spin flip preserves the blockade.
pub fn build_pxp(basis: &Arc<BlockadedBasis>) -> SparseHamiltonian {
    let n = basis.n_sites;
    let boundary = basis.boundary;
    let mut triplets = Vec::new();
    for (col, &config) in basis.states.iter().enumerate() {
        for j in 0..n {
            if !neighbors_unexcited(config, j, n, boundary) {
                continue;
            }
            let target = config ^ (1 << j);
            if let Some(row) = basis.index_of(target) {
                triplets.push((row as u32, col as u32, 1.0));
            }
        }
    }
    SparseHamiltonian::from_triplets(BasisRef::Blockaded(Arc::clone(basis)), triplets)
}

/// Distance between sites `i > j` on the chain, minimal-image for rings.
fn site_distance(i: usize, j: usize, n: usize, boundary: Boundary) -> usize {
    let d = i - j;
    match boundary {
        Boundary::Open => d,
        Boundary::Periodic => d.min(n - d),
    }
}

/// Build the long-range Rydberg Hamiltonian `H/h` in MHz.
///
/// The basis may be blockaded (interactions and flips evaluated only on
/// legal configurations) or the full product space.
pub fn build_rydberg(spec: &ModelSpec, basis: BasisRef) -> Result<SparseHamiltonian> {
    let ModelSpec::RydbergLongRange {
        n_sites,
        boundary,
        omega,
        delta,
        c6_ghz_um6,
        spacing_um,
    } = spec
    else {
        return Err(Error::invalid("expected a RydbergLongRange spec"));
    };
    if *spacing_um <= 0.0 {
        return Err(Error::invalid("lattice spacing must be positive"));
    }
    let n = *n_sites;
    assert_eq!(basis.n_sites(), n);
    let v_nn = nearest_neighbor_interaction_mhz(*c6_ghz_um6, *spacing_um);
    let mut triplets = Vec::new();
    for col in 0..basis.len() {
        let config = basis.config(col);
        // Diagonal: detuning and pairwise interactions.
        let mut diag = 0.0;
        for i in 0..n {
            if config >> i & 1 == 0 {
                continue;
            }
            diag -= delta;
            for j in 0..i {
                if config >> j & 1 == 1 {
                    let d = site_distance(i, j, n, *boundary) as f64;
                    diag += v_nn / d.powi(6);
                }
            }
        }
        if diag != 0.0 {
            triplets.push((col as u32, col as u32, diag));
        }
        // Transverse drive Ω S^x: flip amplitude Ω/2.
        for j in 0..n {
            let target = config ^ (1 << j);
            if let Some(row) = basis.index_of(target) {
                triplets.push((row as u32, col as u32, omega / 2.0));
            }
        }
    }
    Ok(SparseHamiltonian::from_triplets(basis, triplets))
}

/// `C₆/a⁶` in MHz for `C₆` in GHz·µm⁶ and `a` in µm.
pub fn nearest_neighbor_interaction_mhz(c6_ghz_um6: f64, spacing_um: f64) -> f64 {
    1000.0 * c6_ghz_um6 / spacing_um.powi(6)
}

/// Electric field on each link for a spin configuration of the
/// gauge-eliminated Schwinger chain.
pub fn schwinger_link_fields(config: u32, n: usize, background: f64) -> Vec<f64> {
    let mut fields = Vec::with_capacity(n);
    let mut l = background;
    for site in 0..n {
        let sz = if config >> site & 1 == 0 { 1.0 } else { -1.0 };
        let stagger = if site % 2 == 0 { -1.0 } else { 1.0 };
        l += 0.5 * (sz + stagger);
        fields.push(l);
    }
    fields
}

/// Build the spin form of the lattice Schwinger model on the full `2^N`
/// space (open boundaries; the gauge field is eliminated through the
/// cumulative-charge formula for the link fields).
pub fn build_schwinger_spin(spec: &ModelSpec) -> Result<SparseHamiltonian> {
    let ModelSpec::SchwingerSpin {
        n_sites,
        w,
        mass,
        coupling,
        background,
    } = spec
    else {
        return Err(Error::invalid("expected a SchwingerSpin spec"));
    };
    let n = *n_sites;
    if n > 24 {
        return Err(Error::resource(format!(
            "full-space Schwinger chain of {n} sites exceeds the 24-site cap"
        )));
    }
    let basis = BasisRef::Full {
        n_sites: n,
        boundary: Boundary::Open,
    };
    let mut triplets = Vec::new();
    for config in 0..(1u32 << n) {
        let col = config;
        // Diagonal: staggered mass + electric field energy.
        let mut diag = 0.0;
        for site in 0..n {
            let sz = if config >> site & 1 == 0 { 1.0 } else { -1.0 };
            let stagger = if site % 2 == 0 { -1.0 } else { 1.0 };
            diag += 0.5 * mass * stagger * sz;
        }
        for l in schwinger_link_fields(config, n, *background) {
            diag += coupling * l * l;
        }
        if diag != 0.0 {
            triplets.push((col, col, diag));
        }
        // Hopping w (σ⁺_n σ⁻_{n+1} + h.c.): exchanges adjacent 01 <-> 10.
        for site in 0..n - 1 {
            let pair = config >> site & 0b11;
            if pair == 0b01 || pair == 0b10 {
                let target = config ^ (0b11 << site);
                triplets.push((target, col, *w));
            }
        }
    }
    Ok(SparseHamiltonian::from_triplets(basis, triplets))
}

/// Build one of the comparison models (MFIM, TFIM, XXZ) on the full space.
pub fn build_comparison_model(spec: &ModelSpec) -> Result<SparseHamiltonian> {
    let (n, boundary, h_x, h_z, j_xx, xxz_delta) = match spec {
        ModelSpec::MixedFieldIsing {
            n_sites,
            boundary,
            h_x,
            h_z,
            j,
        } => (*n_sites, *boundary, *h_x, *h_z, *j, None),
        ModelSpec::TransverseFieldIsing {
            n_sites,
            boundary,
            h_z,
            j,
        } => (*n_sites, *boundary, 0.0, *h_z, *j, None),
        ModelSpec::Xxz {
            n_sites,
            boundary,
            delta_aniso,
        } => (*n_sites, *boundary, 0.0, 0.0, 0.0, Some(*delta_aniso)),
        _ => return Err(Error::invalid("expected an Ising/XXZ comparison spec")),
    };
    if n > 24 {
        return Err(Error::resource(format!(
            "full-space comparison chain of {n} sites exceeds the 24-site cap"
        )));
    }
    let basis = BasisRef::Full {
        n_sites: n,
        boundary,
    };
    let bonds: Vec<(usize, usize)> = match boundary {
        Boundary::Open => (0..n - 1).map(|i| (i, i + 1)).collect(),
        Boundary::Periodic => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    };
    let mut triplets = Vec::new();
    for config in 0..(1u32 << n) {
        let col = config;
        match xxz_delta {
            None => {
                // Ising variants: h_x X + h_z Z + J XX.
                let mut diag = 0.0;
                for site in 0..n {
                    let z = if config >> site & 1 == 0 { 1.0 } else { -1.0 };
                    diag += h_z * z;
                    if h_x != 0.0 {
                        triplets.push((config ^ (1 << site), col, h_x));
                    }
                }
                if diag != 0.0 {
                    triplets.push((col, col, diag));
                }
                for &(a, b) in &bonds {
                    let target = config ^ (1 << a) ^ (1 << b);
                    triplets.push((target, col, j_xx));
                }
            }
            Some(delta) => {
                // XX + YY hops anti-aligned pairs with amplitude 2; ZZ is
                // diagonal.
                let mut diag = 0.0;
                for &(a, b) in &bonds {
                    let (ba, bb) = (config >> a & 1, config >> b & 1);
                    let za = if ba == 0 { 1.0 } else { -1.0 };
                    let zb = if bb == 0 { 1.0 } else { -1.0 };
                    diag += delta * za * zb;
                    if ba != bb {
                        let target = config ^ (1 << a) ^ (1 << b);
                        triplets.push((target, col, 2.0));
                    }
                }
                if diag != 0.0 {
                    triplets.push((col, col, diag));
                }
            }
        }
    }
    Ok(SparseHamiltonian::from_triplets(basis, triplets))
}

/// Local energy density `h_j = h_x X_j + h_z Z_j + J X_j X_{j+1}` of the
/// Ising comparison models, as a symbolic operator for structure factors.
pub fn ising_energy_density(h_x: f64, h_z: f64, j: f64) -> crate::ops::OperatorSum {
    use crate::ops::OperatorString;
    use num_complex::Complex64;
    let mut sum = OperatorString::parse("X")
        .unwrap()
        .to_sum()
        .scaled(Complex64::new(h_x, 0.0));
    sum.add(
        &OperatorString::parse("Z")
            .unwrap()
            .to_sum()
            .scaled(Complex64::new(h_z, 0.0)),
    );
    sum.add(
        &OperatorString::parse("XX")
            .unwrap()
            .to_sum()
            .scaled(Complex64::new(j, 0.0)),
    );
    sum
}

/// Local energy density `X_jX_{j+1} + Y_jY_{j+1} + Δ Z_jZ_{j+1}` of the XXZ
/// chain.
pub fn xxz_energy_density(delta_aniso: f64) -> crate::ops::OperatorSum {
    use crate::ops::OperatorString;
    use num_complex::Complex64;
    let mut sum = OperatorString::parse("XX").unwrap().to_sum();
    sum.add(&OperatorString::parse("YY").unwrap().to_sum());
    sum.add(
        &OperatorString::parse("ZZ")
            .unwrap()
            .to_sum()
            .scaled(Complex64::new(delta_aniso, 0.0)),
    );
    sum
}

/// Build any model from its spec (dispatch helper for the CLI).
pub fn build_model(spec: &ModelSpec) -> Result<SparseHamiltonian> {
    match spec {
        ModelSpec::Pxp { n_sites, boundary } => {
            let basis = Arc::new(crate::hilbert::enumerate_basis(*n_sites, *boundary)?);
            Ok(build_pxp(&basis))
        }
        ModelSpec::RydbergLongRange {
            n_sites, boundary, ..
        } => {
            let basis = Arc::new(crate::hilbert::enumerate_basis(*n_sites, *boundary)?);
            build_rydberg(spec, BasisRef::Blockaded(basis))
        }
        ModelSpec::SchwingerSpin { .. } => build_schwinger_spin(spec),
        _ => build_comparison_model(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::enumerate_basis;
    use num_complex::Complex64;

    #[test]
    fn pxp_vacuum_column_has_all_single_flips() {
        let basis = Arc::new(enumerate_basis(4, Boundary::Periodic).unwrap());
        let h = build_pxp(&basis);
        let dense = h.mat.to_dense();
        let vac = basis.index_of(0).unwrap();
        for target in [0b0001, 0b0010, 0b0100, 0b1000] {
            let row = basis.index_of(target).unwrap();
            assert_eq!(dense[(row, vac)], 1.0);
        }
        let col_sum: f64 = (0..basis.len()).map(|r| dense[(r, vac)].abs()).sum();
        assert_eq!(col_sum, 4.0);
    }

    #[test]
    fn pxp_matrix_elements_by_brute_force() {
        let basis = Arc::new(enumerate_basis(4, Boundary::Periodic).unwrap());
        let h = build_pxp(&basis);
        let dense = h.mat.to_dense();
        let idx = |c: u32| basis.index_of(c).unwrap();
        // <1010|H|1000> = 1 (flip site 2 with unexcited neighbors 1 and 3).
        assert_eq!(dense[(idx(0b0101), idx(0b0001))], 1.0);
        // <1010|H|0101> = 0 (differs by more than one flip).
        assert_eq!(dense[(idx(0b0101), idx(0b1010))], 0.0);
    }

    #[test]
    fn pxp_spectrum_symmetric_and_particle_hole_odd() {
        let basis = Arc::new(enumerate_basis(10, Boundary::Periodic).unwrap());
        let h = build_pxp(&basis);
        let (vals, _) = crate::linalg::sym_eig(&h.mat.to_dense());
        for (lo, hi) in vals.iter().zip(vals.iter().rev()) {
            assert!((lo + hi).abs() < 1e-10);
        }
        // C H C = -H with C = Π Z_j: check entrywise.
        let dense = h.mat.to_dense();
        for r in 0..basis.len() {
            for c in 0..basis.len() {
                let zr = basis.states[r].count_ones() % 2;
                let zc = basis.states[c].count_ones() % 2;
                let sign = if (zr + zc) % 2 == 0 { 1.0 } else { -1.0 };
                let conj = sign * dense[(r, c)];
                assert!((conj + dense[(r, c)]).abs() < 1e-14 || dense[(r, c)] == 0.0);
            }
        }
    }

    #[test]
    fn symbolic_pxp_commutators_match_dense_matrices() {
        // Independent check of the symbolic engine: realize i[H, O] on a
        // ring and compare against the dense commutator.
        use crate::ops::{pxp_commutator_sum, OperatorString};
        use crate::sparse::operator_matrix;
        let basis = BasisRef::Blockaded(Arc::new(enumerate_basis(8, Boundary::Periodic).unwrap()));
        let hb = match &basis {
            BasisRef::Blockaded(b) => Arc::clone(b),
            _ => unreachable!(),
        };
        let h = build_pxp(&hb).mat.to_dense();
        for text in ["Z", "PZP", "PYP", "P+-P", "PXP"] {
            let op = OperatorString::parse(text).unwrap().at(2).to_sum();
            let dense_op = operator_matrix(&op, &basis).to_dense();
            let comm = operator_matrix(&pxp_commutator_sum(&op), &basis).to_dense();
            let dim = basis.len();
            for r in 0..dim {
                for c in 0..dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for l in 0..dim {
                        acc += Complex64::new(h[(r, l)], 0.0) * dense_op[(l, c)]
                            - dense_op[(r, l)] * Complex64::new(h[(l, c)], 0.0);
                    }
                    acc *= Complex64::new(0.0, 1.0);
                    assert!(
                        (acc - comm[(r, c)]).norm() < 1e-12,
                        "{text} mismatch at ({r},{c}): {acc} vs {}",
                        comm[(r, c)]
                    );
                }
            }
        }
    }

    #[test]
    fn rydberg_diagonal_energies() {
        let spec = ModelSpec::RydbergLongRange {
            n_sites: 4,
            boundary: Boundary::Open,
            omega: 0.0,
            delta: 0.0,
            c6_ghz_um6: 1e-3, // makes C6/a^6 = 1 MHz at a = 1
            spacing_um: 1.0,
        };
        let basis = BasisRef::Blockaded(Arc::new(enumerate_basis(4, Boundary::Open).unwrap()));
        let h = build_rydberg(&spec, basis.clone()).unwrap();
        let dense = h.mat.to_dense();
        // |1010>: excited pair (0, 2) at distance 2 -> 1/2^6 = 1/64.
        let idx = basis.index_of(0b0101).unwrap();
        assert!((dense[(idx, idx)] - 1.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn rydberg_detuning_only() {
        let spec = ModelSpec::RydbergLongRange {
            n_sites: 4,
            boundary: Boundary::Open,
            omega: 0.0,
            delta: 0.7,
            c6_ghz_um6: 0.0,
            spacing_um: 1.0,
        };
        let basis = BasisRef::Blockaded(Arc::new(enumerate_basis(4, Boundary::Open).unwrap()));
        let h = build_rydberg(&spec, basis.clone()).unwrap();
        let idx = basis.index_of(0b0001).unwrap();
        let dense = h.mat.to_dense();
        assert!((dense[(idx, idx)] + 0.7).abs() < 1e-15);
    }

    #[test]
    fn rydberg_paper_interaction_strength() {
        // C6 = 254 GHz µm⁶ at a = 3.77 µm.
        let v = nearest_neighbor_interaction_mhz(254.0, 3.77);
        assert!((v - 88.47).abs() < 0.05, "direct evaluation gives {v}");
        // The quoted rounding of ~87.9 MHz holds to about a percent.
        assert!((v - 87.9).abs() / 87.9 < 0.01);
    }

    #[test]
    fn rydberg_rejects_nonpositive_spacing() {
        let spec = ModelSpec::RydbergLongRange {
            n_sites: 2,
            boundary: Boundary::Open,
            omega: 1.0,
            delta: 0.0,
            c6_ghz_um6: 1.0,
            spacing_um: 0.0,
        };
        let basis = BasisRef::Full {
            n_sites: 2,
            boundary: Boundary::Open,
        };
        assert!(build_rydberg(&spec, basis).is_err());
    }

    #[test]
    fn schwinger_diagonal_limit() {
        // w = m = 0: H is diagonal with the link-field energy.
        let spec = ModelSpec::SchwingerSpin {
            n_sites: 4,
            w: 0.0,
            mass: 0.0,
            coupling: 1.0,
            background: -0.5,
        };
        let h = build_schwinger_spin(&spec).unwrap();
        let dense = h.mat.to_dense();
        // All-down spins (all bits set -> σ^z = -1 everywhere).
        let config = 0b1111u32;
        let fields = schwinger_link_fields(config, 4, -0.5);
        let expect: f64 = fields.iter().map(|l| l * l).sum();
        assert!((dense[(config as usize, config as usize)] - expect).abs() < 1e-13);
        for r in 0..16 {
            for c in 0..16 {
                if r != c {
                    assert_eq!(dense[(r, c)], 0.0);
                }
            }
        }
    }

    #[test]
    fn schwinger_mass_term_alternates() {
        let spec = ModelSpec::SchwingerSpin {
            n_sites: 2,
            w: 0.0,
            mass: 2.0,
            coupling: 0.0,
            background: 0.0,
        };
        let h = build_schwinger_spin(&spec).unwrap();
        let dense = h.mat.to_dense();
        // site 0 stagger -1, site 1 stagger +1; σ^z = +1 on bit 0.
        // |00>: -(1)(1) + (1)(1) = 0 scaled by m/2 = 1.
        assert!((dense[(0, 0)] - 0.0).abs() < 1e-14);
        // |01> (site 0 excited): -(-1) + 1 = 2.
        assert!((dense[(1, 1)] - 2.0).abs() < 1e-14);
        // |10>: -(1) + (-1) = -2.
        assert!((dense[(2, 2)] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn schwinger_requires_its_own_spec() {
        let spec = ModelSpec::Pxp {
            n_sites: 4,
            boundary: Boundary::Periodic,
        };
        assert!(build_schwinger_spin(&spec).is_err());
    }

    #[test]
    fn mfim_two_sites_matches_dense_kronecker_oracle() {
        let (h_x, h_z, j) = (0.8090, 0.9045, 1.0);
        let spec = ModelSpec::MixedFieldIsing {
            n_sites: 2,
            boundary: Boundary::Open,
            h_x,
            h_z,
            j,
        };
        let h = build_comparison_model(&spec).unwrap();
        // Oracle: explicit 4x4 in the (|00>,|01>,|10>,|11>) ordering with
        // site 0 at the least significant bit; Z|0> = +|0>.
        let x = [[0.0, 1.0], [1.0, 0.0]];
        let z = [[1.0, 0.0], [0.0, -1.0]];
        let id = [[1.0, 0.0], [0.0, 1.0]];
        let kron = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
            // site 1 ⊗ site 0
            let mut m = [[0.0; 4]; 4];
            for i1 in 0..2 {
                for j1 in 0..2 {
                    for i0 in 0..2 {
                        for j0 in 0..2 {
                            m[i1 * 2 + i0][j1 * 2 + j0] = a[i1][j1] * b[i0][j0];
                        }
                    }
                }
            }
            m
        };
        let mut oracle = [[0.0; 4]; 4];
        let add = |m: &mut [[f64; 4]; 4], other: [[f64; 4]; 4], w: f64| {
            for r in 0..4 {
                for c in 0..4 {
                    m[r][c] += w * other[r][c];
                }
            }
        };
        add(&mut oracle, kron(id, x), h_x);
        add(&mut oracle, kron(x, id), h_x);
        add(&mut oracle, kron(id, z), h_z);
        add(&mut oracle, kron(z, id), h_z);
        add(&mut oracle, kron(x, x), j);
        let mut oracle_mat = faer::Mat::zeros(4, 4);
        for r in 0..4 {
            for c in 0..4 {
                oracle_mat[(r, c)] = oracle[r][c];
            }
        }
        let (ev_oracle, _) = crate::linalg::sym_eig(&oracle_mat);
        let (ev_built, _) = crate::linalg::sym_eig(&h.mat.to_dense());
        for (a, b) in ev_oracle.iter().zip(&ev_built) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn xxz_heisenberg_conserves_total_z() {
        let spec = ModelSpec::Xxz {
            n_sites: 6,
            boundary: Boundary::Periodic,
            delta_aniso: 1.0,
        };
        let h = build_comparison_model(&spec).unwrap();
        let dense = h.mat.to_dense();
        // [H, ΣZ] = 0: H never connects sectors of different magnetization.
        for r in 0..64u32 {
            for c in 0..64u32 {
                if dense[(r as usize, c as usize)] != 0.0 {
                    assert_eq!(r.count_ones(), c.count_ones());
                }
            }
        }
    }

    #[test]
    fn model_spec_json_round_trip() {
        let spec = ModelSpec::RydbergLongRange {
            n_sites: 10,
            boundary: Boundary::Open,
            omega: 5.3,
            delta: 0.6,
            c6_ghz_um6: 254.0,
            spacing_um: 3.77,
        };
        let text = serde_json::to_string(&spec).unwrap();
        let back: ModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
