//! Enumeration and indexing of the Rydberg-blockaded Hilbert space.
//!
//! Configurations are stored as machine integers with site 0 at the least
//! significant bit. The blockade forbids adjacent excited sites; under
//! periodic boundaries the first and last site are also adjacent. Chains are
//! capped at [`MAX_SITES`] sites, beyond which the enumerated basis would not
//! fit comfortably in memory.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Largest chain the basis enumerator accepts.
pub const MAX_SITES: usize = 30;

/// Boundary condition of the chain.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Boundary {
    #[serde(rename = "OBC")]
    Open,
    #[serde(rename = "PBC")]
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Open => write!(f, "OBC"),
            Boundary::Periodic => write!(f, "PBC"),
        }
    }
}

/// Dimension of the blockaded space from the Fibonacci/Lucas-type recurrence.
///
/// Open chains follow `D(n) = D(n-1) + D(n-2)` with `D(1) = 2`, `D(2) = 3`;
/// periodic chains follow the same recurrence with `D(1) = 1`, `D(2) = 3`.
/// Both agree with exhaustive enumeration for every reachable size.
pub fn dimension(n_sites: usize, boundary: Boundary) -> u128 {
    assert!(n_sites >= 1, "chain must have at least one site");
    let (mut a, mut b) = match boundary {
        Boundary::Open => (2u128, 3u128),
        Boundary::Periodic => (1u128, 3u128),
    };
    match n_sites {
        1 => return a,
        2 => return b,
        _ => {}
    }
    for _ in 3..=n_sites {
        let c = a + b;
        a = b;
        b = c;
    }
    b
}

/// Check a configuration against the blockade constraint.
pub fn is_blockaded(config: u32, n_sites: usize, boundary: Boundary) -> bool {
    let adjacent = config & (config >> 1);
    if adjacent & ((1u32 << (n_sites - 1)) - 1) != 0 {
        return false;
    }
    match boundary {
        Boundary::Open => true,
        Boundary::Periodic => {
            if n_sites == 1 {
                config == 0
            } else {
                config & 1 == 0 || config >> (n_sites - 1) == 0
            }
        }
    }
}

/// The enumerated constrained state space with exact index maps.
#[derive(Clone, Debug)]
pub struct BlockadedBasis {
    pub n_sites: usize,
    pub boundary: Boundary,
    /// Strictly ascending list of blockade-legal configurations.
    pub states: Vec<u32>,
}

/// Enumerate the blockaded basis in ascending configuration order.
pub fn enumerate_basis(n_sites: usize, boundary: Boundary) -> Result<BlockadedBasis> {
    if n_sites == 0 {
        return Err(Error::invalid("chain must have at least one site"));
    }
    if n_sites > MAX_SITES {
        return Err(Error::resource(format!(
            "requested {n_sites}-site basis of dimension {} exceeds the {MAX_SITES}-site cap",
            dimension(n_sites, boundary)
        )));
    }
    // Build open-chain lists bottom-up; each step concatenates the shorter
    // lists with the top bit clear and set, which preserves ascending order.
    let mut lists: Vec<Vec<u32>> = vec![vec![0], vec![0, 1]];
    for n in 2..=n_sites {
        let top = 1u32 << (n - 1);
        let mut next = lists[n - 1].clone();
        next.extend(lists[n - 2].iter().map(|&c| c | top));
        lists.push(next);
    }
    let mut states = lists.pop().unwrap();
    if boundary == Boundary::Periodic {
        if n_sites == 1 {
            states.retain(|&c| c == 0);
        } else {
            let top = 1u32 << (n_sites - 1);
            states.retain(|&c| c & 1 == 0 || c & top == 0);
        }
    }
    debug_assert_eq!(states.len() as u128, dimension(n_sites, boundary));
    Ok(BlockadedBasis {
        n_sites,
        boundary,
        states,
    })
}

impl BlockadedBasis {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Ordinal of a configuration, if it belongs to the basis.
    pub fn index_of(&self, config: u32) -> Option<usize> {
        self.states.binary_search(&config).ok()
    }

    /// Cyclic left shift of a configuration by one site (PBC translation).
    pub fn translate(&self, config: u32) -> u32 {
        let n = self.n_sites;
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        ((config << 1) | (config >> (n - 1))) & mask
    }

    /// Spatial inversion `site j -> n-1-j`.
    pub fn invert(&self, config: u32) -> u32 {
        let mut out = 0u32;
        for j in 0..self.n_sites {
            if config >> j & 1 == 1 {
                out |= 1 << (self.n_sites - 1 - j);
            }
        }
        out
    }

    /// Write one bitstring per line, site 0 leftmost.
    pub fn export_bitstrings<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        for &c in &self.states {
            let mut line = String::with_capacity(self.n_sites + 1);
            for j in 0..self.n_sites {
                line.push(if c >> j & 1 == 1 { '1' } else { '0' });
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

/// One translation orbit inside a periodic basis.
#[derive(Clone, Debug)]
pub struct Orbit {
    /// Minimal configuration in the orbit.
    pub representative: u32,
    /// Number of distinct translates (always divides `n_sites`).
    pub size: usize,
}

/// A momentum sector `k = 2π j / N` of a periodic blockaded basis.
#[derive(Clone, Debug)]
pub struct TranslationSector {
    pub parent: Arc<BlockadedBasis>,
    /// Momentum index `j` in `k = 2π j / N`.
    pub k_index: usize,
    /// Orbit representatives compatible with this momentum.
    pub representatives: Vec<Orbit>,
    /// Restriction to inversion-even combinations, when requested.
    pub inversion_even: bool,
}

/// Decompose a periodic basis into the orbits of the translation group.
pub fn translation_orbits(basis: &BlockadedBasis) -> Vec<Orbit> {
    let mut seen = vec![false; basis.len()];
    let mut orbits = Vec::new();
    for (i, &c) in basis.states.iter().enumerate() {
        if seen[i] {
            continue;
        }
        let mut size = 0;
        let mut cur = c;
        loop {
            let idx = basis.index_of(cur).expect("translate stays in basis");
            if !seen[idx] {
                seen[idx] = true;
                size += 1;
            }
            cur = basis.translate(cur);
            if cur == c {
                break;
            }
        }
        orbits.push(Orbit {
            representative: c,
            size,
        });
    }
    orbits
}

/// Build the momentum sector `k = 2π k_index / N`.
///
/// Orbits of size `R` are compatible with `k` exactly when `k_index * R` is a
/// multiple of `N`. With `inversion_even` set (meaningful at `k = 0` or
/// `k = π`), representatives are further merged into inversion-symmetric
/// combinations.
pub fn build_translation_sector(
    basis: &Arc<BlockadedBasis>,
    k_index: usize,
    inversion_even: bool,
) -> Result<TranslationSector> {
    let n = basis.n_sites;
    if basis.boundary != Boundary::Periodic {
        return Err(Error::invalid(
            "translation sectors require periodic boundaries",
        ));
    }
    if k_index >= n {
        return Err(Error::invalid(format!(
            "momentum index {k_index} out of range for {n} sites"
        )));
    }
    if inversion_even && !(k_index == 0 || 2 * k_index == n) {
        return Err(Error::invalid(
            "inversion refinement is only defined at k = 0 or k = pi",
        ));
    }
    let mut representatives: Vec<Orbit> = translation_orbits(basis)
        .into_iter()
        .filter(|o| (k_index * o.size) % n == 0)
        .collect();
    if inversion_even {
        // Keep one representative per dihedral orbit; drop orbits whose
        // inversion-even combination vanishes.
        let mut kept = Vec::new();
        for orbit in representatives.drain(..) {
            let inv = basis.invert(orbit.representative);
            // Minimal translate of the inverted configuration.
            let mut min_inv = inv;
            let mut cur = inv;
            let mut shift_of_min = 0usize;
            for s in 1..=orbit.size {
                cur = basis.translate(cur);
                if cur < min_inv {
                    min_inv = cur;
                    shift_of_min = s % orbit.size;
                }
            }
            use std::cmp::Ordering;
            match min_inv.cmp(&orbit.representative) {
                Ordering::Greater => kept.push(orbit), // partner orbit dropped below
                Ordering::Less => {}                   // partner already kept
                Ordering::Equal => {
                    // Self-inverse orbit: even combination survives unless the
                    // momentum phase of the inversion shift makes it odd.
                    let phase_ok = if k_index == 0 {
                        true
                    } else {
                        // k = pi: phase (-1)^shift must be +1.
                        shift_of_min % 2 == 0
                    };
                    if phase_ok {
                        kept.push(orbit);
                    }
                }
            }
        }
        representatives = kept;
    }
    Ok(TranslationSector {
        parent: Arc::clone(basis),
        k_index,
        representatives,
        inversion_even,
    })
}

impl TranslationSector {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn momentum(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.k_index as f64 / self.parent.n_sites as f64
    }

    /// Expand a sector vector into amplitudes over the full periodic basis.
    ///
    /// The sector state attached to representative `r` of orbit size `R` is
    /// `(1/√R) Σ_{m=0}^{R-1} e^{ikm} T^m |r>`; inversion-even sectors carry an
    /// additional symmetrization over the reflected orbit.
    pub fn expand(&self, coeffs: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        use num_complex::Complex64;
        assert_eq!(coeffs.len(), self.dim());
        let basis = &self.parent;
        let k = self.momentum();
        let mut full = vec![Complex64::new(0.0, 0.0); basis.len()];
        for (orbit, &c) in self.representatives.iter().zip(coeffs) {
            let mut members: Vec<(usize, Complex64)> = Vec::with_capacity(orbit.size);
            let mut cur = orbit.representative;
            for m in 0..orbit.size {
                let phase = Complex64::from_polar(1.0, k * m as f64);
                members.push((basis.index_of(cur).unwrap(), phase));
                cur = basis.translate(cur);
            }
            if self.inversion_even {
                let inv = basis.invert(orbit.representative);
                let mut cur = inv;
                for m in 0..orbit.size {
                    let idx = basis.index_of(cur).unwrap();
                    if !members.iter().any(|&(i, _)| i == idx) {
                        members.push((idx, Complex64::from_polar(1.0, k * m as f64)));
                    }
                    cur = basis.translate(cur);
                }
            }
            let norm = (members.len() as f64).sqrt();
            for (idx, phase) in members {
                full[idx] += c * phase / norm;
            }
        }
        full
    }
}
