//! Symbolic algebra for local operators on the blockaded chain.
//!
//! Operators are sums of *monomials*: a complex coefficient times a product
//! of single-site operators drawn from `{P, n, σ⁺, σ⁻}` (with implicit
//! identities elsewhere). This projector alphabet is closed under
//! multiplication, so products of monomials stay monomials, which keeps
//! traces and commutators cheap. User-facing strings over
//! `{I, P, Z, X, Y, n, σ⁺, σ⁻}` expand into monomial sums.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Single-site operator in the multiplication-closed projector alphabet.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum SiteOp {
    /// Identity.
    I,
    /// `|0><0|`.
    P,
    /// `|1><1|`.
    N,
    /// `σ⁺ = |1><0|` (adds a Rydberg excitation).
    Up,
    /// `σ⁻ = |0><1|`.
    Dn,
}

impl SiteOp {
    /// Pointwise product `self · other`; `None` encodes the zero operator.
    pub fn mul(self, other: SiteOp) -> Option<SiteOp> {
        use SiteOp::*;
        match (self, other) {
            (I, x) | (x, I) => Some(x),
            (P, P) => Some(P),
            (P, Dn) => Some(Dn),
            (N, N) => Some(N),
            (N, Up) => Some(Up),
            (Up, P) => Some(Up),
            (Up, Dn) => Some(N),
            (Dn, N) => Some(Dn),
            (Dn, Up) => Some(P),
            _ => None,
        }
    }

    pub fn dagger(self) -> SiteOp {
        match self {
            SiteOp::Up => SiteOp::Dn,
            SiteOp::Dn => SiteOp::Up,
            x => x,
        }
    }

    pub fn is_diagonal(self) -> bool {
        !matches!(self, SiteOp::Up | SiteOp::Dn)
    }

    /// Diagonal weights `(on |0>, on |1>)`; off-diagonal symbols have none.
    pub fn diagonal_weights(self) -> Option<(f64, f64)> {
        match self {
            SiteOp::I => Some((1.0, 1.0)),
            SiteOp::P => Some((1.0, 0.0)),
            SiteOp::N => Some((0.0, 1.0)),
            _ => None,
        }
    }
}

/// A coefficient times a product of site operators on consecutive sites.
///
/// `ops[i]` acts on site `start + i`; the first and last entries are never
/// the identity (the all-identity monomial has empty `ops`).
#[derive(Clone, Debug)]
pub struct Monomial {
    pub coeff: Complex64,
    pub start: i64,
    pub ops: Vec<SiteOp>,
}

impl Monomial {
    pub fn new(coeff: Complex64, start: i64, ops: Vec<SiteOp>) -> Self {
        let mut m = Monomial { coeff, start, ops };
        m.trim();
        m
    }

    pub fn identity(coeff: Complex64) -> Self {
        Monomial {
            coeff,
            start: 0,
            ops: Vec::new(),
        }
    }

    fn trim(&mut self) {
        while self.ops.last() == Some(&SiteOp::I) {
            self.ops.pop();
        }
        let lead = self.ops.iter().take_while(|&&o| o == SiteOp::I).count();
        if lead > 0 {
            self.ops.drain(..lead);
            self.start += lead as i64;
        }
        if self.ops.is_empty() {
            self.start = 0;
        }
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn end(&self) -> i64 {
        self.start + self.ops.len() as i64 - 1
    }

    pub fn op_at(&self, site: i64) -> SiteOp {
        if self.ops.is_empty() || site < self.start || site > self.end() {
            SiteOp::I
        } else {
            self.ops[(site - self.start) as usize]
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.ops.iter().all(|o| o.is_diagonal())
    }

    pub fn dagger(&self) -> Monomial {
        Monomial::new(
            self.coeff.conj(),
            self.start,
            self.ops.iter().map(|o| o.dagger()).collect(),
        )
    }

    pub fn shifted(&self, delta: i64) -> Monomial {
        Monomial {
            coeff: self.coeff,
            start: self.start + delta,
            ops: self.ops.clone(),
        }
    }

    /// Product of two monomials as operators (self on the left).
    pub fn mul(&self, other: &Monomial) -> Option<Monomial> {
        if self.is_identity() {
            let mut m = other.clone();
            m.coeff *= self.coeff;
            return Some(m);
        }
        if other.is_identity() {
            let mut m = self.clone();
            m.coeff *= other.coeff;
            return Some(m);
        }
        let start = self.start.min(other.start);
        let end = self.end().max(other.end());
        let mut ops = Vec::with_capacity((end - start + 1) as usize);
        for site in start..=end {
            ops.push(self.op_at(site).mul(other.op_at(site))?);
        }
        Some(Monomial::new(self.coeff * other.coeff, start, ops))
    }
}

/// A finite sum of monomials in canonical (merged, trimmed) form.
#[derive(Clone, Debug, Default)]
pub struct OperatorSum {
    pub terms: Vec<Monomial>,
}

impl OperatorSum {
    pub fn zero() -> Self {
        OperatorSum { terms: Vec::new() }
    }

    pub fn from_terms(terms: Vec<Monomial>) -> Self {
        let mut s = OperatorSum { terms };
        s.canonicalize();
        s
    }

    pub fn canonicalize(&mut self) {
        let mut map: BTreeMap<(i64, Vec<SiteOp>), Complex64> = BTreeMap::new();
        for t in self.terms.drain(..) {
            if t.coeff.norm_sqr() == 0.0 {
                continue;
            }
            *map.entry((t.start, t.ops)).or_insert(Complex64::new(0.0, 0.0)) += t.coeff;
        }
        self.terms = map
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-14)
            .map(|((start, ops), coeff)| Monomial { coeff, start, ops })
            .collect();
    }

    pub fn add(&mut self, other: &OperatorSum) {
        self.terms.extend(other.terms.iter().cloned());
        self.canonicalize();
    }

    pub fn scaled(&self, c: Complex64) -> OperatorSum {
        OperatorSum {
            terms: self
                .terms
                .iter()
                .map(|t| Monomial {
                    coeff: t.coeff * c,
                    start: t.start,
                    ops: t.ops.clone(),
                })
                .collect(),
        }
    }

    pub fn dagger(&self) -> OperatorSum {
        OperatorSum::from_terms(self.terms.iter().map(|t| t.dagger()).collect())
    }

    pub fn shifted(&self, delta: i64) -> OperatorSum {
        OperatorSum {
            terms: self.terms.iter().map(|t| t.shifted(delta)).collect(),
        }
    }

    pub fn mul(&self, other: &OperatorSum) -> OperatorSum {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                if let Some(m) = a.mul(b) {
                    terms.push(m);
                }
            }
        }
        OperatorSum::from_terms(terms)
    }

    /// Leftmost and rightmost site touched by any non-identity factor.
    pub fn support(&self) -> Option<(i64, i64)> {
        let mut range: Option<(i64, i64)> = None;
        for t in &self.terms {
            if t.is_identity() {
                continue;
            }
            range = Some(match range {
                None => (t.start, t.end()),
                Some((a, b)) => (a.min(t.start), b.max(t.end())),
            });
        }
        range
    }
}

/// Commutator `i [H_PXP, m]` of a monomial with the PXP Hamiltonian
/// `H = Σ_l P_{l-1} X_l P_{l+1}` on the infinite chain.
///
/// Only Hamiltonian terms overlapping the monomial's support contribute.
pub fn pxp_commutator(m: &Monomial) -> OperatorSum {
    if m.is_identity() {
        return OperatorSum::zero();
    }
    let i = Complex64::new(0.0, 1.0);
    let mut terms = Vec::new();
    for l in (m.start - 2)..=(m.end() + 2) {
        for flip in [SiteOp::Up, SiteOp::Dn] {
            let h = Monomial::new(
                Complex64::new(1.0, 0.0),
                l - 1,
                vec![SiteOp::P, flip, SiteOp::P],
            );
            if let Some(hm) = h.mul(m) {
                let mut t = hm;
                t.coeff *= i;
                terms.push(t);
            }
            if let Some(mh) = m.mul(&h) {
                let mut t = mh;
                t.coeff *= -i;
                terms.push(t);
            }
        }
    }
    OperatorSum::from_terms(terms)
}

/// Commutator `i [H_PXP, s]` extended linearly to sums.
pub fn pxp_commutator_sum(s: &OperatorSum) -> OperatorSum {
    let mut out = OperatorSum::zero();
    for t in &s.terms {
        out.terms.extend(pxp_commutator(t).terms);
    }
    out.canonicalize();
    out
}

/// User-facing symbols for operator strings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Symbol {
    I,
    P,
    Z,
    X,
    Y,
    N,
    /// σ⁺
    Up,
    /// σ⁻
    Dn,
}

impl Symbol {
    pub fn parse(c: char) -> Result<Symbol> {
        Ok(match c {
            'I' | 'i' => Symbol::I,
            'P' | 'p' => Symbol::P,
            'Z' | 'z' => Symbol::Z,
            'X' | 'x' => Symbol::X,
            'Y' | 'y' => Symbol::Y,
            'n' => Symbol::N,
            '+' => Symbol::Up,
            '-' => Symbol::Dn,
            _ => return Err(Error::invalid(format!("unknown operator symbol '{c}'"))),
        })
    }

    /// Expansion into the projector alphabet.
    pub fn expand(self) -> Vec<(SiteOp, Complex64)> {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Symbol::I => vec![(SiteOp::I, one)],
            Symbol::P => vec![(SiteOp::P, one)],
            Symbol::N => vec![(SiteOp::N, one)],
            Symbol::Z => vec![(SiteOp::P, one), (SiteOp::N, -one)],
            Symbol::X => vec![(SiteOp::Up, one), (SiteOp::Dn, one)],
            Symbol::Y => vec![(SiteOp::Up, i), (SiteOp::Dn, -i)],
            Symbol::Up => vec![(SiteOp::Up, one)],
            Symbol::Dn => vec![(SiteOp::Dn, one)],
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Symbol::I => 'I',
            Symbol::P => 'P',
            Symbol::Z => 'Z',
            Symbol::X => 'X',
            Symbol::Y => 'Y',
            Symbol::N => 'n',
            Symbol::Up => '+',
            Symbol::Dn => '-',
        };
        write!(f, "{c}")
    }
}

/// A symbolic local operator: an ordered list of symbols with an anchor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorString {
    pub symbols: Vec<Symbol>,
    /// Site of the leftmost symbol.
    pub anchor: i64,
    pub name: Option<String>,
}

impl OperatorString {
    pub fn parse(text: &str) -> Result<OperatorString> {
        let symbols = text
            .chars()
            .map(Symbol::parse)
            .collect::<Result<Vec<_>>>()?;
        if symbols.is_empty() {
            return Err(Error::invalid("empty operator string"));
        }
        Ok(OperatorString {
            symbols,
            anchor: 0,
            name: Some(text.to_string()),
        })
    }

    pub fn at(mut self, anchor: i64) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Expand into a monomial sum.
    pub fn to_sum(&self) -> OperatorSum {
        let mut partial: Vec<(Vec<SiteOp>, Complex64)> =
            vec![(Vec::new(), Complex64::new(1.0, 0.0))];
        for sym in &self.symbols {
            let expansions = sym.expand();
            let mut next = Vec::with_capacity(partial.len() * expansions.len());
            for (ops, coeff) in &partial {
                for (site_op, c) in &expansions {
                    let mut ops = ops.clone();
                    ops.push(*site_op);
                    next.push((ops, coeff * c));
                }
            }
            partial = next;
        }
        OperatorSum::from_terms(
            partial
                .into_iter()
                .map(|(ops, coeff)| Monomial::new(coeff, self.anchor, ops))
                .collect(),
        )
    }

    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.symbols.iter().map(|s| s.to_string()).collect())
    }
}

/// Phase convention of an operator Fourier transform.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PhaseConvention {
    /// `e^{ikj}` with `j` the site carrying the core of the string.
    SiteCentered,
    /// `e^{ik(j+1/2)}` for two-site cores straddling a bond.
    BondCentered,
}

/// A translation-summed operator `O(k) = N^{-1/2} Σ_j e^{ik(j+c)} O_j`.
///
/// The offset `c` places the phase on the centroid of the non-`P` content of
/// the string, which reproduces the site-centered convention for strings
/// such as `PYPP` and the bond-centered one for `P(σ⁺σ⁻+σ⁻σ⁺)P`.
#[derive(Clone, Debug)]
pub struct MomentumOperator {
    /// The `j = 0` representative (possibly a combination of strings).
    pub local: OperatorSum,
    pub k: f64,
    /// Phase centroid offset relative to the representative's coordinates.
    pub centroid: f64,
    /// Whether amplitudes carry the `1/√N` normalization.
    pub normalized: bool,
    pub label: String,
}

/// Centroid of the non-`P`, non-`I` symbols of a string (its "core").
pub fn core_centroid(s: &OperatorString) -> f64 {
    let core: Vec<usize> = s
        .symbols
        .iter()
        .enumerate()
        .filter(|(_, sym)| !matches!(sym, Symbol::P | Symbol::I))
        .map(|(i, _)| i)
        .collect();
    if core.is_empty() {
        (s.symbols.len() as f64 - 1.0) / 2.0
    } else {
        (core[0] + core[core.len() - 1]) as f64 / 2.0
    }
}

impl MomentumOperator {
    /// Momentum transform of a single string with the centroid convention.
    pub fn from_string(s: &OperatorString, k: f64) -> MomentumOperator {
        MomentumOperator {
            local: s.to_sum(),
            k,
            centroid: s.anchor as f64 + core_centroid(s),
            normalized: true,
            label: s.label(),
        }
    }

    /// Build from an explicit combination with a given phase centroid.
    pub fn from_sum(local: OperatorSum, k: f64, centroid: f64, label: String) -> MomentumOperator {
        MomentumOperator {
            local,
            k,
            centroid,
            normalized: true,
            label,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn site_products_match_matrix_algebra() {
        // 2x2 matrices in the (|0>, |1>) basis.
        fn mat(op: SiteOp) -> [[f64; 2]; 2] {
            match op {
                SiteOp::I => [[1.0, 0.0], [0.0, 1.0]],
                SiteOp::P => [[1.0, 0.0], [0.0, 0.0]],
                SiteOp::N => [[0.0, 0.0], [0.0, 1.0]],
                SiteOp::Up => [[0.0, 0.0], [1.0, 0.0]],
                SiteOp::Dn => [[0.0, 1.0], [0.0, 0.0]],
            }
        }
        let all = [SiteOp::I, SiteOp::P, SiteOp::N, SiteOp::Up, SiteOp::Dn];
        for &a in &all {
            for &b in &all {
                let (ma, mb) = (mat(a), mat(b));
                let mut prod = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        for l in 0..2 {
                            prod[i][j] += ma[i][l] * mb[l][j];
                        }
                    }
                }
                match a.mul(b) {
                    Some(r) => assert_eq!(prod, mat(r), "{a:?}*{b:?}"),
                    None => assert_eq!(prod, [[0.0; 2]; 2], "{a:?}*{b:?}"),
                }
            }
        }
    }

    #[test]
    fn z_string_expands_to_signed_projectors() {
        let s = OperatorString::parse("Z").unwrap();
        let sum = s.to_sum();
        assert_eq!(sum.terms.len(), 2);
        let coeffs: Vec<(SiteOp, Complex64)> = sum
            .terms
            .iter()
            .map(|t| (t.ops[0], t.coeff))
            .collect();
        assert!(coeffs.contains(&(SiteOp::P, c(1.0, 0.0))));
        assert!(coeffs.contains(&(SiteOp::N, c(-1.0, 0.0))));
    }

    #[test]
    fn commutator_of_z_is_two_pyp() {
        // i[H, Z_0] = 2 P_{-1} Y_0 P_1.
        let z = OperatorString::parse("Z").unwrap().to_sum();
        let comm = pxp_commutator_sum(&z);
        let pyp = OperatorString::parse("PYP").unwrap().at(-1).to_sum();
        let expect = pyp.scaled(c(2.0, 0.0));
        let mut diff = comm.clone();
        diff.add(&expect.scaled(c(-1.0, 0.0)));
        assert!(diff.terms.is_empty(), "difference {:?}", diff.terms);
    }

    #[test]
    fn commutator_of_pzp_matches_equation_of_motion() {
        // i[H, PZ_0P] = 2 PY_0P + PPY_1P + PY_{-1}PP.
        let pzp = OperatorString::parse("PZP").unwrap().at(-1).to_sum();
        let comm = pxp_commutator_sum(&pzp);
        let mut expect = OperatorString::parse("PYP").unwrap().at(-1).to_sum().scaled(c(2.0, 0.0));
        expect.add(&OperatorString::parse("PPYP").unwrap().at(-1).to_sum());
        expect.add(&OperatorString::parse("PYPP").unwrap().at(-2).to_sum());
        let mut diff = comm.clone();
        diff.add(&expect.scaled(c(-1.0, 0.0)));
        assert!(diff.terms.is_empty(), "difference {:?}", diff.terms);
    }

    #[test]
    fn pyp_commutator_reproduces_current_equation_of_motion() {
        // i[H, PY_0P] = -2 PZ_0P + 2 cos(k/2)-weighted bond terms in momentum
        // space; in real space: -2 PZP + (P σ⁺σ⁻ P + P σ⁻σ⁺ P) at the two
        // adjacent bonds.
        let pyp = OperatorString::parse("PYP").unwrap().at(-1).to_sum();
        let comm = pxp_commutator_sum(&pyp);
        let mut expect = OperatorString::parse("PZP").unwrap().at(-1).to_sum().scaled(c(-2.0, 0.0));
        for anchor in [-1, -2] {
            expect.add(&OperatorString::parse("P+-P").unwrap().at(anchor).to_sum());
            expect.add(&OperatorString::parse("P-+P").unwrap().at(anchor).to_sum());
        }
        let mut diff = comm.clone();
        diff.add(&expect.scaled(c(-1.0, 0.0)));
        assert!(diff.terms.is_empty(), "difference {:?}", diff.terms);
    }

    #[test]
    fn centroids_follow_the_stated_convention() {
        let pypp = OperatorString::parse("PYPP").unwrap();
        assert_eq!(core_centroid(&pypp), 1.0);
        let ppyp = OperatorString::parse("PPYP").unwrap();
        assert_eq!(core_centroid(&ppyp), 2.0);
        let bond = OperatorString::parse("P+-P").unwrap();
        assert_eq!(core_centroid(&bond), 1.5);
    }
}
