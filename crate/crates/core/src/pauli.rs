//! Pauli-string algebra, Jordan-Wigner ladder images and the two qubit
//! Hamiltonians.
//!
//! Strings are stored site-0-first. Qubit `|1>` is an occupied site, so
//! `Z|1> = -|1>` and `n_i = (I - Z_i)/2`. The annihilator is
//! `c_i = Z_0 ... Z_{i-1} sigma+_i` with `sigma+ = (X + iY)/2 = |0><1|`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::lattice::{bond_profile, Flavor, ModelParams};
use crate::{Error, Result};

/// Largest system that may be expanded to a dense `2^L x 2^L` matrix.
pub const MAX_DENSE_SITES: usize = 12;

/// Coefficients below this magnitude are dropped during canonicalization.
pub const DROP_TOLERANCE: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// `self * other = phase * result`.
    pub fn product(self, other: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (ONE, p),
            (X, X) | (Y, Y) | (Z, Z) => (ONE, I),
            (X, Y) => (I_UNIT, Z),
            (Y, Z) => (I_UNIT, X),
            (Z, X) => (I_UNIT, Y),
            (Y, X) => (-I_UNIT, Z),
            (Z, Y) => (-I_UNIT, X),
            (X, Z) => (-I_UNIT, Y),
        }
    }

    /// Action on a single computational basis bit: `P|bit> = phase |bit'>`.
    fn act(self, bit: bool) -> (Complex64, bool) {
        match self {
            Pauli::I => (ONE, bit),
            Pauli::X => (ONE, !bit),
            Pauli::Y => (if bit { -I } else { I }, !bit),
            Pauli::Z => (if bit { -ONE } else { ONE }, bit),
        }
    }

    /// 2x2 matrix in the `(|0>, |1>)` basis.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

const I_UNIT: Complex64 = I;

impl TryFrom<char> for Pauli {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(Error::Validation(format!("not a Pauli symbol: '{c}'"))),
        }
    }
}

/// A weighted tensor product of single-site Paulis.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub ops: Vec<Pauli>,
    pub coeff: Complex64,
}

impl PauliString {
    pub fn identity(sites: usize) -> Self {
        Self {
            ops: vec![Pauli::I; sites],
            coeff: ONE,
        }
    }

    /// Builds a string from `(site, op)` placements; other sites are identity.
    pub fn from_sparse(sites: usize, coeff: Complex64, placed: &[(usize, Pauli)]) -> Result<Self> {
        let mut ops = vec![Pauli::I; sites];
        for &(site, op) in placed {
            if site >= sites {
                return Err(Error::index("site", site, sites));
            }
            ops[site] = op;
        }
        Ok(Self { ops, coeff })
    }

    /// Parses a site-0-first label such as `"XZI"`.
    pub fn parse(label: &str, coeff: Complex64) -> Result<Self> {
        let ops = label.chars().map(Pauli::try_from).collect::<Result<_>>()?;
        Ok(Self { ops, coeff })
    }

    pub fn sites(&self) -> usize {
        self.ops.len()
    }

    pub fn label(&self) -> String {
        self.ops.iter().map(|p| p.symbol()).collect()
    }

    /// Image of basis state `index` (bit `i` = site `i`): returns the target
    /// index and the amplitude, including this string's coefficient.
    pub fn apply_to_basis(&self, index: usize) -> (usize, Complex64) {
        apply_ops(&self.ops, index, self.coeff)
    }
}

fn apply_ops(ops: &[Pauli], index: usize, coeff: Complex64) -> (usize, Complex64) {
    let mut out = index;
    let mut amp = coeff;
    for (site, op) in ops.iter().enumerate() {
        let bit = (index >> site) & 1 == 1;
        let (phase, new_bit) = op.act(bit);
        amp *= phase;
        if new_bit != bit {
            out ^= 1 << site;
        }
    }
    (out, amp)
}

impl Mul for &PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        assert_eq!(self.sites(), rhs.sites(), "Pauli strings on different sizes");
        let mut coeff = self.coeff * rhs.coeff;
        let ops = self
            .ops
            .iter()
            .zip(&rhs.ops)
            .map(|(a, b)| {
                let (phase, p) = a.product(*b);
                coeff *= phase;
                p
            })
            .collect();
        PauliString { ops, coeff }
    }
}

/// Canonical sum of Pauli strings on a fixed number of sites: each operator
/// appears once and negligible coefficients are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    sites: usize,
    terms: BTreeMap<Vec<Pauli>, Complex64>,
}

impl PauliSum {
    pub fn zero(sites: usize) -> Self {
        Self {
            sites,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_strings(sites: usize, strings: impl IntoIterator<Item = PauliString>) -> Self {
        let mut sum = Self::zero(sites);
        for s in strings {
            sum.push(s);
        }
        sum.canonicalize();
        sum
    }

    fn push(&mut self, s: PauliString) {
        assert_eq!(s.sites(), self.sites, "Pauli string on the wrong size");
        *self.terms.entry(s.ops).or_insert(ZERO) += s.coeff;
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|_, c| c.norm() >= DROP_TOLERANCE);
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms.iter().map(|(ops, &coeff)| PauliString {
            ops: ops.clone(),
            coeff,
        })
    }

    /// Coefficient of the operator with the given site-0-first label.
    pub fn coefficient(&self, label: &str) -> Complex64 {
        PauliString::parse(label, ONE)
            .ok()
            .and_then(|s| self.terms.get(&s.ops).copied())
            .unwrap_or(ZERO)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.canonicalize();
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.conj();
        }
        out
    }

    /// Hermitian iff every coefficient is real (Pauli strings are Hermitian
    /// and linearly independent).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Applies the sum to basis state `index`, merging equal targets.
    pub fn apply_to_basis(&self, index: usize) -> BTreeMap<usize, Complex64> {
        let mut out = BTreeMap::new();
        for (ops, &coeff) in &self.terms {
            let (target, amp) = apply_ops(ops, index, coeff);
            *out.entry(target).or_insert(ZERO) += amp;
        }
        out
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;

    fn add(self, rhs: &PauliSum) -> PauliSum {
        assert_eq!(self.sites, rhs.sites, "Pauli sums on different sizes");
        let mut out = self.clone();
        for s in rhs.terms() {
            out.push(s);
        }
        out.canonicalize();
        out
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;

    fn mul(self, rhs: &PauliSum) -> PauliSum {
        assert_eq!(self.sites, rhs.sites, "Pauli sums on different sizes");
        let mut out = PauliSum::zero(self.sites);
        for a in self.terms() {
            for b in rhs.terms() {
                out.push(&a * &b);
            }
        }
        out.canonicalize();
        out
    }
}

/// One `coeff  LABEL` line per term, e.g. `+0.500000  XXI`.
impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (ops, c) in &self.terms {
            let label: String = ops.iter().map(|p| p.symbol()).collect();
            if c.im == 0.0 {
                writeln!(f, "{:+.6}  {label}", c.re)?;
            } else {
                writeln!(f, "({:+.6}{:+.6}i)  {label}", c.re, c.im)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderRole {
    Creation,
    Annihilation,
}

/// Qubit realization of a fermionic ladder operator.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderImage {
    pub role: LadderRole,
    pub site: usize,
    pub sum: PauliSum,
}

/// Jordan-Wigner image of `c_site` or `c_site^dagger`: a `Z` string on every
/// site left of `site` followed by `sigma+` (annihilation) or `sigma-`
/// (creation).
pub fn jw_ladder(site: usize, sites: usize, role: LadderRole) -> Result<LadderImage> {
    if site >= sites {
        return Err(Error::index("site", site, sites));
    }
    let y_sign = match role {
        LadderRole::Annihilation => 1.0,
        LadderRole::Creation => -1.0,
    };
    let string = |op: Pauli, coeff: Complex64| {
        let mut ops = vec![Pauli::I; sites];
        ops[..site].fill(Pauli::Z);
        ops[site] = op;
        PauliString { ops, coeff }
    };
    let sum = PauliSum::from_strings(
        sites,
        [
            string(Pauli::X, Complex64::new(0.5, 0.0)),
            string(Pauli::Y, Complex64::new(0.0, 0.5 * y_sign)),
        ],
    );
    Ok(LadderImage { role, site, sum })
}

fn ladder(site: usize, sites: usize, role: LadderRole) -> PauliSum {
    jw_ladder(site, sites, role).expect("site checked by caller").sum
}

/// Spin Hamiltonian `sum_b J_b/2 (X_b X_{b+1} + Y_b Y_{b+1}) + V/2 sum_b Z_b Z_{b+1}`.
pub fn build_spin_hamiltonian(params: &ModelParams) -> PauliSum {
    let sites = params.sites;
    let two_site = |b: usize, op: Pauli, c: f64| PauliString {
        ops: (0..sites)
            .map(|s| if s == b || s == b + 1 { op } else { Pauli::I })
            .collect(),
        coeff: Complex64::new(c, 0.0),
    };
    let mut strings = Vec::with_capacity(3 * params.bonds());
    for (b, jb) in bond_profile(params).into_iter().enumerate() {
        strings.push(two_site(b, Pauli::X, jb / 2.0));
        strings.push(two_site(b, Pauli::Y, jb / 2.0));
        strings.push(two_site(b, Pauli::Z, params.interaction / 2.0));
    }
    PauliSum::from_strings(sites, strings)
}

/// Jordan-Wigner image of the fermionic model
/// `sum_b J_b (c+_{b+1} c_b + h.c.) + V sum_b n_b n_{b+1}`, assembled by
/// Pauli-string multiplication of the ladder images.
pub fn build_fermionic_hamiltonian(params: &ModelParams) -> PauliSum {
    use LadderRole::*;
    let sites = params.sites;
    let number = |i: usize| &ladder(i, sites, Creation) * &ladder(i, sites, Annihilation);
    let mut h = PauliSum::zero(sites);
    for (b, jb) in bond_profile(params).into_iter().enumerate() {
        let forward = &ladder(b + 1, sites, Creation) * &ladder(b, sites, Annihilation);
        let hop = &forward + &forward.adjoint();
        h = &h + &hop.scale(Complex64::new(jb, 0.0));
        let nn = &number(b) * &number(b + 1);
        h = &h + &nn.scale(Complex64::new(params.interaction, 0.0));
    }
    h
}

/// The qubit Hamiltonian selected by `params.flavor`.
pub fn hamiltonian(params: &ModelParams) -> PauliSum {
    match params.flavor {
        Flavor::PaperLiteral => build_spin_hamiltonian(params),
        Flavor::ExactJw => build_fermionic_hamiltonian(params),
    }
}

fn dense_guard(sites: usize) -> Result<()> {
    if sites > MAX_DENSE_SITES {
        return Err(Error::Resource(format!(
            "dense matrix on {sites} sites exceeds the {MAX_DENSE_SITES}-site limit"
        )));
    }
    Ok(())
}

/// Dense `2^L x 2^L` matrix of a Pauli sum (row = output basis index).
pub fn to_matrix(sum: &PauliSum) -> Result<DMatrix<Complex64>> {
    dense_guard(sum.sites)?;
    let dim = 1usize << sum.sites;
    let mut m = DMatrix::zeros(dim, dim);
    for (ops, &coeff) in &sum.terms {
        for col in 0..dim {
            let (row, amp) = apply_ops(ops, col, coeff);
            m[(row, col)] += amp;
        }
    }
    Ok(m)
}

/// The fermionic model as a dense matrix, built from the dense ladder
/// matrices by matrix multiplication. Ignores `params.flavor`.
pub fn build_fermionic_hamiltonian_matrix(params: &ModelParams) -> Result<DMatrix<Complex64>> {
    use LadderRole::*;
    let sites = params.sites;
    dense_guard(sites)?;
    let dim = 1usize << sites;
    let create = (0..sites)
        .map(|i| to_matrix(&ladder(i, sites, Creation)))
        .collect::<Result<Vec<_>>>()?;
    let annihilate = (0..sites)
        .map(|i| to_matrix(&ladder(i, sites, Annihilation)))
        .collect::<Result<Vec<_>>>()?;
    let number: Vec<_> = create.iter().zip(&annihilate).map(|(c, a)| c * a).collect();
    let mut h = DMatrix::zeros(dim, dim);
    for (b, jb) in bond_profile(params).into_iter().enumerate() {
        let forward = &create[b + 1] * &annihilate[b];
        h += (&forward + forward.adjoint()) * Complex64::new(jb, 0.0);
        h += (&number[b] * &number[b + 1]) * Complex64::new(params.interaction, 0.0);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Site-0-first Kronecker expansion using explicit tensor products; an
    /// independent route to `to_matrix`.
    fn kron_matrix(sum: &PauliSum) -> DMatrix<Complex64> {
        let dim = 1 << sum.sites();
        let mut out = DMatrix::zeros(dim, dim);
        for term in sum.terms() {
            // Site 0 is the least significant bit, so it is the rightmost factor.
            let mut m = DMatrix::from_element(1, 1, ONE);
            for op in term.ops.iter().rev() {
                let p = op.matrix();
                let p = DMatrix::from_fn(2, 2, |r, c| p[r][c]);
                m = m.kronecker(&p);
            }
            out += m * term.coeff;
        }
        out
    }

    #[test]
    fn multiplication_table_exhaustive() {
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let (phase, p) = a.product(b);
                let lhs = DMatrix::from_fn(2, 2, |r, c| {
                    (0..2).map(|k| a.matrix()[r][k] * b.matrix()[k][c]).sum::<Complex64>()
                });
                let rhs = DMatrix::from_fn(2, 2, |r, c| phase * p.matrix()[r][c]);
                assert!(max_diff(&lhs, &rhs) < 1e-15, "{a:?}{b:?}");
            }
        }
        assert_eq!(Pauli::X.product(Pauli::Y), (I, Pauli::Z));
        assert_eq!(Pauli::Y.product(Pauli::Z), (I, Pauli::X));
        assert_eq!(Pauli::Z.product(Pauli::X), (I, Pauli::Y));
    }

    #[test]
    fn ladder_images_match_worked_example() {
        let a0 = jw_ladder(0, 3, LadderRole::Annihilation).unwrap();
        assert_eq!(a0.sum.len(), 2);
        assert_eq!(a0.sum.coefficient("XII"), c(0.5, 0.0));
        assert_eq!(a0.sum.coefficient("YII"), c(0.0, 0.5));

        let c2 = jw_ladder(2, 3, LadderRole::Creation).unwrap();
        assert_eq!(c2.sum.coefficient("ZZX"), c(0.5, 0.0));
        assert_eq!(c2.sum.coefficient("ZZY"), c(0.0, -0.5));

        assert!(jw_ladder(3, 3, LadderRole::Creation).is_err());
    }

    #[test]
    fn canonical_anticommutation() {
        for sites in 1..=4 {
            for i in 0..sites {
                for j in 0..sites {
                    let a = to_matrix(&jw_ladder(i, sites, LadderRole::Annihilation).unwrap().sum).unwrap();
                    let cd = to_matrix(&jw_ladder(j, sites, LadderRole::Creation).unwrap().sum).unwrap();
                    let anti = &a * &cd + &cd * &a;
                    let want = if i == j {
                        DMatrix::identity(1 << sites, 1 << sites)
                    } else {
                        DMatrix::zeros(1 << sites, 1 << sites)
                    };
                    assert!(max_diff(&anti, &want) < 1e-14, "L={sites} i={i} j={j}");
                    let a2 = to_matrix(&jw_ladder(j, sites, LadderRole::Annihilation).unwrap().sum).unwrap();
                    let aa = &a * &a2 + &a2 * &a;
                    assert!(aa.iter().all(|z| z.norm() < 1e-14));
                }
            }
        }
    }

    #[test]
    fn spin_hamiltonian_uniform_three_sites() {
        let h = build_spin_hamiltonian(&ModelParams::aah(3, 0.0, 0.0));
        assert_eq!(h.len(), 4);
        for label in ["XXI", "YYI", "IXX", "IYY"] {
            assert_eq!(h.coefficient(label), c(0.5, 0.0), "{label}");
        }
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn spin_hamiltonian_single_bond() {
        let p = ModelParams::aah(2, 0.9, 0.0).with_interaction(2.0);
        let h = build_spin_hamiltonian(&p);
        assert_eq!(h.len(), 3);
        assert!((h.coefficient("XX") - c(0.05, 0.0)).norm() < 1e-15);
        assert!((h.coefficient("YY") - c(0.05, 0.0)).norm() < 1e-15);
        assert_eq!(h.coefficient("ZZ"), c(1.0, 0.0));
    }

    #[test]
    fn spin_hamiltonian_term_counts() {
        let p = ModelParams::aah(6, 0.3, 0.2).with_interaction(0.7);
        let h = build_spin_hamiltonian(&p);
        assert_eq!(h.len(), 3 * 5);
    }

    #[test]
    fn empty_hamiltonian() {
        let p = ModelParams {
            hopping: 0.0,
            ..ModelParams::default()
        };
        assert!(build_spin_hamiltonian(&p).is_empty());
        assert!(to_matrix(&PauliSum::zero(2)).unwrap().iter().all(|z| *z == ZERO));
    }

    #[test]
    fn fermionic_matrix_two_sites() {
        let hop = build_fermionic_hamiltonian_matrix(&ModelParams::aah(2, 0.0, 0.0)).unwrap();
        // |10> (site 0 occupied) = index 1, |01> = index 2.
        for r in 0..4 {
            for col in 0..4 {
                let want = if (r, col) == (1, 2) || (r, col) == (2, 1) {
                    1.0
                } else {
                    0.0
                };
                assert!((hop[(r, col)] - c(want, 0.0)).norm() < 1e-14);
            }
        }
        let p = ModelParams {
            hopping: 0.0,
            interaction: 3.0,
            ..ModelParams::default()
        };
        let nn = build_fermionic_hamiltonian_matrix(&p).unwrap();
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ZERO, ZERO, ZERO, c(3.0, 0.0)]));
        assert!(max_diff(&nn, &diag) < 1e-14);
    }

    #[test]
    fn pauli_sum_and_matrix_routes_agree() {
        let p = ModelParams::aah(4, 0.6, 0.4).with_interaction(1.3);
        let via_sum = to_matrix(&build_fermionic_hamiltonian(&p)).unwrap();
        let via_matrices = build_fermionic_hamiltonian_matrix(&p).unwrap();
        assert!(max_diff(&via_sum, &via_matrices) < 1e-12);
    }

    #[test]
    fn spin_and_fermionic_agree_without_interaction() {
        for sites in 2..=6 {
            for (lambda, phase) in [(0.9, 0.0), (0.35, 1.1), (-0.5, PI)] {
                let p = ModelParams::aah(sites, lambda, phase);
                let spin = to_matrix(&build_spin_hamiltonian(&p)).unwrap();
                let fermi = build_fermionic_hamiltonian_matrix(&p).unwrap();
                assert!(max_diff(&spin, &fermi) < 1e-12, "L={sites}");
            }
        }
    }

    #[test]
    fn exact_interaction_is_projector_product() {
        // Exact JW interaction = V/4 sum_b (I - Z_b)(I - Z_{b+1}).
        for sites in 2..=6 {
            let v = 1.7;
            let with_v = ModelParams::aah(sites, 0.4, 0.3).with_interaction(v);
            let without = ModelParams {
                interaction: 0.0,
                ..with_v
            };
            let diff =
                &build_fermionic_hamiltonian(&with_v) + &build_fermionic_hamiltonian(&without).scale(c(-1.0, 0.0));
            let mut want = PauliSum::zero(sites);
            for b in 0..sites - 1 {
                let proj = |s| {
                    PauliSum::from_strings(
                        sites,
                        [
                            PauliString::identity(sites),
                            PauliString::from_sparse(sites, c(-1.0, 0.0), &[(s, Pauli::Z)]).unwrap(),
                        ],
                    )
                };
                want = &want + &(&proj(b) * &proj(b + 1)).scale(c(v / 4.0, 0.0));
            }
            assert!(max_diff(&to_matrix(&diff).unwrap(), &to_matrix(&want).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn both_flavors_conserve_particle_number() {
        for sites in 2..=6 {
            let total_z = to_matrix(&PauliSum::from_strings(
                sites,
                (0..sites).map(|s| PauliString::from_sparse(sites, ONE, &[(s, Pauli::Z)]).unwrap()),
            ))
            .unwrap();
            let p = ModelParams::aah(sites, 0.8, 0.5).with_interaction(2.0);
            for flavor in [Flavor::PaperLiteral, Flavor::ExactJw] {
                let h = to_matrix(&hamiltonian(&p.with_flavor(flavor))).unwrap();
                let comm = &h * &total_z - &total_z * &h;
                assert!(comm.norm() < 1e-12, "{flavor:?} L={sites}");
            }
        }
    }

    #[test]
    fn to_matrix_small_cases() {
        let z = to_matrix(&PauliSum::from_strings(1, [PauliString::parse("Z", ONE).unwrap()])).unwrap();
        assert_eq!(z[(0, 0)], ONE);
        assert_eq!(z[(1, 1)], -ONE);
        assert_eq!(z[(0, 1)], ZERO);

        let hop = to_matrix(&PauliSum::from_strings(
            2,
            [
                PauliString::parse("XX", c(0.5, 0.0)).unwrap(),
                PauliString::parse("YY", c(0.5, 0.0)).unwrap(),
            ],
        ))
        .unwrap();
        assert_eq!(hop[(1, 2)], ONE);
        assert_eq!(hop[(2, 1)], ONE);
        assert_eq!(hop[(0, 3)], ZERO);
        assert_eq!(hop[(3, 0)], ZERO);
    }

    #[test]
    fn dense_guard_rejects_large_systems() {
        let p = ModelParams::aah(13, 0.0, 0.0);
        assert!(matches!(
            to_matrix(&build_spin_hamiltonian(&p)),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            build_fermionic_hamiltonian_matrix(&p),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn rendering() {
        let h = build_spin_hamiltonian(&ModelParams::aah(2, 0.0, 0.0).with_interaction(1.0));
        assert_eq!(h.to_string(), "+0.500000  XX\n+0.500000  YY\n+0.500000  ZZ\n");
    }

    fn arb_string(sites: usize) -> impl Strategy<Value = PauliString> {
        (proptest::collection::vec(0usize..4, sites), -1.0f64..1.0, -1.0f64..1.0).prop_map(|(ops, re, im)| {
            PauliString {
                ops: ops.into_iter().map(|k| Pauli::ALL[k]).collect(),
                coeff: c(re, im),
            }
        })
    }

    proptest! {
        #[test]
        fn product_matches_matrix_product(a in arb_string(3), b in arb_string(3)) {
            let sa = PauliSum::from_strings(3, [a.clone()]);
            let sb = PauliSum::from_strings(3, [b.clone()]);
            let prod = to_matrix(&(&sa * &sb)).unwrap();
            let want = kron_matrix(&sa) * kron_matrix(&sb);
            prop_assert!(max_diff(&prod, &want) < 1e-12);
        }

        #[test]
        fn to_matrix_matches_kronecker(strings in proptest::collection::vec(arb_string(3), 0..6)) {
            let sum = PauliSum::from_strings(3, strings);
            prop_assert!(max_diff(&to_matrix(&sum).unwrap(), &kron_matrix(&sum)) < 1e-12);
        }
    }
}
