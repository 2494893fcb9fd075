//! Exact propagation by dense Hermitian eigendecomposition. This is the
//! reference every circuit result is compared against.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::lattice::{bond_profile, Flavor, ModelParams};
use crate::pauli::PauliSum;
use crate::state::StateVector;
use crate::{Error, Result};

/// Maximum `||H - H^dagger||_max` accepted as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

/// Eigenvalues in ascending order with the matching unitary of column
/// eigenvectors. Degenerate eigenvectors come in no particular order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U e^{-i E t} U^dagger psi`.
    pub fn propagate(&self, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let mut coeffs = self.eigenvectors.ad_mul(psi);
        for (c, e) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        &self.eigenvectors * coeffs
    }

    /// Frobenius norm of `U diag(E) U^dagger - h`.
    pub fn reconstruction_error(&self, h: &DMatrix<Complex64>) -> f64 {
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&e| Complex64::new(e, 0.0)),
        ));
        (&self.eigenvectors * diag * self.eigenvectors.adjoint() - h).norm()
    }

    /// Indices of eigenvalues with `|E| < tol`.
    pub fn near_zero_modes(&self, tol: f64) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.eigenvalues[k].abs() < tol).collect()
    }

    /// `|v_k(site)|^2` for eigenvector `k`.
    pub fn weight(&self, k: usize, component: usize) -> f64 {
        self.eigenvectors[(component, k)].norm_sqr()
    }

    /// CSV dump with header `index,eigenvalue`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (k, e) in self.eigenvalues.iter().enumerate() {
            writeln!(out, "{k},{e}").expect("write to string");
        }
        out
    }
}

fn check_hermitian(h: &DMatrix<Complex64>) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Validation(format!(
            "matrix is {}x{}, not square",
            h.nrows(),
            h.ncols()
        )));
    }
    let n = h.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((h[(r, c)] - h[(c, r)].conj()).norm());
        }
    }
    if worst > HERMITIAN_TOLERANCE {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian (max |H - H^dagger| = {worst:e})"
        )));
    }
    Ok(())
}

/// Ascending spectrum and eigenvectors of a Hermitian matrix.
pub fn spectrum(h: &DMatrix<Complex64>) -> Result<SpectralDecomposition> {
    check_hermitian(h)?;
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(h.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Spectrum of a real symmetric matrix.
pub fn spectrum_real(h: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    spectrum(&h.map(|x| Complex64::new(x, 0.0)))
}

/// `e^{-iHt} psi0` on the full space.
pub fn exact_evolve(h: &DMatrix<Complex64>, psi0: &StateVector, t: f64) -> Result<StateVector> {
    if h.nrows() != psi0.dim() {
        return Err(Error::Validation(format!(
            "Hamiltonian dimension {} does not match state dimension {}",
            h.nrows(),
            psi0.dim()
        )));
    }
    check_time(t)?;
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let spec = spectrum(h)?;
    let psi = DVector::from_column_slice(psi0.amplitudes());
    StateVector::from_amplitudes(spec.propagate(&psi, t).as_slice().to_vec())
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Validation(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Basis states with a fixed number of occupied sites, in ascending index
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberSector {
    sites: usize,
    particles: usize,
    basis: Vec<usize>,
}

impl NumberSector {
    pub fn new(sites: usize, particles: usize) -> Result<Self> {
        if particles > sites {
            return Err(Error::Validation(format!(
                "{particles} particles do not fit on {sites} sites"
            )));
        }
        if sites > crate::lattice::MAX_SITES {
            return Err(Error::Resource(format!("{sites} sites exceeds the sector limit")));
        }
        let basis = (0..1usize << sites)
            .filter(|k| k.count_ones() as usize == particles)
            .collect();
        Ok(Self {
            sites,
            particles,
            basis,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn position(&self, index: usize) -> Option<usize> {
        self.basis.binary_search(&index).ok()
    }

    /// Restricts a full-space state to the sector. Fails if more than `1e-12`
    /// of the probability lies outside.
    pub fn project(&self, psi: &StateVector) -> Result<DVector<Complex64>> {
        if psi.sites() != self.sites {
            return Err(Error::Validation(format!(
                "state has {} sites, sector has {}",
                psi.sites(),
                self.sites
            )));
        }
        let inside = DVector::from_iterator(self.dim(), self.basis.iter().map(|&k| psi.amplitudes()[k]));
        let leaked = psi.norm_sqr() - inside.norm_squared();
        if leaked > 1e-12 {
            return Err(Error::Validation(format!(
                "state has weight {leaked:e} outside the {}-particle sector",
                self.particles
            )));
        }
        Ok(inside)
    }

    pub fn embed(&self, coeffs: &DVector<Complex64>) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.sites];
        for (&k, &c) in self.basis.iter().zip(coeffs.iter()) {
            amps[k] = c;
        }
        StateVector::from_amplitudes(amps).expect("power-of-two length")
    }

    /// Matrix of `sum` restricted to this sector. Fails if `sum` couples the
    /// sector to the rest of the space.
    pub fn restrict(&self, sum: &PauliSum) -> Result<DMatrix<Complex64>> {
        if sum.sites() != self.sites {
            return Err(Error::Validation(format!(
                "operator has {} sites, sector has {}",
                sum.sites(),
                self.sites
            )));
        }
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (col, &k) in self.basis.iter().enumerate() {
            for (target, amp) in sum.apply_to_basis(k) {
                match self.position(target) {
                    Some(row) => m[(row, col)] += amp,
                    None if amp.norm() <= 1e-12 => {}
                    None => return Err(Error::Validation("operator does not conserve particle number".into())),
                }
            }
        }
        Ok(m)
    }
}

/// Spectral propagator restricted to one particle-number sector. Build once,
/// evolve to many times.
#[derive(Debug, Clone)]
pub struct SectorPropagator {
    sector: NumberSector,
    spectral: SpectralDecomposition,
}

impl SectorPropagator {
    pub fn new(sum: &PauliSum, particles: usize) -> Result<Self> {
        let sector = NumberSector::new(sum.sites(), particles)?;
        let spectral = spectrum(&sector.restrict(sum)?)?;
        Ok(Self { sector, spectral })
    }

    pub fn sector(&self) -> &NumberSector {
        &self.sector
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn evolve(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        check_time(t)?;
        let coeffs = self.sector.project(psi0)?;
        if t == 0.0 {
            return Ok(psi0.clone());
        }
        Ok(self.sector.embed(&self.spectral.propagate(&coeffs, t)))
    }
}

/// `L x L` Hamiltonian of the one-particle sector, written directly in site
/// basis: hopping `J_b` between `b` and `b + 1` plus the diagonal energy the
/// chosen flavor's interaction assigns to a lone particle.
pub fn single_particle_hamiltonian(params: &ModelParams) -> DMatrix<f64> {
    let sites = params.sites;
    let mut h = DMatrix::zeros(sites, sites);
    for (b, jb) in bond_profile(params).into_iter().enumerate() {
        h[(b, b + 1)] = jb;
        h[(b + 1, b)] = jb;
    }
    if params.flavor == Flavor::PaperLiteral {
        // V/2 sum_b Z_b Z_{b+1}: every bond touching the particle contributes -1.
        let bonds = params.bonds() as f64;
        for i in 0..sites {
            let touching = usize::from(i > 0) + usize::from(i + 1 < sites);
            h[(i, i)] = params.interaction / 2.0 * (bonds - 2.0 * touching as f64);
        }
    }
    h
}
