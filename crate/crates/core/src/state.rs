//! Statevector storage and Fock-state preparation.

use num_complex::Complex64;

use crate::{Error, Result};

/// Upper bound on statevector size accepted by the engine.
pub const MAX_QUBITS: usize = 30;

/// `2^L` complex amplitudes. Basis index bit `i` is the state of qubit/site
/// `i` (little-endian, site 0 = least significant bit).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `sites` qubits.
    pub fn zero(sites: usize) -> Result<Self> {
        if sites > MAX_QUBITS {
            return Err(Error::Resource(format!(
                "{sites} qubits exceeds the {MAX_QUBITS}-qubit statevector limit"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << sites];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { sites, amps })
    }

    pub fn basis(sites: usize, index: usize) -> Result<Self> {
        let mut psi = Self::zero(sites)?;
        if index >= psi.amps.len() {
            return Err(Error::index("basis state", index, psi.amps.len()));
        }
        psi.amps[0] = Complex64::new(0.0, 0.0);
        psi.amps[index] = Complex64::new(1.0, 0.0);
        Ok(psi)
    }

    /// Wraps raw amplitudes; the length must be a power of two. No
    /// normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::Validation(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let sites = amps.len().trailing_zeros() as usize;
        Ok(Self { sites, amps })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `min_phi || self - e^{i phi} other ||`, the distance between the two
    /// rays. Insensitive to global phase.
    pub fn phase_aligned_distance(&self, other: &StateVector) -> f64 {
        let overlap = self.inner(other);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Total occupation `sum_i n_i`.
    pub fn particle_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(k, a)| a.norm_sqr() * f64::from(k.count_ones()))
            .sum()
    }
}

/// Computational basis state with exactly the listed sites occupied.
pub fn prepare_fock_state(sites: usize, occupied: &[usize]) -> Result<StateVector> {
    let index = fock_index(sites, occupied)?;
    StateVector::basis(sites, index)
}

/// Basis index of a Fock configuration; rejects duplicates and out-of-range
/// sites.
pub fn fock_index(sites: usize, occupied: &[usize]) -> Result<usize> {
    let mut index = 0usize;
    for &s in occupied {
        if s >= sites {
            return Err(Error::index("site", s, sites));
        }
        if index & (1 << s) != 0 {
            return Err(Error::Validation(format!("site {s} listed twice")));
        }
        index |= 1 << s;
    }
    Ok(index)
}

/// Site-0-first bitstring of a basis index, e.g. index 4 on 5 sites is
/// `"00100"`.
pub fn bitstring(index: usize, sites: usize) -> String {
    (0..sites)
        .map(|i| if (index >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`bitstring`].
pub fn parse_bitstring(bits: &str) -> Result<usize> {
    bits.chars().enumerate().try_fold(0usize, |acc, (i, ch)| match ch {
        '0' => Ok(acc),
        '1' => Ok(acc | (1 << i)),
        _ => Err(Error::Validation(format!("invalid bitstring '{bits}'"))),
    })
}
