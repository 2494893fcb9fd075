//! Densities, edge and radial diagnostics, correlations and participation
//! entropy.
//!
//! Occupation of a site is `(1 - <Z>) / 2`, so a qubit in `|1>` is an
//! occupied site.

use serde::{Deserialize, Serialize};

use crate::engine::{self, CountsTable};
use crate::readout::QuasiDistribution;
use crate::{Error, Result, StateVector};

/// Where a profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Exact,
    TrotterExact,
    TrotterSampled,
    TrotterSampledMitigated,
}

impl Source {
    pub const ALL: [Source; 4] = [
        Source::Exact,
        Source::TrotterExact,
        Source::TrotterSampled,
        Source::TrotterSampledMitigated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Exact => "exact",
            Source::TrotterExact => "trotter-exact",
            Source::TrotterSampled => "trotter-sampled",
            Source::TrotterSampledMitigated => "trotter-sampled-mitigated",
        }
    }

    /// Profiles from amplitudes rather than shots.
    pub fn is_exact(self) -> bool {
        matches!(self, Source::Exact | Source::TrotterExact)
    }
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Anything that yields single- and two-site Z expectations.
pub trait ZMeasurement {
    fn sites(&self) -> usize;
    fn z(&self, site: usize) -> Result<f64>;
    fn zz(&self, i: usize, j: usize) -> Result<f64>;
}

impl ZMeasurement for StateVector {
    fn sites(&self) -> usize {
        StateVector::sites(self)
    }
    fn z(&self, site: usize) -> Result<f64> {
        engine::expectation_z(self, site)
    }
    fn zz(&self, i: usize, j: usize) -> Result<f64> {
        engine::expectation_zz(self, i, j)
    }
}

impl ZMeasurement for CountsTable {
    fn sites(&self) -> usize {
        CountsTable::sites(self)
    }
    fn z(&self, site: usize) -> Result<f64> {
        self.expectation_z(site)
    }
    fn zz(&self, i: usize, j: usize) -> Result<f64> {
        self.expectation_zz(i, j)
    }
}

impl ZMeasurement for QuasiDistribution {
    fn sites(&self) -> usize {
        QuasiDistribution::sites(self)
    }
    fn z(&self, site: usize) -> Result<f64> {
        self.expectation_z(site)
    }
    fn zz(&self, i: usize, j: usize) -> Result<f64> {
        self.expectation_zz(i, j)
    }
}

/// Occupation probability of `site`.
pub fn density(m: &impl ZMeasurement, site: usize) -> Result<f64> {
    Ok(occupation_from_z(m.z(site)?))
}

pub fn occupation_from_z(z: f64) -> f64 {
    (1.0 - z) / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub time: f64,
    pub values: Vec<f64>,
    pub source: Source,
}

impl DensityProfile {
    pub fn measure(m: &impl ZMeasurement, time: f64, source: Source) -> Result<Self> {
        let values = (0..m.sites()).map(|i| density(m, i)).collect::<Result<_>>()?;
        Ok(Self { time, values, source })
    }

    pub fn sites(&self) -> usize {
        self.values.len()
    }

    /// Total occupation.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sites whose value leaves `[0, 1]` by more than `tol`; only shot-based
    /// mitigated profiles are expected to have any.
    pub fn out_of_range(&self, tol: f64) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v < -tol || **v > 1.0 + tol)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Occupation of the first site.
pub fn edge_probability(profile: &DensityProfile) -> f64 {
    profile.values.first().copied().unwrap_or(0.0)
}

/// `sum_i i * n_i`.
pub fn radial_distribution(profile: &DensityProfile) -> f64 {
    profile.values.iter().enumerate().map(|(i, n)| i as f64 * n).sum()
}

/// Mean occupation of the two end sites.
pub fn edge_density(profile: &DensityProfile) -> f64 {
    match profile.values.as_slice() {
        [] => 0.0,
        [only] => *only,
        [first, .., last] => (first + last) / 2.0,
    }
}

/// Participation entropy of order `order` for `particles` walkers:
/// `ln((1/N) * sum_i p_i^k) / (1 - k)` with `p_i = n_i / N`.
pub fn participation_entropy(values: &[f64], order: u32, particles: usize) -> Result<f64> {
    if order < 2 {
        return Err(Error::Validation(format!(
            "entropy order must be at least 2, got {order}"
        )));
    }
    if particles == 0 {
        return Err(Error::Validation("entropy needs at least one particle".into()));
    }
    if values.iter().all(|v| *v == 0.0) {
        return Err(Error::UndefinedEntropy);
    }
    let n = particles as f64;
    let sum: f64 = values.iter().map(|v| (v / n).powi(order as i32)).sum();
    Ok((sum / n).ln() / (1.0 - order as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationKind {
    /// `<Z_i><Z_j>`
    Product,
    /// `<Z_i Z_j> - <Z_i><Z_j>`
    Connected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub time: f64,
    pub kind: CorrelationKind,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn sites(&self) -> usize {
        self.values.len()
    }

    /// Largest entry with its indices, first in row-major order on ties.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v > best.2 {
                    best = (i, j, *v);
                }
            }
        }
        best
    }
}

fn z_vector(m: &impl ZMeasurement) -> Result<Vec<f64>> {
    (0..m.sites()).map(|i| m.z(i)).collect()
}

/// Product of single-site expectations.
pub fn correlation(m: &impl ZMeasurement, time: f64) -> Result<CorrelationMatrix> {
    Ok(product_correlation(&z_vector(m)?, time))
}

/// Product correlation from precomputed Z expectations.
pub fn product_correlation(z: &[f64], time: f64) -> CorrelationMatrix {
    let values = z.iter().map(|zi| z.iter().map(|zj| zi * zj).collect()).collect();
    CorrelationMatrix {
        time,
        kind: CorrelationKind::Product,
        values,
    }
}

pub fn connected_correlation(m: &impl ZMeasurement, time: f64) -> Result<CorrelationMatrix> {
    let z = z_vector(m)?;
    let l = z.len();
    let mut values = vec![vec![0.0; l]; l];
    for i in 0..l {
        for j in i..l {
            let c = m.zz(i, j)? - z[i] * z[j];
            values[i][j] = c;
            values[j][i] = c;
        }
    }
    Ok(CorrelationMatrix {
        time,
        kind: CorrelationKind::Connected,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::SectorPropagator;
    use crate::lattice::ModelParams;
    use crate::pauli::hamiltonian;
    use crate::state::prepare_fock_state;
    use proptest::prelude::*;

    fn profile(values: Vec<f64>) -> DensityProfile {
        DensityProfile {
            time: 0.0,
            values,
            source: Source::Exact,
        }
    }

    fn evolve(params: &ModelParams, occupied: &[usize], t: f64) -> StateVector {
        let psi = prepare_fock_state(params.sites, occupied).unwrap();
        let prop = SectorPropagator::new(&hamiltonian(params), occupied.len()).unwrap();
        prop.evolve(&psi, t).unwrap()
    }

    #[test]
    fn left_edge_fock_state() {
        let psi = prepare_fock_state(10, &[0]).unwrap();
        let p = DensityProfile::measure(&psi, 0.0, Source::Exact).unwrap();
        assert_eq!(p.values[0], 1.0);
        assert!(p.values[1..].iter().all(|v| *v == 0.0));
        assert_eq!(edge_probability(&p), 1.0);
        assert_eq!(radial_distribution(&p), 0.0);
        assert_eq!(edge_density(&p), 0.5);
        let bulk = prepare_fock_state(10, &[5]).unwrap();
        assert_eq!(
            edge_density(&DensityProfile::measure(&bulk, 0.0, Source::Exact).unwrap()),
            0.0
        );
    }

    #[test]
    fn two_site_rabi_density() {
        let params = ModelParams::aah(2, 0.0, 0.0);
        for t in [0.0, 0.4, 1.3, 2.9] {
            let psi = evolve(&params, &[0], t);
            assert!((density(&psi, 0).unwrap() - t.cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_radial_distribution() {
        assert!((radial_distribution(&profile(vec![0.1; 10])) - 4.5).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let pair = [0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        assert!((participation_entropy(&pair, 2, 2).unwrap() - 4f64.ln()).abs() < 1e-12);
        let uniform = [0.25; 8];
        assert!((participation_entropy(&uniform, 2, 2).unwrap() - 16f64.ln()).abs() < 1e-12);
        assert_eq!(participation_entropy(&[1.0, 0.0, 0.0], 2, 1).unwrap(), 0.0);
        assert!(matches!(
            participation_entropy(&[0.0; 4], 2, 1),
            Err(Error::UndefinedEntropy)
        ));
        assert!(participation_entropy(&uniform, 1, 2).is_err());
        assert!(participation_entropy(&uniform, 2, 0).is_err());
    }

    #[test]
    fn product_state_correlation() {
        let psi = prepare_fock_state(4, &[0, 1]).unwrap();
        let c = correlation(&psi, 0.0).unwrap();
        assert_eq!(c.get(0, 1), 1.0);
        assert_eq!(c.get(0, 2), -1.0);
        assert_eq!(c.get(2, 3), 1.0);
        let connected = connected_correlation(&psi, 0.0).unwrap();
        assert!(connected.values.iter().flatten().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn counts_and_quasi_measurements_agree() {
        let map = [("10".to_string(), 3u64), ("01".to_string(), 1)].into_iter().collect();
        let counts = CountsTable::from_counts(2, map, None).unwrap();
        let quasi = QuasiDistribution::from_counts(&counts).unwrap();
        for site in 0..2 {
            assert!((density(&counts, site).unwrap() - density(&quasi, site).unwrap()).abs() < 1e-15);
        }
        assert!((density(&counts, 0).unwrap() - 0.75).abs() < 1e-15);
        assert!((counts.zz(0, 1).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn bound_pair_correlation_peaks_on_pair() {
        let params = ModelParams::aah(8, 0.9, 0.0).with_interaction(2.0);
        let psi = evolve(&params, &[3, 4], 3.0);
        let c = correlation(&psi, 3.0).unwrap();
        // Occupied sites have Z near -1, empty ones near +1; the pair block
        // is the only place where both factors are negative.
        let n3 = density(&psi, 3).unwrap();
        let n4 = density(&psi, 4).unwrap();
        assert!(n3 > 0.9 && n4 > 0.9);
        assert!(c.get(3, 4) > 0.6);
        for j in [0, 1, 2, 5, 6, 7] {
            assert!(c.get(3, j) < -0.6, "C(3,{j}) = {}", c.get(3, j));
        }
    }

    #[test]
    fn mirror_symmetric_start_stays_symmetric() {
        // Odd length with a centred walker, and even length with the central pair.
        for (sites, occupied) in [(9usize, vec![4usize]), (10, vec![4, 5])] {
            let params = ModelParams::aah(sites, 0.0, 0.0);
            for t in [0.5, 1.7, 3.2, 5.0] {
                let p = DensityProfile::measure(&evolve(&params, &occupied, t), t, Source::Exact).unwrap();
                for i in 0..sites {
                    assert!((p.values[i] - p.values[sites - 1 - i]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn frozen_edge_probabilities() {
        let frozen = [
            (0.0, 7.537030869498055e-05),
            (0.3, 0.5317773370845531),
            (0.6, 0.8742693544326388),
            (0.9, 0.9891345788897818),
        ];
        for (lambda, expected) in frozen {
            let psi = evolve(&ModelParams::aah(10, lambda, 0.0), &[0], 5.0);
            let p = DensityProfile::measure(&psi, 5.0, Source::Exact).unwrap();
            assert!((edge_probability(&p) - expected).abs() < 1e-9, "lambda {lambda}");
        }
    }

    #[test]
    fn out_of_range_flags_without_clipping() {
        let p = profile(vec![-0.01, 0.5, 1.02]);
        assert_eq!(p.out_of_range(1e-9), [0, 2]);
        assert_eq!(p.values[0], -0.01);
    }

    #[test]
    fn source_labels() {
        let labels: Vec<_> = Source::ALL.iter().map(|s| serde_json::to_string(s).unwrap()).collect();
        assert_eq!(
            labels,
            [
                r#""exact""#,
                r#""trotter-exact""#,
                r#""trotter-sampled""#,
                r#""trotter-sampled-mitigated""#
            ]
        );
    }

    proptest! {
        #[test]
        fn exact_profiles_sum_to_particle_number(
            lambda in 0.0f64..1.0, phase in 0.0f64..6.3, v in 0.0f64..2.0, t in 0.0f64..4.0,
        ) {
            let params = ModelParams::aah(6, lambda, phase).with_interaction(v);
            let psi = evolve(&params, &[1, 4], t);
            let p = DensityProfile::measure(&psi, t, Source::Exact).unwrap();
            prop_assert!((p.total() - 2.0).abs() < 1e-8);
            prop_assert!(p.out_of_range(1e-12).is_empty());
            let c = correlation(&psi, t).unwrap();
            for i in 0..6 {
                prop_assert!(c.get(i, i) >= 0.0);
                for j in 0..6 {
                    prop_assert_eq!(c.get(i, j).to_bits(), c.get(j, i).to_bits());
                }
            }
        }

        #[test]
        fn entropy_bounded_by_uniform(weights in proptest::collection::vec(0.0f64..1.0, 8), particles in 1usize..4) {
            let total: f64 = weights.iter().sum();
            prop_assume!(total > 1e-6);
            let values: Vec<f64> = weights.iter().map(|w| w / total * particles as f64).collect();
            let s = participation_entropy(&values, 2, particles).unwrap();
            let uniform = participation_entropy(&[particles as f64 / 8.0; 8], 2, particles).unwrap();
            prop_assert!(s <= uniform + 1e-9);
        }
    }
}
