//! Synthetic independent-qubit readout flips and their inversion.
//!
//! Qubit `i` reports 1 for a true 0 with probability `p01` and 0 for a true 1
//! with probability `p10`. Its confusion matrix (columns = true outcome) is
//! `A_i = [[1 - p01, p10], [p01, 1 - p10]]`, invertible while
//! `p01 + p10 < 1`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{rng, CountsTable};
use crate::state::bitstring;
use crate::{ConfigIssue, Error, Result};

/// Largest register for full tensor-product inversion.
pub const MAX_FULL_MITIGATION_SITES: usize = 12;

/// A flip rate given once for all qubits or per qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rates {
    Uniform(f64),
    PerQubit(Vec<f64>),
}

impl Rates {
    pub fn get(&self, qubit: usize) -> f64 {
        match self {
            Rates::Uniform(p) => *p,
            Rates::PerQubit(ps) => ps[qubit],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutModel {
    pub p01: Rates,
    pub p10: Rates,
}

impl ReadoutModel {
    pub fn symmetric(epsilon: f64) -> Self {
        Self {
            p01: Rates::Uniform(epsilon),
            p10: Rates::Uniform(epsilon),
        }
    }

    pub fn noiseless() -> Self {
        Self::symmetric(0.0)
    }

    pub fn p01(&self, qubit: usize) -> f64 {
        self.p01.get(qubit)
    }

    pub fn p10(&self, qubit: usize) -> f64 {
        self.p10.get(qubit)
    }

    /// Config-style checks for a register of `sites` qubits.
    pub fn issues(&self, sites: usize, prefix: &str) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        for (name, rates) in [("p01", &self.p01), ("p10", &self.p10)] {
            let field = format!("{prefix}.{name}");
            let values: Vec<f64> = match rates {
                Rates::Uniform(p) => vec![*p],
                Rates::PerQubit(ps) => {
                    if ps.len() != sites {
                        out.push(ConfigIssue::new(
                            &field,
                            format!("expected {sites} per-qubit rates, got {}", ps.len()),
                        ));
                    }
                    ps.clone()
                }
            };
            for p in values {
                if !(0.0..0.5).contains(&p) {
                    out.push(ConfigIssue::new(&field, format!("rate {p} outside [0, 0.5)")));
                }
            }
        }
        out
    }

    pub fn validate(&self, sites: usize) -> Result<()> {
        let issues = self.issues(sites, "readout");
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    /// `A_q` with rows = reported outcome, columns = true outcome.
    pub fn confusion(&self, qubit: usize) -> [[f64; 2]; 2] {
        let (p01, p10) = (self.p01(qubit), self.p10(qubit));
        [[1.0 - p01, p10], [p01, 1.0 - p10]]
    }

    /// `A_q^{-1}`; fails when `p01 + p10 >= 1`.
    pub fn inverse_confusion(&self, qubit: usize) -> Result<[[f64; 2]; 2]> {
        let (p01, p10) = (self.p01(qubit), self.p10(qubit));
        let det = 1.0 - p01 - p10;
        if det <= 0.0 {
            return Err(Error::NonInvertible { qubit, sum: p01 + p10 });
        }
        Ok([[(1.0 - p10) / det, -p10 / det], [-p01 / det, (1.0 - p01) / det]])
    }

    fn is_noiseless(&self, sites: usize) -> bool {
        (0..sites).all(|q| self.p01(q) == 0.0 && self.p10(q) == 0.0)
    }
}

/// Flips every recorded bit independently with the model's probabilities.
/// Shot total is preserved; deterministic in `seed`.
pub fn corrupt(counts: &CountsTable, model: &ReadoutModel, seed: u64) -> Result<CountsTable> {
    corrupt_stream(counts, model, seed, 0)
}

/// [`corrupt`] on a chosen generator stream.
pub fn corrupt_stream(counts: &CountsTable, model: &ReadoutModel, seed: u64, stream: u64) -> Result<CountsTable> {
    let sites = counts.sites();
    model.validate(sites)?;
    if model.is_noiseless(sites) {
        return Ok(counts.clone());
    }
    let mut r = rng(seed, stream);
    let mut out: BTreeMap<usize, u64> = BTreeMap::new();
    for (index, n) in counts.indexed() {
        for _ in 0..n {
            let mut reported = index;
            for q in 0..sites {
                let one = (index >> q) & 1 == 1;
                let flip = if one { model.p10(q) } else { model.p01(q) };
                if r.random::<f64>() < flip {
                    reported ^= 1 << q;
                }
            }
            *out.entry(reported).or_insert(0) += 1;
        }
    }
    let map = out.into_iter().map(|(k, n)| (bitstring(k, sites), n)).collect();
    CountsTable::from_counts(sites, map, counts.seed())
}

/// Inverts the single-qubit channel on the measured `<Z_site>`:
/// `(z - (p10 - p01)) / (1 - p01 - p10)`.
pub fn mitigate_expectation_z(counts: &CountsTable, model: &ReadoutModel, site: usize) -> Result<f64> {
    let z = counts.expectation_z(site)?;
    mitigate_z_value(z, model, site)
}

/// The same inversion applied to an already-estimated expectation.
pub fn mitigate_z_value(z: f64, model: &ReadoutModel, site: usize) -> Result<f64> {
    let (p01, p10) = (model.p01(site), model.p10(site));
    let scale = 1.0 - p01 - p10;
    if scale <= 0.0 {
        return Err(Error::NonInvertible {
            qubit: site,
            sum: p01 + p10,
        });
    }
    Ok((z - (p10 - p01)) / scale)
}

/// Quasi-probabilities over all `2^L` outcomes, indexed by basis index.
/// Entries may be slightly negative.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDistribution {
    sites: usize,
    probs: Vec<f64>,
}

impl QuasiDistribution {
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if !probs.len().is_power_of_two() {
            return Err(Error::Validation("distribution length must be a power of two".into()));
        }
        Ok(Self {
            sites: probs.len().trailing_zeros() as usize,
            probs,
        })
    }

    pub fn from_counts(counts: &CountsTable) -> Result<Self> {
        guard(counts.sites())?;
        let mut probs = vec![0.0; 1 << counts.sites()];
        let shots = counts.shots() as f64;
        for (k, n) in counts.indexed() {
            probs[k] = n as f64 / shots;
        }
        Ok(Self {
            sites: counts.sites(),
            probs,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, key: &str) -> Result<f64> {
        Ok(self.probs[crate::state::parse_bitstring(key)?])
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Site-0-first bitstring map of the nonzero entries.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(k, &p)| (bitstring(k, self.sites), p))
            .collect()
    }

    pub fn expectation_z(&self, site: usize) -> Result<f64> {
        if site >= self.sites {
            return Err(Error::index("site", site, self.sites));
        }
        Ok(self
            .probs
            .iter()
            .enumerate()
            .map(|(k, p)| if (k >> site) & 1 == 0 { *p } else { -p })
            .sum())
    }

    pub fn expectation_zz(&self, i: usize, j: usize) -> Result<f64> {
        for s in [i, j] {
            if s >= self.sites {
                return Err(Error::index("site", s, self.sites));
            }
        }
        Ok(self
            .probs
            .iter()
            .enumerate()
            .map(|(k, p)| if ((k >> i) ^ (k >> j)) & 1 == 0 { *p } else { -p })
            .sum())
    }

    /// Applies a per-qubit 2x2 map along every axis.
    fn map_axes(&mut self, mut matrix: impl FnMut(usize) -> Result<[[f64; 2]; 2]>) -> Result<()> {
        for q in 0..self.sites {
            let m = matrix(q)?;
            let stride = 1 << q;
            for chunk in self.probs.chunks_mut(2 * stride) {
                let (lo, hi) = chunk.split_at_mut(stride);
                for (a, b) in lo.iter_mut().zip(hi) {
                    let (x, y) = (*a, *b);
                    *a = m[0][0] * x + m[0][1] * y;
                    *b = m[1][0] * x + m[1][1] * y;
                }
            }
        }
        Ok(())
    }

    /// Exact forward readout channel `(A_0 x ... x A_{L-1}) p`.
    pub fn apply_channel(&self, model: &ReadoutModel) -> Self {
        let mut out = self.clone();
        out.map_axes(|q| Ok(model.confusion(q)))
            .expect("forward map is infallible");
        out
    }
}

fn guard(sites: usize) -> Result<()> {
    if sites > MAX_FULL_MITIGATION_SITES {
        return Err(Error::Resource(format!(
            "full mitigation on {sites} qubits exceeds the {MAX_FULL_MITIGATION_SITES}-qubit limit"
        )));
    }
    Ok(())
}

/// Applies `A_0^{-1} x ... x A_{L-1}^{-1}` to the empirical distribution.
/// Negative entries are kept; the result sums to one.
pub fn mitigate_counts_full(counts: &CountsTable, model: &ReadoutModel) -> Result<QuasiDistribution> {
    mitigate_distribution(&QuasiDistribution::from_counts(counts)?, model)
}

/// Inverse channel on an arbitrary (quasi-)distribution.
pub fn mitigate_distribution(dist: &QuasiDistribution, model: &ReadoutModel) -> Result<QuasiDistribution> {
    guard(dist.sites())?;
    let mut out = dist.clone();
    out.map_axes(|q| model.inverse_confusion(q))?;
    Ok(out)
}
