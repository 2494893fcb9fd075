//! Statevector kernels, exact Z expectations and shot sampling.
//!
//! A single-qubit gate on qubit `q` updates the `2^(L-1)` pairs
//! `(k, k | 1 << q)` with bit `q` of `k` clear; a CNOT swaps the pair when the
//! control bit is set. Pairs are disjoint, so the parallel path produces the
//! same bits as the sequential one.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::parallel::{chunked_sum, Execution};
use crate::state::{bitstring, parse_bitstring, StateVector};
use crate::{Error, Result};

/// Identifier of the sampling generator, recorded in run metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Shot count used when sampling is requested without an explicit number.
pub const DEFAULT_SHOTS: u64 = 8192;

/// Seeded generator on an independent stream.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

type Matrix2 = [[Complex64; 2]; 2];

#[inline]
fn rotate(m: &Matrix2, lo: &mut Complex64, hi: &mut Complex64) {
    let (a, b) = (*lo, *hi);
    *lo = m[0][0] * a + m[0][1] * b;
    *hi = m[1][0] * a + m[1][1] * b;
}

/// Amplitudes per parallel task.
#[cfg(feature = "parallel")]
const GRAIN: usize = 1 << 12;

/// Calls `f(k, lo, hi)` for every pair `(k, k | 1 << q)` with bit `q` of `k`
/// clear. Parallel work is split into fixed pieces of [`GRAIN`] amplitudes.
fn for_each_pair<F>(amps: &mut [Complex64], q: usize, exec: Execution, f: F)
where
    F: Fn(usize, &mut Complex64, &mut Complex64) + Sync,
{
    let stride = 1usize << q;
    let block = 2 * stride;
    let run = |offset: usize, piece: &mut [Complex64]| {
        for (c, chunk) in piece.chunks_mut(block).enumerate() {
            let (lo, hi) = chunk.split_at_mut(stride);
            let base = offset + c * block;
            for (k, (l, h)) in lo.iter_mut().zip(hi).enumerate() {
                f(base + k, l, h);
            }
        }
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel(amps.len()) {
        if block <= GRAIN {
            amps.par_chunks_mut(GRAIN)
                .enumerate()
                .for_each(|(i, piece)| run(i * GRAIN, piece));
        } else {
            let half = GRAIN / 2;
            for (c, chunk) in amps.chunks_mut(block).enumerate() {
                let (lo, hi) = chunk.split_at_mut(stride);
                lo.par_chunks_mut(half)
                    .zip(hi.par_chunks_mut(half))
                    .enumerate()
                    .for_each(|(j, (l, h))| {
                        let base = c * block + j * half;
                        for (k, (a, b)) in l.iter_mut().zip(h).enumerate() {
                            f(base + k, a, b);
                        }
                    });
            }
        }
        return;
    }
    let _ = exec;
    run(0, amps);
}

fn apply_single(amps: &mut [Complex64], q: usize, m: &Matrix2, exec: Execution) {
    for_each_pair(amps, q, exec, |_, l, h| rotate(m, l, h));
}

fn apply_cnot(amps: &mut [Complex64], control: usize, target: usize, exec: Execution) {
    let cmask = 1usize << control;
    for_each_pair(amps, target, exec, |k, l, h| {
        if k & cmask != 0 {
            std::mem::swap(l, h);
        }
    });
}

/// Applies one lowered gate in place.
pub fn apply_gate(psi: &mut StateVector, gate: &Gate, exec: Execution) -> Result<()> {
    let sites = psi.sites();
    if let Some(&q) = gate.qubits().iter().find(|&&q| q >= sites) {
        return Err(Error::index("qubit", q, sites));
    }
    let amps = psi.amplitudes_mut();
    match *gate {
        Gate::Cnot { control, target } => apply_cnot(amps, control, target, exec),
        Gate::Block { .. } => return Err(Error::LoweringRequired("tblock")),
        ref g => {
            let m = g.single_qubit_matrix().expect("single-qubit gate");
            apply_single(amps, g.qubits()[0], &m, exec);
        }
    }
    Ok(())
}

/// Applies a lowered circuit in place with an explicit execution policy.
pub fn apply_circuit_with(psi: &mut StateVector, c: &Circuit, exec: Execution) -> Result<()> {
    if c.sites() != psi.sites() {
        return Err(Error::Validation(format!(
            "circuit has {} qubits, state has {}",
            c.sites(),
            psi.sites()
        )));
    }
    if let Some(g) = c.gates().iter().find(|g| !g.is_lowered()) {
        return Err(Error::LoweringRequired(g.name()));
    }
    for g in c.gates() {
        apply_gate(psi, g, exec)?;
    }
    Ok(())
}

/// Applies a lowered circuit in place.
pub fn apply_circuit(psi: &mut StateVector, c: &Circuit) -> Result<()> {
    apply_circuit_with(psi, c, Execution::Auto)
}

/// `<psi| Z_site |psi>`: `+1` weight for bit 0, `-1` for bit 1.
pub fn expectation_z(psi: &StateVector, site: usize) -> Result<f64> {
    if site >= psi.sites() {
        return Err(Error::index("site", site, psi.sites()));
    }
    let amps = psi.amplitudes();
    Ok(chunked_sum(amps.len(), Execution::Auto, |k| {
        let p = amps[k].norm_sqr();
        if (k >> site) & 1 == 0 {
            p
        } else {
            -p
        }
    }))
}

/// `<Z_i>` for every site.
pub fn expectations_z(psi: &StateVector) -> Vec<f64> {
    (0..psi.sites())
        .map(|i| expectation_z(psi, i).expect("site in range"))
        .collect()
}

/// `<Z_i Z_j>`.
pub fn expectation_zz(psi: &StateVector, i: usize, j: usize) -> Result<f64> {
    let sites = psi.sites();
    for s in [i, j] {
        if s >= sites {
            return Err(Error::index("site", s, sites));
        }
    }
    let amps = psi.amplitudes();
    Ok(chunked_sum(amps.len(), Execution::Auto, |k| {
        let p = amps[k].norm_sqr();
        if ((k >> i) ^ (k >> j)) & 1 == 0 {
            p
        } else {
            -p
        }
    }))
}

/// Measured bitstrings keyed site-0-first (`"00100"` = site 2 set).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CountsWire", into = "CountsWire")]
pub struct CountsTable {
    sites: usize,
    shots: u64,
    counts: BTreeMap<String, u64>,
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountsWire {
    shots: u64,
    counts: BTreeMap<String, u64>,
    seed: Option<u64>,
}

impl From<CountsTable> for CountsWire {
    fn from(t: CountsTable) -> Self {
        Self {
            shots: t.shots,
            counts: t.counts,
            seed: t.seed,
        }
    }
}

impl TryFrom<CountsWire> for CountsTable {
    type Error = Error;

    fn try_from(w: CountsWire) -> Result<Self> {
        let sites = w.counts.keys().next().map_or(0, String::len);
        CountsTable::from_counts(sites, w.counts, w.seed).and_then(|t| {
            if t.shots == w.shots {
                Ok(t)
            } else {
                Err(Error::Validation(format!(
                    "shots {} disagrees with count total {}",
                    w.shots, t.shots
                )))
            }
        })
    }
}

impl CountsTable {
    /// Builds a table, checking that every key is a `sites`-bit string.
    pub fn from_counts(sites: usize, counts: BTreeMap<String, u64>, seed: Option<u64>) -> Result<Self> {
        for key in counts.keys() {
            if key.len() != sites {
                return Err(Error::Validation(format!("key '{key}' is not a {sites}-bit string")));
            }
            parse_bitstring(key)?;
        }
        let mut counts = counts;
        counts.retain(|_, n| *n > 0);
        let shots = counts.values().sum();
        Ok(Self {
            sites,
            shots,
            counts,
            seed,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn get(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// `(basis index, count)` pairs.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts
            .iter()
            .map(|(k, &n)| (parse_bitstring(k).expect("validated key"), n))
    }

    /// Fraction of shots with `site` reading 1.
    pub fn marginal_one(&self, site: usize) -> Result<f64> {
        if site >= self.sites {
            return Err(Error::index("site", site, self.sites));
        }
        let ones: u64 = self
            .counts
            .iter()
            .filter(|(k, _)| k.as_bytes()[site] == b'1')
            .map(|(_, &n)| n)
            .sum();
        Ok(ones as f64 / self.shots as f64)
    }

    /// Shot estimator of `<Z_site>`.
    pub fn expectation_z(&self, site: usize) -> Result<f64> {
        Ok(1.0 - 2.0 * self.marginal_one(site)?)
    }

    /// Shot estimator of `<Z_i Z_j>`.
    pub fn expectation_zz(&self, i: usize, j: usize) -> Result<f64> {
        for s in [i, j] {
            if s >= self.sites {
                return Err(Error::index("site", s, self.sites));
            }
        }
        let mut acc = 0i64;
        for (k, &n) in &self.counts {
            let b = k.as_bytes();
            acc += if b[i] == b[j] { n as i64 } else { -(n as i64) };
        }
        Ok(acc as f64 / self.shots as f64)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Draws `shots` computational-basis samples from `|psi|^2`. Deterministic in
/// `seed`.
pub fn sample_counts(psi: &StateVector, shots: u64, seed: u64) -> Result<CountsTable> {
    sample_counts_stream(psi, shots, seed, 0)
}

/// [`sample_counts`] on a chosen generator stream.
pub fn sample_counts_stream(psi: &StateVector, shots: u64, seed: u64, stream: u64) -> Result<CountsTable> {
    if shots == 0 {
        return Err(Error::Validation("shots must be >= 1".into()));
    }
    let mut cumulative = Vec::with_capacity(psi.dim());
    let mut acc = 0.0;
    for a in psi.amplitudes() {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let total = acc;
    let mut r = rng(seed, stream);
    let mut hits: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u = r.random::<f64>() * total;
        let mut k = cumulative.partition_point(|&c| c <= u);
        // Guard against landing past the end through rounding, and skip
        // zero-probability states sitting on a plateau.
        k = k.min(cumulative.len() - 1);
        while psi.amplitudes()[k].norm_sqr() == 0.0 && k > 0 {
            k -= 1;
        }
        *hits.entry(k).or_insert(0) += 1;
    }
    let sites = psi.sites();
    let counts = hits.into_iter().map(|(k, n)| (bitstring(k, sites), n)).collect();
    CountsTable::from_counts(sites, counts, Some(seed))
}
