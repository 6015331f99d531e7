use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::state::{pmf, StateVector};
use crate::error::{Error, Result};
use crate::fock::OccupationFamily;

/// Outcomes with smaller probability are dropped from exact sample sets.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Shot,
    Exact,
}

/// Recorded outcomes of one circuit. In shot mode the weights are counts
/// summing to `shots`; in exact mode they are probabilities and `shots` is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub circuit_key: String,
    pub mode: SampleMode,
    pub shots: u64,
    pub entries: Vec<(OccupationFamily, f64)>,
}

impl SampleSet {
    /// The `S` in `(1/S) Σ_s`.
    pub fn normalizer(&self) -> f64 {
        self.shots as f64
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum()
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ArchiveMismatch(format!("{}: {msg}", self.circuit_key)));
        if let Some(len) = self.entries.first().map(|(n, _)| n.len()) {
            if self.entries.iter().any(|(n, _)| n.len() != len) {
                return bad("outcomes of different widths".into());
            }
        }
        if self.entries.iter().any(|&(_, w)| !(w >= 0.0 && w.is_finite())) {
            return bad("negative or non-finite weight".into());
        }
        match self.mode {
            SampleMode::Shot => {
                if self.shots == 0 {
                    return bad("zero shots".into());
                }
                if self.entries.iter().any(|&(_, w)| w.fract() != 0.0) {
                    return bad("fractional shot count".into());
                }
                if self.total_weight() != self.shots as f64 {
                    return bad(format!("counts sum to {} not {}", self.total_weight(), self.shots));
                }
            }
            SampleMode::Exact => {
                if self.shots != 1 {
                    return bad("exact sample sets carry unit total weight".into());
                }
                if (self.total_weight() - 1.0).abs() > 1e-12 {
                    return bad(format!("probabilities sum to {}", self.total_weight()));
                }
            }
        }
        Ok(())
    }
}

/// Per-circuit RNG seed derived from the master seed and the circuit key, so
/// results do not depend on the order circuits run in.
pub fn stream_seed(master_seed: u64, circuit_key: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update(circuit_key.as_bytes());
    let digest = h.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    seed
}

/// Draw `shots` outcomes i.i.d. from the PMF of `state` (inverse CDF with a
/// binary search per shot) and record them as counts.
pub fn sample(circuit_key: &str, state: &StateVector, shots: u64, master_seed: u64) -> Result<SampleSet> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shot count must be at least 1".into()));
    }
    let probs = pmf(state);
    let dist = WeightedIndex::new(&probs)
        .map_err(|e| Error::InvalidConfig(format!("state has no valid distribution: {e}")))?;
    let mut rng = ChaCha8Rng::from_seed(stream_seed(master_seed, circuit_key));
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(dist.sample(&mut rng)).or_default() += 1;
    }
    let q = state.qubits();
    Ok(SampleSet {
        circuit_key: circuit_key.to_string(),
        mode: SampleMode::Shot,
        shots,
        entries: counts
            .into_iter()
            .map(|(i, c)| (OccupationFamily::from_index(i as u64, q).expect("in range"), c as f64))
            .collect(),
    })
}

/// Every outcome above [`PROBABILITY_FLOOR`] weighted by its probability.
pub fn exact_sampleset(circuit_key: &str, state: &StateVector) -> SampleSet {
    let q = state.qubits();
    SampleSet {
        circuit_key: circuit_key.to_string(),
        mode: SampleMode::Exact,
        shots: 1,
        entries: pmf(state)
            .into_iter()
            .enumerate()
            .filter(|&(_, p)| p > PROBABILITY_FLOOR)
            .map(|(i, p)| (OccupationFamily::from_index(i as u64, q).expect("in range"), p))
            .collect(),
    }
}
