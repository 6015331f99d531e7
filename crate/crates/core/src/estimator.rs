//! The classical half of the cascade. A [`MeasurementPlan`] lists the
//! circuits to run once; the resulting [`SampleArchive`] is folded into a
//! [`CascadeEstimator`] that evaluates `Λ(θ)`, `Υ(θ)`, `E(θ)` and their
//! gradients for any `θ` without touching the device again.

use indexmap::IndexMap;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ansatz::{Ansatz, LambdaValue};
use crate::circuits::{rotation_for, CircuitSpec, SampleMode, SampleSet, StatevectorQpu};
use crate::error::{Error, Result};
use crate::fock::{OccupationFamily, SystemIndexing};
use crate::hamiltonian::{CompiledTerm, Hamiltonian, MeasurementFamily};

pub const BASELINE_KEY: &str = "baseline";

/// One circuit of the plan: a basis rotation on a set of affected modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub affected: Vec<usize>,
    pub family: MeasurementFamily,
    /// `(term index, measurement-family index)` pairs served by this circuit.
    pub uses: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub qubits: usize,
    pub baseline_key: String,
    pub entries: IndexMap<String, PlanEntry>,
}

fn circuit_key(indexing: &SystemIndexing, affected: &[usize], family: &MeasurementFamily) -> String {
    if affected.is_empty() {
        return BASELINE_KEY.to_string();
    }
    affected
        .iter()
        .zip(family.axes())
        .map(|(&p, a)| format!("{}:{}", indexing.label(p), a.as_char()))
        .collect::<Vec<_>>()
        .join(",")
}

/// Collapse every `(term, measurement family)` pair onto the distinct
/// circuits it needs. The baseline circuit comes first and is always present.
pub fn build_plan(indexing: &SystemIndexing, compiled: &[CompiledTerm]) -> MeasurementPlan {
    let mut entries = IndexMap::new();
    entries.insert(
        BASELINE_KEY.to_string(),
        PlanEntry { affected: Vec::new(), family: MeasurementFamily::default(), uses: Vec::new() },
    );
    for (l, ct) in compiled.iter().enumerate() {
        let affected = ct.partition.affected();
        for (mi, m) in ct.measurement_families.iter().enumerate() {
            entries
                .entry(circuit_key(indexing, affected, m))
                .or_insert_with(|| PlanEntry { affected: affected.to_vec(), family: m.clone(), uses: Vec::new() })
                .uses
                .push((l, mi));
        }
    }
    MeasurementPlan { qubits: indexing.len(), baseline_key: BASELINE_KEY.to_string(), entries }
}

impl MeasurementPlan {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rotation(&self, key: &str) -> Result<CircuitSpec> {
        let e = self.entries.get(key).ok_or_else(|| Error::MissingSampleSet(key.to_string()))?;
        rotation_for(self.qubits, &e.affected, &e.family)
    }
}

/// How an archive was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub mode: SampleMode,
    /// Shots per circuit; 1 in exact mode.
    pub shots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Fingerprint of the Hamiltonian, initial circuit and plan.
    pub content_hash: String,
}

/// Everything measured on the device, keyed by circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleArchive {
    pub provenance: Provenance,
    pub samples: IndexMap<String, SampleSet>,
}

impl SampleArchive {
    pub fn total_shots(&self) -> u64 {
        self.provenance.shots * self.samples.len() as u64
    }

    /// Reject archives recorded for a different problem or plan.
    pub fn check_against(&self, plan: &MeasurementPlan, content_hash: &str) -> Result<()> {
        if self.provenance.content_hash != content_hash {
            return Err(Error::ArchiveMismatch(format!(
                "content hash {} does not match expected {content_hash}",
                self.provenance.content_hash
            )));
        }
        self.check_complete(plan)
    }

    fn check_complete(&self, plan: &MeasurementPlan) -> Result<()> {
        for key in plan.entries.keys() {
            let set = self.samples.get(key).ok_or_else(|| Error::MissingSampleSet(key.clone()))?;
            set.check()?;
            if set.mode != self.provenance.mode {
                return Err(Error::ArchiveMismatch(format!("{key}: mode differs from archive")));
            }
            if set.shots != self.provenance.shots {
                return Err(Error::ArchiveMismatch(format!(
                    "{key}: {} shots but the archive records {}",
                    set.shots, self.provenance.shots
                )));
            }
            if set.entries.iter().any(|(n, _)| n.len() != plan.qubits) {
                return Err(Error::ArchiveMismatch(format!("{key}: outcome width differs from {}", plan.qubits)));
            }
        }
        Ok(())
    }
}

/// SHA-256 over the mode labels, terms (exact bit patterns), initial circuit
/// and plan keys.
pub fn content_hash(h: &Hamiltonian, initial: &CircuitSpec, plan: &MeasurementPlan) -> String {
    let mut d = Sha256::new();
    d.update(h.indexing.labels().join(" ").as_bytes());
    for t in &h.terms {
        d.update(format!(
            "\n{:016x} {:016x} {} {}",
            t.coeff.re.to_bits(),
            t.coeff.im.to_bits(),
            t.create,
            t.annihilate
        ));
    }
    d.update(b"\n");
    d.update(serde_json::to_vec(initial).expect("circuits serialize"));
    for key in plan.entries.keys() {
        d.update(b"\n");
        d.update(key.as_bytes());
    }
    hex::encode(d.finalize())
}

/// Run every plan circuit once on the device. Circuits are independent and
/// execute in parallel; each has its own seeded stream.
pub fn collect_archive(
    qpu: &StatevectorQpu,
    plan: &MeasurementPlan,
    mode: SampleMode,
    shots: u64,
    seed: u64,
    content_hash: String,
) -> Result<SampleArchive> {
    if qpu.qubits() != plan.qubits {
        return Err(Error::LengthMismatch { expected: plan.qubits, found: qpu.qubits() });
    }
    if mode == SampleMode::Shot && shots == 0 {
        return Err(Error::InvalidConfig("shot mode needs at least one shot per circuit".into()));
    }
    let sets = plan
        .entries
        .par_iter()
        .map(|(key, _)| qpu.execute(key, &plan.rotation(key)?, mode, shots, seed))
        .collect::<Result<Vec<_>>>()?;
    let (shots, seed) = match mode {
        SampleMode::Shot => (shots, Some(seed)),
        SampleMode::Exact => (1, None),
    };
    Ok(SampleArchive {
        provenance: Provenance { mode, shots, seed, content_hash },
        samples: sets.into_iter().map(|s| (s.circuit_key.clone(), s)).collect(),
    })
}

/// `Λ`, `Υ`, `E` and gradients at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub upsilon: Complex64,
    pub energy: f64,
    /// Empty unless gradients were requested.
    pub grad_lambda: Vec<f64>,
    pub grad_upsilon: Vec<Complex64>,
    pub grad_energy: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct PairContribution {
    coeff: Complex64,
    plus: usize,
    minus: usize,
}

/// Sample-derived sums with all `θ`-independent factors folded in.
///
/// Each distinct family appearing in the sums gets an id; the `λ` values are
/// computed once per id per evaluation. Contributions sharing the same
/// `(ṅ⁺ n⃗, ṅ⁻ n⃗)` pair are merged, in first-seen order.
#[derive(Debug, Clone)]
pub struct CascadeEstimator {
    qubits: usize,
    families: Vec<OccupationFamily>,
    normalization: Vec<(usize, f64)>,
    pairs: Vec<PairContribution>,
}

impl CascadeEstimator {
    pub fn new(compiled: &[CompiledTerm], plan: &MeasurementPlan, archive: &SampleArchive) -> Result<Self> {
        archive.check_complete(plan)?;
        for (key, e) in &plan.entries {
            for &(l, mi) in &e.uses {
                let ok = compiled
                    .get(l)
                    .and_then(|ct| ct.measurement_families.get(mi))
                    .is_some_and(|m| m == &e.family && compiled[l].partition.affected() == e.affected);
                if !ok {
                    return Err(Error::ArchiveMismatch(format!("plan entry {key} does not fit the Hamiltonian")));
                }
            }
        }
        let norm = archive.provenance.shots as f64;

        let mut ids: IndexMap<u64, usize> = IndexMap::new();
        let mut id_of = |n: OccupationFamily| {
            let next = ids.len();
            *ids.entry(n.index()).or_insert(next)
        };

        let baseline = &archive.samples[&plan.baseline_key];
        let normalization = baseline.entries.iter().map(|&(n, w)| (id_of(n), w / norm)).collect();

        let mut merged: IndexMap<(usize, usize), Complex64> = IndexMap::new();
        for (key, e) in &plan.entries {
            let set = &archive.samples[key];
            for &(l, mi) in &e.uses {
                let ct = &compiled[l];
                let m = &ct.measurement_families[mi];
                for &(n, w) in &set.entries {
                    let u = ct.upsilon_coefficient(m, &n)?;
                    if u == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let plus = id_of(ct.merged(&n, true));
                    let minus = id_of(ct.merged(&n, false));
                    *merged.entry((plus, minus)).or_default() += u * (w / norm);
                }
            }
        }

        let families = ids
            .keys()
            .map(|&i| OccupationFamily::from_index(i, plan.qubits).expect("width checked"))
            .collect();
        Ok(Self {
            qubits: plan.qubits,
            families,
            normalization,
            pairs: merged
                .into_iter()
                .map(|((plus, minus), coeff)| PairContribution { coeff, plus, minus })
                .collect(),
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Number of distinct families whose `λ` is needed per evaluation.
    pub fn distinct_families(&self) -> usize {
        self.families.len()
    }

    /// Number of merged `(ṅ⁺ n⃗, ṅ⁻ n⃗)` contributions to `Υ`.
    pub fn contribution_count(&self) -> usize {
        self.pairs.len()
    }

    fn lambdas(&self, ansatz: &dyn Ansatz, theta: &[f64]) -> Result<Vec<LambdaValue>> {
        if ansatz.modes() != self.qubits {
            return Err(Error::LengthMismatch { expected: self.qubits, found: ansatz.modes() });
        }
        ansatz.domain().check(theta)?;
        self.families.iter().map(|n| ansatz.lambda(theta, n)).collect()
    }

    fn gradients(&self, ansatz: &dyn Ansatz, theta: &[f64], lambdas: &[LambdaValue]) -> Result<Vec<Vec<Complex64>>> {
        self.families
            .iter()
            .zip(lambdas)
            .map(|(n, l)| match l {
                LambdaValue::Excluded => Ok(Vec::new()),
                LambdaValue::Value(_) => ansatz.gradient(theta, n),
            })
            .collect()
    }

    pub fn estimate_lambda(&self, ansatz: &dyn Ansatz, theta: &[f64]) -> Result<f64> {
        let ls = self.lambdas(ansatz, theta)?;
        Ok(self.normalization.iter().map(|&(id, c)| c * ls[id].weight()).sum())
    }

    pub fn estimate_upsilon(&self, ansatz: &dyn Ansatz, theta: &[f64]) -> Result<Complex64> {
        let ls = self.lambdas(ansatz, theta)?;
        Ok(self.upsilon_from(&ls))
    }

    fn upsilon_from(&self, ls: &[LambdaValue]) -> Complex64 {
        self.pairs
            .iter()
            .filter_map(|p| phase(ls[p.plus], ls[p.minus]).map(|f| p.coeff * f))
            .sum()
    }

    pub fn energy(&self, ansatz: &dyn Ansatz, theta: &[f64]) -> Result<f64> {
        Ok(self.evaluate(ansatz, theta, false)?.energy)
    }

    pub fn grad_lambda(&self, ansatz: &dyn Ansatz, theta: &[f64]) -> Result<Vec<f64>> {
        Ok(self.evaluate_unchecked(ansatz, theta, true)?.grad_lambda)
    }

    pub fn grad_upsilon(&self, ansatz: &dyn Ansatz, theta: &[f64]) -> Result<Vec<Complex64>> {
        Ok(self.evaluate_unchecked(ansatz, theta, true)?.grad_upsilon)
    }

    pub fn grad_energy(&self, ansatz: &dyn Ansatz, theta: &[f64]) -> Result<Vec<f64>> {
        Ok(self.evaluate(ansatz, theta, true)?.grad_energy)
    }

    /// Full evaluation; fails with [`Error::DegenerateNormalization`] when
    /// `Λ̂ = 0`.
    pub fn evaluate(&self, ansatz: &dyn Ansatz, theta: &[f64], with_gradient: bool) -> Result<Evaluation> {
        let ev = self.evaluate_unchecked(ansatz, theta, with_gradient)?;
        if ev.lambda.is_nan() || ev.lambda <= 0.0 {
            return Err(Error::DegenerateNormalization);
        }
        Ok(ev)
    }

    fn evaluate_unchecked(&self, ansatz: &dyn Ansatz, theta: &[f64], with_gradient: bool) -> Result<Evaluation> {
        let ls = self.lambdas(ansatz, theta)?;
        let lambda: f64 = self.normalization.iter().map(|&(id, c)| c * ls[id].weight()).sum();
        let upsilon = self.upsilon_from(&ls);
        let energy = upsilon.re / lambda;
        let mut ev = Evaluation {
            theta: theta.to_vec(),
            lambda,
            upsilon,
            energy,
            grad_lambda: Vec::new(),
            grad_upsilon: Vec::new(),
            grad_energy: Vec::new(),
        };
        if !with_gradient {
            return Ok(ev);
        }

        let d = ansatz.dim();
        let gs = self.gradients(ansatz, theta, &ls)?;
        let mut grad_lambda = vec![0.0; d];
        for &(id, c) in &self.normalization {
            let w = ls[id].weight();
            if w == 0.0 {
                continue;
            }
            for (acc, g) in grad_lambda.iter_mut().zip(&gs[id]) {
                *acc += c * w * (-2.0 * g.im);
            }
        }
        let mut grad_upsilon = vec![Complex64::new(0.0, 0.0); d];
        let i = Complex64::i();
        for p in &self.pairs {
            let Some(f) = phase(ls[p.plus], ls[p.minus]) else { continue };
            let base = p.coeff * f;
            for ((acc, gp), gm) in grad_upsilon.iter_mut().zip(&gs[p.plus]).zip(&gs[p.minus]) {
                *acc += base * (-i * gp.conj() + i * gm);
            }
        }
        ev.grad_energy = grad_upsilon
            .iter()
            .zip(&grad_lambda)
            .map(|(gu, gl)| (lambda * gu.re - upsilon.re * gl) / (lambda * lambda))
            .collect();
        ev.grad_lambda = grad_lambda;
        ev.grad_upsilon = grad_upsilon;
        Ok(ev)
    }
}

/// `e^{-iλ*(n⁺)} e^{iλ(n⁻)}`; `None` when either side is excluded.
fn phase(plus: LambdaValue, minus: LambdaValue) -> Option<Complex64> {
    let (LambdaValue::Value(a), LambdaValue::Value(b)) = (plus, minus) else {
        return None;
    };
    let i = Complex64::i();
    Some((-i * a.conj() + i * b).exp())
}
