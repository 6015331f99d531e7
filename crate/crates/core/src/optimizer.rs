//! Classical parameter updates `θ_{k+1} = θ_k + f[∇E(θ_k), …]`. Gradient
//! descent is the only method shipped.

use serde::{Deserialize, Serialize};

use crate::ansatz::{Ansatz, ParameterDomain};
use crate::error::{Error, Result};
use crate::estimator::CascadeEstimator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerMethod {
    #[default]
    GradientDescent,
}

/// Step sizes `γ_k`. A schedule repeats its last entry once exhausted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepSize {
    Constant(f64),
    Schedule(Vec<f64>),
}

impl StepSize {
    pub fn at(&self, k: usize) -> f64 {
        match self {
            StepSize::Constant(g) => *g,
            StepSize::Schedule(gs) => gs[k.min(gs.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            StepSize::Constant(g) => *g > 0.0 && g.is_finite(),
            StepSize::Schedule(gs) => !gs.is_empty() && gs.iter().all(|g| *g > 0.0 && g.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("step sizes must be positive and finite".into()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    #[serde(default)]
    pub method: OptimizerMethod,
    #[serde(default = "default_step")]
    pub step: StepSize,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Bound on `‖θ_{k+1} − θ_k‖` in radians.
    #[serde(default = "default_tol")]
    pub param_tol: f64,
    /// Bound on `|E_{k+1} − E_k|` relative to `|E_{k+1}|`.
    #[serde(default = "default_tol")]
    pub energy_tol: f64,
    pub theta0: Vec<f64>,
}

fn default_step() -> StepSize {
    StepSize::Constant(1.0)
}

fn default_max_iterations() -> usize {
    200
}

fn default_tol() -> f64 {
    1e-6
}

impl OptimizerConfig {
    pub fn new(theta0: Vec<f64>) -> Self {
        Self {
            method: OptimizerMethod::GradientDescent,
            step: default_step(),
            max_iterations: default_max_iterations(),
            param_tol: default_tol(),
            energy_tol: default_tol(),
            theta0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.step.validate()?;
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.param_tol > 0.0 && self.energy_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.theta0.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("theta0 must be finite".into()));
        }
        Ok(())
    }
}

/// Something to minimize: energy and gradient at a point, plus the domain.
pub trait Objective {
    fn domain(&self) -> ParameterDomain;

    fn energy_and_gradient(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)>;
}

/// The cascade energy of an ansatz over a fixed sample archive.
pub struct CascadeObjective<'a> {
    pub estimator: &'a CascadeEstimator,
    pub ansatz: &'a dyn Ansatz,
}

impl Objective for CascadeObjective<'_> {
    fn domain(&self) -> ParameterDomain {
        self.ansatz.domain()
    }

    fn energy_and_gradient(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let ev = self.estimator.evaluate(self.ansatz, theta, true)?;
        Ok((ev.energy, ev.grad_energy))
    }
}

/// An objective from a pair of closures.
pub struct FnObjective<E, G> {
    pub domain: ParameterDomain,
    pub energy: E,
    pub gradient: G,
}

impl<E, G> Objective for FnObjective<E, G>
where
    E: Fn(&[f64]) -> Result<f64>,
    G: Fn(&[f64]) -> Result<Vec<f64>>,
{
    fn domain(&self) -> ParameterDomain {
        self.domain.clone()
    }

    fn energy_and_gradient(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        Ok(((self.energy)(theta)?, (self.gradient)(theta)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub theta: Vec<f64>,
    pub energy: f64,
    pub gradient: Vec<f64>,
    /// The update that produced this point left the domain and was clipped.
    pub clipped: bool,
}

impl IterationRecord {
    pub fn gradient_norm(&self) -> f64 {
        norm(&self.gradient)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "message")]
pub enum TraceStatus {
    Converged,
    MaxIterations,
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub records: Vec<IterationRecord>,
    pub status: TraceStatus,
}

impl OptimizationTrace {
    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.k)
    }

    pub fn converged(&self) -> bool {
        self.status == TraceStatus::Converged
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// True when the last two records moved less than both tolerances.
pub fn check_convergence(tail: &[IterationRecord], config: &OptimizerConfig) -> bool {
    let [.., prev, cur] = tail else {
        return false;
    };
    let step: Vec<f64> = cur.theta.iter().zip(&prev.theta).map(|(a, b)| a - b).collect();
    norm(&step) <= config.param_tol && (cur.energy - prev.energy).abs() <= config.energy_tol * cur.energy.abs()
}

/// Run the configured method.
pub fn optimize(objective: &dyn Objective, config: &OptimizerConfig) -> Result<OptimizationTrace> {
    match config.method {
        OptimizerMethod::GradientDescent => gradient_descent(objective, config),
    }
}

/// `θ_{k+1} = θ_k − γ_k ∇E(θ_k)`, projected back into the domain.
///
/// Configuration problems are returned as errors. Failures while evaluating
/// the objective end the trace with an error status instead, keeping the
/// iterations that succeeded.
pub fn gradient_descent(objective: &dyn Objective, config: &OptimizerConfig) -> Result<OptimizationTrace> {
    config.validate()?;
    let domain = objective.domain();
    domain.check(&config.theta0)?;

    let mut records: Vec<IterationRecord> = Vec::new();
    let mut theta = config.theta0.clone();
    let mut clipped = false;
    for k in 0..=config.max_iterations {
        let (energy, gradient) = match objective.energy_and_gradient(&theta) {
            Ok(v) => v,
            Err(e) => return Ok(OptimizationTrace { records, status: TraceStatus::Error(e.to_string()) }),
        };
        records.push(IterationRecord { k, theta: theta.clone(), energy, gradient, clipped });
        let cur = records.last().expect("just pushed");

        if cur.gradient.iter().all(|&g| g == 0.0) || check_convergence(&records, config) {
            return Ok(OptimizationTrace { records, status: TraceStatus::Converged });
        }
        if k == config.max_iterations {
            break;
        }
        let gamma = config.step.at(k);
        let next: Vec<f64> = cur.theta.iter().zip(&cur.gradient).map(|(t, g)| t - gamma * g).collect();
        (theta, clipped) = domain.project(&next);
    }
    Ok(OptimizationTrace { records, status: TraceStatus::MaxIterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::Bound;

    fn quadratic(center: f64) -> impl Objective {
        FnObjective {
            domain: ParameterDomain::unbounded(2),
            energy: move |t: &[f64]| Ok((t[0] - center).powi(2) + 2.0 * t[1] * t[1] + 1.0),
            gradient: move |t: &[f64]| Ok(vec![2.0 * (t[0] - center), 4.0 * t[1]]),
        }
    }

    #[test]
    fn zero_gradient_converges_immediately() {
        let trace = gradient_descent(&quadratic(0.0), &OptimizerConfig::new(vec![0.0, 0.0])).unwrap();
        assert!(trace.converged());
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.iterations(), 0);
    }

    #[test]
    fn descends_a_quadratic() {
        let mut cfg = OptimizerConfig::new(vec![3.0, 1.0]);
        cfg.step = StepSize::Constant(0.2);
        let trace = gradient_descent(&quadratic(1.0), &cfg).unwrap();
        assert!(trace.converged());
        let last = trace.last().unwrap();
        assert!((last.theta[0] - 1.0).abs() < 1e-5 && last.theta[1].abs() < 1e-5);
        assert!(trace.records.windows(2).all(|w| w[1].energy <= w[0].energy));
        assert!(trace.records.windows(2).all(|w| w[1].k == w[0].k + 1));
    }

    #[test]
    fn stops_at_the_iteration_cap() {
        let mut cfg = OptimizerConfig::new(vec![3.0, 1.0]);
        cfg.step = StepSize::Constant(0.01);
        cfg.max_iterations = 5;
        let trace = gradient_descent(&quadratic(1.0), &cfg).unwrap();
        assert_eq!(trace.status, TraceStatus::MaxIterations);
        assert_eq!(trace.records.len(), 6);
    }

    #[test]
    fn clips_to_open_bounds() {
        let obj = FnObjective {
            domain: ParameterDomain { bounds: vec![Bound::Open { lo: -1.0, hi: 1.0 }] },
            energy: |t: &[f64]| Ok(-t[0]),
            gradient: |_: &[f64]| Ok(vec![-1.0]),
        };
        let mut cfg = OptimizerConfig::new(vec![0.5]);
        cfg.max_iterations = 3;
        let trace = gradient_descent(&obj, &cfg).unwrap();
        assert!(trace.records[1].clipped);
        assert!(trace.records[1].theta[0] < 1.0);
        assert!(trace.converged(), "a clipped point stops moving");
    }

    #[test]
    fn objective_errors_end_the_trace() {
        let obj = FnObjective {
            domain: ParameterDomain::unbounded(1),
            energy: |t: &[f64]| if t[0] > 1.5 { Err(Error::DegenerateNormalization) } else { Ok(-t[0]) },
            gradient: |_: &[f64]| Ok(vec![-1.0]),
        };
        let trace = gradient_descent(&obj, &OptimizerConfig::new(vec![0.0])).unwrap();
        assert_eq!(trace.records.len(), 2);
        assert!(matches!(trace.status, TraceStatus::Error(_)));
    }

    #[test]
    fn config_validation() {
        let mut cfg = OptimizerConfig::new(vec![0.0, 0.0]);
        cfg.step = StepSize::Constant(0.0);
        assert!(gradient_descent(&quadratic(1.0), &cfg).is_err());
        let mut cfg = OptimizerConfig::new(vec![0.0, 0.0]);
        cfg.max_iterations = 0;
        assert!(cfg.validate().is_err());
        assert!(gradient_descent(&quadratic(1.0), &OptimizerConfig::new(vec![0.0])).is_err());
    }

    #[test]
    fn convergence_check() {
        let cfg = OptimizerConfig::new(vec![0.0]);
        let rec = |theta: f64, energy: f64| IterationRecord {
            k: 0,
            theta: vec![theta],
            energy,
            gradient: vec![0.1],
            clipped: false,
        };
        assert!(check_convergence(&[rec(1.0, -0.5), rec(1.0, -0.5)], &cfg));
        assert!(!check_convergence(&[rec(1.0, -0.5)], &cfg));
        // the first Hubbard step, 0 → 35.1077°
        assert!(!check_convergence(&[rec(0.0, 0.184), rec(35.1077f64.to_radians(), -0.0395)], &cfg));
        assert!(!check_convergence(&[rec(1.0, -0.5), rec(1.0 + 1e-5, -0.5)], &cfg));
    }

    #[test]
    fn schedules_and_config_json() {
        let s = StepSize::Schedule(vec![1.0, 0.5]);
        assert_eq!((s.at(0), s.at(1), s.at(7)), (1.0, 0.5, 0.5));
        let cfg: OptimizerConfig = serde_json::from_str(r#"{"theta0":[0.0,0.0]}"#).unwrap();
        assert_eq!(cfg, OptimizerConfig::new(vec![0.0, 0.0]));
        let cfg: OptimizerConfig =
            serde_json::from_str(r#"{"method":"gradient_descent","step":[1.0,0.5],"theta0":[0.1]}"#).unwrap();
        assert_eq!(cfg.step, StepSize::Schedule(vec![1.0, 0.5]));
    }
}
