//! End-to-end runs driven by a JSON run configuration: sample once, archive,
//! then optimize, scan energy surfaces and cross-check against the dense
//! oracle, all from the same archive.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ansatz::{Ansatz, AnsatzConfig};
use crate::circuits::{CircuitSpec, SampleMode, StatevectorQpu};
use crate::error::{Error, Result};
use crate::estimator::{build_plan, collect_archive, content_hash, CascadeEstimator, MeasurementPlan, SampleArchive};
use crate::formats::{read_archive, read_hamiltonian, write_archive};
use crate::hamiltonian::{CompiledTerm, Hamiltonian};
use crate::optimizer::{optimize, CascadeObjective, OptimizationTrace, OptimizerConfig};
use crate::oracle;

pub const ARCHIVE_FILE: &str = "archive.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SURFACE_FILE: &str = "surface.csv";
pub const PATH_FILE: &str = "path.csv";
pub const VERIFY_FILE: &str = "verify.json";

/// Largest estimator-versus-oracle deviation accepted by `verify` in exact mode.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl AxisRange {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => (0..n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// Rectangular grid over a two-parameter ansatz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub axes: [AxisRange; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Hamiltonian JSON-lines file, relative to the config file.
    pub hamiltonian: PathBuf,
    pub initial_circuit: CircuitSpec,
    pub ansatz: AnsatzConfig,
    pub mode: SampleMode,
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    pub optimizer: OptimizerConfig,
    pub out: PathBuf,
    #[serde(default)]
    pub verify: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSpec>,
    /// Particle number of the sector used for the reference ground energy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particle_number: Option<u32>,
}

impl RunConfig {
    /// Read a config file; relative Hamiltonian paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
        if cfg.hamiltonian.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.hamiltonian = dir.join(&cfg.hamiltonian);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == SampleMode::Shot {
            match (self.shots, self.seed) {
                (Some(s), Some(_)) if s >= 1 => {}
                _ => return Err(Error::InvalidConfig("shot mode needs `shots` ≥ 1 and a `seed`".into())),
            }
        }
        self.initial_circuit.validate()?;
        self.optimizer.validate()
    }

    pub fn archive_path(&self) -> PathBuf {
        self.out.join(ARCHIVE_FILE)
    }
}

/// Everything derived from a config that does not need samples.
pub struct Problem {
    pub hamiltonian: Hamiltonian,
    pub compiled: Vec<CompiledTerm>,
    pub plan: MeasurementPlan,
    pub content_hash: String,
    pub ansatz: Box<dyn Ansatz>,
}

impl Problem {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let hamiltonian = read_hamiltonian(&cfg.hamiltonian)?;
        Self::new(hamiltonian, &cfg.initial_circuit, &cfg.ansatz)
    }

    pub fn new(hamiltonian: Hamiltonian, initial: &CircuitSpec, ansatz: &AnsatzConfig) -> Result<Self> {
        if initial.qubits != hamiltonian.num_modes() {
            return Err(Error::LengthMismatch { expected: hamiltonian.num_modes(), found: initial.qubits });
        }
        if !hamiltonian.validate_hermitian() {
            return Err(Error::NonHermitian);
        }
        let compiled = hamiltonian.compile();
        let plan = build_plan(&hamiltonian.indexing, &compiled);
        let content_hash = content_hash(&hamiltonian, initial, &plan);
        let ansatz = ansatz.build(&hamiltonian.indexing)?;
        Ok(Self { hamiltonian, compiled, plan, content_hash, ansatz })
    }

    pub fn estimator(&self, archive: &SampleArchive) -> Result<CascadeEstimator> {
        archive.check_against(&self.plan, &self.content_hash)?;
        CascadeEstimator::new(&self.compiled, &self.plan, archive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub archive: PathBuf,
    pub circuits: usize,
    pub shots_per_circuit: u64,
    pub total_shots: u64,
}

/// Build the plan, run every circuit once, and write the archive.
pub fn run_sample(cfg: &RunConfig) -> Result<(SampleReport, SampleArchive)> {
    let problem = Problem::from_config(cfg)?;
    let qpu = StatevectorQpu::new(cfg.initial_circuit.clone())?;
    let archive = collect_archive(
        &qpu,
        &problem.plan,
        cfg.mode,
        cfg.shots.unwrap_or(1),
        cfg.seed.unwrap_or(0),
        problem.content_hash.clone(),
    )?;
    fs::create_dir_all(&cfg.out)?;
    let path = cfg.archive_path();
    write_archive(&path, &archive)?;
    Ok((
        SampleReport {
            archive: path,
            circuits: archive.samples.len(),
            shots_per_circuit: archive.provenance.shots,
            total_shots: archive.total_shots(),
        },
        archive,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSummary {
    pub status: String,
    pub iterations: usize,
    pub theta_rad: Vec<f64>,
    pub theta_deg: Vec<f64>,
    pub energy: f64,
    pub gradient_norm: f64,
    pub mode: SampleMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub points: usize,
    /// Largest `|E_estimator − E_oracle|` over the checked points.
    pub max_deviation: f64,
    pub ground_energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector_ground_energy: Option<f64>,
    /// Lowest estimator energy minus the tightest reference ground energy.
    pub variational_gap: f64,
    pub passed: bool,
}

fn load_archive(cfg: &RunConfig, archive: Option<&Path>) -> Result<SampleArchive> {
    let path = archive.map(Path::to_path_buf).unwrap_or_else(|| cfg.archive_path());
    read_archive(&path)
}

/// Optimize over an existing archive and write the trace and summary.
pub fn run_optimize(cfg: &RunConfig, archive: Option<&Path>) -> Result<(OptimizeSummary, OptimizationTrace)> {
    let problem = Problem::from_config(cfg)?;
    let archive = load_archive(cfg, archive)?;
    let est = problem.estimator(&archive)?;
    let trace = optimize(&CascadeObjective { estimator: &est, ansatz: problem.ansatz.as_ref() }, &cfg.optimizer)?;
    let last = trace
        .last()
        .ok_or_else(|| Error::InvalidConfig("optimizer produced no iterations".into()))?;

    fs::create_dir_all(&cfg.out)?;
    write_trace(&cfg.out.join(TRACE_FILE), &est, problem.ansatz.as_ref(), &trace)?;
    let verify = if cfg.verify {
        let points: Vec<Vec<f64>> = trace.records.iter().map(|r| r.theta.clone()).collect();
        Some(verify_points(cfg, &problem, &est, &archive, &points)?)
    } else {
        None
    };
    let summary = OptimizeSummary {
        status: match &trace.status {
            crate::optimizer::TraceStatus::Converged => "converged".into(),
            crate::optimizer::TraceStatus::MaxIterations => "max_iterations".into(),
            crate::optimizer::TraceStatus::Error(e) => format!("error: {e}"),
        },
        iterations: trace.iterations(),
        theta_rad: last.theta.clone(),
        theta_deg: last.theta.iter().map(|t| t.to_degrees()).collect(),
        energy: last.energy,
        gradient_norm: last.gradient_norm(),
        mode: archive.provenance.mode,
        verify,
    };
    fs::write(cfg.out.join(SUMMARY_FILE), serde_json::to_string_pretty(&summary)?)?;
    Ok((summary, trace))
}

fn write_trace(path: &Path, est: &CascadeEstimator, ansatz: &dyn Ansatz, trace: &OptimizationTrace) -> Result<()> {
    let d = ansatz.dim();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["k".to_string()];
    header.extend((0..d).map(|j| format!("theta{j}_rad")));
    header.extend((0..d).map(|j| format!("theta{j}_deg")));
    header.extend(["lambda", "upsilon_re", "upsilon_im", "energy"].map(String::from));
    header.extend((0..d).map(|j| format!("grad{j}")));
    header.push("clipped".into());
    w.write_record(&header)?;
    for r in &trace.records {
        let ev = est.evaluate(ansatz, &r.theta, false)?;
        let mut row = vec![r.k.to_string()];
        row.extend(r.theta.iter().map(|t| t.to_string()));
        row.extend(r.theta.iter().map(|t| t.to_degrees().to_string()));
        row.extend([ev.lambda, ev.upsilon.re, ev.upsilon.im, r.energy].map(|x| x.to_string()));
        row.extend(r.gradient.iter().map(|g| g.to_string()));
        row.push(r.clipped.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub grid: PathBuf,
    pub path: PathBuf,
    pub cells: usize,
    pub min_energy: f64,
}

/// Energy on a rectangular grid plus the descent path, both as CSV.
pub fn run_surface(cfg: &RunConfig, archive: Option<&Path>, grid: Option<&SurfaceSpec>) -> Result<SurfaceReport> {
    let problem = Problem::from_config(cfg)?;
    let ansatz = problem.ansatz.as_ref();
    if ansatz.dim() != 2 {
        return Err(Error::InvalidConfig(format!("surface scans need a 2-parameter ansatz, got {}", ansatz.dim())));
    }
    let spec = grid
        .or(cfg.surface.as_ref())
        .ok_or_else(|| Error::InvalidConfig("no surface grid given".into()))?;
    let domain = ansatz.domain();
    for &a in &[spec.axes[0].lo, spec.axes[0].hi] {
        for &b in &[spec.axes[1].lo, spec.axes[1].hi] {
            domain.check(&[a, b])?;
        }
    }
    let archive = load_archive(cfg, archive)?;
    let est = problem.estimator(&archive)?;

    fs::create_dir_all(&cfg.out)?;
    let grid_path = cfg.out.join(SURFACE_FILE);
    let mut w = csv::Writer::from_path(&grid_path)?;
    w.write_record(["i", "j", "theta0_rad", "theta0_deg", "theta1_rad", "theta1_deg", "energy"])?;
    let (xs, ys) = (spec.axes[0].values(), spec.axes[1].values());
    let mut min_energy = f64::INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let e = est.energy(ansatz, &[x, y])?;
            min_energy = min_energy.min(e);
            w.write_record([
                i.to_string(),
                j.to_string(),
                x.to_string(),
                x.to_degrees().to_string(),
                y.to_string(),
                y.to_degrees().to_string(),
                e.to_string(),
            ])?;
        }
    }
    w.flush()?;

    let trace = optimize(&CascadeObjective { estimator: &est, ansatz }, &cfg.optimizer)?;
    let path_path = cfg.out.join(PATH_FILE);
    let mut w = csv::Writer::from_path(&path_path)?;
    w.write_record(["k", "theta0_rad", "theta0_deg", "theta1_rad", "theta1_deg", "energy"])?;
    for r in &trace.records {
        w.write_record([
            r.k.to_string(),
            r.theta[0].to_string(),
            r.theta[0].to_degrees().to_string(),
            r.theta[1].to_string(),
            r.theta[1].to_degrees().to_string(),
            r.energy.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(SurfaceReport { grid: grid_path, path: path_path, cells: xs.len() * ys.len(), min_energy })
}

/// Compare estimator energies along the optimization path with the dense
/// oracle and check the variational bound. Writes `verify.json`.
pub fn run_verify(cfg: &RunConfig, archive: Option<&Path>) -> Result<VerifyReport> {
    let problem = Problem::from_config(cfg)?;
    let archive = load_archive(cfg, archive)?;
    let est = problem.estimator(&archive)?;
    let trace = optimize(&CascadeObjective { estimator: &est, ansatz: problem.ansatz.as_ref() }, &cfg.optimizer)?;
    let points: Vec<Vec<f64>> = trace.records.iter().map(|r| r.theta.clone()).collect();
    let report = verify_points(cfg, &problem, &est, &archive, &points)?;
    fs::create_dir_all(&cfg.out)?;
    fs::write(cfg.out.join(VERIFY_FILE), serde_json::to_string_pretty(&report)?)?;
    Ok(report)
}

fn verify_points(
    cfg: &RunConfig,
    problem: &Problem,
    est: &CascadeEstimator,
    archive: &SampleArchive,
    points: &[Vec<f64>],
) -> Result<VerifyReport> {
    let h = &problem.hamiltonian;
    let ansatz = problem.ansatz.as_ref();
    let psi0 = crate::circuits::prepare_initial_state(&cfg.initial_circuit)?;
    let dense = oracle::dense_hamiltonian(h)?;
    let mut max_deviation: f64 = 0.0;
    let mut lowest = f64::INFINITY;
    for theta in points {
        let e = est.energy(ansatz, theta)?;
        let reference = oracle::rayleigh_quotient(&dense, &oracle::ansatz_state(ansatz, theta, &psi0)?)?;
        max_deviation = max_deviation.max((e - reference).abs());
        lowest = lowest.min(e);
    }
    let ground_energy = oracle::ground_state_energy(h)?;
    let sector_ground_energy = cfg
        .particle_number
        .map(|n| oracle::sector_ground_energy(h, |f| f.occupation() == n))
        .transpose()?;
    let reference = sector_ground_energy.unwrap_or(ground_energy);
    let variational_gap = lowest - reference;
    let passed = match archive.provenance.mode {
        SampleMode::Exact => max_deviation <= VERIFY_TOLERANCE && variational_gap >= -VERIFY_TOLERANCE,
        SampleMode::Shot => true,
    };
    Ok(VerifyReport {
        points: points.len(),
        max_deviation,
        ground_energy,
        sector_ground_energy,
        variational_gap,
        passed,
    })
}
