//! Statevector stand-in for the QPU: gates, initial-state preparation,
//! measurement-basis rotations, exact probability mass functions and seeded
//! shot sampling.

mod qpu;
mod sampling;
mod state;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{Axis, CompiledTerm, MeasurementFamily};

pub use qpu::StatevectorQpu;
pub use sampling::{exact_sampleset, sample, stream_seed, SampleMode, SampleSet, PROBABILITY_FLOOR};
pub use state::{apply_gate, pmf, prepare_initial_state, StateVector};

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    X,
    H,
    Z,
    /// √X
    SX,
    /// `(I − iσx)/√2`: rotation by π/2 about x.
    #[serde(rename = "RX90")]
    Rx90,
    /// `(I + iσy)/√2`: rotation by −π/2 about y.
    #[serde(rename = "RY-90")]
    RyMinus90,
    CX,
}

impl GateKind {
    /// Single-qubit matrix in the `|0⟩, |1⟩` basis. `None` for CX.
    pub fn matrix(self) -> Option<Matrix2> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let s = FRAC_1_SQRT_2;
        Some(match self {
            GateKind::X => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
            GateKind::H => [[c(s, 0.), c(s, 0.)], [c(s, 0.), c(-s, 0.)]],
            GateKind::Z => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
            GateKind::SX => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
            GateKind::Rx90 => [[c(s, 0.), c(0., -s)], [c(0., -s), c(s, 0.)]],
            GateKind::RyMinus90 => [[c(s, 0.), c(s, 0.)], [c(-s, 0.), c(s, 0.)]],
            GateKind::CX => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateOp {
    pub gate: GateKind,
    pub target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<usize>,
}

impl GateOp {
    pub fn single(gate: GateKind, target: usize) -> Self {
        Self { gate, target, control: None }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self { gate: GateKind::CX, target, control: Some(control) }
    }

    pub fn validate(&self, qubits: usize) -> Result<()> {
        for pos in std::iter::once(self.target).chain(self.control) {
            if pos >= qubits {
                return Err(Error::QubitOutOfRange { position: pos, qubits });
            }
        }
        match (self.gate, self.control) {
            (GateKind::CX, None) => Err(Error::InvalidGate("CX needs a control qubit".into())),
            (GateKind::CX, Some(c)) if c == self.target => {
                Err(Error::InvalidGate("control and target coincide".into()))
            }
            (GateKind::CX, Some(_)) => Ok(()),
            (_, Some(_)) => Err(Error::InvalidGate(format!("{:?} takes no control", self.gate))),
            (_, None) => Ok(()),
        }
    }
}

/// Ordered gate list on a `qubits`-wide register.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub qubits: usize,
    pub gates: Vec<GateOp>,
}

impl CircuitSpec {
    pub fn new(qubits: usize) -> Self {
        Self { qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: GateOp) -> Result<&mut Self> {
        gate.validate(self.qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.qubits))
    }

    /// Hadamard on every qubit: the uniform superposition.
    pub fn hadamard_layer(qubits: usize) -> Self {
        Self {
            qubits,
            gates: (0..qubits).map(|q| GateOp::single(GateKind::H, q)).collect(),
        }
    }

    /// X on the listed positions: a single Fock state.
    pub fn basis_state(qubits: usize, occupied: &[usize]) -> Result<Self> {
        let mut c = Self::new(qubits);
        for &q in occupied {
            c.push(GateOp::single(GateKind::X, q))?;
        }
        Ok(c)
    }
}

/// Basis change for measurement family `m` of a compiled term: `R_y` where
/// `m_q = x`, `R_x` where `m_q = y`, nothing on unaffected qubits.
pub fn rotation_circuit(term: &CompiledTerm, m: &MeasurementFamily) -> Result<CircuitSpec> {
    rotation_for(term.partition.len(), term.partition.affected(), m)
}

pub(crate) fn rotation_for(qubits: usize, affected: &[usize], m: &MeasurementFamily) -> Result<CircuitSpec> {
    if m.len() != affected.len() {
        return Err(Error::InvalidMeasurementFamily(m.to_string()));
    }
    let mut c = CircuitSpec::new(qubits);
    for (&q, &axis) in affected.iter().zip(m.axes()) {
        let gate = match axis {
            Axis::X => GateKind::RyMinus90,
            Axis::Y => GateKind::Rx90,
        };
        c.push(GateOp::single(gate, q))?;
    }
    Ok(c)
}
