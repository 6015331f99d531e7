use std::sync::atomic::{AtomicUsize, Ordering};

use super::sampling::{exact_sampleset, sample, SampleMode, SampleSet};
use super::state::{prepare_initial_state, StateVector};
use super::CircuitSpec;
use crate::error::{Error, Result};

/// Simulated device that prepares a fixed initial state and runs
/// measurement-basis rotations on it. Counts executions so callers can check
/// that the optimization loop never goes back to the device.
#[derive(Debug)]
pub struct StatevectorQpu {
    initial: CircuitSpec,
    prepared: StateVector,
    executions: AtomicUsize,
}

impl StatevectorQpu {
    pub fn new(initial: CircuitSpec) -> Result<Self> {
        let prepared = prepare_initial_state(&initial)?;
        Ok(Self { initial, prepared, executions: AtomicUsize::new(0) })
    }

    pub fn qubits(&self) -> usize {
        self.initial.qubits
    }

    pub fn initial_circuit(&self) -> &CircuitSpec {
        &self.initial
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.prepared
    }

    /// Apply `rotation` to the prepared state and sample it.
    pub fn execute(
        &self,
        circuit_key: &str,
        rotation: &CircuitSpec,
        mode: SampleMode,
        shots: u64,
        seed: u64,
    ) -> Result<SampleSet> {
        if rotation.qubits != self.qubits() {
            return Err(Error::LengthMismatch { expected: self.qubits(), found: rotation.qubits });
        }
        let mut state = self.prepared.clone();
        state.run(rotation)?;
        self.executions.fetch_add(1, Ordering::Relaxed);
        match mode {
            SampleMode::Shot => sample(circuit_key, &state, shots, seed),
            SampleMode::Exact => Ok(exact_sampleset(circuit_key, &state)),
        }
    }

    pub fn executions(&self) -> usize {
        self.executions.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{GateKind, GateOp};

    #[test]
    fn counts_executions() {
        let qpu = StatevectorQpu::new(CircuitSpec::hadamard_layer(2)).unwrap();
        let mut rot = CircuitSpec::new(2);
        rot.push(GateOp::single(GateKind::RyMinus90, 0)).unwrap();
        let set = qpu.execute("r", &rot, SampleMode::Exact, 0, 0).unwrap();
        assert_eq!(qpu.executions(), 1);
        // qubit 0 is rotated back to |0⟩, qubit 1 stays uniform
        assert_eq!(set.entries.len(), 2);
        assert!(set.entries.iter().all(|(n, _)| !n.get(0)));
        qpu.execute("r", &rot, SampleMode::Shot, 10, 0).unwrap();
        assert_eq!(qpu.executions(), 2);
        assert!(qpu.execute("r", &CircuitSpec::new(3), SampleMode::Exact, 1, 0).is_err());
    }
}
