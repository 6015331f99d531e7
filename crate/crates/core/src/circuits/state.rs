use num_complex::Complex64;

use super::{CircuitSpec, GateKind, GateOp};
use crate::error::{Error, Result};
use crate::fock::{OccupationFamily, MAX_MODES};

/// `2^Q` amplitudes indexed by the big-endian family index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`
    pub fn vacuum(qubits: usize) -> Result<Self> {
        if qubits > 30.min(MAX_MODES) {
            return Err(Error::TooLarge { qubits, limit: 30 });
        }
        let mut amplitudes = vec![Complex64::default(); 1 << qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits, amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidConfig(format!("{len} amplitudes is not a power of two")));
        }
        Ok(Self { qubits: len.trailing_zeros() as usize, amplitudes })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: &OccupationFamily) -> Complex64 {
        self.amplitudes[n.index() as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.qubits)?;
        let t = 1usize << (self.qubits - 1 - gate.target);
        match gate.gate.matrix() {
            Some(m) => {
                for i0 in 0..self.amplitudes.len() {
                    if i0 & t != 0 {
                        continue;
                    }
                    let i1 = i0 | t;
                    let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
                    self.amplitudes[i0] = m[0][0] * a0 + m[0][1] * a1;
                    self.amplitudes[i1] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
            None => {
                debug_assert_eq!(gate.gate, GateKind::CX);
                let c = 1usize << (self.qubits - 1 - gate.control.expect("validated"));
                for i0 in 0..self.amplitudes.len() {
                    if i0 & c != 0 && i0 & t == 0 {
                        self.amplitudes.swap(i0, i0 | t);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn run(&mut self, circuit: &CircuitSpec) -> Result<()> {
        if circuit.qubits != self.qubits {
            return Err(Error::LengthMismatch { expected: self.qubits, found: circuit.qubits });
        }
        circuit.gates.iter().try_for_each(|g| self.apply(g))
    }
}

pub fn apply_gate(state: &StateVector, gate: &GateOp) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// `|Ψ0⟩ = Û|0…0⟩`.
pub fn prepare_initial_state(spec: &CircuitSpec) -> Result<StateVector> {
    let mut s = StateVector::vacuum(spec.qubits)?;
    s.run(spec)?;
    Ok(s)
}

pub fn pmf(state: &StateVector) -> Vec<f64> {
    state.amplitudes.iter().map(|a| a.norm_sqr()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::rotation_circuit;
    use crate::hamiltonian::{Axis, Hamiltonian};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> StateVector {
        prepare_initial_state(&CircuitSpec::hadamard_layer(1)).unwrap()
    }

    #[test]
    fn hadamard_on_vacuum() {
        let s = plus();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - c(r, 0.)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(r, 0.)).norm() < 1e-15);
    }

    #[test]
    fn ry_takes_plus_to_zero() {
        let s = apply_gate(&plus(), &GateOp::single(GateKind::RyMinus90, 0)).unwrap();
        assert!((s.amplitudes()[0] - c(1., 0.)).norm() < 1e-15);
        assert!(s.amplitudes()[1].norm() < 1e-15);
    }

    #[test]
    fn rx_multiplies_plus_by_a_phase() {
        let s = apply_gate(&plus(), &GateOp::single(GateKind::Rx90, 0)).unwrap();
        let phase = c(1., -1.) / 2f64.sqrt();
        let p = plus();
        for i in 0..2 {
            assert!((s.amplitudes()[i] - phase * p.amplitudes()[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn preparations() {
        let u = prepare_initial_state(&CircuitSpec::hadamard_layer(4)).unwrap();
        assert!(u.amplitudes().iter().all(|a| (a - c(0.25, 0.)).norm() < 1e-15));

        let b = prepare_initial_state(&CircuitSpec::basis_state(4, &[0, 3]).unwrap()).unwrap();
        assert_eq!(b.amplitudes()[9], c(1., 0.));
        assert_eq!(pmf(&b).iter().filter(|&&p| p > 0.0).count(), 1);

        let v = prepare_initial_state(&CircuitSpec::new(4)).unwrap();
        assert_eq!(v.amplitudes()[0], c(1., 0.));
    }

    #[test]
    fn cx_entangles() {
        let mut spec = CircuitSpec::new(2);
        spec.push(GateOp::single(GateKind::H, 0)).unwrap();
        spec.push(GateOp::cx(0, 1)).unwrap();
        let p = pmf(&prepare_initial_state(&spec).unwrap());
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[3] - 0.5).abs() < 1e-15);
        assert_eq!(p[1] + p[2], 0.0);
    }

    #[test]
    fn uniform_pmf() {
        let p = pmf(&prepare_initial_state(&CircuitSpec::hadamard_layer(4)).unwrap());
        assert!(p.iter().all(|&x| (x - 1.0 / 16.0).abs() < 1e-15));
    }

    /// Closed-form PMF of a rotated uniform state:
    /// `2^{-Q⃗} Π_{q affected} δ(n_q,0)^{δ(m_q,x)} · 2^{-δ(m_q,y)}`.
    #[test]
    fn rotated_uniform_pmf_matches_closed_form() {
        let h = Hamiltonian::two_site_hubbard(-0.158, 1.0);
        let ct = &h.compile()[0];
        let psi0 = prepare_initial_state(&CircuitSpec::hadamard_layer(4)).unwrap();
        for m in &ct.measurement_families {
            let mut s = psi0.clone();
            s.run(&rotation_circuit(ct, m).unwrap()).unwrap();
            let p = pmf(&s);
            for i in 0..16u64 {
                let n = OccupationFamily::from_index(i, 4).unwrap();
                let mut expected = 1.0 / 4.0;
                for (&q, &axis) in ct.partition.affected().iter().zip(m.axes()) {
                    expected *= match axis {
                        Axis::X => f64::from(!n.get(q)),
                        Axis::Y => 0.5,
                    };
                }
                assert!((p[i as usize] - expected).abs() < 1e-15, "{m} {n}");
            }
        }
    }

    #[test]
    fn out_of_range_gate() {
        let s = StateVector::vacuum(2).unwrap();
        assert!(matches!(
            apply_gate(&s, &GateOp::single(GateKind::X, 2)),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    fn arb_gate(q: usize) -> impl Strategy<Value = GateOp> {
        let kinds = prop_oneof![
            Just(GateKind::X),
            Just(GateKind::H),
            Just(GateKind::Z),
            Just(GateKind::SX),
            Just(GateKind::Rx90),
            Just(GateKind::RyMinus90),
            Just(GateKind::CX),
        ];
        (kinds, 0..q, 1..q).prop_map(move |(g, t, off)| {
            if g == GateKind::CX {
                GateOp::cx((t + off) % q, t)
            } else {
                GateOp::single(g, t)
            }
        })
    }

    proptest! {
        #[test]
        fn gates_preserve_norm(gates in prop::collection::vec(arb_gate(4), 0..40)) {
            let spec = CircuitSpec { qubits: 4, gates };
            let s = prepare_initial_state(&spec).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
