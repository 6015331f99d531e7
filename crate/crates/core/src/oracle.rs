//! Brute-force references for small systems: dense Hamiltonian matrices built
//! by applying ladder operators with their exchange signs, Rayleigh quotients
//! of explicit ansatz states, and exact diagonalization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::ansatz::Ansatz;
use crate::circuits::{GateKind, StateVector};
use crate::error::{Error, Result};
use crate::fock::OccupationFamily;
use crate::hamiltonian::{Axis, CompiledTerm, Hamiltonian};

/// Largest mode count accepted for dense matrices.
pub const MAX_DENSE_MODES: usize = 14;

pub type DenseOperator = DMatrix<Complex64>;

/// Apply `c_q` (or `c†_q`) to the basis state `bits` over `q_len` modes.
/// Returns the new state and the sign `(−1)^{# occupied modes before q}`, or
/// `None` when the state is annihilated.
fn apply_ladder(bits: u64, q_len: usize, q: usize, create: bool) -> Option<(u64, f64)> {
    let mask = 1u64 << (q_len - 1 - q);
    let occupied = bits & mask != 0;
    if occupied == create {
        return None;
    }
    let before = bits >> (q_len - q);
    let sign = if before.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((bits ^ mask, sign))
}

/// `⟨n'|Ĥ|n⟩` for every pair of basis states. Each term is read as
/// `h · c†_{a₁} c†_{a₂} … c_{b₂} c_{b₁}` with `a₁ < a₂ < …` and `b₁ < b₂ < …`,
/// and acts right to left.
pub fn dense_hamiltonian(h: &Hamiltonian) -> Result<DenseOperator> {
    let q = h.num_modes();
    if q > MAX_DENSE_MODES {
        return Err(Error::TooLarge { qubits: q, limit: MAX_DENSE_MODES });
    }
    let dim = 1usize << q;
    let mut m = DMatrix::zeros(dim, dim);
    for term in &h.terms {
        // rightmost operator first: annihilations by ascending mode, then
        // creations by descending mode
        let mut ops: Vec<(usize, bool)> = (0..q).filter(|&p| term.annihilate.get(p)).map(|p| (p, false)).collect();
        ops.extend((0..q).rev().filter(|&p| term.create.get(p)).map(|p| (p, true)));
        for col in 0..dim as u64 {
            let mut state = Some((col, 1.0));
            for &(p, create) in &ops {
                state = state.and_then(|(b, s)| apply_ladder(b, q, p, create).map(|(b2, s2)| (b2, s * s2)));
            }
            if let Some((row, s)) = state {
                m[(row as usize, col as usize)] += term.coeff * s;
            }
        }
    }
    Ok(m)
}

/// `‖M − M†‖∞` (largest entry magnitude).
pub fn hermiticity_defect(m: &DenseOperator) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `|Φ⟩ = Σ_n e^{iλ_n(θ)} Ψ0_n |n⟩`, with excluded families dropped.
pub fn ansatz_state(ansatz: &dyn Ansatz, theta: &[f64], psi0: &StateVector) -> Result<DVector<Complex64>> {
    if ansatz.modes() != psi0.qubits() {
        return Err(Error::LengthMismatch { expected: ansatz.modes(), found: psi0.qubits() });
    }
    let q = psi0.qubits();
    let amps = psi0
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            if a == Complex64::new(0.0, 0.0) {
                return Ok(a);
            }
            let n = OccupationFamily::from_index(i as u64, q)?;
            Ok(ansatz.lambda(theta, &n)?.amplitude_factor() * a)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(amps))
}

/// `⟨Φ|H|Φ⟩ / ⟨Φ|Φ⟩` against a prebuilt dense matrix.
pub fn rayleigh_quotient(m: &DenseOperator, phi: &DVector<Complex64>) -> Result<f64> {
    if m.ncols() != phi.len() {
        return Err(Error::LengthMismatch { expected: m.ncols(), found: phi.len() });
    }
    let norm = phi.norm_squared();
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::DegenerateNormalization);
    }
    Ok(phi.dotc(&(m * phi)).re / norm)
}

pub fn exact_ansatz_energy(h: &Hamiltonian, ansatz: &dyn Ansatz, theta: &[f64], psi0: &StateVector) -> Result<f64> {
    if h.num_modes() != psi0.qubits() {
        return Err(Error::LengthMismatch { expected: h.num_modes(), found: psi0.qubits() });
    }
    rayleigh_quotient(&dense_hamiltonian(h)?, &ansatz_state(ansatz, theta, psi0)?)
}

fn lowest_eigenvalue(m: DenseOperator) -> Result<f64> {
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if hermiticity_defect(&m) > 1e-12 * scale {
        return Err(Error::NonHermitian);
    }
    if m.is_empty() {
        return Err(Error::InvalidConfig("empty sector".into()));
    }
    let eig = m.symmetric_eigenvalues();
    Ok(eig.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Smallest eigenvalue over the whole Fock space.
pub fn ground_state_energy(h: &Hamiltonian) -> Result<f64> {
    lowest_eigenvalue(dense_hamiltonian(h)?)
}

/// Smallest eigenvalue within the span of the basis states selected by
/// `in_sector` (for example a fixed particle number).
pub fn sector_ground_energy(h: &Hamiltonian, in_sector: impl Fn(&OccupationFamily) -> bool) -> Result<f64> {
    let full = dense_hamiltonian(h)?;
    let q = h.num_modes();
    let keep: Vec<usize> = (0..full.ncols())
        .filter(|&i| in_sector(&OccupationFamily::from_index(i as u64, q).expect("in range")))
        .collect();
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |r, c| full[(keep[r], keep[c])]);
    lowest_eigenvalue(sub)
}

fn kron(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    a.kronecker(b)
}

fn single(m: [[Complex64; 2]; 2]) -> DenseOperator {
    DMatrix::from_fn(2, 2, |r, c| m[r][c])
}

/// The product of a term's ladder operators restricted to its affected
/// modes, as a `2^Q̇` matrix with the first affected mode most significant.
/// No exchange signs enter: each factor acts on its own qubit.
pub fn affected_ladder_operator(term: &CompiledTerm) -> DenseOperator {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let raise = single([[z, z], [o, z]]);
    let lower = single([[z, o], [z, z]]);
    term.partition
        .affected()
        .iter()
        .fold(DMatrix::from_element(1, 1, o), |acc, &p| {
            let f = if term.term.create.get(p) { &raise } else { &lower };
            kron(&acc, f)
        })
}

/// `2^{-Q̇} Σ_m V_m R_m† D R_m`, built from the gate matrices used by the
/// measurement circuits.
pub fn pauli_reconstruction(term: &CompiledTerm) -> Result<DenseOperator> {
    let k = term.affected_count();
    let dim = 1usize << k;
    let sigma_z = single([
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
    ]);
    let ry = single(GateKind::RyMinus90.matrix().expect("single-qubit gate"));
    let rx = single(GateKind::Rx90.matrix().expect("single-qubit gate"));
    let one = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    let d = (0..k).fold(one.clone(), |acc, _| kron(&acc, &sigma_z));
    let mut sum = DMatrix::zeros(dim, dim);
    for m in &term.measurement_families {
        let r = m.axes().iter().fold(one.clone(), |acc, a| {
            kron(&acc, match a {
                Axis::X => &ry,
                Axis::Y => &rx,
            })
        });
        let v = term.expansion_coefficient(m)?;
        sum += (r.adjoint() * &d * &r) * v;
    }
    Ok(sum / Complex64::new(dim as f64, 0.0))
}
