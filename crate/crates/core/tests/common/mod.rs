#![allow(dead_code)]

use cvqe::circuits::{prepare_initial_state, CircuitSpec, GateKind, GateOp, SampleMode, StatevectorQpu};
use cvqe::estimator::{build_plan, collect_archive, content_hash, CascadeEstimator};
use cvqe::fock::{OccupationFamily, SystemIndexing};
use cvqe::hamiltonian::{Hamiltonian, InteractionTerm};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;

pub const T: f64 = -0.158;
pub const U: f64 = 1.0;

pub fn random_family<R: Rng>(rng: &mut R, q: usize, k: usize) -> OccupationFamily {
    sample(rng, q, k)
        .into_iter()
        .fold(OccupationFamily::vacuum(q), |n, p| n.with(p, true))
}

/// Random hermitian Hamiltonian of number-conserving one- and two-body
/// terms. Every off-diagonal term is paired with its adjoint.
pub fn random_hamiltonian<R: Rng>(rng: &mut R, q: usize, terms: usize) -> Hamiltonian {
    let indexing = SystemIndexing::numbered(q).unwrap();
    let mut h = Hamiltonian::new(indexing);
    for _ in 0..terms {
        let body = if q >= 2 && rng.random_bool(0.5) { 2 } else { 1 };
        let create = random_family(rng, q, body);
        let annihilate = random_family(rng, q, body);
        let coeff = if create == annihilate {
            Complex64::new(rng.random_range(-1.0..1.0), 0.0)
        } else {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        };
        h.push(InteractionTerm::new(coeff, create, annihilate).unwrap()).unwrap();
        if create != annihilate {
            h.push(InteractionTerm::new(coeff.conj(), annihilate, create).unwrap()).unwrap();
        }
    }
    h
}

/// A random circuit dense enough to give every basis state a generic
/// complex amplitude.
pub fn random_circuit<R: Rng>(rng: &mut R, q: usize, layers: usize) -> CircuitSpec {
    let singles = [GateKind::H, GateKind::SX, GateKind::Rx90, GateKind::RyMinus90, GateKind::X, GateKind::Z];
    let mut c = CircuitSpec::new(q);
    for _ in 0..layers {
        for t in 0..q {
            c.push(GateOp::single(singles[rng.random_range(0..singles.len())], t)).unwrap();
        }
        if q >= 2 {
            let ctl = rng.random_range(0..q);
            let tgt = (ctl + rng.random_range(1..q)) % q;
            c.push(GateOp::cx(ctl, tgt)).unwrap();
        }
    }
    c
}

pub struct ExactSetup {
    pub qpu: StatevectorQpu,
    pub estimator: CascadeEstimator,
    pub circuits: usize,
}

pub fn exact_setup(h: &Hamiltonian, initial: &CircuitSpec) -> ExactSetup {
    setup(h, initial, SampleMode::Exact, 0, 0)
}

pub fn setup(h: &Hamiltonian, initial: &CircuitSpec, mode: SampleMode, shots: u64, seed: u64) -> ExactSetup {
    let compiled = h.compile();
    let plan = build_plan(&h.indexing, &compiled);
    let qpu = StatevectorQpu::new(initial.clone()).unwrap();
    let archive = collect_archive(&qpu, &plan, mode, shots, seed, content_hash(h, initial, &plan)).unwrap();
    let estimator = CascadeEstimator::new(&compiled, &plan, &archive).unwrap();
    ExactSetup { qpu, estimator, circuits: plan.len() }
}

pub fn hubbard_exact() -> ExactSetup {
    exact_setup(&Hamiltonian::two_site_hubbard(T, U), &CircuitSpec::hadamard_layer(4))
}

/// `2t cos φ cos ϕ + (U/2)(1 − sin φ)`.
pub fn closed_form_energy(polar: f64, azimuth: f64) -> f64 {
    2.0 * T * polar.cos() * azimuth.cos() + U / 2.0 * (1.0 - polar.sin())
}

/// `1/(4 cos φ)`.
pub fn closed_form_normalization(polar: f64) -> f64 {
    1.0 / (4.0 * polar.cos())
}

/// `(t/2) cos ϕ + (U/8) cot(π/4 + φ/2)`.
pub fn closed_form_upsilon(polar: f64, azimuth: f64) -> f64 {
    T / 2.0 * azimuth.cos() + U / 8.0 / (std::f64::consts::FRAC_PI_4 + polar / 2.0).tan()
}

pub fn initial_state(c: &CircuitSpec) -> cvqe::circuits::StateVector {
    prepare_initial_state(c).unwrap()
}
