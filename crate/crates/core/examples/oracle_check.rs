//! Cross-check the cascade estimator against a dense statevector calculation
//! on a random three-mode Hamiltonian with a Jastrow-Gutzwiller ansatz.

use cvqe::circuits::{prepare_initial_state, GateKind, GateOp};
use cvqe::fock::SystemIndexing;
use cvqe::oracle;
use cvqe::prelude::*;
use num_complex::Complex64;

fn main() -> anyhow::Result<()> {
    let idx = SystemIndexing::new(["a", "b", "c"])?;
    let mut h = Hamiltonian::new(idx.clone());
    let hop = Complex64::new(-0.4, 0.25);
    h.push(InteractionTerm::from_operators(&idx, hop, &["a"], &["c"])?)?;
    h.push(InteractionTerm::from_operators(&idx, hop.conj(), &["c"], &["a"])?)?;
    h.push(InteractionTerm::from_operators(&idx, Complex64::new(0.8, 0.0), &["a", "b"], &["b", "a"])?)?;
    h.push(InteractionTerm::from_operators(&idx, Complex64::new(-0.3, 0.0), &["b"], &["b"])?)?;

    let mut initial = CircuitSpec::new(3);
    initial.push(GateOp::single(GateKind::H, 0))?;
    initial.push(GateOp::single(GateKind::Rx90, 1))?;
    initial.push(GateOp::cx(0, 2))?;
    initial.push(GateOp::single(GateKind::SX, 2))?;

    let compiled = h.compile();
    let plan = build_plan(&h.indexing, &compiled);
    let qpu = StatevectorQpu::new(initial.clone())?;
    let archive = collect_archive(&qpu, &plan, SampleMode::Exact, 1, 0, content_hash(&h, &initial, &plan))?;
    let estimator = CascadeEstimator::new(&compiled, &plan, &archive)?;
    let ansatz = JastrowGutzwiller::all_pairs(3)?;
    let psi0 = prepare_initial_state(&initial)?;

    println!("{} parameters, {} circuits", ansatz.dim(), plan.len());
    for step in 0..5 {
        let theta: Vec<f64> = (0..ansatz.dim()).map(|j| 0.3 * ((step * 7 + j) as f64).sin()).collect();
        let cascade = estimator.energy(&ansatz, &theta)?;
        let dense = oracle::exact_ansatz_energy(&h, &ansatz, &theta, &psi0)?;
        println!("cascade {cascade:+.12}  dense {dense:+.12}  Δ {:.1e}", (cascade - dense).abs());
    }
    println!("ground state energy: {:.6}", oracle::ground_state_energy(&h)?);
    Ok(())
}
