//! Plug a hand-written phase ansatz into the cascade. Each occupation pattern
//! gets the phase `θ · (number of occupied modes)`, so the ansatz only
//! shifts relative phases between particle-number sectors.

use cvqe::fock::OccupationFamily;
use cvqe::prelude::*;
use num_complex::Complex64;

fn main() -> anyhow::Result<()> {
    let ansatz = FnAnsatz::new(
        "number_phase",
        4,
        ParameterDomain::unbounded(1),
        |theta: &[f64], n: &OccupationFamily| Ok(LambdaValue::Value(Complex64::new(theta[0] * n.occupation() as f64, 0.0))),
        |_: &[f64], n: &OccupationFamily| Ok(vec![Complex64::new(n.occupation() as f64, 0.0)]),
    );

    let h = Hamiltonian::two_site_hubbard(-0.158, 1.0);
    let compiled = h.compile();
    let plan = build_plan(&h.indexing, &compiled);
    let initial = CircuitSpec::hadamard_layer(4);
    let qpu = StatevectorQpu::new(initial.clone())?;
    let archive = collect_archive(&qpu, &plan, SampleMode::Exact, 1, 0, content_hash(&h, &initial, &plan))?;
    let estimator = CascadeEstimator::new(&compiled, &plan, &archive)?;

    // number-conserving H is blind to sector phases
    for theta in [0.0, 0.7, 2.1] {
        let ev = estimator.evaluate(&ansatz, &[theta], true)?;
        println!("θ={theta:.1}  E={:+.6}  ∇E={:+.1e}", ev.energy, ev.grad_energy[0]);
    }
    Ok(())
}
