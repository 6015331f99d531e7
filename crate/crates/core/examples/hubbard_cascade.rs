//! Sample the two-site Hubbard dimer once, then descend to the ground state
//! without touching the simulator again.
//!
//! ```bash
//! cargo run --example hubbard_cascade
//! ```

use cvqe::prelude::*;

fn main() -> anyhow::Result<()> {
    let h = Hamiltonian::two_site_hubbard(-0.158, 1.0);
    let compiled = h.compile();
    let plan = build_plan(&h.indexing, &compiled);
    let initial = CircuitSpec::hadamard_layer(4);
    let qpu = StatevectorQpu::new(initial.clone())?;

    let hash = content_hash(&h, &initial, &plan);
    let archive = collect_archive(&qpu, &plan, SampleMode::Exact, 1, 0, hash)?;
    let estimator = CascadeEstimator::new(&compiled, &plan, &archive)?;
    println!("{} circuits executed, {} distinct outcomes", qpu.executions(), estimator.distinct_families());

    let ansatz = BlochSinglet;
    let trace = gradient_descent(
        &CascadeObjective { estimator: &estimator, ansatz: &ansatz },
        &OptimizerConfig::new(vec![0.0, 0.0]),
    )?;
    for r in &trace.records {
        println!(
            "k={:>2}  polar={:>9.4}°  azimuth={:>8.4}°  E={:+.7}",
            r.k,
            r.theta[0].to_degrees(),
            r.theta[1].to_degrees(),
            r.energy
        );
    }
    let last = trace.last().expect("at least one iterate");
    println!("status {:?} after {} steps, E* = {:.6}", trace.status, trace.iterations(), last.energy);
    println!("circuits executed in total: {}", qpu.executions());
    Ok(())
}
