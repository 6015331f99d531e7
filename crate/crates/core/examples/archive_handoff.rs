//! Split the workflow in two: one process samples and writes the archive,
//! another loads it and optimizes. The archive carries a content hash, so it
//! refuses to pair with a different Hamiltonian.

use cvqe::formats::{read_archive, write_archive};
use cvqe::prelude::*;

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join("cvqe-archive-handoff");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("archive.json");

    let h = Hamiltonian::two_site_hubbard(-0.158, 1.0);
    let initial = CircuitSpec::hadamard_layer(4);
    {
        let plan = build_plan(&h.indexing, &h.compile());
        let qpu = StatevectorQpu::new(initial.clone())?;
        let archive = collect_archive(&qpu, &plan, SampleMode::Shot, 20_000, 99, content_hash(&h, &initial, &plan))?;
        write_archive(&path, &archive)?;
        println!("wrote {} shots over {} circuits to {}", archive.total_shots(), archive.samples.len(), path.display());
    }

    let archive = read_archive(&path)?;
    let compiled = h.compile();
    let plan = build_plan(&h.indexing, &compiled);
    archive.check_against(&plan, &content_hash(&h, &initial, &plan))?;
    let estimator = CascadeEstimator::new(&compiled, &plan, &archive)?;
    let trace = gradient_descent(
        &CascadeObjective { estimator: &estimator, ansatz: &BlochSinglet },
        &OptimizerConfig::new(vec![0.0, 0.0]),
    )?;
    let last = trace.last().expect("at least one iterate");
    println!("shot-mode minimum: E={:.5} at polar {:.3}°", last.energy, last.theta[0].to_degrees());

    let other = Hamiltonian::two_site_hubbard(-0.2, 1.0);
    let other_plan = build_plan(&other.indexing, &other.compile());
    match archive.check_against(&other_plan, &content_hash(&other, &initial, &other_plan)) {
        Err(e) => println!("reusing it for t=-0.2 is rejected: {e}"),
        Ok(()) => println!("unexpectedly accepted"),
    }
    Ok(())
}
