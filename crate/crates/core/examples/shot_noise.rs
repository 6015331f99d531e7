//! How finite sampling perturbs the energy estimate. The spread over seeds
//! should shrink like one over the square root of the shot count.

use cvqe::prelude::*;

fn estimator_for(h: &Hamiltonian, mode: SampleMode, shots: u64, seed: u64) -> anyhow::Result<CascadeEstimator> {
    let compiled = h.compile();
    let plan = build_plan(&h.indexing, &compiled);
    let initial = CircuitSpec::hadamard_layer(4);
    let qpu = StatevectorQpu::new(initial.clone())?;
    let archive = collect_archive(&qpu, &plan, mode, shots, seed, content_hash(h, &initial, &plan))?;
    Ok(CascadeEstimator::new(&compiled, &plan, &archive)?)
}

fn main() -> anyhow::Result<()> {
    let h = Hamiltonian::two_site_hubbard(-0.158, 1.0);
    let ansatz = BlochSinglet;
    let theta = [0.6, 0.3];
    let exact = estimator_for(&h, SampleMode::Exact, 1, 0)?.energy(&ansatz, &theta)?;
    println!("exact energy at θ = {theta:?}: {exact:.6}");

    for shots in [100u64, 1_000, 10_000, 100_000] {
        let energies = (0..20)
            .map(|seed| estimator_for(&h, SampleMode::Shot, shots, seed)?.energy(&ansatz, &theta).map_err(Into::into))
            .collect::<anyhow::Result<Vec<f64>>>()?;
        let mean = energies.iter().sum::<f64>() / energies.len() as f64;
        let std = (energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (energies.len() - 1) as f64).sqrt();
        println!(
            "S={shots:>6}  mean={mean:+.5}  bias={:+.1e}  std={std:.2e}  std·√S={:.3}",
            mean - exact,
            std * (shots as f64).sqrt()
        );
    }
    Ok(())
}
