//! Tabulate the energy landscape of the Bloch singlet ansatz and compare it
//! with its closed form `2t cos φ cos ϕ + (U/2)(1 − sin φ)`.

use std::f64::consts::PI;

use cvqe::prelude::*;

const T: f64 = -0.158;
const U: f64 = 1.0;

fn main() -> anyhow::Result<()> {
    let h = Hamiltonian::two_site_hubbard(T, U);
    let compiled = h.compile();
    let plan = build_plan(&h.indexing, &compiled);
    let initial = CircuitSpec::hadamard_layer(4);
    let qpu = StatevectorQpu::new(initial.clone())?;
    let archive = collect_archive(&qpu, &plan, SampleMode::Exact, 1, 0, content_hash(&h, &initial, &plan))?;
    let estimator = CascadeEstimator::new(&compiled, &plan, &archive)?;
    let ansatz = BlochSinglet;

    let polar: Vec<f64> = (0..9).map(|i| -1.4 + 2.8 * i as f64 / 8.0).collect();
    let azimuth: Vec<f64> = (0..7).map(|j| -PI + 2.0 * PI * (j + 1) as f64 / 7.0).collect();

    print!("{:>8}", "φ \\ ϕ");
    for a in &azimuth {
        print!("{:>9.1}", a.to_degrees());
    }
    println!();
    let mut worst: f64 = 0.0;
    for &p in &polar {
        print!("{:>8.1}", p.to_degrees());
        for &a in &azimuth {
            let e = estimator.energy(&ansatz, &[p, a])?;
            worst = worst.max((e - (2.0 * T * p.cos() * a.cos() + U / 2.0 * (1.0 - p.sin()))).abs());
            print!("{e:>9.4}");
        }
        println!();
    }
    println!("largest deviation from the closed form: {worst:.2e}");
    Ok(())
}
