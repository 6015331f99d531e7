//! Inspect which basis-rotation circuits a Hamiltonian needs. Terms that
//! act on the same modes share circuits, and diagonal terms ride on the
//! baseline measurement.

use cvqe::prelude::*;

fn main() -> anyhow::Result<()> {
    let h = Hamiltonian::two_site_hubbard(-0.158, 1.0);
    let compiled = h.compile();
    for (l, term) in h.terms.iter().enumerate() {
        println!("term {l}: {}  ({} affected modes)", term.describe(&h.indexing), compiled[l].affected_count());
    }

    let plan = build_plan(&h.indexing, &compiled);
    println!("\n{} circuits:", plan.len());
    for (key, entry) in &plan.entries {
        let served: Vec<String> = entry.uses.iter().map(|(l, m)| format!("{l}/{m}")).collect();
        println!("  {key:<12} serves {}", if served.is_empty() { "normalization".into() } else { served.join(" ") });
    }
    let rotation = plan.rotation("0u:x,1u:y")?;
    println!("\nrotation for 0u:x,1u:y: {}", serde_json::to_string(&rotation)?);
    Ok(())
}
