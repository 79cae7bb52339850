//! Exact simulation of the normalized measures on the Tate triangle and their
//! distance to the stable Lebesgue measure over a grid of extensions.
//!
//! Run: `cargo run --example simulate_tate`

use skelmeas::convergence::{convergence_report, default_family, simulate_measure, Regime};
use skelmeas::{builtin_model, rint, ExtensionParams};

fn main() -> skelmeas::Result<()> {
    let m = builtin_model("tate_triangle", 2, Some(2))?;
    let sim = simulate_measure(&m, ExtensionParams::new(1, 1), 2, Regime::LogSmooth)?;
    println!("e = f = 1: {} atoms, total {}", sim.atoms.len(), sim.raw_total().value(&rint(2))?);

    let seq: Vec<u64> = (1..=8).collect();
    let rep = convergence_report(&m, &seq, &seq, 2, &default_family(&m), Regime::LogSmooth)?;
    for r in rep.rows.iter().filter(|r| r.e == r.f) {
        println!("e = f = {}: normalized total {}, D = {}", r.e, r.normalized_total, r.distance);
    }
    println!("D non-increasing in f: {}", rep.monotone_in_f());
    Ok(())
}
