//! Unramified extensions of growing residue degree: the normalized masses
//! concentrate on the multiplicity-one components of minimal weight.
//!
//! Run: `cargo run --example unramified_limit`

use std::path::Path;

use skelmeas::convergence::{simulate_measure, Regime};
use skelmeas::{load_model, rint, ExtensionParams, SncModel};

fn main() -> skelmeas::Result<()> {
    let base = load_model(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/two_component.toml"))?;
    for q in [2, 3, 5] {
        // same combinatorics over a residue field of characteristic q
        let m = SncModel { p: q, q: Some(q), ..base.clone() }.validated()?;
        for f in [1, 2, 5, 10, 20] {
            let sim = simulate_measure(&m, ExtensionParams::new(1, f), q, Regime::Unramified)?;
            let masses: Vec<String> = sim
                .atoms
                .iter()
                .map(|a| Ok(sim.normalized(a).value(&rint(q))?.exact_or_decimal()))
                .collect::<skelmeas::Result<_>>()?;
            println!("q = {q}, f = {f:>2}: masses {masses:?}");
        }
    }
    Ok(())
}
