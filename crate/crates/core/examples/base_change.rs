//! Normalized base change: new multiplicities, weight scaling and the
//! correspondence between integral points upstairs and (1/e)ℤ-points downstairs.
//!
//! Run: `cargo run --example base_change`

use skelmeas::skeleton::vertex_weight;
use skelmeas::{base_change, builtin_model, lattice_correspondence_check, ExtensionParams};

fn main() -> skelmeas::Result<()> {
    let iv = builtin_model("kodaira_IV", 2, Some(2))?;
    for e in [1, 3, 5, 6] {
        let bc = base_change(&iv, ExtensionParams::new(e, 2))?;
        let mults: Vec<u64> = bc.components.iter().map(|c| c.multiplicity).collect();
        println!(
            "e = {e}: N' = {mults:?}, wt'(E0) = {}, q' = {:?}, correspondence {}",
            vertex_weight(&bc, 0),
            bc.q,
            lattice_correspondence_check(&iv, e)?
        );
    }
    println!("{}", base_change(&iv, ExtensionParams::new(3, 1))?.to_toml()?);
    Ok(())
}
