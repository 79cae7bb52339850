//! Enumerating the (1/e)ℤ-integral points of a skeleton with their weights.
//!
//! Run: `cargo run --example lattice_points`

use skelmeas::builtin_model;
use skelmeas::skeleton::{lattice_points, weight_at};
use skelmeas::SubComplex;

fn main() -> skelmeas::Result<()> {
    let m = builtin_model("kodaira_IV", 2, None)?;
    for e in 1..=6 {
        let pts = lattice_points(&m, &SubComplex::full(&m), e);
        println!("e = {e}: {} points", pts.len());
        for x in pts.iter().filter(|x| m.stratum_label(x.face) == "E0+L1") {
            println!("  {:<24} weight {}", x.label(&m), weight_at(&m, x)?);
        }
    }
    Ok(())
}
