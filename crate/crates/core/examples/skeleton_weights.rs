//! Weight functions, the Kontsevich–Soibelman skeleton and its temperate part
//! for the Kodaira fibers.
//!
//! Run: `cargo run --example skeleton_weights`

use skelmeas::builtin_model;
use skelmeas::exactcore::fmt_rat;
use skelmeas::skeleton::{ks_skeleton, min_weight, temperate_part, vertex_weight};

fn main() -> skelmeas::Result<()> {
    for (name, p) in [("kodaira_IV", 3), ("kodaira_IV", 5), ("kodaira_Istar(1)", 2), ("kodaira_Istar(1)", 3)] {
        let m = builtin_model(name, p, None)?;
        let ks = ks_skeleton(&m);
        let tp = temperate_part(&m, &ks);
        println!("{name}, p = {p}");
        for (j, c) in m.components.iter().enumerate() {
            println!("  wt({}) = {}", c.id, fmt_rat(&vertex_weight(&m, j)));
        }
        println!("  min weight {}", fmt_rat(&min_weight(&m)));
        println!("  Sk(X,θ)   dim {:>2}: {:?}", ks.dim(), ks.labels(&m));
        println!("  Sk^t(X,θ) dim {:>2}: {:?}", tp.dim(), tp.labels(&m));
    }
    Ok(())
}
