//! Shilov boundaries of the type IV fiber in residue characteristic 3 after
//! ramified extensions: the points approach the central vertex and the scaled
//! measures keep total mass 3 for every tame e. Rows with 3 | e are wild and
//! only show the weight argmin.
//!
//! Run: `cargo run --example shilov_type_iv`

use skelmeas::basechange::shilov_convergence;
use skelmeas::builtin_model;
use skelmeas::measures::TestFunction;
use skelmeas::Rat;

fn main() -> skelmeas::Result<()> {
    let iv = builtin_model("kodaira_IV", 3, None)?;
    let phis = vec![TestFunction::constant(&iv, Rat::from_integer(1.into()))];
    let es: Vec<u64> = (1..=12).collect();
    let rep = shilov_convergence(&iv, &es, &phis)?;
    for row in &rep.rows {
        println!(
            "e = {:>2}: {} points, ord_min {:>6}, distance to centre {:>5}, scaled mass {}{}",
            row.e,
            row.result.points.len(),
            row.result.ord_min_base.clone().unwrap_or_default().to_string(),
            row.max_distance_to_ks.clone().unwrap_or_default().to_string(),
            row.scaled_total,
            if row.wild { "  (wild)" } else { "" }
        );
    }
    Ok(())
}
