//! Lattice lengths of skeleton edges and of edges of non-free 2-dimensional cones.
//!
//! Run: `cargo run --example edge_lengths`

use skelmeas::builtin_model;
use skelmeas::cone2d::{cone_edge_data, Cone2D};
use skelmeas::exactcore::fmt_rat;
use skelmeas::measures::{face_volume, face_volume_snc};

fn main() -> skelmeas::Result<()> {
    for (a, b) in [(1, 1), (2, 3), (4, 6), (3, 1)] {
        println!("edge between multiplicities {a} and {b}: ℓ = {}", fmt_rat(&face_volume_snc(&[a, b])));
    }
    let iv = builtin_model("kodaira_IV", 3, None)?;
    for s in 0..iv.strata.len() {
        if iv.stratum_components(s).len() == 2 {
            println!("kodaira_IV {}: ℓ = {}", iv.stratum_label(s), fmt_rat(&face_volume(&iv, s)));
        }
    }
    // uv = ϖ²: dual rays (0,1), (2,−1), uniformizer class (1,1).
    let d = cone_edge_data(&Cone2D::new([0, 1], [2, -1], [1, 1])?);
    println!("uv = ϖ²: ρ = {}, N = ({}, {}), det = {}, ℓ = {}", d.rho, d.n1, d.n2, d.det, fmt_rat(&d.length));
    Ok(())
}
