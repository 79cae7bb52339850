//! Integral Lebesgue and stable measures, integration of a piecewise-affine
//! test function, and discrete approximations by (1/e)ℤ-points.
//!
//! Run: `cargo run --example lebesgue_measures`

use skelmeas::builtin_model;
use skelmeas::exactcore::fmt_rat;
use skelmeas::measures::{discrete_approximation, integrate, lebesgue_measure, stable_measure, TestFunction};
use skelmeas::SubComplex;

fn main() -> skelmeas::Result<()> {
    let m = builtin_model("tate_triangle", 2, None)?;
    let full = SubComplex::full(&m);
    let lambda = lebesgue_measure(&m, &full)?;
    let stable = stable_measure(&m, &full)?;
    println!("λ total {}, λ^s total {}", fmt_rat(&lambda.total_mass(&m)), fmt_rat(&stable.total_mass(&m)));

    let hat = TestFunction::hat(&m, 0);
    let exact = integrate(&m, &lambda, &hat)?;
    println!("∫ hat(E1) dλ = {}", fmt_rat(&exact));
    for e in [1, 2, 4, 8, 16, 32] {
        let d = discrete_approximation(&m, &full, e, false);
        println!("e = {e:>2}: {} atoms, ∫ hat(E1) = {}", d.atoms.len(), fmt_rat(&d.integrate(&m, &hat)?));
    }
    Ok(())
}
