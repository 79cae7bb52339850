//! Exponentially weighted lattice sums S(e,f) converging to the integral over
//! the face where the weight vanishes, and the closed product formula.
//!
//! Run: `cargo run --example lemma_sums`

use std::path::Path;

use skelmeas::convergence::{lemma_sum_bruteforce, lemma_sum_closedform, lemma_sum_value, tau_integral, WeightedSumSpec};
use skelmeas::exactcore::decimal;

fn main() -> skelmeas::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let square = WeightedSumSpec::from_toml(&std::fs::read_to_string(data.join("lemma_square.toml"))?)?;
    let target = tau_integral(&square)?;
    println!("I_τ(φ) = {target}");
    for (e, f) in [(1, 1), (4, 2), (16, 4), (100, 10)] {
        let v = lemma_sum_value(&square, e, f)?;
        println!("S({e},{f}) = {}  gap {}", decimal(&v.midpoint(), 12), decimal(&v.max_abs_diff(&target), 12));
    }

    let odd = WeightedSumSpec::from_toml(&std::fs::read_to_string(data.join("lemma_no_zp_point.toml"))?)?;
    println!("τ has a 2-integral point: {}", odd.tau_has_zp_point(2));
    for e in [1, 3, 9, 27] {
        println!("odd e = {e:>2}: S(e,16) = {}", decimal(&lemma_sum_value(&odd, e, 16)?.midpoint(), 12));
    }

    let bx = WeightedSumSpec::from_toml(&std::fs::read_to_string(data.join("lemma_box.toml"))?)?;
    for e in 1..=6 {
        let cf = lemma_sum_closedform(&bx, e, 2)?;
        println!("e = {e}: δ = {}, closed form matches brute force: {}", cf.delta, cf.matches(&lemma_sum_bruteforce(&bx, e, 2)?));
    }
    Ok(())
}
