//! Point counts of the circle and of a geometrically reducible conic over
//! F_{p^m}, normalized by q^n.
//!
//! Run: `cargo run --example lang_weil_circle`

use skelmeas::exactcore::fmt_rat;
use skelmeas::langweil::{circle_oracle, langweil_error_check, langweil_limit_check, langweil_sequence, VarietySpec};
use skelmeas::rint;

fn main() -> skelmeas::Result<()> {
    let circle = VarietySpec::parse(&["x^2+y^2-1"], None, None, false, 1)?;
    let seq = langweil_sequence(&circle, 3, 1..=6)?;
    for r in &seq.rows {
        println!("q = {:>3}: {:>3} points (oracle {:>3}), normalized {}", r.q, r.count, circle_oracle(r.q), fmt_rat(&r.normalized));
    }
    println!("within 2·q/√3 of q: {}", langweil_limit_check(&seq, 1, &rint(2)));
    println!("within 2·q^(1/2) of q: {}", langweil_error_check(&seq, 1, &rint(2)));
    println!("within 2·q^(1/2) of 2q: {}", langweil_error_check(&seq, 2, &rint(2)));

    let lines = VarietySpec::parse(&["x^2-2*y^2"], None, None, false, 1)?;
    for r in &langweil_sequence(&lines, 5, 1..=4)?.rows {
        println!("x² − 2y² over F_{}: {} points, normalized {}", r.q, r.count, fmt_rat(&r.normalized));
    }
    Ok(())
}
