//! Exact rationals, point-count polynomials and symbolic sums of powers of q.
//!
//! Run: `cargo run --example exact_arithmetic`

use skelmeas::exactcore::{fmt_rat, parse_rat};
use skelmeas::{rat, CountPoly, MPoly, QExpSum, Rat};

fn main() -> skelmeas::Result<()> {
    let x = parse_rat("0.125")? + rat(1, 3);
    println!("1/8 + 1/3 = {}", fmt_rat(&x));

    // |E°|(t) for a line minus two points, times (t-1) for an edge factor.
    let p = CountPoly::new([-1, 1]).mul(&CountPoly::t_minus_one_pow(1));
    println!("(t-1)^2 = {p}, at t = 4: {}", p.eval(&4.into()));

    // 2^{-1/2} + 2^{1}: irrational, so evaluation returns an enclosure.
    let s = QExpSum::from_terms([(Rat::from_integer(1.into()), rat(-1, 2)), (rat(1, 1), rat(1, 1))]);
    println!("{s} at q = 2: {}", s.eval(&rat(2, 1), 64)?);
    println!("{s} at q = 4: {}", s.eval(&rat(4, 1), 64)?);

    let f = MPoly::parse("x^2 + y^2 - 1")?;
    println!("{f} at (3/5, 4/5) = {}", f.eval(&[rat(3, 5), rat(4, 5)]));
    Ok(())
}
