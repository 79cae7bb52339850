//! A convergence grid written as CSV together with a gnuplot script that draws
//! the distance `D(e,f)` against `f`, one curve per `e`.
//!
//! Run: `cargo run --example convergence_csv` (files go to the system temp directory)

use skelmeas::convergence::{convergence_report, default_family, gnuplot_script, Regime};
use skelmeas::exactcore::decimal;
use skelmeas::{builtin_model, rat};

fn main() -> skelmeas::Result<()> {
    let m = builtin_model("kodaira_Istar(1)", 3, Some(3))?;
    let e_seq = [2, 4, 8];
    let f_seq: Vec<u64> = (1..=6).collect();
    let rep = convergence_report(&m, &e_seq, &f_seq, 3, &default_family(&m), Regime::Tame)?;

    let dir = std::env::temp_dir();
    let csv_path = dir.join("istar1_convergence.csv");
    rep.write_csv(std::fs::File::create(&csv_path)?)?;
    let gp_path = dir.join("istar1_convergence.gp");
    std::fs::write(&gp_path, gnuplot_script(&csv_path.to_string_lossy(), &e_seq, "I*_1 over F_3"))?;

    for (name, t) in &rep.targets {
        println!("target ∫{name} dλ^s = {t}");
    }
    // For fixed e the distance tends to that of the discrete measure on the
    // chain, which carries mass 1/2 + 1/e; the joint limit is what vanishes.
    for e in e_seq {
        let last = rep.rows.iter().filter(|r| r.e == e).next_back().expect("grid row");
        println!("e = {e}: D(e,{}) = {} (1/e = {})", last.f, decimal(&last.distance, 6), decimal(&rat(1, e as i64), 6));
    }
    println!("wrote {} and {}", csv_path.display(), gp_path.display());
    Ok(())
}
