//! Command-line front end. Every experiment writes CSV; numbers are printed as
//! exact rationals followed by a 12-digit decimal.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_traits::{One, Signed};

use crate::basechange::{base_change, shilov_boundary, shilov_convergence, ExtensionParams, ShilovReport};
use crate::cone2d::{cone_edge_data, Cone2D};
use crate::convergence::{
    convergence_report, default_family, gnuplot_script, lemma_sum_bruteforce, lemma_sum_closedform, simulate_measure,
    tau_integral, MassBounds, Regime, SimulatedMeasure, WeightedSumSpec, PRECISION_BITS,
};
use crate::error::{Error, Result};
use crate::exactcore::{decimal, fmt_rat, parse_rat, rint, Rat, Value};
use crate::langweil::{langweil_error_check, langweil_limit_check, langweil_sequence, VarietySpec};
use crate::measures::{face_volume, lebesgue_measure, stable_measure, TestFunction};
use crate::model::{builtin_model, load_model, SncModel};
use crate::skeleton::{
    distance_to_complex, ks_skeleton, lattice_points, min_weight, tame_degree, temperate_part, vertex_weight, weight_at,
    SkPoint, SubComplex,
};

#[derive(Parser, Debug)]
#[command(name = "skelmeas", version, about = "Skeleta, weight functions and limit measures of snc-models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a model file and list every violated rule.
    Validate { model: String },
    /// Faces of the skeleton with vertex weights.
    Skeleton {
        model: String,
        /// Only the Kontsevich–Soibelman skeleton.
        #[arg(long)]
        ks: bool,
        /// Only the temperate part of the Kontsevich–Soibelman skeleton.
        #[arg(long)]
        temperate: bool,
    },
    /// Face masses of the integral Lebesgue (or stable) measure.
    Measure {
        model: String,
        #[arg(long)]
        stable: bool,
        #[arg(long, default_value = "ks", value_parser = ["ks", "full", "temperate"])]
        complex: String,
    },
    /// All (1/e)ℤ-integral points of the skeleton.
    Lattice {
        model: String,
        #[arg(short)]
        e: u64,
    },
    /// Write the normalized base change.
    Basechange {
        model: String,
        #[arg(short)]
        e: u64,
        #[arg(short, default_value_t = 1)]
        f: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Shilov boundary for one e, or a sweep of scaled Shilov measures.
    Shilov {
        model: String,
        #[arg(short, default_value_t = 1)]
        e: u64,
        /// Range `A..B` of ramification indices.
        #[arg(long)]
        sweep: Option<String>,
        /// Sweep: one summary row per e. Single e: one row per point.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Sweep: one row per Shilov point.
        #[arg(long)]
        points_csv: Option<PathBuf>,
    },
    /// Exact masses of the simulated normalized measure.
    Simulate {
        model: String,
        #[arg(short)]
        e: u64,
        #[arg(short)]
        f: u64,
        #[arg(short)]
        q: u64,
        /// tame, log-smooth or unramified (default: log-smooth for log-smooth models, else tame).
        #[arg(long)]
        regime: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Distances D(e,f) of simulated measures to their limit over a grid.
    Converge {
        model: String,
        #[arg(long)]
        e_seq: String,
        #[arg(long)]
        f_seq: String,
        #[arg(short)]
        q: u64,
        /// TOML test function added to the constant and tent functions.
        #[arg(long)]
        phi: Vec<PathBuf>,
        #[arg(long)]
        regime: Option<String>,
        #[arg(long)]
        csv: PathBuf,
        /// Also write a gnuplot script plotting the CSV.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Exponentially weighted lattice sums S(e,f) against the integral over τ.
    Lemma {
        #[arg(long)]
        spec: PathBuf,
        /// `ExF`: all e ≤ E and f ≤ F.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        csv: PathBuf,
        /// Also compare with the closed product formula (box specs only).
        #[arg(long)]
        closed_form: bool,
    },
    /// Edge data (ρ, N₁, N₂, det, ℓ) of a two-dimensional cone.
    #[command(allow_negative_numbers = true)]
    Cone2d { v1x: i64, v1y: i64, v2x: i64, v2y: i64, wx: i64, wy: i64 },
    /// Brute-force point counts over F_{p^m}.
    Count {
        /// Defining polynomial; repeat for systems.
        #[arg(long = "poly")]
        polys: Vec<String>,
        #[arg(short)]
        p: u64,
        #[arg(long)]
        m_range: String,
        #[arg(long)]
        projective: bool,
        #[arg(long)]
        exclude: Option<String>,
        /// Comma-separated variable list (required when no polynomial mentions them).
        #[arg(long)]
        vars: Option<String>,
        /// Dimension n of the normalization q^{-n} (default: variables − equations, minus one if projective).
        #[arg(long)]
        dim: Option<u32>,
        /// Expected number of geometric components for the error-bound check.
        #[arg(long)]
        cz: Option<u64>,
        /// Constant C of the error bound.
        #[arg(long, default_value = "2")]
        constant: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Parses `A..B` (inclusive) or a comma-separated list.
pub fn parse_seq(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidParams(format!("bad sequence {s:?}: use A..B or a,b,c"));
    let out: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

/// A model path, or `builtin:NAME[,p=P][,q=Q]`.
pub fn load_model_arg(arg: &str) -> Result<SncModel> {
    let Some(spec) = arg.strip_prefix("builtin:") else {
        return load_model(Path::new(arg));
    };
    let mut parts = spec.split(',');
    let name = parts.next().unwrap_or_default();
    let (mut p, mut q) = (1, None);
    for kv in parts {
        match kv.split_once('=') {
            Some(("p", v)) => p = v.parse().map_err(|_| Error::InvalidParams(format!("bad p in {arg:?}")))?,
            Some(("q", v)) => q = Some(v.parse().map_err(|_| Error::InvalidParams(format!("bad q in {arg:?}")))?),
            _ => return Err(Error::InvalidParams(format!("unknown option {kv:?} in {arg:?}"))),
        }
    }
    builtin_model(name, p, q)
}

fn default_regime(model: &SncModel, flag: &Option<String>) -> Result<Regime> {
    match flag {
        Some(s) => s.parse(),
        None if model.log_smooth => Ok(Regime::LogSmooth),
        None => Ok(Regime::Tame),
    }
}

fn coords(x: &SkPoint) -> String {
    x.u.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn bounds_text(b: &MassBounds, q: &Rat) -> Result<String> {
    Ok(match b.value(q)? {
        v @ Value::Exact(_) => v.exact_or_decimal(),
        Value::Interval { lo, hi } if b.is_exact() => decimal(&((lo + hi) / rint(2)), 12),
        Value::Interval { lo, hi } => format!("{}..{}", decimal(&lo, 12), decimal(&hi, 12)),
    })
}

fn writer(path: &Path) -> Result<File> {
    Ok(File::create(path)?)
}

fn cmd_skeleton(m: &SncModel, ks: bool, temperate: bool) {
    let ksk = ks_skeleton(m);
    let c = if temperate {
        temperate_part(m, &ksk)
    } else if ks {
        ksk
    } else {
        SubComplex::full(m)
    };
    println!("model {} (dimension {}, p = {})", m.name, m.dimension, m.p);
    println!("complex dimension {}", c.dim());
    for s in c.faces() {
        println!("face {:<16} dim {}", m.stratum_label(s), m.stratum_components(s).len() - 1);
    }
    for (j, comp) in m.components.iter().enumerate() {
        println!("vertex weight {:<8} {}", comp.id, fmt_rat(&vertex_weight(m, j)));
    }
    println!("minimal weight {}", fmt_rat(&min_weight(m)));
}

fn cmd_measure(m: &SncModel, stable: bool, complex: &str) -> Result<()> {
    let ks = ks_skeleton(m);
    let c = match complex {
        "full" => SubComplex::full(m),
        "temperate" => temperate_part(m, &ks),
        _ => ks,
    };
    let mu = if stable { stable_measure(m, &c)? } else { lebesgue_measure(m, &c)? };
    for (&s, d) in &mu.density {
        println!(
            "face {:<16} density {:<6} volume {:<24} mass {}",
            m.stratum_label(s),
            d.to_string(),
            fmt_rat(&face_volume(m, s)),
            fmt_rat(&mu.face_mass(m, s))
        );
    }
    println!("total {}", fmt_rat(&mu.total_mass(m)));
    Ok(())
}

fn cmd_lattice(m: &SncModel, e: u64) -> Result<()> {
    let pts = lattice_points(m, &SubComplex::full(m), e);
    for x in &pts {
        println!("{:<28} weight {}", x.label(m), fmt_rat(&weight_at(m, x)?));
    }
    println!("{} points", pts.len());
    Ok(())
}

const SHILOV_POINT_COLUMNS: [&str; 9] =
    ["e", "f", "point", "face", "coords", "weight", "tdeg", "raw_mass", "scaled_mass"];

fn shilov_point_rows(m: &SncModel, rep: &ShilovReport, out: &mut csv::Writer<File>) -> Result<()> {
    out.write_record(SHILOV_POINT_COLUMNS)?;
    for row in &rep.rows {
        let scale = Rat::one() / Rat::from_integer(num_bigint::BigInt::from(row.e).pow(rep.dim_ks.max(0) as u32));
        for (i, (x, mass)) in row.result.measure.atoms.iter().enumerate() {
            out.write_record([
                row.e.to_string(),
                "1".into(),
                i.to_string(),
                m.stratum_label(x.face),
                coords(x),
                weight_at(m, x)?.to_string(),
                tame_degree(m, x)?.to_string(),
                mass.to_string(),
                (mass * &scale).to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

fn family(m: &SncModel) -> Vec<TestFunction> {
    default_family(m).into_iter().map(|(_, phi)| phi).collect()
}

fn opt_rat(x: &Option<Rat>) -> String {
    x.as_ref().map_or("inf".into(), |v| v.to_string())
}

fn cmd_shilov(m: &SncModel, e: u64, sweep: &Option<String>, csv_path: &Option<PathBuf>, points: &Option<PathBuf>) -> Result<()> {
    let ks = ks_skeleton(m);
    let Some(range) = sweep else {
        let s = shilov_boundary(m, e)?;
        println!("e = {e}: {} Shilov points", s.points.len());
        println!("ord_min (base units) {}", s.ord_min_base.as_ref().map_or("+inf".into(), fmt_rat));
        println!("ord_min (extension units) {}", s.ord_min_extension().as_ref().map_or("+inf".into(), fmt_rat));
        for (x, mass) in &s.measure.atoms {
            let d = distance_to_complex(m, x, &ks).map_or("n/a".into(), |d| fmt_rat(&d));
            println!("  {:<28} mass {}  distance to Sk(X,θ) {}", x.label(m), mass, d);
        }
        if let Some(path) = csv_path {
            let rep = shilov_convergence(m, &[e], &family(m))?;
            shilov_point_rows(m, &rep, &mut csv::Writer::from_writer(writer(path)?))?;
        }
        return Ok(());
    };
    let es = parse_seq(range)?;
    let rep = shilov_convergence(m, &es, &family(m))?;
    println!(
        "dim Sk(X,θ) = {}, dim Sk^t(X,θ) = {}{}",
        rep.dim_ks,
        rep.dim_temperate,
        if rep.temperate_empty { " (empty temperate part: no limit asserted for λ^t)" } else { "" }
    );
    let header = [
        "e",
        "points",
        "ord_min_base",
        "ord_min_extension",
        "total_mass",
        "scaled_total",
        "scaled_total_temperate",
        "distance_to_ks",
        "distance_to_ks_decimal",
        "d_stable_ks",
        "d_stable_temperate",
        "wild",
    ];
    let mut out = match csv_path {
        Some(p) => Some(csv::Writer::from_writer(writer(p)?)),
        None => None,
    };
    if let Some(w) = out.as_mut() {
        w.write_record(header)?;
    }
    for row in &rep.rows {
        let r = &row.result;
        let dist = opt_rat(&row.max_distance_to_ks);
        println!(
            "e = {:>3}  points {:>3}  ord_min {:<8} scaled mass {:<6} distance {:<6} D {}{}",
            row.e,
            r.points.len(),
            opt_rat(&r.ord_min_base),
            row.scaled_total.to_string(),
            dist,
            decimal(&row.distance, 12),
            if row.wild { "  (wild: argmin only)" } else { "" }
        );
        if let Some(w) = out.as_mut() {
            w.write_record([
                row.e.to_string(),
                r.points.len().to_string(),
                opt_rat(&r.ord_min_base),
                opt_rat(&r.ord_min_extension()),
                r.measure.total().to_string(),
                row.scaled_total.to_string(),
                row.scaled_total_t.to_string(),
                dist,
                row.max_distance_to_ks.as_ref().map_or("inf".into(), |d| decimal(d, 12)),
                row.distance.to_string(),
                row.distance_t.to_string(),
                row.wild.to_string(),
            ])?;
        }
    }
    if let Some(mut w) = out {
        w.flush()?;
    }
    if let Some(p) = points {
        shilov_point_rows(m, &rep, &mut csv::Writer::from_writer(writer(p)?))?;
    }
    Ok(())
}

fn simulate_csv(m: &SncModel, sim: &SimulatedMeasure, path: &Path) -> Result<()> {
    let q = rint(sim.q);
    let mut w = csv::Writer::from_writer(writer(path)?);
    w.write_record(["e", "f", "q", "point", "face", "coords", "weight", "tdeg", "raw_mass", "normalized_mass"])?;
    for (i, a) in sim.atoms.iter().enumerate() {
        w.write_record([
            sim.ext.e.to_string(),
            sim.ext.f.to_string(),
            sim.q.to_string(),
            i.to_string(),
            m.stratum_label(a.point.face),
            coords(&a.point),
            a.weight.to_string(),
            a.tdeg.to_string(),
            bounds_text(&a.raw, &q)?,
            bounds_text(&sim.normalized(a), &q)?,
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_simulate(m: &SncModel, e: u64, f: u64, q: u64, regime: Regime, csv_path: &Option<PathBuf>) -> Result<()> {
    let sim = simulate_measure(m, ExtensionParams::new(e, f), q, regime)?;
    let qr = rint(q);
    for a in &sim.atoms {
        println!(
            "{:<28} raw {:<24} normalized {}",
            a.point.label(m),
            bounds_text(&a.raw, &qr)?,
            bounds_text(&sim.normalized(a), &qr)?
        );
    }
    println!("raw total {}", sim.raw_total().value(&qr)?);
    println!("normalized total {}", sim.normalized_total().value(&qr)?);
    if let Some(p) = csv_path {
        simulate_csv(m, &sim, p)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_converge(
    m: &SncModel,
    e_seq: &str,
    f_seq: &str,
    q: u64,
    phi_files: &[PathBuf],
    regime: Regime,
    csv_path: &Path,
    gnuplot: &Option<PathBuf>,
) -> Result<()> {
    let es = parse_seq(e_seq)?;
    let fs = parse_seq(f_seq)?;
    let mut phis = default_family(m);
    for path in phi_files {
        let tf = TestFunction::from_toml(m, &std::fs::read_to_string(path)?)?;
        if let Some(bad) = tf.inconsistencies(m).first() {
            return Err(Error::InvalidParams(format!("{}: test function is discontinuous ({bad})", path.display())));
        }
        phis.push((path.display().to_string(), tf));
    }
    let rep = convergence_report(m, &es, &fs, q, &phis, regime)?;
    if rep.temperate_empty {
        println!("temperate part is empty: normalization uses dimension −1; no limit is asserted");
    }
    for (name, t) in &rep.targets {
        println!("target ∫{name} = {}", fmt_rat(t));
    }
    for r in &rep.rows {
        println!(
            "e = {:>3} f = {:>3}  normalized total {}  D = {}",
            r.e,
            r.f,
            r.normalized_total,
            decimal(&r.distance, 12)
        );
    }
    println!("D non-increasing in f: {}", rep.monotone_in_f());
    rep.write_csv(writer(csv_path)?)?;
    if let Some(g) = gnuplot {
        let title = format!("{} ({:?}, q = {q})", m.name, regime);
        writer(g)?.write_all(gnuplot_script(&csv_path.display().to_string(), &es, &title).as_bytes())?;
    }
    Ok(())
}

fn parse_grid(s: &str) -> Result<(u64, u64)> {
    let bad = || Error::InvalidParams(format!("bad grid {s:?}: use ExF"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let (e, f) = (a.parse::<u64>().map_err(|_| bad())?, b.parse::<u64>().map_err(|_| bad())?);
    if e == 0 || f == 0 {
        return Err(bad());
    }
    Ok((e, f))
}

fn cmd_lemma(spec_path: &Path, grid: &str, csv_path: &Path, closed: bool) -> Result<()> {
    let spec = WeightedSumSpec::from_toml(&std::fs::read_to_string(spec_path)?)?;
    let (emax, fmax) = parse_grid(grid)?;
    let target = if spec.exclude_tau { Rat::from_integer(0.into()) } else { tau_integral(&spec)? };
    println!("dim τ = {}, target {}", spec.tau_dim(), fmt_rat(&target));
    let mut w = csv::Writer::from_writer(writer(csv_path)?);
    w.write_record(["e", "f", "sum", "sum_decimal", "target", "gap_decimal", "closed_form"])?;
    let mut mismatches = 0;
    for e in 1..=emax {
        for f in 1..=fmax {
            let s = lemma_sum_bruteforce(&spec, e, f)?;
            let v = s.eval(&spec.r, PRECISION_BITS)?;
            let cf = if closed {
                let ok = lemma_sum_closedform(&spec, e, f)?.matches(&s);
                mismatches += usize::from(!ok);
                if ok { "match" } else { "MISMATCH" }
            } else {
                "-"
            };
            w.write_record([
                e.to_string(),
                f.to_string(),
                v.exact_or_decimal(),
                decimal(&v.midpoint(), 12),
                target.to_string(),
                decimal(&v.max_abs_diff(&target), 12),
                cf.to_string(),
            ])?;
        }
    }
    w.flush()?;
    let last = lemma_sum_bruteforce(&spec, emax, fmax)?.eval(&spec.r, PRECISION_BITS)?;
    println!("S({emax},{fmax}) = {last}; gap {}", decimal(&last.max_abs_diff(&target), 12));
    if closed {
        println!("closed form mismatches: {mismatches}");
        if mismatches > 0 {
            return Err(Error::Spec(format!("{mismatches} closed-form mismatches")));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_count(
    polys: &[String],
    p: u64,
    m_range: &str,
    projective: bool,
    exclude: &Option<String>,
    vars: &Option<String>,
    dim: Option<u32>,
    cz: Option<u64>,
    constant: &str,
    csv_path: &Option<PathBuf>,
) -> Result<()> {
    let (a, b) = m_range
        .split_once("..")
        .and_then(|(a, b)| Some((a.trim().parse::<u32>().ok()?, b.trim().parse::<u32>().ok()?)))
        .filter(|(a, b)| *a >= 1 && a <= b)
        .ok_or_else(|| Error::InvalidParams(format!("bad m range {m_range:?}: use A..B with 1 ≤ A ≤ B")))?;
    let var_list: Option<Vec<&str>> = vars.as_ref().map(|v| v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect());
    let texts: Vec<&str> = polys.iter().map(String::as_str).collect();
    let mut v = VarietySpec::parse(&texts, exclude.as_deref(), var_list.as_deref(), projective, 0)?;
    v.dimension = dim.unwrap_or_else(|| {
        (v.variables.len() as i64 - v.polynomials.len() as i64 - i64::from(projective)).max(0) as u32
    });
    let seq = langweil_sequence(&v, p, a..=b)?;
    for r in &seq.rows {
        println!("m = {:>2} q = {:>8} count {:>10} normalized {}", r.m, r.q, r.count, fmt_rat(&r.normalized));
    }
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_writer(writer(path)?);
        w.write_record(["m", "q", "count", "normalized", "normalized_decimal"])?;
        for r in &seq.rows {
            w.write_record([
                r.m.to_string(),
                r.q.to_string(),
                r.count.to_string(),
                r.normalized.to_string(),
                decimal(&r.normalized, 12),
            ])?;
        }
        w.flush()?;
    }
    if let Some(c) = cz {
        let cst = parse_rat(constant)?;
        if cst.is_negative() {
            return Err(Error::InvalidParams("the constant C must be nonnegative".into()));
        }
        let n = v.dimension;
        let p = seq.p;
        println!("|count − {c}·q^{n}| ≤ {cst}·q^{n}/√{p} for all m: {}", langweil_limit_check(&seq, c, &cst));
        println!("|count − {c}·q^{n}| ≤ {cst}·q^({n} − 1/2) for all m: {}", langweil_error_check(&seq, c, &cst));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { model } => {
            let m = load_model_arg(&model)?;
            println!("ok: {} ({} components, {} strata)", m.name, m.components.len(), m.strata.len());
        }
        Command::Skeleton { model, ks, temperate } => cmd_skeleton(&load_model_arg(&model)?, ks, temperate),
        Command::Measure { model, stable, complex } => cmd_measure(&load_model_arg(&model)?, stable, &complex)?,
        Command::Lattice { model, e } => cmd_lattice(&load_model_arg(&model)?, e.max(1))?,
        Command::Basechange { model, e, f, output } => {
            let m = load_model_arg(&model)?;
            if e == 0 || f == 0 {
                return Err(Error::InvalidParams("e and f must be positive".into()));
            }
            let bc = base_change(&m, ExtensionParams::new(e, f))?;
            let text = if output.extension().is_some_and(|x| x == "json") { bc.to_json()? } else { bc.to_toml()? };
            std::fs::write(&output, text)?;
            println!("wrote {} ({} components, {} strata)", output.display(), bc.components.len(), bc.strata.len());
        }
        Command::Shilov { model, e, sweep, csv, points_csv } => {
            cmd_shilov(&load_model_arg(&model)?, e.max(1), &sweep, &csv, &points_csv)?
        }
        Command::Simulate { model, e, f, q, regime, csv } => {
            let m = load_model_arg(&model)?;
            let r = default_regime(&m, &regime)?;
            cmd_simulate(&m, e, f, q, r, &csv)?
        }
        Command::Converge { model, e_seq, f_seq, q, phi, regime, csv, gnuplot } => {
            let m = load_model_arg(&model)?;
            let r = default_regime(&m, &regime)?;
            cmd_converge(&m, &e_seq, &f_seq, q, &phi, r, &csv, &gnuplot)?
        }
        Command::Lemma { spec, grid, csv, closed_form } => cmd_lemma(&spec, &grid, &csv, closed_form)?,
        Command::Cone2d { v1x, v1y, v2x, v2y, wx, wy } => {
            let d = cone_edge_data(&Cone2D::new([v1x, v1y], [v2x, v2y], [wx, wy])?);
            println!("rho {}\nN1 {}\nN2 {}\ndet {}\nlength {}", d.rho, d.n1, d.n2, d.det, fmt_rat(&d.length));
        }
        Command::Count { polys, p, m_range, projective, exclude, vars, dim, cz, constant, csv } => {
            cmd_count(&polys, p, &m_range, projective, &exclude, &vars, dim, cz, &constant, &csv)?
        }
    }
    Ok(())
}

fn init_threads() {
    if let Some(n) = std::env::var("SKELMEAS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, in which case its size stands.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs the command line; returns 0 on success, 1 on invalid input or failed
/// computation, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    init_threads();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(Error::Validation(vs)) => {
            eprintln!("invalid model: {} violation(s)", vs.len());
            for v in vs {
                eprintln!("  {v}");
            }
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
