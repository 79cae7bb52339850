//! Acceptance run: one PASS/FAIL line per criterion, with its wall time
//! against the time budget. Exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skelmeas::basechange::{base_change_with_origin, shilov_convergence, weight_argmin};
use skelmeas::convergence::{
    lemma_sum_bruteforce, lemma_sum_closedform, lemma_sum_value, simulate_measure, tau_integral, Regime, Region,
    WeightedSumSpec,
};
use skelmeas::langweil::{circle_oracle, langweil_error_check, langweil_limit_check, langweil_sequence, VarietySpec};
use skelmeas::measures::{dominated_by, face_volume, face_volume_snc, lebesgue_measure, stable_measure, TestFunction};
use skelmeas::skeleton::{edge_distance_from_vertex, ks_skeleton, lattice_points, temperate_part, weight_at};
use skelmeas::{
    builtin_model, lattice_correspondence_check, load_model, rat, rint, ExtensionParams, MPoly, Rat, SkPoint, SncModel,
    SubComplex,
};

type Check = std::result::Result<(), String>;

/// Name, check and time budget in seconds.
type Criterion = (&'static str, fn() -> Check, u64);

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn load(name: &str) -> SncModel {
    load_model(&data(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Every model the checks sweep over: the built-in families and the shipped data files.
fn fixtures() -> Vec<SncModel> {
    let mut out = vec![];
    for (name, p) in [
        ("tate_triangle", 2),
        ("kodaira_In(1)", 2),
        ("kodaira_In(2)", 3),
        ("kodaira_In(5)", 5),
        ("kodaira_Istar(0)", 2),
        ("kodaira_Istar(1)", 2),
        ("kodaira_Istar(3)", 3),
        ("kodaira_IV", 3),
        ("kodaira_IV", 5),
    ] {
        out.push(builtin_model(name, p, None).expect("builtin"));
    }
    for f in ["tate_triangle.toml", "kodaira_IV.toml", "kodaira_Istar1.toml", "two_component.toml"] {
        out.push(load(f));
    }
    out
}

fn is_tame(m: &SncModel, e: u64) -> bool {
    m.p == 1 || m.log_smooth || !e.is_multiple_of(m.p)
}

fn edges(m: &SncModel) -> Vec<usize> {
    (0..m.strata.len()).filter(|&s| m.stratum_components(s).len() == 2).collect()
}

// 1. Edge lengths gcd(N1,N2)/(N1·N2) and the type IV edges.
fn edge_lengths() -> Check {
    for a in 1..=50u64 {
        for b in 1..=50u64 {
            let expected = Rat::new(a.gcd(&b).into(), (a * b).into());
            let got = face_volume_snc(&[a, b]);
            ensure(got == expected, || format!("N = ({a},{b}): {got} != {expected}"))?;
        }
    }
    let iv = builtin_model("kodaira_IV", 3, None).map_err(err)?;
    for s in edges(&iv) {
        let v = face_volume(&iv, s);
        ensure(v == rat(1, 3), || format!("type IV edge {}: {v}", iv.stratum_label(s)))?;
    }
    Ok(())
}

// 2. Multiplicities N/gcd(e,N), lattice correspondence, weight scaling by e.
fn base_change_laws() -> Check {
    for n in 1..=60u64 {
        for e in 1..=60u64 {
            let m = SncModel {
                name: "single".into(),
                dimension: 0,
                p: 1,
                q: None,
                m: 1,
                log_smooth: true,
                components: vec![skelmeas::Component::new("E", n, 0)],
                strata: vec![skelmeas::Stratum::new(&["E"], skelmeas::CountPoly::new([1]))],
            }
            .validated()
            .map_err(err)?;
            let (bc, _) = base_change_with_origin(&m, ExtensionParams::new(e, 1)).map_err(err)?;
            let got = bc.components[0].multiplicity;
            ensure(got == n / n.gcd(&e), || format!("N = {n}, e = {e}: N' = {got}"))?;
        }
    }
    for m in fixtures() {
        for e in (1..=12).filter(|&e| is_tame(&m, e)) {
            ensure(lattice_correspondence_check(&m, e).map_err(err)?, || {
                format!("{} (p = {}): correspondence fails at e = {e}", m.name, m.p)
            })?;
            let (bc, origin) = base_change_with_origin(&m, ExtensionParams::new(e, 1)).map_err(err)?;
            let er = rint(e);
            for x in lattice_points(&bc, &SubComplex::full(&bc), 1) {
                let y = SkPoint { face: origin[x.face], u: x.u.iter().map(|v| v / &er).collect() };
                let (w1, w0) = (weight_at(&bc, &x).map_err(err)?, weight_at(&m, &y).map_err(err)?);
                ensure(w1 == &w0 * &er, || format!("{}: e = {e}, wt' = {w1} but e·wt = {}", m.name, &w0 * &er))?;
            }
        }
    }
    Ok(())
}

/// Number of nonnegative integer solutions of `Σ n_j a_j = t` (coin-change recursion).
fn denumerant(n: &[u64], t: usize) -> u128 {
    let mut ways = vec![0u128; t + 1];
    ways[0] = 1;
    for &c in n {
        for s in c as usize..=t {
            ways[s] += ways[s - c as usize];
        }
    }
    ways[t]
}

// 3. Simplex volumes against lattice point counts at e = 720.
fn volume_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let e = 720usize;
    for _ in 0..20 {
        let d = rng.gen_range(1..=3usize);
        let n: Vec<u64> = (0..=d).map(|_| rng.gen_range(1..=3)).collect();
        let count = denumerant(&n, e) as f64;
        let predicted = face_volume_snc(&n);
        let predicted = predicted.numer().to_string().parse::<f64>().unwrap()
            / predicted.denom().to_string().parse::<f64>().unwrap();
        let empirical = count / (e as f64).powi(d as i32);
        let rel = (empirical - predicted).abs() / predicted;
        ensure(rel < 0.03, || format!("N = {n:?}: count/e^d = {empirical}, volume = {predicted}, rel. error {rel}"))?;
    }
    Ok(())
}

fn box_spec(coords: &[(Rat, Rat)], n_top: i64, r: i64) -> WeightedSumSpec {
    let region = Region::Box(coords.iter().map(|(a, q)| (if a.is_zero() { Rat::zero() } else { q.clone() }, rint(n_top))).collect());
    let alpha = coords.iter().map(|(a, _)| a.clone()).collect();
    let offsets = coords.iter().map(|(_, q)| q.clone()).collect();
    WeightedSumSpec::new(region, alpha, offsets, MPoly::constant(Rat::one(), &[]), rint(r), true).expect("valid box spec")
}

// 4. Closed form versus brute force, convergence to the face integral, no 2-integral point.
fn lemma_sums() -> Check {
    let z = (Rat::zero(), Rat::zero());
    let specs = [
        box_spec(&[(rint(1), Rat::zero())], 2, 2),
        box_spec(&[(rat(3, 2), rat(1, 3))], 1, 3),
        box_spec(&[z.clone(), (rint(1), rat(1, 2))], 2, 2),
        box_spec(&[z.clone(), (rat(3, 2), rat(1, 3))], 2, 2),
        box_spec(&[(rint(2), rat(2, 3)), (rint(1), rat(1, 2))], 1, 3),
        box_spec(&[z.clone(), z.clone(), (rint(1), rat(1, 3))], 1, 2),
        box_spec(&[z, (rint(1), rat(1, 2)), (rat(1, 2), Rat::zero())], 1, 2),
    ];
    for (i, spec) in specs.iter().enumerate() {
        for e in 1..=12 {
            for f in 1..=12 {
                let cf = lemma_sum_closedform(spec, e, f).map_err(err)?;
                let bf = lemma_sum_bruteforce(spec, e, f).map_err(err)?;
                ensure(cf.matches(&bf), || format!("spec {i}: closed form differs at (e,f) = ({e},{f})"))?;
            }
        }
    }

    let square = WeightedSumSpec::from_toml(&std::fs::read_to_string(data("lemma_square.toml")).map_err(err)?).map_err(err)?;
    let target = tau_integral(&square).map_err(err)?;
    ensure(target == rat(1, 2), || format!("face integral {target}"))?;
    let gap = lemma_sum_value(&square, 100, 10).map_err(err)?.max_abs_diff(&target);
    ensure(gap < rat(1, 100), || format!("|S(100,10) - 1/2| <= {gap}"))?;

    // Without 2-integral points on τ the nearest lattice points sit at
    // distance ≥ 1/(2e) from it, so S(e,f) ≤ (1+1/e)·2^{-f/2}/(1-2^{-f}).
    let odd = WeightedSumSpec::from_toml(&std::fs::read_to_string(data("lemma_no_zp_point.toml")).map_err(err)?).map_err(err)?;
    ensure(!odd.tau_has_zp_point(2), || "τ should have no 2-integral point".into())?;
    for e in (1..=15).step_by(2) {
        let mut prev: Option<Rat> = None;
        for f in [2u32, 4, 8, 16, 24] {
            let v = lemma_sum_value(&odd, e, f as u64).map_err(err)?;
            let hi = v.hi().clone();
            let two_f = Rat::from_integer(BigInt::from(2).pow(f));
            let bound = (Rat::one() + rat(1, e as i64)) * (Rat::one() / Rat::from_integer(BigInt::from(2).pow(f / 2)))
                / (Rat::one() - two_f.recip());
            ensure(hi <= bound, || format!("S({e},{f}) = {hi} exceeds {bound}"))?;
            if let Some(p) = &prev {
                ensure(&hi < p, || format!("S({e},{f}) did not decrease"))?;
            }
            prev = Some(hi);
        }
        ensure(prev.unwrap() < rat(1, 1000), || format!("S({e},24) not below 1e-3"))?;
    }
    Ok(())
}

// 5. Tate triangle: total 3(1-2^{-f}), per-edge masses, and 3/2 at e = f = 1.
fn tate_fixture() -> Check {
    let tate = load("tate_triangle.toml");
    let two = rint(2);
    for e in 1..=20u64 {
        for f in 1..=20u64 {
            let sim = simulate_measure(&tate, ExtensionParams::new(e, f), 2, Regime::Tame).map_err(err)?;
            let half_f = Rat::new(BigInt::one(), BigInt::from(2).pow(f as u32));
            let total = sim.normalized_total().value(&two).map_err(err)?;
            let expected = rint(3) * (Rat::one() - &half_f);
            ensure(total.exact() == Some(&expected), || format!("(e,f) = ({e},{f}): total {total:?}, expected {expected}"))?;
            let tol = rint(3) * &half_f + rat(2, e as i64);
            for s in edges(&tate) {
                let v = sim.closed_face_mass(&tate, s).value(&two).map_err(err)?;
                let m = v.exact().ok_or("edge mass not exact")?;
                ensure((m - Rat::one()).abs() <= tol, || {
                    format!("(e,f) = ({e},{f}): edge {} mass {m}, tolerance {tol}", tate.stratum_label(s))
                })?;
            }
        }
    }
    let sim = simulate_measure(&tate, ExtensionParams::new(1, 1), 2, Regime::Tame).map_err(err)?;
    let total = sim.normalized_total().value(&two).map_err(err)?;
    ensure(total.exact() == Some(&rat(3, 2)), || format!("e = f = 1 total {total:?}"))?;
    ensure(sim.atoms.len() == 3, || "three atoms expected at e = 1".into())?;
    for a in &sim.atoms {
        let v = sim.normalized(a).value(&two).map_err(err)?;
        ensure(v.exact() == Some(&rat(1, 2)), || format!("atom mass {v:?}"))?;
    }
    Ok(())
}

// 6. Type IV in residue characteristic 3: arclength, ord_min and mass 3.
fn type_iv() -> Check {
    let iv = load("kodaira_IV.toml");
    ensure(iv.p == 3, || "fixture should have p = 3".into())?;
    let centre = iv.component_index("E0").ok_or("no central component")?;
    let e_list: Vec<u64> = (1..=12).collect();
    let family = vec![TestFunction::constant(&iv, Rat::one())];
    let report = shilov_convergence(&iv, &e_list, &family).map_err(err)?;
    for row in &report.rows {
        let e = row.e;
        let k = rat((e / 3) as i64, e as i64);
        let expected_distance = rat(1, 3) - &k;
        ensure(row.result.ord_min_base.as_ref() == Some(&-k.clone()), || {
            format!("e = {e}: ord_min {:?}, expected {}", row.result.ord_min_base, -k.clone())
        })?;
        ensure(row.result == weight_argmin(&iv, e), || format!("e = {e}: sweep differs from the argmin"))?;
        for x in &row.result.points {
            let d = edge_distance_from_vertex(&iv, x, centre).map_err(err)?;
            ensure(d == expected_distance, || format!("e = {e}: distance {d}, expected {expected_distance}"))?;
        }
        ensure(row.wild == (e % 3 == 0), || format!("e = {e}: wild flag {}", row.wild))?;
        if !row.wild {
            ensure(row.result.points.len() == 3, || format!("e = {e}: {} points", row.result.points.len()))?;
            ensure(row.scaled_total == rint(3), || format!("e = {e}: scaled mass {}", row.scaled_total))?;
        }
    }
    Ok(())
}

// 7. Temperate parts of I*_r and of the type IV skeleton.
fn temperate_parts() -> Check {
    for r in 0..=4u32 {
        let m = builtin_model(&format!("kodaira_Istar({r})"), 2, None).map_err(err)?;
        let t = temperate_part(&m, &SubComplex::full(&m));
        let mut tops = t.top_faces(&m);
        tops.sort();
        let mut leaves: Vec<usize> = edges(&m)
            .into_iter()
            .filter(|&s| m.stratum_components(s).iter().any(|&j| m.components[j].id.starts_with('L')))
            .collect();
        leaves.sort();
        ensure(leaves.len() == 4 && tops == leaves, || format!("I*_{r}: temperate top faces {:?}", t.labels(&m)))?;
        ensure(t == SubComplex::closure(&m, leaves), || format!("I*_{r}: not the closure of the leaf edges"))?;
    }
    let iv = builtin_model("kodaira_IV", 3, None).map_err(err)?;
    let t = temperate_part(&iv, &ks_skeleton(&iv));
    ensure(t.is_empty() && t.dim() == -1, || format!("type IV temperate part {:?}", t.labels(&iv)))
}

// 8. Unramified limit on the two-component fixture.
fn two_component() -> Check {
    let base = load("two_component.toml");
    for q in [2u64, 3, 5] {
        let m = SncModel { p: q, q: Some(q), ..base.clone() }.validated().map_err(err)?;
        for f in 1..=20u64 {
            let sim = simulate_measure(&m, ExtensionParams::new(1, f), q, Regime::Unramified).map_err(err)?;
            let bound = rint(2) / Rat::from_integer(BigInt::from(q).pow(f as u32));
            ensure(sim.atoms.len() == 2, || format!("q = {q}, f = {f}: {} atoms", sim.atoms.len()))?;
            for a in &sim.atoms {
                let v = sim.normalized(a).value(&rint(q)).map_err(err)?;
                let v = v.exact().ok_or("mass not exact")?;
                let id = &m.components[m.stratum_components(a.point.face)[0]].id;
                let limit = if id == "A" { rint(a.tdeg) } else { Rat::zero() };
                ensure((v - &limit).abs() <= bound, || format!("q = {q}, f = {f}: {id} mass {v}, limit {limit}"))?;
            }
        }
    }
    Ok(())
}

// 9. Circle counts over F_{3^m} and the Lang–Weil estimate.
fn circle_counts() -> Check {
    let circle = VarietySpec::parse(&["x^2+y^2-1"], None, None, false, 1).map_err(err)?;
    let seq = langweil_sequence(&circle, 3, 1..=6).map_err(err)?;
    for r in &seq.rows {
        ensure(r.count == circle_oracle(r.q), || format!("q = {}: count {} vs {}", r.q, r.count, circle_oracle(r.q)))?;
        // independent of the oracle's sign convention: q - (-1)^{(q-1)/2}
        let sign: i64 = if ((r.q - 1) / 2) % 2 == 0 { 1 } else { -1 };
        ensure(r.count as i64 == r.q as i64 - sign, || format!("q = {}: count {}", r.q, r.count))?;
    }
    ensure(langweil_limit_check(&seq, 1, &rint(2)), || "limit check with c_Z = 1, C = 2 failed".into())?;
    ensure(langweil_error_check(&seq, 1, &rint(2)), || "per-field error bound with C = 2 failed".into())
}

// 10. Stable dominates plain, and base change multiplies face volumes by e^d.
fn measure_scaling() -> Check {
    for m in fixtures() {
        let full = SubComplex::full(&m);
        let ks = ks_skeleton(&m);
        for c in [full.clone(), ks.clone(), temperate_part(&m, &full), temperate_part(&m, &ks)] {
            if c.is_empty() {
                continue;
            }
            let (l, s) = (lebesgue_measure(&m, &c).map_err(err)?, stable_measure(&m, &c).map_err(err)?);
            ensure(dominated_by(&l, &s), || format!("{}: stable measure below Lebesgue", m.name))?;
        }
        for e in (1..=12).filter(|&e| is_tame(&m, e)) {
            let (bc, origin) = base_change_with_origin(&m, ExtensionParams::new(e, 1)).map_err(err)?;
            for (s, &o) in origin.iter().enumerate() {
                let d = bc.stratum_components(s).len() as u32 - 1;
                let lhs = face_volume(&bc, s);
                let rhs = face_volume(&m, o) * Rat::from_integer(BigInt::from(e).pow(d));
                ensure(lhs == rhs, || format!("{}: e = {e}, face {}: {lhs} != {rhs}", m.name, bc.stratum_label(s)))?;
            }
        }
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("edge lengths", edge_lengths, 1),
        ("base change", base_change_laws, 5),
        ("volume oracle", volume_oracle, 60),
        ("lattice sums", lemma_sums, 30),
        ("tate fixture", tate_fixture, 10),
        ("type IV fixture", type_iv, 5),
        ("temperate parts", temperate_parts, 1),
        ("unramified limit", two_component, 5),
        ("circle counts", circle_counts, 60),
        ("measure scaling", measure_scaling, 1),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let status = match &outcome {
            Ok(()) if elapsed <= Duration::from_secs(*budget) => "PASS".to_string(),
            Ok(()) => format!("FAIL (over the {budget} s budget)"),
            Err(msg) => format!("FAIL: {msg}"),
        };
        if !status.starts_with("PASS") {
            failed += 1;
        }
        println!("criterion {:>2} {name:<17} {:>9.3} s  {status}", i + 1, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
