//! Library results against independent computations: coin-change lattice
//! counts, edge-by-edge integrals, and plain modular point counts.

use num_traits::{One, Signed, Zero};

use skelmeas::langweil::{count_points, FiniteField, VarietySpec};
use skelmeas::measures::{discrete_approximation, face_volume_snc, integrate, stable_measure, TestFunction};
use skelmeas::skeleton::{face_lattice_points, lattice_points};
use skelmeas::{builtin_model, rat, rint, Rat, SncModel, SubComplex};

/// Nonnegative integer solutions of `Σ n_j a_j = t`.
fn denumerant(n: &[u64], t: i64) -> u128 {
    if t < 0 {
        return 0;
    }
    let t = t as usize;
    let mut ways = vec![0u128; t + 1];
    ways[0] = 1;
    for &c in n {
        for s in c as usize..=t {
            ways[s] += ways[s - c as usize];
        }
    }
    ways[t]
}

fn single_face(n: &[u64]) -> SncModel {
    let ids: Vec<String> = (0..n.len()).map(|i| format!("E{i}")).collect();
    let mut text = format!("[model]\nname = \"face\"\ndimension = {}\np = 1\nm = 1\nlog_smooth = true\n", n.len() - 1);
    for (id, k) in ids.iter().zip(n) {
        text += &format!("[[component]]\nid = \"{id}\"\nmultiplicity = {k}\ntheta_order = 0\n");
    }
    // every nonempty subset is a stratum; counts are irrelevant here beyond the degree rule
    for mask in 1u32..(1 << n.len()) {
        let set: Vec<&String> = ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s).collect();
        let deg = n.len() - set.len();
        let mut coeffs = vec![0i64; deg + 1];
        coeffs[deg] = 1;
        text += &format!("[[stratum]]\ncomponents = {set:?}\ncount_poly = {coeffs:?}\n");
    }
    skelmeas::parse_model(&text).expect("simplex model")
}

#[test]
fn interior_lattice_points_match_denumerants() {
    for n in [vec![1, 1], vec![2, 3], vec![1, 2, 3], vec![2, 2, 4], vec![1, 1, 2, 3]] {
        let m = single_face(&n);
        let top = m.strata.len() - 1;
        let shift: u64 = n.iter().sum();
        for e in 1..=30u64 {
            let interior = face_lattice_points(&m, top, e).len() as u128;
            assert_eq!(interior, denumerant(&n, e as i64 - shift as i64), "N = {n:?}, e = {e}");
            let closed = lattice_points(&m, &SubComplex::full(&m), e).len() as u128;
            assert_eq!(closed, denumerant(&n, e as i64), "N = {n:?}, e = {e}");
        }
    }
}

#[test]
fn lattice_counts_extrapolate_to_volumes() {
    for n in [vec![1u64, 2, 3], vec![2, 2, 2], vec![1, 3], vec![1, 1, 2, 2]] {
        let d = n.len() as i32 - 1;
        let vol = face_volume_snc(&n);
        let vol = vol.numer().to_string().parse::<f64>().unwrap() / vol.denom().to_string().parse::<f64>().unwrap();
        let ratios: Vec<f64> =
            [120u64, 240, 480].iter().map(|&e| denumerant(&n, e as i64) as f64 / (e as f64).powi(d)).collect();
        let errs: Vec<f64> = ratios.iter().map(|r| (r - vol).abs() / vol).collect();
        // Richardson step removes the 1/e term
        let extrapolated = 2.0 * ratios[2] - ratios[1];
        assert!((extrapolated - vol).abs() / vol < 1e-3, "N = {n:?}: extrapolated {extrapolated} vs {vol}");
        assert!(errs[2] < 0.02, "N = {n:?}: relative error {errs:?}");
        assert!(errs[0] >= errs[1] && errs[1] >= errs[2], "N = {n:?}: errors do not decay {errs:?}");
        // first-order error: halving the mesh roughly halves the gap
        if errs[1] > 0.0 {
            assert!(errs[2] / errs[1] < 0.6, "N = {n:?}: {errs:?}");
        }
    }
}

/// `∫ hat_j dλ^s` on a curve model: each edge at `E_j` contributes `tdeg·ℓ/2`.
fn hat_integral_oracle(m: &SncModel, j: usize) -> Rat {
    let id = &m.components[j].id;
    m.strata
        .iter()
        .filter(|s| s.components.len() == 2 && s.components.iter().any(|c| c == id))
        .map(|s| {
            let ns: Vec<u64> = s.components.iter().map(|c| m.components[m.component_index(c).unwrap()].multiplicity).collect();
            rint(s.tdeg) * face_volume_snc(&ns) / rint(2)
        })
        .sum()
}

#[test]
fn hat_integrals_and_riemann_sums() {
    for name in ["tate_triangle", "kodaira_In(3)", "kodaira_Istar(1)", "kodaira_IV"] {
        let m = builtin_model(name, 1, None).unwrap();
        let full = SubComplex::full(&m);
        let mu = stable_measure(&m, &full).unwrap();
        for j in 0..m.components.len() {
            let phi = TestFunction::hat(&m, j);
            let exact = integrate(&m, &mu, &phi).unwrap();
            assert_eq!(exact, hat_integral_oracle(&m, j), "{name}, component {j}");
            // Riemann sums on (1/e)ℤ-points: error at most one mesh cell per edge end
            let mut prev = None;
            for e in [6u64, 12, 24, 48] {
                let approx = discrete_approximation(&m, &full, e, true).integrate(&m, &phi).unwrap();
                let gap = (approx - &exact).abs();
                assert!(gap <= rint(m.strata.len() as u64) / rint(e), "{name}: gap {gap} at e = {e}");
                if let Some(p) = prev {
                    assert!(gap <= p, "{name}: gap grew at e = {e}");
                }
                prev = Some(gap);
            }
        }
    }
}

#[test]
fn affine_test_function_on_a_triangle() {
    // u ↦ 1 + u₀ on {u₀ + 2u₁ + 3u₂ = 1}: mean value at the centroid (1/3, 1/6, 1/9)
    let m = single_face(&[1, 2, 3]);
    let top = m.strata.len() - 1;
    let mut phi = TestFunction::default();
    for s in 0..m.strata.len() {
        let cs = m.stratum_components(s);
        let mut coeffs = vec![Rat::one()];
        coeffs.extend(cs.iter().map(|&j| if j == 0 { Rat::one() } else { Rat::zero() }));
        phi.faces.insert(s, coeffs);
    }
    let mu = stable_measure(&m, &SubComplex::closure(&m, [top])).unwrap();
    let vol = face_volume_snc(&[1, 2, 3]);
    assert_eq!(vol, rat(1, 12));
    assert_eq!(integrate(&m, &mu, &phi).unwrap(), vol * rat(4, 3));
}

/// `#{x² + y² = 1}` over `F_p` by direct modular arithmetic.
fn circle_mod_p(p: u64) -> u64 {
    let mut n = 0;
    for x in 0..p {
        for y in 0..p {
            if (x * x + y * y) % p == 1 % p {
                n += 1;
            }
        }
    }
    n
}

#[test]
fn circle_counts_over_prime_fields() {
    let circle = VarietySpec::parse(&["x^2+y^2-1"], None, None, false, 1).unwrap();
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let f = FiniteField::new(p, 1).unwrap();
        let n = count_points(&circle, &f).unwrap();
        assert_eq!(n, circle_mod_p(p), "p = {p}");
        let sign: i64 = if p % 4 == 1 { 1 } else { -1 };
        assert_eq!(n as i64, p as i64 - sign, "p = {p}");
    }
}

#[test]
fn projective_plane_counts() {
    // P² minus a line is A²; a smooth conic has q + 1 points
    let plane = VarietySpec::parse(&["0"], None, Some(&["x", "y", "z"]), true, 2).unwrap();
    let conic = VarietySpec::parse(&["x*z-y^2"], None, Some(&["x", "y", "z"]), true, 1).unwrap();
    for (p, m) in [(2u64, 1u32), (2, 3), (3, 2), (5, 1)] {
        let f = FiniteField::new(p, m).unwrap();
        let q = f.order();
        assert_eq!(count_points(&plane, &f).unwrap(), q * q + q + 1);
        assert_eq!(count_points(&conic, &f).unwrap(), q + 1);
    }
}
