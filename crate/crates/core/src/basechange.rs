//! Normalized base change, the lattice-point correspondence, Shilov
//! boundaries and Shilov measures.
//!
//! After a base change of ramification index `e`, the face of a stratum is
//! `{v ≥ 0 : Σ (μ_j/e) v_j = 1}` with integral points `v ∈ ℤ^J`. Writing
//! `μ_j/e = N'_j/c'_j` in lowest terms gives the new multiplicity `N'_j`
//! and lattice index `c'_j`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactcore::{rint, Rat};
use crate::measures::{integrate, stable_measure, DiscreteMeasure, TestFunction};
use crate::model::{Component, SncModel, Stratum};
use crate::skeleton::{
    distance_to_complex, ks_skeleton, lattice_points, tame_degree, temperate_part, weight_at, SkPoint,
    SubComplex,
};

/// Ramification index `e` and residue degree `f`; the degree is `e·f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionParams {
    pub e: u64,
    pub f: u64,
}

impl ExtensionParams {
    pub fn new(e: u64, f: u64) -> Self {
        assert!(e >= 1 && f >= 1, "e and f must be positive");
        ExtensionParams { e, f }
    }

    pub fn degree(&self) -> u64 {
        self.e * self.f
    }
}

/// Errors unless `e` is prime to `p` or the model is log smooth.
pub fn check_tame(model: &SncModel, e: u64) -> Result<()> {
    if model.p != 1 && e.is_multiple_of(model.p) && !model.log_smooth {
        return Err(Error::WildExtension { e, p: model.p });
    }
    Ok(())
}

/// The base-changed model together with the original stratum of each new stratum.
pub fn base_change_with_origin(model: &SncModel, ext: ExtensionParams) -> Result<(SncModel, Vec<usize>)> {
    let ExtensionParams { e, f } = ext;
    if e == 0 || f == 0 {
        return Err(Error::InvalidParams("e and f must be positive".into()));
    }
    check_tame(model, e)?;
    let q = match model.q {
        None => None,
        Some(q) => Some(q.checked_pow(f as u32).ok_or_else(|| Error::InvalidParams(format!("q^f = {q}^{f} overflows")))?),
    };

    // Number of copies of each stratum: full split when its pieces become
    // rational, otherwise as many as forced by split subfaces.
    let ns = model.strata.len();
    let mut order: Vec<usize> = (0..ns).collect();
    order.sort_by_key(|&s| model.stratum_components(s).len());
    let mut copies = vec![1u64; ns];
    for &s in &order {
        let st = &model.strata[s];
        copies[s] = if f % st.split_degree == 0 {
            st.tdeg
        } else {
            model.subfaces(s).into_iter().filter(|&t| t != s).fold(1, |acc, t| acc.lcm(&copies[t]))
        };
        if !st.tdeg.is_multiple_of(copies[s]) {
            return Err(Error::InvalidSplit {
                stratum: model.stratum_label(s),
                reason: format!("{} copies do not divide tdeg {}", copies[s], st.tdeg),
            });
        }
    }

    let comp_copies: Vec<u64> = (0..model.components.len())
        .map(|j| model.vertex_stratum(j).map_or(1, |s| copies[s]))
        .collect();
    let copy_id = |j: usize, r: u64| -> String {
        let id = &model.components[j].id;
        if comp_copies[j] > 1 {
            format!("{id}#{}", (r - 1) % comp_copies[j] + 1)
        } else {
            id.clone()
        }
    };

    let mut components = vec![];
    for (j, c) in model.components.iter().enumerate() {
        let g = e.gcd(&c.multiplicity);
        for r in 1..=comp_copies[j] {
            components.push(Component {
                id: copy_id(j, r),
                multiplicity: c.multiplicity / g,
                theta_order: c.theta_order * (e / g) as i64,
                separable: c.separable,
                lattice_index: c.lattice_index * (e / g),
            });
        }
    }

    let mut strata = vec![];
    let mut origin = vec![];
    for (s, st) in model.strata.iter().enumerate() {
        let k = copies[s];
        let count_poly = st.count_poly.div_exact(&BigInt::from(k)).ok_or_else(|| Error::InvalidSplit {
            stratum: model.stratum_label(s),
            reason: format!("count polynomial {} is not divisible by {k}", st.count_poly),
        })?;
        let split_degree = if f % st.split_degree == 0 { 1 } else { st.split_degree / st.split_degree.gcd(&f) };
        let comps = model.stratum_components(s);
        for r in 1..=k {
            strata.push(Stratum {
                components: comps.iter().map(|&j| copy_id(j, r)).collect(),
                count_poly: count_poly.clone(),
                tdeg: st.tdeg / k,
                split_degree,
                horizontal: st.horizontal,
            });
            origin.push(s);
        }
    }

    let out = SncModel {
        name: model.name.clone(),
        dimension: model.dimension,
        p: model.p,
        q,
        m: model.m,
        log_smooth: model.log_smooth,
        components,
        strata,
    }
    .validated()
    .map_err(|err| Error::InvalidSplit { stratum: model.name.clone(), reason: err.to_string() })?;
    Ok((out, origin))
}

/// Normalized base change to an extension with parameters `ext`.
pub fn base_change(model: &SncModel, ext: ExtensionParams) -> Result<SncModel> {
    base_change_with_origin(model, ext).map(|(m, _)| m)
}

/// Whether `ℤ`-points of the base change and `(1/e)ℤ`-points of `model` correspond
/// bijectively face by face under `u = v/e`.
pub fn lattice_correspondence_check(model: &SncModel, e: u64) -> Result<bool> {
    let (bc, origin) = base_change_with_origin(model, ExtensionParams::new(e, 1))?;
    let er = rint(e);
    let mut mapped: Vec<SkPoint> = lattice_points(&bc, &SubComplex::full(&bc), 1)
        .into_iter()
        .map(|x| SkPoint { face: origin[x.face], u: x.u.iter().map(|v| v / &er).collect() })
        .collect();
    let mut original = lattice_points(model, &SubComplex::full(model), e);
    mapped.sort();
    original.sort();
    let injective = mapped.windows(2).all(|w| w[0] != w[1]);
    Ok(injective && mapped == original)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShilovResult {
    pub e: u64,
    pub points: Vec<SkPoint>,
    /// Minimal weight in base-field units; `None` stands for `+∞` (no lattice points).
    pub ord_min_base: Option<Rat>,
    /// `Σ tdeg(x)·δ_x` over the Shilov points.
    pub measure: DiscreteMeasure,
}

impl ShilovResult {
    /// Minimal order in units of the extension's valuation (`e` times the base value).
    pub fn ord_min_extension(&self) -> Option<Rat> {
        self.ord_min_base.as_ref().map(|w| w * rint(self.e))
    }
}

/// Points of minimal weight among all `(1/e)ℤ`-points of the skeleton.
pub fn shilov_boundary(model: &SncModel, e: u64) -> Result<ShilovResult> {
    check_tame(model, e)?;
    Ok(weight_argmin(model, e))
}

/// The weight-argmin construction without the tameness precondition. For wild
/// `e` on a model that is not log smooth this is only a combinatorial object.
pub fn weight_argmin(model: &SncModel, e: u64) -> ShilovResult {
    let pts = lattice_points(model, &SubComplex::full(model), e);
    let weighted: Vec<(SkPoint, Rat)> = pts
        .into_iter()
        .map(|x| {
            let w = weight_at(model, &x).expect("lattice points lie on the model");
            (x, w)
        })
        .collect();
    let Some(min) = weighted.iter().map(|(_, w)| w.clone()).min() else {
        return ShilovResult { e, points: vec![], ord_min_base: None, measure: DiscreteMeasure::default() };
    };
    let points: Vec<SkPoint> = weighted.into_iter().filter(|(_, w)| *w == min).map(|(x, _)| x).collect();
    let atoms = points
        .iter()
        .map(|x| (x.clone(), rint(tame_degree(model, x).expect("valid point"))))
        .collect();
    ShilovResult { e, points, ord_min_base: Some(min), measure: DiscreteMeasure { atoms } }
}

/// One `e` of a Shilov-measure sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShilovRow {
    pub e: u64,
    /// `e` is divisible by `p` and the model is not log smooth: the row is the
    /// weight argmin only, outside the range where it computes a Shilov boundary.
    pub wild: bool,
    pub result: ShilovResult,
    /// Total mass divided by `e^{dim Sk(X,θ)}`.
    pub scaled_total: Rat,
    /// Total mass divided by `e^{dim Sk^t(X,θ)}` (with dimension −1 when empty).
    pub scaled_total_t: Rat,
    /// `max_φ |∫φ d(scaled) − ∫φ dλ^s|` against the stable measure on `Sk(X,θ)`.
    pub distance: Rat,
    /// Same against the stable measure on `Sk^t(X,θ)` (zero measure when empty).
    pub distance_t: Rat,
    /// Largest lattice distance from a Shilov point to `Sk(X,θ)`, when measurable along edges.
    pub max_distance_to_ks: Option<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShilovReport {
    pub dim_ks: i64,
    pub dim_temperate: i64,
    /// Set when `Sk^t(X,θ)` is empty: the λ^t normalization uses dimension −1 and no limit is asserted.
    pub temperate_empty: bool,
    pub rows: Vec<ShilovRow>,
}

fn pow_signed(e: u64, d: i64) -> Rat {
    let p = Rat::from_integer(BigInt::from(e).pow(d.unsigned_abs() as u32));
    if d >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Shilov measures for each `e`, scaled by `e^{-dim}` and compared with stable Lebesgue targets.
/// Wild values of `e` are kept and flagged (see [`ShilovRow::wild`]).
pub fn shilov_convergence(model: &SncModel, e_list: &[u64], phis: &[TestFunction]) -> Result<ShilovReport> {
    if e_list.contains(&0) {
        return Err(Error::InvalidParams("e must be positive".into()));
    }
    let ks = ks_skeleton(model);
    let tp = temperate_part(model, &ks);
    let target = |c: &SubComplex| -> Result<Vec<Rat>> {
        if c.is_empty() {
            return Ok(vec![Rat::zero(); phis.len()]);
        }
        let mu = stable_measure(model, c)?;
        phis.iter().map(|phi| integrate(model, &mu, phi)).collect()
    };
    let t_ks = target(&ks)?;
    let t_tp = target(&tp)?;
    let rows = e_list
        .par_iter()
        .map(|&e| -> Result<ShilovRow> {
            let wild = check_tame(model, e).is_err();
            let result = weight_argmin(model, e);
            let total = result.measure.total();
            let k1 = pow_signed(e, ks.dim()).recip();
            let k2 = pow_signed(e, tp.dim()).recip();
            let mut distance = Rat::zero();
            let mut distance_t = Rat::zero();
            for (i, phi) in phis.iter().enumerate() {
                let v = result.measure.integrate(model, phi)?;
                distance = distance.max((&v * &k1 - &t_ks[i]).abs());
                distance_t = distance_t.max((&v * &k2 - &t_tp[i]).abs());
            }
            let max_distance_to_ks = result
                .points
                .iter()
                .map(|x| distance_to_complex(model, x, &ks))
                .collect::<Option<Vec<_>>>()
                .and_then(|v| v.into_iter().max());
            Ok(ShilovRow {
                e,
                wild,
                scaled_total: &total * &k1,
                scaled_total_t: &total * &k2,
                result,
                distance,
                distance_t,
                max_distance_to_ks,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShilovReport { dim_ks: ks.dim(), dim_temperate: tp.dim(), temperate_empty: tp.is_empty(), rows })
}


/// Per-face Shilov mass, keyed by face label (used for per-edge summaries).
pub fn mass_by_face(model: &SncModel, mu: &DiscreteMeasure) -> BTreeMap<String, Rat> {
    let mut out = BTreeMap::new();
    for (x, m) in &mu.atoms {
        *out.entry(model.stratum_label(x.face)).or_insert_with(Rat::zero) += m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::{rat, CountPoly};
    use crate::model::builtin_model;
    use crate::skeleton::{min_weight, vertex_weight};

    #[test]
    fn multiplicities_after_base_change() {
        let single = crate::model::SncModel {
            name: "v".into(),
            dimension: 0,
            p: 1,
            q: None,
            m: 1,
            log_smooth: true,
            components: vec![Component::new("A", 6, 1)],
            strata: vec![Stratum::new(&["A"], CountPoly::new([1]))],
        };
        assert_eq!(base_change(&single, ExtensionParams::new(4, 1)).unwrap().components[0].multiplicity, 3);
        assert_eq!(base_change(&single, ExtensionParams::new(6, 1)).unwrap().components[0].multiplicity, 1);
        let t = builtin_model("kodaira_IV", 5, Some(5)).unwrap();
        assert_eq!(base_change(&t, ExtensionParams::new(1, 1)).unwrap(), t);
    }

    #[test]
    fn wild_extension_rejected() {
        let iv = builtin_model("kodaira_IV", 3, None).unwrap();
        assert!(matches!(base_change(&iv, ExtensionParams::new(3, 1)), Err(Error::WildExtension { .. })));
        let tate = builtin_model("tate_triangle", 2, None).unwrap();
        assert!(base_change(&tate, ExtensionParams::new(2, 1)).is_ok());
    }

    #[test]
    fn correspondence_examples() {
        let t = builtin_model("tate_triangle", 1, None).unwrap();
        assert!(lattice_correspondence_check(&t, 3).unwrap());
        let bc = base_change(&t, ExtensionParams::new(3, 1)).unwrap();
        assert_eq!(lattice_points(&bc, &SubComplex::full(&bc), 1).len(), 9);
        let iv = builtin_model("kodaira_IV", 2, None).unwrap();
        assert!(lattice_correspondence_check(&iv, 3).unwrap());
        let bc = base_change(&iv, ExtensionParams::new(3, 1)).unwrap();
        assert_eq!(bc.components[0].multiplicity, 1);
        assert!(lattice_correspondence_check(&iv, 1).unwrap());
    }

    #[test]
    fn weights_scale() {
        let iv = builtin_model("kodaira_IV", 2, None).unwrap();
        let bc = base_change(&iv, ExtensionParams::new(3, 1)).unwrap();
        for j in 0..iv.components.len() {
            assert_eq!(vertex_weight(&bc, j), vertex_weight(&iv, j) * rint(3));
        }
        assert_eq!(min_weight(&bc), rint(-1));
    }

    #[test]
    fn shilov_type_iv() {
        let iv = builtin_model("kodaira_IV", 2, None).unwrap();
        let s = shilov_boundary(&iv, 3).unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.ord_min_base, Some(rat(-1, 3)));
        assert_eq!(s.ord_min_extension(), Some(rint(-1)));
        let iv = builtin_model("kodaira_IV", 3, None).unwrap();
        let s = shilov_boundary(&iv, 4).unwrap();
        assert_eq!(s.points.len(), 3);
        assert_eq!(s.ord_min_base, Some(rat(-1, 4)));
        let s = shilov_boundary(&iv, 2).unwrap();
        assert_eq!(s.ord_min_base, Some(rint(0)));
        assert!(s.points.iter().all(|x| iv.stratum_label(x.face).starts_with('L')));
    }

    #[test]
    fn shilov_empty_when_no_lattice_points() {
        let m = SncModel {
            name: "double".into(),
            dimension: 0,
            p: 1,
            q: None,
            m: 1,
            log_smooth: true,
            components: vec![Component::new("A", 2, 0)],
            strata: vec![Stratum::new(&["A"], CountPoly::new([1]))],
        };
        let s = shilov_boundary(&m, 1).unwrap();
        assert!(s.points.is_empty() && s.ord_min_base.is_none());
    }

    #[test]
    fn splitting_follows_split_degree() {
        let mut m = builtin_model("tate_triangle", 1, None).unwrap();
        // the edge E1+E2 consists of two conjugate points over a quadratic extension
        m.strata[3].count_poly = CountPoly::new([2]);
        m.strata[3].tdeg = 2;
        m.strata[3].split_degree = 2;
        let m = m.validated().unwrap();
        let odd = base_change(&m, ExtensionParams::new(1, 3)).unwrap();
        assert_eq!(odd.strata.len(), 6);
        let even = base_change(&m, ExtensionParams::new(1, 2)).unwrap();
        assert_eq!(even.strata.len(), 7);
        assert!(even.strata.iter().all(|s| s.tdeg == 1));
        let two_step = base_change(&base_change(&m, ExtensionParams::new(2, 1)).unwrap(), ExtensionParams::new(1, 2)).unwrap();
        assert_eq!(two_step, base_change(&m, ExtensionParams::new(2, 2)).unwrap());
    }
}
