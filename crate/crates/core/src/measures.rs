//! Integral Lebesgue and stable measures on subcomplexes, face volumes,
//! piecewise-affine test functions and discrete approximations.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exactcore::{parse_rat, rint, Rat};
use crate::model::SncModel;
use crate::skeleton::{lattice_points, tame_degree, Face, SkPoint, SubComplex};

pub(crate) fn factorial(d: usize) -> BigInt {
    (1..=d as u64).fold(BigInt::one(), |a, b| a * b)
}

/// Integral Lebesgue volume of a face: `gcd(N)/(d!·ΠN)` on snc faces, 1 for vertices.
pub fn face_volume(model: &SncModel, s: usize) -> Rat {
    let f = Face::of(model, s);
    let prod: Rat = f.mu.iter().product();
    f.mu_gcd() / (prod * Rat::from_integer(factorial(f.dim())))
}

/// Volume of the snc simplex `{Σ N_j u_j = 1}`.
pub fn face_volume_snc(n: &[u64]) -> Rat {
    assert!(!n.is_empty() && n.iter().all(|&x| x > 0));
    let g = n.iter().fold(0u64, |a, b| a.gcd(b));
    let prod = n.iter().fold(BigInt::one(), |a, &b| a * b);
    Rat::new(g.into(), prod * factorial(n.len() - 1))
}

/// Density times the integral Lebesgue measure on each top-dimensional face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeMeasure {
    pub dim: i64,
    pub density: BTreeMap<usize, Rat>,
}

impl PolytopeMeasure {
    pub fn total_mass(&self, model: &SncModel) -> Rat {
        self.density.iter().map(|(&s, d)| d * face_volume(model, s)).sum()
    }

    /// Mass of a single face (zero if it carries no density).
    pub fn face_mass(&self, model: &SncModel, s: usize) -> Rat {
        self.density.get(&s).map_or_else(Rat::zero, |d| d * face_volume(model, s))
    }

    pub fn zero() -> Self {
        PolytopeMeasure { dim: -1, density: BTreeMap::new() }
    }
}

pub fn lebesgue_measure(model: &SncModel, c: &SubComplex) -> Result<PolytopeMeasure> {
    if c.is_empty() {
        return Err(Error::EmptyComplex);
    }
    let density = c.top_faces(model).into_iter().map(|s| (s, Rat::one())).collect();
    Ok(PolytopeMeasure { dim: c.dim(), density })
}

/// Lebesgue measure weighted by the tame degree of each top face.
pub fn stable_measure(model: &SncModel, c: &SubComplex) -> Result<PolytopeMeasure> {
    if c.is_empty() {
        return Err(Error::EmptyComplex);
    }
    let density = c.top_faces(model).into_iter().map(|s| (s, rint(model.strata[s].tdeg))).collect();
    Ok(PolytopeMeasure { dim: c.dim(), density })
}

/// Per-face affine functions `c₀ + Σ c_j u_j` (coefficients in face component order).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TestFunction {
    pub faces: BTreeMap<usize, Vec<Rat>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum RatLit {
    Int(i64),
    Str(String),
}

impl RatLit {
    pub(crate) fn to_rat(&self) -> Result<Rat> {
        match self {
            RatLit::Int(i) => Ok(rint(*i)),
            RatLit::Str(s) => parse_rat(s),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTestFunction {
    #[serde(default)]
    constant: Option<RatLit>,
    #[serde(default)]
    faces: BTreeMap<String, Vec<RatLit>>,
}

impl TestFunction {
    pub fn constant(model: &SncModel, c: Rat) -> Self {
        let faces = (0..model.strata.len())
            .map(|s| {
                let k = model.stratum_components(s).len();
                let mut v = vec![Rat::zero(); k + 1];
                v[0] = c.clone();
                (s, v)
            })
            .collect();
        TestFunction { faces }
    }

    /// The tent function of component `j`: `μ_j u_j` on faces containing `j`, zero elsewhere.
    pub fn hat(model: &SncModel, j: usize) -> Self {
        let faces = (0..model.strata.len())
            .map(|s| {
                let f = Face::of(model, s);
                let mut v = vec![Rat::zero(); f.comps.len() + 1];
                if let Some(i) = f.comps.iter().position(|&c| c == j) {
                    v[i + 1] = f.mu[i].clone();
                }
                (s, v)
            })
            .collect();
        TestFunction { faces }
    }

    /// Reads `constant = "c"` and/or a `[faces]` table of `label = [c0, c1, ...]`.
    pub fn from_toml(model: &SncModel, text: &str) -> Result<Self> {
        let raw: RawTestFunction = toml::from_str(text).map_err(|e| Error::Parse(format!("TOML: {e}")))?;
        let mut tf = match &raw.constant {
            Some(c) => TestFunction::constant(model, c.to_rat()?),
            None => TestFunction::default(),
        };
        for (label, coeffs) in &raw.faces {
            let s = model
                .stratum_by_label(label)
                .ok_or_else(|| Error::Parse(format!("unknown face {label:?}")))?;
            let k = model.stratum_components(s).len();
            if coeffs.len() != k + 1 {
                return Err(Error::Parse(format!("face {label:?} needs {} coefficients", k + 1)));
            }
            tf.faces.insert(s, coeffs.iter().map(RatLit::to_rat).collect::<Result<_>>()?);
        }
        Ok(tf)
    }

    fn eval_on(&self, s: usize, u: &[Rat]) -> Rat {
        let c = &self.faces[&s];
        &c[0] + c[1..].iter().zip(u).map(|(a, b)| a * b).sum::<Rat>()
    }

    /// Value at `x`, read off any defined face containing `x`'s minimal face.
    pub fn eval(&self, model: &SncModel, x: &SkPoint) -> Result<Rat> {
        let x = x.canonical(model)?;
        if self.faces.contains_key(&x.face) {
            return Ok(self.eval_on(x.face, &x.u));
        }
        let xs = model.stratum_components(x.face);
        for &s in self.faces.keys() {
            if model.subfaces(s).contains(&x.face) {
                let u: Vec<Rat> = model.stratum_components(s).iter().map(|&j| {
                    xs.iter().position(|&c| c == j).map_or_else(Rat::zero, |i| x.u[i].clone())
                }).collect();
                return Ok(self.eval_on(s, &u));
            }
        }
        Err(Error::UndefinedTestFunction(model.stratum_label(x.face)))
    }

    /// Faces where two definitions disagree on a shared subface (vertices and edge midpoints).
    pub fn inconsistencies(&self, model: &SncModel) -> Vec<String> {
        let mut out = vec![];
        let defined: Vec<usize> = self.faces.keys().copied().collect();
        for (i, &a) in defined.iter().enumerate() {
            for &b in &defined[i + 1..] {
                let sa = model.subfaces(a);
                for s in model.subfaces(b).into_iter().filter(|s| sa.contains(s)) {
                    let f = Face::of(model, s);
                    let mut probes: Vec<Vec<Rat>> = (0..f.comps.len()).map(|k| f.vertex(k)).collect();
                    for x in 0..f.comps.len() {
                        for y in x + 1..f.comps.len() {
                            probes.push(
                                f.vertex(x).iter().zip(f.vertex(y)).map(|(p, q)| (p + q) / rint(2)).collect(),
                            );
                        }
                    }
                    for u in probes {
                        let lift = |t: usize| -> Vec<Rat> {
                            model.stratum_components(t).iter().map(|&j| {
                                f.comps.iter().position(|&c| c == j).map_or_else(Rat::zero, |i| u[i].clone())
                            }).collect()
                        };
                        if self.eval_on(a, &lift(a)) != self.eval_on(b, &lift(b)) {
                            out.push(format!(
                                "{} vs {} on {}",
                                model.stratum_label(a),
                                model.stratum_label(b),
                                model.stratum_label(s)
                            ));
                            break;
                        }
                    }
                }
            }
        }
        out
    }
}

/// `∫φ dμ`, exact by the centroid rule on each carrying face.
pub fn integrate(model: &SncModel, mu: &PolytopeMeasure, phi: &TestFunction) -> Result<Rat> {
    let mut acc = Rat::zero();
    for (&s, d) in &mu.density {
        let f = Face::of(model, s);
        let x = SkPoint { face: s, u: f.centroid() };
        let v = phi.eval(model, &x).map_err(|_| Error::UndefinedTestFunction(model.stratum_label(s)))?;
        acc += d * face_volume(model, s) * v;
    }
    Ok(acc)
}

/// Finite atomic measure with exact rational masses.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiscreteMeasure {
    pub atoms: Vec<(SkPoint, Rat)>,
}

impl DiscreteMeasure {
    pub fn total(&self) -> Rat {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    pub fn integrate(&self, model: &SncModel, phi: &TestFunction) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (x, m) in &self.atoms {
            acc += m * phi.eval(model, x)?;
        }
        Ok(acc)
    }

    /// Mass carried by the closed face `s`.
    pub fn closed_face_mass(&self, model: &SncModel, s: usize) -> Rat {
        let subs = model.subfaces(s);
        self.atoms.iter().filter(|(x, _)| subs.contains(&x.face)).map(|(_, m)| m).sum()
    }

    pub fn scale(&self, k: &Rat) -> DiscreteMeasure {
        DiscreteMeasure { atoms: self.atoms.iter().map(|(x, m)| (x.clone(), m * k)).collect() }
    }
}

/// Mass `e^{-d}` (times the tame degree if `stable`) at each `(1/e)ℤ`-point of the closed top faces of `c`.
pub fn discrete_approximation(model: &SncModel, c: &SubComplex, e: u64, stable: bool) -> DiscreteMeasure {
    if c.is_empty() {
        return DiscreteMeasure::default();
    }
    let support = SubComplex::closure(model, c.top_faces(model));
    let w = Rat::new(BigInt::one(), BigInt::from(e).pow(c.dim() as u32));
    let atoms = lattice_points(model, &support, e)
        .into_iter()
        .map(|x| {
            let m = if stable { &w * rint(tame_degree(model, &x).expect("lattice point is valid")) } else { w.clone() };
            (x, m)
        })
        .collect();
    DiscreteMeasure { atoms }
}

/// Whether every density of `a` is at most the corresponding density of `b`.
pub fn dominated_by(a: &PolytopeMeasure, b: &PolytopeMeasure) -> bool {
    a.density.iter().all(|(s, d)| b.density.get(s).is_some_and(|e| d <= e))
        && b.density.values().all(|d| !d.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::rat;
    use crate::model::builtin_model;
    use crate::skeleton::ks_skeleton;

    #[test]
    fn volumes() {
        assert_eq!(face_volume_snc(&[3, 1]), rat(1, 3));
        assert_eq!(face_volume_snc(&[1, 1]), rint(1));
        assert_eq!(face_volume_snc(&[1, 1, 2]), rat(1, 4));
        assert_eq!(face_volume_snc(&[5]), rint(1));
        let m = builtin_model("kodaira_IV", 3, None).unwrap();
        for s in 4..7 {
            assert_eq!(face_volume(&m, s), rat(1, 3));
        }
    }

    #[test]
    fn lebesgue_examples() {
        let t = builtin_model("tate_triangle", 2, None).unwrap();
        let full = SubComplex::full(&t);
        assert_eq!(lebesgue_measure(&t, &full).unwrap().total_mass(&t), rint(3));
        assert_eq!(stable_measure(&t, &full).unwrap(), lebesgue_measure(&t, &full).unwrap());
        let iv = builtin_model("kodaira_IV", 3, None).unwrap();
        let l = lebesgue_measure(&iv, &ks_skeleton(&iv)).unwrap();
        assert_eq!(l.dim, 0);
        assert_eq!(l.total_mass(&iv), rint(1));
        let s = builtin_model("kodaira_Istar(2)", 2, None).unwrap();
        assert_eq!(lebesgue_measure(&s, &ks_skeleton(&s)).unwrap().total_mass(&s), rint(1));
        assert!(matches!(lebesgue_measure(&s, &SubComplex::empty()), Err(Error::EmptyComplex)));
    }

    #[test]
    fn integration_examples() {
        let t = builtin_model("tate_triangle", 2, None).unwrap();
        let full = SubComplex::full(&t);
        let leb = lebesgue_measure(&t, &full).unwrap();
        assert_eq!(integrate(&t, &leb, &TestFunction::constant(&t, rint(1))).unwrap(), rint(3));
        let edge = SubComplex::closure(&t, [3]);
        let mu = lebesgue_measure(&t, &edge).unwrap();
        let phi = TestFunction { faces: BTreeMap::from([(3, vec![rint(0), rint(1), rint(0)])]) };
        assert_eq!(integrate(&t, &mu, &phi).unwrap(), rat(1, 2));
        let iv = builtin_model("kodaira_IV", 3, None).unwrap();
        let e = SubComplex::closure(&iv, [4]);
        let mu = lebesgue_measure(&iv, &e).unwrap();
        let phi = TestFunction { faces: BTreeMap::from([(4, vec![rint(2), rint(1), rint(0)])]) };
        assert_eq!(integrate(&iv, &mu, &phi).unwrap(), rat(13, 18));
        let empty = TestFunction::default();
        assert!(matches!(integrate(&iv, &mu, &empty), Err(Error::UndefinedTestFunction(_))));
    }

    #[test]
    fn discrete_examples() {
        let t = builtin_model("tate_triangle", 2, None).unwrap();
        let d = discrete_approximation(&t, &SubComplex::full(&t), 4, false);
        assert_eq!(d.atoms.len(), 12);
        assert!(d.atoms.iter().all(|(_, m)| *m == rat(1, 4)));
        assert_eq!(d.total(), rint(3));
        let iv = builtin_model("kodaira_IV", 3, None).unwrap();
        let d = discrete_approximation(&iv, &ks_skeleton(&iv), 3, false);
        assert_eq!(d.total(), rint(1));
    }

    #[test]
    fn test_function_toml_and_consistency() {
        let t = builtin_model("tate_triangle", 2, None).unwrap();
        let phi = TestFunction::from_toml(&t, "constant = 1\n[faces]\n\"E1+E2\" = [\"1\", \"1/2\", 0]\n").unwrap();
        let bad = phi.inconsistencies(&t);
        assert_eq!(bad.len(), 2);
        assert!(bad.iter().all(|b| b.ends_with("on E1")));
        let ok = TestFunction::from_toml(&t, "[faces]\n\"E1+E2\" = [0, 1, 0]\n\"E2+E3\" = [0, 0, 0]\n").unwrap();
        assert!(ok.inconsistencies(&t).is_empty());
        assert!(TestFunction::from_toml(&t, "[faces]\n\"E1+E9\" = [0, 1, 0]\n").is_err());
        for j in 0..3 {
            assert!(TestFunction::hat(&t, j).inconsistencies(&t).is_empty());
        }
    }
}
