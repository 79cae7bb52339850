//! Faces of the skeleton with their integral affine structure, lattice
//! points, the weight function, the Kontsevich–Soibelman skeleton and the
//! temperate part.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactcore::{rint, Rat};
use crate::measures::face_volume;
use crate::model::SncModel;

/// The simplex `{u ≥ 0 : Σ μ_j u_j = 1}` of one stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub stratum: usize,
    /// Component indices, increasing.
    pub comps: Vec<usize>,
    /// `μ_j = N_j / c_j`; equals the multiplicity `N_j` on snc-models.
    pub mu: Vec<Rat>,
}

impl Face {
    pub fn of(model: &SncModel, stratum: usize) -> Face {
        let comps = model.stratum_components(stratum);
        let mu = comps
            .iter()
            .map(|&j| {
                let c = &model.components[j];
                Rat::new(c.multiplicity.into(), c.lattice_index.into())
            })
            .collect();
        Face { stratum, comps, mu }
    }

    pub fn dim(&self) -> usize {
        self.comps.len() - 1
    }

    /// Barycentric coordinates of the vertex of the `k`-th component.
    pub fn vertex(&self, k: usize) -> Vec<Rat> {
        (0..self.comps.len())
            .map(|i| if i == k { self.mu[i].recip() } else { Rat::zero() })
            .collect()
    }

    pub fn centroid(&self) -> Vec<Rat> {
        let k = rint(self.comps.len() as u64);
        self.mu.iter().map(|m| (m * &k).recip()).collect()
    }

    /// Generator of the ℤ-module spanned by the `μ_j`.
    pub fn mu_gcd(&self) -> Rat {
        let l = self.mu.iter().fold(BigInt::one(), |acc, m| acc.lcm(m.denom()));
        let g = self.mu.iter().fold(BigInt::zero(), |acc, m| acc.gcd(&(m * Rat::from_integer(l.clone())).to_integer()));
        Rat::new(g, l)
    }
}

/// A point of the skeleton: a face and barycentric coordinates on it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SkPoint {
    pub face: usize,
    pub u: Vec<Rat>,
}

impl SkPoint {
    /// Checks the point lies on the closed face and moves it to its minimal face.
    pub fn canonical(&self, model: &SncModel) -> Result<SkPoint> {
        let f = checked_face(model, self)?;
        if self.u.iter().all(|x| x.is_positive()) {
            return Ok(self.clone());
        }
        let keep: Vec<usize> = (0..f.comps.len()).filter(|&i| self.u[i].is_positive()).collect();
        let want: Vec<usize> = keep.iter().map(|&i| f.comps[i]).collect();
        let face = model
            .subfaces(self.face)
            .into_iter()
            .find(|&s| model.stratum_components(s) == want)
            .ok_or_else(|| Error::PointNotOnModel("minimal face is not declared".into()))?;
        Ok(SkPoint { face, u: keep.iter().map(|&i| self.u[i].clone()).collect() })
    }

    /// Coordinate of component `j` (zero if `j` is not in the face).
    pub fn coord(&self, model: &SncModel, j: usize) -> Rat {
        let comps = model.stratum_components(self.face);
        comps.iter().position(|&c| c == j).map_or_else(Rat::zero, |i| self.u[i].clone())
    }

    pub fn label(&self, model: &SncModel) -> String {
        let f = model.stratum_label(self.face);
        let u: Vec<String> = self.u.iter().map(|x| x.to_string()).collect();
        format!("{f}@({})", u.join(","))
    }
}

fn checked_face(model: &SncModel, x: &SkPoint) -> Result<Face> {
    if x.face >= model.strata.len() {
        return Err(Error::PointNotOnModel(format!("no face #{}", x.face)));
    }
    let f = Face::of(model, x.face);
    if f.comps.len() != x.u.len() {
        return Err(Error::PointNotOnModel(format!("face #{} needs {} coordinates", x.face, f.comps.len())));
    }
    if x.u.iter().any(|v| v.is_negative()) {
        return Err(Error::PointNotOnModel("negative coordinate".into()));
    }
    let s: Rat = f.mu.iter().zip(&x.u).map(|(m, v)| m * v).sum();
    if !s.is_one() {
        return Err(Error::PointNotOnModel(format!("Σ μ_j u_j = {s}, expected 1")));
    }
    Ok(f)
}

/// A downward-closed set of faces.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SubComplex {
    faces: BTreeSet<usize>,
    dim: i64,
}

impl SubComplex {
    pub fn empty() -> Self {
        SubComplex { faces: BTreeSet::new(), dim: -1 }
    }

    pub fn full(model: &SncModel) -> Self {
        Self::closure(model, 0..model.strata.len())
    }

    /// Smallest subcomplex containing the given faces.
    pub fn closure<I: IntoIterator<Item = usize>>(model: &SncModel, faces: I) -> Self {
        let mut set = BTreeSet::new();
        for s in faces {
            set.extend(model.subfaces(s));
        }
        let dim = set.iter().map(|&s| model.stratum_components(s).len() as i64 - 1).max().unwrap_or(-1);
        SubComplex { faces: set, dim }
    }

    pub fn faces(&self) -> impl Iterator<Item = usize> + '_ {
        self.faces.iter().copied()
    }

    pub fn contains(&self, s: usize) -> bool {
        self.faces.contains(&s)
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Maximal face dimension, or −1 when empty.
    pub fn dim(&self) -> i64 {
        self.dim
    }

    pub fn is_subset(&self, other: &SubComplex) -> bool {
        self.faces.is_subset(&other.faces)
    }

    /// Faces of dimension `dim()`.
    pub fn top_faces(&self, model: &SncModel) -> Vec<usize> {
        self.faces().filter(|&s| model.stratum_components(s).len() as i64 - 1 == self.dim).collect()
    }

    pub fn labels(&self, model: &SncModel) -> Vec<String> {
        self.faces().map(|s| model.stratum_label(s)).collect()
    }
}

/// `(1/m)·Σ_j (w_j/c_j)·u_j`; the vertex of `E_i` has weight `w_i/(m·N_i)`.
pub fn weight_at(model: &SncModel, x: &SkPoint) -> Result<Rat> {
    let f = checked_face(model, x)?;
    Ok(weight_on_face(model, &f, &x.u))
}

pub(crate) fn weight_on_face(model: &SncModel, f: &Face, u: &[Rat]) -> Rat {
    let s: Rat = f
        .comps
        .iter()
        .zip(u)
        .map(|(&j, v)| {
            let c = &model.components[j];
            Rat::new(c.theta_order.into(), c.lattice_index.into()) * v
        })
        .sum();
    s / rint(model.m)
}

pub fn vertex_weight(model: &SncModel, j: usize) -> Rat {
    let c = &model.components[j];
    Rat::new(c.theta_order.into(), (c.multiplicity * model.m).into())
}

pub fn min_weight(model: &SncModel) -> Rat {
    (0..model.components.len()).map(|j| vertex_weight(model, j)).min().expect("model has components")
}

/// θ-essential faces (all vertices of minimal weight, not horizontal) and their subfaces.
pub fn ks_skeleton(model: &SncModel) -> SubComplex {
    let w = min_weight(model);
    let essential = (0..model.strata.len()).filter(|&s| {
        !model.strata[s].horizontal && model.stratum_components(s).iter().all(|&j| vertex_weight(model, j) == w)
    });
    SubComplex::closure(model, essential.collect::<Vec<_>>())
}

/// Root index of the face: `gcd_j N_j` on snc-models.
pub fn root_index(model: &SncModel, s: usize) -> u64 {
    Face::of(model, s).mu_gcd().numer().to_u64().expect("root index fits u64")
}

/// Root index of an snc face with multiplicities `n`.
pub fn root_index_of(n: &[u64]) -> u64 {
    n.iter().fold(0, |a, b| a.gcd(b))
}

/// Solutions `a ∈ ℤ^k_{>0}` of `Σ w_i a_i = t`, in lexicographic order.
pub(crate) fn positive_solutions(w: &[BigInt], t: &BigInt) -> Vec<Vec<BigInt>> {
    fn go(w: &[BigInt], t: &BigInt, min_rest: &[BigInt], cur: &mut Vec<BigInt>, out: &mut Vec<Vec<BigInt>>) {
        let k = cur.len();
        if k + 1 == w.len() {
            let (q, r) = t.div_rem(&w[k]);
            if r.is_zero() && q.is_positive() {
                cur.push(q);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let mut a = BigInt::one();
        loop {
            let rest = t - &w[k] * &a;
            if rest < min_rest[k + 1] {
                break;
            }
            cur.push(a.clone());
            go(w, &rest, min_rest, cur, out);
            cur.pop();
            a += 1;
        }
    }
    let mut min_rest = vec![BigInt::zero(); w.len() + 1];
    for i in (0..w.len()).rev() {
        min_rest[i] = &min_rest[i + 1] + &w[i];
    }
    let mut out = vec![];
    if !w.is_empty() && t >= &min_rest[0] {
        go(w, t, &min_rest, &mut vec![], &mut out);
    }
    out
}

/// Interior `(1/e)ℤ`-points of one face.
pub fn face_lattice_points(model: &SncModel, s: usize, e: u64) -> Vec<SkPoint> {
    let f = Face::of(model, s);
    let l = f.mu.iter().fold(BigInt::one(), |acc, m| acc.lcm(m.denom()));
    let lr = Rat::from_integer(l.clone());
    let w: Vec<BigInt> = f.mu.iter().map(|m| (m * &lr).to_integer()).collect();
    let t = BigInt::from(e) * l;
    let er = rint(e);
    positive_solutions(&w, &t)
        .into_iter()
        .map(|a| SkPoint { face: s, u: a.into_iter().map(|x| Rat::from_integer(x) / &er).collect() })
        .collect()
}

/// All `(1/e)ℤ`-integral points of `c`, each once on its minimal face, ordered by face then coordinates.
pub fn lattice_points(model: &SncModel, c: &SubComplex, e: u64) -> Vec<SkPoint> {
    assert!(e >= 1, "e must be positive");
    let faces: Vec<usize> = c.faces().collect();
    faces.par_iter().map(|&s| face_lattice_points(model, s, e)).collect::<Vec<_>>().concat()
}

/// Every coordinate has denominator prime to `p` (always true for `p = 1`).
pub fn is_zp_integral(x: &SkPoint, p: u64) -> bool {
    p == 1 || x.u.iter().all(|v| (v.denom() % BigInt::from(p)).is_positive())
}

/// Closure of the faces of `base` with root index prime to `p` and separable components.
pub fn temperate_part(model: &SncModel, base: &SubComplex) -> SubComplex {
    let good: Vec<usize> = base
        .faces()
        .filter(|&s| {
            let tame = model.p == 1 || !root_index(model, s).is_multiple_of(model.p);
            tame && model.stratum_components(s).iter().all(|&j| model.components[j].separable)
        })
        .collect();
    SubComplex::closure(model, good)
}

/// Tame degree of the stratum of the minimal face containing `x`.
pub fn tame_degree(model: &SncModel, x: &SkPoint) -> Result<u64> {
    let c = x.canonical(model)?;
    Ok(model.strata[c.face].tdeg)
}

/// Lattice length from the vertex of component `j` to `x` along an edge containing both.
pub fn edge_distance_from_vertex(model: &SncModel, x: &SkPoint, j: usize) -> Result<Rat> {
    let c = x.canonical(model)?;
    let f = Face::of(model, c.face);
    match f.dim() {
        0 if f.comps[0] == j => Ok(Rat::zero()),
        0 => {
            let edge = (0..model.strata.len())
                .find(|&s| {
                    let cs = model.stratum_components(s);
                    cs.len() == 2 && cs.contains(&j) && cs.contains(&f.comps[0])
                })
                .ok_or_else(|| Error::PointNotOnModel("vertex not adjacent".into()))?;
            Ok(face_volume(model, edge))
        }
        1 => {
            let k = f.comps.iter().position(|&c| c == j).ok_or_else(|| Error::PointNotOnModel("edge does not contain the vertex".into()))?;
            Ok(face_volume(model, c.face) * (Rat::one() - &f.mu[k] * &c.u[k]))
        }
        _ => Err(Error::PointNotOnModel("distance is only defined along edges".into())),
    }
}

/// Lattice distance from `x` to the nearest vertex of `target` sharing a face with it.
pub fn distance_to_complex(model: &SncModel, x: &SkPoint, target: &SubComplex) -> Option<Rat> {
    let c = x.canonical(model).ok()?;
    if target.contains(c.face) {
        return Some(Rat::zero());
    }
    target
        .faces()
        .filter_map(|s| {
            let cs = model.stratum_components(s);
            (cs.len() == 1).then(|| edge_distance_from_vertex(model, &c, cs[0]).ok()).flatten()
        })
        .min()
}
