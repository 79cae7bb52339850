//! snc-models as weighted dual complexes: data types, validation, the
//! TOML/JSON file format and the built-in Kodaira/Tate fixtures.
//!
//! A stratum with component set `J` gives the face
//! `{u ∈ ℝ^J_{≥0} : Σ μ_j u_j = 1}` with `μ_j = N_j / c_j`, where `c_j` is the
//! component's `lattice_index` (1 for an snc-model; larger values only appear
//! after normalized base change). Integral points are `u ∈ ℤ^J`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactcore::CountPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub id: String,
    pub multiplicity: u64,
    /// Order of θ along the component, relative to the log canonical bundle.
    pub theta_order: i64,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub separable: bool,
    /// Position `c` of the vertex `u = c/N` on its ray; 1 for snc-models.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub lattice_index: u64,
}

impl Component {
    pub fn new(id: &str, multiplicity: u64, theta_order: i64) -> Self {
        Component { id: id.into(), multiplicity, theta_order, separable: true, lattice_index: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub components: Vec<String>,
    /// `|E°(k')|` as a polynomial in `t = |k'|`.
    pub count_poly: CountPoly,
    pub tdeg: u64,
    pub split_degree: u64,
    pub horizontal: bool,
}

impl Stratum {
    pub fn new(components: &[&str], count_poly: CountPoly) -> Self {
        let tdeg = count_poly.leading().to_u64().unwrap_or(1).max(1);
        Stratum {
            components: components.iter().map(|s| s.to_string()).collect(),
            count_poly,
            tdeg,
            split_degree: 1,
            horizontal: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SncModel {
    pub name: String,
    pub dimension: u32,
    /// Residue characteristic exponent: 1 in characteristic zero.
    pub p: u64,
    pub q: Option<u64>,
    pub m: u64,
    pub log_smooth: bool,
    pub components: Vec<Component>,
    pub strata: Vec<Stratum>,
}

/// One violated invariant, naming the offending object and rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub subject: String,
    pub rule: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.subject, self.rule, self.detail)
    }
}

fn yes() -> bool {
    true
}
fn one() -> u64 {
    1
}
fn is_true(b: &bool) -> bool {
    *b
}
fn is_one(x: &u64) -> bool {
    *x == 1
}
fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHeader {
    name: String,
    dimension: u32,
    p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<u64>,
    m: u64,
    log_smooth: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStratum {
    components: Vec<String>,
    count_poly: Vec<i64>,
    #[serde(default = "one")]
    tdeg: u64,
    #[serde(default = "one")]
    split_degree: u64,
    #[serde(default, skip_serializing_if = "is_false")]
    horizontal: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    model: RawHeader,
    #[serde(default)]
    component: Vec<Component>,
    #[serde(default)]
    stratum: Vec<RawStratum>,
}

/// Parses a TOML (or JSON, detected by a leading `{`) model document and validates it.
pub fn parse_model(text: &str) -> Result<SncModel> {
    let raw: RawDoc = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("JSON: {e}")))?
    } else {
        toml::from_str(text).map_err(|e| Error::Parse(format!("TOML: {e}")))?
    };
    let model = SncModel {
        name: raw.model.name,
        dimension: raw.model.dimension,
        p: raw.model.p,
        q: raw.model.q,
        m: raw.model.m,
        log_smooth: raw.model.log_smooth,
        components: raw.component,
        strata: raw
            .stratum
            .into_iter()
            .map(|s| Stratum {
                components: s.components,
                count_poly: CountPoly::new(s.count_poly),
                tdeg: s.tdeg,
                split_degree: s.split_degree,
                horizontal: s.horizontal,
            })
            .collect(),
    };
    model.validated()
}

pub fn load_model(path: &std::path::Path) -> Result<SncModel> {
    parse_model(&std::fs::read_to_string(path)?)
}

impl SncModel {
    /// Returns `self` if [`validate`] reports nothing.
    pub fn validated(self) -> Result<SncModel> {
        let v = validate(&self);
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::Validation(v))
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.raw()?).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.raw()?).map_err(|e| Error::Parse(e.to_string()))
    }

    fn raw(&self) -> Result<RawDoc> {
        let strata = self
            .strata
            .iter()
            .map(|s| {
                let count_poly = s
                    .count_poly
                    .coeffs()
                    .iter()
                    .map(|c| c.to_i64().ok_or_else(|| Error::Parse("count coefficient exceeds i64".into())))
                    .collect::<Result<_>>()?;
                Ok(RawStratum {
                    components: s.components.clone(),
                    count_poly,
                    tdeg: s.tdeg,
                    split_degree: s.split_degree,
                    horizontal: s.horizontal,
                })
            })
            .collect::<Result<_>>()?;
        Ok(RawDoc {
            model: RawHeader {
                name: self.name.clone(),
                dimension: self.dimension,
                p: self.p,
                q: self.q,
                m: self.m,
                log_smooth: self.log_smooth,
            },
            component: self.components.clone(),
            stratum: strata,
        })
    }

    pub fn component_index(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    /// Component indices of a stratum, in declaration order.
    pub fn stratum_components(&self, s: usize) -> Vec<usize> {
        let mut v: Vec<usize> =
            self.strata[s].components.iter().filter_map(|id| self.component_index(id)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Human-readable face label: component ids joined by `+`, with `#k` for repeated sets.
    pub fn stratum_label(&self, s: usize) -> String {
        let key = self.stratum_components(s);
        let same: Vec<usize> =
            (0..self.strata.len()).filter(|&t| self.stratum_components(t) == key).collect();
        let base = key.iter().map(|&j| self.components[j].id.as_str()).collect::<Vec<_>>().join("+");
        if same.len() > 1 {
            let k = same.iter().position(|&t| t == s).unwrap() + 1;
            format!("{base}#{k}")
        } else {
            base
        }
    }

    pub fn stratum_by_label(&self, label: &str) -> Option<usize> {
        (0..self.strata.len()).find(|&s| self.stratum_label(s) == label)
    }

    /// Strata whose faces are subfaces of `s` (including `s`), resolved by component sets.
    pub fn subfaces(&self, s: usize) -> Vec<usize> {
        let key = self.stratum_components(s);
        let by_set = self.strata_by_set();
        let mut out = vec![];
        let k = key.len();
        for mask in 1u64..(1u64 << k) {
            let sub: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| key[i]).collect();
            if sub.len() == k {
                out.push(s);
            } else if let Some(v) = by_set.get(&sub) {
                out.push(v[0]);
            }
        }
        out.sort_unstable();
        out
    }

    pub(crate) fn strata_by_set(&self) -> HashMap<Vec<usize>, Vec<usize>> {
        let mut map: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for s in 0..self.strata.len() {
            map.entry(self.stratum_components(s)).or_default().push(s);
        }
        map
    }

    /// Stratum index of the vertex of component `j`.
    pub fn vertex_stratum(&self, j: usize) -> Option<usize> {
        (0..self.strata.len()).find(|&s| self.stratum_components(s) == [j])
    }

    /// `(Σ_S |E_S°|, Σ_S |E_S°|·(t-1)^{dim face S})` as polynomials in `t`.
    pub fn stratification_sums(&self) -> (CountPoly, CountPoly) {
        let zero = CountPoly::new(Vec::<BigInt>::new());
        let mut plain = zero.clone();
        let mut weighted = zero;
        for (i, s) in self.strata.iter().enumerate() {
            let d = self.stratum_components(i).len() - 1;
            plain = plain.add(&s.count_poly);
            weighted = weighted.add(&s.count_poly.mul(&CountPoly::t_minus_one_pow(d)));
        }
        (plain, weighted)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some((prime, k))` if `n = prime^k` with `k ≥ 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            break;
        }
        d += 1;
    }
    if d * d > n {
        return Some((n, 1));
    }
    let (mut x, mut k) = (n, 0);
    while x % d == 0 {
        x /= d;
        k += 1;
    }
    (x == 1).then_some((d, k))
}

/// Checks every model invariant; an empty list means the model is valid.
pub fn validate(m: &SncModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut bad = |subject: String, rule: &'static str, detail: String| {
        out.push(Violation { subject, rule, detail })
    };
    let hdr = format!("model {:?}", m.name);
    if m.m == 0 {
        bad(hdr.clone(), "pluricanonical-order", "m must be at least 1".into());
    }
    if m.p != 1 && !is_prime(m.p) {
        bad(hdr.clone(), "residue-characteristic", format!("p = {} is neither 1 nor prime", m.p));
    }
    if let Some(q) = m.q {
        match prime_power(q) {
            None => bad(hdr.clone(), "residue-cardinality", format!("q = {q} is not a prime power")),
            Some((r, _)) if m.p != 1 && r != m.p => {
                bad(hdr.clone(), "residue-cardinality", format!("q = {q} is not a power of p = {}", m.p))
            }
            _ => {}
        }
    }

    let mut seen = BTreeSet::new();
    for c in &m.components {
        let subj = format!("component {:?}", c.id);
        if c.id.is_empty() {
            bad(subj.clone(), "component-id", "empty id".into());
        }
        if !seen.insert(c.id.clone()) {
            bad(subj.clone(), "component-id", "duplicate id".into());
        }
        if c.multiplicity == 0 {
            bad(subj.clone(), "multiplicity", "N must be at least 1".into());
        }
        if c.lattice_index == 0 || (c.multiplicity > 0 && c.lattice_index.gcd(&c.multiplicity) != 1) {
            bad(subj, "lattice-index", format!("c = {} must be positive and coprime to N", c.lattice_index));
        }
    }

    let n = m.dimension as usize;
    let declared: BTreeSet<&str> = m.components.iter().map(|c| c.id.as_str()).collect();
    let mut sets: BTreeMap<BTreeSet<String>, Vec<usize>> = BTreeMap::new();
    for (i, s) in m.strata.iter().enumerate() {
        let subj = format!("stratum #{i} {{{}}}", s.components.join(","));
        let set: BTreeSet<String> = s.components.iter().cloned().collect();
        if s.components.is_empty() {
            bad(subj.clone(), "nonempty", "component set J is empty".into());
            continue;
        }
        if set.len() != s.components.len() {
            bad(subj.clone(), "component-set", "repeated component id".into());
        }
        for id in &s.components {
            if !declared.contains(id.as_str()) {
                bad(subj.clone(), "declared-components", format!("component {id:?} is not declared"));
            }
        }
        let k = set.len();
        if k > n + 1 {
            bad(subj.clone(), "dimension", format!("|J| = {k} exceeds n + 1 = {}", n + 1));
        } else {
            let want = n + 1 - k;
            match s.count_poly.degree() {
                Some(d) if d == want => {}
                d => bad(
                    subj.clone(),
                    "dimension",
                    format!("deg(count_poly) = {} but n - (|J| - 1) = {want}", d.map_or("-inf".into(), |d| d.to_string())),
                ),
            }
        }
        if s.tdeg == 0 {
            bad(subj.clone(), "tame-degree", "tdeg must be at least 1".into());
        } else if !s.count_poly.is_zero() && s.count_poly.leading() != BigInt::from(s.tdeg) {
            bad(
                subj.clone(),
                "leading-coefficient",
                format!("leading coefficient {} differs from tdeg = {}", s.count_poly.leading(), s.tdeg),
            );
        }
        if s.split_degree == 0 {
            bad(subj.clone(), "split-degree", "split_degree must be at least 1".into());
        }
        sets.entry(set).or_default().push(i);
    }

    for c in &m.components {
        let key = BTreeSet::from([c.id.clone()]);
        match sets.get(&key).map_or(0, Vec::len) {
            1 => {}
            0 => bad(format!("component {:?}", c.id), "vertex-stratum", "no singleton stratum".into()),
            k => bad(format!("component {:?}", c.id), "vertex-stratum", format!("{k} singleton strata")),
        }
    }

    for (set, idxs) in &sets {
        let ids: Vec<&String> = set.iter().collect();
        let k = ids.len();
        if k > 20 || ids.iter().any(|id| !m.components.iter().any(|c| &c.id == *id)) {
            continue;
        }
        for mask in 1u64..(1u64 << k) - 1 {
            let sub: BTreeSet<String> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| ids[i].clone()).collect();
            let subj = format!("stratum {{{}}}", ids.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(","));
            match sets.get(&sub) {
                None => bad(
                    subj,
                    "downward-closure",
                    format!("subset {{{}}} has no declared stratum", sub.iter().cloned().collect::<Vec<_>>().join(",")),
                ),
                Some(v) if v.len() > 1 && sub.len() > 1 => bad(
                    subj,
                    "incidence",
                    format!(
                        "subset {{{}}} is declared {} times, so the incidence is ambiguous",
                        sub.iter().cloned().collect::<Vec<_>>().join(","),
                        v.len()
                    ),
                ),
                Some(v) => {
                    let lo = &m.strata[v[0]];
                    for &i in idxs {
                        let hi = &m.strata[i];
                        let subj = format!("stratum #{i} {{{}}}", hi.components.join(","));
                        if lo.horizontal && !hi.horizontal {
                            bad(subj.clone(), "horizontal", format!("subface #{} is horizontal but this face is not", v[0]));
                        }
                        if lo.tdeg > 0 && !hi.tdeg.is_multiple_of(lo.tdeg) {
                            bad(subj.clone(), "tdeg-divisibility", format!("subface #{} has tdeg {} not dividing {}", v[0], lo.tdeg, hi.tdeg));
                        }
                        if lo.split_degree > 0 && !hi.split_degree.is_multiple_of(lo.split_degree) {
                            bad(subj, "split-divisibility", format!("subface #{} has split_degree {} not dividing {}", v[0], lo.split_degree, hi.split_degree));
                        }
                    }
                }
            }
        }
    }
    out
}

/// The named fixtures: `tate_triangle`, `kodaira_In(n)`, `kodaira_Istar(r)`, `kodaira_IV`.
///
/// Point counts assume every stratum is split over the residue field, and
/// `log_smooth` is set exactly when every multiplicity is prime to `p`.
pub fn builtin_model(name: &str, p: u64, q: Option<u64>) -> Result<SncModel> {
    let (base, arg) = match name.split_once('(') {
        Some((b, rest)) => {
            let a = rest
                .strip_suffix(')')
                .and_then(|a| a.trim().parse::<u32>().ok())
                .ok_or_else(|| Error::InvalidParams(format!("bad parameter in {name:?}")))?;
            (b.trim(), Some(a))
        }
        None => (name.trim(), None),
    };
    let poly = |c: &[i64]| CountPoly::new(c.iter().copied());
    let (components, strata): (Vec<Component>, Vec<Stratum>) = match (base, arg) {
        ("tate_triangle", None) => cycle(&["E1", "E2", "E3"]),
        ("kodaira_In", Some(0)) => return Err(Error::InvalidParams("kodaira_In needs n >= 1".into())),
        ("kodaira_In", Some(1)) => {
            // The nodal fiber is not snc; blow up the node.
            let comps = vec![Component::new("C", 1, 0), Component::new("E", 2, 0)];
            let strata = vec![
                Stratum::new(&["C"], poly(&[-1, 1])),
                Stratum::new(&["E"], poly(&[-1, 1])),
                Stratum::new(&["C", "E"], poly(&[1])),
                Stratum::new(&["C", "E"], poly(&[1])),
            ];
            (comps, strata)
        }
        ("kodaira_In", Some(2)) => {
            let comps = vec![Component::new("C1", 1, 0), Component::new("C2", 1, 0)];
            let strata = vec![
                Stratum::new(&["C1"], poly(&[-1, 1])),
                Stratum::new(&["C2"], poly(&[-1, 1])),
                Stratum::new(&["C1", "C2"], poly(&[1])),
                Stratum::new(&["C1", "C2"], poly(&[1])),
            ];
            (comps, strata)
        }
        ("kodaira_In", Some(n)) => {
            let ids: Vec<String> = (1..=n).map(|i| format!("C{i}")).collect();
            cycle(&ids.iter().map(String::as_str).collect::<Vec<_>>())
        }
        ("kodaira_Istar", Some(r)) => {
            let mut comps: Vec<Component> = (1..=4).map(|i| Component::new(&format!("L{i}"), 1, 0)).collect();
            comps.extend((0..=r).map(|i| Component::new(&format!("D{i}"), 2, -1)));
            let mut strata = vec![];
            for i in 1..=4 {
                strata.push(Stratum::new(&[&format!("L{i}")], poly(&[0, 1])));
            }
            for i in 0..=r {
                // points of the chain component met by other components
                let meets = if r == 0 { 4 } else if i == 0 || i == r { 3 } else { 2 };
                strata.push(Stratum::new(&[&format!("D{i}")], poly(&[1 - meets, 1])));
            }
            for i in 0..r {
                strata.push(Stratum::new(&[&format!("D{i}"), &format!("D{}", i + 1)], poly(&[1])));
            }
            for (leaf, d) in [(1, 0), (2, 0), (3, r), (4, r)] {
                strata.push(Stratum::new(&[&format!("L{leaf}"), &format!("D{d}")], poly(&[1])));
            }
            (comps, strata)
        }
        ("kodaira_IV", None) => {
            let mut comps = vec![Component::new("E0", 3, -1)];
            comps.extend((1..=3).map(|i| Component::new(&format!("L{i}"), 1, 0)));
            let mut strata = vec![Stratum::new(&["E0"], poly(&[-2, 1]))];
            for i in 1..=3 {
                strata.push(Stratum::new(&[&format!("L{i}")], poly(&[0, 1])));
            }
            for i in 1..=3 {
                strata.push(Stratum::new(&["E0", &format!("L{i}")], poly(&[1])));
            }
            (comps, strata)
        }
        _ => return Err(Error::UnknownModel(name.into())),
    };
    let log_smooth = p == 1 || components.iter().all(|c| c.multiplicity % p != 0);
    SncModel {
        name: name.trim().into(),
        dimension: 1,
        p,
        q,
        m: 1,
        log_smooth,
        components,
        strata,
    }
    .validated()
}

fn cycle(ids: &[&str]) -> (Vec<Component>, Vec<Stratum>) {
    let comps = ids.iter().map(|id| Component::new(id, 1, 0)).collect();
    let mut strata: Vec<Stratum> =
        ids.iter().map(|id| Stratum::new(&[id], CountPoly::new([-1, 1]))).collect();
    for i in 0..ids.len() {
        strata.push(Stratum::new(&[ids[i], ids[(i + 1) % ids.len()]], CountPoly::new([1])));
    }
    (comps, strata)
}

/// Number of strata per face dimension (index = dimension).
pub fn face_counts(m: &SncModel) -> Vec<usize> {
    let mut out = vec![0; m.dimension as usize + 1];
    for s in 0..m.strata.len() {
        let d = m.stratum_components(s).len() - 1;
        if d < out.len() {
            out[d] += 1;
        }
    }
    out
}
