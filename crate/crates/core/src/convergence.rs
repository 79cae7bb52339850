//! Exponentially weighted lattice sums over rational polytopes, integrals over
//! their vanishing faces, and an exact simulator of normalized p-adic measures
//! pushed forward to the skeleton.
//!
//! All masses are symbolic sums `Σ c·q^r` ([`QExpSum`]), so every finite `(e, f)`
//! is evaluated exactly; convergence is read off explicit distance sequences.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Deserialize;

use crate::basechange::{check_tame, shilov_boundary, ExtensionParams};
use crate::error::{Error, Result};
use crate::exactcore::{decimal, rint, CountPoly, MPoly, QExpSum, Rat, Value};
use crate::measures::{face_volume_snc, factorial, integrate, stable_measure, RatLit, TestFunction};
use crate::model::{prime_power, SncModel};
use crate::skeleton::{
    ks_skeleton, lattice_points, min_weight, positive_solutions, tame_degree, temperate_part, weight_at, SkPoint,
    SubComplex,
};

/// Bits of precision used when masses with irrational values are enclosed in intervals.
pub const PRECISION_BITS: u32 = 96;

const MAX_POINTS: u64 = 50_000_000;

/// Bounded rational polytope carrying the lattice sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    /// Product of closed rational intervals `[lo, hi]`.
    Box(Vec<(Rat, Rat)>),
    /// Simplex `{x ≥ 0 : Σ N_j x_j = 1}`.
    Face(Vec<u64>),
}

/// The face `τ` of the region on which `α` vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tau {
    Empty,
    /// A sub-box; fixed coordinates appear as degenerate intervals.
    Box(Vec<(Rat, Rat)>),
    /// Sub-simplex spanned by the listed vertices `e_j/N_j`.
    Face(Vec<usize>),
}

/// Data of the sum `S(e,f) = e^{-d} Σ_{x ∈ P ∩ (1/e)ℤ^n} φ(x) r^{-ef·α(x)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSumSpec {
    pub region: Region,
    /// Coefficients `a_j` of `α(x) = Σ a_j (x_j − q_j)`.
    pub alpha: Vec<Rat>,
    /// Offsets `q_j`.
    pub offsets: Vec<Rat>,
    /// Polynomial in `x1, …, xn`.
    pub phi: MPoly,
    pub r: Rat,
    /// Drop the points of `τ` from the sum (the off-`τ` part).
    pub exclude_tau: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    r: RatLit,
    #[serde(default)]
    exclude_tau: bool,
    #[serde(default)]
    phi: Option<String>,
    #[serde(default, rename = "box")]
    box_: Option<Vec<[RatLit; 2]>>,
    #[serde(default)]
    face: Option<Vec<u64>>,
    alpha: Vec<RatLit>,
    #[serde(default)]
    offsets: Option<Vec<RatLit>>,
}

fn coordinate_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn rats(v: &[RatLit]) -> Result<Vec<Rat>> {
    v.iter().map(RatLit::to_rat).collect()
}

impl WeightedSumSpec {
    /// Checks shapes, `r > 1`, boundedness and `α ≥ 0` on the region.
    pub fn new(
        region: Region,
        alpha: Vec<Rat>,
        offsets: Vec<Rat>,
        phi: MPoly,
        r: Rat,
        exclude_tau: bool,
    ) -> Result<Self> {
        let n = match &region {
            Region::Box(iv) => iv.len(),
            Region::Face(ns) => ns.len(),
        };
        let bad = |msg: String| Err(Error::Spec(msg));
        if n == 0 || n > 8 {
            return bad(format!("dimension {n} outside 1..=8"));
        }
        if alpha.len() != n || offsets.len() != n {
            return bad(format!("alpha and offsets need {n} entries"));
        }
        if r <= Rat::one() {
            return bad(format!("r = {r} must exceed 1"));
        }
        match &region {
            Region::Box(iv) => {
                if let Some((lo, hi)) = iv.iter().find(|(lo, hi)| lo > hi) {
                    return bad(format!("empty interval [{lo}, {hi}]"));
                }
            }
            Region::Face(ns) => {
                if ns.contains(&0) {
                    return bad("face multiplicities must be positive".into());
                }
            }
        }
        let phi = phi.with_vars(&coordinate_names(n))?;
        let spec = WeightedSumSpec { region, alpha, offsets, phi, r, exclude_tau };
        let min = spec.vertex_alphas().into_iter().min().expect("nonempty polytope");
        if min.is_negative() {
            return bad(format!("alpha takes the negative value {min} on the region"));
        }
        Ok(spec)
    }

    /// Reads `r`, `alpha`, optional `offsets`, `phi`, `exclude_tau` and one of `box` / `face`.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| Error::Parse(format!("TOML: {e}")))?;
        let region = match (&raw.box_, &raw.face) {
            (Some(b), None) => {
                Region::Box(b.iter().map(|[lo, hi]| Ok((lo.to_rat()?, hi.to_rat()?))).collect::<Result<_>>()?)
            }
            (None, Some(f)) => Region::Face(f.clone()),
            _ => return Err(Error::Spec("exactly one of `box` and `face` is required".into())),
        };
        let alpha = rats(&raw.alpha)?;
        let offsets = match &raw.offsets {
            Some(o) => rats(o)?,
            None => vec![Rat::zero(); alpha.len()],
        };
        let n = alpha.len();
        let phi = match &raw.phi {
            Some(text) => MPoly::parse_with_vars(text, &coordinate_names(n))?,
            None => MPoly::constant(Rat::one(), &coordinate_names(n)),
        };
        WeightedSumSpec::new(region, alpha, offsets, phi, raw.r.to_rat()?, raw.exclude_tau)
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha_at(&self, x: &[Rat]) -> Rat {
        self.alpha.iter().zip(x).zip(&self.offsets).map(|((a, xi), q)| a * (xi - q)).sum()
    }

    fn vertices(&self) -> Vec<Vec<Rat>> {
        match &self.region {
            Region::Box(iv) => (0..1u32 << iv.len())
                .map(|mask| {
                    iv.iter()
                        .enumerate()
                        .map(|(i, (lo, hi))| if mask >> i & 1 == 1 { hi.clone() } else { lo.clone() })
                        .collect()
                })
                .collect(),
            Region::Face(ns) => (0..ns.len())
                .map(|j| (0..ns.len()).map(|i| if i == j { Rat::new(1.into(), ns[j].into()) } else { Rat::zero() }).collect())
                .collect(),
        }
    }

    fn vertex_alphas(&self) -> Vec<Rat> {
        self.vertices().iter().map(|v| self.alpha_at(v)).collect()
    }

    /// The maximal face of the region on which `α` vanishes.
    pub fn tau(&self) -> Tau {
        let min = self.vertex_alphas().into_iter().min().expect("nonempty polytope");
        if min.is_positive() {
            return Tau::Empty;
        }
        match &self.region {
            Region::Box(iv) => Tau::Box(
                iv.iter()
                    .zip(&self.alpha)
                    .map(|((lo, hi), a)| {
                        if a.is_positive() {
                            (lo.clone(), lo.clone())
                        } else if a.is_negative() {
                            (hi.clone(), hi.clone())
                        } else {
                            (lo.clone(), hi.clone())
                        }
                    })
                    .collect(),
            ),
            Region::Face(_) => {
                let zero = self.vertex_alphas().iter().enumerate().filter(|(_, a)| a.is_zero()).map(|(j, _)| j).collect();
                Tau::Face(zero)
            }
        }
    }

    /// Dimension of `τ`, −1 when empty.
    pub fn tau_dim(&self) -> i64 {
        match self.tau() {
            Tau::Empty => -1,
            Tau::Box(iv) => iv.iter().filter(|(lo, hi)| lo < hi).count() as i64,
            Tau::Face(v) => v.len() as i64 - 1,
        }
    }

    /// Whether `τ` contains a point all of whose coordinates have denominators prime to `p`.
    pub fn tau_has_zp_point(&self, p: u64) -> bool {
        let prime_to_p = |x: &Rat| x.denom() % BigInt::from(p) != BigInt::zero();
        match (self.tau(), &self.region) {
            (Tau::Empty, _) => false,
            (Tau::Box(iv), _) => iv.iter().all(|(lo, hi)| lo < hi || prime_to_p(lo)),
            (Tau::Face(v), Region::Face(ns)) => v.iter().any(|&j| ns[j] % p != 0),
            (Tau::Face(_), Region::Box(_)) => unreachable!("simplicial tau only arises on faces"),
        }
    }

    /// Integer points `k` with `k/e` in the region.
    fn scaled_points(&self, e: u64) -> Result<Vec<Vec<BigInt>>> {
        let eb = BigInt::from(e);
        match &self.region {
            Region::Box(iv) => {
                let ranges: Vec<(BigInt, BigInt)> = iv
                    .iter()
                    .map(|(lo, hi)| ((lo * rint(e)).ceil().to_integer(), (hi * rint(e)).floor().to_integer()))
                    .collect();
                let total = ranges.iter().try_fold(1u64, |acc, (a, b)| {
                    let len = (b - a + 1u32).to_u64().unwrap_or(u64::MAX);
                    acc.checked_mul(len).filter(|&t| t <= MAX_POINTS)
                });
                if total.is_none() {
                    return Err(Error::InvalidParams(format!("more than {MAX_POINTS} lattice points at e = {e}")));
                }
                let mut out = vec![];
                let mut cur: Vec<BigInt> = ranges.iter().map(|(a, _)| a.clone()).collect();
                if ranges.iter().any(|(a, b)| a > b) {
                    return Ok(out);
                }
                loop {
                    out.push(cur.clone());
                    let mut i = 0;
                    loop {
                        if i == cur.len() {
                            return Ok(out);
                        }
                        if cur[i] < ranges[i].1 {
                            cur[i] += 1;
                            break;
                        }
                        cur[i] = ranges[i].0.clone();
                        i += 1;
                    }
                }
            }
            Region::Face(ns) => {
                let w: Vec<BigInt> = ns.iter().map(|&n| BigInt::from(n)).collect();
                let shift: BigInt = w.iter().sum();
                Ok(positive_solutions(&w, &(eb + shift))
                    .into_iter()
                    .map(|a| a.into_iter().map(|x| x - 1).collect())
                    .collect())
            }
        }
    }
}

/// Exact `S(e,f)` by enumerating `P ∩ (1/e)ℤ^n`, as a sum of powers of `r`.
pub fn lemma_sum_bruteforce(spec: &WeightedSumSpec, e: u64, f: u64) -> Result<QExpSum> {
    if e == 0 || f == 0 {
        return Err(Error::InvalidParams("e and f must be positive".into()));
    }
    let er = rint(e);
    let scale = pow_signed(e, -spec.tau_dim());
    let ef = rint(e * f);
    let terms = spec.scaled_points(e)?.into_iter().filter_map(|k| {
        let x: Vec<Rat> = k.into_iter().map(|v| Rat::from_integer(v) / &er).collect();
        let a = spec.alpha_at(&x);
        if spec.exclude_tau && a.is_zero() {
            return None;
        }
        Some((spec.phi.eval(&x) * &scale, -(&ef * a)))
    });
    Ok(QExpSum::from_terms(terms.collect::<Vec<_>>()))
}

/// `S(e,f)` evaluated at the base `r` of the sum.
pub fn lemma_sum_value(spec: &WeightedSumSpec, e: u64, f: u64) -> Result<Value> {
    lemma_sum_bruteforce(spec, e, f)?.eval(&spec.r, PRECISION_BITS)
}

/// The product formula `prefactor · (Π numᵢ/denᵢ − δ)` for the off-corner sum over a box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    /// `(1 + eN)^d / e^d`.
    pub prefactor: Rat,
    /// `r^{-f aᵢ(eN − e qᵢ + 1)} − r^{-f aᵢ(mᵢ − e qᵢ)}` with `mᵢ = ⌈e qᵢ⌉`.
    pub numerators: Vec<QExpSum>,
    /// `r^{-f aᵢ} − 1`.
    pub denominators: Vec<QExpSum>,
    /// Whether every `e qᵢ` is an integer.
    pub delta: bool,
}

impl ClosedForm {
    fn product(v: &[QExpSum]) -> QExpSum {
        v.iter().fold(QExpSum::constant(Rat::one()), |acc, x| acc.mul(x))
    }

    /// `prefactor · (Π num − δ·Π den)`, the value times `Π den`.
    pub fn cleared_numerator(&self) -> QExpSum {
        let den = Self::product(&self.denominators);
        let mut num = Self::product(&self.numerators);
        if self.delta {
            num = num.sub(&den);
        }
        num.scale(&self.prefactor)
    }

    /// Exact identity `value = sum` after clearing denominators.
    pub fn matches(&self, sum: &QExpSum) -> bool {
        sum.mul(&Self::product(&self.denominators)) == self.cleared_numerator()
    }

    pub fn eval(&self, r: &Rat, precision: u32) -> Result<Value> {
        let num = self.cleared_numerator().eval(r, precision + 8)?;
        let den = Self::product(&self.denominators).eval(r, precision + 8)?;
        if let (Some(n), Some(d)) = (num.exact(), den.exact()) {
            return Ok(Value::Exact(n / d));
        }
        if den.lo().is_positive() == den.hi().is_positive() && !den.lo().is_zero() && !den.hi().is_zero() {
            let cands = [num.lo() / den.lo(), num.lo() / den.hi(), num.hi() / den.lo(), num.hi() / den.hi()];
            let lo = cands.iter().min().expect("four candidates").clone();
            let hi = cands.iter().max().expect("four candidates").clone();
            return Ok(Value::Interval { lo, hi });
        }
        Err(Error::InvalidParams("denominator enclosure contains zero".into()))
    }
}

/// Closed-form evaluation on box specs `[0,N]^d × ([q_i,N] ∖ corner)` with `φ ≡ 1`.
pub fn lemma_sum_closedform(spec: &WeightedSumSpec, e: u64, f: u64) -> Result<ClosedForm> {
    let Region::Box(iv) = &spec.region else {
        return Err(Error::Spec("closed form needs a box region".into()));
    };
    if !spec.exclude_tau {
        return Err(Error::Spec("closed form computes the off-tau part; set exclude_tau".into()));
    }
    if spec.phi != MPoly::constant(Rat::one(), spec.phi.vars()) {
        return Err(Error::Spec("closed form needs phi = 1".into()));
    }
    let n_top = iv[0].1.clone();
    if !n_top.is_integer() || !n_top.is_positive() || iv.iter().any(|(_, hi)| *hi != n_top) {
        return Err(Error::Spec("all upper ends must equal a common positive integer N".into()));
    }
    let mut d = 0u32;
    let (mut numerators, mut denominators) = (vec![], vec![]);
    let mut delta = true;
    let (er, fr) = (rint(e), rint(f));
    let en = &er * &n_top;
    for (((lo, _), a), q) in iv.iter().zip(&spec.alpha).zip(&spec.offsets) {
        if a.is_zero() {
            if !lo.is_zero() {
                return Err(Error::Spec("coordinates with a_i = 0 must range over [0, N]".into()));
            }
            d += 1;
        } else if a.is_positive() {
            if lo != q {
                return Err(Error::Spec("coordinates with a_i > 0 must range over [q_i, N]".into()));
            }
            let eq = &er * q;
            let m = eq.ceil();
            delta &= eq.is_integer();
            let c = -(&fr * a);
            numerators.push(
                QExpSum::monomial(Rat::one(), &c * (&en - &eq + Rat::one()))
                    .sub(&QExpSum::monomial(Rat::one(), &c * (&m - &eq))),
            );
            denominators.push(QExpSum::monomial(Rat::one(), c).sub(&QExpSum::constant(Rat::one())));
        } else {
            return Err(Error::Spec("closed form needs a_i ≥ 0".into()));
        }
    }
    let prefactor = num_traits::pow(Rat::one() + &en, d as usize) / num_traits::pow(er, d as usize);
    Ok(ClosedForm { prefactor, numerators, denominators, delta })
}

/// `∫_τ φ dλ_τ` for the integral Lebesgue measure on the span of `τ`; zero when `τ` is empty.
pub fn tau_integral(spec: &WeightedSumSpec) -> Result<Rat> {
    if let Some(deg) = spec.phi.degree() {
        if deg > 2 {
            return Err(Error::UnsupportedDegree(deg));
        }
    }
    let mut acc = Rat::zero();
    match spec.tau() {
        Tau::Empty => {}
        Tau::Box(iv) => {
            for (exps, c) in spec.phi.terms() {
                let mut term = c.clone();
                for ((lo, hi), &k) in iv.iter().zip(exps) {
                    let k = k as usize;
                    term *= if lo < hi {
                        (num_traits::pow(hi.clone(), k + 1) - num_traits::pow(lo.clone(), k + 1)) / rint(k as u64 + 1)
                    } else {
                        num_traits::pow(lo.clone(), k)
                    };
                }
                acc += term;
            }
        }
        Tau::Face(verts) => {
            let Region::Face(ns) = &spec.region else { unreachable!("simplicial tau only arises on faces") };
            let sub: Vec<u64> = verts.iter().map(|&j| ns[j]).collect();
            let vol = face_volume_snc(&sub);
            let d = verts.len() - 1;
            for (exps, c) in spec.phi.terms() {
                if exps.iter().enumerate().any(|(j, &k)| k > 0 && !verts.contains(&j)) {
                    continue;
                }
                // Dirichlet moments in barycentric coordinates λ_j = N_j x_j.
                let total: usize = exps.iter().map(|&k| k as usize).sum();
                let mut term = c * &vol * Rat::from_integer(factorial(d)) / Rat::from_integer(factorial(d + total));
                for &j in &verts {
                    let k = exps[j] as usize;
                    term *= Rat::new(factorial(k), BigInt::from(ns[j]).pow(k as u32));
                }
                acc += term;
            }
        }
    }
    Ok(acc)
}

fn pow_signed(e: u64, d: i64) -> Rat {
    let p = Rat::from_integer(BigInt::from(e).pow(d.unsigned_abs() as u32));
    if d >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Which normalization and limit the simulated measures are compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `q^{wt_min·ef} / e^{dim Sk^t(X,θ)}`; target: stable Lebesgue measure on `Sk^t(X,θ)`.
    Tame,
    /// `q^{wt_min·ef} / e^{dim Sk(X,θ)}`; target: stable Lebesgue measure on `Sk(X,θ)`.
    LogSmooth,
    /// `e = 1`, `q^{ord_min·f}`; target: the Shilov measure.
    Unramified,
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tame" => Ok(Regime::Tame),
            "log-smooth" | "logsmooth" => Ok(Regime::LogSmooth),
            "unramified" => Ok(Regime::Unramified),
            _ => Err(Error::InvalidParams(format!("unknown regime {s:?} (tame, log-smooth, unramified)"))),
        }
    }
}

/// Lower and upper mass, equal unless the minimal stratum is horizontal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassBounds {
    pub lower: QExpSum,
    pub upper: QExpSum,
}

impl MassBounds {
    pub fn exact(m: QExpSum) -> Self {
        MassBounds { lower: m.clone(), upper: m }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn add(&self, other: &MassBounds) -> MassBounds {
        MassBounds { lower: self.lower.add(&other.lower), upper: self.upper.add(&other.upper) }
    }

    pub fn mul(&self, k: &QExpSum) -> MassBounds {
        MassBounds { lower: self.lower.mul(k), upper: self.upper.mul(k) }
    }

    /// Enclosure of the mass at base `q`.
    pub fn value(&self, q: &Rat) -> Result<Value> {
        let lo = self.lower.eval(q, PRECISION_BITS)?;
        if self.is_exact() {
            return Ok(lo);
        }
        let hi = self.upper.eval(q, PRECISION_BITS)?;
        Ok(Value::Interval { lo: lo.lo().clone(), hi: hi.hi().clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimAtom {
    pub point: SkPoint,
    pub weight: Rat,
    pub tdeg: u64,
    pub raw: MassBounds,
}

/// Per-lattice-point masses of the pushforward measure for one extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulatedMeasure {
    pub ext: ExtensionParams,
    pub q: u64,
    pub regime: Regime,
    /// Multiplier turning raw masses into normalized ones.
    pub normalization: QExpSum,
    pub atoms: Vec<SimAtom>,
}

impl SimulatedMeasure {
    pub fn normalized(&self, a: &SimAtom) -> MassBounds {
        a.raw.mul(&self.normalization)
    }

    pub fn raw_total(&self) -> MassBounds {
        self.atoms.iter().fold(MassBounds::exact(QExpSum::zero()), |acc, a| acc.add(&a.raw))
    }

    pub fn normalized_total(&self) -> MassBounds {
        self.raw_total().mul(&self.normalization)
    }

    /// Bounds for `∫φ dν` of the normalized measure.
    pub fn integrate(&self, model: &SncModel, phi: &TestFunction) -> Result<MassBounds> {
        let (mut lower, mut upper) = (QExpSum::zero(), QExpSum::zero());
        for a in &self.atoms {
            let v = phi.eval(model, &a.point)?;
            let m = self.normalized(a);
            let (lo, hi) = if v.is_negative() { (&m.upper, &m.lower) } else { (&m.lower, &m.upper) };
            lower = lower.add(&lo.scale(&v));
            upper = upper.add(&hi.scale(&v));
        }
        Ok(MassBounds { lower, upper })
    }

    /// Normalized mass carried by the closed face `s`.
    pub fn closed_face_mass(&self, model: &SncModel, s: usize) -> MassBounds {
        let subs = model.subfaces(s);
        self.atoms
            .iter()
            .filter(|a| subs.contains(&a.point.face))
            .fold(MassBounds::exact(QExpSum::zero()), |acc, a| acc.add(&self.normalized(a)))
    }
}

/// Checks that `q` is a prime power compatible with the residue characteristic.
pub fn check_q(model: &SncModel, q: u64) -> Result<()> {
    match prime_power(q) {
        Some((p, _)) if model.p == 1 || p == model.p => Ok(()),
        _ => Err(Error::InvalidParams(format!("q = {q} is not a power of p = {}", model.p))),
    }
}

/// Raw mass `t^{-n} q^{-ef·wt(x)} (t−1)^{dim face} |E_x°|(t)` at `t = q^f` for every
/// `(1/e)ℤ`-point `x` of the skeleton, with the regime's normalization.
pub fn simulate_measure(model: &SncModel, ext: ExtensionParams, q: u64, regime: Regime) -> Result<SimulatedMeasure> {
    let ExtensionParams { e, f } = ext;
    if e == 0 || f == 0 {
        return Err(Error::InvalidParams("e and f must be positive".into()));
    }
    check_tame(model, e)?;
    check_q(model, q)?;
    let (er, fr) = (rint(e), rint(f));
    let normalization = match regime {
        Regime::Tame | Regime::LogSmooth => {
            let ks = ks_skeleton(model);
            let dim = if regime == Regime::Tame { temperate_part(model, &ks).dim() } else { ks.dim() };
            QExpSum::monomial(pow_signed(e, -dim), min_weight(model) * &er * &fr)
        }
        Regime::Unramified => {
            if e != 1 {
                return Err(Error::InvalidParams("the unramified normalization needs e = 1".into()));
            }
            let ord = shilov_boundary(model, 1)?.ord_min_base.unwrap_or_else(Rat::zero);
            QExpSum::monomial(Rat::one(), ord * &fr)
        }
    };
    let n = rint(model.dimension);
    let t = BigInt::from(q).pow(f as u32);
    let points = lattice_points(model, &SubComplex::full(model), e);
    let atoms = points
        .into_par_iter()
        .map(|x| -> Result<SimAtom> {
            let st = &model.strata[x.face];
            let count = st.count_poly.eval(&t);
            if count.is_negative() {
                return Err(Error::NegativeCount { stratum: model.stratum_label(x.face), t: t.to_string() });
            }
            let weight = weight_at(model, &x)?;
            let k = x.u.len() - 1;
            let poly = CountPoly::t_minus_one_pow(k).mul(&st.count_poly);
            let mass = QExpSum::from_count_poly(&poly, f).shift(&(-(&fr * &n) - &er * &fr * &weight));
            let raw = if st.horizontal {
                MassBounds { lower: QExpSum::zero(), upper: mass }
            } else {
                MassBounds::exact(mass)
            };
            let tdeg = tame_degree(model, &x)?;
            Ok(SimAtom { point: x, weight, tdeg, raw })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulatedMeasure { ext, q, regime, normalization, atoms })
}

/// Constant 1 and the tent function of every component.
pub fn default_family(model: &SncModel) -> Vec<(String, TestFunction)> {
    let mut out = vec![("one".to_string(), TestFunction::constant(model, Rat::one()))];
    for (j, c) in model.components.iter().enumerate() {
        out.push((format!("hat_{}", c.id), TestFunction::hat(model, j)));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceRow {
    pub e: u64,
    pub f: u64,
    pub raw_total: Value,
    pub normalized_total: Value,
    /// Upper bound for `max_φ |∫φ dν − ∫φ d(target)|` (exact when all masses are).
    pub distance: Rat,
    /// Test function attaining the maximum.
    pub worst: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub model: String,
    pub q: u64,
    pub regime: Regime,
    /// `∫φ d(target)` per test function.
    pub targets: Vec<(String, Rat)>,
    /// Set when the tame target lives on an empty temperate part (dimension −1 convention; no limit asserted).
    pub temperate_empty: bool,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Whether `D(e,f)` is non-increasing in `f` for every fixed `e`.
    pub fn monotone_in_f(&self) -> bool {
        self.rows.iter().zip(self.rows.iter().skip(1)).all(|(a, b)| a.e != b.e || b.f < a.f || b.distance <= a.distance)
    }

    /// One line per grid cell; columns documented in [`CONVERGENCE_COLUMNS`].
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CONVERGENCE_COLUMNS)?;
        for r in &self.rows {
            out.write_record([
                r.e.to_string(),
                r.f.to_string(),
                self.q.to_string(),
                r.raw_total.exact_or_decimal(),
                decimal(&r.raw_total.midpoint(), 12),
                r.normalized_total.exact_or_decimal(),
                decimal(&r.normalized_total.midpoint(), 12),
                r.distance.to_string(),
                decimal(&r.distance, 12),
                r.worst.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// CSV header of a convergence report; gnuplot scripts address columns by position.
pub const CONVERGENCE_COLUMNS: [&str; 10] = [
    "e",
    "f",
    "q",
    "raw_total",
    "raw_total_decimal",
    "normalized_total",
    "normalized_total_decimal",
    "distance",
    "distance_decimal",
    "worst_test_function",
];

/// Gnuplot script drawing `D(e,f)` against `f` (log scale), one curve per `e`.
pub fn gnuplot_script(csv_path: &str, e_values: &[u64], title: &str) -> String {
    let curves: Vec<String> = e_values
        .iter()
        .map(|e| format!("'{csv_path}' using (($1=={e})?$2:1/0):9 with linespoints title 'e={e}'"))
        .collect();
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset logscale y\nset xlabel 'f'\nset ylabel 'D(e,f)'\nset title '{title}'\nplot {}\n",
        curves.join(", \\\n     ")
    )
}

/// Distances to the regime's target over the grid `e_seq × f_seq`.
pub fn convergence_report(
    model: &SncModel,
    e_seq: &[u64],
    f_seq: &[u64],
    q: u64,
    phis: &[(String, TestFunction)],
    regime: Regime,
) -> Result<ConvergenceReport> {
    if phis.is_empty() {
        return Err(Error::InvalidParams("empty test-function family".into()));
    }
    let ks = ks_skeleton(model);
    let tp = temperate_part(model, &ks);
    let polytope_target = |c: &SubComplex| -> Result<Vec<Rat>> {
        if c.is_empty() {
            return Ok(vec![Rat::zero(); phis.len()]);
        }
        let mu = stable_measure(model, c)?;
        phis.iter().map(|(_, phi)| integrate(model, &mu, phi)).collect()
    };
    let targets = match regime {
        Regime::Tame => polytope_target(&tp)?,
        Regime::LogSmooth => polytope_target(&ks)?,
        Regime::Unramified => {
            let mu = shilov_boundary(model, 1)?.measure;
            phis.iter().map(|(_, phi)| mu.integrate(model, phi)).collect::<Result<Vec<_>>>()?
        }
    };
    let grid: Vec<(u64, u64)> = e_seq.iter().flat_map(|&e| f_seq.iter().map(move |&f| (e, f))).collect();
    let qr = rint(q);
    let rows = grid
        .par_iter()
        .map(|&(e, f)| -> Result<ConvergenceRow> {
            let sim = simulate_measure(model, ExtensionParams::new(e, f), q, regime)?;
            let mut distance = Rat::zero();
            let mut worst = phis[0].0.clone();
            for ((name, phi), target) in phis.iter().zip(&targets) {
                let v = sim.integrate(model, phi)?;
                let lo = v.lower.eval(&qr, PRECISION_BITS)?;
                let hi = v.upper.eval(&qr, PRECISION_BITS)?;
                let d = lo.max_abs_diff(target).max(hi.max_abs_diff(target));
                if d > distance {
                    distance = d;
                    worst = name.clone();
                }
            }
            Ok(ConvergenceRow {
                e,
                f,
                raw_total: sim.raw_total().value(&qr)?,
                normalized_total: sim.normalized_total().value(&qr)?,
                distance,
                worst,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        model: model.name.clone(),
        q,
        regime,
        targets: phis.iter().map(|(n, _)| n.clone()).zip(targets).collect(),
        temperate_empty: regime == Regime::Tame && tp.is_empty(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::rat;
    use crate::model::{builtin_model, Component, Stratum};

    fn unit_box(alpha: &str, phi: &str, lo: &str, hi: &str, exclude: bool) -> WeightedSumSpec {
        WeightedSumSpec::from_toml(&format!(
            "r = 2\nbox = [[\"{lo}\", \"{hi}\"]]\nalpha = [{alpha}]\nphi = \"{phi}\"\nexclude_tau = {exclude}\n"
        ))
        .unwrap()
    }

    #[test]
    fn bruteforce_examples() {
        let s = unit_box("1", "1", "0", "1", false);
        assert_eq!(lemma_sum_bruteforce(&s, 2, 2).unwrap().eval_exact(&rint(2)), Some(rat(21, 16)));
        let s = unit_box("0", "1", "0", "1", false);
        for e in 1..6 {
            assert_eq!(lemma_sum_bruteforce(&s, e, 3).unwrap().eval_exact(&rint(7)), Some(rat(e as i64 + 1, e as i64)));
        }
        let s = unit_box("1", "1", "0", "3", true);
        assert_eq!(lemma_sum_value(&s, 1, 1).unwrap(), Value::Exact(rat(7, 8)));
    }

    #[test]
    fn closed_form_examples() {
        let s = unit_box("1", "1", "0", "3", true);
        let c = lemma_sum_closedform(&s, 1, 1).unwrap();
        assert!(c.delta);
        assert_eq!(c.eval(&rint(2), 64).unwrap(), Value::Exact(rat(7, 8)));
        assert!(c.matches(&lemma_sum_bruteforce(&s, 1, 1).unwrap()));
        let s = unit_box("1", "1", "0", "1", false);
        assert!(matches!(lemma_sum_closedform(&s, 1, 1), Err(Error::Spec(_))));
    }

    #[test]
    fn closed_form_with_fractional_offset() {
        let s = WeightedSumSpec::from_toml(
            "r = 2\nbox = [[0, 2], [\"1/3\", 2]]\nalpha = [0, \"3/2\"]\noffsets = [0, \"1/3\"]\nexclude_tau = true\n",
        )
        .unwrap();
        for e in 1..7 {
            for f in 1..4 {
                let c = lemma_sum_closedform(&s, e, f).unwrap();
                assert_eq!(c.delta, e % 3 == 0);
                assert!(c.matches(&lemma_sum_bruteforce(&s, e, f).unwrap()), "e={e} f={f}");
            }
        }
    }

    #[test]
    fn tau_integrals() {
        let s = WeightedSumSpec::from_toml("r = 2\nbox = [[0, 1], [0, 1]]\nalpha = [0, 1]\nphi = \"x1\"\n").unwrap();
        assert_eq!(s.tau_dim(), 1);
        assert_eq!(tau_integral(&s).unwrap(), rat(1, 2));
        let s = WeightedSumSpec::from_toml("r = 2\nbox = [[1, 2]]\nalpha = [1]\n").unwrap();
        assert_eq!(s.tau(), Tau::Empty);
        assert_eq!(tau_integral(&s).unwrap(), rint(0));
        let s = WeightedSumSpec::from_toml("r = 2\nface = [1, 1, 2]\nalpha = [0, 0, 1]\nphi = \"x1^2\"\n").unwrap();
        // τ is the unit segment x1 + x2 = 1, x3 = 0
        assert_eq!(tau_integral(&s).unwrap(), rat(1, 3));
        let s = WeightedSumSpec::from_toml("r = 2\nbox = [[0, 1]]\nalpha = [0]\nphi = \"x1^3\"\n").unwrap();
        assert!(matches!(tau_integral(&s), Err(Error::UnsupportedDegree(3))));
    }

    #[test]
    fn zp_points_of_tau() {
        let s = WeightedSumSpec::from_toml("r = 2\nbox = [[0, 1], [\"1/2\", 1]]\nalpha = [0, 1]\noffsets = [0, \"1/2\"]\n")
            .unwrap();
        assert!(!s.tau_has_zp_point(2));
        assert!(s.tau_has_zp_point(3));
        let s = WeightedSumSpec::from_toml("r = 2\nface = [2, 2]\nalpha = [0, 0]\n").unwrap();
        assert!(!s.tau_has_zp_point(2));
    }

    #[test]
    fn negative_alpha_rejected() {
        assert!(WeightedSumSpec::from_toml("r = 2\nbox = [[0, 1]]\nalpha = [-1]\n").is_err());
        assert!(WeightedSumSpec::from_toml("r = 1\nbox = [[0, 1]]\nalpha = [1]\n").is_err());
        assert!(WeightedSumSpec::from_toml("r = 2\nbox = [[0, 1]]\nalpha = [1]\nbogus = 1\n").is_err());
    }

    #[test]
    fn tate_simulation() {
        let t = builtin_model("tate_triangle", 2, None).unwrap();
        let sim = simulate_measure(&t, ExtensionParams::new(1, 1), 2, Regime::LogSmooth).unwrap();
        assert_eq!(sim.atoms.len(), 3);
        assert!(sim.atoms.iter().all(|a| a.raw.value(&rint(2)).unwrap() == Value::Exact(rat(1, 2))));
        assert_eq!(sim.raw_total().value(&rint(2)).unwrap(), Value::Exact(rat(3, 2)));
        let sim = simulate_measure(&t, ExtensionParams::new(2, 3), 2, Regime::LogSmooth).unwrap();
        assert_eq!(sim.atoms.len(), 6);
        assert!(sim.atoms.iter().all(|a| a.raw.value(&rint(2)).unwrap() == Value::Exact(rat(7, 8))));
        assert_eq!(sim.normalized_total().value(&rint(2)).unwrap(), Value::Exact(rat(21, 8)));
    }

    fn two_component() -> SncModel {
        SncModel {
            name: "two_component".into(),
            dimension: 1,
            p: 5,
            q: Some(5),
            m: 1,
            log_smooth: true,
            components: vec![Component::new("A", 1, 0), Component::new("B", 1, 1)],
            strata: vec![Stratum::new(&["A"], CountPoly::new([1, 1])), Stratum::new(&["B"], CountPoly::new([0, 1]))],
        }
        .validated()
        .unwrap()
    }

    #[test]
    fn unramified_masses() {
        let m = two_component();
        let sim = simulate_measure(&m, ExtensionParams::new(1, 1), 5, Regime::Unramified).unwrap();
        let masses: Vec<Value> = sim.atoms.iter().map(|a| sim.normalized(a).value(&rint(5)).unwrap()).collect();
        assert_eq!(masses, vec![Value::Exact(rat(6, 5)), Value::Exact(rat(1, 5))]);
        assert!(simulate_measure(&m, ExtensionParams::new(2, 1), 5, Regime::Unramified).is_err());
        assert!(simulate_measure(&m, ExtensionParams::new(1, 1), 4, Regime::Unramified).is_err());
    }

    #[test]
    fn horizontal_strata_give_bounds() {
        let mut m = two_component();
        m.strata[1].horizontal = true;
        let sim = simulate_measure(&m, ExtensionParams::new(1, 1), 5, Regime::Unramified).unwrap();
        assert!(!sim.atoms[1].raw.is_exact());
        let v = sim.atoms[1].raw.value(&rint(5)).unwrap();
        assert_eq!((v.lo().clone(), v.hi().clone()), (rint(0), rat(1, 5)));
    }

    #[test]
    fn tate_report_distance() {
        let t = builtin_model("tate_triangle", 2, None).unwrap();
        let one = vec![("one".to_string(), TestFunction::constant(&t, Rat::one()))];
        let seq: Vec<u64> = (1..=6).collect();
        let rep = convergence_report(&t, &seq, &seq, 2, &one, Regime::LogSmooth).unwrap();
        for r in &rep.rows {
            assert_eq!(r.distance, rint(3) / num_traits::pow(rint(2), r.f as usize));
        }
        assert!(rep.monotone_in_f());
        let mut buf = vec![];
        rep.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 37);
    }

    #[test]
    fn type_iv_tame_report_flags_empty_temperate_part() {
        let iv = builtin_model("kodaira_IV", 3, None).unwrap();
        let rep = convergence_report(&iv, &[1, 2, 4], &[1, 2], 3, &default_family(&iv), Regime::Tame).unwrap();
        assert!(rep.temperate_empty);
        assert!(rep.targets.iter().all(|(_, t)| t.is_zero()));
    }

    #[test]
    fn gnuplot_mentions_every_curve() {
        let s = gnuplot_script("out.csv", &[1, 2], "tate");
        assert!(s.contains("e=1") && s.contains("e=2") && s.contains("logscale"));
    }
}
