//! Exact arithmetic shared by every other module: rationals, integer
//! count polynomials, symbolic sums `Σ c·q^r` with rational exponents,
//! and a small multivariate polynomial type with an infix parser.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint<T: Into<BigInt>>(n: T) -> Rat {
    Rat::from_integer(n.into())
}

/// Parses `"3"`, `"-2/7"` or a plain decimal such as `"0.25"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip = if ip.is_empty() || ip == "-" { "0" } else { ip.trim_start_matches('-') };
        let whole: BigInt = ip.parse().map_err(|_| bad())?;
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(fp.len() as u32);
        let v = Rat::new(whole * &scale + frac, scale);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

/// Decimal rendering with `digits` digits after the point, rounded half away from zero.
pub fn decimal(x: &Rat, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = x.abs() * Rat::from_integer(scale.clone());
    let r = (scaled + rat(1, 2)).floor().to_integer();
    let (ip, fp) = r.div_rem(&scale);
    let sign = if x.is_negative() && !r.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{ip}");
    }
    format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = digits as usize)
}

/// `a/b` followed by the 12-digit decimal, e.g. `1/3 (0.333333333333)`.
pub fn fmt_rat(x: &Rat) -> String {
    format!("{} ({})", x, decimal(x, 12))
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    // Scale before converting so huge numerators/denominators don't overflow.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = nb - db - 60;
    let (n, d) = if shift > 0 {
        (x.numer().clone(), x.denom() << (shift as usize))
    } else {
        (x.numer() << ((-shift) as usize), x.denom().clone())
    };
    let q = (n / d).to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(shift.clamp(-2000, 2000) as i32)
}

/// Integer polynomial in `t`, lowest degree first, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CountPoly {
    coeffs: Vec<BigInt>,
}

impl CountPoly {
    pub fn new<I, T>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut coeffs: Vec<BigInt> = coeffs.into_iter().map(Into::into).collect();
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        CountPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    pub fn add(&self, other: &CountPoly) -> CountPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigInt::zero();
        CountPoly::new((0..n).map(|i| {
            self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z)
        }))
    }

    pub fn mul(&self, other: &CountPoly) -> CountPoly {
        if self.is_zero() || other.is_zero() {
            return CountPoly::new(Vec::<BigInt>::new());
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CountPoly::new(out)
    }

    /// `(t - 1)^k`.
    pub fn t_minus_one_pow(k: usize) -> CountPoly {
        let base = CountPoly::new([-1, 1]);
        (0..k).fold(CountPoly::new([1]), |acc, _| acc.mul(&base))
    }

    /// Coefficient-wise exact division; `None` unless every coefficient is divisible.
    pub fn div_exact(&self, k: &BigInt) -> Option<CountPoly> {
        if k.is_zero() {
            return None;
        }
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(CountPoly::new(out))
    }
}

impl fmt::Display for CountPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let a = c.abs();
            let body = match (i, a.is_one()) {
                (0, _) => a.to_string(),
                (1, true) => "t".into(),
                (1, false) => format!("{a}t"),
                (_, true) => format!("t^{i}"),
                (_, false) => format!("{a}t^{i}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

/// Exact symbolic sum `Σ c_i·q^{r_i}`, exponents strictly increasing, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QExpSum {
    terms: Vec<(Rat, Rat)>,
}

impl QExpSum {
    pub fn zero() -> Self {
        QExpSum::default()
    }

    pub fn constant(c: Rat) -> Self {
        QExpSum::monomial(c, Rat::zero())
    }

    pub fn monomial(coeff: Rat, exponent: Rat) -> Self {
        if coeff.is_zero() {
            return QExpSum::zero();
        }
        QExpSum { terms: vec![(exponent, coeff)] }
    }

    /// Builds from arbitrary `(coeff, exponent)` pairs, merging equal exponents.
    pub fn from_terms<I: IntoIterator<Item = (Rat, Rat)>>(terms: I) -> Self {
        let mut map: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (c, r) in terms {
            *map.entry(r).or_insert_with(Rat::zero) += c;
        }
        QExpSum { terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// `P(q^f)` for a count polynomial `P` in `t`.
    pub fn from_count_poly(p: &CountPoly, f: u64) -> Self {
        QExpSum::from_terms(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| (Rat::from_integer(c.clone()), rint(i as u64 * f))),
        )
    }

    /// `(coefficient, exponent)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter().map(|(r, c)| (c, r))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.terms.iter().all(|(r, _)| r.is_integer())
    }

    pub fn add(&self, other: &QExpSum) -> QExpSum {
        QExpSum::from_terms(
            self.terms.iter().chain(other.terms.iter()).map(|(r, c)| (c.clone(), r.clone())),
        )
    }

    pub fn sub(&self, other: &QExpSum) -> QExpSum {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, k: &Rat) -> QExpSum {
        if k.is_zero() {
            return QExpSum::zero();
        }
        QExpSum { terms: self.terms.iter().map(|(r, c)| (r.clone(), c * k)).collect() }
    }

    /// Multiplies by `q^s`.
    pub fn shift(&self, s: &Rat) -> QExpSum {
        QExpSum { terms: self.terms.iter().map(|(r, c)| (r + s, c.clone())).collect() }
    }

    pub fn mul(&self, other: &QExpSum) -> QExpSum {
        QExpSum::from_terms(self.terms.iter().flat_map(|(r1, c1)| {
            other.terms.iter().map(move |(r2, c2)| (c1 * c2, r1 + r2))
        }))
    }

    /// Exact value at `q` when every exponent is an integer or an exact root exists.
    pub fn eval_exact(&self, q: &Rat) -> Option<Rat> {
        let mut acc = Rat::zero();
        for (r, c) in &self.terms {
            acc += c * exact_rat_pow(q, r)?;
        }
        Some(acc)
    }

    /// Value at `q > 1`: exact when possible, otherwise an enclosing interval
    /// of width at most `2^-precision`.
    pub fn eval(&self, q: &Rat, precision: u32) -> Result<Value> {
        if q <= &Rat::one() {
            return Err(Error::InvalidParams(format!("evaluation base must exceed 1, got {q}")));
        }
        if let Some(v) = self.eval_exact(q) {
            return Ok(Value::Exact(v));
        }
        let target = Rat::new(BigInt::one(), BigInt::one() << precision as usize);
        let mut bits = precision as usize + 16;
        loop {
            let (mut lo, mut hi) = (Rat::zero(), Rat::zero());
            for (r, c) in &self.terms {
                let (a, b) = rat_pow_bounds(q, r, bits);
                if c.is_negative() {
                    lo += c * &b;
                    hi += c * &a;
                } else {
                    lo += c * &a;
                    hi += c * &b;
                }
            }
            if &hi - &lo <= target {
                return Ok(Value::Interval { lo, hi });
            }
            bits *= 2;
        }
    }
}

impl fmt::Display for QExpSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if r.is_zero() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*q^({r})")?;
            }
        }
        Ok(())
    }
}

/// Result of evaluating a [`QExpSum`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Exact(Rat),
    /// Closed interval guaranteed to contain the true value.
    Interval { lo: Rat, hi: Rat },
}

impl Value {
    pub fn lo(&self) -> &Rat {
        match self {
            Value::Exact(v) => v,
            Value::Interval { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &Rat {
        match self {
            Value::Exact(v) => v,
            Value::Interval { hi, .. } => hi,
        }
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            Value::Exact(v) => Some(v),
            Value::Interval { .. } => None,
        }
    }

    pub fn midpoint(&self) -> Rat {
        (self.lo() + self.hi()) / rint(2)
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.midpoint())
    }

    /// Largest possible `|v - target|` over the enclosure.
    pub fn max_abs_diff(&self, target: &Rat) -> Rat {
        let a = (self.lo() - target).abs();
        let b = (self.hi() - target).abs();
        a.max(b)
    }

    /// Exact `a/b` when known, otherwise the decimal midpoint.
    pub fn exact_or_decimal(&self) -> String {
        match self {
            Value::Exact(v) => v.to_string(),
            Value::Interval { .. } => decimal(&self.midpoint(), 12),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(v) => write!(f, "{}", fmt_rat(v)),
            Value::Interval { lo, hi } => {
                let rad = (hi - lo) / rint(2);
                write!(f, "~{} (±{:.1e})", decimal(&self.midpoint(), 12), rat_to_f64(&rad))
            }
        }
    }
}

fn rat_pow_int(q: &Rat, k: &BigInt) -> Rat {
    let e = k.abs().to_usize().expect("exponent out of range");
    let v = num_traits::pow(q.clone(), e);
    if k.is_negative() {
        v.recip()
    } else {
        v
    }
}

fn exact_root(n: &BigInt, b: u32) -> Option<BigInt> {
    let r = n.nth_root(b);
    (num_traits::pow(r.clone(), b as usize) == *n).then_some(r)
}

/// `q^r` when it is rational (integer exponent, or exact `b`-th roots).
pub fn exact_rat_pow(q: &Rat, r: &Rat) -> Option<Rat> {
    let v = rat_pow_int(q, r.numer());
    if r.is_integer() {
        return Some(v);
    }
    let b = r.denom().to_u32()?;
    if v.is_negative() {
        return None;
    }
    Some(Rat::new(exact_root(v.numer(), b)?, exact_root(v.denom(), b)?))
}

/// Rational bounds `lo ≤ q^r ≤ hi` with `hi - lo ≤ 2^-bits · (something ≤ 1)`.
fn rat_pow_bounds(q: &Rat, r: &Rat, bits: usize) -> (Rat, Rat) {
    if let Some(v) = exact_rat_pow(q, r) {
        return (v.clone(), v);
    }
    let v = rat_pow_int(q, r.numer());
    let b = r.denom().to_u32().expect("root order out of range");
    // v^(1/b) = (n·d^(b-1))^(1/b) / d
    let (n, d) = (v.numer().clone(), v.denom().clone());
    let x: BigInt = n * num_traits::pow(d.clone(), b as usize - 1);
    let scaled: BigUint = (x.to_biguint().expect("positive base") << (bits * b as usize)).nth_root(b);
    let root = BigInt::from_biguint(Sign::Plus, scaled);
    let den = d << bits;
    (Rat::new(root.clone(), den.clone()), Rat::new(root + 1, den))
}

/// Multivariate polynomial with rational coefficients over named variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl MPoly {
    pub fn constant(c: Rat, vars: &[String]) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; vars.len()], c);
        }
        MPoly { vars: vars.to_vec(), terms }
    }

    pub fn var(name: &str, vars: &[String]) -> Self {
        let mut exps = vec![0; vars.len()];
        let i = vars.iter().position(|v| v == name).expect("variable not in list");
        exps[i] = 1;
        MPoly { vars: vars.to_vec(), terms: BTreeMap::from([(exps, Rat::one())]) }
    }

    /// Parses infix text such as `x^2+y^2-1` or `2 + x1/3 - x2*x1`.
    /// Variables are ordered by first appearance.
    pub fn parse(text: &str) -> Result<MPoly> {
        let toks = tokenize(text)?;
        let mut vars = Vec::new();
        for t in &toks {
            if let Tok::Ident(s) = t {
                if !vars.contains(s) {
                    vars.push(s.clone());
                }
            }
        }
        let mut p = Parser { toks: &toks, pos: 0, vars: &vars };
        let poly = p.expr()?;
        if p.pos != toks.len() {
            return Err(Error::Parse(format!("unexpected trailing input in {text:?}")));
        }
        Ok(poly)
    }

    /// Parses against a fixed variable list; unknown identifiers are an error.
    pub fn parse_with_vars(text: &str, vars: &[String]) -> Result<MPoly> {
        let p = MPoly::parse(text)?;
        p.with_vars(vars)
    }

    /// Re-expresses over `vars`, which must contain every variable used.
    pub fn with_vars(&self, vars: &[String]) -> Result<MPoly> {
        let idx: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {v:?}")))
            })
            .collect::<Result<_>>()?;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, k) in e.iter().enumerate() {
                ne[idx[i]] += k;
            }
            terms.insert(ne, c.clone());
        }
        Ok(MPoly { vars: vars.to_vec(), terms })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// `(exponents, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, k) in x.iter().zip(e) {
                t *= num_traits::pow(xi.clone(), *k as usize);
            }
            acc += t;
        }
        acc
    }

    fn combine(&self, other: &MPoly, sign: i64) -> MPoly {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let v = terms.entry(e.clone()).or_insert_with(Rat::zero);
            *v += c * rint(sign);
        }
        terms.retain(|_, c| !c.is_zero());
        MPoly { vars: self.vars.clone(), terms }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.combine(other, -1)
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_insert_with(Rat::zero) += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MPoly { vars: self.vars.clone(), terms }
    }

    pub fn scale(&self, k: &Rat) -> MPoly {
        self.mul(&MPoly::constant(k.clone(), &self.vars))
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(j, k)| if *k == 1 { self.vars[j].clone() } else { format!("{}^{k}", self.vars[j]) })
                .collect();
            let sign = if c.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            let a = c.abs();
            let body = match (mono.is_empty(), a.is_one()) {
                (true, _) => a.to_string(),
                (false, true) => mono.join("*"),
                (false, false) => format!("{a}*{}", mono.join("*")),
            };
            write!(f, "{sign}{body}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let n: String = cs[s..i].iter().collect();
            out.push(Tok::Num(n.parse().expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let s = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[s..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {text:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = if self.eat('-') {
            MPoly::constant(Rat::zero(), self.vars).sub(&self.term()?)
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat('/') {
                let d = self.power()?;
                let c = match (d.degree(), d.terms.values().next()) {
                    (Some(0), Some(c)) => c.clone(),
                    _ => return Err(Error::Parse("division only by nonzero constants".into())),
                };
                acc = acc.scale(&c.recip());
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Num(_)) | Some(Tok::Op('('))) {
                // implicit multiplication: `2x`, `x y`
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<MPoly> {
        let base = self.atom()?;
        if self.eat('^') {
            let k = match self.peek() {
                Some(Tok::Num(n)) => n.to_u32().ok_or_else(|| Error::Parse("exponent too large".into()))?,
                _ => return Err(Error::Parse("expected a nonnegative integer exponent".into())),
            };
            self.pos += 1;
            let one = MPoly::constant(Rat::one(), self.vars);
            return Ok((0..k).fold(one, |acc, _| acc.mul(&base)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MPoly> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(MPoly::constant(Rat::from_integer(n), self.vars))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(MPoly::var(&s, self.vars))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(MPoly::constant(Rat::zero(), self.vars).sub(&self.power()?))
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}
