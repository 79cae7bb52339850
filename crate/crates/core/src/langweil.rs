//! Finite fields `F_{p^m}`, brute-force point counts of small affine and
//! projective varieties, and normalized counting sequences.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactcore::{MPoly, Rat};
use crate::model::is_prime;

/// Largest field handled by brute force.
pub const MAX_FIELD: u64 = 1 << 20;
/// Largest number of variables.
pub const MAX_VARS: usize = 4;
/// Largest ambient point count `q^k`.
pub const MAX_POINTS: u64 = 1 << 32;

type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let (mut b, mut k) = (a % p, p - 2);
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        k >>= 1;
    }
    r
}

fn poly_rem(a: &[u64], f: &[u64], p: u64) -> Poly {
    let mut a = trim(a.to_vec());
    let df = f.len() - 1;
    let inv = inv_mod(f[df], p);
    while a.len() > df {
        let c = a[a.len() - 1] * inv % p;
        let shift = a.len() - 1 - df;
        for (i, &fi) in f.iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - c * fi % p) % p;
        }
        a = trim(a);
    }
    a
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_rem(&out, f, p)
}

fn poly_powmod(a: &[u64], mut k: u64, f: &[u64], p: u64) -> Poly {
    let mut r = vec![1u64];
    let mut b = poly_rem(a, f, p);
    while k > 0 {
        if k & 1 == 1 {
            r = poly_mulmod(&r, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        k >>= 1;
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Irreducibility over `F_p`: `gcd(f, x^{p^k} − x) = 1` for all `k ≤ deg f / 2`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    let x = vec![0, 1];
    let mut h = x.clone();
    for _ in 0..m / 2 {
        h = poly_powmod(&h, p, f, p);
        let mut d = h.clone();
        d.resize(d.len().max(2), 0);
        d[1] = (d[1] + p - 1) % p;
        if poly_gcd(f, &d, p).len() != 1 {
            return false;
        }
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `F_{p^m}` with elements encoded as integers whose base-`p` digits are the
/// coefficients of a residue modulo the defining polynomial.
#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u64,
    m: u32,
    q: u64,
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl FiniteField {
    /// Uses the lexicographically first monic irreducible polynomial of degree `m`.
    pub fn new(p: u64, m: u32) -> Result<Self> {
        Self::check_size(p, m)?;
        let mut modulus = vec![0u64; m as usize + 1];
        modulus[m as usize] = 1;
        loop {
            if is_irreducible(&modulus, p) {
                return Self::build(p, m, modulus);
            }
            // next monic polynomial in lexicographic order of (c_0, …, c_{m−1})
            let mut i = 0;
            loop {
                modulus[i] += 1;
                if modulus[i] < p {
                    break;
                }
                modulus[i] = 0;
                i += 1;
                assert!(i < m as usize, "an irreducible polynomial of every degree exists");
            }
        }
    }

    /// Uses the supplied monic modulus `c_0 + c_1 x + … + x^m` (coefficients low to high).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let m = modulus.len().saturating_sub(1) as u32;
        Self::check_size(p, m)?;
        if modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidParams("modulus must be monic with coefficients in 0..p".into()));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::InvalidParams(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        Self::build(p, m, modulus)
    }

    fn check_size(p: u64, m: u32) -> Result<()> {
        if !is_prime(p) || m == 0 {
            return Err(Error::InvalidParams(format!("need a prime p and m ≥ 1, got p = {p}, m = {m}")));
        }
        match p.checked_pow(m) {
            Some(q) if q <= MAX_FIELD => Ok(()),
            _ => Err(Error::FieldTooLarge(format!("{p}^{m} exceeds {MAX_FIELD}"))),
        }
    }

    fn encode(&self, a: &[u64]) -> u32 {
        a.iter().rev().fold(0u64, |acc, &c| acc * self.p + c) as u32
    }

    fn decode(p: u64, m: u32, mut x: u64) -> Poly {
        let mut out = Vec::with_capacity(m as usize);
        for _ in 0..m {
            out.push(x % p);
            x /= p;
        }
        trim(out)
    }

    fn build(p: u64, m: u32, modulus: Vec<u64>) -> Result<Self> {
        let q = p.pow(m);
        let factors = prime_factors(q - 1);
        let generator = (1..q)
            .map(|g| Self::decode(p, m, g))
            .find(|g| factors.iter().all(|&l| poly_powmod(g, (q - 1) / l, &modulus, p) != vec![1]))
            .expect("the multiplicative group is cyclic");
        let mut f = FiniteField { p, m, q, modulus, exp: vec![0; (q - 1) as usize], log: vec![0; q as usize] };
        let mut cur = vec![1u64];
        for i in 0..q - 1 {
            let code = f.encode(&cur);
            f.exp[i as usize] = code;
            f.log[code as usize] = i as u32;
            cur = poly_mulmod(&cur, &generator, &f.modulus, p);
        }
        Ok(f)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Coefficients of the defining polynomial, low degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a as u64, b as u64);
        let (mut out, mut place) = (0u64, 1u64);
        while a > 0 || b > 0 {
            out += (a % self.p + b % self.p) % self.p * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as u32
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.q - 1);
        self.exp[s as usize]
    }

    pub fn pow(&self, a: u32, k: u32) -> u32 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 * k as u64 % (self.q - 1);
        self.exp[s as usize]
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, c: &BigInt) -> u32 {
        let r = c % BigInt::from(self.p);
        let r = if r.is_negative() { r + BigInt::from(self.p) } else { r };
        r.to_u32().expect("residue fits")
    }
}

/// Polynomial system over named variables, counted on `Z = {polys = 0} ∖ {exclude = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietySpec {
    pub variables: Vec<String>,
    pub polynomials: Vec<MPoly>,
    pub projective: bool,
    pub exclude: Option<MPoly>,
    /// Dimension `n` used for the normalization `q^{-n}`.
    pub dimension: u32,
    pub expected_cz: Option<u32>,
}

impl VarietySpec {
    /// Parses infix polynomials; variables are collected in order of appearance unless given.
    pub fn parse(polys: &[&str], exclude: Option<&str>, variables: Option<&[&str]>, projective: bool, dimension: u32) -> Result<Self> {
        let mut vars: Vec<String> = variables.map(|v| v.iter().map(|s| s.to_string()).collect()).unwrap_or_default();
        let mut parsed = vec![];
        for text in polys.iter().copied().chain(exclude) {
            let p = MPoly::parse(text)?;
            for v in p.vars() {
                if !vars.contains(v) {
                    if variables.is_some() {
                        return Err(Error::Parse(format!("unknown variable {v:?}")));
                    }
                    vars.push(v.clone());
                }
            }
            parsed.push(p);
        }
        let mut parsed = parsed.into_iter().map(|p| p.with_vars(&vars)).collect::<Result<Vec<_>>>()?;
        let exclude = if exclude.is_some() { parsed.pop() } else { None };
        Ok(VarietySpec { variables: vars, polynomials: parsed, projective, exclude, dimension, expected_cz: None })
    }

    fn check(&self) -> Result<()> {
        if self.variables.len() > MAX_VARS {
            return Err(Error::FieldTooLarge(format!("{} variables (at most {MAX_VARS})", self.variables.len())));
        }
        for p in self.polynomials.iter().chain(&self.exclude) {
            if p.vars() != self.variables.as_slice() {
                return Err(Error::InvalidParams("polynomials must share the variable list".into()));
            }
            if !p.has_integer_coefficients() {
                return Err(Error::InvalidParams(format!("{p} has non-integer coefficients")));
            }
            if self.projective && !p.is_homogeneous() {
                return Err(Error::NonHomogeneous(p.to_string()));
            }
        }
        Ok(())
    }
}

/// A polynomial reduced into a field: `(coefficient, exponents)` terms.
struct Compiled(Vec<(u32, Vec<u32>)>);

impl Compiled {
    fn new(p: &MPoly, f: &FiniteField) -> Self {
        Compiled(
            p.terms()
                .map(|(e, c)| (f.from_int(c.numer()), e.clone()))
                .filter(|(c, _)| *c != 0)
                .collect(),
        )
    }

    fn eval(&self, f: &FiniteField, x: &[u32]) -> u32 {
        self.0.iter().fold(0, |acc, (c, e)| {
            let t = e.iter().zip(x).fold(*c, |t, (&k, &xi)| f.mul(t, f.pow(xi, k)));
            f.add(acc, t)
        })
    }
}

fn on_variety(f: &FiniteField, polys: &[Compiled], exclude: Option<&Compiled>, x: &[u32]) -> bool {
    polys.iter().all(|p| p.eval(f, x) == 0) && exclude.is_none_or(|g| g.eval(f, x) != 0)
}

/// Exact number of points of `v` over `f` (affine, or projective via the affine cone).
pub fn count_points(v: &VarietySpec, f: &FiniteField) -> Result<u64> {
    v.check()?;
    let k = v.variables.len();
    let q = f.order();
    if q.checked_pow(k as u32).is_none_or(|n| n > MAX_POINTS) {
        return Err(Error::FieldTooLarge(format!("{q}^{k} points exceed {MAX_POINTS}")));
    }
    let polys: Vec<Compiled> = v.polynomials.iter().map(|p| Compiled::new(p, f)).collect();
    let exclude = v.exclude.as_ref().map(|g| Compiled::new(g, f));
    let affine = if k == 0 {
        on_variety(f, &polys, exclude.as_ref(), &[]) as u64
    } else {
        (0..q as u32)
            .into_par_iter()
            .map(|x0| {
                let mut x = vec![0u32; k];
                x[0] = x0;
                let mut n = 0u64;
                loop {
                    n += on_variety(f, &polys, exclude.as_ref(), &x) as u64;
                    let mut i = 1;
                    loop {
                        if i == k {
                            return n;
                        }
                        x[i] += 1;
                        if (x[i] as u64) < q {
                            break;
                        }
                        x[i] = 0;
                        i += 1;
                    }
                }
            })
            .sum()
    };
    if !v.projective {
        return Ok(affine);
    }
    let origin = on_variety(f, &polys, exclude.as_ref(), &vec![0; k]) as u64;
    let cone = affine - origin;
    debug_assert_eq!(cone % (q - 1), 0, "homogeneous cones are unions of punctured lines");
    Ok(cone / (q - 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LangWeilRow {
    pub m: u32,
    pub q: u64,
    pub count: u64,
    /// `count / q^n`.
    pub normalized: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LangWeilSequence {
    pub p: u64,
    pub dimension: u32,
    pub rows: Vec<LangWeilRow>,
}

/// Counts over `F_{p^m}` for each `m` in the range, normalized by `p^{nm}`.
pub fn langweil_sequence(v: &VarietySpec, p: u64, m_range: std::ops::RangeInclusive<u32>) -> Result<LangWeilSequence> {
    let rows = m_range
        .map(|m| {
            let f = FiniteField::new(p, m)?;
            let count = count_points(v, &f)?;
            let qn = BigInt::from(f.order()).pow(v.dimension);
            Ok(LangWeilRow { m, q: f.order(), count, normalized: Rat::new(count.into(), qn) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LangWeilSequence { p, dimension: v.dimension, rows })
}

/// `|count − c_Z·p^{nm}| ≤ C·p^{nm − 1/2}` for every row, `p` the prime of the
/// base field (checked as squares, exactly). The error term saves only `√p`
/// over the main term; [`langweil_error_check`] is the sharper per-field form.
pub fn langweil_limit_check(seq: &LangWeilSequence, c_z: u64, c: &Rat) -> bool {
    let p = BigInt::from(seq.p);
    within_sqrt_bound(seq, c_z, c, |r| (BigInt::from(r.q).pow(seq.dimension), p.clone()))
}

/// `|count − c_Z·q^n| ≤ C·q^{n − 1/2}` with `q = p^m` the size of each field.
pub fn langweil_error_check(seq: &LangWeilSequence, c_z: u64, c: &Rat) -> bool {
    within_sqrt_bound(seq, c_z, c, |r| (BigInt::from(r.q).pow(seq.dimension), BigInt::from(r.q)))
}

/// `|count − c_Z·main| ≤ C·main/√s` for each row, with `(main, s)` given per row.
fn within_sqrt_bound(seq: &LangWeilSequence, c_z: u64, c: &Rat, scale: impl Fn(&LangWeilRow) -> (BigInt, BigInt)) -> bool {
    seq.rows.iter().all(|r| {
        let (main, s) = scale(r);
        let diff = Rat::from_integer(BigInt::from(r.count) - BigInt::from(c_z) * &main);
        let main = Rat::from_integer(main);
        &diff * &diff <= c * c * &main * &main / Rat::from_integer(s)
    })
}

/// Independent count of the affine circle `x² + y² = 1` over `F_q`, `q` odd.
pub fn circle_oracle(q: u64) -> u64 {
    assert!(q % 2 == 1, "odd characteristic");
    if ((q - 1) / 2).is_multiple_of(2) {
        q - 1
    } else {
        q + 1
    }
}
