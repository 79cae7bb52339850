//! Edge data of a 2-dimensional (possibly non-free) saturated cone monoid.
//!
//! Inputs are the primitive ray generators `v₁, v₂` of the dual cone and the
//! class `ϖ̄` of the uniformizer in the character lattice ℤ².
//!
//! For `uv = ϖ²` the monoid is generated by `u = (1,0)`, `ϖ = (1,1)` and
//! `v = (1,2)`. Its dual cone has rays `(0,1)` and `(2,−1)`, and `ϖ̄ = (1,1)`.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactcore::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cone2D {
    pub v1: [i64; 2],
    pub v2: [i64; 2],
    pub varpi: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeData {
    pub rho: u64,
    pub n1: u64,
    pub n2: u64,
    pub det: u64,
    pub length: Rat,
}

fn pair(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[0] + a[1] * b[1]
}

impl Cone2D {
    pub fn new(v1: [i64; 2], v2: [i64; 2], varpi: [i64; 2]) -> Result<Self> {
        for v in [v1, v2] {
            if v[0].gcd(&v[1]) != 1 {
                return Err(Error::Cone(format!("ray generator {v:?} is not primitive")));
            }
        }
        if v1[0] * v2[1] - v1[1] * v2[0] == 0 {
            return Err(Error::Cone("ray generators are linearly dependent".into()));
        }
        if pair(varpi, v1) < 1 || pair(varpi, v2) < 1 {
            return Err(Error::Cone(format!("ϖ̄ = {varpi:?} lies outside the cone")));
        }
        Ok(Cone2D { v1, v2, varpi })
    }
}

/// `(ρ, N₁, N₂, det, ℓ)` with `N_i = ⟨ϖ̄, v_i⟩` and `ℓ = ρ·det/(N₁N₂)`.
pub fn cone_edge_data(c: &Cone2D) -> EdgeData {
    let n1 = pair(c.varpi, c.v1) as u64;
    let n2 = pair(c.varpi, c.v2) as u64;
    let det = (c.v1[0] * c.v2[1] - c.v1[1] * c.v2[0]).unsigned_abs();
    // Saturated monoid: divisibility of ϖ̄ is divisibility in the character lattice.
    let rho = c.varpi[0].gcd(&c.varpi[1]) as u64;
    let length = Rat::new((rho * det).into(), (n1 * n2).into());
    EdgeData { rho, n1, n2, det, length }
}
