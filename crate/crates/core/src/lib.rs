//! Exact combinatorics of snc-models over discretely valued fields.
//!
//! A model is a weighted simplicial dual complex: components carry a
//! multiplicity `N` and the order `w` of a pluricanonical form along them,
//! strata carry point-count polynomials and tame degrees. On top of this the
//! crate computes
//!
//! * skeleta, weight functions, the Kontsevich–Soibelman skeleton and its
//!   temperate part ([`skeleton`]);
//! * integral Lebesgue and stable measures, test functions and discrete
//!   approximations ([`measures`]), and edge data of 2-dimensional cones ([`cone2d`]);
//! * normalized base change and Shilov boundaries ([`basechange`]);
//! * exponentially weighted lattice sums and an exact simulator of normalized
//!   p-adic measures with convergence reports ([`convergence`]);
//! * finite fields and brute-force point counts ([`langweil`]).
//!
//! All arithmetic is exact; quantities involving irrational powers are kept
//! symbolic ([`QExpSum`]) and enclosed in rational intervals only when printed.

pub mod basechange;
pub mod cli;
pub mod cone2d;
pub mod convergence;
pub mod error;
pub mod exactcore;
pub mod langweil;
pub mod measures;
pub mod model;
pub mod skeleton;

pub use basechange::{base_change, lattice_correspondence_check, shilov_boundary, ExtensionParams, ShilovResult};
pub use error::{Error, Result};
pub use exactcore::{rat, rint, CountPoly, MPoly, QExpSum, Rat, Value};
pub use model::{builtin_model, load_model, parse_model, Component, SncModel, Stratum};
pub use skeleton::{SkPoint, SubComplex};
