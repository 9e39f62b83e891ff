//! Numerical toolkit for restrictions of Besov functions to hyperplanes.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computations:
//!
//! * [`seqspace`]: dyadic two-index sequences, `b_{p,q}` norms, the
//!   condensation inequalities and the shifted-block sequence constructions
//!   that drive the counterexamples;
//! * [`admissible`]: log-type weights `Ψ` with `c_∞` and summability tests;
//! * [`quark`]: the smooth partition-of-unity bump, quark evaluation,
//!   synthesis from sparse coefficients and the counterexample function;
//! * [`normest`]: grid functions and finite-difference Besov, BMO, weak-`L^p`
//!   and Hölder estimators;
//! * [`restrict`]: slicing, the `J` functionals and the divergence and
//!   membership scans.
//!
//! Exponents `p`, `q` are plain `f64` values; `f64::INFINITY` stands for `∞`.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;

pub mod admissible;
pub mod normest;
pub mod quark;
pub mod restrict;
pub mod seqspace;

pub use admissible::AdmissibleFn;
pub use error::{Error, Result};
pub use normest::{BesovParams, GridFunction, NormReport};
pub use quark::{BumpFn, CounterexampleSpec, QuarkCoeffs, QuarkIndex};
pub use seqspace::{DyadicSequence, LevelRun};
