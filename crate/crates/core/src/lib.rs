//! Convex-body sampling with the hit-and-run and ball-walk Markov chains.
//!
//! The crate is organised around a handful of modules:
//!
//! * [`geometry`]: convex bodies with analytic chord oracles, uniform
//!   directions, spherical caps, local ball fractions and `K_r` membership.
//! * [`targets`]: uniform and truncated-Gaussian targets and their exact
//!   one-dimensional restriction to a chord.
//! * [`chains`]: hit-and-run, ball walk, lazy wrapper, run loop and the
//!   evaluable hit-and-run transition density.
//! * [`localization`]: stochastic localization with identity driving matrix
//!   and the one-dimensional localization process on a grid.
//! * [`diagnostics`]: TV estimators, s-conductance, warm starts, step-size
//!   quantiles and the Lovász–Simonovits bound.
//! * [`logconcave1d`]: one-dimensional logconcave densities and numeric
//!   checks of their classical bounds.
//! * [`cli`]: the experiment runner behind the `hitrun` binary.
//!
//! All randomized routines take an explicit RNG; [`rng::stream`] derives
//! independent, reproducible streams from a master seed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chains;
pub mod cli;
pub mod diagnostics;
mod error;
pub mod geometry;
pub mod localization;
pub mod logconcave1d;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod stats;
pub mod targets;

pub use error::{Error, Result};
pub use geometry::{AffineMap, Chord, ConvexBody};
pub use stats::Estimate;
pub use targets::{ChordLaw, Target};
