//! Privacy-region obfuscation of GPS tracks and Bayesian home-identification attacks.
//!
//! A user's home `theta` is hidden by cutting each track before it first leaves a
//! privacy disk (and after it last re-enters). On Brownian tracks the exit points are
//! sufficient for `theta`, and their law is the harmonic measure of the disk, which
//! gives the attacker an exact likelihood. This crate simulates the strategies, mounts
//! the attack with a Metropolis sampler (cross-checked by grid quadrature) and
//! compares strategies by posterior MSE at matched squared perturbation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod harmonic;
pub mod inference;
pub mod rng;
pub mod strategies;
pub mod trajectory;

pub use error::{Error, Result};
pub use geometry::{Disk, Point};
