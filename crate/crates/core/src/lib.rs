//! Simulation library for discrete-in-time rebalancing of continuous
//! portfolio strategies under multi-dimensional Brownian markets.
//!
//! The library builds sample paths of a market model together with the
//! structural processes of the target strategy (the share process, its
//! quadratic-covariation density, and the ellipsoid matrix solving an
//! algebraic Riccati equation), constructs simple predictable rebalancing
//! schedules on those paths, and evaluates the error/effort cost
//! functionals and their asymptotic limits.

pub mod battery;
pub mod cost;
pub mod error;
pub mod expr;
pub mod market;
pub mod matalg;
pub mod moments;
pub mod rebalance;
pub mod riccati;

mod smallmat;

pub use error::{Error, Result};
