//! Exact arithmetic for the group of increasing piecewise-linear
//! homeomorphisms of the unit interval, plus the constructions built on it.

pub mod commutation;
pub mod encoding;
pub mod error;
pub mod factorization;
pub mod hoelder;
pub mod interval;
pub mod line_circle;
pub mod lipschitz;
pub mod pl;
pub mod rational;

pub use error::{Error, Result};
pub use interval::Interval;
pub use pl::{PLMap, Point};
pub use rational::Rational;
