//! Qualitative spatio-temporal constraint reasoning over the rational order.

pub mod domain;
pub mod error;
pub mod horn;
pub mod instance;
pub mod interp;
pub mod point;
pub mod poly;
pub mod pp;
pub mod relations;
pub mod sample;
pub mod solve;

pub use domain::{rat, Block, Calculus, DirectedInterval, Interval, PlanePoint, Rational, Value};
pub use error::{Error, Result};
