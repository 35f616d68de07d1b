//! Physics truth model for turret-moored vessel response statistics.
//!
//! The pipeline runs per metocean state: weathervaning heading
//! ([`heading`]), catenary mooring statics ([`mooring`]), frequency-domain
//! screening ([`response`]), quasi-dynamic time-domain simulation with
//! Gumbel extremes for critical states ([`qd`]), and assembly of a
//! regression training table ([`dataset`]).

pub mod config;
pub mod dataset;
pub mod error;
pub mod heading;
pub mod metocean;
pub mod mooring;
pub mod pipeline;
pub mod qd;
pub mod response;
pub mod rng;
pub mod vessel;

pub use error::{CoreError, Result, Violation};
