//! Simulation of spatial processes on arbitrary site sets.
//!
//! All simulators are deterministic functions of `(seed, arguments)`:
//! replicate `i` draws from an independent ChaCha stream keyed by `i`, so
//! outputs are identical no matter how replicates are scheduled across
//! worker threads.

pub mod ai;
pub mod data;
pub mod gaussian;
pub mod maxstable;
pub mod mm;
pub mod sites;

pub use ai::{invert_ms, simulate_gaussian_copula_ai};
pub use data::{DataMatrix, Scale};
pub use gaussian::simulate_gaussian_field;
pub use maxstable::{simulate_smith, simulate_teg};
pub use mm::simulate_mm;
pub use sites::{haversine_km, sample_sites_uniform, Crs, SiteSet};
