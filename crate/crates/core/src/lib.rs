//! Coupled expanding circle maps on strongly heterogeneous random networks.
//!
//! The crate covers the full pipeline:
//!
//! - [`graph`]: expected-degree sequences, directed Chung-Lu sampling, and
//!   degree/Y-statistic concentration checks;
//! - [`dynamics`]: circle maps, product-form couplings, and the synchronous
//!   network iteration;
//! - [`measure`]: Ulam transfer operators, invariant densities, the projective
//!   cone metric, and the effective mean field g;
//! - [`reduction`]: the reduced hub model, fluctuation extraction, fixed-point
//!   stability, and hub coherence;
//! - [`experiments`]: deterministic parameter sweeps with plot-ready output.

pub mod circle;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod measure;
pub mod reduction;
pub mod rng;

pub use error::{Error, Result};
