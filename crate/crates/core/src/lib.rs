//! Mean-field Langevin particles attracted to their barycenter.
//!
//! `N` particles in a confining potential `V` are pulled towards their
//! empirical mean with strength `kappa` and driven by noise of size `sigma`.
//! The crate covers the stationary problem (the self-consistency map `f` and
//! its fixed points, the critical noise level), particle simulation with
//! Euler–Maruyama, exit-time ensembles for metastability studies, and the
//! modified drift that makes a chosen stationary solution globally unique.
//!
//! ```
//! use mflangevin::{fixedpoint, ModelParams};
//!
//! let params = ModelParams::double_well(0.5);
//! let report = fixedpoint::find_all_fixed_points(&params, 5.0, 401, 1e-12).unwrap();
//! assert_eq!(report.roots.len(), 3);
//! ```

pub mod config;
pub mod error;
pub mod fixedpoint;
pub mod model;
pub mod modifier;
pub mod quadrature;
pub mod simulate;
pub mod stats;

pub use config::Config;
pub use error::{Error, Result};
pub use model::{ModelParams, PotentialKind, PotentialSpec};
