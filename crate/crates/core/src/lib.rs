//! Inverse of the two-parameter map `f(z) = z / (1 + gamma z) * (1 + z/kappa)^kappa`.
//!
//! The crate decides for which `(kappa, gamma)` a main branch `W` exists, describes the
//! fundamental domain it maps onto, evaluates `W` off the cut set, and verifies all of it
//! numerically.

pub mod domain;
pub mod error;
pub mod inverse;
pub mod params;
pub mod roots;
pub mod scalar_analysis;
pub mod tsallis_map;
pub mod verify;

pub use error::{Error, Result};
pub use params::{Angle, Kappa, Params};
