//! Viscous shock profiles for a one-dimensional compressible gas with
//! Brenner-type volume diffusion, in Lagrangian mass coordinates.

pub mod error;
pub mod gas;
pub mod integrate;
pub mod linalg;
pub mod shooting;
pub mod slow_fast;
pub mod verify;
pub mod wave;

pub use error::{Error, Result};
pub use gas::{EndState, GasParams, ShockData, ShockFamily};
pub use wave::PhaseState;
pub use shooting::{shoot_profile, IntegratorOptions, Profile};
pub use verify::{sweep, verify, SweepReport, VerificationReport};
