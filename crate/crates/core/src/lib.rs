//! Spatio-temporal squeezing eigenmodes of a pulsed noncollinear type-I
//! optical parametric amplifier.
//!
//! Units throughout: lengths in μm, times in fs, angular frequencies in
//! rad/fs, transverse wavevectors in μm⁻¹.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analysis;
pub mod config;
pub mod decomposition;
pub mod dispersion;
mod error;
pub mod gaussian;
pub mod hermite;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod par;
pub mod phasematch;
pub mod pipeline;
pub mod units;
pub mod validity;

pub use error::{Error, Result, Stage, StageExt};
pub use par::Execution;
