//! Characteristic exponent of
//! `z² f'' + z f' - [Σ D_m z^{-m} + L² + Σ B_m z^m] f = 0`
//! from Stokes multipliers, with independent numerical oracles.

pub mod asymptotics;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod frame;
pub mod monodromy;
pub mod mp;
pub mod oracle;
pub mod pipeline;
pub mod stokes;

pub use error::{Error, Result, Warning};
pub use frame::{choose_lambda, derive_frame, EquationParams, Frame, Kappa};
