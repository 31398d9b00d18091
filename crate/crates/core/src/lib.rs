//! Security analysis of entanglement-based qutrit key distribution against
//! phase-covariant cloning attacks.
//!
//! Layers, bottom to top: [`qudit`] (states and operators), [`cloner`]
//! (the cloning machine), [`analysis`] (information and thresholds) and
//! [`sim`] (Monte-Carlo protocol runs).

pub mod analysis;
pub mod cli;
pub mod cloner;
pub mod error;
pub mod qudit;
pub mod sim;

pub use error::{QkdError, Result};
