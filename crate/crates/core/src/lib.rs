//! Two-mode Gaussian states: moments, covariance matrices, invariants,
//! nonclassicality and entanglement quantifiers, beam splitters,
//! Heisenberg–Langevin dynamics, quasidistributions and a Fock-space oracle.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod factories;
pub mod fockcheck;
pub mod measures;
pub mod ode;
pub mod qpd;
pub mod sampling;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use state::{BeamSplitter, NormalMoments};
