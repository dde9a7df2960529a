//! Numerics for phase segregation in two-component Bose-Einstein
//! condensates.
//!
//! The crate covers four layers of the same physical problem:
//!
//! * [`thomas_fermi`] — closed-form segregated Thomas-Fermi profiles in a
//!   harmonic trap, their energies, and an L¹ stability harness.
//! * [`gp`] — 2D constrained minimization of the Gross-Pitaevskii energy,
//!   its convergence to the Thomas-Fermi densities, and the
//!   Lassoued-Mironescu decomposition around the one-component minimizer.
//! * [`interface1d`] — the 1D optimal transition problem defining the
//!   interface tension `σ_{λ,K}`, with both asymptotic regimes and their
//!   explicit competitor bounds.
//! * [`shape`] / [`regime`] — the weighted isoperimetric limit functionals
//!   on the unit disk, the second-order stability spectrum around the ball,
//!   and a symmetry-breaking/rigidity regime detector.
//!
//! The [`cli`] and [`run`] modules expose everything through an experiment
//! runner with CSV/JSON outputs.  Parameter sweeps are data-parallel; see
//! [`exec::ExecMode`].

pub mod cli;
pub mod csvio;
pub mod error;
pub mod exec;
pub mod gp;
pub mod grid;
pub mod interface1d;
pub mod quad;
pub mod regime;
pub mod run;
pub mod shape;
pub mod thomas_fermi;

pub use error::{Error, Result};
pub use exec::ExecMode;
