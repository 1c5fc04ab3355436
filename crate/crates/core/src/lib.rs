//! Accessibility and local controllability of discrete-time linear control
//! systems on Lie groups.
//!
//! A linear system on a Lie group `G` is a recursion `g_{k+1} = f(u_k, g_k)`
//! where `f(u, g) = F(u) · f0(g)`, `F(0) = e` and `f0` is an automorphism of
//! `G`. This crate computes, in ambient coordinates:
//!
//! * the right-trivialized ("hat") derivative of maps between Lie groups,
//! * the control distribution `W` spanned by `d̂F_u` over the control range,
//! * its smallest `ψ`-invariant hull (the image of the Kalman matrix),
//! * the Lie subalgebra generated by that hull, and the accessibility verdict,
//! * the ad-rank matrix and the local controllability verdict at the identity,
//! * regular pairs and Monte-Carlo probes of reachable/controllable sets.
//!
//! The built-in catalog ([`catalog`]) ships the SL(2,ℝ), Aff(2,ℝ) and
//! Heisenberg example systems along with linear systems on ℝⁿ. Systems can
//! also be described in a TOML file with per-coordinate expressions
//! ([`sysfile`], [`expr`]).

pub mod algebra;
pub mod analysis;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod expr;
pub mod groups;
pub mod report;
pub mod sysfile;
pub mod system;

pub use algebra::{AlgebraBasis, AlgebraVector, RealMatrix};
pub use analysis::{AccessibilityReport, AdRankReport, SampleCloud};
pub use error::{Error, Result};
pub use groups::{GroupPoint, LieGroupModel};
pub use system::{ControlRange, ControlSequence, LinearSystem};

/// Default relative rank threshold.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default central finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Default number of grid points per control axis.
pub const DEFAULT_GRID: usize = 11;
/// Default RNG seed.
pub const DEFAULT_SEED: u64 = 0;
