//! First-order solvers for smooth minimax problems
//!
//! ```text
//! min_{x ∈ X} max_{y ∈ Y} f(x, y)
//! ```
//!
//! The crate covers the strongly-convex-strongly-concave, strongly-convex-concave,
//! convex-concave, nonconvex-strongly-concave and nonconvex-concave regimes. Every
//! solver works against a [`MinimaxProblem`], a bundle of value and partial-gradient
//! oracles plus the constraint sets and smoothness constants, and reports how many
//! oracle calls it spent through an [`OracleCounter`].
//!
//! Layout:
//!
//! * [`sets`], [`vector`], [`oracle`]: vectors, projections, oracle contracts and accounting.
//! * [`agd`]: projected Nesterov acceleration with a residual stopping rule.
//! * [`appa`]: inexact accelerated proximal point with a pluggable prox solver.
//! * [`maximin_ag2`]: two-timescale accelerated solver for proximal minimax steps.
//! * [`drivers`]: Minimax-APPA / Minimax-PPA and the regularization reductions.
//! * [`general_iteration`]: fixed-point based G1/G2 iterations and their drivers.
//! * [`metrics`]: duality gap, stationarity and Moreau-envelope certificates.
//! * [`problems`]: parametric test families with closed-form references.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::too_many_arguments)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

mod error;
mod math;

pub mod agd;
pub mod appa;
pub mod drivers;
pub mod general_iteration;
pub mod maximin_ag2;
pub mod metrics;
pub mod oracle;
pub mod problems;
pub mod report;
pub mod sets;
pub mod vector;

pub use error::Error;
pub use oracle::{counted, MinimaxProblem, OracleCounter, OracleCounts, Reference, SmoothnessProfile};
pub use report::{ConstantsMode, SolverOptions, SolverReport, Status, ToleranceLedger};
pub use sets::{grad_mapping_norm, project, ConstraintSet};
pub use vector::Vector;
