//! Penalized Burer–Monteiro solver for unconstrained binary programs.
//!
//! A binary program `max ϑ(x), x ∈ {-1,1}^N` is lifted to a rank-one
//! constrained matrix problem over `X = VᵀV`, where `V` is an `m × p`
//! matrix with unit-norm columns. The rank-one condition is written as the
//! difference of two convex functions (`‖V‖_F² − ‖V‖²`) and moved into the
//! objective with an increasing penalty weight. Each penalty subproblem is
//! solved by a majorization–minimization scheme with Nesterov extrapolation
//! whose steps have a closed form (a per-column normalization).
//!
//! The crate is `no_std` (it needs `alloc`). File formats, timing and the
//! command-line interface live in the `dcfac` crate.
//!
//! Module map:
//!
//! * [`linalg`]: dense/sparse kernels and power iteration.
//! * [`model`]: objectives `f(VᵀV)`, their gradients, and the max-cut, UBQP
//!   and product-of-quadratics reformulations.
//! * [`inner`]: the extrapolated MM solver for a fixed penalty weight.
//! * [`driver`]: the outer penalty loop, rank-one extraction and rounding.
//! * [`generators`]: random and max-cut-pair product instances.
//! * [`oracle`]: brute-force enumeration and runtime certificate checks.
//!
//! ```
//! use dcfac_core::model::build_maxcut;
//! use dcfac_core::{solve, EdgeList, NoClock, PenaltyConfig};
//!
//! let g = EdgeList { n: 3, edges: vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)] };
//! let inst = build_maxcut(&g.weight_matrix()?)?;
//! let report = solve(&inst, &PenaltyConfig::default(), &NoClock)?;
//! assert_eq!(report.obj, 2.0);
//! # Ok::<(), dcfac_core::Error>(())
//! ```
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod driver;
mod error;
pub mod generators;
pub mod inner;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod rng;

pub use driver::{solve, BetaMode, Clock, ExitReason, NoClock, PenaltyConfig, SolveReport};
pub use error::{Error, Result};
pub use inner::FactorMatrix;
pub use linalg::{DenseMat, SingularTriple, SparseSymMatrix};
pub use model::{EdgeList, Instance, Objective, Problem};
