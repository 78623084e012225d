//! Numerical construction of μ-domains for the planar Skorokhod embedding
//! problem.
//!
//! Given a zero-mean probability measure μ with bounded support, there is a
//! simply connected domain U ∋ 0 such that the real part of planar Brownian
//! motion stopped on ∂U has law μ. The domain is the image of the unit disc
//! under the power series G(z) = Σ aₖ zᵏ whose coefficients are the Fourier
//! cosine coefficients of φ(θ) = q(|θ|/π), with q the quantile of μ.
//!
//! This crate approximates U for a discretized target μₙ:
//!
//! * [`measures`] — measures, meshes, the right-endpoint discretization and
//!   exact `L^p` (Wasserstein) quantile distances;
//! * [`boundary`] — φ, the closed-form Hilbert transform of step quantiles,
//!   a principal-value quadrature oracle, and sampled boundary curves;
//! * [`hardy`] — the truncated series map, Hardy norms and distances, and
//!   the exact boundary trace φ + i·H{φ};
//! * [`simulate`] — exact exit-law sampling, time-changed disc Brownian
//!   paths, coupled exit-position/exit-time gap estimates, and an
//!   independent Euler exit oracle in the polygonal domain;
//! * [`cli`] — the `boundary` / `converge` / `simulate` subcommands used by
//!   the `psep` binary.
//!
//! Runnable demonstrations of each capability live in `examples/`.

// negated comparisons like !(lo < hi) reject NaN; the >= forms do not
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod cli;
pub mod error;
pub mod hardy;
pub mod measures;
pub mod simulate;

pub use error::{BoundaryError, HardyError, MeasureError, SimError};
