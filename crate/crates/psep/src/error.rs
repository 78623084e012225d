//! Error types for the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("support bounds must satisfy lo < hi, got [{lo}, {hi}]")]
    InvalidSupport { lo: f64, hi: f64 },
    #[error("tabulated cdf decreases at row {row} (ΔF = {delta:e})")]
    NonMonotoneCdf { row: usize, delta: f64 },
    #[error("tabulated cdf must end at 1, got {last}")]
    CdfEndpoint { last: f64 },
    #[error("quantile level must lie in (0, 1], got {u}")]
    QuantileDomain { u: f64 },
    #[error("L^p order must satisfy p ≥ 1, got {p}")]
    OrderBelowOne { p: f64 },
    #[error("mesh [{mesh_lo}, {mesh_hi}] does not span the support [{lo}, {hi}]")]
    MeshMismatch {
        mesh_lo: f64,
        mesh_hi: f64,
        lo: f64,
        hi: f64,
    },
    #[error("mesh needs at least one cell")]
    EmptyMesh,
    #[error("mesh points must be strictly increasing")]
    UnorderedMesh,
    #[error("atom locations must be strictly increasing")]
    UnorderedSupports,
    #[error("weights must be positive and sum to 1, got sum {sum}")]
    BadWeights { sum: f64 },
    #[error("{0}")]
    BadParameter(String),
}

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("angle {theta} outside the open interval (−π, π)")]
    AngleDomain { theta: f64 },
    #[error("angle {theta} within {dist:e} of the singular angle {singular}")]
    SingularAngle {
        theta: f64,
        singular: f64,
        dist: f64,
    },
    #[error("indicator bounds must satisfy 0 ≤ α < β ≤ π, got ({alpha}, {beta})")]
    BadIndicator { alpha: f64, beta: f64 },
    #[error("{0}")]
    BadConfig(String),
}

#[derive(Debug, Error)]
pub enum HardyError {
    #[error("power series needs at least one coefficient")]
    EmptySeries,
    #[error("Parseval evaluation requires p = 2, got p = {p}")]
    ParsevalNeedsP2 { p: f64 },
    #[error("step quantile mean must vanish (|mean| = {mean:e} > {tol:e})")]
    NonzeroMean { mean: f64, tol: f64 },
    #[error("{0}")]
    BadConfig(String),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("step budget of {budget} exceeded before exit")]
    Runaway { budget: u64 },
    #[error("starting point lies outside the polygonal domain")]
    OriginOutside,
    #[error("{0}")]
    BadConfig(String),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Hardy(#[from] HardyError),
}
