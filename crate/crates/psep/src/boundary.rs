//! Boundary parametrization of the approximating μₙ-domain.
//!
//! For a step quantile qₙ the boundary of the associated domain is
//! θ ↦ (φₙ(θ), H{φₙ}(θ)) on (−π, π), where φₙ(θ) = qₙ(|θ|/π) and H is the
//! periodic Hilbert transform (conjugate function). For step functions H has
//! a closed form as a sum of log-sine cross ratios; a principal-value
//! quadrature rule serves as an independent oracle for that closed form.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::error::BoundaryError;
use crate::measures::QuantileStep;

/// Minimum admissible distance from a jump angle when evaluating H{φₙ}.
pub const JUMP_MARGIN: f64 = 1e-9;

/// ln|sin(t/2)|, the building block of all the closed forms.
#[inline]
fn log_sin_half(t: f64) -> f64 {
    (0.5 * t).sin().abs().ln()
}

/// g(θ, b) = ln|sin((θ+b)/2)| − ln|sin((θ−b)/2)|.
///
/// The b = 0 and b = π values vanish identically (the two factors cancel in
/// the cross ratio), so they are returned exactly rather than evaluated.
#[inline]
fn log_ratio(theta: f64, b: f64) -> f64 {
    if b == 0.0 || b == PI {
        return 0.0;
    }
    log_sin_half(theta + b) - log_sin_half(theta - b)
}

/// φₙ(θ) = qₙ(|θ|/π); even in θ by construction.
pub fn phi_eval(qs: &QuantileStep, theta: f64) -> Result<f64, BoundaryError> {
    if !(theta.abs() < PI) {
        return Err(BoundaryError::AngleDomain { theta });
    }
    Ok(qs.eval(theta.abs() / PI))
}

/// Jump angles θ_k = π·u_k of φₙ on (0, π), in increasing order.
pub fn jump_angles(qs: &QuantileStep) -> Vec<f64> {
    qs.jump_levels().iter().map(|u| PI * u).collect()
}

fn check_singular(theta: f64, singular: &[f64], margin: f64) -> Result<(), BoundaryError> {
    for &s in singular {
        let dist = (theta.abs() - s).abs();
        if dist < margin {
            return Err(BoundaryError::SingularAngle {
                theta,
                singular: s.copysign(theta),
                dist,
            });
        }
    }
    Ok(())
}

/// Hilbert transform of the even indicator 1_{|·| ∈ (α, β)} at θ:
///
/// (1/π) ln | sin((θ−α)/2) sin((θ+β)/2) / ( sin((θ−β)/2) sin((θ+α)/2) ) |.
///
/// The modulus inside the logarithm matches the principal-value definition;
/// the cross ratio itself changes sign across the singular angles.
pub fn hilbert_indicator(alpha: f64, beta: f64, theta: f64) -> Result<f64, BoundaryError> {
    if !(0.0 <= alpha && alpha < beta && beta <= PI) {
        return Err(BoundaryError::BadIndicator { alpha, beta });
    }
    let mut singular = Vec::new();
    if alpha > 0.0 {
        singular.push(alpha);
    }
    if beta < PI {
        singular.push(beta);
    }
    check_singular(theta, &singular, 1e-12)?;
    Ok((log_ratio(theta, beta) - log_ratio(theta, alpha)) / PI)
}

/// Closed-form Hilbert transform of the step function φₙ:
///
/// H{φₙ}(θ) = (1/π) Σ_k x_k ln | sin((θ−θ_{k−1})/2) sin((θ+θ_k)/2)
///                            / ( sin((θ−θ_k)/2) sin((θ+θ_{k−1})/2) ) |
///
/// with θ_k = π·u_k and θ_{−1} = 0. Odd in θ, with logarithmic
/// singularities exactly at the jump angles ±θ_k.
pub fn hilbert_phi_step(qs: &QuantileStep, theta: f64) -> Result<f64, BoundaryError> {
    if !(theta.abs() < PI) {
        return Err(BoundaryError::AngleDomain { theta });
    }
    let jumps = jump_angles(qs);
    check_singular(theta, &jumps, JUMP_MARGIN)?;
    let mut acc = 0.0;
    let mut lo = 0.0;
    for (k, &v) in qs.values().iter().enumerate() {
        let hi = PI * qs.cuts()[k];
        acc += v * (log_ratio(theta, hi) - log_ratio(theta, lo));
        lo = hi;
    }
    Ok(acc / PI)
}

/// Configuration of the principal-value quadrature oracle.
#[derive(Debug, Clone)]
pub struct PvConfig {
    /// Cutoff ladder; the rule is evaluated per η and extrapolated to η → 0.
    pub etas: Vec<f64>,
    /// Midpoint nodes per side of the singularity (log-graded).
    pub nodes_per_side: usize,
    /// Known jump angles of the integrand, used to split the integration
    /// range into smooth pieces. Empty for smooth integrands.
    pub breakpoints: Vec<f64>,
}

impl Default for PvConfig {
    fn default() -> Self {
        Self {
            etas: vec![1e-3, 1e-4, 1e-5],
            nodes_per_side: 8192,
            breakpoints: Vec::new(),
        }
    }
}

impl PvConfig {
    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }
}

/// Principal-value quadrature of the conjugate-function integral
///
/// H{f}(θ) ≈ (1/2π) ∫_{η ≤ |t| ≤ π} f(θ−t) cot(t/2) dt,
///
/// folded to t > 0 so that mirrored nodes cancel the 1/t spike, evaluated by
/// a log-graded composite midpoint rule per smooth piece, and Richardson
/// extrapolated over the η ladder. Independent of every closed form above.
pub fn hilbert_pv_quadrature<F: Fn(f64) -> f64>(
    f: F,
    theta: f64,
    cfg: &PvConfig,
) -> Result<f64, BoundaryError> {
    if cfg.nodes_per_side < 16 {
        return Err(BoundaryError::BadConfig(format!(
            "principal-value rule needs at least 16 nodes per side, got {}",
            cfg.nodes_per_side
        )));
    }
    if cfg.etas.is_empty() || cfg.etas.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(BoundaryError::BadConfig(
            "cutoff ladder must contain values in (0, 1)".into(),
        ));
    }

    // t-locations in (0, π) where f(θ−t) or f(θ+t) crosses a breakpoint.
    let mut splits = Vec::new();
    for &w in &cfg.breakpoints {
        for diff in [theta - w, w - theta] {
            let mut t = diff.rem_euclid(2.0 * PI);
            if t > PI {
                t = 2.0 * PI - t; // not a crossing of this side, but of the mirrored one
            }
            if t > 0.0 && t < PI {
                splits.push(t);
            }
        }
    }
    splits.sort_by(|a, b| a.partial_cmp(b).unwrap());
    splits.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

    let mut estimates = Vec::with_capacity(cfg.etas.len());
    for &eta in &cfg.etas {
        let mut bounds = vec![eta];
        bounds.extend(splits.iter().copied().filter(|&t| t > eta && t < PI));
        bounds.push(PI);

        let total_log: f64 = bounds
            .windows(2)
            .map(|w| (w[1] / w[0]).ln())
            .sum();
        let mut acc = 0.0;
        for w in bounds.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let log_len = (t1 / t0).ln();
            let nodes = ((cfg.nodes_per_side as f64 * log_len / total_log).round() as usize).max(8);
            let ds = log_len / nodes as f64;
            let s0 = t0.ln();
            for j in 0..nodes {
                let t = (s0 + (j as f64 + 0.5) * ds).exp();
                let kernel = 1.0 / (0.5 * t).tan();
                acc += ds * t * (f(theta - t) - f(theta + t)) * kernel;
            }
        }
        estimates.push(acc / (2.0 * PI));
    }
    Ok(neville_at_zero(&cfg.etas, &estimates))
}

/// Polynomial extrapolation of (x_i, y_i) to x = 0.
fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut v = ys.to_vec();
    let n = v.len();
    for level in 1..n {
        for i in 0..n - level {
            let (x0, x1) = (xs[i], xs[i + level]);
            v[i] = (x0 * v[i + 1] - x1 * v[i]) / (x0 - x1);
        }
    }
    v[0]
}

/// Symmetric evaluation grid avoiding the jump angles of a step quantile.
#[derive(Debug, Clone)]
pub struct AngleGrid {
    angles: Vec<f64>,
    jump_angles: Vec<f64>,
}

impl AngleGrid {
    /// Build ~`grid_size` angles, symmetric about 0, placed at midpoint
    /// offsets inside each cell between consecutive jump angles.
    pub fn symmetric(jumps: &[f64], grid_size: usize) -> Result<Self, BoundaryError> {
        if grid_size < 64 {
            return Err(BoundaryError::BadConfig(format!(
                "grid size must be at least 64, got {grid_size}"
            )));
        }
        let half = grid_size / 2;
        let mut bounds = vec![0.0];
        bounds.extend(jumps.iter().copied());
        bounds.push(PI);

        // proportional allocation with a floor of 2 nodes per cell
        let mut alloc: Vec<usize> = bounds
            .windows(2)
            .map(|w| (((w[1] - w[0]) / PI * half as f64).floor() as usize).max(2))
            .collect();
        let assigned: usize = alloc.iter().sum();
        if assigned < half {
            // widest cell absorbs the remainder
            let widest = bounds
                .windows(2)
                .enumerate()
                .max_by(|a, b| {
                    (a.1[1] - a.1[0]).partial_cmp(&(b.1[1] - b.1[0])).unwrap()
                })
                .map(|(i, _)| i)
                .unwrap();
            alloc[widest] += half - assigned;
        }

        let mut positive = Vec::with_capacity(half);
        for (cell, w) in bounds.windows(2).enumerate() {
            let len = w[1] - w[0];
            // keep the half-cell offset above the admissibility margin
            let m = alloc[cell].min((len / (2.0 * JUMP_MARGIN)) as usize);
            for j in 0..m {
                positive.push(w[0] + (j as f64 + 0.5) * len / m as f64);
            }
        }
        positive.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut angles = Vec::with_capacity(2 * positive.len());
        angles.extend(positive.iter().rev().map(|t| -t));
        angles.extend(positive.iter().copied());
        Ok(Self {
            angles,
            jump_angles: jumps.to_vec(),
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn jump_angles(&self) -> &[f64] {
        &self.jump_angles
    }
}

/// One boundary sample (θ, φₙ(θ), H{φₙ}(θ)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
}

/// Sampled boundary parametrization of the μₙ-domain, in increasing θ.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    samples: Vec<BoundarySample>,
}

/// Evaluate the boundary parametrization on a symmetric grid that avoids
/// every jump angle by construction.
pub fn boundary_curve(qs: &QuantileStep, grid_size: usize) -> Result<BoundaryCurve, BoundaryError> {
    let grid = AngleGrid::symmetric(&jump_angles(qs), grid_size)?;
    let mut samples = Vec::with_capacity(grid.angles().len());
    for &theta in grid.angles() {
        let x = phi_eval(qs, theta)?;
        let y = hilbert_phi_step(qs, theta)?;
        samples.push(BoundarySample { theta, x, y });
    }
    Ok(BoundaryCurve { samples })
}

impl BoundaryCurve {
    /// Assemble a curve from raw samples (θ strictly increasing), e.g. for
    /// replaying an exported CSV or driving the exit oracle on a synthetic
    /// polygon.
    pub fn from_samples(samples: Vec<BoundarySample>) -> Result<Self, BoundaryError> {
        if samples.is_empty() {
            return Err(BoundaryError::BadConfig("empty boundary curve".into()));
        }
        if samples.windows(2).any(|w| !(w[0].theta < w[1].theta)) {
            return Err(BoundaryError::BadConfig(
                "boundary samples must have strictly increasing angles".into(),
            ));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[BoundarySample] {
        &self.samples
    }

    /// Vertices in θ order; the polygon closes with the implicit edge from
    /// the last sample back to the first (a near-vertical segment at θ ≈ ±π).
    pub fn polygon(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.x, s.y)).collect()
    }

    /// CSV with header `theta,x,y`, 17 significant digits per field.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "theta,x,y")?;
        for s in &self.samples {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", s.theta, s.x, s.y)?;
        }
        Ok(())
    }

    /// Self-contained SVG polyline of the curve (single path element).
    pub fn to_svg(&self) -> String {
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.samples {
            xmin = xmin.min(s.x);
            xmax = xmax.max(s.x);
            ymin = ymin.min(s.y);
            ymax = ymax.max(s.y);
        }
        let pad_x = 0.05 * (xmax - xmin).max(1e-6);
        let pad_y = 0.05 * (ymax - ymin).max(1e-6);
        let width = xmax - xmin + 2.0 * pad_x;
        let height = ymax - ymin + 2.0 * pad_y;
        // no y-flip: the curve is symmetric about the x-axis, so svg's
        // downward y-axis renders the same shape
        let mut d = String::new();
        for (i, s) in self.samples.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{}{:.6} {:.6} ", cmd, s.x, s.y));
        }
        d.push('Z');
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">\n\
             <path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{:.6}\"/>\n</svg>\n",
            xmin - pad_x,
            ymin - pad_y,
            width,
            height,
            d.trim_end(),
            0.004 * width.max(height)
        )
    }
}
