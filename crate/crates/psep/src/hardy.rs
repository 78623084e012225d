//! Truncated power-series conformal maps and Hardy-space norms.
//!
//! The cosine coefficients of the even step function φₙ(θ) = qₙ(|θ|/π) have
//! the closed form aₖ = (2/(kπ)) Σ_j x_j (sin(kθ_j) − sin(kθ_{j−1})); the
//! series G(z) = Σ aₖ zᵏ maps the unit disc onto the μₙ-domain. Hardy norms
//! are evaluated by Parseval (p = 2), by circle quadrature of the truncated
//! polynomial, or on a radius ladder; the exact boundary value of the
//! untruncated map is φₙ + i·H{φₙ}.

use std::f64::consts::PI;
use std::io::{self, BufRead, Write};

use num_complex::Complex64;

use crate::boundary::{self, JUMP_MARGIN};
use crate::error::{BoundaryError, HardyError};
use crate::measures::QuantileStep;

/// Tolerance on the step-quantile mean when building Fourier coefficients;
/// a nonzero mean would put a constant term in the series.
pub const MEAN_TOL: f64 = 1e-8;

/// Real power series G(z) = Σ_{k≥1} aₖ zᵏ with no constant term, so
/// G(0) = 0 always.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeriesMap {
    coeffs: Vec<f64>,
    deriv_coeff_max: f64,
}

impl PowerSeriesMap {
    /// `coeffs[k-1]` is aₖ; at least one coefficient is required.
    pub fn new(coeffs: Vec<f64>) -> Result<Self, HardyError> {
        if coeffs.is_empty() {
            return Err(HardyError::EmptySeries);
        }
        let deriv_coeff_max = coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| (i as f64 + 1.0) * a.abs())
            .fold(0.0, f64::max);
        Ok(Self {
            coeffs,
            deriv_coeff_max,
        })
    }

    /// Truncated Taylor series of scale·z / (1 − ratio·z):
    /// aₖ = scale·ratioᵏ⁻¹. Covers the Möbius maps of expanding discs used
    /// as the Hardy-divergence stress family.
    pub fn geometric(scale: f64, ratio: f64, k: usize) -> Result<Self, HardyError> {
        if k == 0 {
            return Err(HardyError::EmptySeries);
        }
        let mut coeffs = Vec::with_capacity(k);
        let mut a = scale;
        for _ in 0..k {
            coeffs.push(a);
            a *= ratio;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// aₖ (zero beyond the truncation).
    pub fn coeff(&self, k: usize) -> f64 {
        if k == 0 || k > self.coeffs.len() {
            0.0
        } else {
            self.coeffs[k - 1]
        }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    /// Horner evaluation of G; exact 0 at z = 0.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc * z
    }

    /// Horner evaluation of G'(z) = Σ k aₖ z^{k−1}.
    pub fn deriv(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &a) in self.coeffs.iter().enumerate().rev() {
            acc = acc * z + (k as f64 + 1.0) * a;
        }
        acc
    }

    /// Derivative with the geometric tail truncated once it is below 1e−16
    /// relative to the largest derivative coefficient. Identical to `deriv`
    /// for |z| close to 1; used in the time-change integral where the same
    /// point is never revisited.
    pub(crate) fn deriv_fast(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        if r >= 1.0 - 1e-9 || r == 0.0 {
            return self.deriv(z);
        }
        let keep = (1e-16 * (1.0 - r)).ln() / r.ln();
        let keep = if keep.is_finite() {
            (keep as usize).max(1)
        } else {
            1
        };
        if keep >= self.coeffs.len() {
            return self.deriv(z);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &a) in self.coeffs.iter().enumerate().take(keep).rev() {
            acc = acc * z + (k as f64 + 1.0) * a;
        }
        acc
    }

    /// CSV export in the `k,a_k` format.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k,a_k")?;
        for (i, a) in self.coeffs.iter().enumerate() {
            writeln!(w, "{},{:.16e}", i + 1, a)?;
        }
        Ok(())
    }

    /// Parse the `k,a_k` format written by [`Self::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, HardyError> {
        let mut coeffs = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| HardyError::BadConfig(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line == "k,a_k") {
                continue;
            }
            let mut cols = line.split(',');
            let err = || HardyError::BadConfig(format!("series csv line {}", lineno + 1));
            let k: usize = cols.next().and_then(|t| t.trim().parse().ok()).ok_or_else(err)?;
            let a: f64 = cols.next().and_then(|t| t.trim().parse().ok()).ok_or_else(err)?;
            if k != coeffs.len() + 1 {
                return Err(HardyError::BadConfig(format!(
                    "series csv indices must run 1..K, got {k} at line {}",
                    lineno + 1
                )));
            }
            coeffs.push(a);
        }
        Self::new(coeffs)
    }
}

/// Exact cosine coefficients of the even extension of a zero-mean step
/// quantile, as a truncated series map.
///
/// aₖ = (2/(kπ)) Σ_j x_j (sin(kθ_j) − sin(kθ_{j−1})), θ_j = π·u_j, θ_{−1} = 0.
pub fn fourier_coeffs_step(qs: &QuantileStep, k: usize) -> Result<PowerSeriesMap, HardyError> {
    if k == 0 {
        return Err(HardyError::EmptySeries);
    }
    let mean = qs.mean();
    if mean.abs() > MEAN_TOL {
        return Err(HardyError::NonzeroMean {
            mean,
            tol: MEAN_TOL,
        });
    }
    let thetas: Vec<f64> = qs.cuts().iter().map(|u| PI * u).collect();
    let values = qs.values();
    let m = thetas.len();

    // sin(k·θ_j) by rotation recurrence, refreshed to keep drift below ~1e-13
    let cos1: Vec<f64> = thetas.iter().map(|t| t.cos()).collect();
    let sin1: Vec<f64> = thetas.iter().map(|t| t.sin()).collect();
    let mut cos_k = cos1.clone();
    let mut sin_k = sin1.clone();
    let mut coeffs = Vec::with_capacity(k);
    for kk in 1..=k {
        if kk > 1 {
            if kk % 512 == 0 {
                for j in 0..m {
                    let (s, c) = (kk as f64 * thetas[j]).sin_cos();
                    sin_k[j] = s;
                    cos_k[j] = c;
                }
            } else {
                for j in 0..m {
                    let c = cos_k[j] * cos1[j] - sin_k[j] * sin1[j];
                    let s = sin_k[j] * cos1[j] + cos_k[j] * sin1[j];
                    cos_k[j] = c;
                    sin_k[j] = s;
                }
            }
        }
        // the final cut sits at θ = π exactly, where sin(kπ) = 0
        let mut acc = 0.0;
        let mut prev = 0.0;
        for j in 0..m {
            let s = if j + 1 == m { 0.0 } else { sin_k[j] };
            acc += values[j] * (s - prev);
            prev = s;
        }
        coeffs.push(2.0 * acc / (kk as f64 * PI));
    }
    PowerSeriesMap::new(coeffs)
}

/// How a Hardy norm is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardyMethod {
    /// (Σ aₖ²)^{1/2}; exact, p = 2 only.
    SeriesParseval,
    /// Circle L^p mean of the truncated polynomial at r = 1.
    BoundaryTrace,
    /// Maximum of the circle means over a radius ladder.
    RadialSup,
}

#[derive(Debug, Clone)]
pub struct HardyConfig {
    pub p: f64,
    pub method: HardyMethod,
    /// Quadrature nodes for the circle means (≥ 256).
    pub nodes: usize,
    /// Radius ladder for [`HardyMethod::RadialSup`].
    pub radii: Vec<f64>,
}

impl HardyConfig {
    pub fn parseval() -> Self {
        Self {
            p: 2.0,
            method: HardyMethod::SeriesParseval,
            nodes: 0,
            radii: Vec::new(),
        }
    }

    pub fn boundary_trace(p: f64, nodes: usize) -> Self {
        Self {
            p,
            method: HardyMethod::BoundaryTrace,
            nodes,
            radii: Vec::new(),
        }
    }

    pub fn radial_sup(p: f64, nodes: usize) -> Self {
        Self {
            p,
            method: HardyMethod::RadialSup,
            nodes,
            radii: vec![0.5, 0.75, 0.9, 0.99, 0.999, 1.0],
        }
    }

    fn validate(&self) -> Result<(), HardyError> {
        if !(self.p > 0.0) {
            return Err(HardyError::BadConfig(format!(
                "Hardy exponent must be positive, got {}",
                self.p
            )));
        }
        match self.method {
            HardyMethod::SeriesParseval => {
                if self.p != 2.0 {
                    return Err(HardyError::ParsevalNeedsP2 { p: self.p });
                }
            }
            HardyMethod::BoundaryTrace | HardyMethod::RadialSup => {
                if self.nodes < 256 {
                    return Err(HardyError::BadConfig(format!(
                        "circle quadrature needs at least 256 nodes, got {}",
                        self.nodes
                    )));
                }
                if self.method == HardyMethod::RadialSup
                    && (self.radii.is_empty() || self.radii.iter().any(|&r| !(0.0..=1.0).contains(&r)))
                {
                    return Err(HardyError::BadConfig(
                        "radius ladder must contain radii in [0, 1]".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// ((1/M) Σ |G(r e^{iθ_j})|^p)^{1/p} on the symmetric offset grid
/// θ_j = −π + 2π(j+½)/M.
fn circle_mean(g: &PowerSeriesMap, r: f64, p: f64, nodes: usize) -> f64 {
    let mut acc = 0.0;
    for j in 0..nodes {
        let theta = -PI + 2.0 * PI * (j as f64 + 0.5) / nodes as f64;
        let z = Complex64::from_polar(r, theta);
        acc += g.eval(z).norm().powf(p);
    }
    (acc / nodes as f64).powf(1.0 / p)
}

/// The p-th Hardy norm of the truncated map, by the configured method.
/// Truncated polynomials are entire, so the supremum over radii is attained
/// at the top of the ladder; `RadialSup` still scans the whole ladder.
pub fn hardy_norm(g: &PowerSeriesMap, cfg: &HardyConfig) -> Result<f64, HardyError> {
    cfg.validate()?;
    Ok(match cfg.method {
        HardyMethod::SeriesParseval => g.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt(),
        HardyMethod::BoundaryTrace => circle_mean(g, 1.0, cfg.p, cfg.nodes),
        HardyMethod::RadialSup => cfg
            .radii
            .iter()
            .map(|&r| circle_mean(g, r, cfg.p, cfg.nodes))
            .fold(0.0, f64::max),
    })
}

/// Hardy norm of the coefficient-wise difference (series padded with zeros
/// to a common length).
pub fn hardy_distance(
    g1: &PowerSeriesMap,
    g2: &PowerSeriesMap,
    cfg: &HardyConfig,
) -> Result<f64, HardyError> {
    let k = g1.truncation().max(g2.truncation());
    let diff: Vec<f64> = (1..=k).map(|i| g1.coeff(i) - g2.coeff(i)).collect();
    hardy_norm(&PowerSeriesMap::new(diff)?, cfg)
}

/// Exact boundary value G*(e^{iθ}) = φₙ(θ) + i·H{φₙ}(θ) of the untruncated
/// map of a step quantile.
pub fn boundary_trace(qs: &QuantileStep, theta: f64) -> Result<Complex64, BoundaryError> {
    Ok(Complex64::new(
        boundary::phi_eval(qs, theta)?,
        boundary::hilbert_phi_step(qs, theta)?,
    ))
}

/// Circle L^p mean of the exact boundary trace, on the symmetric offset
/// grid; nodes that fall inside the jump-angle margin are nudged outward.
/// This is the closed-form boundary route for Hardy norms of step-quantile
/// maps at arbitrary p.
pub fn hardy_norm_trace(qs: &QuantileStep, p: f64, nodes: usize) -> Result<f64, HardyError> {
    trace_mean(p, nodes, &boundary::jump_angles(qs), |theta| {
        boundary_trace(qs, theta).map(|z| z.norm())
    })
}

/// ‖G₁* − G₂*‖_{L^p} of two exact boundary traces on a common grid; the
/// Hardy distance of the underlying maps without truncation error.
pub fn hardy_distance_trace(
    qs1: &QuantileStep,
    qs2: &QuantileStep,
    p: f64,
    nodes: usize,
) -> Result<f64, HardyError> {
    let mut jumps = boundary::jump_angles(qs1);
    jumps.extend(boundary::jump_angles(qs2));
    trace_mean(p, nodes, &jumps, |theta| {
        Ok((boundary_trace(qs1, theta)? - boundary_trace(qs2, theta)?).norm())
    })
}

fn trace_mean(
    p: f64,
    nodes: usize,
    jumps: &[f64],
    f: impl Fn(f64) -> Result<f64, BoundaryError>,
) -> Result<f64, HardyError> {
    if nodes < 256 {
        return Err(HardyError::BadConfig(format!(
            "circle quadrature needs at least 256 nodes, got {nodes}"
        )));
    }
    if !(p > 0.0) {
        return Err(HardyError::BadConfig(format!(
            "Hardy exponent must be positive, got {p}"
        )));
    }
    let mut acc = 0.0;
    for j in 0..nodes {
        let mut theta = -PI + 2.0 * PI * (j as f64 + 0.5) / nodes as f64;
        if let Some(&near) = jumps
            .iter()
            .find(|&&s| (theta.abs() - s).abs() < 2.0 * JUMP_MARGIN)
        {
            // deterministic nudge away from the singular angle
            theta += (2.0 * JUMP_MARGIN).copysign(theta.abs() - near) * theta.signum();
        }
        let v = f(theta).map_err(|e| HardyError::BadConfig(e.to_string()))?;
        acc += v.powf(p);
    }
    Ok((acc / nodes as f64).powf(1.0 / p))
}
