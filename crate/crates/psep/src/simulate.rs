//! Monte Carlo verification layer.
//!
//! Exit positions from a μₙ-domain are sampled exactly by pushing a uniform
//! circle angle through the boundary trace; exit times come from the Lévy
//! time change σ(t) = ∫|G′(B_s)|² ds of a disc Brownian path. Driving both
//! the n-th and the reference domain with a common angle (positions) or a
//! common disc path (times) realizes the canonical coupling, so the gap
//! estimators converge to the coupled moments. An Euler scheme inside the
//! sampled boundary polygon provides an independent, O(√dt)-biased check on
//! the exit law. All randomness is ChaCha8 with one stream per sample index,
//! so every result is reproducible bit-for-bit for any work partition.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::boundary::{jump_angles, BoundaryCurve, JUMP_MARGIN};
use crate::error::SimError;
use crate::hardy::{boundary_trace, PowerSeriesMap, MEAN_TOL};
use crate::measures::{Cdf, QuantileStep};

use std::f64::consts::PI;

/// Default per-path step budget.
pub const STEP_BUDGET: u64 = 100_000_000;

/// Largest admissible Euler step.
pub const MAX_DT: f64 = 1e-3;

// stream tags keeping the per-purpose substreams of a seed disjoint
const STREAM_EXIT: u64 = 1 << 48;
const STREAM_ANGLE: u64 = 2 << 48;
const STREAM_PATH: u64 = 3 << 48;
const STREAM_EULER: u64 = 4 << 48;

fn stream_rng(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag | index);
    rng
}

/// A disc Brownian path killed on the unit circle.
#[derive(Debug, Clone)]
pub struct DiscPath {
    /// Euler step size.
    pub dt: f64,
    /// Positions from the origin up to and including the first point with
    /// |z| ≥ 1; all earlier points are interior.
    pub positions: Vec<Complex64>,
    /// dt × (number of steps taken).
    pub exit_time: f64,
    /// First outside point projected radially to the circle.
    pub exit_point: Complex64,
}

/// One draw of the canonical coupling: a common disc exit angle θ with the
/// coupled exit positions and time-changed exit times of two domains.
#[derive(Debug, Clone)]
pub struct CouplingSample {
    pub theta: f64,
    pub z_n: Complex64,
    pub z: Complex64,
    pub tau_n: f64,
    pub tau: f64,
}

/// A named Monte Carlo estimate with its normal-approximation standard error.
#[derive(Debug, Clone, Serialize)]
pub struct NamedEstimate {
    pub name: String,
    pub value: f64,
    pub std_error: f64,
}

/// A named scalar statistic (KS distances and similar).
#[derive(Debug, Clone, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

/// Reproducible record of one simulation run. Every serialized field is a
/// deterministic function of (seed, N, dt, config); the wall clock is kept
/// out of the serialization so that report files are byte-identical across
/// reruns.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub n_samples: usize,
    pub dt: f64,
    pub estimates: Vec<NamedEstimate>,
    pub ks: Vec<NamedValue>,
    #[serde(skip)]
    pub wall_clock_secs: f64,
}

impl SimulationReport {
    pub fn new(seed: u64, n_samples: usize, dt: f64) -> Self {
        Self {
            seed,
            n_samples,
            dt,
            estimates: Vec::new(),
            ks: Vec::new(),
            wall_clock_secs: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Uniform angle on (−π, π) avoiding the given jump angles (a null set;
/// inadmissible draws are rejected and redrawn).
fn admissible_uniform_angle(rng: &mut ChaCha8Rng, jumps: &[f64]) -> f64 {
    loop {
        let theta = rng.gen_range(-PI..PI);
        if theta.abs() < PI - JUMP_MARGIN
            && jumps.iter().all(|&j| (theta.abs() - j).abs() >= JUMP_MARGIN)
        {
            return theta;
        }
    }
}

/// Exact sampling of the exit position Z_τ from the μₙ-domain: push a
/// uniform circle angle through the boundary trace. No path simulation.
pub fn sample_exit_points(qs: &QuantileStep, n: usize, seed: u64) -> Vec<Complex64> {
    let jumps = jump_angles(qs);
    (0..n)
        .map(|i| {
            let mut rng = stream_rng(seed, STREAM_EXIT, i as u64);
            let theta = admissible_uniform_angle(&mut rng, &jumps);
            boundary_trace(qs, theta).expect("admissible angle")
        })
        .collect()
}

/// Euler walk inside the unit disc from 0: Gaussian increments of variance
/// dt per coordinate until |z| ≥ 1.
pub fn simulate_disc_path(dt: f64, seed: u64) -> Result<DiscPath, SimError> {
    disc_path_with_rng(dt, &mut ChaCha8Rng::seed_from_u64(seed), STEP_BUDGET)
}

fn disc_path_with_rng(
    dt: f64,
    rng: &mut ChaCha8Rng,
    budget: u64,
) -> Result<DiscPath, SimError> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(SimError::BadConfig(format!(
            "disc step size must lie in (0, {MAX_DT}], got {dt}"
        )));
    }
    let sigma = dt.sqrt();
    let mut z = Complex64::new(0.0, 0.0);
    let mut positions = vec![z];
    let mut steps: u64 = 0;
    loop {
        if steps >= budget {
            return Err(SimError::Runaway { budget });
        }
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        z += Complex64::new(sigma * g1, sigma * g2);
        steps += 1;
        positions.push(z);
        if z.norm_sqr() >= 1.0 {
            break;
        }
    }
    Ok(DiscPath {
        dt,
        positions,
        exit_time: dt * steps as f64,
        exit_point: z / z.norm(),
    })
}

/// Lévy time change of a disc path under the map G: the left-point Riemann
/// sum dt·Σ |G′(B_{t_i})|² over the interior positions.
pub fn time_change(path: &DiscPath, g: &PowerSeriesMap) -> f64 {
    let interior = &path.positions[..path.positions.len() - 1];
    let sum: f64 = interior.iter().map(|&z| g.deriv_fast(z).norm_sqr()).sum();
    path.dt * sum
}

/// The coupled draw induced by one disc path: common exit angle, coupled
/// exit positions (boundary traces) and coupled time-changed exit times.
pub fn coupling_sample(
    path: &DiscPath,
    qs_n: &QuantileStep,
    qs_ref: &QuantileStep,
    g_n: &PowerSeriesMap,
    g_ref: &PowerSeriesMap,
) -> Result<CouplingSample, SimError> {
    let mut jumps = jump_angles(qs_n);
    jumps.extend(jump_angles(qs_ref));
    let mut theta = path.exit_point.im.atan2(path.exit_point.re);
    // the exact jump angles form a null set; nudge the rare collision
    if let Some(&near) = jumps
        .iter()
        .find(|&&j| (theta.abs() - j).abs() < JUMP_MARGIN)
    {
        theta += (2.0 * JUMP_MARGIN).copysign(theta.abs() - near) * theta.signum();
    }
    Ok(CouplingSample {
        theta,
        z_n: boundary_trace(qs_n, theta)?,
        z: boundary_trace(qs_ref, theta)?,
        tau_n: time_change(path, g_n),
        tau: time_change(path, g_ref),
    })
}

/// Coupled estimates of the p-Brownian gap between the μₙ-domain and a
/// reference domain:
///
/// * position gap: mean of |G*ₙ(e^{iθ}) − G*_ref(e^{iθ})|^p over common
///   uniform angles (exact coupling, no time discretization);
/// * time gap: mean of |τₙ − τ_ref|^{p/2} over shared disc paths.
#[allow(clippy::too_many_arguments)]
pub fn coupled_gap_estimate(
    qs_n: &QuantileStep,
    qs_ref: &QuantileStep,
    g_n: &PowerSeriesMap,
    g_ref: &PowerSeriesMap,
    p: f64,
    n_samples: usize,
    dt: f64,
    seed: u64,
) -> Result<(NamedEstimate, NamedEstimate, SimulationReport), SimError> {
    if !(p >= 1.0) {
        return Err(SimError::BadConfig(format!(
            "gap estimation requires p ≥ 1, got {p}"
        )));
    }
    for (label, qs) in [("n", qs_n), ("reference", qs_ref)] {
        if qs.mean().abs() > MEAN_TOL {
            return Err(SimError::BadConfig(format!(
                "{label} quantile must have zero mean, got {}",
                qs.mean()
            )));
        }
    }
    let start = Instant::now();
    let mut jumps = jump_angles(qs_n);
    jumps.extend(jump_angles(qs_ref));

    let mut c1_samples = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let mut rng = stream_rng(seed, STREAM_ANGLE, i as u64);
        let theta = admissible_uniform_angle(&mut rng, &jumps);
        let gap = (boundary_trace(qs_n, theta)? - boundary_trace(qs_ref, theta)?).norm();
        c1_samples.push(gap.powf(p));
    }
    let (c1, c1_se) = mean_and_se(&c1_samples);

    let mut c2_samples = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let mut rng = stream_rng(seed, STREAM_PATH, i as u64);
        let path = disc_path_with_rng(dt, &mut rng, STEP_BUDGET)?;
        let tau_n = time_change(&path, g_n);
        let tau_ref = time_change(&path, g_ref);
        c2_samples.push((tau_n - tau_ref).abs().powf(0.5 * p));
    }
    let (c2, c2_se) = mean_and_se(&c2_samples);

    let c1_est = NamedEstimate {
        name: "c1".into(),
        value: c1,
        std_error: c1_se,
    };
    let c2_est = NamedEstimate {
        name: "c2".into(),
        value: c2,
        std_error: c2_se,
    };
    let mut report = SimulationReport::new(seed, n_samples, dt);
    report.estimates.push(c1_est.clone());
    report.estimates.push(c2_est.clone());
    report.wall_clock_secs = start.elapsed().as_secs_f64();
    Ok((c1_est, c2_est, report))
}

/// Atom-aware Kolmogorov–Smirnov distance between a sample and a cdf:
/// sup over the sorted sample of max(|i/N − F(xᵢ)|, |(i−1)/N − F(xᵢ⁻)|),
/// with tied sample values treated as one empirical jump (i runs to the last
/// index of the tie for the upper term and from the first for the lower).
pub fn ks_statistic(samples: &[f64], cdf: &impl Cdf) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == x {
            j += 1;
        }
        let above = ((j + 1) as f64 / n - cdf.cdf(x)).abs();
        let below = (i as f64 / n - cdf.cdf_left(x)).abs();
        sup = sup.max(above).max(below);
        i = j + 1;
    }
    sup
}

/// Single-column sample dump, one value per line at full precision.
pub fn write_samples_csv<W: std::io::Write>(samples: &[f64], mut w: W) -> std::io::Result<()> {
    for s in samples {
        writeln!(w, "{s:.16e}")?;
    }
    Ok(())
}

/// Simple polygon built from the boundary samples in θ order, with an
/// even–odd point-location index bucketed by y-slabs. The slab filter only
/// discards edges that cannot cross the horizontal ray, so the parity test
/// is exactly the full even–odd rule.
pub struct ExitPolygon {
    pts: Vec<(f64, f64)>,
    y_lo: f64,
    inv_dy: f64,
    slabs: Vec<Vec<u32>>,
}

const SLAB_COUNT: usize = 512;

impl ExitPolygon {
    pub fn new(curve: &BoundaryCurve) -> Self {
        Self::from_points(curve.polygon())
    }

    fn from_points(pts: Vec<(f64, f64)>) -> Self {
        let y_min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let y_max = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let span = (y_max - y_min).max(f64::MIN_POSITIVE);
        let inv_dy = SLAB_COUNT as f64 / span;
        let mut slabs = vec![Vec::new(); SLAB_COUNT];
        let n = pts.len();
        for e in 0..n {
            let (y1, y2) = (pts[e].1, pts[(e + 1) % n].1);
            let lo = ((y1.min(y2) - y_min) * inv_dy).floor().max(0.0) as usize;
            let hi = (((y1.max(y2) - y_min) * inv_dy).floor() as usize).min(SLAB_COUNT - 1);
            for slab in &mut slabs[lo..=hi] {
                slab.push(e as u32);
            }
        }
        Self {
            pts,
            y_lo: y_min,
            inv_dy,
            slabs,
        }
    }

    /// Even–odd crossing test with a horizontal ray towards +∞.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let idx = (y - self.y_lo) * self.inv_dy;
        if idx < 0.0 || idx >= SLAB_COUNT as f64 {
            return false;
        }
        let n = self.pts.len();
        let mut inside = false;
        for &e in &self.slabs[idx as usize] {
            let (x1, y1) = self.pts[e as usize];
            let (x2, y2) = self.pts[(e as usize + 1) % n];
            if (y1 > y) != (y2 > y) {
                let x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1);
                if x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// First intersection of the segment s→e with the polygon, as the point
    /// closest to s.
    fn first_crossing(&self, s: (f64, f64), e: (f64, f64)) -> Option<(f64, f64)> {
        let d = (e.0 - s.0, e.1 - s.1);
        let n = self.pts.len();
        let mut best_t = f64::INFINITY;
        for i in 0..n {
            let a = self.pts[i];
            let b = self.pts[(i + 1) % n];
            let ab = (b.0 - a.0, b.1 - a.1);
            let denom = d.0 * ab.1 - d.1 * ab.0;
            if denom == 0.0 {
                continue;
            }
            let sa = (a.0 - s.0, a.1 - s.1);
            let t = (sa.0 * ab.1 - sa.1 * ab.0) / denom;
            let u = (sa.0 * d.1 - sa.1 * d.0) / denom;
            if (0.0..=1.0).contains(&t) && (-1e-12..=1.0 + 1e-12).contains(&u) && t < best_t {
                best_t = t;
            }
        }
        if best_t.is_finite() {
            Some((s.0 + best_t * d.0, s.1 + best_t * d.1))
        } else {
            None
        }
    }
}

/// Independent exit-law oracle: Euler walks from the origin inside the
/// boundary polygon, stopped by the even–odd test, with the exit point taken
/// as the crossing of the last step with the polygon. Biased at O(√dt).
pub fn euler_exit_oracle(
    curve: &BoundaryCurve,
    dt: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<Complex64>, SimError> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(SimError::BadConfig(format!(
            "euler step size must lie in (0, {MAX_DT}], got {dt}"
        )));
    }
    let poly = ExitPolygon::new(curve);
    if !poly.contains(0.0, 0.0) {
        return Err(SimError::OriginOutside);
    }
    let sigma = dt.sqrt();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = stream_rng(seed, STREAM_EULER, i as u64);
        let mut z = (0.0f64, 0.0f64);
        let mut steps: u64 = 0;
        loop {
            if steps >= STEP_BUDGET {
                return Err(SimError::Runaway {
                    budget: STEP_BUDGET,
                });
            }
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            let next = (z.0 + sigma * g1, z.1 + sigma * g2);
            steps += 1;
            if poly.contains(next.0, next.1) {
                z = next;
                continue;
            }
            let hit = poly.first_crossing(z, next).unwrap_or(next);
            out.push(Complex64::new(hit.0, hit.1));
            break;
        }
    }
    Ok(out)
}
