//! One-dimensional probability measures with bounded support.
//!
//! A [`Measure`] carries a cdf `F`, its quantile (generalized inverse) `q`,
//! and the atom list. Measures are discretized on a [`Mesh`] by assigning the
//! mass of each cell `(x_{k-1}, x_k]` to the right endpoint, which yields a
//! [`DiscreteMeasure`] and its step quantile [`QuantileStep`]. The `L^p`
//! distance between quantiles equals the p-Wasserstein distance between the
//! measures, and is computed exactly on piecewise-affine quantiles.

use crate::error::MeasureError;

/// Tolerance for mass-conservation and monotonicity checks.
pub const MASS_TOL: f64 = 1e-12;

/// Built-in distribution families plus tabulated cdfs.
///
/// All parameters are stored post-shift, so recentring rebuilds the family
/// with translated locations and keeps every closed form intact.
#[derive(Debug, Clone)]
enum Family {
    /// Uniform on (lo, hi).
    Uniform { lo: f64, hi: f64 },
    /// Uniform on (a, b) ∪ (c, d) with density 1/((b-a)+(d-c)).
    Biuniform { a: f64, b: f64, c: f64, d: f64 },
    /// Atoms at x1 (mass w1) and x2 (mass 1-w1).
    TwoPoint { x1: f64, w1: f64, x2: f64 },
    /// Exp(rate) conditioned on (lo, hi).
    TruncExp { rate: f64, lo: f64, hi: f64 },
    /// Unit mass at a single point.
    Dirac { at: f64 },
    /// Piecewise-linear cdf through (xs[i], fs[i]).
    Tabulated { xs: Vec<f64>, fs: Vec<f64> },
}

/// A probability measure on a bounded interval.
#[derive(Debug, Clone)]
pub struct Measure {
    kind: Family,
    support_lo: f64,
    support_hi: f64,
    atoms: Vec<(f64, f64)>,
}

impl Measure {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self, MeasureError> {
        check_support(lo, hi)?;
        Ok(Self {
            kind: Family::Uniform { lo, hi },
            support_lo: lo,
            support_hi: hi,
            atoms: Vec::new(),
        })
    }

    pub fn biuniform(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MeasureError> {
        check_support(a, b)?;
        check_support(c, d)?;
        if b > c {
            return Err(MeasureError::BadParameter(format!(
                "biuniform intervals must be ordered: b = {b} exceeds c = {c}"
            )));
        }
        Ok(Self {
            kind: Family::Biuniform { a, b, c, d },
            support_lo: a,
            support_hi: d,
            atoms: Vec::new(),
        })
    }

    pub fn two_point(x1: f64, w1: f64, x2: f64) -> Result<Self, MeasureError> {
        check_support(x1, x2)?;
        if !(w1 > 0.0 && w1 < 1.0) {
            return Err(MeasureError::BadParameter(format!(
                "two-point mass w1 must lie in (0, 1), got {w1}"
            )));
        }
        Ok(Self {
            kind: Family::TwoPoint { x1, w1, x2 },
            support_lo: x1,
            support_hi: x2,
            atoms: vec![(x1, w1), (x2, 1.0 - w1)],
        })
    }

    pub fn trunc_exp(rate: f64, lo: f64, hi: f64) -> Result<Self, MeasureError> {
        check_support(lo, hi)?;
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(MeasureError::BadParameter(format!(
                "truncated exponential rate must be positive, got {rate}"
            )));
        }
        Ok(Self {
            kind: Family::TruncExp { rate, lo, hi },
            support_lo: lo,
            support_hi: hi,
            atoms: Vec::new(),
        })
    }

    /// Unit mass at `at`. The support is the degenerate interval [at, at];
    /// this is the one family exempt from the `lo < hi` rule.
    pub fn dirac(at: f64) -> Self {
        Self {
            kind: Family::Dirac { at },
            support_lo: at,
            support_hi: at,
            atoms: vec![(at, 1.0)],
        }
    }

    /// Tabulated cdf from sorted `(x, F)` pairs, linearly interpolated.
    ///
    /// A positive F at the first node is an atom at that node. Monotonicity
    /// violations beyond [`MASS_TOL`] and a final F away from 1 are rejected.
    pub fn from_cdf_table(points: &[(f64, f64)]) -> Result<Self, MeasureError> {
        if points.len() < 2 {
            return Err(MeasureError::BadParameter(
                "tabulated cdf needs at least two rows".into(),
            ));
        }
        let mut xs = Vec::with_capacity(points.len());
        let mut fs = Vec::with_capacity(points.len());
        for (row, &(x, f)) in points.iter().enumerate() {
            if !x.is_finite() || !f.is_finite() {
                return Err(MeasureError::BadParameter(format!(
                    "non-finite cdf entry at row {row}"
                )));
            }
            if let Some(&xp) = xs.last() {
                if x <= xp {
                    return Err(MeasureError::BadParameter(format!(
                        "tabulated x values must be strictly increasing (row {row})"
                    )));
                }
            }
            if let Some(&fp) = fs.last() {
                if f < fp - MASS_TOL {
                    return Err(MeasureError::NonMonotoneCdf {
                        row,
                        delta: f - fp,
                    });
                }
            }
            xs.push(x);
            fs.push(f.clamp(0.0, 1.0));
        }
        // Flatten sub-tolerance decreases left by the clamp above.
        for i in 1..fs.len() {
            if fs[i] < fs[i - 1] {
                fs[i] = fs[i - 1];
            }
        }
        let last = *fs.last().unwrap();
        if (last - 1.0).abs() > MASS_TOL {
            return Err(MeasureError::CdfEndpoint { last });
        }
        *fs.last_mut().unwrap() = 1.0;
        let atoms = if fs[0] > MASS_TOL {
            vec![(xs[0], fs[0])]
        } else {
            Vec::new()
        };
        let (support_lo, support_hi) = (xs[0], *xs.last().unwrap());
        Ok(Self {
            kind: Family::Tabulated { xs, fs },
            support_lo,
            support_hi,
            atoms,
        })
    }

    /// Parse the tabulated-cdf text format: one "x F" pair per line,
    /// whitespace separated; blank lines and `#` comments are skipped.
    pub fn from_cdf_text(text: &str) -> Result<Self, MeasureError> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64, MeasureError> {
                tok.and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| MeasureError::BadParameter(format!(
                        "cdf file line {}: expected two numeric columns",
                        lineno + 1
                    )))
            };
            let x = parse(cols.next())?;
            let f = parse(cols.next())?;
            points.push((x, f));
        }
        Self::from_cdf_table(&points)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.support_lo, self.support_hi)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// F(x) = μ((−∞, x]), right-continuous, 0 left of the support and 1 to
    /// the right of it.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.kind {
            Family::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Family::Biuniform { a, b, c, d } => {
                let len = (b - a) + (d - c);
                if x < *a {
                    0.0
                } else if x < *b {
                    (x - a) / len
                } else if x < *c {
                    (b - a) / len
                } else if x < *d {
                    ((b - a) + (x - c)) / len
                } else {
                    1.0
                }
            }
            Family::TwoPoint { x1, w1, x2 } => {
                if x < *x1 {
                    0.0
                } else if x < *x2 {
                    *w1
                } else {
                    1.0
                }
            }
            Family::TruncExp { rate, lo, hi } => {
                if x <= *lo {
                    0.0
                } else if x >= *hi {
                    1.0
                } else {
                    let span = hi - lo;
                    (-f64::exp_m1(-rate * (x - lo))) / (-f64::exp_m1(-rate * span))
                }
            }
            Family::Dirac { at } => {
                if x < *at {
                    0.0
                } else {
                    1.0
                }
            }
            Family::Tabulated { xs, fs } => {
                if x < xs[0] {
                    0.0
                } else if x >= *xs.last().unwrap() {
                    1.0
                } else {
                    let i = partition_point(xs, |v| v <= x);
                    // xs[i-1] <= x < xs[i]
                    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                    fs[i - 1] + t * (fs[i] - fs[i - 1])
                }
            }
        }
    }

    /// Left limit F(x⁻); differs from `cdf` exactly at atoms.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let mass = self
            .atoms
            .iter()
            .find(|&&(loc, _)| loc == x)
            .map_or(0.0, |&(_, w)| w);
        self.cdf(x) - mass
    }

    /// q(u) = inf{x : F(x) ≥ u} for u ∈ (0, 1].
    pub fn quantile(&self, u: f64) -> Result<f64, MeasureError> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(MeasureError::QuantileDomain { u });
        }
        Ok(match &self.kind {
            Family::Uniform { lo, hi } => lo + (hi - lo) * u,
            Family::Biuniform { a, b, c, d } => {
                let len = (b - a) + (d - c);
                let w1 = (b - a) / len;
                if u <= w1 {
                    a + len * u
                } else {
                    c + len * (u - w1)
                }
            }
            Family::TwoPoint { x1, w1, x2 } => {
                if u <= *w1 {
                    *x1
                } else {
                    *x2
                }
            }
            Family::TruncExp { rate, lo, hi } => {
                let span = hi - lo;
                // 1 - u (1 - e^{-rate·span}), evaluated without cancellation.
                lo - f64::ln_1p(u * f64::exp_m1(-rate * span)) / rate
            }
            Family::Dirac { at } => *at,
            Family::Tabulated { xs, fs } => {
                let i = partition_point(fs, |f| f < u);
                // first index with fs[i] >= u; i >= 1 unless u <= fs[0]
                if i == 0 {
                    xs[0]
                } else if fs[i] == fs[i - 1] {
                    xs[i]
                } else {
                    let t = (u - fs[i - 1]) / (fs[i] - fs[i - 1]);
                    xs[i - 1] + t * (xs[i] - xs[i - 1])
                }
            }
        })
    }

    /// Exact mean from the family's closed form.
    pub fn mean(&self) -> f64 {
        match &self.kind {
            Family::Uniform { lo, hi } => 0.5 * (lo + hi),
            Family::Biuniform { a, b, c, d } => {
                let len = (b - a) + (d - c);
                ((b - a) * 0.5 * (a + b) + (d - c) * 0.5 * (c + d)) / len
            }
            Family::TwoPoint { x1, w1, x2 } => w1 * x1 + (1.0 - w1) * x2,
            Family::TruncExp { rate, lo, hi } => {
                let span = hi - lo;
                let em = -f64::exp_m1(-rate * span); // 1 - e^{-rate·span}
                lo + 1.0 / rate - span * (1.0 - em) / em
            }
            Family::Dirac { at } => *at,
            Family::Tabulated { xs, fs } => {
                // atom at xs[0] plus the linear pieces: ∫ x dF.
                let mut m = fs[0] * xs[0];
                for i in 1..xs.len() {
                    m += (fs[i] - fs[i - 1]) * 0.5 * (xs[i] + xs[i - 1]);
                }
                m
            }
        }
    }

    /// Translate so the mean becomes 0; returns the shifted measure and the
    /// applied shift (new support = old support − shift).
    pub fn recentered(&self) -> (Measure, f64) {
        let shift = self.mean();
        (self.translated(-shift), shift)
    }

    /// The measure of x + offset under self's law of x.
    pub fn translated(&self, offset: f64) -> Measure {
        let kind = match &self.kind {
            Family::Uniform { lo, hi } => Family::Uniform {
                lo: lo + offset,
                hi: hi + offset,
            },
            Family::Biuniform { a, b, c, d } => Family::Biuniform {
                a: a + offset,
                b: b + offset,
                c: c + offset,
                d: d + offset,
            },
            Family::TwoPoint { x1, w1, x2 } => Family::TwoPoint {
                x1: x1 + offset,
                w1: *w1,
                x2: x2 + offset,
            },
            Family::TruncExp { rate, lo, hi } => Family::TruncExp {
                rate: *rate,
                lo: lo + offset,
                hi: hi + offset,
            },
            Family::Dirac { at } => Family::Dirac { at: at + offset },
            Family::Tabulated { xs, fs } => Family::Tabulated {
                xs: xs.iter().map(|x| x + offset).collect(),
                fs: fs.clone(),
            },
        };
        Measure {
            kind,
            support_lo: self.support_lo + offset,
            support_hi: self.support_hi + offset,
            atoms: self
                .atoms
                .iter()
                .map(|&(x, w)| (x + offset, w))
                .collect(),
        }
    }

    /// The law of c·X for c > 0: a normalization device for targets whose
    /// support is too large for a useful mesh size. The whole construction
    /// commutes with dilation (quantile, boundary and series map all scale
    /// by c), so results transfer back by the same factor.
    pub fn scaled(&self, c: f64) -> Result<Measure, MeasureError> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(MeasureError::BadParameter(format!(
                "scale factor must be positive and finite, got {c}"
            )));
        }
        let kind = match &self.kind {
            Family::Uniform { lo, hi } => Family::Uniform {
                lo: c * lo,
                hi: c * hi,
            },
            Family::Biuniform { a, b, c: cc, d } => Family::Biuniform {
                a: c * a,
                b: c * b,
                c: c * cc,
                d: c * d,
            },
            Family::TwoPoint { x1, w1, x2 } => Family::TwoPoint {
                x1: c * x1,
                w1: *w1,
                x2: c * x2,
            },
            Family::TruncExp { rate, lo, hi } => Family::TruncExp {
                rate: rate / c,
                lo: c * lo,
                hi: c * hi,
            },
            Family::Dirac { at } => Family::Dirac { at: c * at },
            Family::Tabulated { xs, fs } => Family::Tabulated {
                xs: xs.iter().map(|x| c * x).collect(),
                fs: fs.clone(),
            },
        };
        Ok(Measure {
            kind,
            support_lo: c * self.support_lo,
            support_hi: c * self.support_hi,
            atoms: self.atoms.iter().map(|&(x, w)| (c * x, w)).collect(),
        })
    }

    /// Maximal open intervals inside the support on which the cdf is flat
    /// (null sets of the measure). Their endpoints are inserted into
    /// adapted meshes so that no cell mass snaps into a null interval.
    pub fn null_intervals(&self) -> Vec<(f64, f64)> {
        match &self.kind {
            Family::Uniform { .. } | Family::TruncExp { .. } | Family::Dirac { .. } => Vec::new(),
            Family::Biuniform { b, c, .. } => {
                if b < c {
                    vec![(*b, *c)]
                } else {
                    Vec::new()
                }
            }
            Family::TwoPoint { x1, x2, .. } => vec![(*x1, *x2)],
            Family::Tabulated { xs, fs } => {
                let mut out: Vec<(f64, f64)> = Vec::new();
                let mut i = 1;
                while i < fs.len() {
                    if fs[i] - fs[i - 1] <= MASS_TOL {
                        let start = xs[i - 1];
                        let mut end = xs[i];
                        while i + 1 < fs.len() && fs[i + 1] - fs[i] <= MASS_TOL {
                            i += 1;
                            end = xs[i];
                        }
                        out.push((start, end));
                    }
                    i += 1;
                }
                out
            }
        }
    }
}

fn check_support(lo: f64, hi: f64) -> Result<(), MeasureError> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(MeasureError::InvalidSupport { lo, hi });
    }
    Ok(())
}

/// First index where `pred` fails, on a sorted slice.
fn partition_point(xs: &[f64], pred: impl Fn(f64) -> bool) -> usize {
    let mut lo = 0usize;
    let mut hi = xs.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(xs[mid]) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// An ordered family of points a = x₀ < … < xₙ = b.
#[derive(Debug, Clone)]
pub struct Mesh {
    points: Vec<f64>,
}

impl Mesh {
    pub fn new(points: Vec<f64>) -> Result<Self, MeasureError> {
        if points.len() < 2 {
            return Err(MeasureError::EmptyMesh);
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(MeasureError::UnorderedMesh);
        }
        Ok(Self { points })
    }

    /// n+1 equispaced points on [a, b].
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self, MeasureError> {
        if n < 1 {
            return Err(MeasureError::EmptyMesh);
        }
        check_support(a, b)?;
        let mut points = Vec::with_capacity(n + 1);
        for k in 0..=n {
            points.push(a + (b - a) * k as f64 / n as f64);
        }
        // guard against rounding on the right endpoint
        *points.last_mut().unwrap() = b;
        Self::new(points)
    }

    /// Uniform mesh refined with the endpoints of the measure's flat-cdf
    /// intervals, so that cell mass never snaps strictly inside a null set.
    pub fn adapted(m: &Measure, n: usize) -> Result<Self, MeasureError> {
        let (a, b) = m.support();
        let base = Self::uniform(a, b, n)?;
        let mut extra = Vec::new();
        for (lo, hi) in m.null_intervals() {
            for v in [lo, hi] {
                if v > a && v < b {
                    extra.push(v);
                }
            }
        }
        Ok(base.refined(&extra))
    }

    /// Insert extra points (ignoring duplicates and out-of-range values).
    pub fn refined(&self, extra: &[f64]) -> Mesh {
        let (a, b) = (self.points[0], *self.points.last().unwrap());
        let mut points = self.points.clone();
        for &v in extra {
            if v > a && v < b && !points.contains(&v) {
                points.push(v);
            }
        }
        points.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Mesh { points }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of cells.
    pub fn cells(&self) -> usize {
        self.points.len() - 1
    }

    pub fn max_cell(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

/// A purely atomic measure with strictly increasing supports and positive
/// weights summing to 1.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    supports: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(supports: Vec<f64>, weights: Vec<f64>) -> Result<Self, MeasureError> {
        if supports.is_empty() || supports.len() != weights.len() {
            return Err(MeasureError::BadParameter(
                "discrete measure needs matching nonempty supports and weights".into(),
            ));
        }
        if supports.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(MeasureError::UnorderedSupports);
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(MeasureError::BadWeights {
                sum: weights.iter().sum(),
            });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(MeasureError::BadWeights { sum });
        }
        Ok(Self { supports, weights })
    }

    pub fn dirac(at: f64) -> Self {
        Self {
            supports: vec![at],
            weights: vec![1.0],
        }
    }

    pub fn supports(&self) -> &[f64] {
        &self.supports
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self) -> f64 {
        self.supports
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x * w)
            .sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (s, w) in self.supports.iter().zip(&self.weights) {
            if *s <= x {
                acc += w;
            } else {
                break;
            }
        }
        acc.min(1.0)
    }

    pub fn cdf_left(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (s, w) in self.supports.iter().zip(&self.weights) {
            if *s < x {
                acc += w;
            } else {
                break;
            }
        }
        acc.min(1.0)
    }

    /// Step quantile with cut levels at the cumulative weights; the final
    /// level is snapped to exactly 1.
    pub fn quantile_step(&self) -> QuantileStep {
        let mut cuts = Vec::with_capacity(self.weights.len());
        let mut acc = 0.0;
        for w in &self.weights {
            acc += w;
            cuts.push(acc);
        }
        *cuts.last_mut().unwrap() = 1.0;
        QuantileStep {
            cuts,
            values: self.supports.clone(),
        }
    }
}

/// μₙ = F(a)δ_a + Σ (F(x_k) − F(x_{k−1})) δ_{x_k}; zero-mass points dropped.
pub fn discretize(m: &Measure, mesh: &Mesh) -> Result<DiscreteMeasure, MeasureError> {
    let (a, b) = m.support();
    let pts = mesh.points();
    let (m_lo, m_hi) = (pts[0], *pts.last().unwrap());
    let scale = (b - a).abs().max(1.0);
    if (m_lo - a).abs() > 1e-9 * scale || (m_hi - b).abs() > 1e-9 * scale {
        return Err(MeasureError::MeshMismatch {
            mesh_lo: m_lo,
            mesh_hi: m_hi,
            lo: a,
            hi: b,
        });
    }
    let mut supports = Vec::new();
    let mut weights = Vec::new();
    let w0 = m.cdf(pts[0]);
    if w0 > 0.0 {
        supports.push(pts[0]);
        weights.push(w0);
    }
    let mut prev = w0;
    for &x in &pts[1..] {
        let f = m.cdf(x);
        let w = f - prev;
        prev = f;
        if w > 0.0 {
            supports.push(x);
            weights.push(w);
        }
    }
    DiscreteMeasure::new(supports, weights)
}

/// Right-continuous step quantile: qₙ(u) = `values[k]` for u ∈ `(cuts[k−1], cuts[k]]`.
#[derive(Debug, Clone)]
pub struct QuantileStep {
    cuts: Vec<f64>,
    values: Vec<f64>,
}

impl QuantileStep {
    /// Build directly from step data; `cuts` are the cumulative levels
    /// ending at 1, `values` must be nondecreasing.
    pub fn from_parts(values: Vec<f64>, cuts: Vec<f64>) -> Result<Self, MeasureError> {
        if values.is_empty() || values.len() != cuts.len() {
            return Err(MeasureError::BadParameter(
                "step quantile needs matching nonempty values and cut levels".into(),
            ));
        }
        if cuts.windows(2).any(|w| !(w[0] < w[1])) || !(cuts[0] > 0.0) {
            return Err(MeasureError::BadParameter(
                "cut levels must be strictly increasing in (0, 1]".into(),
            ));
        }
        if (cuts.last().unwrap() - 1.0).abs() > MASS_TOL {
            return Err(MeasureError::BadParameter(
                "final cut level must equal 1".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(MeasureError::BadParameter(
                "step quantile values must be nondecreasing".into(),
            ));
        }
        let mut cuts = cuts;
        *cuts.last_mut().unwrap() = 1.0;
        Ok(Self { cuts, values })
    }

    /// Evaluate at u ∈ [0, 1]; u ≤ first cut maps to the first value.
    pub fn eval(&self, u: f64) -> f64 {
        let k = partition_point(&self.cuts, |c| c < u);
        self.values[k.min(self.values.len() - 1)]
    }

    /// Cut levels u_k (cumulative weights), ending at exactly 1.
    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn steps(&self) -> usize {
        self.values.len()
    }

    /// Interior cut levels, i.e. the u-locations of the quantile jumps.
    pub fn jump_levels(&self) -> &[f64] {
        &self.cuts[..self.cuts.len() - 1]
    }

    /// Σ w_k x_k with w_k the cell widths.
    pub fn mean(&self) -> f64 {
        let mut prev = 0.0;
        let mut acc = 0.0;
        for (c, v) in self.cuts.iter().zip(&self.values) {
            acc += (c - prev) * v;
            prev = *c;
        }
        acc
    }

    /// Pointwise map of the values (for scalings/shifts in tests).
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self, MeasureError> {
        Self::from_parts(self.values.iter().map(|&v| f(v)).collect(), self.cuts.clone())
    }

    /// Zero-mean copy and the removed mean. The right-endpoint
    /// discretization shifts the mean by O(1/n), which must be removed
    /// before the series construction (the series has no constant term).
    pub fn recentered(&self) -> (Self, f64) {
        let mean = self.mean();
        let shifted = self
            .map_values(|v| v - mean)
            .expect("shift preserves monotonicity");
        (shifted, mean)
    }
}

/// Monotone cdf evaluators with left limits, as consumed by the atom-aware
/// Kolmogorov–Smirnov statistic.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;
    /// F(x⁻); defaults to F(x) for continuous evaluators.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

impl Cdf for Measure {
    fn cdf(&self, x: f64) -> f64 {
        Measure::cdf(self, x)
    }
    fn cdf_left(&self, x: f64) -> f64 {
        Measure::cdf_left(self, x)
    }
}

impl Cdf for DiscreteMeasure {
    fn cdf(&self, x: f64) -> f64 {
        DiscreteMeasure::cdf(self, x)
    }
    fn cdf_left(&self, x: f64) -> f64 {
        DiscreteMeasure::cdf_left(self, x)
    }
}

/// Wrap a plain function as a continuous [`Cdf`].
pub struct FnCdf<F: Fn(f64) -> f64>(pub F);

impl<F: Fn(f64) -> f64> Cdf for FnCdf<F> {
    fn cdf(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// Quantile functions that expose their piecewise structure, so that `L^p`
/// distances can be integrated exactly on affine pieces.
pub trait Quantile {
    fn quantile(&self, u: f64) -> f64;

    /// Interior breakpoints of the piecewise structure, strictly inside (0, 1).
    fn breakpoints(&self) -> Vec<f64>;

    /// `(slope, intercept)` of the piece containing `u`, if that piece is
    /// affine. Only valid when `u` is not a breakpoint.
    fn affine_piece(&self, u: f64) -> Option<(f64, f64)>;
}

impl Quantile for QuantileStep {
    fn quantile(&self, u: f64) -> f64 {
        self.eval(u)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.jump_levels().to_vec()
    }

    fn affine_piece(&self, u: f64) -> Option<(f64, f64)> {
        Some((0.0, self.eval(u)))
    }
}

impl Quantile for Measure {
    fn quantile(&self, u: f64) -> f64 {
        Measure::quantile(self, u.clamp(f64::MIN_POSITIVE, 1.0)).expect("u in (0,1]")
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            Family::Uniform { .. } | Family::TruncExp { .. } | Family::Dirac { .. } => Vec::new(),
            Family::Biuniform { a, b, c, d } => {
                vec![(b - a) / ((b - a) + (d - c))]
            }
            Family::TwoPoint { w1, .. } => vec![*w1],
            Family::Tabulated { fs, .. } => {
                let mut out: Vec<f64> = fs
                    .iter()
                    .copied()
                    .filter(|&f| f > 0.0 && f < 1.0)
                    .collect();
                out.dedup();
                out
            }
        }
    }

    fn affine_piece(&self, u: f64) -> Option<(f64, f64)> {
        match &self.kind {
            Family::Uniform { lo, hi } => Some((hi - lo, *lo)),
            Family::Biuniform { a, b, c, d } => {
                let len = (b - a) + (d - c);
                let w1 = (b - a) / len;
                if u <= w1 {
                    Some((len, *a))
                } else {
                    Some((len, c - len * w1))
                }
            }
            Family::TwoPoint { x1, w1, x2 } => {
                Some((0.0, if u <= *w1 { *x1 } else { *x2 }))
            }
            Family::TruncExp { .. } => None,
            Family::Dirac { at } => Some((0.0, *at)),
            Family::Tabulated { xs, fs } => {
                let i = partition_point(fs, |f| f < u);
                if i == 0 {
                    return Some((0.0, xs[0]));
                }
                if fs[i] == fs[i - 1] {
                    return Some((0.0, xs[i]));
                }
                let slope = (xs[i] - xs[i - 1]) / (fs[i] - fs[i - 1]);
                Some((slope, xs[i - 1] - slope * fs[i - 1]))
            }
        }
    }
}

/// Quadrature settings for the non-closed-form cells of
/// [`lp_quantile_distance`].
#[derive(Debug, Clone)]
pub struct QuadConfig {
    /// Gauss–Legendre nodes per integration cell.
    pub nodes: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { nodes: 64 }
    }
}

/// ‖q1 − q2‖_{L^p(0,1)}. Exact on cells where both quantiles are affine
/// (in particular on any pair of step quantiles); Gauss–Legendre otherwise.
pub fn lp_quantile_distance(
    q1: &dyn Quantile,
    q2: &dyn Quantile,
    p: f64,
    quad: &QuadConfig,
) -> Result<f64, MeasureError> {
    if !(p >= 1.0) {
        return Err(MeasureError::OrderBelowOne { p });
    }
    let mut cuts = q1.breakpoints();
    cuts.extend(q2.breakpoints());
    cuts.retain(|&u| u > 0.0 && u < 1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    cuts.push(1.0);

    let gl = gauss_legendre(quad.nodes.max(2));
    let mut total = 0.0;
    let mut lo = 0.0;
    for &hi in &cuts {
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        total += match (q1.affine_piece(mid), q2.affine_piece(mid)) {
            (Some((m1, c1)), Some((m2, c2))) => {
                lp_affine_integral(m1 - m2, c1 - c2, lo, hi, p)
            }
            _ => {
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                gl.iter()
                    .map(|&(x, w)| {
                        let u = mid + half * x;
                        w * half * (q1.quantile(u) - q2.quantile(u)).abs().powf(p)
                    })
                    .sum()
            }
        };
        lo = hi;
    }
    Ok(total.powf(1.0 / p))
}

/// ∫_lo^hi |m·u + c|^p du via the antiderivative |l|^{p+1} sign(l) / (m(p+1)),
/// which is valid across a sign change of the affine form.
fn lp_affine_integral(m: f64, c: f64, lo: f64, hi: f64, p: f64) -> f64 {
    let width = hi - lo;
    if m.abs() * width.max(1.0) <= 1e-300 {
        return c.abs().powf(p) * width;
    }
    let anti = |u: f64| {
        let l = m * u + c;
        l.abs().powf(p + 1.0) * l.signum() / (m * (p + 1.0))
    };
    anti(hi) - anti(lo)
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        // Chebyshev-style initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (pn, dpn) = legendre(n, x);
            let dx = pn / dpn;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dpn) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dpn * dpn);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Random nondecreasing step quantile for cross-module test oracles.
#[cfg(test)]
pub(crate) fn random_step(rng: &mut rand_chacha::ChaCha8Rng, max_steps: usize) -> QuantileStep {
    use rand::Rng;
    let k = rng.gen_range(1..=max_steps);
    let mut cuts: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(0.01..0.99)).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    cuts.push(1.0);
    let mut values: Vec<f64> = (0..cuts.len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    QuantileStep::from_parts(values, cuts).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unif01() -> Measure {
        Measure::uniform(0.0, 1.0).unwrap()
    }

    #[test]
    fn cdf_basic_values() {
        assert_eq!(unif01().cdf(0.3), 0.3);
        let te = Measure::trunc_exp(1.0, 0.0, 3.0).unwrap();
        assert_eq!(te.cdf(3.0), 1.0);
        let tp = Measure::two_point(-1.0, 0.5, 1.0).unwrap();
        assert_eq!(tp.cdf(0.0), 0.5);
        assert_eq!(tp.cdf(-2.0), 0.0);
        assert_eq!(tp.cdf(1.0), 1.0);
        assert_eq!(tp.cdf_left(1.0), 0.5);
    }

    #[test]
    fn quantile_uniform_is_identity() {
        assert!((unif01().quantile(0.7).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn quantile_atom_plus_uniform() {
        // F(x) = 0.5 + 0.5x on [0, 1]: atom of mass 1/2 at 0.
        let m = Measure::from_cdf_table(&[(0.0, 0.5), (1.0, 1.0)]).unwrap();
        // bisection oracle on the cdf
        let oracle = |u: f64| -> f64 {
            let (mut lo, mut hi) = (-1.0, 2.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if m.cdf(mid) >= u {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };
        for (u, want) in [(0.25, 0.0), (0.75, 0.5)] {
            assert!((m.quantile(u).unwrap() - want).abs() < 1e-12);
            assert!((oracle(u) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn quantile_two_point_inf_definition() {
        let tp = Measure::two_point(-1.0, 0.5, 1.0).unwrap();
        assert_eq!(tp.quantile(0.5).unwrap(), -1.0);
        assert_eq!(tp.quantile(0.5 + 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn quantile_domain_errors() {
        assert!(unif01().quantile(0.0).is_err());
        assert!(unif01().quantile(1.0 + 1e-12).is_err());
        assert!(unif01().quantile(1.0).is_ok());
    }

    #[test]
    fn quantile_monotone_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let measures = vec![
            unif01(),
            Measure::biuniform(-2.0, -1.0, 1.0, 2.0).unwrap(),
            Measure::two_point(-1.0, 0.5, 1.0).unwrap(),
            Measure::trunc_exp(1.0, 0.0, 3.0).unwrap(),
        ];
        for m in &measures {
            for _ in 0..500 {
                let mut u: f64 = rng.gen_range(1e-9..1.0);
                let mut v: f64 = rng.gen_range(1e-9..1.0);
                if u > v {
                    std::mem::swap(&mut u, &mut v);
                }
                assert!(m.quantile(u).unwrap() <= m.quantile(v).unwrap());
            }
        }
    }

    #[test]
    fn discretize_uniform_halves() {
        let mesh = Mesh::uniform(0.0, 1.0, 2).unwrap();
        let d = discretize(&unif01(), &mesh).unwrap();
        assert_eq!(d.supports(), &[0.5, 1.0]);
        assert!((d.weights()[0] - 0.5).abs() < 1e-15);
        assert!((d.weights()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn discretize_left_atom_mass() {
        // cdf with F(a) = 0.2: atom at the left endpoint.
        let m = Measure::from_cdf_table(&[(0.0, 0.2), (1.0, 1.0)]).unwrap();
        for n in [1, 3, 7] {
            let d = discretize(&m, &Mesh::uniform(0.0, 1.0, n).unwrap()).unwrap();
            assert_eq!(d.supports()[0], 0.0);
            assert!((d.weights()[0] - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn discretize_single_cell_total_mass() {
        let d = discretize(&unif01(), &Mesh::uniform(0.0, 1.0, 1).unwrap()).unwrap();
        assert_eq!(d.supports(), &[1.0]);
        assert_eq!(d.weights(), &[1.0]);
    }

    #[test]
    fn discretize_mesh_mismatch_rejected() {
        let mesh = Mesh::uniform(0.0, 2.0, 4).unwrap();
        assert!(discretize(&unif01(), &mesh).is_err());
    }

    #[test]
    fn quantile_step_shapes() {
        let d = DiscreteMeasure::new(vec![0.5, 1.0], vec![0.5, 0.5]).unwrap();
        let qs = d.quantile_step();
        assert_eq!(qs.eval(0.3), 0.5);
        assert_eq!(qs.eval(0.5), 0.5);
        assert_eq!(qs.eval(0.500001), 1.0);
        assert_eq!(qs.eval(1.0), 1.0);

        let c = DiscreteMeasure::dirac(2.5).quantile_step();
        assert_eq!(c.eval(0.1), 2.5);
        assert_eq!(c.eval(1.0), 2.5);

        let tp = DiscreteMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5])
            .unwrap()
            .quantile_step();
        assert_eq!(tp.eval(0.5), -1.0);
        assert_eq!(tp.eval(0.51), 1.0);
    }

    #[test]
    fn quantile_step_round_trip_on_midpoints() {
        // qₙ at cell midpoints recovers the owning discrete measure.
        let m = Measure::trunc_exp(1.0, 0.0, 3.0).unwrap();
        let d = discretize(&m, &Mesh::uniform(0.0, 3.0, 37).unwrap()).unwrap();
        let qs = d.quantile_step();
        let mut prev = 0.0;
        for (k, &c) in qs.cuts().iter().enumerate() {
            let mid = 0.5 * (prev + c);
            assert_eq!(qs.eval(mid), d.supports()[k]);
            prev = c;
        }
    }

    #[test]
    fn lp_distance_identity_and_shift() {
        let d = discretize(&unif01(), &Mesh::uniform(0.0, 1.0, 10).unwrap()).unwrap();
        let qs = d.quantile_step();
        let quad = QuadConfig::default();
        assert_eq!(lp_quantile_distance(&qs, &qs, 2.0, &quad).unwrap(), 0.0);

        let shifted = qs.map_values(|v| v + 0.25).unwrap();
        for p in [1.0, 2.0, 4.0] {
            let dist = lp_quantile_distance(&qs, &shifted, p, &quad).unwrap();
            assert!((dist - 0.25).abs() < 1e-12, "p={p} dist={dist}");
        }
    }

    #[test]
    fn lp_distance_sharpness_uniform() {
        // right-endpoint steps on the uniform mesh hit 1/((1+p)^{1/p} n)
        let quad = QuadConfig::default();
        for n in [10usize, 100] {
            let d = discretize(&unif01(), &Mesh::uniform(0.0, 1.0, n).unwrap()).unwrap();
            let qs = d.quantile_step();
            for p in [1.0, 2.0, 4.0] {
                let got = lp_quantile_distance(&unif01(), &qs, p, &quad).unwrap();
                let want = 1.0 / ((1.0 + p).powf(1.0 / p) * n as f64);
                assert!(
                    (got - want).abs() < 1e-12,
                    "n={n} p={p} got={got} want={want}"
                );
            }
        }
    }

    #[test]
    fn lp_distance_rate_bound() {
        let quad = QuadConfig::default();
        let measures = vec![
            unif01(),
            Measure::biuniform(-2.0, -1.0, 1.0, 2.0).unwrap(),
            Measure::two_point(-1.0, 0.5, 1.0).unwrap(),
            Measure::trunc_exp(1.0, 0.0, 3.0).unwrap(),
        ];
        for m in &measures {
            let (a, b) = m.support();
            for n in [3usize, 17, 64] {
                let mesh = Mesh::adapted(m, n).unwrap();
                let qs = discretize(m, &mesh).unwrap().quantile_step();
                for p in [1.0, 2.0, 4.0] {
                    let dist = lp_quantile_distance(m, &qs, p, &quad).unwrap();
                    assert!(
                        dist <= mesh.max_cell() + 1e-12,
                        "dist {dist} exceeds mesh bound {} (support [{a},{b}], n={n}, p={p})",
                        mesh.max_cell()
                    );
                }
            }
        }
    }

    /// Riemann-sum oracle over 10⁶ points, stratified on the merged cut
    /// partition so that the oracle itself carries no jump error (the
    /// integrand is constant between cuts).
    fn riemann_oracle(qs1: &QuantileStep, qs2: &QuantileStep, p: f64) -> f64 {
        let mut cuts: Vec<f64> = qs1.cuts().iter().chain(qs2.cuts()).copied().collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let total = 1_000_000f64;
        let mut acc = 0.0;
        let mut lo = 0.0;
        for &hi in &cuts {
            let width = hi - lo;
            let m = ((total * width).round() as usize).max(1);
            for j in 0..m {
                let u = lo + (j as f64 + 0.5) * width / m as f64;
                acc += (qs1.eval(u) - qs2.eval(u)).abs().powf(p) * width / m as f64;
            }
            lo = hi;
        }
        acc.powf(1.0 / p)
    }

    #[test]
    fn lp_distance_step_step_matches_riemann() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let qs1 = random_step(&mut rng, 9);
            let qs2 = random_step(&mut rng, 6);
            let exact = lp_quantile_distance(&qs1, &qs2, 2.0, &QuadConfig::default()).unwrap();
            let brute = riemann_oracle(&qs1, &qs2, 2.0);
            assert!((exact - brute).abs() < 1e-6, "exact={exact} brute={brute}");
        }
    }

    #[test]
    fn sampling_identity_ks_band() {
        let m = Measure::trunc_exp(1.0, 0.0, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000usize;
        let mut xs: Vec<f64> = (0..n)
            .map(|_| m.quantile(rng.gen_range(f64::MIN_POSITIVE..=1.0)).unwrap())
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let nf = n as f64;
        let mut ks: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let hi = ((i + 1) as f64 / nf - m.cdf(x)).abs();
            let lo = (i as f64 / nf - m.cdf_left(x)).abs();
            ks = ks.max(hi).max(lo);
        }
        assert!(ks < 1.63 * 1.5 / nf.sqrt(), "ks={ks}");
    }

    #[test]
    fn weak_convergence_along_uniform_meshes() {
        let m = Measure::trunc_exp(1.0, 0.0, 3.0).unwrap();
        let x = 1.234; // continuity point of F
        let mut prev = f64::INFINITY;
        for n in [10usize, 100, 1000] {
            let d = discretize(&m, &Mesh::uniform(0.0, 3.0, n).unwrap()).unwrap();
            let err = (d.cdf(x) - m.cdf(x)).abs();
            assert!(err <= prev + 1e-12, "n={n} err={err} prev={prev}");
            prev = err;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn recenter_families() {
        let (m, shift) = Measure::uniform(-1.0, 1.0).unwrap().recentered();
        assert_eq!(shift, 0.0);
        assert_eq!(m.support(), (-1.0, 1.0));

        let (m, shift) = Measure::trunc_exp(1.0, 0.0, 3.0).unwrap().recentered();
        assert!(shift > 0.0 && shift < 1.5);
        assert!(m.mean().abs() < 1e-10);
        // quadrature oracle for the mean of the recentred measure
        let gl = gauss_legendre(200);
        let mean_quad: f64 = gl
            .iter()
            .map(|&(x, w)| 0.5 * w * m.quantile(0.5 + 0.5 * x).unwrap())
            .sum();
        assert!(mean_quad.abs() < 1e-10, "mean_quad={mean_quad}");

        let (m, shift) = Measure::dirac(2.0).recentered();
        assert_eq!(shift, 2.0);
        assert_eq!(m.support(), (0.0, 0.0));
    }

    #[test]
    fn scaling_commutes_with_quantiles() {
        let m = Measure::trunc_exp(1.0, 0.0, 3.0).unwrap();
        let s = m.scaled(2.5).unwrap();
        assert_eq!(s.support(), (0.0, 7.5));
        for u in [0.1, 0.5, 0.93, 1.0] {
            let a = 2.5 * m.quantile(u).unwrap();
            let b = s.quantile(u).unwrap();
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "u={u}: {a} vs {b}");
        }
        assert!((s.mean() - 2.5 * m.mean()).abs() < 1e-12);
        assert!(m.scaled(-1.0).is_err());
    }

    #[test]
    fn uniform_mesh_examples() {
        assert_eq!(Mesh::uniform(0.0, 1.0, 2).unwrap().points(), &[0.0, 0.5, 1.0]);
        assert_eq!(
            Mesh::uniform(-2.0, 2.0, 4).unwrap().points(),
            &[-2.0, -1.0, 0.0, 1.0, 2.0]
        );
        assert_eq!(Mesh::uniform(0.0, 3.0, 1).unwrap().points(), &[0.0, 3.0]);
    }

    #[test]
    fn adapted_mesh_keeps_mass_out_of_null_intervals() {
        let m = Measure::biuniform(-2.0, -1.0, 1.0, 2.0).unwrap();
        for n in [5usize, 20, 100, 200] {
            let mesh = Mesh::adapted(&m, n).unwrap();
            let d = discretize(&m, &mesh).unwrap();
            for &s in d.supports() {
                assert!(
                    s.abs() >= 1.0 - 1e-12,
                    "support point {s} inside the null interval (n={n})"
                );
            }
        }
    }

    #[test]
    fn tabulated_cdf_rejects_non_monotone() {
        let r = Measure::from_cdf_table(&[(0.0, 0.0), (0.5, 0.6), (1.0, 0.5)]);
        assert!(r.is_err());
        let r = Measure::from_cdf_text("0 0\n0.5 0.2\n1 1\n");
        assert!(r.is_ok());
    }

    use super::random_step;

    #[test]
    fn lp_distance_step_step_matches_riemann_more() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let qs1 = random_step(&mut rng, 20);
        let qs2 = random_step(&mut rng, 20);
        for p in [1.0, 3.0] {
            let exact = lp_quantile_distance(&qs1, &qs2, p, &QuadConfig::default()).unwrap();
            let brute = riemann_oracle(&qs1, &qs2, p);
            assert!((exact - brute).abs() < 1e-6, "p={p} exact={exact} brute={brute}");
        }
    }
}
