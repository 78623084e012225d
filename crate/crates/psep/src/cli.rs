//! Command-line front end: `boundary`, `converge` and `simulate`.
//!
//! The pipeline is always distribution → (recenter) → adapted mesh →
//! discretize → step quantile → {boundary curve | series map | simulation}.
//! Exit codes: 0 success, 2 config/parse error, 3 runtime error.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::boundary::boundary_curve;
use crate::error::{HardyError, MeasureError, SimError};
use crate::hardy::{
    fourier_coeffs_step, hardy_distance, hardy_norm, hardy_norm_trace, HardyConfig,
    PowerSeriesMap,
};
use crate::measures::{
    discretize, lp_quantile_distance, DiscreteMeasure, Measure, Mesh, QuadConfig, QuantileStep,
};
use crate::simulate::{
    coupled_gap_estimate, ks_statistic, sample_exit_points, NamedEstimate, NamedValue,
    SimulationReport,
};

/// Paths of disc Brownian motion are expensive; the coupled time-gap
/// estimator caps its path count at this many samples.
pub const MAX_GAP_PATHS: usize = 4_000;

#[derive(Debug)]
pub enum CliError {
    /// Malformed flags, specs or config files; exit code 2.
    Parse(String),
    /// I/O or numerical failures during a run; exit code 3.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<HardyError> for CliError {
    fn from(e: HardyError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// One fully resolved run: distribution, mesh sizes and numeric knobs.
/// Precedence is flags over config file over defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dist: Option<String>,
    pub cdf_file: Option<PathBuf>,
    pub ns: Vec<usize>,
    pub p: f64,
    /// Series truncation; `None` means max(256, 8n) per mesh size.
    pub k_trunc: Option<usize>,
    pub grid_size: usize,
    pub n_samples: usize,
    pub dt: f64,
    pub seed: u64,
    pub recenter: bool,
    pub out_dir: PathBuf,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dist: None,
            cdf_file: None,
            ns: vec![5, 20, 100, 200],
            p: 2.0,
            k_trunc: None,
            grid_size: 512,
            n_samples: 100_000,
            dt: 1e-4,
            seed: 1,
            recenter: true,
            out_dir: PathBuf::from("."),
            svg: false,
        }
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.dist.is_some() == self.cdf_file.is_some() {
            return Err(CliError::Parse(
                "exactly one of --dist or --cdf-file is required".into(),
            ));
        }
        if self.ns.is_empty() {
            return Err(CliError::Parse("the mesh-size list --n is empty".into()));
        }
        if self.ns.windows(2).any(|w| w[0] >= w[1]) || self.ns[0] < 1 {
            return Err(CliError::Parse(
                "mesh sizes must be positive and strictly increasing".into(),
            ));
        }
        if !(self.p >= 1.0) {
            return Err(CliError::Parse(format!("p must be ≥ 1, got {}", self.p)));
        }
        if self.grid_size < 64 {
            return Err(CliError::Parse(format!(
                "grid size must be ≥ 64, got {}",
                self.grid_size
            )));
        }
        if self.n_samples < 1 {
            return Err(CliError::Parse("sample count must be positive".into()));
        }
        if !(self.dt > 0.0 && self.dt <= crate::simulate::MAX_DT) {
            return Err(CliError::Parse(format!(
                "dt must lie in (0, {}], got {}",
                crate::simulate::MAX_DT,
                self.dt
            )));
        }
        if let Some(k) = self.k_trunc {
            if k < 1 {
                return Err(CliError::Parse("truncation K must be ≥ 1".into()));
            }
        }
        Ok(())
    }

    /// Build the (possibly recentred) target measure; returns the shift.
    pub fn measure(&self) -> Result<(Measure, f64), CliError> {
        let m = match (&self.dist, &self.cdf_file) {
            (Some(spec), None) => parse_dist_spec(spec)?,
            (None, Some(path)) => load_cdf_file(path)?,
            _ => return Err(CliError::Parse("no distribution given".into())),
        };
        if self.recenter {
            Ok(m.recentered())
        } else {
            Ok((m, 0.0))
        }
    }

    fn k_for(&self, n: usize) -> usize {
        self.k_trunc.unwrap_or_else(|| 256.max(8 * n))
    }
}

fn load_cdf_file(path: &Path) -> Result<Measure, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read cdf file {}: {e}", path.display())))?;
    Measure::from_cdf_text(&text).map_err(|e| CliError::Parse(e.to_string()))
}

/// Parse a distribution spec. Grammar:
///
/// ```text
/// uniform:a,b | biuniform:a,b,c,d | twopoint:x1,w1,x2 |
/// truncexp:rate,lo,hi | cdf:path
/// ```
pub fn parse_dist_spec(s: &str) -> Result<Measure, CliError> {
    let colon = s.find(':').ok_or_else(|| {
        CliError::Parse(format!(
            "spec `{s}`: expected `family:args` (missing `:` after byte 0)"
        ))
    })?;
    let (family, rest) = (&s[..colon], &s[colon + 1..]);
    let args_at = colon + 1;

    if family == "cdf" {
        if rest.is_empty() {
            return Err(CliError::Parse(format!(
                "spec `{s}`: expected a file path at byte {args_at}"
            )));
        }
        return load_cdf_file(Path::new(rest));
    }

    // numeric argument list with byte positions for error reports
    let mut nums = Vec::new();
    let mut pos = args_at;
    for tok in rest.split(',') {
        let v: f64 = tok.trim().parse().map_err(|_| {
            CliError::Parse(format!(
                "spec `{s}`: expected a number at byte {pos}, got `{tok}`"
            ))
        })?;
        nums.push(v);
        pos += tok.len() + 1;
    }

    let arity = |want: usize| -> Result<(), CliError> {
        if nums.len() == want {
            Ok(())
        } else {
            Err(CliError::Parse(format!(
                "spec `{s}`: {family} takes {want} arguments, got {} (at byte {args_at})",
                nums.len()
            )))
        }
    };
    let built = match family {
        "uniform" => {
            arity(2)?;
            Measure::uniform(nums[0], nums[1])
        }
        "biuniform" => {
            arity(4)?;
            Measure::biuniform(nums[0], nums[1], nums[2], nums[3])
        }
        "twopoint" => {
            arity(3)?;
            Measure::two_point(nums[0], nums[1], nums[2])
        }
        "truncexp" => {
            arity(3)?;
            Measure::trunc_exp(nums[0], nums[1], nums[2])
        }
        _ => {
            return Err(CliError::Parse(format!(
                "spec `{s}`: unknown family `{family}` at byte 0"
            )))
        }
    };
    built.map_err(|e| CliError::Parse(format!("spec `{s}`: {e}")))
}

fn pipeline(m: &Measure, n: usize) -> Result<(DiscreteMeasure, QuantileStep), CliError> {
    let mesh = Mesh::adapted(m, n)?;
    let d = discretize(m, &mesh)?;
    let qs = d.quantile_step();
    Ok((d, qs))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

/// `boundary`: one curve CSV (and optional SVG) per mesh size.
pub fn run_boundary(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let (m, shift) = cfg.measure()?;
    ensure_out_dir(&cfg.out_dir)?;
    let mut written = Vec::new();
    for &n in &cfg.ns {
        let (_, qs) = pipeline(&m, n)?;
        let curve = boundary_curve(&qs, cfg.grid_size).map_err(|e| CliError::Runtime(e.to_string()))?;
        let csv_path = cfg.out_dir.join(format!("boundary_n{n}.csv"));
        let mut buf = Vec::new();
        curve
            .write_csv(&mut buf)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        write_file(&csv_path, &buf)?;
        written.push(csv_path);
        if cfg.svg {
            let svg_path = cfg.out_dir.join(format!("boundary_n{n}.svg"));
            write_file(&svg_path, curve.to_svg().as_bytes())?;
            written.push(svg_path);
        }
    }
    println!("recenter_shift = {shift:.12e}");
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(written)
}

/// One row of the convergence table.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: usize,
    pub lp_distance: f64,
    pub mesh_bound: f64,
    /// Hardy distance of the series map against the reference (largest n);
    /// zero on the reference row itself.
    pub hardy_distance: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub p: f64,
    pub shift: f64,
    pub reference_n: usize,
    pub rows: Vec<ConvergenceRow>,
    pub slope_lp: f64,
    pub slope_hardy: f64,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lp_distance,mesh_bound,hardy_distance\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e}\n",
                r.n, r.lp_distance, r.mesh_bound, r.hardy_distance
            ));
        }
        out.push_str(&format!("# p = {}\n", self.p));
        out.push_str(&format!("# recenter_shift = {:.16e}\n", self.shift));
        out.push_str(&format!("# reference_n = {}\n", self.reference_n));
        out.push_str(&format!("# slope_lp = {:.6}\n", self.slope_lp));
        out.push_str(&format!("# slope_hardy = {:.6}\n", self.slope_hardy));
        out
    }
}

/// Least-squares slope of ln(y) against ln(x).
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// `converge`: quantile distances, mesh bounds and Hardy distances per mesh
/// size, with fitted log-log slopes. The largest n is the reference map.
pub fn run_converge(cfg: &RunConfig) -> Result<ConvergenceTable, CliError> {
    cfg.validate()?;
    if cfg.ns.len() < 2 {
        return Err(CliError::Parse(
            "converge needs at least two mesh sizes".into(),
        ));
    }
    let (m, shift) = cfg.measure()?;
    let (a, b) = m.support();
    let quad = QuadConfig::default();

    let n_ref = *cfg.ns.last().unwrap();
    let (_, qs_ref) = pipeline(&m, n_ref)?;
    let (qs_ref, _) = qs_ref.recentered();
    let k_ref = cfg.k_for(n_ref);
    let g_ref = fourier_coeffs_step(&qs_ref, k_ref)?;
    let hardy_cfg = if cfg.p == 2.0 {
        HardyConfig::parseval()
    } else {
        HardyConfig::boundary_trace(cfg.p, 8192)
    };

    let mut rows = Vec::new();
    for &n in &cfg.ns {
        let (_, qs) = pipeline(&m, n)?;
        let lp = lp_quantile_distance(&m, &qs, cfg.p, &quad)?;
        let hd = if n == n_ref {
            0.0
        } else {
            let (qs0, _) = qs.recentered();
            let g = fourier_coeffs_step(&qs0, cfg.k_for(n))?;
            hardy_distance(&g, &g_ref, &hardy_cfg)?
        };
        rows.push(ConvergenceRow {
            n,
            lp_distance: lp,
            mesh_bound: (b - a) / n as f64,
            hardy_distance: hd,
        });
    }

    let lp_pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.lp_distance > 0.0)
        .map(|r| (r.n as f64, r.lp_distance))
        .collect();
    let hardy_pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n != n_ref && r.hardy_distance > 0.0)
        .map(|r| (r.n as f64, r.hardy_distance))
        .collect();
    let table = ConvergenceTable {
        p: cfg.p,
        shift,
        reference_n: n_ref,
        rows,
        slope_lp: if lp_pts.len() >= 2 {
            log_log_slope(&lp_pts)
        } else {
            f64::NAN
        },
        slope_hardy: if hardy_pts.len() >= 2 {
            log_log_slope(&hardy_pts)
        } else {
            f64::NAN
        },
    };

    ensure_out_dir(&cfg.out_dir)?;
    let path = cfg.out_dir.join("converge.csv");
    write_file(&path, table.to_csv().as_bytes())?;
    println!("wrote {}", path.display());
    println!(
        "slope_lp = {:.4}, slope_hardy = {:.4}",
        table.slope_lp, table.slope_hardy
    );
    Ok(table)
}

/// `simulate`: exit-law KS distances, the p-th-moment identity and coupled
/// position/time gaps against the largest mesh size, as one JSON report.
pub fn run_simulate(cfg: &RunConfig) -> Result<SimulationReport, CliError> {
    cfg.validate()?;
    let (m, shift) = cfg.measure()?;
    let start = std::time::Instant::now();

    struct Level {
        n: usize,
        d: DiscreteMeasure,
        qs: QuantileStep,
        step_shift: f64,
        g: PowerSeriesMap,
    }
    let mut levels = Vec::new();
    for &n in &cfg.ns {
        let (d, qs_raw) = pipeline(&m, n)?;
        let (qs, step_shift) = qs_raw.recentered();
        let g = fourier_coeffs_step(&qs, cfg.k_for(n))?;
        levels.push(Level {
            n,
            d,
            qs,
            step_shift,
            g,
        });
    }

    let mut report = SimulationReport::new(cfg.seed, cfg.n_samples, cfg.dt);
    report.estimates.push(NamedEstimate {
        name: "recenter_shift".into(),
        value: shift,
        std_error: 0.0,
    });

    for lv in &levels {
        // exit law of the zero-mean domain vs the recentred discrete cdf
        let samples = sample_exit_points(&lv.qs, cfg.n_samples, cfg.seed);
        let re: Vec<f64> = samples.iter().map(|z| z.re).collect();
        let d_centered = DiscreteMeasure::new(
            lv.d.supports().iter().map(|x| x - lv.step_shift).collect(),
            lv.d.weights().to_vec(),
        )?;
        report.ks.push(NamedValue {
            name: format!("ks_exit_n{}", lv.n),
            value: ks_statistic(&re, &d_centered),
        });

        let moments: Vec<f64> = samples.iter().map(|z| z.norm().powf(cfg.p)).collect();
        let nf = moments.len() as f64;
        let mean = moments.iter().sum::<f64>() / nf;
        let var = moments.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
        report.estimates.push(NamedEstimate {
            name: format!("moment_mc_n{}", lv.n),
            value: mean,
            std_error: (var / nf).sqrt(),
        });
        let series_norm = if cfg.p == 2.0 {
            hardy_norm(&lv.g, &HardyConfig::parseval())?
        } else {
            hardy_norm_trace(&lv.qs, cfg.p, 8192)?
        };
        report.estimates.push(NamedEstimate {
            name: format!("moment_hardy_n{}", lv.n),
            value: series_norm.powf(cfg.p),
            std_error: 0.0,
        });
    }

    let reference = levels.last().unwrap();
    let gap_samples = cfg.n_samples.min(MAX_GAP_PATHS);
    for lv in &levels[..levels.len() - 1] {
        let (c1, c2, _) = coupled_gap_estimate(
            &lv.qs,
            &reference.qs,
            &lv.g,
            &reference.g,
            cfg.p,
            gap_samples,
            cfg.dt,
            cfg.seed,
        )?;
        report.estimates.push(NamedEstimate {
            name: format!("c1_n{}", lv.n),
            value: c1.value,
            std_error: c1.std_error,
        });
        report.estimates.push(NamedEstimate {
            name: format!("c2_n{}", lv.n),
            value: c2.value,
            std_error: c2.std_error,
        });
    }

    report.wall_clock_secs = start.elapsed().as_secs_f64();
    ensure_out_dir(&cfg.out_dir)?;
    let path = cfg.out_dir.join("report.json");
    write_file(&path, report.to_json().as_bytes())?;
    println!("wrote {}", path.display());
    Ok(report)
}

const USAGE: &str = "\
psep — numerical μ-domains for the planar Skorokhod embedding problem

USAGE:
    psep <boundary|converge|simulate> [FLAGS]

FLAGS:
    --dist <spec>       distribution spec (see grammar below)
    --cdf-file <path>   tabulated cdf file (\"x F\" rows, last F = 1)
    --n <list>          comma-separated increasing mesh sizes (default 5,20,100,200)
    --p <real>          L^p / Hardy exponent, p ≥ 1 (default 2)
    --K <count>         series truncation (default max(256, 8n))
    --grid <count>      boundary samples per curve, ≥ 64 (default 512)
    --samples <count>   Monte Carlo sample count (default 100000)
    --dt <real>         Euler step size in (0, 1e-3] (default 1e-4)
    --seed <u64>        RNG seed (default 1)
    --no-recenter       keep the distribution mean as given
    --out <dir>         output directory (default .)
    --svg               also emit an SVG polyline per boundary curve
    --config <path>     key=value file with the flag names above as keys
    --help              print this help

DISTRIBUTION SPEC GRAMMAR:
    uniform:a,b           uniform on (a,b)
    biuniform:a,b,c,d     uniform on (a,b) ∪ (c,d)
    twopoint:x1,w1,x2     mass w1 at x1 and 1−w1 at x2
    truncexp:rate,lo,hi   Exp(rate) conditioned on (lo,hi)
    cdf:path              tabulated cdf file (\"x F\" rows)

COMMANDS:
    boundary    write boundary_n<k>.csv (and .svg) per mesh size
    converge    write converge.csv with distances, bounds and log-log slopes
    simulate    write report.json with KS, moment and coupled-gap estimates

EXIT CODES:
    0 success, 2 config/parse error, 3 runtime error
";

fn parse_kv(key: &str, value: &str, cfg: &mut RunConfig) -> Result<(), CliError> {
    let bad = |what: &str| CliError::Parse(format!("flag --{key}: invalid {what} `{value}`"));
    match key {
        "dist" => cfg.dist = Some(value.to_string()),
        "cdf-file" => cfg.cdf_file = Some(PathBuf::from(value)),
        "n" => {
            let mut ns = Vec::new();
            for tok in value.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                ns.push(tok.parse::<usize>().map_err(|_| bad("mesh size"))?);
            }
            cfg.ns = ns;
        }
        "p" => cfg.p = value.parse().map_err(|_| bad("number"))?,
        "K" => cfg.k_trunc = Some(value.parse().map_err(|_| bad("count"))?),
        "grid" => cfg.grid_size = value.parse().map_err(|_| bad("count"))?,
        "samples" => cfg.n_samples = value.parse().map_err(|_| bad("count"))?,
        "dt" => cfg.dt = value.parse().map_err(|_| bad("number"))?,
        "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
        "no-recenter" => cfg.recenter = !matches!(value, "true" | "1" | ""),
        "out" => cfg.out_dir = PathBuf::from(value),
        "svg" => cfg.svg = matches!(value, "true" | "1" | ""),
        other => {
            return Err(CliError::Parse(format!("unknown flag --{other}")));
        }
    }
    Ok(())
}

fn apply_config_file(path: &Path, cfg: &mut RunConfig) -> Result<(), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Parse(format!(
                "config {} line {}: expected key=value",
                path.display(),
                lineno + 1
            ))
        })?;
        parse_kv(key.trim(), value.trim(), cfg)?;
    }
    Ok(())
}

/// Parse flags into a config (after an optional `--config` file) and run the
/// given subcommand. Returns the process exit code.
pub fn main_with_args(args: &[String]) -> i32 {
    let wants_help = args.iter().any(|a| a == "--help" || a == "-h");
    if args.is_empty() || (wants_help && args.len() == 1) {
        print!("{USAGE}");
        return if args.is_empty() { 2 } else { 0 };
    }
    let command = args[0].as_str();
    if wants_help {
        print!("{USAGE}");
        return 0;
    }

    match build_config(&args[1..]).and_then(|cfg| match command {
        "boundary" => run_boundary(&cfg).map(|_| ()),
        "converge" => run_converge(&cfg).map(|_| ()),
        "simulate" => run_simulate(&cfg).map(|_| ()),
        other => Err(CliError::Parse(format!(
            "unknown command `{other}` (expected boundary, converge or simulate)"
        ))),
    }) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

const BOOL_FLAGS: &[&str] = &["no-recenter", "svg"];

fn build_config(flag_args: &[String]) -> Result<RunConfig, CliError> {
    // first pass: collect (key, value) pairs
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut i = 0;
    while i < flag_args.len() {
        let arg = &flag_args[i];
        let key = arg.strip_prefix("--").ok_or_else(|| {
            CliError::Parse(format!("expected a --flag, got `{arg}`"))
        })?;
        if let Some((k, v)) = key.split_once('=') {
            pairs.push((k.to_string(), v.to_string()));
        } else if BOOL_FLAGS.contains(&key) {
            pairs.push((key.to_string(), String::new()));
        } else {
            i += 1;
            let v = flag_args.get(i).ok_or_else(|| {
                CliError::Parse(format!("flag --{key} needs a value"))
            })?;
            pairs.push((key.to_string(), v.clone()));
        }
        i += 1;
    }

    let mut cfg = RunConfig::default();
    // config file first, then flags, so flags win
    for (k, v) in &pairs {
        if k == "config" {
            apply_config_file(Path::new(v), &mut cfg)?;
        }
    }
    for (k, v) in &pairs {
        if k != "config" {
            parse_kv(k, v, &mut cfg)?;
        }
    }
    Ok(cfg)
}
