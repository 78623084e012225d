//! Boundary curves of the approximating μₙ-domains.
//!
//! Reproduces the two classic targets — uniform on (−2,−1) ∪ (1,2) and the
//! truncated exponential Exp(1) on (0,3) — for n = 5, 20, 100, 200, writing
//! one CSV and one SVG per curve under `out/boundary/`.
//!
//! ```bash
//! cargo run --example boundary_curves
//! ```

use std::fs;

use psep::boundary::boundary_curve;
use psep::measures::{discretize, Measure, Mesh};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::path::Path::new("out/boundary");
    fs::create_dir_all(out)?;

    let targets = [
        ("biuniform", Measure::biuniform(-2.0, -1.0, 1.0, 2.0)?),
        ("truncexp", Measure::trunc_exp(1.0, 0.0, 3.0)?),
    ];

    for (name, raw) in targets {
        let (m, shift) = raw.recentered();
        println!("{name}: support {:?}, recenter shift {shift:.6}", m.support());
        for n in [5usize, 20, 100, 200] {
            let mesh = Mesh::adapted(&m, n)?;
            let qs = discretize(&m, &mesh)?.quantile_step();
            let curve = boundary_curve(&qs, 512)?;

            let min_x = curve.samples().iter().map(|s| s.x).fold(f64::INFINITY, f64::min);
            let max_x = curve.samples().iter().map(|s| s.x).fold(f64::NEG_INFINITY, f64::max);
            let max_y = curve.samples().iter().map(|s| s.y.abs()).fold(0.0, f64::max);
            println!(
                "  n = {n:3}: {} samples, x ∈ [{min_x:+.4}, {max_x:+.4}], max |y| = {max_y:.3}",
                curve.samples().len()
            );

            let mut csv = Vec::new();
            curve.write_csv(&mut csv)?;
            fs::write(out.join(format!("{name}_n{n}.csv")), csv)?;
            fs::write(out.join(format!("{name}_n{n}.svg")), curve.to_svg())?;
        }
    }

    // the strip property: a null interval of the target keeps the boundary out
    let m = Measure::biuniform(-2.0, -1.0, 1.0, 2.0)?;
    let qs = discretize(&m, &Mesh::adapted(&m, 200)?)?.quantile_step();
    let inside = boundary_curve(&qs, 512)?
        .samples()
        .iter()
        .filter(|s| s.x.abs() < 1.0 - 1e-9)
        .count();
    println!("biuniform strip check: {inside} samples inside the strip (expected 0)");
    Ok(())
}
