//! The closed-form Hilbert transform of step quantiles against the
//! principal-value quadrature oracle: a log-graded midpoint rule on
//! (1/2π) ∫_{η≤|t|≤π} f(θ−t) cot(t/2) dt, Richardson-extrapolated in η.
//!
//! ```bash
//! cargo run --example hilbert_oracle
//! ```

use std::f64::consts::PI;

use psep::boundary::{hilbert_indicator, hilbert_phi_step, hilbert_pv_quadrature, jump_angles, PvConfig};
use psep::measures::DiscreteMeasure;

fn wrap(t: f64) -> f64 {
    let w = (t + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // conjugate of cos(kθ) is sin(kθ)
    let cfg = PvConfig::default();
    println!("smooth test f = cos(k·), θ = 1.1:");
    for k in [1.0f64, 3.0, 6.0] {
        let oracle = hilbert_pv_quadrature(move |t| (k * t).cos(), 1.1, &cfg)?;
        println!("  k = {k}: oracle {oracle:+.8}, sin(kθ) {:+.8}", (k * 1.1f64).sin());
    }

    // indicator of |θ| ∈ (π/6, π/3)
    let (alpha, beta, theta) = (PI / 6.0, PI / 3.0, 1.0);
    let closed = hilbert_indicator(alpha, beta, theta)?;
    let cfg_ind = PvConfig::default().with_breakpoints(vec![alpha, -alpha, beta, -beta]);
    let oracle = hilbert_pv_quadrature(
        move |t| {
            let m = wrap(t).abs();
            if m > alpha && m < beta { 1.0 } else { 0.0 }
        },
        theta,
        &cfg_ind,
    )?;
    println!("indicator (π/6, π/3) at θ = 1: closed {closed:+.8}, oracle {oracle:+.8}");

    // a three-atom step quantile
    let qs = DiscreteMeasure::new(vec![-1.5, 0.25, 2.0], vec![0.3, 0.45, 0.25])?.quantile_step();
    let mut bps = jump_angles(&qs);
    bps.extend(jump_angles(&qs).iter().map(|t| -t));
    let cfg_step = PvConfig::default().with_breakpoints(bps);
    println!("three-atom step quantile:");
    for theta in [0.4, 1.3, 2.7, -2.0] {
        let closed = hilbert_phi_step(&qs, theta)?;
        let q = qs.clone();
        let oracle = hilbert_pv_quadrature(move |t| q.eval(wrap(t).abs() / PI), theta, &cfg_step)?;
        println!(
            "  θ = {theta:+.1}: closed {closed:+.8}, oracle {oracle:+.8}, |Δ| = {:.1e}",
            (closed - oracle).abs()
        );
    }
    Ok(())
}
