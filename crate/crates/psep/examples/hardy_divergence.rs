//! Why Hardy convergence, not locally uniform convergence, is the right
//! hypothesis: the Möbius maps Gₙ(z) = (2n+1)z/((n+1) − nz) send the disc
//! onto the expanding discs |z − n| < n + 1 and converge locally uniformly
//! to the half-plane map 2z/(1−z), which lies in no Hardy class. The H¹
//! norms of the truncated maps blow up accordingly.
//!
//! ```bash
//! cargo run --example hardy_divergence
//! ```

use psep::hardy::{hardy_norm, HardyConfig, PowerSeriesMap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = 400;
    let cfg = HardyConfig::boundary_trace(1.0, 8192);
    println!("truncation K = {k}, H¹ norms on the circle:");
    for n in [1.0f64, 5.0, 25.0, 125.0, 625.0] {
        let g = PowerSeriesMap::geometric((2.0 * n + 1.0) / (n + 1.0), n / (n + 1.0), k)?;
        let h1 = hardy_norm(&g, &cfg)?;
        println!("  n = {n:>5}: ‖Gₙ‖_H¹ ≈ {h1:>9.4}");
    }
    // the locally uniform limit itself, truncated: coefficients 2·1ᵏ
    let limit = PowerSeriesMap::geometric(2.0, 1.0, k)?;
    let h1 = hardy_norm(&limit, &cfg)?;
    println!("truncated limit map 2z/(1−z): ‖G‖_H¹ ≈ {h1:.2} (→ ∞ with K)");
    Ok(())
}
