//! Rank-one certificate: at most one fiber eigenvalue below `2 − 2/Δ`.
//!
//! ```bash
//! cargo run --release --example gap_certificate
//! ```

use std::f64::consts::PI;

use xxz_spectra::spectra::gap_certificate;
use xxz_spectra::ModelParams;

fn main() -> xxz_spectra::Result<()> {
    for (delta, n) in [(4.0, 3), (4.0, 4), (1.5, 2)] {
        let p = ModelParams::new(delta, n)?;
        println!("Δ = {delta}, N = {n}, threshold {:.4}", 2.0 - 2.0 / delta);
        for j in 0..4 {
            let theta = -PI + 2.0 * PI * j as f64 / 4.0;
            let c = gap_certificate(&p, theta, 20)?;
            println!(
                "  θ = {theta:+.4}: {} below ({:?}), lowest {:.6}, E_N {:.6}, α droplet {:.4}, α elsewhere {:.4}, bound {}",
                c.below_threshold_count,
                c.count_method,
                c.lowest_eigenvalue,
                c.analytic_energy,
                c.alpha_droplet,
                c.alpha_min_elsewhere,
                if c.bound_holds { "holds" } else { "violated" }
            );
        }
    }
    Ok(())
}
