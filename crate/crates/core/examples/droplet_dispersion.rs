//! Bethe coefficients of the droplet eigenfunction and its energy `E_N(θ)`.
//!
//! ```bash
//! cargo run --example droplet_dispersion
//! ```

use std::f64::consts::PI;

use xxz_spectra::bethe::{dispersion, droplet_band, solve_coefficients};
use xxz_spectra::ModelParams;

fn main() -> xxz_spectra::Result<()> {
    let p = ModelParams::new(2.0, 4)?;
    let band = droplet_band(&p);
    println!(
        "Δ = {}, N = {}: droplet band [{:.6}, {:.6}]",
        p.delta(),
        p.n(),
        band.lo,
        band.hi
    );

    for j in 0..=8 {
        let theta = -PI + 2.0 * PI * j as f64 / 8.0;
        let s = solve_coefficients(&p, theta)?;
        let coeffs: Vec<String> = s
            .coefficients
            .iter()
            .map(|a| format!("{:.4}{:+.4}i", a.re, a.im))
            .collect();
        println!(
            "θ = {theta:+.4}  E = {:.8}  (dispersion {:.8})  a = [{}]  {:?}",
            s.energy,
            dispersion(&p, theta),
            coeffs.join(", "),
            s.special_case
        );
    }
    Ok(())
}
