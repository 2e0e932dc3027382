//! Lowest eigenvalues of the truncated fiber operators against `E_N(θ)`.
//!
//! ```bash
//! cargo run --release --example fiber_sweep
//! ```

use xxz_spectra::spectra::{fiber_sweep, interior_residual, theta_grid};
use xxz_spectra::ModelParams;

fn main() -> xxz_spectra::Result<()> {
    let p = ModelParams::new(2.0, 3)?;
    let cap = 30;
    println!("theta,analytic,lowest,second,diff,dim");
    for row in fiber_sweep(&p, &theta_grid(9), cap, 2)? {
        println!(
            "{:.4},{:.10},{:.10},{:.6},{:.2e},{}",
            row.theta, row.analytic, row.eigenvalues[0], row.eigenvalues[1], row.diff, row.dim
        );
    }
    let r = interior_residual(&p, 0.5, cap)?;
    println!(
        "Bethe vector at θ = 0.5: interior residual {:.1e}, relative residual {:.1e}",
        r.interior_max, r.full_relative
    );
    Ok(())
}
