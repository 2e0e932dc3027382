//! Two-cluster Weyl products for `N = 3` and their residuals.
//!
//! ```bash
//! cargo run --release --example weyl_products
//! ```

use xxz_spectra::spectra::hvz_check;
use xxz_spectra::ModelParams;

fn main() -> xxz_spectra::Result<()> {
    let p = ModelParams::new(2.0, 3)?;
    for split in 1..=2 {
        for w in [10, 20, 40] {
            let r = hvz_check(&p, split, w, None)?;
            println!(
                "m = {split}, W = {w}: λ + μ = {:.6}, residual {:.5} = √({:.5}² + {:.5}²)",
                r.energy, r.residual, r.component_residuals[0], r.component_residuals[1]
            );
        }
    }
    Ok(())
}
