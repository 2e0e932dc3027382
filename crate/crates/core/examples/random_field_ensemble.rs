//! Seeded random-field ensemble with per-sample rigor checks.
//!
//! ```bash
//! cargo run --release --example random_field_ensemble
//! ```

use xxz_spectra::basis::Window;
use xxz_spectra::cli::ensemble_parallel;
use xxz_spectra::ensemble::{ensemble_run, FieldSpec};
use xxz_spectra::ModelParams;

fn main() -> xxz_spectra::Result<()> {
    let p = ModelParams::new(2.0, 2)?;
    let window = Window::of_len(30)?;
    let spec = FieldSpec::TwoPoint {
        nu_max: 0.5,
        p: 0.3,
    };
    let stats = ensemble_run(&p, &spec, window, 20, 7)?;
    println!(
        "baseline {:.6}, min energy mean {:.6} (q10 {:.6}, q90 {:.6}), ground IPR mean {:.4}, all checks {}",
        stats.baseline_min,
        stats.min_energy.mean,
        stats.min_energy.q10,
        stats.min_energy.q90,
        stats.ground_ipr.mean,
        stats.all_checks_pass
    );
    let threaded = ensemble_parallel(&p, &spec, window, 20, 7, Some(4))?;
    println!("identical with four workers: {}", threaded == stats);
    Ok(())
}
