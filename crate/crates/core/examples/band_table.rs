//! Droplet bands, cluster bands and the analytic gap report.
//!
//! ```bash
//! cargo run --example band_table -- 2.0 4
//! ```

use xxz_spectra::bands::{analytic_gap_report, band_table, total_cluster_spectrum, write_band_csv};
use xxz_spectra::ModelParams;

fn main() -> xxz_spectra::Result<()> {
    let mut args = std::env::args().skip(1);
    let delta: f64 = args.next().map_or(Ok(2.0), |s| s.parse()).unwrap_or(2.0);
    let nmax: usize = args.next().map_or(Ok(4), |s| s.parse()).unwrap_or(4);

    let p = ModelParams::new(delta, 1)?;
    let rows = band_table(&p, nmax)?;
    write_band_csv(&rows, std::io::stdout().lock())?;

    for n in 1..=nmax {
        let pn = p.with_n(n)?;
        let c = total_cluster_spectrum(&pn)?;
        let pieces: Vec<String> = c
            .bands()
            .iter()
            .map(|b| format!("[{:.4}, {:.4}]", b.lo, b.hi))
            .collect();
        println!("C({n}) = {}", pieces.join(" ∪ "));
        let g = analytic_gap_report(&pn);
        if let Some(gap) = g.droplet_gap {
            println!(
                "  gap above the droplet band: ({:.4}, {:.4}){}",
                gap.lo,
                gap.hi,
                if gap.nonempty { "" } else { " is empty" }
            );
        }
    }
    Ok(())
}
