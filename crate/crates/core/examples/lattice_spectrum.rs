//! Spectrum of `N` magnons on a finite window, with a field, and the same
//! operator assembled from spin-chain terms.
//!
//! ```bash
//! cargo run --release --example lattice_spectrum
//! ```

use xxz_spectra::basis::Window;
use xxz_spectra::hamiltonians::{build_lattice_xn, build_spin_sector, spin_boundary_correction};
use xxz_spectra::spectra::{dense_spectrum, extremal_with, End, LanczosConfig};
use xxz_spectra::{Field, ModelParams};

fn main() -> xxz_spectra::Result<()> {
    let field = Field::new(1, vec![0.0, 0.2, 0.0, 0.4, 0.1, 0.0, 0.3, 0.0])?;
    let p = ModelParams::new(1.5, 2)?.with_field(field);
    let h = build_lattice_xn(&p, Window::of_len(8)?)?;
    let s = dense_spectrum(&h)?;
    println!("dim {}, eigenvalues {:.6?}", h.dim(), s.eigenvalues);

    let spin = build_spin_sector(&p, 8)?;
    let corrected = spin.with_diagonal_added(&spin_boundary_correction(&p, 8)?);
    let max_diff = (0..h.dim())
        .flat_map(|i| (0..h.dim()).map(move |j| (i, j)))
        .map(|(i, j)| (h.get(i, j) - corrected.get(i, j)).norm())
        .fold(0.0, f64::max);
    println!("spin sector + boundary terms vs lattice operator: max entry difference {max_diff:e}");

    let big = build_lattice_xn(&ModelParams::new(2.0, 2)?, Window::of_len(120)?)?;
    // the low levels are 1e−4 apart, so allow more steps than the default
    let low = extremal_with(
        &big,
        3,
        End::Lowest,
        &LanczosConfig::default().with_max_iter(1000),
    )?;
    println!(
        "N = 2, Δ = 2, window 120 (dim {}): lowest {:.8?} after {} Lanczos steps",
        big.dim(),
        low.eigenvalues,
        low.meta.iterations
    );
    Ok(())
}
