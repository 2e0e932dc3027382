//! Spectral analysis of the `N`-magnon sectors of the XXZ chain in the Ising
//! phase `Δ > 1`.
//!
//! The crate builds finite truncations of the `N`-particle Hamiltonian in four
//! equivalent pictures ([`hamiltonians`]), evaluates the droplet bound state in
//! closed form ([`bethe`]), combines droplet bands into cluster bands
//! ([`bands`]), and checks the resulting spectral statements numerically
//! ([`spectra`], [`ensemble`]).
//!
//! ```
//! use xxz_spectra::{bethe, ModelParams};
//!
//! let p = ModelParams::new(2.0, 3).unwrap();
//! let band = bethe::droplet_band(&p);
//! assert!((band.lo - 5.0 / 6.0).abs() < 1e-14);
//! assert!((band.hi - 0.9).abs() < 1e-14);
//! ```

pub mod bands;
pub mod basis;
pub mod bethe;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod hamiltonians;
pub mod params;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};
pub use params::{Field, ModelParams};
pub use sparse::SparseHermitian;
