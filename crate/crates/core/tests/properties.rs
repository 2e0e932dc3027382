use proptest::prelude::*;

use xxz_spectra::bands::{enclosure_bands, BandSet};
use xxz_spectra::basis::Window;
use xxz_spectra::bethe::{droplet_band, Band};
use xxz_spectra::ensemble::{sample_field, FieldSpec};
use xxz_spectra::hamiltonians::{build_fiber, build_lattice_xn};
use xxz_spectra::spectra::dense_eigenvalues;
use xxz_spectra::{Field, ModelParams};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn params(delta: f64, n: usize, nu: Option<Vec<f64>>) -> ModelParams {
    let p = ModelParams::new(delta, n).unwrap();
    match nu {
        Some(v) => p.with_field(Field::new(1, v).unwrap()),
        None => p,
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn spectrum_bounded_below_by_droplet_minimum(
        delta in 1.05f64..8.0,
        n in 1usize..=3,
        w in 3usize..=14,
        nu in proptest::collection::vec(0.0f64..1.0, 14),
    ) {
        prop_assume!(n <= w);
        let p = params(delta, n, Some(nu[..w].to_vec()));
        let ev = dense_eigenvalues(&build_lattice_xn(&p, Window::of_len(w).unwrap()).unwrap()).unwrap();
        let floor = droplet_band(&ModelParams::new(delta, n).unwrap()).lo;
        prop_assert!(ev[0] >= floor - 1e-12, "{} < {}", ev[0], floor);
    }

    #[test]
    fn field_shifted_enclosure(
        delta in 1.05f64..8.0,
        n in 1usize..=3,
        w in 3usize..=12,
        nu_max in 0.0f64..1.5,
        seed in any::<u64>(),
    ) {
        prop_assume!(n <= w);
        let window = Window::of_len(w).unwrap();
        let spec = FieldSpec::Uniform { nu_max };
        let sample = sample_field(&spec, window, seed, 0).unwrap();
        let p = ModelParams::new(delta, n).unwrap().with_field(sample.field());
        let shift = n as f64 * nu_max;
        let set = BandSet::from_bands(
            enclosure_bands(&p).into_iter().map(|b| Band { lo: b.lo, hi: b.hi + shift }).collect(),
        );
        for e in dense_eigenvalues(&build_lattice_xn(&p, window).unwrap()).unwrap() {
            prop_assert!(set.contains(e, 1e-12), "{e} outside {:?}", set.bands());
        }
    }

    #[test]
    fn nonnegative_field_raises_every_level(
        delta in 1.05f64..5.0,
        n in 1usize..=3,
        w in 4usize..=10,
        nu in proptest::collection::vec(0.0f64..1.0, 10),
    ) {
        prop_assume!(n <= w);
        let window = Window::of_len(w).unwrap();
        let bare = dense_eigenvalues(&build_lattice_xn(&params(delta, n, None), window).unwrap()).unwrap();
        let pushed = dense_eigenvalues(&build_lattice_xn(&params(delta, n, Some(nu[..w].to_vec())), window).unwrap()).unwrap();
        for (a, b) in bare.iter().zip(&pushed) {
            prop_assert!(b >= &(a - 1e-12));
        }
    }

    #[test]
    fn fiber_spectrum_is_even_and_periodic_in_theta(
        delta in 1.05f64..5.0,
        n in 2usize..=3,
        theta in -3.1f64..3.1,
        cap in 2u32..=8,
    ) {
        let p = ModelParams::new(delta, n).unwrap();
        let a = dense_eigenvalues(&build_fiber(&p, theta, cap).unwrap()).unwrap();
        let b = dense_eigenvalues(&build_fiber(&p, -theta, cap).unwrap()).unwrap();
        let c = dense_eigenvalues(&build_fiber(&p, theta + 2.0 * std::f64::consts::PI, cap).unwrap()).unwrap();
        for ((x, y), z) in a.iter().zip(&b).zip(&c) {
            prop_assert!((x - y).abs() < 1e-10 && (x - z).abs() < 1e-10);
        }
    }

    #[test]
    fn larger_windows_lower_the_minimum(
        delta in 1.05f64..5.0,
        n in 1usize..=3,
        w in 3usize..=12,
    ) {
        prop_assume!(n <= w);
        let p = ModelParams::new(delta, n).unwrap();
        let small = dense_eigenvalues(&build_lattice_xn(&p, Window::of_len(w).unwrap()).unwrap()).unwrap()[0];
        let large = dense_eigenvalues(&build_lattice_xn(&p, Window::of_len(w + 1).unwrap()).unwrap()).unwrap()[0];
        prop_assert!(large <= small + 1e-12);
    }

    #[test]
    fn field_samples_are_reproducible_and_in_range(
        nu_max in 0.0f64..3.0,
        prob in 0.0f64..=1.0,
        seed in any::<u64>(),
        index in 0u64..1000,
        w in 1usize..50,
    ) {
        let window = Window::of_len(w).unwrap();
        for spec in [FieldSpec::Uniform { nu_max }, FieldSpec::TwoPoint { nu_max, p: prob }] {
            let a = sample_field(&spec, window, seed, index).unwrap();
            let b = sample_field(&spec, window, seed, index).unwrap();
            prop_assert_eq!(&a.values, &b.values);
            prop_assert!(a.values.iter().all(|&v| (0.0..=nu_max).contains(&v)));
            if let FieldSpec::TwoPoint { .. } = spec {
                prop_assert!(a.values.iter().all(|&v| v == 0.0 || v == nu_max));
            }
        }
    }

    #[test]
    fn band_union_covers_its_inputs(
        raw in proptest::collection::vec((-5.0f64..5.0, 0.0f64..2.0), 1..8),
        t in 0.0f64..=1.0,
    ) {
        let bands: Vec<Band> = raw.iter().map(|&(lo, w)| Band { lo, hi: lo + w }).collect();
        let set = BandSet::from_bands(bands.clone());
        for b in &bands {
            prop_assert!(set.contains(b.lo + t * (b.hi - b.lo), 0.0));
        }
        prop_assert_eq!(set.union(&set), set.clone());
        let pieces = set.bands();
        for pair in pieces.windows(2) {
            prop_assert!(pair[0].hi < pair[1].lo);
        }
    }
}
