//! Physical invariants of the spectral propagator over randomised setups.

use proptest::prelude::*;
use qcarpet::analysis::{l2_density_distance, trapezoid};
use qcarpet::propagator::{density_slice_direct, full_well_positions};
use qcarpet::{
    carpet_with_workers, density_slice_at, parseval_deficit, slit_coefficients, ModalCoefficients,
    SlitAperture, SpaceTimeGrid, Tau, WellConfig,
};

/// Random well and slit with the slit strictly inside.
fn setup() -> impl Strategy<Value = (WellConfig, SlitAperture)> {
    (0.5f64..20.0, 0.5f64..3.0, 0.01f64..0.5, -1.0f64..1.0).prop_map(|(l, nu, frac, pos)| {
        let well = WellConfig::new(l, nu, 0.0).unwrap();
        let width = frac * l;
        let reach = 0.999 * (l - width) / 2.0;
        let slit = SlitAperture::within(pos * reach, width, &well).unwrap();
        (well, slit)
    })
}

fn slice(c: &ModalCoefficients, w: &WellConfig, y: &[f64], tau: f64) -> Vec<f64> {
    density_slice_at(c, w, y, Tau::new(tau).unwrap()).unwrap().density()
}

fn peak(d: &[f64]) -> f64 {
    d.iter().copied().fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn density_is_periodic((well, slit) in setup(), n in 10usize..800, tau in 0.0f64..1.0) {
        let c = slit_coefficients(&well, &slit, n).unwrap();
        let y = full_well_positions(&well, 301).unwrap();
        let a = slice(&c, &well, &y, tau);
        let b = slice(&c, &well, &y, tau + 3.0);
        let scale = peak(&a);
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn time_reflection((well, slit) in setup(), n in 10usize..800, tau in 0.0f64..1.0) {
        // real coefficients: Psi(T - t) is the conjugate of Psi(t)
        let c = slit_coefficients(&well, &slit, n).unwrap();
        let y = full_well_positions(&well, 301).unwrap();
        let a = slice(&c, &well, &y, tau);
        let b = slice(&c, &well, &y, 1.0 - tau);
        let scale = peak(&a);
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn half_period_mirrors((well, slit) in setup(), n in 10usize..800) {
        let c = slit_coefficients(&well, &slit, n).unwrap();
        let y = full_well_positions(&well, 401).unwrap();
        let start = slice(&c, &well, &y, 0.0);
        let half = slice(&c, &well, &y, 0.5);
        let scale = peak(&start);
        for (p, q) in half.iter().zip(start.iter().rev()) {
            prop_assert!((p - q).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn norm_is_conserved((well, slit) in setup(), n in 5usize..60, tau in 0.0f64..1.0) {
        // a grid far finer than the highest mode integrates the density exactly
        let c = slit_coefficients(&well, &slit, n).unwrap();
        let y = full_well_positions(&well, 40 * n + 1).unwrap();
        let total = trapezoid(&y, &slice(&c, &well, &y, tau)).unwrap();
        prop_assert!((total - (1.0 - parseval_deficit(&c))).abs() < 1e-10, "{total}");
    }

    #[test]
    fn recurrence_matches_direct_sum((well, slit) in setup(), n in 1usize..9000, tau in 0.0f64..1.0) {
        let c = slit_coefficients(&well, &slit, n).unwrap();
        let y = full_well_positions(&well, 97).unwrap();
        let t = Tau::new(tau).unwrap();
        let fast = density_slice_at(&c, &well, &y, t).unwrap().density();
        let direct = density_slice_direct(&c, &well, &y, t).unwrap().density();
        prop_assert!(l2_density_distance(&fast, &direct).unwrap() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn carpets_agree_across_worker_counts((well, slit) in setup(), n in 10usize..3000, workers in 2usize..9) {
        let grid = SpaceTimeGrid::over_period(&well, 200, 17).unwrap();
        let c = slit_coefficients(&well, &slit, n).unwrap();
        let one = carpet_with_workers(&c, &well, &grid, 1).unwrap();
        let many = carpet_with_workers(&c, &well, &grid, workers).unwrap();
        prop_assert_eq!(one.values(), many.values());
    }
}

#[test]
fn eigenstates_are_stationary() {
    let well = WellConfig::natural(2.0).unwrap();
    let y = full_well_positions(&well, 257).unwrap();
    for n in [1, 2, 7, 40] {
        let c = ModalCoefficients::eigenstate(n, n).unwrap();
        let start = slice(&c, &well, &y, 0.0);
        for tau in [0.1, 0.37, 0.9] {
            let later = slice(&c, &well, &y, tau);
            for (p, q) in start.iter().zip(&later) {
                assert!((p - q).abs() < 1e-12, "mode {n} at {tau}");
            }
        }
    }
}

#[test]
fn measurement_time_shifts_the_clock() {
    let early = WellConfig::new(1.0, 1.0, 0.0).unwrap();
    let late = WellConfig::new(1.0, 1.0, 5.0).unwrap();
    let slit = SlitAperture::within(0.1, 0.05, &early).unwrap();
    let c = slit_coefficients(&early, &slit, 400).unwrap();
    let y = full_well_positions(&early, 129).unwrap();
    let a = qcarpet::density_slice(&c, &early, &y, 0.01).unwrap().density();
    let b = qcarpet::density_slice(&c, &late, &y, 5.01).unwrap().density();
    let scale = peak(&a);
    for (p, q) in a.iter().zip(&b) {
        assert!((p - q).abs() < 1e-9 * scale);
    }
    assert!(qcarpet::density_slice(&c, &late, &y, 4.0).is_err());
}
