//! Oracle checks for a configuration.
//!
//! The Crank-Nicolson comparison runs at reduced truncation: a 3-point
//! lattice of 8192 points carries a phase error growing like `n^4` for mode
//! `n`, so only the lowest few dozen modes are resolved well enough to
//! expose the solver's own second-order time error.

use qcarpet::analysis::l2_density_distance;
use qcarpet::io::RunConfig;
use qcarpet::oracle::{crank_nicolson_evolve, LatticeState};
use qcarpet::propagator::{density_slice_direct, full_well_positions};
use qcarpet::{
    coefficients_by_quadrature, density_slice_at, slit_coefficients, CollapseProfile, Tau,
};

use crate::Failure;

const COEFF_MODES: usize = 1000;
const COEFF_TOL: f64 = 1e-12;
const KERNEL_POINTS: usize = 512;
const KERNEL_TOL: f64 = 1e-9;
const CN_MODES: usize = 32;
const CN_POINTS: usize = 8192;
const CN_L2_TOL: f64 = 1e-3;
/// Elapsed time of the comparison as a fraction of the revival period.
const CN_SPAN: f64 = 1.0 / 640.0;
const CN_STEPS: usize = 125;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

pub fn run(config: &RunConfig) -> Result<(), Failure> {
    let checks = [coefficients(config)?, kernel(config)?, crank_nicolson(config)?];
    let mut failed = 0;
    for c in &checks {
        println!("{:<16} {}  {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
        if !c.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Failure::runtime(
            "check",
            format!("{failed} of {} checks failed", checks.len()),
        ));
    }
    Ok(())
}

fn coefficients(config: &RunConfig) -> Result<Check, Failure> {
    let n = config.truncation.min(COEFF_MODES);
    let closed = slit_coefficients(&config.well, &config.slit, n)?;
    let quad = coefficients_by_quadrature(&config.well, &CollapseProfile::Rectangular(config.slit), n)?;
    let scale = closed.as_slice().iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let worst = closed
        .as_slice()
        .iter()
        .zip(quad.as_slice())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm() / scale));
    Ok(Check {
        name: "coefficients",
        pass: worst <= COEFF_TOL,
        detail: format!("max |closed - quadrature| / max|c| = {worst:.2e} over n <= {n} (limit {COEFF_TOL:.0e})"),
    })
}

fn kernel(config: &RunConfig) -> Result<Check, Failure> {
    let coeffs = slit_coefficients(&config.well, &config.slit, config.truncation)?;
    let y = full_well_positions(&config.well, KERNEL_POINTS)?;
    let mut worst: f64 = 0.0;
    for tau in [Tau::ZERO, Tau::new(0.5f64.sqrt())?, Tau::ratio(1, 3)?] {
        let fast = density_slice_at(&coeffs, &config.well, &y, tau)?.density();
        let direct = density_slice_direct(&coeffs, &config.well, &y, tau)?.density();
        worst = worst.max(l2_density_distance(&fast, &direct)?);
    }
    Ok(Check {
        name: "recurrence",
        pass: worst <= KERNEL_TOL,
        detail: format!("L2 distance to direct summation {worst:.2e} at N = {} (limit {KERNEL_TOL:.0e})", config.truncation),
    })
}

fn crank_nicolson(config: &RunConfig) -> Result<Check, Failure> {
    let well = &config.well;
    let n = config.truncation.min(CN_MODES);
    let coeffs = slit_coefficients(well, &config.slit, n)?;
    let init = LatticeState::from_spectral(&coeffs, well, CN_POINTS)?;
    let span = CN_SPAN * well.revival_time();
    let t = well.t_measure() + span;
    let exact = qcarpet::density_slice(&coeffs, well, &init.positions(), t)?.density();
    let error = |steps: usize| -> Result<f64, Failure> {
        let out = crank_nicolson_evolve(&init, well, span / steps as f64, steps)?;
        Ok(l2_density_distance(&out.density(), &exact)?)
    };
    let coarse = error(CN_STEPS)?;
    let fine = error(2 * CN_STEPS)?;
    let ratio = coarse / fine;
    let pass = fine <= CN_L2_TOL && (ratio - 4.0).abs() <= 0.8;
    Ok(Check {
        name: "crank-nicolson",
        pass,
        detail: format!(
            "L2 {fine:.2e} (limit {CN_L2_TOL:.0e}), halving ratio {ratio:.2} (4 +- 0.8); N = {n}, M = {CN_POINTS}, t = T/640"
        ),
    })
}
