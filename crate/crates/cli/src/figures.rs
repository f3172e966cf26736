//! Reference figure parameter sets.
//!
//! The carpet is `L = 50, y0 = 0, a = 10, N = 500`; every slice uses
//! `L = 1, y0 = 0.245, a = 0.01` with `N = 50000` unless the figure varies
//! `N`. The run config only supplies the output directory, grid sizes and
//! carpet formats.

use qcarpet::io::{write_carpet_csv, write_csv_slice, write_pgm_carpet, OutputFormat, RunConfig, TimeSpec};
use qcarpet::propagator::full_well_positions;
use qcarpet::{
    carpet_with_workers, density_slice_at, slit_coefficients, SlitAperture, SpaceTimeGrid, WellConfig,
};

use crate::commands::{out_path, report, time_label};
use crate::Failure;

const SLICE_N: usize = 50_000;

/// `(figure and panel, times)` for the fixed-`N` slice figures.
fn slice_panels() -> Vec<(&'static str, Vec<TimeSpec>)> {
    use TimeSpec::{Absolute as At, PeriodRatio as Of};
    vec![
        ("fig3a", vec![At(0.0)]),
        ("fig3b", vec![At(2e-5)]),
        ("fig3c", vec![At(4e-5)]),
        ("fig4a", vec![At(2e-4)]),
        ("fig4b", vec![At(6e-4)]),
        ("fig5a", vec![At(2e-3)]),
        ("fig5b", vec![At(4e-3)]),
        ("fig5c", vec![At(6e-3)]),
        ("fig5d", vec![At(8e-3)]),
        ("fig6a", vec![At(0.0)]),
        ("fig6b", vec![Of(1, 2)]),
        ("fig6c", vec![Of(1, 1)]),
        ("fig7a", vec![Of(1, 10), Of(3, 10), Of(7, 10), Of(9, 10)]),
        ("fig7b", vec![Of(1, 5), Of(2, 5), Of(3, 5), Of(4, 5)]),
        ("fig7c", vec![Of(1, 3)]),
        ("fig7d", vec![Of(1, 4)]),
    ]
}

pub fn run(config: &RunConfig, workers: usize) -> Result<(), Failure> {
    carpet_figure(config, workers)?;

    let well = WellConfig::natural(1.0)?;
    let slit = SlitAperture::within(0.245, 0.01, &well)?;
    let y = full_well_positions(&well, config.y_points)?;
    let zero = TimeSpec::Absolute(0.0).tau(&well)?;

    for (panel, n) in ["a", "b", "c", "d"].iter().zip([100, 1000, 10_000, 50_000]) {
        let coeffs = slit_coefficients(&well, &slit, n)?;
        let density = density_slice_at(&coeffs, &well, &y, zero)?.density();
        let path = out_path(config, &format!("fig2{panel}_N{n}.csv"))?;
        write_csv_slice(&path, &y, &density)?;
        report(&path);
    }

    let coeffs = slit_coefficients(&well, &slit, SLICE_N)?;
    for (panel, times) in slice_panels() {
        for spec in times {
            let density = density_slice_at(&coeffs, &well, &y, spec.tau(&well)?)?.density();
            let path = out_path(config, &format!("{panel}_t{}.csv", time_label(&spec)))?;
            write_csv_slice(&path, &y, &density)?;
            report(&path);
        }
    }
    Ok(())
}

fn carpet_figure(config: &RunConfig, workers: usize) -> Result<(), Failure> {
    let well = WellConfig::natural(50.0)?;
    let slit = SlitAperture::within(0.0, 10.0, &well)?;
    let coeffs = slit_coefficients(&well, &slit, 500)?;
    let grid = SpaceTimeGrid::over_period(&well, config.y_points, config.t_points)?;
    let field = carpet_with_workers(&coeffs, &well, &grid, workers)?;
    for format in &config.formats {
        let path = match format {
            OutputFormat::Pgm => {
                let p = out_path(config, "fig1_carpet.pgm")?;
                write_pgm_carpet(&p, &field)?;
                p
            }
            OutputFormat::Csv => {
                let p = out_path(config, "fig1_carpet.csv")?;
                write_carpet_csv(&p, &field)?;
                p
            }
        };
        report(&path);
    }
    Ok(())
}
