use std::path::{Path, PathBuf};

use qcarpet::analysis::{revival_scan_with, ScanOptions};
use qcarpet::io::{
    write_carpet_csv, write_csv_slice, write_pgm_carpet, write_report_csv, OutputFormat, RunConfig,
    TimeSpec,
};
use qcarpet::propagator::full_well_positions;
use qcarpet::screen::screen_pattern;
use qcarpet::{carpet_with_workers, density_slice_at, slit_coefficients, SpaceTimeGrid, WellConfig};

use crate::Failure;

pub fn out_path(config: &RunConfig, name: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| Failure::runtime("io", format!("{}: {e}", config.out_dir.display())))?;
    Ok(config.out_dir.join(name))
}

pub fn report(path: &Path) {
    println!("wrote {}", path.display());
}

/// File-name form of a time: `1/4T` becomes `1_4T`.
pub fn time_label(spec: &TimeSpec) -> String {
    spec.to_string().replace('/', "_")
}

/// Length of a time interval given as a spec; absolute values are taken as
/// durations here, not as instants.
pub fn duration(spec: &TimeSpec, well: &WellConfig) -> f64 {
    match *spec {
        TimeSpec::Absolute(dt) => dt,
        TimeSpec::Periods(x) => x * well.revival_time(),
        TimeSpec::PeriodRatio(p, q) => p as f64 / q as f64 * well.revival_time(),
    }
}

pub fn carpet(config: &RunConfig, workers: usize) -> Result<(), Failure> {
    let coeffs = slit_coefficients(&config.well, &config.slit, config.truncation)?;
    let grid = SpaceTimeGrid::over_period(&config.well, config.y_points, config.t_points)?;
    let field = carpet_with_workers(&coeffs, &config.well, &grid, workers)?;
    for format in &config.formats {
        let path = match format {
            OutputFormat::Pgm => {
                let p = out_path(config, "carpet.pgm")?;
                write_pgm_carpet(&p, &field)?;
                p
            }
            OutputFormat::Csv => {
                let p = out_path(config, "carpet.csv")?;
                write_carpet_csv(&p, &field)?;
                p
            }
        };
        report(&path);
    }
    Ok(())
}

pub fn slice(config: &RunConfig, times: &[TimeSpec]) -> Result<(), Failure> {
    let times = if times.is_empty() { &config.t_list[..] } else { times };
    if times.is_empty() {
        return Err(Failure::validation("t: no times given (use --t or t_list)"));
    }
    let coeffs = slit_coefficients(&config.well, &config.slit, config.truncation)?;
    let y = full_well_positions(&config.well, config.y_points)?;
    for spec in times {
        let tau = spec.tau(&config.well)?;
        let density = density_slice_at(&coeffs, &config.well, &y, tau)?.density();
        let path = out_path(config, &format!("slice_{}.csv", time_label(spec)))?;
        write_csv_slice(&path, &y, &density)?;
        report(&path);
    }
    Ok(())
}

pub fn screen(config: &RunConfig, distances: &[f64]) -> Result<(), Failure> {
    let distances = if distances.is_empty() { &config.d_list[..] } else { distances };
    if distances.is_empty() {
        return Err(Failure::validation("d: no distances given (use --d or d_list)"));
    }
    let beam = config
        .beam
        .as_ref()
        .ok_or_else(|| Failure::validation("k_x: screen patterns need k_x in the config"))?;
    let coeffs = slit_coefficients(&config.well, &config.slit, config.truncation)?;
    let y = full_well_positions(&config.well, config.y_points)?;
    for &d in distances {
        let density = screen_pattern(&coeffs, &config.well, beam, &y, d)?;
        let path = out_path(config, &format!("screen_{d}.csv"))?;
        write_csv_slice(&path, &y, &density)?;
        report(&path);
    }
    Ok(())
}

pub fn revivals(
    config: &RunConfig,
    t_max: TimeSpec,
    step: TimeSpec,
    threshold: f64,
    fractional: Option<u64>,
) -> Result<(), Failure> {
    let well = &config.well;
    let coeffs = slit_coefficients(well, &config.slit, config.truncation)?;
    let y = full_well_positions(well, config.y_points)?;
    let end = t_max.time(well)?;
    let opts = ScanOptions {
        threshold,
        fractional,
        ..ScanOptions::default()
    };
    let result = revival_scan_with(&coeffs, well, &y, (well.t_measure(), end), duration(&step, well), &opts)?;
    let period = well.revival_time();
    for hit in &result.hits {
        println!(
            "{} revival at t = {:.9e} ({:.6}T), distance {:.3e}",
            hit.class,
            hit.time,
            (hit.time - well.t_measure()) / period,
            hit.metric
        );
    }
    let path = out_path(config, "revivals.csv")?;
    write_report_csv(&path, &result)?;
    report(&path);
    Ok(())
}
