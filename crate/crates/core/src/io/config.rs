//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Required keys: `L`, `y0`, `a`, `N`. Unknown or repeated keys are errors.
//! Times in `t_list` may be absolute (`2e-5`) or fractions of the revival
//! period (`0.25T`, `1/4T`).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::phase::{Tau, MAX_MODE};
use crate::screen::BeamConfig;
use crate::spectral::{SlitAperture, WellConfig};

pub const DEFAULT_Y_POINTS: usize = 4096;
pub const DEFAULT_T_POINTS: usize = 1024;

/// A time given directly or relative to the revival period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeSpec {
    Absolute(f64),
    /// Multiple of the revival period after `t_M`.
    Periods(f64),
    /// `p/q` of the revival period after `t_M`, exact.
    PeriodRatio(u64, u64),
}

impl TimeSpec {
    /// Elapsed period fraction at this time.
    pub fn tau(&self, well: &WellConfig) -> Result<Tau> {
        match *self {
            TimeSpec::Absolute(t) => well.tau_at(t),
            TimeSpec::Periods(x) => Tau::new(x),
            TimeSpec::PeriodRatio(p, q) => Tau::ratio(p, q),
        }
    }

    pub fn time(&self, well: &WellConfig) -> Result<f64> {
        match *self {
            TimeSpec::Absolute(t) => {
                well.tau_at(t)?;
                Ok(t)
            }
            _ => Ok(well.time_at(self.tau(well)?)),
        }
    }
}

impl FromStr for TimeSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if let Some(body) = s.strip_suffix('T') {
            let body = body.trim();
            if let Some((p, q)) = body.split_once('/') {
                let p: u64 = p.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
                let q: u64 = q.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
                if q == 0 {
                    return Err(format!("zero denominator in `{s}`"));
                }
                return Ok(TimeSpec::PeriodRatio(p, q));
            }
            let x = if body.is_empty() {
                1.0
            } else {
                parse_f64(body).map_err(|_| format!("bad period multiple `{s}`"))?
            };
            if !(x.is_finite() && x >= 0.0) {
                return Err(format!("period multiple must be >= 0, got `{s}`"));
            }
            return Ok(TimeSpec::Periods(x));
        }
        let t = parse_f64(s).map_err(|_| format!("bad time `{s}`"))?;
        if !t.is_finite() {
            return Err(format!("time must be finite, got `{s}`"));
        }
        Ok(TimeSpec::Absolute(t))
    }
}

impl fmt::Display for TimeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeSpec::Absolute(t) => write!(f, "{t}"),
            TimeSpec::Periods(x) => write!(f, "{x}T"),
            TimeSpec::PeriodRatio(p, q) => write!(f, "{p}/{q}T"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Pgm,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Pgm => "pgm",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub well: WellConfig,
    pub slit: SlitAperture,
    pub truncation: usize,
    pub beam: Option<BeamConfig>,
    pub y_points: usize,
    pub t_points: usize,
    pub t_list: Vec<TimeSpec>,
    pub d_list: Vec<f64>,
    pub out_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
}

const KEYS: [&str; 13] = [
    "L",
    "hbar_over_m",
    "t_measure",
    "y0",
    "a",
    "N",
    "k_x",
    "y_points",
    "t_points",
    "t_list",
    "d_list",
    "out_dir",
    "format",
];

fn parse_f64(s: &str) -> std::result::Result<f64, std::num::ParseFloatError> {
    s.trim().parse::<f64>()
}

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

fn err_at(key: &str, line: usize, msg: impl fmt::Display) -> Error {
    Error::validation(key, format!("line {line}: {msg}"))
}

fn number(key: &str, e: &Entry) -> Result<f64> {
    let v = parse_f64(e.value).map_err(|_| err_at(key, e.line, format!("`{}` is not a number", e.value)))?;
    if !v.is_finite() {
        return Err(err_at(key, e.line, "value must be finite"));
    }
    Ok(v)
}

fn count(key: &str, e: &Entry) -> Result<usize> {
    e.value
        .trim()
        .parse::<usize>()
        .map_err(|_| err_at(key, e.line, format!("`{}` is not a non-negative integer", e.value)))
}

fn relabel(err: Error, key: &str, line: usize) -> Error {
    match err {
        Error::Validation { message, .. } | Error::Domain(message) => err_at(key, line, message),
        other => other,
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: Vec<(&str, Entry)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| Error::validation("config", format!("line {line}: expected `key = value`")))?;
        let key = key.trim();
        let known = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| err_at(key, line, "unknown key"))?;
        if let Some((_, prev)) = entries.iter().find(|(k, _)| k == known) {
            return Err(err_at(key, line, format!("repeated key (first set on line {})", prev.line)));
        }
        entries.push((known, Entry { line, value: value.trim() }));
    }
    let get = |key: &str| entries.iter().find(|(k, _)| *k == key).map(|(_, e)| e);
    let required = |key: &str| get(key).ok_or_else(|| Error::validation(key, "missing required key"));

    let l_entry = required("L")?;
    let length = number("L", l_entry)?;
    let hbar = match get("hbar_over_m") {
        Some(e) => (number("hbar_over_m", e)?, e.line),
        None => (1.0, 0),
    };
    let tm = match get("t_measure") {
        Some(e) => (number("t_measure", e)?, e.line),
        None => (0.0, 0),
    };
    let well = WellConfig::new(length, hbar.0, tm.0).map_err(|err| match &err {
        Error::Validation { field, .. } => {
            let line = match field.as_str() {
                "L" => l_entry.line,
                "hbar_over_m" => hbar.1,
                _ => tm.1,
            };
            let f = field.clone();
            relabel(err, &f, line)
        }
        _ => err,
    })?;

    let y0_entry = required("y0")?;
    let a_entry = required("a")?;
    let y0 = number("y0", y0_entry)?;
    let a = number("a", a_entry)?;
    if !(a > 0.0) {
        return Err(err_at("a", a_entry.line, format!("slit width must be > 0, got {a}")));
    }
    let slit = SlitAperture::new(y0, a).map_err(|e| relabel(e, "y0", y0_entry.line))?;
    slit.check_inside(&well).map_err(|e| relabel(e, "y0", y0_entry.line))?;

    let n_entry = required("N")?;
    let truncation = count("N", n_entry)?;
    if truncation == 0 || truncation > MAX_MODE {
        return Err(err_at("N", n_entry.line, format!("truncation must be in 1..={MAX_MODE}")));
    }

    let beam = match get("k_x") {
        Some(e) => Some(BeamConfig::new(number("k_x", e)?, &well).map_err(|err| relabel(err, "k_x", e.line))?),
        None => None,
    };

    let y_points = match get("y_points") {
        Some(e) => {
            let v = count("y_points", e)?;
            if v < 2 {
                return Err(err_at("y_points", e.line, "need at least 2 positions"));
            }
            v
        }
        None => DEFAULT_Y_POINTS,
    };
    let t_points = match get("t_points") {
        Some(e) => {
            let v = count("t_points", e)?;
            if v < 1 {
                return Err(err_at("t_points", e.line, "need at least 1 time"));
            }
            v
        }
        None => DEFAULT_T_POINTS,
    };

    let mut t_list = Vec::new();
    if let Some(e) = get("t_list") {
        for item in e.value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let spec: TimeSpec = item.parse().map_err(|m: String| err_at("t_list", e.line, m))?;
            spec.time(&well).map_err(|err| relabel(err, "t_list", e.line))?;
            t_list.push(spec);
        }
    }
    let mut d_list = Vec::new();
    if let Some(e) = get("d_list") {
        for item in e.value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let d = parse_f64(item).map_err(|_| err_at("d_list", e.line, format!("`{item}` is not a number")))?;
            if !(d.is_finite() && d >= 0.0) {
                return Err(err_at("d_list", e.line, format!("distance must be >= 0, got {item}")));
            }
            d_list.push(d);
        }
        if beam.is_none() && !d_list.is_empty() {
            return Err(err_at("d_list", e.line, "screen distances need k_x"));
        }
    }

    let out_dir = match get("out_dir") {
        Some(e) if e.value.is_empty() => return Err(err_at("out_dir", e.line, "empty path")),
        Some(e) => PathBuf::from(e.value),
        None => PathBuf::from("out"),
    };
    let formats = match get("format") {
        Some(e) => {
            let mut out = Vec::new();
            for item in e.value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let f = match item {
                    "csv" => OutputFormat::Csv,
                    "pgm" => OutputFormat::Pgm,
                    other => return Err(err_at("format", e.line, format!("unknown format `{other}`"))),
                };
                if !out.contains(&f) {
                    out.push(f);
                }
            }
            if out.is_empty() {
                return Err(err_at("format", e.line, "no formats listed"));
            }
            out
        }
        None => vec![OutputFormat::Csv, OutputFormat::Pgm],
    };

    Ok(RunConfig {
        well,
        slit,
        truncation,
        beam,
        y_points,
        t_points,
        t_list,
        d_list,
        out_dir,
        formats,
    })
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for RunConfig {
    /// Canonical form; parses back to an equal config.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "L = {}", self.well.length())?;
        writeln!(f, "hbar_over_m = {}", self.well.hbar_over_m())?;
        writeln!(f, "t_measure = {}", self.well.t_measure())?;
        writeln!(f, "y0 = {}", self.slit.center())?;
        writeln!(f, "a = {}", self.slit.width())?;
        writeln!(f, "N = {}", self.truncation)?;
        if let Some(b) = &self.beam {
            writeln!(f, "k_x = {}", b.k_x())?;
        }
        writeln!(f, "y_points = {}", self.y_points)?;
        writeln!(f, "t_points = {}", self.t_points)?;
        if !self.t_list.is_empty() {
            writeln!(f, "t_list = {}", join(&self.t_list))?;
        }
        if !self.d_list.is_empty() {
            writeln!(f, "d_list = {}", join(&self.d_list))?;
        }
        writeln!(f, "out_dir = {}", self.out_dir.display())?;
        writeln!(f, "format = {}", join(&self.formats))
    }
}
