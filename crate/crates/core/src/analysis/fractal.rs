//! Box-counting dimension of a sampled graph.

use crate::error::{Error, Result};

/// Fewest samples accepted by [`box_counting_dimension`].
pub const MIN_SAMPLES: usize = 1 << 16;
/// Fewest octaves between the coarsest and finest box.
pub const MIN_OCTAVES: u32 = 3;

/// Box sizes `2^-coarsest ..= 2^-finest` of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleRange {
    pub coarsest: u32,
    pub finest: u32,
}

impl Default for ScaleRange {
    fn default() -> Self {
        ScaleRange {
            coarsest: 6,
            finest: 14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCount {
    pub dimension: f64,
    /// `(box size, occupied boxes)` per octave, coarsest first.
    pub counts: Vec<(f64, u64)>,
}

/// Least-squares slope of `log N(eps)` against `log(1/eps)`.
///
/// The graph is first mapped to the unit square (positions to `[0, 1]`,
/// density divided by its peak). In every column of width `eps` the boxes
/// between the lowest and highest value are counted, including the first
/// sample of the next column so the graph stays connected. Columns touching
/// any interval in `exclude` (in the original `y` units) are skipped.
pub fn box_counting_dimension(
    slice: &[f64],
    y: &[f64],
    scales: ScaleRange,
    exclude: &[(f64, f64)],
) -> Result<BoxCount> {
    if slice.len() != y.len() {
        return Err(Error::validation("samples", "slice and grid lengths differ"));
    }
    if slice.len() < MIN_SAMPLES {
        return Err(Error::validation(
            "y_points",
            format!("box counting needs at least {MIN_SAMPLES} samples, got {}", slice.len()),
        ));
    }
    if scales.finest < scales.coarsest + MIN_OCTAVES {
        return Err(Error::validation(
            "scale_range",
            format!("scale range must span at least {MIN_OCTAVES} octaves"),
        ));
    }
    let span = y[y.len() - 1] - y[0];
    if !(span > 0.0) || y.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("y_points", "positions must be strictly increasing"));
    }
    let finest = 0.5f64.powi(scales.finest as i32);
    let spacing = span / (y.len() - 1) as f64;
    if finest < 2.0 * spacing / span {
        return Err(Error::validation(
            "scale_range",
            "finest box is narrower than two grid spacings",
        ));
    }
    let peak = slice.iter().copied().fold(0.0f64, f64::max);
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::validation("samples", "slice has no positive finite peak"));
    }
    let x: Vec<f64> = y.iter().map(|v| (v - y[0]) / span).collect();
    let v: Vec<f64> = slice.iter().map(|d| d / peak).collect();
    let excluded: Vec<(f64, f64)> = exclude
        .iter()
        .map(|&(a, b)| ((a.min(b) - y[0]) / span, (a.max(b) - y[0]) / span))
        .collect();

    let mut counts = Vec::new();
    for e in scales.coarsest..=scales.finest {
        let eps = 0.5f64.powi(e as i32);
        let columns = 1usize << e;
        let mut total: u64 = 0;
        let mut start = 0;
        for col in 0..columns {
            let left = col as f64 * eps;
            let right = left + eps;
            let mut end = start;
            while end < x.len() && (x[end] < right || col + 1 == columns) {
                end += 1;
            }
            if end == start {
                continue;
            }
            let skip = excluded.iter().any(|&(a, b)| a <= right && b >= left);
            if !skip {
                let last = end.min(x.len() - 1);
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for &val in &v[start..=last] {
                    lo = lo.min(val);
                    hi = hi.max(val);
                }
                total += ((hi / eps).floor() - (lo / eps).floor()) as u64 + 1;
            }
            start = end;
        }
        counts.push((eps, total));
    }
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .filter(|(_, n)| *n > 0)
        .map(|(eps, n)| ((1.0 / eps).ln(), (*n as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::validation("samples", "too few occupied scales"));
    }
    Ok(BoxCount {
        dimension: slope(&pts),
        counts,
    })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
