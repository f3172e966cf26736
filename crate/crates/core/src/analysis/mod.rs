//! Pattern diagnostics: distances, plateau statistics, correlations with the
//! free-space references, revival detection and box-counting dimension.

mod fractal;
mod revival;

pub use fractal::{box_counting_dimension, BoxCount, ScaleRange};
pub use revival::{
    coherent_template, copy_template, gauss_weights, revival_scan, revival_scan_with,
    RevivalClass, RevivalHit, RevivalReport, ScanOptions,
};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::oracle::{fraunhofer_envelope, free_space_window, fresnel_reference};
use crate::spectral::{SlitAperture, WellConfig};

/// Default revival threshold on [`l2_density_distance`].
pub const REVIVAL_THRESHOLD: f64 = 1e-3;
/// Fresnel regime: correlation with the near-field reference at least this.
pub const FRESNEL_CORRELATION: f64 = 0.95;
/// Fraunhofer regime: correlation with the far-field envelope at least this.
pub const SINC_CORRELATION: f64 = 0.9;
/// Fraunhofer regime: plateau retention at most this.
pub const PLATEAU_RETENTION: f64 = 0.5;
/// Half-width of the Fresnel comparison window in slit widths.
pub const FRESNEL_WINDOW: f64 = 5.0;

fn same_len(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::validation(
            "samples",
            format!("length mismatch: {} vs {}", p.len(), q.len()),
        ));
    }
    if p.is_empty() {
        return Err(Error::validation("samples", "empty input"));
    }
    Ok(())
}

/// `||p - q|| / ||q||`.
pub fn l2_density_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    same_len(p, q)?;
    let diff: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).collect();
    let base: Vec<f64> = q.iter().map(|b| b * b).collect();
    let num = pairwise_sum(&diff);
    let den = pairwise_sum(&base);
    if den == 0.0 {
        if num == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::validation("samples", "reference density is identically zero"));
    }
    Ok((num / den).sqrt())
}

/// Checks `y[k] == -y[n-1-k]` to rounding.
pub fn check_symmetric_grid(y: &[f64]) -> Result<()> {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let n = y.len();
    for k in 0..n.div_ceil(2) {
        if (y[k] + y[n - 1 - k]).abs() > 1e-12 * scale {
            return Err(Error::validation(
                "y_points",
                format!("grid is not symmetric about 0 at index {k}"),
            ));
        }
    }
    Ok(())
}

/// Distance between a slice and its reflection `y -> -y`.
pub fn mirror_distance(slice: &[f64], y: &[f64]) -> Result<f64> {
    same_len(slice, y)?;
    check_symmetric_grid(y)?;
    let reflected: Vec<f64> = slice.iter().rev().copied().collect();
    l2_density_distance(slice, &reflected)
}

fn plateau_samples(slice: &[f64], slit: &SlitAperture, y: &[f64]) -> Result<Vec<f64>> {
    same_len(slice, y)?;
    let half = 0.3 * slit.width();
    let inner: Vec<f64> = y
        .iter()
        .zip(slice)
        .filter(|(v, _)| (**v - slit.center()).abs() <= half)
        .map(|(_, d)| *d)
        .collect();
    if inner.len() < 2 {
        return Err(Error::validation(
            "y_points",
            "fewer than two samples fall in the central 60% of the slit",
        ));
    }
    Ok(inner)
}

/// Relative standard deviation of the density over the central 60% of the
/// slit window.
pub fn plateau_flatness(slice: &[f64], slit: &SlitAperture, y: &[f64]) -> Result<f64> {
    let inner = plateau_samples(slice, slit, y)?;
    let n = inner.len() as f64;
    let mean = pairwise_sum(&inner) / n;
    if mean == 0.0 {
        return Err(Error::UndefinedCorrelation("zero density on the plateau".into()));
    }
    let dev: Vec<f64> = inner.iter().map(|v| (v - mean) * (v - mean)).collect();
    Ok((pairwise_sum(&dev) / n).sqrt() / mean)
}

/// Mean density over the central 60% of the slit relative to the collapse
/// plateau `1/a`.
pub fn plateau_retention(slice: &[f64], slit: &SlitAperture, y: &[f64]) -> Result<f64> {
    let inner = plateau_samples(slice, slit, y)?;
    Ok(pairwise_sum(&inner) / inner.len() as f64 * slit.width())
}

/// Pearson correlation coefficient.
pub fn pearson(p: &[f64], q: &[f64]) -> Result<f64> {
    same_len(p, q)?;
    let n = p.len() as f64;
    let mp = pairwise_sum(p) / n;
    let mq = pairwise_sum(q) / n;
    let cov: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a - mp) * (b - mq)).collect();
    let vp: Vec<f64> = p.iter().map(|a| (a - mp) * (a - mp)).collect();
    let vq: Vec<f64> = q.iter().map(|b| (b - mq) * (b - mq)).collect();
    let (sp, sq) = (pairwise_sum(&vp), pairwise_sum(&vq));
    if sp <= 0.0 || sq <= 0.0 {
        return Err(Error::UndefinedCorrelation("constant input".into()));
    }
    Ok((pairwise_sum(&cov) / (sp * sq).sqrt()).clamp(-1.0, 1.0))
}

/// Index range from the envelope's peak out to its second local minimum on
/// each side: the main lobe and one side lobe either way.
fn central_lobes(envelope: &[f64]) -> (usize, usize) {
    let n = envelope.len();
    let peak = (0..n)
        .max_by(|&a, &b| envelope[a].total_cmp(&envelope[b]))
        .unwrap_or(0);
    let mut hi = peak;
    let mut minima = 0;
    while hi + 1 < n {
        hi += 1;
        if hi + 1 < n && envelope[hi] <= envelope[hi - 1] && envelope[hi] < envelope[hi + 1] {
            minima += 1;
            if minima == 2 {
                break;
            }
        }
    }
    let mut lo = peak;
    minima = 0;
    while lo > 0 {
        lo -= 1;
        if lo > 0 && envelope[lo] <= envelope[lo + 1] && envelope[lo] < envelope[lo - 1] {
            minima += 1;
            if minima == 2 {
                break;
            }
        }
    }
    (lo, hi)
}

/// Pearson correlation between a slice and a far-field envelope sampled on
/// the same grid, restricted to the envelope's central three lobes.
pub fn sinc_correlation(slice: &[f64], envelope: &[f64]) -> Result<f64> {
    same_len(slice, envelope)?;
    let (lo, hi) = central_lobes(envelope);
    pearson(&slice[lo..=hi], &envelope[lo..=hi])
}

/// Pearson correlation restricted to samples with `lo <= y <= hi`.
pub fn window_correlation(p: &[f64], q: &[f64], y: &[f64], lo: f64, hi: f64) -> Result<f64> {
    same_len(p, q)?;
    same_len(p, y)?;
    let (a, b): (Vec<f64>, Vec<f64>) = y
        .iter()
        .zip(p.iter().zip(q))
        .filter(|(v, _)| **v >= lo && **v <= hi)
        .map(|(_, (x, z))| (*x, *z))
        .unzip();
    if a.len() < 2 {
        return Err(Error::validation("y_points", "fewer than two samples in the window"));
    }
    pearson(&a, &b)
}

/// Trapezoid rule on an arbitrary increasing grid.
pub fn trapezoid(y: &[f64], f: &[f64]) -> Result<f64> {
    same_len(y, f)?;
    let parts: Vec<f64> = y
        .windows(2)
        .zip(f.windows(2))
        .map(|(yy, ff)| 0.5 * (yy[1] - yy[0]) * (ff[0] + ff[1]))
        .collect();
    Ok(pairwise_sum(&parts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// At or before the measurement: the collapse rectangle itself.
    Collapsed,
    /// Near field: edge waves on a surviving plateau.
    Fresnel,
    /// Far field: sinc-squared lobes, plateau gone.
    Fraunhofer,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    pub fresnel_correlation: Option<f64>,
    pub sinc_correlation: Option<f64>,
    pub plateau_retention: f64,
    /// `false` once the fastest retained mode could have reached a wall, in
    /// which case the free-space comparisons are indicative only.
    pub within_free_space_window: bool,
}

/// Classifies a slice at time `t` against the free-space references.
///
/// Fraunhofer needs the sinc correlation and a plateau reduced to at most
/// [`PLATEAU_RETENTION`] of `1/a`; Fresnel needs the near-field correlation
/// over `y0 +- 5a`.
pub fn classify_regime(
    slice: &[f64],
    y: &[f64],
    slit: &SlitAperture,
    well: &WellConfig,
    t: f64,
    truncation: usize,
) -> Result<RegimeReport> {
    let retention = plateau_retention(slice, slit, y)?;
    let window = free_space_window(slit, well, truncation)?;
    if t <= well.t_measure() {
        return Ok(RegimeReport {
            regime: Regime::Collapsed,
            fresnel_correlation: None,
            sinc_correlation: None,
            plateau_retention: retention,
            within_free_space_window: true,
        });
    }
    let fresnel = fresnel_reference(slit, well, t, y)?;
    let span = FRESNEL_WINDOW * slit.width();
    let fc = window_correlation(slice, &fresnel, y, slit.center() - span, slit.center() + span)?;
    let envelope = fraunhofer_envelope(slit, well, t, y)?;
    let sc = sinc_correlation(slice, &envelope)?;
    let regime = if sc >= SINC_CORRELATION && retention <= PLATEAU_RETENTION {
        Regime::Fraunhofer
    } else if fc >= FRESNEL_CORRELATION {
        Regime::Fresnel
    } else {
        Regime::Unclassified
    };
    Ok(RegimeReport {
        regime,
        fresnel_correlation: Some(fc),
        sinc_correlation: Some(sc),
        plateau_retention: retention,
        within_free_space_window: t <= window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distance_examples() {
        let p = [1.0, 2.0, 3.0];
        assert_eq!(l2_density_distance(&p, &p).unwrap(), 0.0);
        let q: Vec<f64> = p.iter().map(|v| 2.0 * v).collect();
        assert!((l2_density_distance(&p, &q).unwrap() - 0.5).abs() < 1e-15);
        assert!(l2_density_distance(&p, &q[..2]).is_err());
    }

    #[test]
    fn mirror_needs_symmetric_grid() {
        let y = [-1.0, 0.0, 1.0];
        assert_eq!(mirror_distance(&[1.0, 5.0, 1.0], &y).unwrap(), 0.0);
        assert!(mirror_distance(&[1.0, 5.0, 1.0], &[-1.0, 0.0, 0.9]).is_err());
        let d = mirror_distance(&[1.0, 0.0, 0.0], &y).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn flatness_of_ideal_rectangle() {
        let slit = SlitAperture::new(0.0, 0.1).unwrap();
        let y: Vec<f64> = (0..101).map(|k| -0.1 + 0.002 * k as f64).collect();
        let d: Vec<f64> = y.iter().map(|v| if v.abs() <= 0.05 { 10.0 } else { 0.0 }).collect();
        assert_eq!(plateau_flatness(&d, &slit, &y).unwrap(), 0.0);
        assert!((plateau_retention(&d, &slit, &y).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlation_edge_cases() {
        let e = [0.1, 0.5, 1.0, 0.5, 0.1];
        assert!((sinc_correlation(&e, &e).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            pearson(&[2.0; 4], &[1.0, 2.0, 3.0, 4.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
    }

    #[test]
    fn central_lobes_stop_at_second_minimum() {
        let y: Vec<f64> = (0..4001).map(|k| -2.0 + 0.001 * k as f64).collect();
        let s = SlitAperture::new(0.0, 1.0).unwrap();
        let w = WellConfig::natural(10.0).unwrap();
        // first zero at 2 pi t / a = 0.5
        let t = 0.5 / (2.0 * std::f64::consts::PI);
        let e = fraunhofer_envelope(&s, &w, t, &y).unwrap();
        let (lo, hi) = central_lobes(&e);
        assert!((y[hi] - 1.0).abs() < 2e-3, "{}", y[hi]);
        assert!((y[lo] + 1.0).abs() < 2e-3, "{}", y[lo]);
    }

    #[test]
    fn trapezoid_is_exact_for_lines() {
        let y = [0.0, 0.5, 2.0];
        let f = [1.0, 2.0, 5.0];
        assert!((trapezoid(&y, &f).unwrap() - 6.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn distance_is_scale_free(v in proptest::collection::vec(0.0f64..10.0, 2..50), s in 0.1f64..100.0) {
            let w: Vec<f64> = v.iter().map(|x| x + 1.0).collect();
            let sv: Vec<f64> = v.iter().map(|x| x * s).collect();
            let sw: Vec<f64> = w.iter().map(|x| x * s).collect();
            let a = l2_density_distance(&v, &w).unwrap();
            let b = l2_density_distance(&sv, &sw).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            prop_assert!(a >= 0.0);
        }

        #[test]
        fn pearson_is_bounded(v in proptest::collection::vec(-5.0f64..5.0, 3..40), k in -3.0f64..3.0) {
            let w: Vec<f64> = v.iter().enumerate().map(|(i, x)| x * k + (i as f64).sin()).collect();
            if let Ok(r) = pearson(&v, &w) {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }
    }
}
