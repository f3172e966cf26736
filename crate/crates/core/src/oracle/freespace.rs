//! Free-particle diffraction of an ideal slit.
//!
//! A rectangle of width `a` at `y0` released at `t_M` evolves in free space as
//! `psi(y, t) = (erf(w (y - y0 + a/2)) - erf(w (y - y0 - a/2))) / (2 sqrt(a))`
//! with `w = exp(-i pi/4) / sqrt(2 (hbar/m) (t - t_M))`. At long times the
//! density approaches the far-field shape `sinc^2(a (y - y0) / (2 (hbar/m) t))`.
//! Both describe the cavity only until the fastest components reach a wall.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{SlitAperture, WellConfig};

const TAYLOR_RADIUS: f64 = 3.0;
const CF_MAX_TERMS: usize = 20_000;

/// Error function of a complex argument.
///
/// Taylor series inside `|z| <= 3`, otherwise the Laplace continued fraction
/// for `erfc` in the right half plane (Lentz evaluation) with
/// `erf(-z) = -erf(z)` covering the left half. Accurate to about 1e-13 for
/// `|z| <= 3` and within `pi/4` of the real axis beyond, which covers the
/// diffraction arguments on the `-pi/4` ray.
pub fn complex_erf(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        return -complex_erf(-z);
    }
    if z.norm() <= TAYLOR_RADIUS {
        erf_series(z)
    } else {
        Complex64::new(1.0, 0.0) - erfc_continued_fraction(z)
    }
}

fn erf_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for k in 1..400 {
        term *= -z2 / k as f64;
        let add = term / (2 * k + 1) as f64;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * (2.0 / PI.sqrt())
}

/// `erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))`
fn erfc_continued_fraction(z: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let mut f = z;
    if f.norm() < tiny {
        f = Complex64::new(tiny, 0.0);
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..CF_MAX_TERMS {
        let a = k as f64 * 0.5;
        d = z + a * d;
        if d.norm() < tiny {
            d = Complex64::new(tiny, 0.0);
        }
        c = z + a / c;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (PI.sqrt() * f)
}

fn check_time(well: &WellConfig, t: f64) -> Result<f64> {
    let elapsed = t - well.t_measure();
    if !(elapsed.is_finite() && elapsed > 0.0) {
        return Err(Error::domain(format!(
            "free-space reference needs t > t_M, got t = {t}"
        )));
    }
    Ok(elapsed)
}

/// Free-space amplitude of the ideal slit at time `t`.
pub fn fresnel_amplitude(
    slit: &SlitAperture,
    well: &WellConfig,
    t: f64,
    y_samples: &[f64],
) -> Result<Vec<Complex64>> {
    let elapsed = check_time(well, t)?;
    let scale = 1.0 / (2.0 * well.hbar_over_m() * elapsed).sqrt();
    let w = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2) * scale;
    let pre = 0.5 / slit.width().sqrt();
    Ok(y_samples
        .iter()
        .map(|&y| {
            let u = y - slit.center();
            let hi = complex_erf(w * (u + 0.5 * slit.width()));
            let lo = complex_erf(w * (u - 0.5 * slit.width()));
            (hi - lo) * pre
        })
        .collect())
}

/// Free-space density of the ideal slit at time `t`.
pub fn fresnel_reference(
    slit: &SlitAperture,
    well: &WellConfig,
    t: f64,
    y_samples: &[f64],
) -> Result<Vec<f64>> {
    Ok(fresnel_amplitude(slit, well, t, y_samples)?
        .iter()
        .map(|a| a.norm_sqr())
        .collect())
}

/// Far-field shape `sinc^2(a (y - y0) / (2 (hbar/m) (t - t_M)))`, unit peak.
pub fn fraunhofer_envelope(
    slit: &SlitAperture,
    well: &WellConfig,
    t: f64,
    y_samples: &[f64],
) -> Result<Vec<f64>> {
    let elapsed = check_time(well, t)?;
    let k = slit.width() / (2.0 * well.hbar_over_m() * elapsed);
    Ok(y_samples
        .iter()
        .map(|&y| {
            let x = k * (y - slit.center());
            if x == 0.0 {
                1.0
            } else {
                let s = x.sin() / x;
                s * s
            }
        })
        .collect())
}

/// Latest time at which the free-space references still describe the
/// cavity: the distance from the slit to the nearer wall divided by the
/// speed `(hbar/m) N pi / L` of the highest retained mode.
pub fn free_space_window(slit: &SlitAperture, well: &WellConfig, truncation: usize) -> Result<f64> {
    if truncation == 0 {
        return Err(Error::validation("N", "truncation must be >= 1"));
    }
    slit.check_inside(well)?;
    let gap = (slit.lower() + well.half_length()).min(well.half_length() - slit.upper());
    let speed = well.hbar_over_m() * truncation as f64 * PI / well.length();
    Ok(well.t_measure() + gap / speed)
}
