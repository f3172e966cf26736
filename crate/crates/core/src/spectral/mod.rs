//! Infinite-well eigenbasis and collapse-state expansion coefficients.
//!
//! The well occupies `[-L/2, L/2]`. Eigenfunctions are
//! `u_n(y) = sqrt(2/L) sin(n pi (y + L/2) / L)` for `n >= 1`, normalised so
//! the family is orthonormal, and `E_n / hbar = n^2 pi^2 (hbar/m) / (2 L^2)`.

mod coefficients;
pub mod quadrature;

pub use coefficients::{
    coefficients_by_quadrature, parseval_deficit, slit_coefficients, CollapseProfile,
    GeneralProfile, ModalCoefficients,
};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{sin_pi_scaled, DoubleF64};
use crate::phase::Tau;

/// Cavity geometry, mass scale and the instant of the position measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellConfig {
    length: f64,
    hbar_over_m: f64,
    t_measure: f64,
}

impl WellConfig {
    pub fn new(length: f64, hbar_over_m: f64, t_measure: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::validation("L", format!("must be finite and > 0, got {length}")));
        }
        if !(hbar_over_m.is_finite() && hbar_over_m > 0.0) {
            return Err(Error::validation(
                "hbar_over_m",
                format!("must be finite and > 0, got {hbar_over_m}"),
            ));
        }
        if !t_measure.is_finite() {
            return Err(Error::validation("t_measure", "must be finite"));
        }
        Ok(WellConfig {
            length,
            hbar_over_m,
            t_measure,
        })
    }

    /// Natural units: `hbar/m = 1`, measurement at `t = 0`.
    pub fn natural(length: f64) -> Result<Self> {
        Self::new(length, 1.0, 0.0)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn hbar_over_m(&self) -> f64 {
        self.hbar_over_m
    }

    pub fn t_measure(&self) -> f64 {
        self.t_measure
    }

    pub fn half_length(&self) -> f64 {
        0.5 * self.length
    }

    /// `T = 4 L^2 / (pi hbar/m)`; every mode phase is a multiple of 2 pi at `t_M + T`.
    pub fn revival_time(&self) -> f64 {
        4.0 * self.length * self.length / (PI * self.hbar_over_m)
    }

    pub fn contains(&self, y: f64) -> bool {
        y >= -self.half_length() && y <= self.half_length()
    }

    /// Position as a fraction of the well, `(y + L/2) / L`, in `[0, 1]`.
    pub fn fraction(&self, y: f64) -> f64 {
        (y + self.half_length()) / self.length
    }

    pub(crate) fn check_position(&self, y: f64) -> Result<()> {
        if self.contains(y) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "position {y} outside the well [-{h}, {h}]",
                h = self.half_length()
            )))
        }
    }

    /// Elapsed period fraction `(t - t_M) / T`.
    ///
    /// The difference `t - t_M` is taken exactly and divided by the f64
    /// value returned from [`revival_time`](Self::revival_time), so
    /// `tau_at(t_M + revival_time())` is one whenever that sum is exact.
    pub fn tau_at(&self, t: f64) -> Result<Tau> {
        if !t.is_finite() {
            return Err(Error::domain(format!("non-finite time {t}")));
        }
        if t < self.t_measure {
            return Err(Error::domain(format!(
                "time {t} precedes the measurement at {}",
                self.t_measure
            )));
        }
        Tau::from_double(DoubleF64::diff(t, self.t_measure).div_f64(self.revival_time()))
    }

    /// Absolute time at elapsed period fraction `tau`.
    pub fn time_at(&self, tau: Tau) -> f64 {
        let elapsed = tau.as_double().mul_f64(self.revival_time());
        (DoubleF64::new(self.t_measure, 0.0) + elapsed).to_f64()
    }
}

/// Rectangular collapse window `[y0 - a/2, y0 + a/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitAperture {
    center: f64,
    width: f64,
}

impl SlitAperture {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::validation("y0", "must be finite"));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::validation("a", format!("slit width must be > 0, got {width}")));
        }
        Ok(SlitAperture { center, width })
    }

    /// Aperture checked against the walls of `well`.
    pub fn within(center: f64, width: f64, well: &WellConfig) -> Result<Self> {
        let slit = Self::new(center, width)?;
        slit.check_inside(well)?;
        Ok(slit)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn lower(&self) -> f64 {
        self.center - 0.5 * self.width
    }

    pub fn upper(&self) -> f64 {
        self.center + 0.5 * self.width
    }

    /// Window may touch a wall but not cross it.
    pub fn check_inside(&self, well: &WellConfig) -> Result<()> {
        let h = well.half_length();
        if self.lower() < -h || self.upper() > h {
            return Err(Error::validation(
                "y0",
                format!(
                    "slit window [{}, {}] extends outside the well [-{h}, {h}]",
                    self.lower(),
                    self.upper()
                ),
            ));
        }
        Ok(())
    }
}

/// `u_n(y)`; exactly zero at both walls.
pub fn eigenfunction(n: usize, y: f64, well: &WellConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("mode index starts at 1"));
    }
    well.check_position(y)?;
    Ok(eigenfunction_unchecked(n, well.fraction(y), well))
}

#[inline]
pub(crate) fn eigenfunction_unchecked(n: usize, fraction: f64, well: &WellConfig) -> f64 {
    (2.0 / well.length).sqrt() * sin_pi_scaled(n as f64, fraction)
}

/// `E_n / hbar`, in units of inverse time.
pub fn eigenenergy(n: usize, well: &WellConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("mode index starts at 1"));
    }
    let n = n as f64;
    Ok(n * n * PI * PI * well.hbar_over_m / (2.0 * well.length * well.length))
}
