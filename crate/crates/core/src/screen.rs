//! Slit-to-screen geometry.
//!
//! The particle moves freely along `x` with `v_x = (hbar/m) k_x` while the
//! transverse state evolves in the well, so a screen at distance `D` records
//! the slice at `t = t_M + D / v_x`. The longitudinal plane-wave factor has
//! unit modulus and never reaches the density, so only `v_x` is kept.

use crate::error::{Error, Result};
use crate::propagator::density_slice;
use crate::spectral::{ModalCoefficients, WellConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamConfig {
    k_x: f64,
    v_x: f64,
}

impl BeamConfig {
    pub fn new(k_x: f64, well: &WellConfig) -> Result<Self> {
        if !(k_x.is_finite() && k_x > 0.0) {
            return Err(Error::validation("k_x", format!("must be finite and > 0, got {k_x}")));
        }
        Ok(BeamConfig {
            k_x,
            v_x: well.hbar_over_m() * k_x,
        })
    }

    pub fn k_x(&self) -> f64 {
        self.k_x
    }

    pub fn v_x(&self) -> f64 {
        self.v_x
    }

    /// Arrival time at a screen `distance` from the slit.
    pub fn time_of_flight(&self, distance: f64, well: &WellConfig) -> Result<f64> {
        if !(distance.is_finite() && distance >= 0.0) {
            return Err(Error::domain(format!("screen distance must be >= 0, got {distance}")));
        }
        Ok(well.t_measure() + distance / self.v_x)
    }

    /// Screen distance reached at time `t`, inverse of
    /// [`time_of_flight`](Self::time_of_flight).
    ///
    /// Among the doubles adjacent to `(t - t_M) v_x`, returns the one that
    /// maps back to `t` and is nearest the exact product.
    pub fn distance_of_time(&self, t: f64, well: &WellConfig) -> Result<f64> {
        if !t.is_finite() || t < well.t_measure() {
            return Err(Error::domain(format!("time {t} precedes the measurement")));
        }
        let elapsed = crate::numeric::DoubleF64::diff(t, well.t_measure()).mul_f64(self.v_x);
        let guess = elapsed.to_f64();
        let mut best = guess;
        let mut best_err = f64::INFINITY;
        for cand in [guess, next_down(guess), next_up(guess)] {
            if cand < 0.0 {
                continue;
            }
            if self.time_of_flight(cand, well)? == t {
                let err = (cand - elapsed.hi - elapsed.lo).abs();
                if err < best_err {
                    best = cand;
                    best_err = err;
                }
            }
        }
        Ok(best)
    }

    /// Distance over which the screen pattern repeats: `v_x T = 4 k_x L^2 / pi`.
    ///
    /// With `L = 1` and `hbar/m` restored this is `4 hbar k_x / (pi m)`.
    pub fn revival_distance(&self, well: &WellConfig) -> f64 {
        self.v_x * well.revival_time()
    }
}

fn next_up(x: f64) -> f64 {
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

/// Density on a screen at `distance`; the same evaluation as
/// [`density_slice`] at the time of flight.
pub fn screen_pattern(
    coeffs: &ModalCoefficients,
    well: &WellConfig,
    beam: &BeamConfig,
    y_samples: &[f64],
    distance: f64,
) -> Result<Vec<f64>> {
    let t = beam.time_of_flight(distance, well)?;
    Ok(density_slice(coeffs, well, y_samples, t)?.density())
}
