//! Mode phases reduced modulo one revival period.
//!
//! Mode `n` advances by `E_n T / hbar = 2 pi n^2` over one revival period
//! `T`, so the phase at elapsed fraction `tau = (t - t_M) / T` is
//! `2 pi frac(n^2 tau)`. The product `n^2 tau` is formed without rounding
//! and `tau` itself is carried as a double-double, which keeps the reduced
//! phase accurate when `n^2 tau` reaches 1e10 and makes rational fractions of
//! the period (T, T/2, T/4, ...) land on exact phases.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{sin_cos_pi, two_prod, DoubleF64};

/// Largest mode index whose square is exactly representable in f64.
pub const MAX_MODE: usize = 94_906_265;

/// Elapsed time since the measurement in units of the revival period.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tau(DoubleF64);

impl Tau {
    pub const ZERO: Tau = Tau(DoubleF64 { hi: 0.0, lo: 0.0 });
    pub const ONE: Tau = Tau(DoubleF64 { hi: 1.0, lo: 0.0 });

    pub fn new(fraction: f64) -> Result<Self> {
        Self::from_double(DoubleF64 {
            hi: fraction,
            lo: 0.0,
        })
    }

    /// `p / q` of a period, carried to double-double precision.
    pub fn ratio(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("period fraction with zero denominator"));
        }
        if p >= 1 << 53 || q >= 1 << 53 {
            return Err(Error::domain("period fraction terms exceed 2^53"));
        }
        Ok(Tau(DoubleF64::ratio(p as i64, q as i64)))
    }

    pub fn from_double(value: DoubleF64) -> Result<Self> {
        if !value.hi.is_finite() || !value.lo.is_finite() {
            return Err(Error::domain(format!("non-finite period fraction {}", value.hi)));
        }
        if value.hi < 0.0 || (value.hi == 0.0 && value.lo < 0.0) {
            return Err(Error::domain(format!(
                "negative elapsed time (tau = {:e})",
                value.to_f64()
            )));
        }
        Ok(Tau(value))
    }

    pub fn value(self) -> f64 {
        self.0.to_f64()
    }

    pub fn as_double(self) -> DoubleF64 {
        self.0
    }
}

/// Fraction of a turn in `[0, 1)` accumulated by mode `n`.
#[inline]
pub(crate) fn phase_turns(n: usize, tau: Tau) -> f64 {
    let n2 = (n as f64) * (n as f64);
    let (p, e) = two_prod(n2, tau.0.hi);
    let frac = p - p.floor();
    let f = frac + (e + n2 * tau.0.lo);
    let f = f - f.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `exp(-i E_n (t - t_M) / hbar)` for mode `n`.
#[inline]
pub(crate) fn phase_factor(n: usize, tau: Tau) -> Complex64 {
    let (s, c) = sin_cos_pi(2.0 * phase_turns(n, tau));
    Complex64::new(c, -s)
}

/// Phase of mode `n` after elapsed fraction `tau`, in radians within `[0, 2 pi)`.
pub fn reduced_phase(n: usize, tau: Tau) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("mode index starts at 1"));
    }
    if n > MAX_MODE {
        return Err(Error::domain(format!(
            "mode {n} exceeds {MAX_MODE}; n^2 is not exact in f64"
        )));
    }
    let r = std::f64::consts::TAU * phase_turns(n, tau);
    Ok(if r >= std::f64::consts::TAU { 0.0 } else { r })
}
