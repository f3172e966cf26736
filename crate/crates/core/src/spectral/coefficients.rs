use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::quadrature::adaptive_panels;
use super::{eigenfunction_unchecked, SlitAperture, WellConfig};
use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, sin_pi_scaled};

/// Expansion coefficients `c_1..c_N` of a collapsed state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalCoefficients {
    values: Vec<Complex64>,
}

impl ModalCoefficients {
    const PARSEVAL_SLACK: f64 = 1e-12;

    /// Wraps `values[n - 1] = c_n`, enforcing the Parseval bound.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("N", "at least one mode is required"));
        }
        if values.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::validation("coefficients", "non-finite coefficient"));
        }
        let coeffs = ModalCoefficients { values };
        let norm = coeffs.norm_squared();
        if norm > 1.0 + Self::PARSEVAL_SLACK {
            return Err(Error::validation(
                "coefficients",
                format!("sum of |c_n|^2 = {norm} exceeds 1"),
            ));
        }
        Ok(coeffs)
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// A single eigenstate `u_n` truncated at `truncation` modes.
    pub fn eigenstate(n: usize, truncation: usize) -> Result<Self> {
        if n == 0 || n > truncation {
            return Err(Error::domain(format!("mode {n} outside 1..={truncation}")));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); truncation];
        values[n - 1] = Complex64::new(1.0, 0.0);
        Self::new(values)
    }

    /// Truncation order `N`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `c_n` for `1 <= n <= N`.
    pub fn get(&self, n: usize) -> Option<Complex64> {
        n.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }

    /// `(n, c_n)` in ascending `n`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.values.iter().enumerate().map(|(i, &c)| (i + 1, c))
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|c| c.im == 0.0)
    }

    /// `sum |c_n|^2`, accumulated pairwise.
    pub fn norm_squared(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|c| c.norm_sqr()).collect();
        pairwise_sum(&sq)
    }

    /// Partial sums of `|c_n|^2` for every prefix.
    pub fn partial_norms(&self) -> Vec<f64> {
        self.values
            .iter()
            .scan(0.0, |acc, c| {
                *acc += c.norm_sqr();
                Some(*acc)
            })
            .collect()
    }

    /// The first `n` coefficients.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::domain(format!("truncation {n} outside 1..={}", self.len())));
        }
        Ok(ModalCoefficients {
            values: self.values[..n].to_vec(),
        })
    }
}

/// A general pre-collapse profile on `[lower, upper]`.
#[derive(Clone)]
pub struct GeneralProfile {
    lower: f64,
    upper: f64,
    amplitude: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
}

impl GeneralProfile {
    pub fn new<F>(lower: f64, upper: f64, amplitude: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::validation(
                "support",
                format!("invalid support [{lower}, {upper}]"),
            ));
        }
        Ok(GeneralProfile {
            lower,
            upper,
            amplitude: Arc::new(amplitude),
        })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        (self.amplitude)(y)
    }
}

impl fmt::Debug for GeneralProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralProfile")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish_non_exhaustive()
    }
}

/// Wave function immediately after the collapse.
#[derive(Debug, Clone)]
pub enum CollapseProfile {
    /// `1/sqrt(a)` on the slit window, zero elsewhere.
    Rectangular(SlitAperture),
    General(GeneralProfile),
}

impl CollapseProfile {
    pub fn support(&self) -> (f64, f64) {
        match self {
            CollapseProfile::Rectangular(s) => (s.lower(), s.upper()),
            CollapseProfile::General(g) => g.support(),
        }
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        match self {
            CollapseProfile::Rectangular(s) => {
                if y >= s.lower() && y <= s.upper() {
                    Complex64::new(s.width().sqrt().recip(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            CollapseProfile::General(g) => g.eval(y),
        }
    }

    /// `integral |profile|^2` over the support.
    pub fn norm_squared(&self) -> f64 {
        let (lo, hi) = self.support();
        let f = |y: f64| Complex64::new(self.eval(y).norm_sqr(), 0.0);
        adaptive_panels(&f, lo, hi, 16, 16, 1e-15).re
    }
}

/// Closed-form coefficients of the rectangular collapse.
///
/// `c_n = sqrt(2/(a L)) (2L/(n pi)) sin(n pi a/(2L)) sin(n pi (y0 + L/2)/L)`,
/// the window integral of `u_n` written as a product of sines. Both sine
/// arguments are reduced in units of pi from exact products, so small `a/L`
/// does not cancel.
pub fn slit_coefficients(
    well: &WellConfig,
    slit: &SlitAperture,
    truncation: usize,
) -> Result<ModalCoefficients> {
    if truncation == 0 {
        return Err(Error::validation("N", "truncation order must be >= 1"));
    }
    slit.check_inside(well)?;
    let l = well.length();
    let a = slit.width();
    let half_width = a / (2.0 * l);
    let center = well.fraction(slit.center());
    let prefactor = (2.0 / (a * l)).sqrt() * 2.0 * l / std::f64::consts::PI;
    let values = (1..=truncation)
        .map(|n| {
            let nf = n as f64;
            let c = prefactor / nf * sin_pi_scaled(nf, half_width) * sin_pi_scaled(nf, center);
            Complex64::new(c, 0.0)
        })
        .collect();
    ModalCoefficients::new(values)
}

/// Coefficients `c_n = integral profile(y) u_n(y) dy` by adaptive
/// Gauss-Legendre panels; an independent route to [`slit_coefficients`].
///
/// Mode `n` gets `ceil(n w / L)` panels (`w` the support width) carrying
/// `max(4, ceil(8 n w / L))` nodes in total, so every oscillation of `u_n`
/// sees at least eight nodes before adaptive bisection.
pub fn coefficients_by_quadrature(
    well: &WellConfig,
    profile: &CollapseProfile,
    truncation: usize,
) -> Result<ModalCoefficients> {
    if truncation == 0 {
        return Err(Error::validation("N", "truncation order must be >= 1"));
    }
    let (lo, hi) = profile.support();
    if let CollapseProfile::Rectangular(slit) = profile {
        slit.check_inside(well)?;
    } else if !(well.contains(lo) && well.contains(hi)) {
        return Err(Error::validation(
            "support",
            format!("profile support [{lo}, {hi}] extends outside the well"),
        ));
    }
    let norm = profile.norm_squared();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::validation(
            "profile",
            format!("profile is not normalised: integral |psi|^2 = {norm}"),
        ));
    }
    let l = well.length();
    let span = (hi - lo) / l;
    let values = (1..=truncation)
        .map(|n| {
            let cycles = n as f64 * span;
            let panels = cycles.ceil().max(1.0) as usize;
            let nodes = (8.0 * cycles).ceil().max(4.0) as usize;
            let order = nodes.div_ceil(panels).max(4);
            let integrand = |y: f64| profile.eval(y) * eigenfunction_unchecked(n, well.fraction(y), well);
            adaptive_panels(&integrand, lo, hi, panels, order, 1e-15)
        })
        .collect();
    ModalCoefficients::new(values)
}

/// `1 - sum |c_n|^2`: probability lost to truncation.
pub fn parseval_deficit(coeffs: &ModalCoefficients) -> f64 {
    1.0 - coeffs.norm_squared()
}
