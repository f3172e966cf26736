//! Crank-Nicolson evolution on a Dirichlet lattice.
//!
//! The lattice has `M` interior points `y_k = -L/2 + k h`, `k = 1..=M`, with
//! `h = L / (M + 1)` and zero amplitude at both walls. The Hamiltonian is the
//! three-point Laplacian times `-(hbar/m)/2`; each step solves
//! `(1 + i dt H/2) psi' = (1 - i dt H/2) psi` with a precomputed tridiagonal
//! factorisation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::Tau;
use crate::propagator::density_slice_at;
use crate::spectral::{ModalCoefficients, WellConfig};

/// Smallest lattice accepted by [`crank_nicolson_evolve`].
pub const MIN_POINTS: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    amplitude: Vec<Complex64>,
    length: f64,
    /// Highest mode present in the sampled state, when known.
    max_mode: Option<usize>,
}

impl LatticeState {
    pub fn new(well: &WellConfig, amplitude: Vec<Complex64>, max_mode: Option<usize>) -> Result<Self> {
        if amplitude.is_empty() {
            return Err(Error::validation("M", "lattice needs at least one interior point"));
        }
        if amplitude.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::validation("lattice", "amplitudes must be finite"));
        }
        Ok(LatticeState {
            amplitude,
            length: well.length(),
            max_mode,
        })
    }

    /// Samples the truncated spectral state at `t_M` on `points` interior
    /// lattice sites.
    pub fn from_spectral(coeffs: &ModalCoefficients, well: &WellConfig, points: usize) -> Result<Self> {
        let y = interior_positions(well, points)?;
        let slice = density_slice_at(coeffs, well, &y, Tau::ZERO)?;
        Self::new(well, slice.amplitude, Some(coeffs.len()))
    }

    pub fn points(&self) -> usize {
        self.amplitude.len()
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.amplitude.len() + 1) as f64
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.max_mode
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn positions(&self) -> Vec<f64> {
        let h = self.spacing();
        let half = 0.5 * self.length;
        (1..=self.points()).map(|k| -half + k as f64 * h).collect()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Discrete norm `h sum |psi_k|^2`.
    pub fn norm(&self) -> f64 {
        let sq: Vec<f64> = self.density();
        self.spacing() * crate::numeric::pairwise_sum(&sq)
    }
}

/// The `points` interior lattice sites of `well`.
pub fn interior_positions(well: &WellConfig, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::validation("M", "lattice needs at least one interior point"));
    }
    let h = well.length() / (points + 1) as f64;
    let half = well.half_length();
    Ok((1..=points).map(|k| -half + k as f64 * h).collect())
}

/// Reusable stepper for one lattice size and time step.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    dt: f64,
    /// `i dt (hbar/m) / (4 h^2)`
    r: Complex64,
    upper: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
    rhs: Vec<Complex64>,
}

impl CrankNicolson {
    pub fn new(well: &WellConfig, points: usize, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::validation("dt", format!("time step must be > 0, got {dt}")));
        }
        if points < 2 {
            return Err(Error::validation("M", "lattice needs at least two interior points"));
        }
        let h = well.length() / (points + 1) as f64;
        let r = Complex64::new(0.0, dt * well.hbar_over_m() / (4.0 * h * h));
        // Thomas factorisation of tridiag(-r, 1 + 2r, -r)
        let diag = Complex64::new(1.0, 0.0) + 2.0 * r;
        let mut upper = vec![Complex64::new(0.0, 0.0); points];
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); points];
        let mut prev_upper = Complex64::new(0.0, 0.0);
        for k in 0..points {
            let pivot = diag + r * prev_upper;
            inv_pivot[k] = pivot.inv();
            upper[k] = -r * inv_pivot[k];
            prev_upper = upper[k];
        }
        Ok(CrankNicolson {
            dt,
            r,
            upper,
            inv_pivot,
            rhs: vec![Complex64::new(0.0, 0.0); points],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `psi` by one step in place.
    pub fn step(&mut self, psi: &mut [Complex64]) {
        let m = psi.len();
        assert_eq!(m, self.upper.len(), "lattice size changed between steps");
        let r = self.r;
        let centre = Complex64::new(1.0, 0.0) - 2.0 * r;
        let zero = Complex64::new(0.0, 0.0);
        for k in 0..m {
            let left = if k > 0 { psi[k - 1] } else { zero };
            let right = if k + 1 < m { psi[k + 1] } else { zero };
            self.rhs[k] = centre * psi[k] + r * (left + right);
        }
        // forward sweep: the sub-diagonal is -r
        let mut carry = zero;
        for k in 0..m {
            carry = (self.rhs[k] + r * carry) * self.inv_pivot[k];
            self.rhs[k] = carry;
        }
        psi[m - 1] = self.rhs[m - 1];
        for k in (0..m - 1).rev() {
            psi[k] = self.rhs[k] - self.upper[k] * psi[k + 1];
        }
    }
}

/// Evolves `initial` by `steps` Crank-Nicolson steps of size `dt`.
///
/// Rejects lattices coarser than [`MIN_POINTS`] and states whose highest
/// mode `N` the lattice cannot represent (`N pi / L >= pi / h`).
pub fn crank_nicolson_evolve(
    initial: &LatticeState,
    well: &WellConfig,
    dt: f64,
    steps: usize,
) -> Result<LatticeState> {
    let m = initial.points();
    if m < MIN_POINTS {
        return Err(Error::validation(
            "M",
            format!("lattice of {m} points is below the minimum {MIN_POINTS}"),
        ));
    }
    if initial.length != well.length() {
        return Err(Error::validation("L", "lattice and well lengths differ"));
    }
    if let Some(n) = initial.max_mode {
        if n >= m + 1 {
            return Err(Error::validation(
                "M",
                format!("mode {n} is not resolved by {m} lattice points; use M >= {n}"),
            ));
        }
    }
    let mut stepper = CrankNicolson::new(well, m, dt)?;
    let mut psi = initial.amplitude.clone();
    for _ in 0..steps {
        stepper.step(&mut psi);
    }
    Ok(LatticeState {
        amplitude: psi,
        length: initial.length,
        max_mode: initial.max_mode,
    })
}
