//! Time-evolved wave function and density on position/time grids.
//!
//! A slice at elapsed fraction `tau` is
//! `Psi(y) = sum_n c_n sqrt(2/L) exp(-2 pi i n^2 tau) sin(n theta(y))`
//! with `theta = pi (y + L/2) / L`. The kernel evaluates `sin(n theta)` by
//! the recurrence `s_{n+1} = 2 cos(theta) s_n - s_{n-1}`, one sine/cosine
//! pair per point, reseeding from direct evaluation every
//! [`RESEED_INTERVAL`] terms. Terms are added in ascending `n` with a fixed
//! cascade (pairwise) association, so every point's value is independent of
//! how points are chunked or rows are distributed over workers.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, sin_cos_pi, sin_pi_scaled};
use crate::phase::{phase_factor, Tau, MAX_MODE};
use crate::spectral::{ModalCoefficients, WellConfig};

/// Terms between recurrence reseeds.
pub const RESEED_INTERVAL: usize = 4096;
const BLOCK: usize = 64;
const UNROLL: usize = 8;
const CHUNK: usize = 256;

/// Evaluation lattice: increasing positions inside the well and
/// nondecreasing times not before the measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeGrid {
    y: Vec<f64>,
    t: Vec<f64>,
}

impl SpaceTimeGrid {
    pub fn new(well: &WellConfig, y: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        if y.is_empty() || t.is_empty() {
            return Err(Error::validation("grid", "grid needs at least one position and one time"));
        }
        for &v in &y {
            well.check_position(v)?;
        }
        if y.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("y_points", "positions must be strictly increasing"));
        }
        if t.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::validation("t_points", "times must be nondecreasing"));
        }
        for &v in &t {
            well.tau_at(v)?;
        }
        Ok(SpaceTimeGrid { y, t })
    }

    /// `y_points` positions spanning the whole well and `t_points` times
    /// from `t_M` to `t_M + T` inclusive.
    pub fn over_period(well: &WellConfig, y_points: usize, t_points: usize) -> Result<Self> {
        let t = uniform_times(well, t_points, well.revival_time())?;
        Self::new(well, full_well_positions(well, y_points)?, t)
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }
}

/// `count` uniformly spaced positions from `-L/2` to `L/2`, exactly
/// antisymmetric about the centre.
pub fn full_well_positions(well: &WellConfig, count: usize) -> Result<Vec<f64>> {
    symmetric_positions(well.half_length(), count)
}

/// `count` uniformly spaced points on `[-half, half]` with `y[k] == -y[count-1-k]`.
pub fn symmetric_positions(half: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::validation("y_points", "need at least two positions"));
    }
    let denom = (count - 1) as f64;
    Ok((0..count)
        // the ratio first: it lies in [-1, 1], so the endpoints are exactly
        // +-half and no sample rounds outside the well
        .map(|k| half * (((2 * k) as f64 - denom) / denom))
        .collect())
}

/// `count` times from `t_M` to `t_M + span`; the endpoints are exact.
pub fn uniform_times(well: &WellConfig, count: usize, span: f64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::validation("t_points", "need at least one time"));
    }
    if !(span.is_finite() && span >= 0.0) {
        return Err(Error::validation("t_points", "time span must be finite and >= 0"));
    }
    let t0 = well.t_measure();
    if count == 1 {
        return Ok(vec![t0]);
    }
    let denom = (count - 1) as f64;
    Ok((0..count)
        .map(|r| t0 + span * (r as f64 / denom))
        .collect())
}

/// Complex amplitude over a set of positions at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSlice {
    pub y: Vec<f64>,
    pub amplitude: Vec<Complex64>,
    pub tau: Tau,
    /// Largest deviation between recurrence sines and direct sines seen at
    /// the reseed points (zero when no reseed was needed).
    pub recurrence_drift: f64,
}

impl WaveSlice {
    pub fn density(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `|Psi|^2` on a [`SpaceTimeGrid`], one row per time.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    values: Vec<f64>,
    grid: SpaceTimeGrid,
}

impl DensityField {
    pub fn from_rows(grid: SpaceTimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.y.len() * grid.t.len() {
            return Err(Error::validation("field", "value count does not match the grid"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::validation("field", "densities must be finite and >= 0"));
        }
        Ok(DensityField { values, grid })
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn rows(&self) -> usize {
        self.grid.t.len()
    }

    pub fn cols(&self) -> usize {
        self.grid.y.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let c = self.cols();
        &self.values[r * c..(r + 1) * c]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

fn check_modes(coeffs: &ModalCoefficients) -> Result<()> {
    if coeffs.len() > MAX_MODE {
        return Err(Error::domain(format!("truncation {} exceeds {MAX_MODE}", coeffs.len())));
    }
    Ok(())
}

/// `sqrt(2/L) c_n exp(-2 pi i n^2 tau)` for every mode.
pub(crate) fn mode_weights(coeffs: &ModalCoefficients, well: &WellConfig, tau: Tau) -> Vec<Complex64> {
    let norm = (2.0 / well.length()).sqrt();
    coeffs
        .iter()
        .map(|(n, c)| c * phase_factor(n, tau) * norm)
        .collect()
}

/// `Psi(y, t)` by direct per-term evaluation with pairwise accumulation.
pub fn amplitude_at(coeffs: &ModalCoefficients, well: &WellConfig, y: f64, t: f64) -> Result<Complex64> {
    well.check_position(y)?;
    let tau = well.tau_at(t)?;
    check_modes(coeffs)?;
    let weights = mode_weights(coeffs, well, tau);
    Ok(direct_sum(&weights, well.fraction(y)))
}

fn direct_sum(weights: &[Complex64], x: f64) -> Complex64 {
    let terms: Vec<Complex64> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * sin_pi_scaled((i + 1) as f64, x))
        .collect();
    pairwise_sum(&terms)
}

/// Slice at absolute time `t`.
pub fn density_slice(
    coeffs: &ModalCoefficients,
    well: &WellConfig,
    y_samples: &[f64],
    t: f64,
) -> Result<WaveSlice> {
    let tau = well.tau_at(t)?;
    density_slice_at(coeffs, well, y_samples, tau)
}

/// Slice at elapsed period fraction `tau`.
pub fn density_slice_at(
    coeffs: &ModalCoefficients,
    well: &WellConfig,
    y_samples: &[f64],
    tau: Tau,
) -> Result<WaveSlice> {
    check_modes(coeffs)?;
    let fractions = fractions(well, y_samples)?;
    let weights = mode_weights(coeffs, well, tau);
    let mut amplitude = vec![Complex64::new(0.0, 0.0); y_samples.len()];
    let drift = evaluate_series(&weights, &fractions, &mut amplitude);
    Ok(WaveSlice {
        y: y_samples.to_vec(),
        amplitude,
        tau,
        recurrence_drift: drift,
    })
}

/// Slice by direct per-term sines; the reference for the recurrence kernel.
pub fn density_slice_direct(
    coeffs: &ModalCoefficients,
    well: &WellConfig,
    y_samples: &[f64],
    tau: Tau,
) -> Result<WaveSlice> {
    check_modes(coeffs)?;
    let fractions = fractions(well, y_samples)?;
    let weights = mode_weights(coeffs, well, tau);
    let amplitude = fractions
        .par_iter()
        .map(|&x| direct_sum(&weights, x))
        .collect();
    Ok(WaveSlice {
        y: y_samples.to_vec(),
        amplitude,
        tau,
        recurrence_drift: 0.0,
    })
}

fn fractions(well: &WellConfig, y_samples: &[f64]) -> Result<Vec<f64>> {
    y_samples
        .iter()
        .map(|&y| {
            well.check_position(y)?;
            Ok(well.fraction(y))
        })
        .collect()
}

/// Density field over `grid`, rows evaluated in parallel on the global pool.
pub fn carpet(coeffs: &ModalCoefficients, well: &WellConfig, grid: &SpaceTimeGrid) -> Result<DensityField> {
    check_modes(coeffs)?;
    let fractions = fractions(well, &grid.y)?;
    let taus = grid
        .t
        .iter()
        .map(|&t| well.tau_at(t))
        .collect::<Result<Vec<_>>>()?;
    let cols = fractions.len();
    let mut values = vec![0.0; cols * taus.len()];
    values
        .par_chunks_mut(cols)
        .zip(taus.par_iter())
        .for_each(|(row, &tau)| {
            let weights = mode_weights(coeffs, well, tau);
            let mut amp = vec![Complex64::new(0.0, 0.0); cols];
            evaluate_series(&weights, &fractions, &mut amp);
            for (d, a) in row.iter_mut().zip(&amp) {
                *d = a.norm_sqr();
            }
        });
    DensityField::from_rows(grid.clone(), values)
}

/// [`carpet`] on a dedicated pool of `workers` threads. The result is
/// bit-identical for every worker count.
pub fn carpet_with_workers(
    coeffs: &ModalCoefficients,
    well: &WellConfig,
    grid: &SpaceTimeGrid,
    workers: usize,
) -> Result<DensityField> {
    if workers == 0 {
        return Err(Error::validation("workers", "need at least one worker"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::validation("workers", e.to_string()))?;
    pool.install(|| carpet(coeffs, well, grid))
}

/// Writes `sum_n weights[n-1] sin(n pi x)` for every fraction `x` into
/// `out`; returns the largest recurrence drift observed at reseeds.
pub(crate) fn evaluate_series(weights: &[Complex64], fractions: &[f64], out: &mut [Complex64]) -> f64 {
    let mut drift: f64 = 0.0;
    let mut scratch = Scratch::new(CHUNK);
    for (xs, dst) in fractions.chunks(CHUNK).zip(out.chunks_mut(CHUNK)) {
        drift = drift.max(scratch.run(weights, xs, dst));
    }
    drift
}

/// Per-chunk working arrays, reused across chunks.
struct Scratch {
    two_cos: Vec<f64>,
    prev: Vec<f64>,
    cur: Vec<f64>,
    block_re: Vec<f64>,
    block_im: Vec<f64>,
    cascade: ArrayCascade,
}

impl Scratch {
    fn new(cap: usize) -> Self {
        Scratch {
            two_cos: Vec::with_capacity(cap),
            prev: Vec::with_capacity(cap),
            cur: Vec::with_capacity(cap),
            block_re: Vec::with_capacity(cap),
            block_im: Vec::with_capacity(cap),
            cascade: ArrayCascade::default(),
        }
    }

    fn run(&mut self, weights: &[Complex64], xs: &[f64], out: &mut [Complex64]) -> f64 {
        let len = xs.len();
        self.two_cos.clear();
        self.two_cos.extend(xs.iter().map(|&x| 2.0 * sin_cos_pi(x).1));
        for v in [&mut self.prev, &mut self.cur, &mut self.block_re, &mut self.block_im] {
            v.clear();
            v.resize(len, 0.0);
        }
        self.cascade.reset(len);

        let total = weights.len();
        let mut drift: f64 = 0.0;
        let mut in_block = 0;
        let mut start = 0;
        while start < total {
            // seed s_start and s_{start+1}; compare against the recurrence state
            for (j, &x) in xs.iter().enumerate() {
                let s0 = sin_pi_scaled(start as f64, x);
                let s1 = sin_pi_scaled((start + 1) as f64, x);
                if start > 0 {
                    drift = drift.max((s0 - self.prev[j]).abs()).max((s1 - self.cur[j]).abs());
                }
                self.prev[j] = s0;
                self.cur[j] = s1;
            }
            let end = (start + RESEED_INTERVAL).min(total);
            let mut n = start;
            while n < end {
                if n + UNROLL <= end && in_block + UNROLL <= BLOCK {
                    let w: &[Complex64; UNROLL] = weights[n..n + UNROLL].try_into().unwrap();
                    accumulate(w, self);
                    n += UNROLL;
                    in_block += UNROLL;
                } else {
                    accumulate::<1>(&[weights[n]], self);
                    n += 1;
                    in_block += 1;
                }
                if in_block == BLOCK {
                    self.cascade.push(&mut self.block_re, &mut self.block_im);
                    in_block = 0;
                }
            }
            start = end;
        }
        self.cascade.finish(&self.block_re, &self.block_im, out);
        drift
    }
}

/// Adds `U` consecutive terms for every point of the chunk, advancing the
/// sine recurrence in registers.
#[inline(always)]
fn accumulate<const U: usize>(w: &[Complex64; U], s: &mut Scratch) {
    let it = s
        .two_cos
        .iter()
        .zip(s.prev.iter_mut())
        .zip(s.cur.iter_mut())
        .zip(s.block_re.iter_mut())
        .zip(s.block_im.iter_mut());
    for ((((&c2, prev), cur), re), im) in it {
        let (mut p, mut q, mut r, mut i) = (*prev, *cur, *re, *im);
        for wk in w {
            r += wk.re * q;
            i += wk.im * q;
            let next = c2 * q - p;
            p = q;
            q = next;
        }
        *prev = p;
        *cur = q;
        *re = r;
        *im = i;
    }
}

/// Binary-counter pairwise merge of per-point block sums.
#[derive(Default)]
struct ArrayCascade {
    levels: Vec<Option<(Vec<f64>, Vec<f64>)>>,
    spare: Vec<(Vec<f64>, Vec<f64>)>,
    len: usize,
}

impl ArrayCascade {
    fn reset(&mut self, len: usize) {
        self.len = len;
        for slot in self.levels.iter_mut() {
            if let Some(pair) = slot.take() {
                self.spare.push(pair);
            }
        }
    }

    fn take_spare(&mut self) -> (Vec<f64>, Vec<f64>) {
        let (mut re, mut im) = self.spare.pop().unwrap_or_default();
        re.clear();
        re.resize(self.len, 0.0);
        im.clear();
        im.resize(self.len, 0.0);
        (re, im)
    }

    /// Moves the block sums into the cascade and zeroes the block.
    fn push(&mut self, block_re: &mut Vec<f64>, block_im: &mut Vec<f64>) {
        let (mut re, mut im) = self.take_spare();
        std::mem::swap(&mut re, block_re);
        std::mem::swap(&mut im, block_im);
        for slot in self.levels.iter_mut() {
            match slot.take() {
                Some((pre, pim)) => {
                    for (v, p) in re.iter_mut().zip(&pre) {
                        *v = *p + *v;
                    }
                    for (v, p) in im.iter_mut().zip(&pim) {
                        *v = *p + *v;
                    }
                    self.spare.push((pre, pim));
                }
                None => {
                    *slot = Some((re, im));
                    return;
                }
            }
        }
        self.levels.push(Some((re, im)));
    }

    fn finish(&self, block_re: &[f64], block_im: &[f64], out: &mut [Complex64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let mut re = block_re[j];
            let mut im = block_im[j];
            for (lre, lim) in self.levels.iter().flatten() {
                re = lre[j] + re;
                im = lim[j] + im;
            }
            *o = Complex64::new(re, im);
        }
    }
}
