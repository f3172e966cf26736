//! Revival detection.
//!
//! At `tau = p/q` the mode phases `exp(-2 pi i n^2 p/q)` repeat with period
//! `q` in `n`, so the state is a finite superposition of shifted copies of
//! the collapse state:
//! `Psi(theta, p/q) = sum_k b_k Psi_0(theta + 2 pi k / q)` with Gauss-sum
//! weights `b_k`. Copies with nonzero weight that do not overlap reproduce
//! the density as `sum_k |b_k|^2 |Psi_0(theta + 2 pi k/q)|^2`; that
//! incoherent sum is the copy template used for fractional hits.
//!
//! Grid scans alone cannot find revivals of many-mode states: the distance
//! dips below threshold only within about `1/N^2` of the exact time. The
//! scan therefore also evaluates every rational `p/q` in range with small
//! `q`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{l2_density_distance, REVIVAL_THRESHOLD};
use crate::error::{Error, Result};
use crate::numeric::{sin_cos_pi, DoubleF64};
use crate::phase::Tau;
use crate::propagator::{density_slice_at, evaluate_series, mode_weights};
use crate::spectral::{ModalCoefficients, WellConfig};

/// Golden-section stopping width, in periods.
const REFINE_TOL: f64 = 1e-6;
/// Grid points allowed in one scan.
const MAX_SCAN_POINTS: usize = 1_000_000;
/// Weights below this are treated as absent copies.
const WEIGHT_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevivalClass {
    Full,
    Mirror,
    Fractional { copies: usize },
}

impl std::fmt::Display for RevivalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RevivalClass::Full => write!(f, "full"),
            RevivalClass::Mirror => write!(f, "mirror"),
            RevivalClass::Fractional { copies } => write!(f, "fractional:{copies}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevivalHit {
    /// Best-matching time.
    pub time: f64,
    pub metric: f64,
    pub class: RevivalClass,
    /// First and last scanned times below threshold around this hit; equal
    /// to `(time, time)` for isolated hits.
    pub span: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevivalReport {
    pub hits: Vec<RevivalHit>,
    pub t_range: (f64, f64),
    pub threshold: f64,
}

impl RevivalReport {
    pub fn of_class(&self, pred: impl Fn(&RevivalClass) -> bool) -> Vec<&RevivalHit> {
        self.hits.iter().filter(|h| pred(&h.class)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub threshold: f64,
    /// Rational candidates `p/q` with `q` up to this are always checked for
    /// full and mirror revivals.
    pub max_denominator: u64,
    /// When set, rationals with `3 <= q <=` this are matched against the
    /// copy template.
    pub fractional: Option<u64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            threshold: REVIVAL_THRESHOLD,
            max_denominator: 12,
            fractional: None,
        }
    }
}

/// Scans `[t_range.0, t_range.1]` in steps of `step` for full and mirror
/// revivals below `threshold`.
pub fn revival_scan(
    coeffs: &ModalCoefficients,
    well: &WellConfig,
    y: &[f64],
    t_range: (f64, f64),
    step: f64,
    threshold: f64,
) -> Result<RevivalReport> {
    let opts = ScanOptions {
        threshold,
        ..ScanOptions::default()
    };
    revival_scan_with(coeffs, well, y, t_range, step, &opts)
}

struct Scanner<'a> {
    coeffs: &'a ModalCoefficients,
    well: &'a WellConfig,
    y: &'a [f64],
    full_ref: Vec<f64>,
    mirror_ref: Vec<f64>,
}

impl Scanner<'_> {
    /// (full, mirror) distances at `tau`.
    fn metrics(&self, tau: Tau) -> Result<(f64, f64)> {
        let d = density_slice_at(self.coeffs, self.well, self.y, tau)?.density();
        Ok((
            l2_density_distance(&d, &self.full_ref)?,
            l2_density_distance(&d, &self.mirror_ref)?,
        ))
    }

    fn metric(&self, tau: Tau, mirror: bool) -> Result<f64> {
        let (f, m) = self.metrics(tau)?;
        Ok(if mirror { m } else { f })
    }

    /// Golden-section search for the smallest metric on `[lo, hi]`.
    fn golden(&self, lo: f64, hi: f64, mirror: bool) -> Result<(f64, f64)> {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let mut fc = self.metric(Tau::new(c)?, mirror)?;
        let mut fd = self.metric(Tau::new(d)?, mirror)?;
        while b - a > REFINE_TOL {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.metric(Tau::new(c)?, mirror)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.metric(Tau::new(d)?, mirror)?;
            }
        }
        Ok(if fc <= fd { (c, fc) } else { (d, fd) })
    }
}

/// Reduced fractions `p/q` with `q <= max_q` and `lo <= p/q <= hi`.
fn rationals(lo: f64, hi: f64, min_q: u64, max_q: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for q in min_q.max(1)..=max_q {
        let first = (lo * q as f64 - 1e-9).ceil().max(0.0) as u64;
        let last = (hi * q as f64 + 1e-9).floor().max(0.0) as u64;
        for p in first..=last {
            let v = p as f64 / q as f64;
            if v >= lo - 1e-12 && v <= hi + 1e-12 && gcd(p, q) == 1 {
                out.push((p, q));
            }
        }
    }
    out.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    out
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Scan with explicit [`ScanOptions`].
///
/// Grid points below threshold are grouped into contiguous runs; each run
/// yields one hit, placed at the best of a golden-section refinement within
/// the run's bracket and any rational candidate inside it. Rational
/// candidates outside every run are reported on their own. At a time where
/// both metrics pass, the full class wins.
pub fn revival_scan_with(
    coeffs: &ModalCoefficients,
    well: &WellConfig,
    y: &[f64],
    t_range: (f64, f64),
    step: f64,
    opts: &ScanOptions,
) -> Result<RevivalReport> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::validation("step", format!("scan step must be > 0, got {step}")));
    }
    if !(opts.threshold.is_finite() && opts.threshold > 0.0) {
        return Err(Error::validation("threshold", "threshold must be > 0"));
    }
    let (t0, t1) = t_range;
    if !(t1 >= t0) {
        return Err(Error::validation("t_range", "range end precedes its start"));
    }
    let tau_lo = well.tau_at(t0)?;
    let tau_hi = well.tau_at(t1)?;
    let dtau = step / well.revival_time();
    let span = tau_hi.value() - tau_lo.value();
    let count = (span / dtau).floor() as usize + 1;
    if count > MAX_SCAN_POINTS {
        return Err(Error::validation(
            "step",
            format!("{count} scan points exceed the limit {MAX_SCAN_POINTS}"),
        ));
    }

    let mirror_y: Vec<f64> = y.iter().map(|v| -v).collect();
    let scanner = Scanner {
        coeffs,
        well,
        y,
        full_ref: density_slice_at(coeffs, well, y, Tau::ZERO)?.density(),
        mirror_ref: density_slice_at(coeffs, well, &mirror_y, Tau::ZERO)?.density(),
    };

    let grid: Vec<Tau> = (0..count)
        .map(|j| Tau::from_double(tau_lo.as_double() + DoubleF64::new(j as f64, 0.0).mul_f64(dtau)))
        .collect::<Result<_>>()?;
    let grid_metrics: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&tau| scanner.metrics(tau))
        .collect::<Result<_>>()?;

    let cands = rationals(tau_lo.value(), tau_hi.value(), 1, opts.max_denominator);
    let cand_taus: Vec<Tau> = cands
        .iter()
        .map(|&(p, q)| Tau::ratio(p, q))
        .collect::<Result<_>>()?;
    let cand_metrics: Vec<(f64, f64)> = cand_taus
        .par_iter()
        .map(|&tau| scanner.metrics(tau))
        .collect::<Result<_>>()?;

    let to_time_exact = |tau: Tau| well.time_at(tau).clamp(t0, t1);

    let mut hits: Vec<(RevivalHit, (f64, f64))> = Vec::new();
    for mirror in [false, true] {
        let pick = |m: &(f64, f64)| if mirror { m.1 } else { m.0 };
        let class = if mirror { RevivalClass::Mirror } else { RevivalClass::Full };
        let mut covered: Vec<(f64, f64)> = Vec::new();
        let mut j = 0;
        while j < count {
            if pick(&grid_metrics[j]) >= opts.threshold {
                j += 1;
                continue;
            }
            let first = j;
            while j + 1 < count && pick(&grid_metrics[j + 1]) < opts.threshold {
                j += 1;
            }
            let last = j;
            j += 1;
            let lo = if first > 0 { grid[first - 1].value() } else { tau_lo.value() };
            let hi = if last + 1 < count { grid[last + 1].value() } else { tau_hi.value() };
            // best grid point, then golden refinement, then rationals in the bracket
            let (mut best_tau, mut best) = (first..=last)
                .map(|i| (grid[i], pick(&grid_metrics[i])))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if hi > lo {
                let (gt, gm) = scanner.golden(lo, hi, mirror)?;
                if gm < best {
                    best_tau = Tau::new(gt)?;
                    best = gm;
                }
            }
            for (tau, m) in cand_taus.iter().zip(&cand_metrics) {
                let v = tau.value();
                if v >= lo && v <= hi && pick(m) <= best {
                    best_tau = *tau;
                    best = pick(m);
                }
            }
            covered.push((lo, hi));
            hits.push((
                RevivalHit {
                    time: to_time_exact(best_tau),
                    metric: best,
                    class,
                    span: (to_time_exact(grid[first]), to_time_exact(grid[last])),
                },
                (lo, hi),
            ));
        }
        for (tau, m) in cand_taus.iter().zip(&cand_metrics) {
            let v = tau.value();
            if pick(m) < opts.threshold && !covered.iter().any(|&(a, b)| v >= a && v <= b) {
                let t = to_time_exact(*tau);
                hits.push((
                    RevivalHit {
                        time: t,
                        metric: pick(m),
                        class,
                        span: (t, t),
                    },
                    (v, v),
                ));
            }
        }
    }

    // full before mirror: drop mirror hits that overlap a full one
    let full: Vec<(f64, f64)> = hits
        .iter()
        .filter(|(h, _)| h.class == RevivalClass::Full)
        .map(|(_, b)| *b)
        .collect();
    let overlaps = |b: (f64, f64)| full.iter().any(|f| b.0 <= f.1 + REFINE_TOL && b.1 >= f.0 - REFINE_TOL);
    let mut out: Vec<RevivalHit> = hits
        .into_iter()
        .filter(|(h, b)| h.class == RevivalClass::Full || !overlaps(*b))
        .map(|(h, _)| h)
        .collect();

    if let Some(max_q) = opts.fractional {
        let frac = rationals(tau_lo.value(), tau_hi.value(), 3, max_q);
        let found: Vec<Option<RevivalHit>> = frac
            .par_iter()
            .map(|&(p, q)| -> Result<Option<RevivalHit>> {
                let tau = Tau::ratio(p, q)?;
                let t = to_time_exact(tau);
                let d = density_slice_at(coeffs, well, y, tau)?.density();
                let (template, copies) = copy_template(coeffs, well, y, p, q)?;
                let m = l2_density_distance(&d, &template)?;
                Ok((m < opts.threshold).then_some(RevivalHit {
                    time: t,
                    metric: m,
                    class: RevivalClass::Fractional { copies },
                    span: (t, t),
                }))
            })
            .collect::<Result<_>>()?;
        for h in found.into_iter().flatten() {
            let tau = well.tau_at(h.time).map(|t| t.value()).unwrap_or(f64::NAN);
            if !overlaps((tau, tau)) && !out.iter().any(|o| o.time == h.time) {
                out.push(h);
            }
        }
    }
    out.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok(RevivalReport {
        hits: out,
        t_range,
        threshold: opts.threshold,
    })
}

/// Gauss-sum weights `b_k = (1/q) sum_{n<q} exp(-2 pi i (p n^2 + k n) / q)`.
pub fn gauss_weights(p: u64, q: u64) -> Result<Vec<Complex64>> {
    if q == 0 {
        return Err(Error::domain("zero denominator"));
    }
    let q128 = q as u128;
    Ok((0..q)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..q as u128 {
                let m = (p as u128 * n * n + k as u128 * n) % q128;
                let (s, c) = sin_cos_pi(2.0 * m as f64 / q as f64);
                acc += Complex64::new(c, -s);
            }
            acc / q as f64
        })
        .collect())
}

/// `Psi_0` at each `y` shifted by `2k/q` of the well fraction, for every `k`
/// with a nonzero weight.
fn shifted_copies(
    coeffs: &ModalCoefficients,
    well: &WellConfig,
    y: &[f64],
    p: u64,
    q: u64,
) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    let b = gauss_weights(p, q)?;
    let weights = mode_weights(coeffs, well, Tau::ZERO);
    let mut base = Vec::with_capacity(y.len());
    for &v in y {
        well.check_position(v)?;
        base.push(well.fraction(v));
    }
    let mut out = Vec::new();
    for (k, bk) in b.into_iter().enumerate() {
        if bk.norm() < WEIGHT_FLOOR {
            continue;
        }
        let shift = 2.0 * k as f64 / q as f64;
        let xs: Vec<f64> = base.iter().map(|x| (x + shift) % 2.0).collect();
        let mut amp = vec![Complex64::new(0.0, 0.0); xs.len()];
        evaluate_series(&weights, &xs, &mut amp);
        out.push((bk, amp));
    }
    Ok(out)
}

/// Exact density at `tau = p/q` rebuilt from shifted copies of the collapse
/// state; agrees with the direct slice to rounding.
pub fn coherent_template(
    coeffs: &ModalCoefficients,
    well: &WellConfig,
    y: &[f64],
    p: u64,
    q: u64,
) -> Result<Vec<f64>> {
    let copies = shifted_copies(coeffs, well, y, p, q)?;
    let mut amp = vec![Complex64::new(0.0, 0.0); y.len()];
    for (bk, a) in &copies {
        for (dst, v) in amp.iter_mut().zip(a) {
            *dst += bk * v;
        }
    }
    Ok(amp.iter().map(|a| a.norm_sqr()).collect())
}

/// Density of non-interfering copies `sum_k |b_k|^2 |Psi_0|^2` at
/// `tau = p/q`, with the number of copies.
pub fn copy_template(
    coeffs: &ModalCoefficients,
    well: &WellConfig,
    y: &[f64],
    p: u64,
    q: u64,
) -> Result<(Vec<f64>, usize)> {
    let copies = shifted_copies(coeffs, well, y, p, q)?;
    let mut dens = vec![0.0; y.len()];
    for (bk, a) in &copies {
        let w = bk.norm_sqr();
        for (dst, v) in dens.iter_mut().zip(a) {
            *dst += w * v.norm_sqr();
        }
    }
    Ok((dens, copies.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::full_well_positions;
    use crate::spectral::{slit_coefficients, SlitAperture};

    fn setup(n: usize) -> (WellConfig, ModalCoefficients, Vec<f64>) {
        let w = WellConfig::natural(1.0).unwrap();
        let s = SlitAperture::within(0.245, 0.01, &w).unwrap();
        let c = slit_coefficients(&w, &s, n).unwrap();
        (w, c, full_well_positions(&w, 1024).unwrap())
    }

    #[test]
    fn gauss_weights_are_unitary() {
        for (p, q) in [(1, 3), (1, 4), (3, 10), (2, 17), (5, 12)] {
            let b = gauss_weights(p, q).unwrap();
            let s: f64 = b.iter().map(|v| v.norm_sqr()).sum();
            assert!((s - 1.0).abs() < 1e-13, "{p}/{q}");
        }
        // q = 10: five copies of weight 1/5
        let b = gauss_weights(1, 10).unwrap();
        let nz: Vec<f64> = b.iter().map(|v| v.norm_sqr()).filter(|v| *v > 1e-9).collect();
        assert_eq!(nz.len(), 5);
        for v in nz {
            assert!((v - 0.2).abs() < 1e-13);
        }
    }

    #[test]
    fn coherent_template_reproduces_slice() {
        let (w, c, y) = setup(2000);
        for (p, q) in [(1, 3), (3, 10), (2, 7)] {
            let direct = density_slice_at(&c, &w, &y, Tau::ratio(p, q).unwrap()).unwrap().density();
            let t = coherent_template(&c, &w, &y, p, q).unwrap();
            assert!(l2_density_distance(&t, &direct).unwrap() < 1e-10, "{p}/{q}");
        }
    }

    #[test]
    fn finds_full_and_mirror_revivals() {
        let (w, c, y) = setup(500);
        let t = w.revival_time();
        let r = revival_scan(&c, &w, &y, (0.0, 1.1 * t), t / 100.0, 1e-3).unwrap();
        let full = r.of_class(|c| *c == RevivalClass::Full);
        let mirror = r.of_class(|c| *c == RevivalClass::Mirror);
        assert_eq!(full.len(), 2, "{:?}", r.hits);
        assert_eq!(mirror.len(), 1, "{:?}", r.hits);
        assert!(full[0].time.abs() < 1e-4 * t);
        assert!((full[1].time - t).abs() < 1e-4 * t);
        assert!((mirror[0].time - 0.5 * t).abs() < 1e-4 * t);
        for h in &r.hits {
            assert!(h.time >= 0.0 && h.time <= 1.1 * t && h.metric >= 0.0);
        }
    }

    #[test]
    fn stationary_state_is_one_hit() {
        let w = WellConfig::natural(1.0).unwrap();
        let c = ModalCoefficients::eigenstate(1, 1).unwrap();
        let y = full_well_positions(&w, 257).unwrap();
        let t = w.revival_time();
        let r = revival_scan(&c, &w, &y, (0.0, t), t / 50.0, 1e-3).unwrap();
        assert_eq!(r.hits.len(), 1, "{:?}", r.hits);
        assert_eq!(r.hits[0].class, RevivalClass::Full);
        assert_eq!(r.hits[0].span.0, 0.0);
        assert!(r.hits[0].span.1 > 0.97 * t);
    }

    #[test]
    fn fractional_hits_at_tenths() {
        let (w, c, y) = setup(2000);
        let t = w.revival_time();
        let opts = ScanOptions {
            fractional: Some(10),
            ..ScanOptions::default()
        };
        let r = revival_scan_with(&c, &w, &y, (0.05 * t, 0.35 * t), t / 50.0, &opts).unwrap();
        for target in [0.1, 0.3] {
            let hit = r
                .hits
                .iter()
                .find(|h| (h.time - target * t).abs() < 1e-9)
                .unwrap_or_else(|| panic!("no hit at {target}: {:?}", r.hits));
            assert_eq!(hit.class, RevivalClass::Fractional { copies: 5 });
        }
    }

    #[test]
    fn rejects_bad_scan() {
        let (w, c, y) = setup(10);
        assert!(revival_scan(&c, &w, &y, (0.0, 1.0), 0.0, 1e-3).is_err());
        assert!(revival_scan(&c, &w, &y, (1.0, 0.0), 0.1, 1e-3).is_err());
        assert!(revival_scan(&c, &w, &y, (-1.0, 0.0), 0.1, 1e-3).is_err());
    }

    #[test]
    fn rationals_are_reduced_and_ordered() {
        let r = rationals(0.0, 1.0, 1, 4);
        assert_eq!(r, vec![(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)]);
    }
}
