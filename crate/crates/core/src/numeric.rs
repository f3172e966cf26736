//! Floating-point building blocks: error-free transformations, a small
//! double-double type, trigonometry in units of half-turns and pairwise
//! summation.

use std::f64::consts::PI;
use std::ops::Add;

/// Error-free sum: `a + b == s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free product: `a * b == p + e` exactly (barring overflow).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleF64 {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleF64 {
    pub const ZERO: DoubleF64 = DoubleF64 { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        DoubleF64 { hi, lo }
    }

    /// `p / q` to roughly 106 bits, for integers exactly representable in f64.
    pub fn ratio(p: i64, q: i64) -> Self {
        let (p, q) = (p as f64, q as f64);
        let hi = p / q;
        let rem = (-hi).mul_add(q, p);
        DoubleF64::new(hi, rem / q)
    }

    /// Exact difference of two doubles.
    #[inline]
    pub fn diff(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, -b);
        DoubleF64 { hi, lo }
    }

    pub fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let rem = (-q1).mul_add(d, self.hi);
        let q2 = (rem + self.lo) / d;
        DoubleF64::new(q1, q2)
    }

    pub fn mul_f64(self, m: f64) -> Self {
        let (p, e) = two_prod(self.hi, m);
        DoubleF64::new(p, e + self.lo * m)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for DoubleF64 {
    type Output = DoubleF64;

    fn add(self, rhs: DoubleF64) -> DoubleF64 {
        let (s, e) = two_sum(self.hi, rhs.hi);
        DoubleF64::new(s, e + self.lo + rhs.lo)
    }
}

/// `(sin(pi x), cos(pi x))`, exact at multiples of 1/2.
///
/// The reduction to `[-1/4, 1/4]` is exact, so the only rounding is in the
/// final small-argument evaluation.
#[inline]
pub fn sin_cos_pi(x: f64) -> (f64, f64) {
    let r = x - 2.0 * (x * 0.5).round();
    let q = (r * 2.0).round();
    let f = r - q * 0.5;
    let (s, c) = (PI * f).sin_cos();
    match q as i64 {
        0 => (s, c),
        1 => (c, -s),
        -1 => (-c, s),
        _ => (-s, -c),
    }
}

/// `sin(pi * n * x)` with `n * x` reduced modulo 2 in double-double precision.
#[inline]
pub fn sin_pi_scaled(n: f64, x: f64) -> f64 {
    let (p, e) = two_prod(n, x);
    let whole = 2.0 * (p * 0.5).floor();
    sin_cos_pi((p - whole) + e).0
}

/// Sum of a slice by recursive halving; O(log n) error growth.
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    const BASE: usize = 32;
    if values.len() <= BASE {
        return values.iter().fold(T::default(), |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Streaming cascade summation over fixed-size blocks.
///
/// Terms are summed naively inside blocks of `BLOCK`; completed blocks are
/// merged like a binary counter, so the association order depends only on
/// the number of terms pushed.
#[derive(Debug, Clone)]
pub struct CascadeSum<T> {
    block: T,
    in_block: usize,
    levels: Vec<Option<T>>,
}

impl<T> CascadeSum<T>
where
    T: Copy + Default + Add<Output = T>,
{
    pub const BLOCK: usize = 64;

    pub fn new() -> Self {
        CascadeSum {
            block: T::default(),
            in_block: 0,
            levels: Vec::new(),
        }
    }

    pub fn push(&mut self, v: T) {
        self.block = self.block + v;
        self.in_block += 1;
        if self.in_block == Self::BLOCK {
            let full = std::mem::take(&mut self.block);
            self.in_block = 0;
            self.carry(full);
        }
    }

    fn carry(&mut self, mut v: T) {
        for slot in self.levels.iter_mut() {
            match slot.take() {
                Some(prev) => v = prev + v,
                None => {
                    *slot = Some(v);
                    return;
                }
            }
        }
        self.levels.push(Some(v));
    }

    pub fn total(&self) -> T {
        let mut acc = self.block;
        for v in self.levels.iter().flatten() {
            acc = *v + acc;
        }
        acc
    }
}

impl<T> Default for CascadeSum<T>
where
    T: Copy + Default + Add<Output = T>,
{
    fn default() -> Self {
        Self::new()
    }
}
