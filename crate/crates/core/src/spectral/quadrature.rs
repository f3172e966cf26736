//! Gauss-Legendre rules and adaptive panel integration.

use std::sync::OnceLock;

use num_complex::Complex64;

const MAX_ORDER: usize = 64;
const MAX_DEPTH: u32 = 40;
/// Rule differences below this multiple of the estimated rounding noise are
/// accepted.
const ROUNDOFF: f64 = 64.0;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `order`-point rule by Newton iteration on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Cached rule for `order <= 64`.
    pub fn cached(order: usize) -> &'static GaussLegendre {
        static RULES: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
        let rules = RULES.get_or_init(|| (1..=MAX_ORDER).map(GaussLegendre::new).collect());
        assert!(
            (1..=MAX_ORDER).contains(&order),
            "cached rules cover orders 1..={MAX_ORDER}"
        );
        &rules[order - 1]
    }

    pub fn integrate<F>(&self, f: &F, lo: f64, hi: f64) -> Complex64
    where
        F: Fn(f64) -> Complex64 + ?Sized,
    {
        self.integrate_with_noise(f, lo, hi).0
    }

    /// Integral of `f` together with the rounding noise expected in it:
    /// `eps * integral |f|` plus the error from rounding node positions,
    /// `eps * |y| * |f'| * width`, with the slope taken between neighbours.
    fn integrate_with_noise<F>(&self, f: &F, lo: f64, hi: f64) -> (Complex64, f64)
    where
        F: Fn(f64) -> Complex64 + ?Sized,
    {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        let mut slope: f64 = 0.0;
        let mut prev: Option<(f64, Complex64)> = None;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let y = mid + half * x;
            let v = f(y);
            acc += v * *w;
            mag += v.norm() * *w;
            if let Some((py, pv)) = prev {
                slope = slope.max((v - pv).norm() / (y - py).abs());
            }
            prev = Some((y, v));
        }
        let width = (hi - lo).abs();
        let reach = lo.abs().max(hi.abs());
        let noise = f64::EPSILON * (mag * half.abs() + reach * slope * width);
        (acc * half, noise)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[lo, hi]` split into `panels` equal panels of
/// `order` nodes each. Each panel is accepted once the `2 * order` rule
/// agrees with the `order` rule to within the panel's share of `tol`, or
/// to within a multiple of the panel's rounding noise; otherwise it is
/// bisected until the rule difference stops shrinking.
pub fn adaptive_panels<F>(f: &F, lo: f64, hi: f64, panels: usize, order: usize, tol: f64) -> Complex64
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let panels = panels.max(1);
    let order = order.clamp(1, MAX_ORDER / 2);
    let width = (hi - lo) / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let a = lo + width * k as f64;
        let b = if k + 1 == panels { hi } else { a + width };
        total += refine(f, a, b, order, panel_tol, 0, f64::INFINITY);
    }
    total
}

fn refine<F>(f: &F, lo: f64, hi: f64, order: usize, tol: f64, depth: u32, parent: f64) -> Complex64
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let coarse = GaussLegendre::cached(order).integrate(f, lo, hi);
    let (fine, noise) = GaussLegendre::cached(2 * order).integrate_with_noise(f, lo, hi);
    let diff = (fine - coarse).norm();
    // a converging rule shrinks the difference sharply under bisection; once
    // it stops shrinking, what is left is rounding the noise estimate missed
    let stalled = depth >= 2 && diff > 0.5 * parent;
    if diff <= tol.max(ROUNDOFF * noise) || stalled || depth >= MAX_DEPTH {
        return fine;
    }
    let mid = 0.5 * (lo + hi);
    refine(f, lo, mid, order, 0.5 * tol, depth + 1, diff) + refine(f, mid, hi, order, 0.5 * tol, depth + 1, diff)
}
