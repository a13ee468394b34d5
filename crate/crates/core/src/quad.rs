//! Adaptive Gauss–Kronrod quadrature and log-domain panel sums.
//!
//! Every integral in this crate lives on a positive half-line with a
//! possible singularity at the origin, so the workhorse is
//! [`integrate_log`]: it substitutes `ρ = e^x` and starts from panels of
//! equal width in `x`. [`integrate_semi_infinite`] handles tails via
//! `x = a + t/(1-t)`, and [`LogPanelSum`] accumulates integrals whose
//! values overflow `f64` by working with logarithms throughout.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_PANELS: usize = 20_000;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod evaluation with the embedded 7-point Gauss error.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Globally adaptive integration over `[a, b]`, starting from the given
/// strictly increasing breakpoints (which must include `a` and `b`).
pub fn integrate_panels<F>(f: F, breakpoints: &[f64], rel_tol: f64, abs_tol: f64) -> Result<Quad>
where
    F: Fn(f64) -> f64,
{
    if breakpoints.len() < 2 {
        return Err(Error::invalid("quadrature needs at least two breakpoints"));
    }
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        let (value, error) = gk15(&f, w[0], w[1]);
        evaluations += 15;
        if !value.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{:e}, {:e}]", w[0], w[1])));
        }
        total += value;
        total_err += error;
        heap.push(Panel { a: w[0], b: w[1], value, error });
    }
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "no convergence after {} panels (estimate {:e}, error {:e})",
                heap.len(),
                total,
                total_err
            )));
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel collapsed to machine resolution; accept what we have.
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evaluations += 30;
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::Quadrature(format!("non-finite integrand on [{:e}, {:e}]", worst.a, worst.b)));
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Re-sum to shed the drift of incremental updates.
    let (value, abs_error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(Quad { value, abs_error, evaluations })
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Quad>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(Quad { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    integrate_panels(f, &[a, b], rel_tol, 0.0)
}

/// `∫_a^b f(ρ) dρ` for `0 < a < b`, computed as `∫ f(e^x) e^x dx` over
/// panels of width at most `ln 2` in `x`.
pub fn integrate_log<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Quad>
where
    F: Fn(f64) -> f64,
{
    integrate_log_with_kinks(f, a, b, &[], rel_tol)
}

/// [`integrate_log`] with extra panel breaks at the points of `kinks` that
/// fall inside `(a, b)`, for integrands that are only piecewise smooth.
pub fn integrate_log_with_kinks<F>(f: F, a: f64, b: f64, kinks: &[f64], rel_tol: f64) -> Result<Quad>
where
    F: Fn(f64) -> f64,
{
    if !(a > 0.0 && b >= a) {
        return Err(Error::invalid(format!("log-domain quadrature needs 0 < a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quad { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let (xa, xb) = (a.ln(), b.ln());
    let mut cuts = vec![xa];
    cuts.extend(kinks.iter().filter(|&&k| k > a && k < b).map(|k| k.ln()));
    cuts.push(xb);
    cuts.sort_by(f64::total_cmp);
    let mut breaks = vec![xa];
    for w in cuts.windows(2) {
        let panels = ((w[1] - w[0]) / std::f64::consts::LN_2).ceil().clamp(1.0, 4096.0) as usize;
        breaks.extend((1..=panels).map(|i| w[0] + (w[1] - w[0]) * i as f64 / panels as f64));
    }
    integrate_panels(
        |x| {
            let rho = x.exp();
            f(rho) * rho
        },
        &breaks,
        rel_tol,
        0.0,
    )
}

/// `∫_a^∞ f(x) dx` through `x = a + t/(1-t)`; `f` must decay fast enough
/// that the transformed integrand vanishes at `t = 1`.
pub fn integrate_semi_infinite<F>(f: F, a: f64, rel_tol: f64) -> Result<Quad>
where
    F: Fn(f64) -> f64,
{
    let breaks = [0.0, 0.25, 0.5, 0.75, 0.9, 0.97, 1.0];
    integrate_panels(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let s = 1.0 - t;
            let v = f(a + t / s) / (s * s);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        &breaks,
        rel_tol,
        0.0,
    )
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Logarithm of `∫_lo^hi exp(φ(x)) dx` with a fixed 15-point Kronrod rule
/// on `panels` equal sub-panels. Suitable when `φ` is smooth and varies by
/// at most a few units per panel.
pub fn ln_integral_exp<F>(phi: &F, lo: f64, hi: f64, panels: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut acc = f64::NEG_INFINITY;
    let width = (hi - lo) / panels as f64;
    for k in 0..panels {
        let a = lo + width * k as f64;
        acc = log_add_exp(acc, ln_panel(phi, a, a + width));
    }
    acc
}

fn ln_panel<F: Fn(f64) -> f64>(phi: &F, a: f64, b: f64) -> f64 {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut nodes = [(0.0f64, 0.0f64); 15];
    nodes[0] = (phi(center), WGK[7]);
    for j in 0..7 {
        let dx = half * XGK[j];
        nodes[1 + 2 * j] = (phi(center - dx), WGK[j]);
        nodes[2 + 2 * j] = (phi(center + dx), WGK[j]);
    }
    let peak = nodes.iter().map(|n| n.0).fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    let sum: f64 = nodes.iter().map(|(v, w)| w * (v - peak).exp()).sum();
    peak + (sum * half).ln()
}

/// Running `ln ∫_{x0}^{x} exp(φ)` evaluated on an increasing sequence of
/// upper limits; each call only integrates the new stretch.
pub struct LogPanelSum<F> {
    phi: F,
    x: f64,
    ln_total: f64,
    max_width: f64,
}

impl<F: Fn(f64) -> f64> LogPanelSum<F> {
    pub fn new(phi: F, x0: f64, max_width: f64) -> Self {
        Self { phi, x: x0, ln_total: f64::NEG_INFINITY, max_width }
    }

    /// Advances to `x` (which must not be behind the current position) and
    /// returns the log of the accumulated integral.
    pub fn advance_to(&mut self, x: f64) -> f64 {
        if x > self.x {
            let panels = ((x - self.x) / self.max_width).ceil().max(1.0) as usize;
            let piece = ln_integral_exp(&self.phi, self.x, x, panels);
            self.ln_total = log_add_exp(self.ln_total, piece);
            self.x = x;
        }
        self.ln_total
    }
}
