//! Numeric finiteness test for `∫_0^1 F(ρ) dρ` that never consults the
//! power-log rule.
//!
//! In `L = -ln ρ` the integral becomes `∫_0^∞ e^{ψ(L)} dL`. It is split into
//! shells `L ∈ [k ln 2, (k+1) ln 2]` (dyadic in `ρ`), each integrated by
//! panelwise Gauss–Legendre in the log domain, so radii down to `2^{-SHELLS}` are
//! reachable without underflow. The tail behaviour is read off a fit
//! `ln I_k ≈ A - e ln k + B/k` over the last three quarters of the shells:
//! the sum converges when `e > 1` and diverges otherwise.

use serde::{Deserialize, Serialize};

use crate::quad::{log_add_exp, LogPanelSum};

pub const SHELLS: usize = 1024;
const SUBDIVISIONS: usize = 32;
/// `e` within this distance of 1 counts as the harmonic (divergent) case.
pub const DECAY_MARGIN: f64 = 0.02;
/// Partial sums beyond `e^{SENTINEL_LN}` count as overflowing.
const SENTINEL_LN: f64 = 690.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericNorm {
    pub finite: bool,
    /// Fitted polynomial decay rate `e` of the shell integrals in `k`.
    pub decay_exponent: f64,
    /// `ln Σ_{k<SHELLS} I_k`.
    pub ln_partial_sum: f64,
    /// Partial sum plus the fitted tail; absent when divergent.
    pub value_estimate: Option<f64>,
    pub sentinel_exceeded: bool,
}

/// Runs the shell test on `ψ`, which is called on an increasing sequence of
/// `L` values starting at 0 (so it may carry running state).
pub fn shell_test<F: FnMut(f64) -> f64>(mut psi: F) -> NumericNorm {
    let h = std::f64::consts::LN_2 / SUBDIVISIONS as f64;
    let mut ln_shells = Vec::with_capacity(SHELLS);
    for k in 0..SHELLS {
        let mut acc = f64::NEG_INFINITY;
        for j in 0..SUBDIVISIONS {
            let a = (k * SUBDIVISIONS + j) as f64 * h;
            let vals = GAUSS3.map(|(x, _)| psi(a + 0.5 * h * (1.0 + x)));
            acc = log_add_exp(acc, ln_gauss(&vals, h));
        }
        ln_shells.push(acc);
    }
    let ln_partial_sum = ln_shells.iter().fold(f64::NEG_INFINITY, |acc, &x| log_add_exp(acc, x));

    let lo = SHELLS / 4;
    let ks: Vec<f64> = (lo..SHELLS).map(|k| (k + 1) as f64).collect();
    let ys = &ln_shells[lo..];
    let decay_exponent = if ys.iter().all(|y| *y == f64::NEG_INFINITY) { f64::INFINITY } else { fit_decay(&ks, ys) };
    let sentinel_exceeded = ln_partial_sum > SENTINEL_LN;
    let finite = decay_exponent > 1.0 + DECAY_MARGIN && !sentinel_exceeded;
    let value_estimate = finite.then(|| {
        let last = *ln_shells.last().unwrap();
        let k = SHELLS as f64;
        // Σ_{j>K} I_K (j/K)^{-e} ≈ I_K K/(e-1)
        let ln_tail = last + (k / (decay_exponent - 1.0)).ln();
        log_add_exp(ln_partial_sum, ln_tail).exp()
    });
    NumericNorm { finite, decay_exponent, ln_partial_sum, value_estimate, sentinel_exceeded }
}

/// Three-point Gauss–Legendre nodes on `[-1, 1]` in increasing order.
const GAUSS3: [(f64, f64); 3] =
    [(-0.774_596_669_241_483_4, 5.0 / 9.0), (0.0, 8.0 / 9.0), (0.774_596_669_241_483_4, 5.0 / 9.0)];

/// `ln ∫ e^ψ` over a panel of width `h` from the log-values at the nodes.
fn ln_gauss(vals: &[f64; 3], h: f64) -> f64 {
    let peak = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    let sum: f64 = vals.iter().zip(GAUSS3).map(|(v, (_, w))| w * (v - peak).exp()).sum();
    peak + (0.5 * h * sum).ln()
}

/// Least-squares fit of `y ≈ A - e ln k + B/k`, returning `e`.
fn fit_decay(ks: &[f64], ys: &[f64]) -> f64 {
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for (&k, &y) in ks.iter().zip(ys) {
        let row = [1.0, -k.ln(), 1.0 / k];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * y;
        }
    }
    solve3(m, rhs)[1]
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            let pivot = m[col];
            for (x, p) in m[row][col..].iter_mut().zip(&pivot[col..]) {
                *x -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let tail: f64 = (i + 1..3).map(|j| m[i][j] * x[j]).sum();
        x[i] = (b[i] - tail) / m[i][i];
    }
    x
}

/// `ψ` for `∫_0^1 u(ρ)^τ ω D(ρ) dρ` with `u(ρ) = ∫_ρ^1 D^{1/(1-p)}` and
/// `D = w ρ^{n-1}` given as `ln D` in terms of `ln ρ`.
pub fn function_norm_test<D: Fn(f64) -> f64>(ln_d: D, ln_omega: f64, p: f64, tau: f64) -> NumericNorm {
    let h = std::f64::consts::LN_2 / SUBDIVISIONS as f64;
    let mut u = LogPanelSum::new(|l: f64| ln_d(-l) / (1.0 - p) - l, 0.0, h);
    shell_test(|l| {
        let ln_u = u.advance_to(l);
        tau * ln_u + ln_omega + ln_d(-l) - l
    })
}

/// `ψ` for `∫_0^1 ω D(ρ)^{1 - t/(p-1)} dρ`, the `L^t` norm of the gradient.
pub fn gradient_norm_test<D: Fn(f64) -> f64>(ln_d: D, ln_omega: f64, p: f64, t: f64) -> NumericNorm {
    let k = 1.0 - t / (p - 1.0);
    shell_test(|l| ln_omega + k * ln_d(-l) - l)
}
