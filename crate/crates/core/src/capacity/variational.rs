//! Discrete radial minimization of `∫ |u'|^p dμ` over profiles with
//! `u(r) = 1`, `u(R) = 0`.
//!
//! Nodes are log-spaced. Element `i` carries the weight
//! `a_i = ω w(m_i) m_i^{n-1} h_i^{1-p}` at its midpoint `m_i`, so the energy is
//! `E(u) = Σ a_i |u_{i+1} - u_i|^p`. It is strictly convex in the interior
//! values and is minimized by damped Newton with a tridiagonal solve.

use serde::{Deserialize, Serialize};

use super::{CapacityMethod, CapacityQuery, CapacityResult};
use crate::error::{Error, Result};
use crate::measures::RadialMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalOptions {
    /// Number of elements; at least 16.
    pub n: usize,
    /// Stop once `max_j |∂E/∂u_j| ≤ gradient_tol · E · N`.
    pub gradient_tol: f64,
    pub max_iterations: usize,
    /// Also solve on `N/2` elements and report the Richardson difference.
    pub richardson: bool,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        Self { n: 4096, gradient_tol: 1e-10, max_iterations: 500, richardson: true }
    }
}

impl VariationalOptions {
    pub fn with_n(n: usize) -> Self {
        Self { n, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalSolution {
    pub result: CapacityResult,
    pub nodes: Vec<f64>,
    pub profile: Vec<f64>,
    pub iterations: usize,
    /// Scaled gradient norm `max_j |∂E/∂u_j| / (E·N)` at exit.
    pub gradient_norm: f64,
}

pub fn variational_radial(
    m: &RadialMeasure,
    q: &CapacityQuery,
    opts: &VariationalOptions,
) -> Result<VariationalSolution> {
    if opts.n < 16 {
        return Err(Error::invalid(format!("grid size must be at least 16, got {}", opts.n)));
    }
    let fine = solve(m, q, opts.n, opts)?;
    let abs_error_estimate = if opts.richardson {
        let coarse = solve(m, q, opts.n / 2, opts)?;
        // second-order midpoint discretization
        (fine.energy - coarse.energy).abs() / 3.0
    } else {
        0.0
    };
    Ok(VariationalSolution {
        result: CapacityResult {
            value: fine.energy,
            method: CapacityMethod::Variational,
            abs_error_estimate,
            hypothesis_ok: true,
        },
        nodes: fine.nodes,
        profile: fine.u,
        iterations: fine.iterations,
        gradient_norm: fine.gradient_norm,
    })
}

struct Solved {
    energy: f64,
    nodes: Vec<f64>,
    u: Vec<f64>,
    iterations: usize,
    gradient_norm: f64,
}

struct Energy {
    p: f64,
    a: Vec<f64>,
}

impl Energy {
    fn value(&self, u: &[f64]) -> f64 {
        self.a.iter().enumerate().map(|(i, a)| a * (u[i + 1] - u[i]).abs().powf(self.p)).sum()
    }

    /// Gradient in the interior unknowns and the Hessian's element
    /// stiffnesses `d_i = p(p-1) a_i |δ_i|^{p-2}`.
    fn derivatives(&self, u: &[f64], grad: &mut [f64], stiff: &mut [f64]) {
        let p = self.p;
        let mut flux = vec![0.0; self.a.len()];
        for (i, a) in self.a.iter().enumerate() {
            let d = u[i + 1] - u[i];
            let ad = d.abs();
            flux[i] = p * a * ad.powf(p - 1.0) * d.signum();
            stiff[i] = if ad > 0.0 { p * (p - 1.0) * a * ad.powf(p - 2.0) } else { 0.0 };
        }
        for j in 1..u.len() - 1 {
            grad[j - 1] = flux[j - 1] - flux[j];
        }
    }
}

fn solve(m: &RadialMeasure, q: &CapacityQuery, n: usize, opts: &VariationalOptions) -> Result<Solved> {
    let p = q.p;
    let (lr, lbig) = (q.r.ln(), q.big_r.ln());
    let nodes: Vec<f64> = (0..=n)
        .map(|i| match i {
            0 => q.r,
            i if i == n => q.big_r,
            i => (lr + (lbig - lr) * i as f64 / n as f64).exp(),
        })
        .collect();
    let ln_omega = m.omega.ln();
    let a: Vec<f64> = nodes
        .windows(2)
        .map(|w| {
            let h = w[1] - w[0];
            let mid = 0.5 * (w[0] + w[1]);
            (ln_omega + m.ln_line_density(mid.ln())).exp() * h.powf(1.0 - p)
        })
        .collect();
    let energy = Energy { p, a };

    let mut u: Vec<f64> = (0..=n).map(|i| 1.0 - i as f64 / n as f64).collect();
    let interior = n - 1;
    let mut grad = vec![0.0; interior];
    let mut stiff = vec![0.0; n];
    let mut step = vec![0.0; interior];
    let mut trial = u.clone();
    let mut e = energy.value(&u);
    let mut gnorm = f64::INFINITY;

    for iter in 0..opts.max_iterations {
        energy.derivatives(&u, &mut grad, &mut stiff);
        gnorm = grad.iter().fold(0.0f64, |acc, g| acc.max(g.abs())) / (e * n as f64);
        if gnorm <= opts.gradient_tol {
            return Ok(Solved { energy: e, nodes, u, iterations: iter, gradient_norm: gnorm });
        }
        let newton = newton_direction(&stiff, &grad, &mut step);
        if !newton {
            // near-singular Hessian: steepest descent, scaled to the grid
            let scale = grad.iter().fold(0.0f64, |acc, g| acc.max(g.abs()));
            for (s, g) in step.iter_mut().zip(&grad) {
                *s = -g / (scale * n as f64);
            }
        }
        let slope: f64 = step.iter().zip(&grad).map(|(s, g)| s * g).sum();
        let mut t = 1.0;
        let accepted = loop {
            for j in 0..interior {
                trial[j + 1] = u[j + 1] + t * step[j];
            }
            let et = energy.value(&trial);
            if et.is_finite() && et <= e + 1e-4 * t * slope {
                break Some(et);
            }
            t *= 0.5;
            if t < 1e-14 {
                break None;
            }
        };
        match accepted {
            Some(et) => {
                std::mem::swap(&mut u, &mut trial);
                trial.copy_from_slice(&u);
                let stalled = (e - et).abs() <= 1e-15 * e;
                e = et;
                if stalled && gnorm <= 1e3 * opts.gradient_tol {
                    return Ok(Solved { energy: e, nodes, u, iterations: iter + 1, gradient_norm: gnorm });
                }
            }
            None => {
                // no further decrease representable in floating point
                if gnorm <= 1e3 * opts.gradient_tol {
                    return Ok(Solved { energy: e, nodes, u, iterations: iter, gradient_norm: gnorm });
                }
                return Err(Error::SolverDivergence(format!(
                    "line search failed at iteration {iter}: energy {e}, scaled gradient {gnorm:e}, N = {n}"
                )));
            }
        }
    }
    Err(Error::SolverDivergence(format!(
        "no convergence after {} iterations: energy {e}, scaled gradient {gnorm:e}, N = {n}",
        opts.max_iterations
    )))
}

/// Solves `H s = -g` for the tridiagonal Hessian with diagonal
/// `d_{j-1} + d_j` and off-diagonal `-d_j`. Returns false when a pivot
/// is not safely positive.
fn newton_direction(stiff: &[f64], grad: &[f64], out: &mut [f64]) -> bool {
    let m = grad.len();
    let mut c = vec![0.0; m];
    for j in 0..m {
        let diag = stiff[j] + stiff[j + 1];
        let lower = if j > 0 { -stiff[j] } else { 0.0 };
        let pivot = diag - if j > 0 { lower * c[j - 1] } else { 0.0 };
        if !(pivot > 1e-300 && pivot >= 1e-14 * diag) {
            return false;
        }
        c[j] = -stiff[j + 1] / pivot;
        let rhs = -grad[j] - if j > 0 { lower * out[j - 1] } else { 0.0 };
        out[j] = rhs / pivot;
    }
    for j in (0..m.saturating_sub(1)).rev() {
        out[j] -= c[j] * out[j + 1];
    }
    out.iter().all(|s| s.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::exact_radial;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    fn run(n: u32, p: f64, r: f64, big_r: f64, grid: usize) -> VariationalSolution {
        let m = RadialMeasure::unweighted(n).unwrap();
        variational_radial(&m, &CapacityQuery::new(p, r, big_r).unwrap(), &VariationalOptions::with_n(grid)).unwrap()
    }

    #[test]
    fn newtonian_annulus() {
        let s = run(3, 2.0, 1.0, 2.0, 4096);
        assert_relative_eq!(s.result.value, 8.0 * PI, max_relative = 5e-3);
        assert!(s.gradient_norm <= 1e-7);
    }

    #[test]
    fn planar_conformal_annulus() {
        let s = run(2, 2.0, 1.0, E, 4096);
        assert_relative_eq!(s.result.value, 2.0 * PI, max_relative = 5e-3);
    }

    #[test]
    fn planar_p3_matches_exact() {
        let m = RadialMeasure::unweighted(2).unwrap();
        let q = CapacityQuery::new(3.0, 1.0, 2.0).unwrap();
        let exact = exact_radial(&m, &q).unwrap().value;
        let s = run(2, 3.0, 1.0, 2.0, 1024);
        assert_relative_eq!(s.result.value, exact, max_relative = 1e-3);
    }

    #[test]
    fn profile_is_monotone_with_boundary_values() {
        let s = run(3, 1.5, 0.5, 3.0, 64);
        assert_eq!(s.profile[0], 1.0);
        assert_eq!(*s.profile.last().unwrap(), 0.0);
        assert!(s.profile.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn richardson_estimate_tracks_the_error() {
        let m = RadialMeasure::unweighted(3).unwrap();
        let q = CapacityQuery::new(2.0, 1.0, 4.0).unwrap();
        let exact = exact_radial(&m, &q).unwrap().value;
        let s = variational_radial(&m, &q, &VariationalOptions::with_n(256)).unwrap();
        let err = (s.result.value - exact).abs();
        assert!(err <= 3.0 * s.result.abs_error_estimate + 1e-12, "{err} vs {}", s.result.abs_error_estimate);
    }

    #[test]
    fn rejects_tiny_grids() {
        let m = RadialMeasure::unweighted(3).unwrap();
        let q = CapacityQuery::new(2.0, 1.0, 2.0).unwrap();
        assert!(variational_radial(&m, &q, &VariationalOptions::with_n(8)).is_err());
    }
}
