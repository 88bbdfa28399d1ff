//! Independent time-stepping check of the modal factors.
//!
//! Each eigenmode obeys the scalar equation `∂_t^α y = -λ y`. On the grid
//! `t_k = k·dt` the Caputo derivative of order `β ∈ (0, 1)` is replaced by the
//! L1 sum with one starting correction,
//!
//! ```text
//! D^β f(t_k) ≈ dt^{-β} / Γ(2-β) · [ Σ_{m=1}^{k} w_{k-m} (f_m - f_{m-1}) + c_k (f_1 - f_0) ],
//! w_j = (j+1)^{1-β} - j^{1-β},
//! c_k = Γ(2-β) Γ(1+σ) / Γ(1+σ-β) · k^{σ-β} - Σ_{m=1}^{k} w_{k-m} (m^σ - (m-1)^σ),
//! ```
//!
//! which makes the rule exact for `f = 1` and `f = t^σ`. The correction
//! absorbs the `t^σ` singularity of the solution, restoring the order
//! `2 - β` that plain L1 loses on such data.
//!
//! * `0 < α < 1`: `β = σ = α`, with the implicit update
//!   `(w_0 + g λ) y_k = w_0 y_{k-1} - Σ_{m=1}^{k-1} w_{k-m} (y_m - y_{m-1}) - c_k (y_1 - y_0)`,
//!   `g = Γ(2-α) dt^α` (for `k = 1`, `(w_0 + c_1 + gλ) y_1 = (w_0 + c_1) y_0`).
//! * `1 < α < 2`: `v = y'` solves `D^{α-1} v = -λ y` with `β = α - 1` and
//!   `y_k = y_{k-1} + dt (v_{k-1} + v_k) / 2`. The value mode `y(0) = 1`,
//!   `y'(0) = 0` uses the correction with `σ = α - 1`; the velocity mode
//!   `y(0) = 0`, `y'(0) = 1` is already smooth enough at that order and uses
//!   none. Each step solves
//!   `(W + gλ dt/2) v_k = W v_{k-1} - H_k - gλ (y_{k-1} + dt v_{k-1} / 2)`,
//!   where `W = w_0` (`w_0 + c_1` at `k = 1`) and `H_k` collects the history and
//!   correction terms.
//!
//! Observed orders are `2 - α` for `α < 1` and `3 - α` for `α > 1`.

use crate::error::{Error, Result};
use crate::par;
use crate::solver::{FractionalProblem, Order, Quantity};
use crate::special::{gamma_real, mittag_leffler};

/// Absolute discrepancy accepted by [`cross_validate`] for unit data at
/// `dt ≤ 1e-3`; coarser steps loosen it by `(dt/1e-3)^order`.
pub const ORACLE_TOLERANCE: f64 = 5e-3;

/// Convergence order of [`trajectory`] for order `alpha`.
pub fn scheme_order(alpha: f64) -> f64 {
    if alpha < 1.0 {
        2.0 - alpha
    } else {
        3.0 - alpha
    }
}

fn l1_weights(beta: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| ((j + 1) as f64).powf(1.0 - beta) - (j as f64).powf(1.0 - beta))
        .collect()
}

fn corrections(beta: f64, sigma: f64, w: &[f64], n: usize) -> Result<Vec<f64>> {
    let exact = gamma_real(2.0 - beta)? * gamma_real(1.0 + sigma)? / gamma_real(1.0 + sigma - beta)?;
    let jumps: Vec<f64> = (1..=n)
        .map(|m| (m as f64).powf(sigma) - ((m - 1) as f64).powf(sigma))
        .collect();
    let mut c = vec![0.0; n + 1];
    for k in 1..=n {
        let l1: f64 = (1..=k).map(|m| w[k - m] * jumps[m - 1]).sum();
        c[k] = exact * (k as f64).powf(sigma - beta) - l1;
    }
    Ok(c)
}

fn history(w: &[f64], diffs: &[f64], k: usize) -> f64 {
    // Σ_{m=1}^{k-1} w_{k-m} d_m with d_m = f_m - f_{m-1}
    (1..k).map(|m| w[k - m] * diffs[m]).sum()
}

/// Shared weights for one `(α, dt, steps)` combination.
struct Scheme {
    alpha: f64,
    dt: f64,
    steps: usize,
    w: Vec<f64>,
    c: Vec<f64>,
    g: f64,
}

impl Scheme {
    fn new(alpha: f64, dt: f64, horizon: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 {
            return Err(Error::InvalidArgument(format!(
                "the time-stepping oracle needs alpha in (0, 1) or (1, 2), got {alpha}"
            )));
        }
        if !(dt > 0.0 && horizon > 0.0 && dt <= horizon) {
            return Err(Error::InvalidArgument(format!("need 0 < dt <= horizon, got dt = {dt}, horizon = {horizon}")));
        }
        let steps = (horizon / dt).round() as usize;
        let beta = if alpha < 1.0 { alpha } else { alpha - 1.0 };
        let w = l1_weights(beta, steps);
        let c = corrections(beta, beta, &w, steps)?;
        Ok(Self {
            alpha,
            dt,
            steps,
            g: gamma_real(2.0 - beta)? * dt.powf(beta),
            w,
            c,
        })
    }

    fn subdiffusive(&self, lambda: f64) -> Vec<f64> {
        let (w, c, g, n) = (&self.w, &self.c, self.g, self.steps);
        let mut y = vec![0.0; n + 1];
        let mut d = vec![0.0; n + 1];
        y[0] = 1.0;
        for k in 1..=n {
            y[k] = if k == 1 {
                (w[0] + c[1]) * y[0] / (w[0] + c[1] + lambda * g)
            } else {
                (w[0] * y[k - 1] - history(w, &d, k) - c[k] * d[1]) / (w[0] + lambda * g)
            };
            d[k] = y[k] - y[k - 1];
        }
        y
    }

    fn wave(&self, lambda: f64, y0: f64, v0: f64, corrected: bool) -> Vec<f64> {
        let (w, g, n, dt) = (&self.w, self.g, self.steps, self.dt);
        let c1 = if corrected { self.c[1] } else { 0.0 };
        let mut y = vec![0.0; n + 1];
        let mut v = vec![0.0; n + 1];
        let mut d = vec![0.0; n + 1];
        y[0] = y0;
        v[0] = v0;
        for k in 1..=n {
            let lead = if k == 1 { w[0] + c1 } else { w[0] };
            let mut rhs = lead * v[k - 1] - lambda * g * (y[k - 1] + 0.5 * dt * v[k - 1]);
            if k > 1 {
                rhs -= history(w, &d, k);
                if corrected {
                    rhs -= self.c[k] * d[1];
                }
            }
            v[k] = rhs / (lead + 0.5 * lambda * g * dt);
            d[k] = v[k] - v[k - 1];
            y[k] = y[k - 1] + 0.5 * dt * (v[k - 1] + v[k]);
        }
        y
    }

    /// Trajectories of the unit value mode and, for `α > 1`, the unit
    /// velocity mode.
    fn unit_modes(&self, lambda: f64) -> (Vec<f64>, Option<Vec<f64>>) {
        if self.alpha < 1.0 {
            (self.subdiffusive(lambda), None)
        } else {
            (self.wave(lambda, 1.0, 0.0, true), Some(self.wave(lambda, 0.0, 1.0, false)))
        }
    }
}

/// `y(k·dt)` for `∂_t^α y = -λ y`, `y(0) = y0` and, when `α > 1`,
/// `y'(0) = y1`.
pub fn trajectory(alpha: f64, lambda: f64, y0: f64, y1: Option<f64>, dt: f64, horizon: f64) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be non-negative")));
    }
    match (alpha > 1.0, y1) {
        (true, None) => return Err(Error::InvalidArgument("alpha > 1 needs an initial velocity".into())),
        (false, Some(_)) => return Err(Error::InvalidArgument("alpha < 1 takes no initial velocity".into())),
        _ => {}
    }
    let scheme = Scheme::new(alpha, dt, horizon)?;
    let (ya, yb) = scheme.unit_modes(lambda);
    let y1 = y1.unwrap_or(0.0);
    Ok(match yb {
        Some(yb) => ya.iter().zip(&yb).map(|(a, b)| y0 * a + y1 * b).collect(),
        None => ya.iter().map(|a| y0 * a).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    /// Largest discrepancy over eigenspaces and checkpoints.
    pub discrepancy: f64,
    /// Largest discrepancy per distinct eigenvalue.
    pub per_mode: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub checkpoints: Vec<f64>,
}

/// Compare Mittag-Leffler modal factors of `problem` with the time-stepping
/// oracle at `checkpoints` (rounded to the grid), for every mode with
/// nonzero data.
pub fn cross_validate(problem: &FractionalProblem, dt: f64, checkpoints: &[f64]) -> Result<CrossValidation> {
    let Order::Fractional(alpha) = problem.order() else {
        return Err(Error::OutOfScope("cross-validation targets fractional orders".into()));
    };
    if checkpoints.is_empty() || checkpoints.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument("checkpoints must be positive".into()));
    }
    let horizon = checkpoints.iter().cloned().fold(0.0, f64::max);
    let scheme = Scheme::new(alpha, dt, horizon)?;
    let grid: Vec<(usize, f64)> = checkpoints
        .iter()
        .map(|&t| {
            let k = (t / dt).round() as usize;
            (k, k as f64 * dt)
        })
        .collect();
    let factors: Vec<(Vec<f64>, Vec<f64>)> = grid
        .iter()
        .map(|&(_, t)| problem.factors(Quantity::Field, t))
        .collect::<Result<_>>()?;
    let a = problem.initial_value();
    let b = problem.initial_velocity();
    let lambdas = problem.basis().eigenvalues();
    let per_mode = par::map_range(problem.execution(), lambdas.len(), |n| {
        let ca = &a.values[n];
        let cb = b.map(|b| &b.values[n]);
        let active = ca.iter().chain(cb.into_iter().flatten()).any(|&c| c != 0.0);
        if !active {
            return 0.0;
        }
        let (ya, yb) = scheme.unit_modes(lambdas[n]);
        let mut worst: f64 = 0.0;
        for (i, &(k, _)) in grid.iter().enumerate() {
            let (fa, fb) = &factors[i];
            for j in 0..ca.len() {
                let mut diff = ca[j] * (fa[n] - ya[k]);
                if let (Some(cb), Some(yb)) = (cb, &yb) {
                    diff += cb[j] * (fb[n] - yb[k]);
                }
                worst = worst.max(diff.abs());
            }
        }
        worst
    });
    let scale = a
        .values
        .iter()
        .flatten()
        .chain(b.into_iter().flat_map(|b| b.values.iter().flatten()))
        .fold(0.0f64, |m, c| m.max(c.abs()))
        .max(1.0);
    let tolerance = ORACLE_TOLERANCE * scale * (dt / 1e-3).max(1.0).powf(scheme_order(alpha));
    let discrepancy = per_mode.iter().cloned().fold(0.0, f64::max);
    Ok(CrossValidation {
        discrepancy,
        passed: discrepancy <= tolerance,
        per_mode,
        tolerance,
        checkpoints: grid.iter().map(|&(_, t)| t).collect(),
    })
}

/// Convergence check of the value mode against `E_{α,1}(-λ t^α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderCheck {
    pub error_coarse: f64,
    pub error_fine: f64,
    /// `error_coarse / error_fine`.
    pub ratio: f64,
    /// `2^{order}`.
    pub expected_ratio: f64,
}

/// Errors at `dt` and `dt/2` over `checkpoints` and their ratio.
pub fn order_check(alpha: f64, lambda: f64, dt: f64, checkpoints: &[f64]) -> Result<OrderCheck> {
    let horizon = checkpoints.iter().cloned().fold(0.0, f64::max);
    let exact: Vec<f64> = checkpoints
        .iter()
        .map(|&t| mittag_leffler(alpha, 1.0, -lambda * t.powf(alpha)))
        .collect::<Result<_>>()?;
    let y1 = (alpha > 1.0).then_some(0.0);
    let error = |step: f64| -> Result<f64> {
        let y = trajectory(alpha, lambda, 1.0, y1, step, horizon)?;
        Ok(checkpoints
            .iter()
            .zip(&exact)
            .map(|(&t, e)| (y[(t / step).round() as usize] - e).abs())
            .fold(0.0, f64::max))
    };
    let error_coarse = error(dt)?;
    let error_fine = error(dt / 2.0)?;
    Ok(OrderCheck {
        error_coarse,
        error_fine,
        ratio: error_coarse / error_fine,
        expected_ratio: 2f64.powf(scheme_order(alpha)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subdiffusive_trajectory_is_positive_and_decreasing() {
        let y = trajectory(0.4, 3.0, 1.0, None, 1e-2, 5.0).unwrap();
        assert!(y.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
    }

    #[test]
    fn matches_mittag_leffler_and_order() {
        let check = order_check(0.5, 1.0, 1e-3, &[0.5, 1.0, 2.0]).unwrap();
        assert!(check.error_coarse < 1e-4);
        assert!((check.ratio / check.expected_ratio - 1.0).abs() < 0.2, "{check:?}");
        let y = trajectory(1.5, 1.0, 0.0, Some(1.0), 1e-3, 1.0).unwrap();
        let exact = mittag_leffler(1.5, 2.0, -1.0).unwrap();
        assert!((y[1000] - exact).abs() < 1e-4);
    }

    #[test]
    fn rejects_inconsistent_data() {
        assert!(trajectory(0.5, 1.0, 1.0, Some(0.0), 1e-2, 1.0).is_err());
        assert!(trajectory(1.5, 1.0, 1.0, None, 1e-2, 1.0).is_err());
        assert!(trajectory(1.0, 1.0, 1.0, None, 1e-2, 1.0).is_err());
    }
}
