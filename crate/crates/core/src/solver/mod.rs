//! Spectral solution of `∂_t^α u + A u = 0` with `u(0) = a` and, for
//! `1 < α < 2`, `∂_t u(0) = b`.
//!
//! Each eigenspace evolves by a scalar factor:
//! `E_{α,1}(-λ t^α)` for `a`, `t E_{α,2}(-λ t^α)` for `b`, and `e^{-λt}` in the
//! classical case `α = 1`.

mod data;
mod expansion;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use data::{project, InitialData, ModalCoefficients};
pub use expansion::{asymptotic_profile, AsymptoticExpansion, ExpansionTerm, Family};

use crate::basis::SpectralBasis;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::special::{decay_constant, ml_eval, MLParams};

/// Smallest admissible `|α - 1|` for a fractional order.
pub const MIN_DISTANCE_FROM_ONE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    /// `α = 1`: heat equation.
    Classical,
    Fractional(f64),
}

impl Order {
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 2.0 {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} must lie in (0, 2)")));
        }
        if alpha == 1.0 {
            return Ok(Order::Classical);
        }
        if (alpha - 1.0).abs() < MIN_DISTANCE_FROM_ONE {
            return Err(Error::InvalidArgument(format!(
                "alpha = {alpha} is within {MIN_DISTANCE_FROM_ONE} of 1; use alpha = 1 for the classical equation"
            )));
        }
        Ok(Order::Fractional(alpha))
    }

    pub fn alpha(self) -> f64 {
        match self {
            Order::Classical => 1.0,
            Order::Fractional(a) => a,
        }
    }

    /// `1 < α < 2`: an initial velocity is part of the data.
    pub fn is_wave(self) -> bool {
        self.alpha() > 1.0
    }
}

/// What is observed of the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `u`.
    Field,
    /// `A u`.
    OperatorImage,
    /// Caputo derivative `∂_t^β u`, `0 < β < 1`, for `0 < α < 1`.
    Caputo(f64),
}

/// A value with an optional bound on the truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub value: f64,
    pub tail_bound: Option<f64>,
}

/// Whether the initial data are known to have one sign on the domain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SignInfo {
    pub a: bool,
    pub b: bool,
}

#[derive(Debug, Clone)]
pub struct FractionalProblem {
    order: Order,
    basis: Arc<SpectralBasis>,
    a: ModalCoefficients,
    b: Option<ModalCoefficients>,
    sign: SignInfo,
    exec: Execution,
    /// `C` in `|E_{α,β}(-η)| ≤ C/(1+η)` for `β = 1, 2`.
    bounds: [f64; 2],
}

impl FractionalProblem {
    pub fn new(
        alpha: f64,
        basis: Arc<SpectralBasis>,
        a: ModalCoefficients,
        b: Option<ModalCoefficients>,
    ) -> Result<Self> {
        let order = Order::from_alpha(alpha)?;
        match (&b, order.is_wave()) {
            (None, true) => {
                return Err(Error::InvalidArgument(format!(
                    "alpha = {alpha} > 1 needs an initial velocity"
                )))
            }
            (Some(_), false) => {
                return Err(Error::InvalidArgument(format!(
                    "alpha = {alpha} <= 1 takes no initial velocity"
                )))
            }
            _ => {}
        }
        let shape = basis.multiplicities();
        for c in std::iter::once(&a).chain(b.as_ref()) {
            let ok = c.values.len() == shape.len() && c.values.iter().zip(&shape).all(|(v, &d)| v.len() == d);
            if !ok {
                return Err(Error::InvalidArgument("coefficients do not match the basis".into()));
            }
        }
        let bounds = match order {
            Order::Classical => [1.0, 1.0],
            Order::Fractional(alpha) => [
                decay_constant(MLParams::new(alpha, 1.0)?)?,
                decay_constant(MLParams::new(alpha, 2.0)?)?,
            ],
        };
        Ok(Self {
            order,
            basis,
            a,
            b,
            sign: SignInfo::default(),
            exec: Execution::default(),
            bounds,
        })
    }

    /// Project `a` (and `b`) onto `basis` and build the problem.
    pub fn from_data(
        alpha: f64,
        basis: Arc<SpectralBasis>,
        a: &InitialData,
        b: Option<&InitialData>,
        exec: Execution,
    ) -> Result<Self> {
        let ca = project(&basis, a, exec)?;
        let cb = b.map(|b| project(&basis, b, exec)).transpose()?;
        Ok(Self::new(alpha, basis, ca, cb)?.with_execution(exec))
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_sign_info(mut self, sign: SignInfo) -> Self {
        self.sign = sign;
        self
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.order.alpha()
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> Arc<SpectralBasis> {
        Arc::clone(&self.basis)
    }

    pub fn initial_value(&self) -> &ModalCoefficients {
        &self.a
    }

    pub fn initial_velocity(&self) -> Option<&ModalCoefficients> {
        self.b.as_ref()
    }

    pub fn sign_info(&self) -> SignInfo {
        self.sign
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    /// Per-eigenspace time factors `(for a, for b)` of `quantity` at time `t`.
    /// The `b` vector is empty when there is no initial velocity.
    pub fn factors(&self, quantity: Quantity, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("time t = {t} must be finite and non-negative")));
        }
        let lambdas = self.basis.eigenvalues();
        let has_b = self.b.is_some();
        match quantity {
            Quantity::Field | Quantity::OperatorImage => {
                let scale = |lambda: f64| if quantity == Quantity::OperatorImage { lambda } else { 1.0 };
                let pairs = par::map_slice(self.exec, lambdas, |&lambda| -> Result<(f64, f64)> {
                    let (fa, fb) = match self.order {
                        Order::Classical => ((-lambda * t).exp(), 0.0),
                        Order::Fractional(alpha) => {
                            let z = -lambda * t.powf(alpha);
                            let fa = ml_eval(MLParams::new(alpha, 1.0)?, z)?.value;
                            let fb = if has_b {
                                t * ml_eval(MLParams::new(alpha, 2.0)?, z)?.value
                            } else {
                                0.0
                            };
                            (fa, fb)
                        }
                    };
                    Ok((scale(lambda) * fa, scale(lambda) * fb))
                });
                let pairs: Vec<(f64, f64)> = pairs.into_iter().collect::<Result<_>>()?;
                let (fa, fb): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
                Ok((fa, if has_b { fb } else { Vec::new() }))
            }
            Quantity::Caputo(beta) => {
                let alpha = match self.order {
                    Order::Fractional(alpha) if alpha < 1.0 => alpha,
                    _ => {
                        return Err(Error::OutOfScope(
                            "Caputo derivatives of the solution are available for 0 < alpha < 1 only".into(),
                        ))
                    }
                };
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(Error::InvalidArgument(format!("beta = {beta} must lie in (0, 1)")));
                }
                if !(t > 0.0) {
                    return Err(Error::Domain("the Caputo derivative is evaluated at t > 0".into()));
                }
                let params = MLParams::new(alpha, alpha + 1.0 - beta)?;
                let lead = t.powf(alpha - beta);
                let fa = par::map_slice(self.exec, lambdas, |&lambda| -> Result<f64> {
                    Ok(-lambda * lead * ml_eval(params, -lambda * t.powf(alpha))?.value)
                });
                Ok((fa.into_iter().collect::<Result<_>>()?, Vec::new()))
            }
        }
    }

    /// Modal state of `quantity` at `t`, arranged like the coefficients.
    pub fn evolve(&self, quantity: Quantity, t: f64) -> Result<Vec<Vec<f64>>> {
        let (fa, fb) = self.factors(quantity, t)?;
        let mut out: Vec<Vec<f64>> = self
            .a
            .values
            .iter()
            .zip(&fa)
            .map(|(c, f)| c.iter().map(|x| x * f).collect())
            .collect();
        if let Some(b) = &self.b {
            for ((row, c), f) in out.iter_mut().zip(&b.values).zip(&fb) {
                row.iter_mut().zip(c).for_each(|(r, x)| *r += x * f);
            }
        }
        Ok(out)
    }

    /// Pointwise value of `quantity` at `(x, t)`.
    pub fn value(&self, quantity: Quantity, x: &[f64], t: f64) -> Result<FieldValue> {
        self.basis.check_point(x)?;
        let state = self.evolve(quantity, t)?;
        let mut value = 0.0;
        for (n, row) in state.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                if *c != 0.0 {
                    value += c * self.basis.eval(n, k, x);
                }
            }
        }
        let tail_bound = if quantity == Quantity::Field { self.tail_bound(t) } else { None };
        Ok(FieldValue { value, tail_bound })
    }

    /// `u(x, t)` with a truncation bound for `t ≥ 1`.
    pub fn field(&self, x: &[f64], t: f64) -> Result<FieldValue> {
        self.value(Quantity::Field, x, t)
    }

    /// `(A u)(x, t)`.
    pub fn apply_operator(&self, x: &[f64], t: f64) -> Result<f64> {
        Ok(self.value(Quantity::OperatorImage, x, t)?.value)
    }

    /// `∂_t^β u(x, t)` for `0 < α < 1`.
    pub fn caputo_derivative(&self, beta: f64, x: &[f64], t: f64) -> Result<f64> {
        Ok(self.value(Quantity::Caputo(beta), x, t)?.value)
    }

    /// Truncated `‖A^{γ/2} u(t)‖` in `L²`.
    pub fn sobolev_norm(&self, t: f64, gamma: f64) -> Result<f64> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidArgument(format!("gamma = {gamma} must be non-negative")));
        }
        let state = self.evolve(Quantity::Field, t)?;
        let sum: f64 = state
            .iter()
            .zip(self.basis.eigenvalues())
            .map(|(row, &lambda)| lambda.powf(gamma) * row.iter().map(|c| c * c).sum::<f64>())
            .sum();
        Ok(sum.sqrt())
    }

    /// Bound on `sup |u - u_N|` at `t ≥ 1` from the Parseval residual of the
    /// data, the eigenfunction sup bound and Weyl growth `λ_n ~ n^{2/d}`.
    pub fn tail_bound(&self, t: f64) -> Option<f64> {
        if t < 1.0 {
            return None;
        }
        let counted = self.basis.counted_eigenvalues().len().max(1) as f64;
        let growth = 2.0 / self.basis.dimension() as f64;
        // first omitted eigenvalue, extrapolated along Weyl growth in 1D
        let cut = match self.basis.complete_below() {
            c if c.is_finite() => c,
            _ => {
                let last = *self.basis.eigenvalues().last()?;
                last * ((counted + 1.0) / counted).powf(growth)
            }
        };
        if !(cut > 0.0) {
            return None;
        }
        let sup = self.basis.sup_bound();
        let eps_a = self.a.tail_norm();
        let eps_b = self.b.as_ref().map_or(0.0, |b| b.tail_norm());
        match self.order {
            Order::Classical => {
                let spread = (1.0 + counted / (2.0 * growth * cut * t)).sqrt();
                Some(sup * eps_a * (-cut * t).exp() * spread)
            }
            Order::Fractional(alpha) => {
                if 2.0 * growth <= 1.0 {
                    return None;
                }
                let inverse_sq = (counted / (2.0 * growth - 1.0)).sqrt() / cut;
                let a_part = self.bounds[0] * eps_a * t.powf(-alpha);
                let b_part = self.bounds[1] * eps_b * t.powf(1.0 - alpha);
                Some(sup * (a_part + b_part) * inverse_sq)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::interval_basis;
    use crate::special::{gamma_real, mittag_leffler};
    use std::f64::consts::PI;

    fn basis() -> Arc<SpectralBasis> {
        Arc::new(interval_basis(PI, 32).unwrap())
    }

    #[test]
    fn rejects_bad_orders_and_data() {
        let b = basis();
        let a = || project(&b, &InitialData::sin_mode(1), Execution::Sequential).unwrap();
        assert!(FractionalProblem::new(1.0005, b.clone(), a(), None).is_err());
        assert!(FractionalProblem::new(2.0, b.clone(), a(), None).is_err());
        assert!(FractionalProblem::new(1.5, b.clone(), a(), None).is_err());
        assert!(FractionalProblem::new(0.5, b.clone(), a(), Some(a())).is_err());
        assert_eq!(FractionalProblem::new(1.0, b.clone(), a(), None).unwrap().order(), Order::Classical);
    }

    #[test]
    fn single_mode_matches_mittag_leffler() {
        let p = FractionalProblem::from_data(0.5, basis(), &InitialData::sin_mode(2), None, Execution::Parallel)
            .unwrap();
        for &t in &[0.0, 0.3, 2.0, 50.0] {
            let x = [0.4];
            let exact = mittag_leffler(0.5, 1.0, -4.0 * f64::powf(t, 0.5)).unwrap() * (0.8f64).sin();
            assert!((p.field(&x, t).unwrap().value - exact).abs() < 1e-13);
        }
        let u0 = p.field(&[PI / 4.0], 0.0).unwrap().value;
        assert!((u0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn caputo_of_order_alpha_is_minus_operator_image() {
        let a = InitialData::PolynomialBump { amplitude: 1.0 };
        let p = FractionalProblem::from_data(0.6, basis(), &a, None, Execution::Sequential).unwrap();
        for &t in &[0.5, 3.0, 40.0] {
            let d = p.caputo_derivative(0.6, &[1.0], t).unwrap();
            let au = p.apply_operator(&[1.0], t).unwrap();
            assert!((d + au).abs() < 1e-9 * (1.0 + au.abs()), "t = {t}");
        }
        let wave = FractionalProblem::from_data(
            1.5,
            basis(),
            &InitialData::Zero,
            Some(&InitialData::sin_mode(1)),
            Execution::Sequential,
        )
        .unwrap();
        assert!(matches!(wave.caputo_derivative(0.5, &[1.0], 1.0), Err(Error::OutOfScope(_))));
    }

    #[test]
    fn velocity_term_and_long_time_limit() {
        let p = FractionalProblem::from_data(
            1.5,
            basis(),
            &InitialData::Zero,
            Some(&InitialData::sin_mode(1)),
            Execution::Sequential,
        )
        .unwrap();
        let t = 1e6;
        let u = p.field(&[PI / 2.0], t).unwrap().value;
        let lead = 1.0 / gamma_real(0.5).unwrap();
        assert!((u * t.powf(0.5) / lead - 1.0).abs() < 1e-2);
    }

    #[test]
    fn tail_bound_dominates_truncation_error() {
        let a = InitialData::PolynomialBump { amplitude: 1.0 };
        let fine = FractionalProblem::from_data(0.5, Arc::new(interval_basis(PI, 256).unwrap()), &a, None, Execution::Parallel)
            .unwrap();
        let coarse = FractionalProblem::from_data(0.5, Arc::new(interval_basis(PI, 8).unwrap()), &a, None, Execution::Parallel)
            .unwrap();
        for &t in &[1.0, 10.0, 1e3] {
            let x = [1.1];
            let c = coarse.field(&x, t).unwrap();
            let f = fine.field(&x, t).unwrap();
            assert!((c.value - f.value).abs() <= c.tail_bound.unwrap(), "t = {t}");
        }
    }

    #[test]
    fn sobolev_norm_at_zero() {
        let p = FractionalProblem::from_data(0.5, basis(), &InitialData::sin_mode(3), None, Execution::Sequential)
            .unwrap();
        let n = p.sobolev_norm(0.0, 2.0).unwrap();
        assert!((n - 9.0 * (PI / 2.0).sqrt()).abs() < 1e-12);
    }
}
