//! Long-time expansion of an observed quantity in powers of `t^{-1}`.
//!
//! With `E_{α,β}(-η) ~ Σ_ℓ (-1)^{ℓ+1} η^{-ℓ} / Γ(β - αℓ)`, every observed
//! quantity splits into families of terms `Q t^{-s}`:
//!
//! | quantity | family | exponent `s` | coefficient |
//! |---|---|---|---|
//! | `u` | value | `αℓ` | `(-1)^{ℓ+1} F(A^{-ℓ} a) / Γ(1 - αℓ)` |
//! | `u` | velocity | `αℓ - 1` | `(-1)^{ℓ+1} F(A^{-ℓ} b) / Γ(2 - αℓ)` |
//! | `A u` | both | as for `u` | with `A^{1-ℓ}` in place of `A^{-ℓ}` |
//! | `∂_t^β u` | value | `α(ℓ-1) + β` | `(-1)^ℓ F(A^{1-ℓ} a) / Γ(1 - β - α(ℓ-1))` |
//!
//! A term whose Gamma argument is a non-positive integer is kept with a zero
//! coefficient and marked as vanishing.

use crate::error::{Error, Result};
use crate::observe::ObservationMap;
use crate::special::reciprocal_gamma;

use super::{FractionalProblem, ModalCoefficients, Order, Quantity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Driven by the initial value `a`.
    Value,
    /// Driven by the initial velocity `b`.
    Velocity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTerm {
    pub family: Family,
    pub ell: usize,
    /// Decay exponent `s` of `t^{-s}`.
    pub exponent: f64,
    /// `Q ∈ Y`, one entry per observation component.
    pub coefficient: Vec<f64>,
    /// `‖Q‖_Y`.
    pub norm: f64,
    /// The Gamma factor has a pole, so the term is identically zero.
    pub vanishing: bool,
    /// `‖Q‖` stands above the rounding floor of the modal sum.
    pub resolved: bool,
}

impl ExpansionTerm {
    /// Nonzero, not vanishing and above the rounding floor.
    pub fn is_significant(&self) -> bool {
        !self.vanishing && self.resolved
    }

    /// `Q` as a number: the single entry for scalar observations, else `‖Q‖`.
    pub fn scalar(&self) -> f64 {
        if self.coefficient.len() == 1 {
            self.coefficient[0]
        } else {
            self.norm
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticExpansion {
    /// Terms sorted by exponent.
    pub terms: Vec<ExpansionTerm>,
    /// Exponent of the first omitted non-vanishing term.
    pub remainder_exponent: f64,
    weights: Vec<f64>,
}

impl AsymptoticExpansion {
    /// `Σ Q_m t^{-s_m}`.
    pub fn evaluate(&self, t: f64) -> Vec<f64> {
        let dim = self.weights.len();
        let mut out = vec![0.0; dim];
        for term in &self.terms {
            let scale = t.powf(-term.exponent);
            out.iter_mut().zip(&term.coefficient).for_each(|(o, q)| *o += scale * q);
        }
        out
    }

    /// `‖Σ Q_m t^{-s_m}‖_Y`.
    pub fn evaluate_norm(&self, t: f64) -> f64 {
        self.evaluate(t)
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// The first significant term, if any.
    pub fn leading(&self) -> Option<&ExpansionTerm> {
        self.terms.iter().find(|t| t.is_significant())
    }
}

fn at_gamma_pole(x: f64) -> bool {
    let r = x.round();
    r <= 0.0 && (x - r).abs() < 1e-12
}

struct FamilyRule {
    family: Family,
    /// `s(ℓ)`.
    exponent: Box<dyn Fn(usize) -> f64>,
    /// Gamma argument of `ℓ`.
    gamma_arg: Box<dyn Fn(usize) -> f64>,
    /// Sign of `ℓ`.
    sign: Box<dyn Fn(usize) -> f64>,
    /// Power of `λ` applied to the data in term `ℓ`.
    power: Box<dyn Fn(usize) -> f64>,
}

fn rules(alpha: f64, quantity: Quantity, has_b: bool) -> Vec<FamilyRule> {
    let alt = |ell: usize| if ell % 2 == 1 { 1.0 } else { -1.0 };
    match quantity {
        Quantity::Field | Quantity::OperatorImage => {
            let shift = if quantity == Quantity::OperatorImage { 1.0 } else { 0.0 };
            let mut out = vec![FamilyRule {
                family: Family::Value,
                exponent: Box::new(move |l| alpha * l as f64),
                gamma_arg: Box::new(move |l| 1.0 - alpha * l as f64),
                sign: Box::new(alt),
                power: Box::new(move |l| shift - l as f64),
            }];
            if has_b {
                out.push(FamilyRule {
                    family: Family::Velocity,
                    exponent: Box::new(move |l| alpha * l as f64 - 1.0),
                    gamma_arg: Box::new(move |l| 2.0 - alpha * l as f64),
                    sign: Box::new(alt),
                    power: Box::new(move |l| shift - l as f64),
                });
            }
            out
        }
        Quantity::Caputo(beta) => vec![FamilyRule {
            family: Family::Value,
            exponent: Box::new(move |l| alpha * (l as f64 - 1.0) + beta),
            gamma_arg: Box::new(move |l| 1.0 - beta - alpha * (l as f64 - 1.0)),
            sign: Box::new(move |l| -alt(l)),
            power: Box::new(|l| 1.0 - l as f64),
        }],
    }
}

/// First `p` terms of each family for the quantity observed by `map`.
pub fn asymptotic_profile(
    problem: &FractionalProblem,
    map: &ObservationMap,
    p: usize,
) -> Result<AsymptoticExpansion> {
    let alpha = match problem.order() {
        Order::Fractional(alpha) => alpha,
        Order::Classical => {
            return Err(Error::OutOfScope(
                "the classical solution decays exponentially and has no algebraic expansion".into(),
            ))
        }
    };
    if p == 0 {
        return Err(Error::InvalidArgument("expansion depth p must be at least 1".into()));
    }
    let quantity = map.quantity();
    if matches!(quantity, Quantity::Caputo(_)) && alpha > 1.0 {
        return Err(Error::OutOfScope(
            "Caputo derivatives of the solution are available for 0 < alpha < 1 only".into(),
        ));
    }
    let basis = problem.basis();
    let lambdas = basis.eigenvalues();
    let sup = basis.sup_bound();
    let weight_mass = map.weights().iter().sum::<f64>().sqrt();
    let mut terms = Vec::new();
    let mut remainder = f64::INFINITY;
    for rule in rules(alpha, quantity, problem.initial_velocity().is_some()) {
        let data: &ModalCoefficients = match rule.family {
            Family::Value => problem.initial_value(),
            Family::Velocity => problem.initial_velocity().expect("rule exists only with b"),
        };
        for ell in 1..=p {
            let arg = (rule.gamma_arg)(ell);
            let vanishing = at_gamma_pole(arg);
            let g = if vanishing { 0.0 } else { (rule.sign)(ell) * reciprocal_gamma(arg) };
            let power = (rule.power)(ell);
            let state: Vec<Vec<f64>> = data
                .values
                .iter()
                .zip(lambdas)
                .map(|(row, &lambda)| {
                    let f = g * lambda.powf(power);
                    row.iter().map(|c| c * f).collect()
                })
                .collect();
            let coefficient = map.apply(basis, &state);
            let norm = coefficient
                .iter()
                .zip(map.weights())
                .map(|(v, w)| w * v * v)
                .sum::<f64>()
                .sqrt();
            let magnitude: f64 = data
                .values
                .iter()
                .zip(lambdas)
                .map(|(row, &lambda)| lambda.powf(power) * row.iter().map(|c| c * c).sum::<f64>().sqrt())
                .sum::<f64>()
                * g.abs()
                * sup
                * weight_mass.max(1.0);
            terms.push(ExpansionTerm {
                family: rule.family,
                ell,
                exponent: (rule.exponent)(ell),
                coefficient,
                norm,
                vanishing,
                resolved: norm > 1e-11 * magnitude,
            });
        }
        if let Some(next) = (p + 1..p + 64).find(|&l| !at_gamma_pole((rule.gamma_arg)(l))) {
            remainder = remainder.min((rule.exponent)(next));
        }
    }
    terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
    Ok(AsymptoticExpansion {
        terms,
        remainder_exponent: remainder,
        weights: map.weights().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::interval_basis;
    use crate::observe::ObservationSpec;
    use crate::par::Execution;
    use crate::solver::InitialData;
    use crate::special::gamma_real;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn point(quantity: Quantity) -> ObservationSpec {
        ObservationSpec::point(vec![PI / 2.0], quantity)
    }

    #[test]
    fn leading_terms_of_the_examples() {
        let basis = Arc::new(interval_basis(PI, 16).unwrap());
        let p = FractionalProblem::from_data(0.5, basis.clone(), &InitialData::sin_mode(1), None, Execution::Sequential)
            .unwrap();
        let map = ObservationMap::new(point(Quantity::Field), &basis).unwrap();
        let e = asymptotic_profile(&p, &map, 1).unwrap();
        let lead = e.leading().unwrap();
        assert_eq!(lead.exponent, 0.5);
        assert!((lead.scalar() - 1.0 / gamma_real(0.5).unwrap()).abs() < 1e-14);

        let w = FractionalProblem::from_data(
            1.5,
            basis.clone(),
            &InitialData::Zero,
            Some(&InitialData::sin_mode(1)),
            Execution::Sequential,
        )
        .unwrap();
        let e = asymptotic_profile(&w, &map, 1).unwrap();
        let lead = e.leading().unwrap();
        assert_eq!((lead.family, lead.exponent), (Family::Velocity, 0.5));
        assert!((lead.scalar() - 1.0 / gamma_real(0.5).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn vanishing_terms_are_kept() {
        let basis = Arc::new(interval_basis(PI, 8).unwrap());
        let p = FractionalProblem::from_data(0.5, basis.clone(), &InitialData::sin_mode(1), None, Execution::Sequential)
            .unwrap();
        let map = ObservationMap::new(point(Quantity::Field), &basis).unwrap();
        let e = asymptotic_profile(&p, &map, 3).unwrap();
        let second = e.terms.iter().find(|t| t.ell == 2).unwrap();
        assert!(second.vanishing);
        assert_eq!(second.coefficient, vec![0.0]);
        assert_eq!(e.remainder_exponent, 2.5);
        let classical = FractionalProblem::from_data(1.0, basis.clone(), &InitialData::sin_mode(1), None, Execution::Sequential)
            .unwrap();
        assert!(matches!(asymptotic_profile(&classical, &map, 1), Err(Error::OutOfScope(_))));
    }

    #[test]
    fn operator_image_leading_term_is_the_initial_value() {
        let basis = Arc::new(interval_basis(PI, 32).unwrap());
        let a = InitialData::PolynomialBump { amplitude: 1.0 };
        let p = FractionalProblem::from_data(0.3, basis.clone(), &a, None, Execution::Sequential).unwrap();
        let map = ObservationMap::new(point(Quantity::OperatorImage), &basis).unwrap();
        let e = asymptotic_profile(&p, &map, 2).unwrap();
        let lead = &e.terms[0];
        let truncated: f64 = p.field(&[PI / 2.0], 0.0).unwrap().value;
        assert!((lead.scalar() - truncated / gamma_real(0.7).unwrap()).abs() < 1e-12);
    }
}
