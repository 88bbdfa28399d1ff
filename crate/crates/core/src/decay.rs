//! Power-law fits of observed time series and the verdicts drawn from them.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::observe::{ObservationMap, ObservationSpec, Target};
use crate::solver::{FractionalProblem, Order, Quantity};

/// Minimum number of samples for any fit.
pub const MIN_FIT_SAMPLES: usize = 8;
/// Distance in exponent that separates "faster than critical" from "critical".
pub const RATE_MARGIN: f64 = 0.1;
/// Largest rms log10 residual of a fit that is trusted.
pub const RESIDUAL_LIMIT: f64 = 0.05;
/// Per-τ tolerance of the superpolynomial detector.
pub const LADDER_TOLERANCE: f64 = 0.05;
/// Largest condition number accepted by [`extract_coefficients`].
pub const COEFFICIENT_CONDITION_LIMIT: f64 = 1e3;
/// Largest scaled condition number accepted by [`moment_nullity`].
pub const MOMENT_CONDITION_LIMIT: f64 = 1e13;
/// Classification needs samples from at most this time ...
pub const CLASSIFY_WINDOW_START: f64 = 1e2;
/// ... up to at least this one.
pub const CLASSIFY_MIN_END: f64 = 1e5;

#[derive(Debug, Clone, PartialEq)]
pub struct DecaySamples {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl DecaySamples {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("times must be positive and values finite".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("times must be strictly increasing".into()));
        }
        Ok(Self { times, values })
    }

    /// Samples of `f` on `count` log-spaced times in `[t0, t1]`.
    pub fn log_spaced(t0: f64, t1: f64, count: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let times = log_grid(t0, t1, count)?;
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Samples with `lo ≤ t ≤ hi`.
    pub fn window(&self, lo: f64, hi: f64) -> DecaySamples {
        let (times, values) = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t >= lo * (1.0 - 1e-12) && **t <= hi * (1.0 + 1e-12))
            .map(|(t, v)| (*t, *v))
            .unzip();
        DecaySamples { times, values }
    }
}

/// `count ≥ 2` log-spaced points from `t0` to `t1` inclusive.
pub fn log_grid(t0: f64, t1: f64, count: usize) -> Result<Vec<f64>> {
    if !(t0 > 0.0 && t1 > t0 && t1.is_finite()) || count < 2 {
        return Err(Error::InvalidArgument(format!(
            "log grid needs 0 < t0 < t1 and at least two points, got [{t0}, {t1}] with {count}"
        )));
    }
    let (l0, l1) = (t0.ln(), t1.ln());
    Ok((0..count)
        .map(|i| match i {
            0 => t0,
            i if i == count - 1 => t1,
            i => (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    /// Slope of `log|value|` against `log t`.
    pub exponent: f64,
    /// Prefactor `A` in `|value| ≈ A t^{exponent}`.
    pub amplitude: f64,
    /// Root-mean-square residual in decades.
    pub rms_residual: f64,
    pub samples_used: usize,
    /// Times actually fitted.
    pub span: (f64, f64),
    /// The window contained a sign change; only the tail after it was used.
    pub sign_change: bool,
}

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Least-squares line through `(log t, log |v|)` on `window` (all samples
/// when `None`). A sign change or exact zero inside the window splits it and
/// the segment after the last change is fitted.
pub fn fit_power_law(samples: &DecaySamples, window: Option<(f64, f64)>) -> Result<DecayFit> {
    let w = match window {
        Some((lo, hi)) => samples.window(lo, hi),
        None => samples.clone(),
    };
    if w.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            required: MIN_FIT_SAMPLES,
            available: w.len(),
        });
    }
    if w.values.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateSamples("every sample in the window is zero".into()));
    }
    let last_sign = w.values.iter().rev().find(|&&v| v != 0.0).map(|v| v.signum()).unwrap();
    let trailing_zero = *w.values.last().unwrap() == 0.0;
    if trailing_zero {
        return Err(Error::DegenerateSamples(
            "the series reaches exact zero inside the window".into(),
        ));
    }
    let start = w
        .values
        .iter()
        .rposition(|&v| v == 0.0 || v.signum() != last_sign)
        .map_or(0, |i| i + 1);
    let used = w.len() - start;
    if used < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            required: MIN_FIT_SAMPLES,
            available: used,
        });
    }
    let x: Vec<f64> = w.times[start..].iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = w.values[start..].iter().map(|v| v.abs().ln()).collect();
    let (slope, intercept, rms) = line_fit(&x, &y);
    Ok(DecayFit {
        exponent: slope,
        amplitude: intercept.exp(),
        rms_residual: rms / std::f64::consts::LN_10,
        samples_used: used,
        span: (w.times[start], *w.times.last().unwrap()),
        sign_change: start > 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderCheck {
    pub tau: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperpolynomialReport {
    pub superpolynomial: bool,
    /// Tail exponent; `-∞` when the tail is exactly zero.
    pub exponent: f64,
    pub rms_residual: f64,
    pub checks: Vec<LadderCheck>,
    /// The tail fit is too poor to judge and the decline is not steepening.
    pub undetermined: bool,
}

/// Whether the series decays faster than every `t^{-τ}` in `taus`, judged
/// on the last `decades` decades of samples.
pub fn detect_superpolynomial(samples: &DecaySamples, taus: &[f64], decades: f64) -> Result<SuperpolynomialReport> {
    if taus.is_empty() || taus.iter().any(|t| !(*t > 0.0)) || taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("tau ladder must be increasing and positive".into()));
    }
    if samples.is_empty() {
        return Err(Error::InsufficientSamples {
            required: MIN_FIT_SAMPLES,
            available: 0,
        });
    }
    let t_end = *samples.times.last().unwrap();
    let tail = samples.window(t_end / 10f64.powf(decades), t_end);
    let decided = |exponent: f64, rms: f64, undetermined: bool| {
        let checks: Vec<LadderCheck> = taus
            .iter()
            .map(|&tau| LadderCheck {
                tau,
                passed: !undetermined && exponent <= -tau + LADDER_TOLERANCE,
            })
            .collect();
        SuperpolynomialReport {
            superpolynomial: checks.iter().all(|c| c.passed),
            exponent,
            rms_residual: rms,
            checks,
            undetermined,
        }
    };
    // underflow to exact zero after a decline beats every power
    if tail.values.iter().all(|&v| v == 0.0) || *tail.values.last().unwrap() == 0.0 {
        return Ok(decided(f64::NEG_INFINITY, 0.0, false));
    }
    let fit = fit_power_law(&tail, None)?;
    if fit.rms_residual <= RESIDUAL_LIMIT {
        return Ok(decided(fit.exponent, fit.rms_residual, false));
    }
    // a poor straight-line fit is acceptable when the log-log curve bends down
    let k = tail.len();
    let terminal = fit_power_law(
        &DecaySamples {
            times: tail.times[k - MIN_FIT_SAMPLES..].to_vec(),
            values: tail.values[k - MIN_FIT_SAMPLES..].to_vec(),
        },
        None,
    )?;
    if terminal.exponent < fit.exponent {
        Ok(decided(terminal.exponent, fit.rms_residual, false))
    } else {
        Ok(decided(fit.exponent, fit.rms_residual, true))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFit {
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// Condition number of the column-scaled, relatively weighted design.
    pub condition: f64,
    /// Largest relative misfit over the samples.
    pub max_relative_residual: f64,
}

/// Least-squares estimate of `Q_m` in `v(t) ≈ Σ Q_m t^{-s_m}`, with rows
/// weighted by `1/|v|` so every decade counts equally.
pub fn extract_coefficients(samples: &DecaySamples, exponents: &[f64]) -> Result<CoefficientFit> {
    if exponents.is_empty() || exponents.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("exponents must be strictly increasing".into()));
    }
    let rows: Vec<(f64, f64)> = samples
        .times
        .iter()
        .zip(&samples.values)
        .filter(|(_, v)| **v != 0.0)
        .map(|(t, v)| (*t, *v))
        .collect();
    let m = exponents.len();
    if rows.len() < MIN_FIT_SAMPLES.max(m) {
        return Err(Error::InsufficientSamples {
            required: MIN_FIT_SAMPLES.max(m),
            available: rows.len(),
        });
    }
    let mut design = DMatrix::from_fn(rows.len(), m, |i, j| rows[i].0.powf(-exponents[j]) / rows[i].1.abs());
    let mut scales = vec![0.0; m];
    for j in 0..m {
        let s = design.column(j).norm();
        scales[j] = s;
        design.column_mut(j).scale_mut(1.0 / s);
    }
    let rhs = DVector::from_iterator(rows.len(), rows.iter().map(|(_, v)| v.signum()));
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (max, min) = sv.iter().fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if condition > COEFFICIENT_CONDITION_LIMIT {
        return Err(Error::IllConditioned(format!(
            "exponents {exponents:?} are not separable on this time span (condition {condition:.3e})"
        )));
    }
    let scaled = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let coefficients: Vec<f64> = scaled.iter().zip(&scales).map(|(c, s)| c / s).collect();
    let max_relative_residual = rows
        .iter()
        .map(|(t, v)| {
            let model: f64 = coefficients.iter().zip(exponents).map(|(q, s)| q * t.powf(-s)).sum();
            ((model - v) / v).abs()
        })
        .fold(0.0, f64::max);
    Ok(CoefficientFit {
        exponents: exponents.to_vec(),
        coefficients,
        condition,
        max_relative_residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSolution {
    pub p: Vec<f64>,
    /// Condition number of the row-equilibrated system.
    pub condition: f64,
    /// All moments were below the zero tolerance and `p ≡ 0` is certified
    /// for the `N` modes considered.
    pub zero_certificate: bool,
    pub modes: usize,
}

fn dot2(a: &[f64], b: &[f64]) -> f64 {
    // compensated dot product
    let mut s = 0.0;
    let mut c = 0.0;
    for (x, y) in a.iter().zip(b) {
        let p = x * y;
        let e = x.mul_add(*y, -p);
        let t = s + p;
        let z = t - s;
        c += (s - (t - z)) + (p - z) + e;
        s = t;
    }
    s + c
}

fn pow2_floor(x: f64) -> f64 {
    2f64.powi(x.log2().floor() as i32)
}

/// `Σ_n p_n λ_n^{-ℓ_m}` for each `ℓ_m`.
pub fn forward_moments(lambdas: &[f64], ells: &[f64], p: &[f64]) -> Vec<f64> {
    ells.iter()
        .map(|&l| {
            let row: Vec<f64> = lambdas.iter().map(|&lambda| lambda.powf(-l)).collect();
            dot2(&row, p)
        })
        .collect()
}

/// Recover `p` from `moments[m] = Σ_n p_n λ_n^{-ℓ_m}`. Only the `N` given
/// modes are considered.
pub fn moment_nullity(lambdas: &[f64], ells: &[f64], moments: &[f64]) -> Result<MomentSolution> {
    let n = lambdas.len();
    if n == 0 || ells.len() != n || moments.len() != n {
        return Err(Error::InvalidArgument(format!(
            "need as many exponents and moments as eigenvalues ({n})"
        )));
    }
    if n > 12 {
        return Err(Error::InvalidArgument(format!("at most 12 modes are supported, got {n}")));
    }
    if lambdas.iter().any(|l| !(*l > 0.0)) || lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("eigenvalues must be positive and strictly increasing".into()));
    }
    if ells.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("exponents must be strictly increasing".into()));
    }
    let rows: Vec<Vec<f64>> = ells
        .iter()
        .map(|&l| lambdas.iter().map(|&lambda| lambda.powf(-l)).collect())
        .collect();
    // equilibrate rows and columns before judging conditioning; powers of
    // two keep the scaled system exactly equal to the one the moments came from
    let row_scale: Vec<f64> = rows
        .iter()
        .map(|r| pow2_floor(r.iter().fold(0.0f64, |m, v| m.max(v.abs()))))
        .collect();
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j] / row_scale[i]);
    let col_scale: Vec<f64> = (0..n).map(|j| pow2_floor(a.column(j).amax())).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| a[(i, j)] / col_scale[j]);
    let sv = scaled.clone().singular_values();
    let (max, min) = sv.iter().fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if condition > MOMENT_CONDITION_LIMIT {
        return Err(Error::IllConditioned(format!(
            "moment system with eigenvalues {lambdas:?} has condition {condition:.3e}"
        )));
    }
    let scale = moments.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(MomentSolution {
            p: vec![0.0; n],
            condition,
            zero_certificate: true,
            modes: n,
        });
    }
    let b = DVector::from_iterator(n, moments.iter().zip(&row_scale).map(|(m, s)| m / s));
    let lu = scaled.clone().lu();
    let mut y = lu
        .solve(&b)
        .ok_or_else(|| Error::IllConditioned("singular moment system".into()))?;
    let scaled_rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| scaled[(i, j)]).collect()).collect();
    for _ in 0..3 {
        let yv: Vec<f64> = y.iter().copied().collect();
        let r = DVector::from_iterator(n, (0..n).map(|i| b[i] - dot2(&scaled_rows[i], &yv)));
        if let Some(d) = lu.solve(&r) {
            y += d;
        }
    }
    let p: Vec<f64> = y.iter().zip(&col_scale).map(|(v, s)| v / s).collect();
    Ok(MomentSolution {
        p,
        condition,
        zero_certificate: false,
        modes: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Vanishes,
    Nonzero,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Vanishes => "vanishes",
            Verdict::Nonzero => "nonzero",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// The implication a claim rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Decay faster than `t^{-α}` on a subdomain forces `a = 0` there.
    SubdomainValueRate,
    /// Decay faster than `t^{-(α-1)}` on a subdomain forces `b = 0` there,
    /// and faster than `t^{-α}` forces `a = 0` as well.
    SubdomainVelocityRate,
    /// A one-signed initial datum vanishing on a subdomain vanishes everywhere.
    SignDefiniteUpgrade,
    /// `A u(x₀, t)` decays faster than the critical rate iff the initial
    /// datum vanishes at `x₀`.
    PointOperatorImage,
    /// For one-signed data, `u(x₀, t)` decays faster than the critical rate
    /// iff the datum vanishes identically.
    PointSignDefinite,
    /// `∂_t^β u(x₀, t)` decays faster than `t^{-β}` iff `u(x₀, 0) = 0`.
    PointCaputo,
    /// The leading expansion coefficient is nonzero exactly when the
    /// critical rate is attained.
    LeadingTerm,
    /// Superpolynomial decay of a fractional solution forces `u ≡ 0`.
    Superpolynomial,
    /// No rule applies to the data at hand.
    NotApplicable,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::SubdomainValueRate => "subdomain decay beyond t^-alpha",
            Rule::SubdomainVelocityRate => "subdomain decay beyond t^-(alpha-1)",
            Rule::SignDefiniteUpgrade => "sign-definite data, local to global",
            Rule::PointOperatorImage => "point value of A u, iff",
            Rule::PointSignDefinite => "point value of u for sign-definite data, iff",
            Rule::PointCaputo => "point value of the Caputo derivative, iff",
            Rule::LeadingTerm => "leading expansion coefficient",
            Rule::Superpolynomial => "superpolynomial decay forces the zero solution",
            Rule::NotApplicable => "no applicable rule",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub quantity: String,
    pub verdict: Verdict,
    pub rule: Rule,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationVerdict {
    pub claims: Vec<Claim>,
    pub fit: Option<DecayFit>,
    pub superpolynomial: Option<SuperpolynomialReport>,
    pub notes: Vec<String>,
}

impl ClassificationVerdict {
    /// Claim about `quantity`, if one was made.
    pub fn claim(&self, quantity: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.quantity == quantity)
    }

    pub fn any(&self, verdict: Verdict) -> bool {
        self.claims.iter().any(|c| c.verdict == verdict)
    }
}

impl fmt::Display for ClassificationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(fit) = &self.fit {
            writeln!(
                f,
                "fit: exponent {:.6} amplitude {:.6e} rms {:.2e} decades on t in [{:.3e}, {:.3e}] ({} samples{})",
                fit.exponent,
                fit.amplitude,
                fit.rms_residual,
                fit.span.0,
                fit.span.1,
                fit.samples_used,
                if fit.sign_change { ", after sign change" } else { "" }
            )?;
        }
        if let Some(s) = &self.superpolynomial {
            write!(f, "superpolynomial: {} (tail exponent {:.4})", s.superpolynomial, s.exponent)?;
            for c in &s.checks {
                write!(f, " tau={}:{}", c.tau, if c.passed { "pass" } else { "fail" })?;
            }
            writeln!(f)?;
        }
        for c in &self.claims {
            writeln!(f, "claim: {} {} [rule: {}] {}", c.quantity, c.verdict, c.rule, c.evidence)?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// Where a rate test places an observed exponent relative to `critical`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rate {
    Faster,
    Critical,
    Slower,
}

fn rate(exponent: f64, critical: f64) -> Rate {
    if exponent < critical - RATE_MARGIN {
        Rate::Faster
    } else if exponent <= critical + RATE_MARGIN {
        Rate::Critical
    } else {
        Rate::Slower
    }
}

struct Labels {
    /// Quantity that vanishes when the decay beats the rate.
    local: String,
    /// Quantity known nonzero at the critical rate.
    critical: String,
    rule: Rule,
    /// Global quantity for sign-definite data after a local vanishing.
    upgrade: Option<String>,
}

fn labels(target: &Target, quantity: Quantity, velocity: bool, sign: bool) -> Labels {
    let datum = if velocity { "b" } else { "a" };
    let point_datum = if velocity { "∂t u(x0,0)" } else { "u(x0,0)" };
    let subdomain_rule = if velocity {
        Rule::SubdomainVelocityRate
    } else {
        Rule::SubdomainValueRate
    };
    let in_omega = format!("{datum} in Ω");
    let simple = |q: String, rule: Rule| Labels {
        local: q.clone(),
        critical: q,
        rule,
        upgrade: None,
    };
    match (target, quantity) {
        (Target::Subdomain { .. }, Quantity::Field) => Labels {
            local: format!("{datum} on ω"),
            critical: in_omega.clone(),
            rule: subdomain_rule,
            upgrade: sign.then_some(in_omega),
        },
        (Target::Subdomain { .. }, Quantity::OperatorImage) => Labels {
            local: format!("{datum} on ω"),
            critical: format!("{datum} on ω"),
            rule: subdomain_rule,
            upgrade: sign.then_some(in_omega),
        },
        (Target::Points { .. }, Quantity::OperatorImage) => simple(point_datum.into(), Rule::PointOperatorImage),
        (Target::Points { .. }, Quantity::Caputo(_)) => simple(point_datum.into(), Rule::PointCaputo),
        (Target::Points { .. }, Quantity::Field) if sign => simple(in_omega, Rule::PointSignDefinite),
        (Target::Points { .. }, Quantity::Field) => simple(format!("(A^-1 {datum})(x0)"), Rule::LeadingTerm),
        (_, Quantity::Field) => simple(format!("F(A^-1 {datum})"), Rule::LeadingTerm),
        (_, _) => simple(format!("F({datum})"), Rule::LeadingTerm),
    }
}

/// Verdicts about the initial data drawn from the observed decay of
/// `samples`, which must cover `t ∈ [1e2, ≥ 1e5]`.
pub fn classify_initial_value(
    problem: &FractionalProblem,
    spec: &ObservationSpec,
    samples: &DecaySamples,
) -> Result<ClassificationVerdict> {
    let mut verdict = ClassificationVerdict {
        claims: Vec::new(),
        fit: None,
        superpolynomial: None,
        notes: Vec::new(),
    };
    let alpha = match problem.order() {
        Order::Fractional(alpha) => alpha,
        Order::Classical => {
            verdict
                .notes
                .push("alpha = 1: exponential decay carries no algebraic rate information".into());
            return Ok(verdict);
        }
    };
    if matches!(spec.quantity, Quantity::Caputo(_)) && alpha > 1.0 {
        return Err(Error::OutOfScope(
            "Caputo derivatives of the solution are available for 0 < alpha < 1 only".into(),
        ));
    }
    let (Some(&t_first), Some(&t_last)) = (samples.times().first(), samples.times().last()) else {
        return Err(Error::InsufficientSamples {
            required: MIN_FIT_SAMPLES,
            available: 0,
        });
    };
    let undetermined = |v: &mut ClassificationVerdict, why: String| {
        v.claims.push(Claim {
            quantity: "initial data".into(),
            verdict: Verdict::Undetermined,
            rule: Rule::NotApplicable,
            evidence: why,
        });
    };
    if t_first > CLASSIFY_WINDOW_START * (1.0 + 1e-12) || t_last < CLASSIFY_MIN_END {
        undetermined(
            &mut verdict,
            format!("samples span [{t_first:.3e}, {t_last:.3e}], need [1e2, >= 1e5]"),
        );
        return Ok(verdict);
    }
    let report = detect_superpolynomial(samples, &[1.0, 2.0, 4.0, 8.0], 2.0)?;
    let superpolynomial = report.superpolynomial;
    verdict.superpolynomial = Some(report);
    if superpolynomial {
        // point and weighted maps see every mode only if injective on each eigenspace
        let blind = match &spec.target {
            Target::Points { .. } | Target::Weighted { .. } => {
                let map = ObservationMap::new(spec.clone(), problem.basis())?;
                map.injectivity_failures(problem.basis())?
            }
            _ => Vec::new(),
        };
        if blind.is_empty() {
            verdict.claims.push(Claim {
                quantity: "u".into(),
                verdict: Verdict::Vanishes,
                rule: Rule::Superpolynomial,
                evidence: "tail beats every power in the ladder".into(),
            });
            return Ok(verdict);
        }
        let list: Vec<String> = blind.iter().map(|n| (n + 1).to_string()).collect();
        verdict.notes.push(format!(
            "superpolynomial decay, but the observation misses eigenspaces {}; no claim about u",
            list.join(", ")
        ));
    }
    let window = samples.window(CLASSIFY_WINDOW_START, t_last);
    let (e, rms) = if !window.is_empty() && window.values().iter().all(|&v| v == 0.0) {
        verdict.notes.push("the observation is identically zero on the fit window".into());
        (f64::NEG_INFINITY, 0.0)
    } else {
        let fit = match fit_power_law(samples, Some((CLASSIFY_WINDOW_START, t_last))) {
            Ok(fit) => fit,
            Err(e @ (Error::DegenerateSamples(_) | Error::InsufficientSamples { .. })) => {
                undetermined(&mut verdict, format!("no usable fit: {e}"));
                return Ok(verdict);
            }
            Err(e) => return Err(e),
        };
        verdict.fit = Some(fit.clone());
        if fit.rms_residual > RESIDUAL_LIMIT {
            undetermined(
                &mut verdict,
                format!("rms residual {:.3} decades exceeds {RESIDUAL_LIMIT}", fit.rms_residual),
            );
            return Ok(verdict);
        }
        (fit.exponent, fit.rms_residual)
    };
    let sign = problem.sign_info();
    // (critical exponent, velocity family?, datum one-signed?)
    let ladder: Vec<(f64, bool, bool)> = match spec.quantity {
        Quantity::Caputo(beta) => vec![(-beta, false, sign.a)],
        _ if alpha > 1.0 => vec![(-(alpha - 1.0), true, sign.b), (-alpha, false, sign.a)],
        _ => vec![(-alpha, false, sign.a)],
    };
    let evidence = |critical: f64| {
        format!(
            "exponent {e:.6} (rms {rms:.2e} decades) vs critical {critical:.6}, margin {RATE_MARGIN}"
        )
    };
    let mut faster_than_all_before = true;
    for (critical, velocity, one_signed) in ladder {
        if !faster_than_all_before {
            break;
        }
        let l = labels(&spec.target, spec.quantity, velocity, one_signed);
        match rate(e, critical) {
            Rate::Faster => {
                verdict.claims.push(Claim {
                    quantity: l.local.clone(),
                    verdict: Verdict::Vanishes,
                    rule: l.rule,
                    evidence: evidence(critical),
                });
                if let Some(global) = l.upgrade {
                    verdict.claims.push(Claim {
                        quantity: global,
                        verdict: Verdict::Vanishes,
                        rule: Rule::SignDefiniteUpgrade,
                        evidence: format!("{} vanishes and the datum is one-signed", l.local),
                    });
                }
            }
            Rate::Critical => {
                verdict.claims.push(Claim {
                    quantity: l.critical,
                    verdict: Verdict::Nonzero,
                    rule: if l.rule == Rule::SubdomainValueRate || l.rule == Rule::SubdomainVelocityRate {
                        Rule::LeadingTerm
                    } else {
                        l.rule
                    },
                    evidence: evidence(critical),
                });
                faster_than_all_before = false;
            }
            Rate::Slower => {
                verdict.claims.push(Claim {
                    quantity: l.local,
                    verdict: Verdict::Undetermined,
                    rule: Rule::NotApplicable,
                    evidence: format!("{}; decay slower than any admissible rate", evidence(critical)),
                });
                faster_than_all_before = false;
            }
        }
    }
    if let Target::Points { points } = &spec.target {
        if points.len() > 1 {
            verdict
                .notes
                .push("several points: the fit uses the observed norm, claims concern the whole point set".into());
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::mittag_leffler;

    fn power(s: f64) -> DecaySamples {
        DecaySamples::log_spaced(1.0, 1e6, 61, |t| 2.0 * t.powf(-s)).unwrap()
    }

    #[test]
    fn fits_pure_power_laws() {
        for s in [0.3, 0.5, 1.7, 3.0] {
            let fit = fit_power_law(&power(s), None).unwrap();
            assert!((fit.exponent + s).abs() < 1e-10);
            assert!((fit.amplitude - 2.0).abs() < 1e-9);
            assert!(fit.rms_residual < 1e-12);
        }
        let ml = DecaySamples::log_spaced(1e2, 1e6, 41, |t| mittag_leffler(0.5, 1.0, -t.sqrt()).unwrap()).unwrap();
        assert!((fit_power_law(&ml, None).unwrap().exponent + 0.5).abs() < 0.02);
        let few = DecaySamples::log_spaced(1.0, 10.0, 5, |t| 1.0 / t).unwrap();
        assert!(matches!(fit_power_law(&few, None), Err(Error::InsufficientSamples { .. })));
        let zero = DecaySamples::log_spaced(1.0, 10.0, 10, |_| 0.0).unwrap();
        assert!(matches!(fit_power_law(&zero, None), Err(Error::DegenerateSamples(_))));
    }

    #[test]
    fn sign_change_keeps_the_tail() {
        let s = DecaySamples::log_spaced(1.0, 1e6, 61, |t| if t < 10.0 { -1.0 } else { t.powf(-1.5) }).unwrap();
        let fit = fit_power_law(&s, None).unwrap();
        assert!(fit.sign_change);
        assert!((fit.exponent + 1.5).abs() < 1e-10);
    }

    #[test]
    fn detector_examples() {
        let taus = [1.0, 2.0, 4.0, 8.0];
        let zero = DecaySamples::log_spaced(1.0, 1e6, 61, |_| 0.0).unwrap();
        assert!(detect_superpolynomial(&zero, &taus, 2.0).unwrap().superpolynomial);
        let exp = DecaySamples::log_spaced(1.0, 1e6, 61, |t| (-t).exp()).unwrap();
        assert!(detect_superpolynomial(&exp, &taus, 2.0).unwrap().superpolynomial);
        let slow = DecaySamples::log_spaced(1.0, 1e2, 61, |t| (-0.5 * t).exp() * t.powi(-2)).unwrap();
        assert!(detect_superpolynomial(&slow, &taus, 1.0).unwrap().superpolynomial);
        let r = detect_superpolynomial(&power(3.0), &taus, 2.0).unwrap();
        assert!(!r.superpolynomial);
        assert_eq!(r.checks.iter().filter(|c| c.passed).count(), 2);
        let ml = DecaySamples::log_spaced(1.0, 1e6, 61, |t| mittag_leffler(0.5, 1.0, -t.sqrt()).unwrap()).unwrap();
        assert!(!detect_superpolynomial(&ml, &taus, 2.0).unwrap().superpolynomial);
    }

    #[test]
    fn coefficient_extraction() {
        let q = 0.564_189_6;
        let s = DecaySamples::log_spaced(1e2, 1e6, 41, |t| q * t.powf(-0.5)).unwrap();
        let fit = extract_coefficients(&s, &[0.5]).unwrap();
        assert!((fit.coefficients[0] - q).abs() < 1e-6);
        let s2 = DecaySamples::log_spaced(1e2, 1e6, 41, |t| mittag_leffler(0.5, 1.0, -t.sqrt()).unwrap()).unwrap();
        let fit = extract_coefficients(&s2, &[0.5, 1.5]).unwrap();
        let q1 = 1.0 / std::f64::consts::PI.sqrt();
        // (-1)^{3+1} / Γ(1 - 1.5)
        let q2 = 1.0 / (-2.0 * std::f64::consts::PI.sqrt());
        assert!((fit.coefficients[0] / q1 - 1.0).abs() < 1e-5);
        assert!((fit.coefficients[1] / q2 - 1.0).abs() < 2e-2);
        assert!(matches!(extract_coefficients(&s, &[0.5, 0.5001]), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn moment_examples() {
        let l = [1.0, 4.0, 9.0];
        let ells = [1.0, 2.0, 3.0];
        let zero = moment_nullity(&l, &ells, &[0.0; 3]).unwrap();
        assert!(zero.zero_certificate);
        assert_eq!(zero.p, vec![0.0; 3]);
        let p = [1.0, -2.0, 3.0];
        let m = forward_moments(&l, &ells, &p);
        let back = moment_nullity(&l, &ells, &m).unwrap();
        for (a, b) in back.p.iter().zip(&p) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(matches!(
            moment_nullity(&[1.0, 1.0 + 1e-13, 4.0], &ells, &[1.0, 1.0, 1.0]),
            Err(Error::IllConditioned(_))
        ));
    }
}
