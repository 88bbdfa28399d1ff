//! The acceptance suite: ten numbered checks with pinned tolerances, shared
//! by the `acceptance` test target and `fracwave verify`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{interval_basis, SpectralBasis};
use crate::decay::{
    classify_initial_value, detect_superpolynomial, extract_coefficients, fit_power_law, forward_moments,
    log_grid, moment_nullity, DecaySamples, Verdict,
};
use crate::error::Result;
use crate::observe::{ObservationMap, ObservationSpec};
use crate::oracle::{cross_validate, order_check};
use crate::par::Execution;
use crate::solver::{asymptotic_profile, FractionalProblem, InitialData, Quantity, SignInfo};
use crate::special::{gamma_real, mittag_leffler, ml_remainder, MLParams};

/// `E_{α,β}(z)` as seen by the identity checks.
pub type Evaluator<'a> = &'a (dyn Fn(f64, f64, f64) -> Result<f64> + Sync);

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub tags: &'static [&'static str],
    pub budget: Option<Duration>,
    check: fn() -> Result<Outcome>,
}

/// Result of one check before timing is applied.
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let budget = match self.budget {
            Some(b) => format!(" / budget {:.0} s", b.as_secs_f64()),
            None => String::new(),
        };
        write!(
            f,
            "{} {:>2} {:<28} {} ({:.3} s{budget})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

impl Criterion {
    pub fn matches(&self, filter: &str) -> bool {
        let f = filter.to_ascii_lowercase();
        f == self.id.to_string() || self.name.contains(&f) || self.tags.iter().any(|t| t.contains(&f))
    }

    pub fn run(&self) -> CriterionReport {
        let start = Instant::now();
        let outcome = (self.check)();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match outcome {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(b) = self.budget {
            if elapsed > b {
                passed = false;
                detail.push_str("; over the runtime budget");
            }
        }
        CriterionReport {
            id: self.id,
            name: self.name,
            passed,
            detail,
            elapsed,
            budget: self.budget,
        }
    }
}

pub fn criteria() -> Vec<Criterion> {
    let secs = |s| Some(Duration::from_secs(s));
    vec![
        Criterion { id: 1, name: "ml-identities", tags: &["special", "mittag-leffler"], budget: secs(1), check: c1_identities },
        Criterion { id: 2, name: "ml-remainder-order", tags: &["special", "mittag-leffler", "expansion"], budget: secs(5), check: c2_remainder },
        Criterion { id: 3, name: "decay-rates", tags: &["solver", "decay"], budget: secs(30), check: c3_rates },
        Criterion { id: 4, name: "leading-coefficients", tags: &["solver", "expansion", "decay"], budget: None, check: c4_coefficients },
        Criterion { id: 5, name: "point-dichotomy", tags: &["decay", "classify", "observe"], budget: secs(10), check: c5_dichotomy },
        Criterion { id: 6, name: "caputo-rates", tags: &["solver", "decay", "caputo"], budget: None, check: c6_caputo },
        Criterion { id: 7, name: "moment-nullity", tags: &["decay", "moments"], budget: None, check: c7_moments },
        Criterion { id: 8, name: "oracle-cross-validation", tags: &["oracle", "solver"], budget: None, check: c8_oracle },
        Criterion { id: 9, name: "classical-contrast", tags: &["solver", "classical", "decay"], budget: None, check: c9_classical },
        Criterion { id: 10, name: "superpolynomial-detector", tags: &["decay", "detector"], budget: secs(5), check: c10_detector },
    ]
}

/// Run every criterion matching `filter` (all when `None`).
pub fn run(filter: Option<&str>) -> Vec<CriterionReport> {
    criteria()
        .iter()
        .filter(|c| filter.is_none_or(|f| c.matches(f)))
        .map(Criterion::run)
        .collect()
}

pub fn criterion(id: u8) -> Criterion {
    criteria().into_iter().find(|c| c.id == id).expect("criterion ids are 1..=10")
}

fn exact(f: impl Fn(f64, f64, f64) -> Result<f64> + Sync + 'static) -> Box<dyn Fn(f64, f64, f64) -> Result<f64> + Sync> {
    Box::new(f)
}

/// Identity checks against `eval`: `E_{1,1} = exp`, `E_{2,1}(-z²) = cos z`,
/// `E_{2,2}(-z²) = sin z / z`, all to `1e-10`.
pub fn ml_identities_with(eval: Evaluator<'_>) -> Result<Outcome> {
    let tol = 1e-10;
    let mut worst = [0.0f64; 3];
    for i in 0..=350 {
        let z = -30.0 + 35.0 * i as f64 / 350.0;
        worst[0] = worst[0].max((eval(1.0, 1.0, z)? - z.exp()).abs());
    }
    for i in 0..=200 {
        let z = 10.0 * i as f64 / 200.0;
        worst[1] = worst[1].max((eval(2.0, 1.0, -z * z)? - z.cos()).abs());
        if i > 0 {
            worst[2] = worst[2].max((eval(2.0, 2.0, -z * z)? - z.sin() / z).abs());
        }
    }
    Ok(Outcome {
        passed: worst.iter().all(|&w| w <= tol),
        detail: format!(
            "max errors exp {:.1e}, cos {:.1e}, sinc {:.1e} (tol {tol:.0e})",
            worst[0], worst[1], worst[2]
        ),
    })
}

fn c1_identities() -> Result<Outcome> {
    let eval = exact(mittag_leffler);
    ml_identities_with(&*eval)
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn c2_remainder() -> Result<Outcome> {
    let etas = log_grid(1e3, 1e6, 13)?;
    let lx: Vec<f64> = etas.iter().map(|e| e.ln()).collect();
    let mut worst_margin = f64::INFINITY;
    let mut report = Vec::new();
    for alpha in [0.5, 1.5] {
        for beta in [1.0, 2.0] {
            let params = MLParams::new(alpha, beta)?;
            for p in 1..=3usize {
                let ly: Vec<f64> = etas
                    .iter()
                    .map(|&eta| Ok(ml_remainder(params, eta, p)?.value.abs().ln()))
                    .collect::<Result<_>>()?;
                let s = slope(&lx, &ly);
                let bound = -(p as f64 + 1.0) + 0.1;
                worst_margin = worst_margin.min(bound - s);
                report.push(format!("{s:.2}"));
            }
        }
    }
    Ok(Outcome {
        passed: worst_margin >= 0.0,
        detail: format!("slopes [{}], all <= -(p+1)+0.1: margin {worst_margin:.2}", report.join(" ")),
    })
}

fn pi_basis(modes: usize) -> Arc<SpectralBasis> {
    Arc::new(interval_basis(PI, modes).expect("valid interval"))
}

/// `Σ_{m=1}^{count} sin(m x) / m²`.
fn multi_mode(count: usize) -> InitialData {
    InitialData::Sum {
        terms: (1..=count)
            .map(|m| InitialData::scaled_sin_mode(vec![m], 1.0 / (m * m) as f64))
            .collect(),
    }
}

fn norm_slope(problem: &FractionalProblem, gamma: f64, times: &[f64]) -> Result<f64> {
    let values: Vec<f64> = times.iter().map(|&t| problem.sobolev_norm(t, gamma)).collect::<Result<_>>()?;
    Ok(fit_power_law(&DecaySamples::new(times.to_vec(), values)?, None)?.exponent)
}

fn c3_rates() -> Result<Outcome> {
    let times = log_grid(1e2, 1e6, 41)?;
    let basis = pi_basis(16);
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (label, data) in [("1", InitialData::sin_mode(1)), ("16", multi_mode(16))] {
        for alpha in [0.3, 0.5, 0.7, 1.3, 1.7] {
            let b = (alpha > 1.0).then_some(InitialData::Zero);
            let p = FractionalProblem::from_data(alpha, basis.clone(), &data, b.as_ref(), Execution::Parallel)?;
            let s = norm_slope(&p, 2.0, &times)?;
            worst = worst.max((s + alpha).abs());
            lines.push(format!("a{label}:{alpha}→{s:.3}"));
        }
        for alpha in [1.3, 1.7] {
            let p = FractionalProblem::from_data(alpha, basis.clone(), &InitialData::Zero, Some(&data), Execution::Parallel)?;
            let s = norm_slope(&p, 2.0, &times)?;
            worst = worst.max((s + alpha - 1.0).abs());
            lines.push(format!("b{label}:{alpha}→{s:.3}"));
        }
    }
    Ok(Outcome {
        passed: worst <= 0.02,
        detail: format!("max |slope - critical| {worst:.4} (tol 0.02); {}", lines.join(" ")),
    })
}

fn point_series(problem: &FractionalProblem, spec: &ObservationSpec, times: &[f64]) -> Result<DecaySamples> {
    let map = ObservationMap::new(spec.clone(), problem.basis())?;
    let values = map
        .series(problem, times, problem.execution())?
        .iter()
        .map(|o| o.scalar())
        .collect();
    DecaySamples::new(times.to_vec(), values)
}

fn c4_coefficients() -> Result<Outcome> {
    let basis = pi_basis(8);
    let target = 1.0 / gamma_real(0.5)?;
    let times = log_grid(1e2, 1e6, 41)?;
    let spec = ObservationSpec::point(vec![PI / 2.0], Quantity::Field);
    let map = ObservationMap::new(spec.clone(), &basis)?;
    let cases = [
        (0.5, InitialData::sin_mode(1), None, 0.5),
        (1.5, InitialData::Zero, Some(InitialData::sin_mode(1)), 0.5),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (alpha, a, b, lead) in cases {
        let p = FractionalProblem::from_data(alpha, basis.clone(), &a, b.as_ref(), Execution::Parallel)?;
        let t: f64 = 1e6;
        let scaled = t.powf(lead) * p.field(&[PI / 2.0], t)?.value;
        let rel = (scaled / target - 1.0).abs();
        let profile = asymptotic_profile(&p, &map, 3)?;
        let significant: Vec<_> = profile.terms.iter().filter(|t| t.is_significant()).take(2).collect();
        let exponents: Vec<f64> = significant.iter().map(|t| t.exponent).collect();
        let fit = extract_coefficients(&point_series(&p, &spec, &times)?, &exponents)?;
        let q_rel = (fit.coefficients[0] / significant[0].scalar() - 1.0).abs();
        ok &= rel <= 1e-2 && q_rel <= 1e-2 && (significant[0].scalar() / target - 1.0).abs() <= 1e-12;
        parts.push(format!(
            "alpha {alpha}: t^s u = {scaled:.7} (rel {rel:.1e}), extracted Q1 rel {q_rel:.1e} on exponents {exponents:?}"
        ));
    }
    Ok(Outcome {
        passed: ok,
        detail: format!("target 1/Γ(0.5) = {target:.7}, tol 1%; {}", parts.join("; ")),
    })
}

/// Fitted exponent; `-∞` for an identically zero series.
fn observed_exponent(samples: &DecaySamples) -> Result<f64> {
    if samples.values().iter().all(|&v| v == 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(fit_power_law(samples, None)?.exponent)
}

fn c5_dichotomy() -> Result<Outcome> {
    let basis = pi_basis(16);
    let times = log_grid(1e2, 1e6, 41)?;
    let spec = ObservationSpec::point(vec![PI / 2.0], Quantity::OperatorImage);
    let vanishing_at_point = [
        ("sin 2x", InitialData::sin_mode(2)),
        (
            "sin x + sin 3x",
            InitialData::Sum {
                terms: vec![InitialData::sin_mode(1), InitialData::sin_mode(3)],
            },
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, a) in vanishing_at_point {
        let p = FractionalProblem::from_data(0.5, basis.clone(), &a, None, Execution::Parallel)?;
        let samples = point_series(&p, &spec, &times)?;
        let e = observed_exponent(&samples)?;
        let verdict = classify_initial_value(&p, &spec, &samples)?;
        let claim = verdict.claim("u(x0,0)").map(|c| c.verdict);
        ok &= e <= -1.4 && claim == Some(Verdict::Vanishes);
        parts.push(format!("{label}: exponent {e:.3}, u(x0,0) {}", claim.map_or("none".into(), |v| v.to_string())));
    }
    let control = FractionalProblem::from_data(0.5, basis.clone(), &InitialData::sin_mode(1), None, Execution::Parallel)?
        .with_sign_info(SignInfo { a: true, b: false });
    let samples = point_series(&control, &spec, &times)?;
    let e = observed_exponent(&samples)?;
    let verdict = classify_initial_value(&control, &spec, &samples)?;
    let claim = verdict.claim("u(x0,0)").map(|c| c.verdict);
    ok &= (e + 0.5).abs() <= 0.02 && claim == Some(Verdict::Nonzero) && !verdict.any(Verdict::Vanishes);
    parts.push(format!("control sin x: exponent {e:.4}, u(x0,0) {}", claim.map_or("none".into(), |v| v.to_string())));
    Ok(Outcome {
        passed: ok,
        detail: parts.join("; "),
    })
}

fn c6_caputo() -> Result<Outcome> {
    let basis = pi_basis(8);
    let p = FractionalProblem::from_data(0.5, basis, &InitialData::sin_mode(1), None, Execution::Parallel)?;
    let times = log_grid(1e2, 1e6, 41)?;
    let x0 = [PI / 2.0];
    let mut ok = true;
    let mut parts = Vec::new();
    for beta in [0.25, 0.75] {
        let values: Vec<f64> = times.iter().map(|&t| p.caputo_derivative(beta, &x0, t)).collect::<Result<_>>()?;
        let e = fit_power_law(&DecaySamples::new(times.clone(), values)?, None)?.exponent;
        ok &= (e + beta).abs() <= 0.02;
        parts.push(format!("beta {beta}: slope {e:.4}"));
    }
    let mut worst: f64 = 0.0;
    for &t in &[0.01, 0.5, 1.0, 10.0, 1e3, 1e5] {
        for &x in &[0.3, PI / 2.0, 2.9] {
            let d = p.caputo_derivative(0.5, &[x], t)?;
            let au = p.apply_operator(&[x], t)?;
            worst = worst.max((d + au).abs());
        }
    }
    ok &= worst <= 1e-9;
    parts.push(format!("max |D^alpha u + Au| {worst:.1e} (tol 1e-9)"));
    Ok(Outcome {
        passed: ok,
        detail: format!("{} (slope tol 0.02)", parts.join("; ")),
    })
}

/// Worst relative round-trip error `max|p' - p| / max|p|` of the moment
/// solve for each mode count `1..=max_modes`, with `λ_n = n²`, `ℓ = 1..N`
/// and 25 seeded random `p` per count.
pub fn moment_round_trips(max_modes: usize) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (1..=max_modes)
        .map(|n| {
            let lambdas: Vec<f64> = (1..=n).map(|k| (k * k) as f64).collect();
            let ells: Vec<f64> = (1..=n).map(|l| l as f64).collect();
            let mut worst: f64 = 0.0;
            for _ in 0..25 {
                let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..=10.0)).collect();
                let moments = forward_moments(&lambdas, &ells, &p);
                let back = moment_nullity(&lambdas, &ells, &moments)?;
                let scale = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let err = back.p.iter().zip(&p).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                worst = worst.max(err / scale);
            }
            Ok(worst)
        })
        .collect()
}

fn c7_moments() -> Result<Outcome> {
    let errors = moment_round_trips(8)?;
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    let zero = moment_nullity(&[1.0, 4.0, 9.0], &[1.0, 2.0, 3.0], &[0.0; 3])?;
    let certified = zero.zero_certificate && zero.p.iter().all(|&v| v == 0.0);
    let per_n: Vec<String> = errors.iter().enumerate().map(|(i, e)| format!("N{}:{e:.0e}", i + 1)).collect();
    Ok(Outcome {
        passed: worst <= 1e-6 && certified,
        detail: format!(
            "max relative error {worst:.1e} (tol 1e-6) [{}]; zero certificate {certified}",
            per_n.join(" ")
        ),
    })
}

fn c8_oracle() -> Result<Outcome> {
    let basis = pi_basis(4);
    let checkpoints = [0.25, 0.5, 1.0, 1.5, 2.0];
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.5] {
        let b = (alpha > 1.0).then(|| InitialData::sin_mode(1));
        let p = FractionalProblem::from_data(alpha, basis.clone(), &InitialData::sin_mode(1), b.as_ref(), Execution::Parallel)?;
        let cv = cross_validate(&p, 1e-3, &checkpoints)?;
        let order = order_check(alpha, 1.0, 1e-3, &checkpoints)?;
        let ratio_ok = (order.ratio / order.expected_ratio - 1.0).abs() <= 0.2;
        ok &= cv.discrepancy <= 5e-3 && ratio_ok;
        parts.push(format!(
            "alpha {alpha}: discrepancy {:.1e} (tol 5e-3), halving ratio {:.3} vs {:.3}",
            cv.discrepancy, order.ratio, order.expected_ratio
        ));
    }
    Ok(Outcome {
        passed: ok,
        detail: format!("{} (ratio tol 20%)", parts.join("; ")),
    })
}

fn c9_classical() -> Result<Outcome> {
    let basis = Arc::new(interval_basis(1.0, 32)?);
    let cases = [
        ("sin 2pi x at x0 = 1/4", InitialData::sin_mode(2), 0.25, 4.0 * PI * PI, (0.1, 1.0)),
        ("x(1-x) at x0 = 1/2", InitialData::PolynomialBump { amplitude: 1.0 }, 0.5, PI * PI, (0.5, 4.0)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, a, x0, rate, (t0, t1)) in cases {
        let p = FractionalProblem::from_data(1.0, basis.clone(), &a, None, Execution::Parallel)?;
        let times: Vec<f64> = (0..=20).map(|i| t0 + (t1 - t0) * i as f64 / 20.0).collect();
        let logs: Vec<f64> = times
            .iter()
            .map(|&t| Ok(p.field(&[x0], t)?.value.abs().ln()))
            .collect::<Result<_>>()?;
        let s = slope(&times, &logs);
        let rel = (s / -rate - 1.0).abs();
        ok &= rel <= 0.02;
        parts.push(format!("{label}: slope {s:.4} vs {:.4} (rel {rel:.1e})", -rate));
    }
    Ok(Outcome {
        passed: ok,
        detail: format!("{} (tol 2%)", parts.join("; ")),
    })
}

fn c10_detector() -> Result<Outcome> {
    let taus = [1.0, 2.0, 4.0, 8.0];
    let basis = pi_basis(16);
    let times = log_grid(1.0, 1e6, 61)?;
    let norm_samples = |p: &FractionalProblem| -> Result<DecaySamples> {
        let v: Vec<f64> = times.iter().map(|&t| p.sobolev_norm(t, 0.0)).collect::<Result<_>>()?;
        DecaySamples::new(times.clone(), v)
    };
    let mut parts = Vec::new();
    let mut ok = true;
    let zero = FractionalProblem::from_data(0.5, basis.clone(), &InitialData::Zero, None, Execution::Parallel)?;
    let classical =
        FractionalProblem::from_data(1.0, basis.clone(), &InitialData::PolynomialBump { amplitude: 1.0 }, None, Execution::Parallel)?;
    for (label, p) in [("zero solution", &zero), ("classical", &classical)] {
        let r = detect_superpolynomial(&norm_samples(p)?, &taus, 2.0)?;
        ok &= r.superpolynomial;
        parts.push(format!("{label}: {}", r.superpolynomial));
    }
    let fractional = [
        (0.3, InitialData::sin_mode(1), None),
        (0.7, multi_mode(16), None),
        (1.5, InitialData::sin_mode(2), Some(InitialData::Zero)),
        (1.7, InitialData::Zero, Some(multi_mode(4))),
    ];
    for (alpha, a, b) in fractional {
        let p = FractionalProblem::from_data(alpha, basis.clone(), &a, b.as_ref(), Execution::Parallel)?;
        let r = detect_superpolynomial(&norm_samples(&p)?, &taus, 2.0)?;
        ok &= !r.superpolynomial;
        parts.push(format!("alpha {alpha}: {} (tail exponent {:.3})", r.superpolynomial, r.exponent));
    }
    Ok(Outcome {
        passed: ok,
        detail: parts.join("; "),
    })
}
