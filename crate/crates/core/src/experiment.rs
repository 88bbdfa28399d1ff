//! TOML-configured experiments: build a problem, sample an observation on a
//! log time grid, expand, fit and classify, then write the results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::{interval_basis, rectangle_basis, sturm_liouville_basis, weyl_exponent, SampledFunction, SpectralBasis};
use crate::decay::{classify_initial_value, detect_superpolynomial, fit_power_law, log_grid, ClassificationVerdict, DecayFit, DecaySamples, SuperpolynomialReport};
use crate::error::{Error, Result};
use crate::observe::{ObservationMap, ObservationSpec, Target};
use crate::par::Execution;
use crate::solver::{asymptotic_profile, project, AsymptoticExpansion, FractionalProblem, InitialData, Order, SignInfo};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Constant(f64),
    File { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Interval {
        length: f64,
    },
    Rectangle {
        width: f64,
        height: f64,
    },
    SturmLiouville {
        length: f64,
        cells: usize,
        #[serde(default = "unit")]
        a: Coefficient,
        #[serde(default = "zero")]
        c: Coefficient,
    },
}

fn unit() -> Coefficient {
    Coefficient::Constant(1.0)
}

fn zero() -> Coefficient {
    Coefficient::Constant(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub alpha: f64,
    pub domain: DomainConfig,
    /// Modes (per axis on a rectangle); 64 in 1D and 24 per axis by default.
    #[serde(default)]
    pub modes: Option<usize>,
    pub initial_a: InitialData,
    #[serde(default)]
    pub initial_b: Option<InitialData>,
    #[serde(default)]
    pub sign_definite_a: bool,
    #[serde(default)]
    pub sign_definite_b: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_t_min() -> f64 {
    1e2
}
fn default_t_max() -> f64 {
    1e6
}
fn default_points() -> usize {
    41
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_min: default_t_min(),
            t_max: default_t_max(),
            points: default_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Terms per family in the asymptotic expansion.
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_ladder")]
    pub tau_ladder: Vec<f64>,
    /// Decades at the end of the grid used by the superpolynomial detector.
    #[serde(default = "default_decades")]
    pub tail_decades: f64,
}

fn default_depth() -> usize {
    3
}
fn default_ladder() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}
fn default_decades() -> f64 {
    2.0
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            depth: default_depth(),
            tau_ladder: default_ladder(),
            tail_decades: default_decades(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Relative to the config file; its directory by default.
    #[serde(default)]
    pub directory: Option<PathBuf>,
    #[serde(default = "default_prefix")]
    pub prefix: String,
}

fn default_prefix() -> String {
    "run".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: None,
            prefix: default_prefix(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub observation: ObservationSpec,
    #[serde(default)]
    pub time_grid: TimeGrid,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn config_error(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut config: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let key = e.message().split('`').nth(1).unwrap_or("document").to_string();
            config_error(&key, e.to_string().trim_end().to_string())
        })?;
        config.base_dir = base_dir.to_path_buf();
        config.problem.initial_a = config.problem.initial_a.clone().with_base_dir(base_dir);
        config.problem.initial_b = config.problem.initial_b.clone().map(|b| b.with_base_dir(base_dir));
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &dir)
    }

    fn validate(&self) -> Result<()> {
        let p = &self.problem;
        if let Err(e) = Order::from_alpha(p.alpha) {
            return Err(config_error("problem.alpha", e.to_string()));
        }
        match (p.alpha > 1.0, &p.initial_b) {
            (true, None) => {
                return Err(config_error(
                    "problem.initial_b",
                    format!("required when alpha = {} > 1", p.alpha),
                ))
            }
            (false, Some(_)) => {
                return Err(config_error(
                    "problem.initial_b",
                    format!("must be absent when alpha = {} <= 1", p.alpha),
                ))
            }
            _ => {}
        }
        if p.sign_definite_b && p.initial_b.is_none() {
            return Err(config_error("problem.sign_definite_b", "there is no initial velocity"));
        }
        if p.modes == Some(0) {
            return Err(config_error("problem.modes", "must be positive"));
        }
        let g = &self.time_grid;
        if !(g.t_min > 0.0 && g.t_max > g.t_min && g.t_max.is_finite()) {
            return Err(config_error("time_grid", format!("need 0 < t_min < t_max, got [{}, {}]", g.t_min, g.t_max)));
        }
        if g.points < crate::decay::MIN_FIT_SAMPLES {
            return Err(config_error(
                "time_grid.points",
                format!("at least {} points are needed", crate::decay::MIN_FIT_SAMPLES),
            ));
        }
        if self.analysis.depth == 0 {
            return Err(config_error("analysis.depth", "must be at least 1"));
        }
        if self.analysis.tau_ladder.is_empty() || self.analysis.tau_ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_error("analysis.tau_ladder", "must be a non-empty increasing list"));
        }
        if self.output.prefix.is_empty() || self.output.prefix.contains(['/', '\\']) {
            return Err(config_error("output.prefix", "must be a plain file name prefix"));
        }
        Ok(())
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_relative() {
            self.base_dir.join(path)
        } else {
            path.to_path_buf()
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        match &self.output.directory {
            Some(d) => self.resolve(d),
            None => self.base_dir.clone(),
        }
    }

    pub fn build_basis(&self) -> Result<SpectralBasis> {
        let modes = self.problem.modes;
        match &self.problem.domain {
            DomainConfig::Interval { length } => interval_basis(*length, modes.unwrap_or(64)),
            DomainConfig::Rectangle { width, height } => rectangle_basis(*width, *height, modes.unwrap_or(24)),
            DomainConfig::SturmLiouville { length, cells, a, c } => {
                if *cells < 2 {
                    return Err(config_error("problem.domain.cells", "need at least two cells"));
                }
                let mesh: Vec<f64> = (0..=*cells).map(|i| length * i as f64 / *cells as f64).collect();
                let sample = |coef: &Coefficient| -> Result<Vec<f64>> {
                    Ok(match coef {
                        Coefficient::Constant(v) => vec![*v; mesh.len()],
                        Coefficient::File { file } => SampledFunction::load(self.resolve(file))?.resample(&mesh),
                    })
                };
                sturm_liouville_basis(&sample(a)?, &sample(c)?, *length, modes.unwrap_or(32.min(cells - 1)))
            }
        }
    }

    pub fn build_problem(&self, exec: Execution) -> Result<FractionalProblem> {
        let basis = Arc::new(self.build_basis()?);
        let p = &self.problem;
        for (flag, data, key) in [
            (p.sign_definite_a, Some(&p.initial_a), "problem.sign_definite_a"),
            (p.sign_definite_b, p.initial_b.as_ref(), "problem.sign_definite_b"),
        ] {
            if let (true, Some(data)) = (flag, data) {
                if !one_signed_on_grid(&basis, data)? {
                    return Err(config_error(key, "the datum changes sign on the quadrature grid"));
                }
            }
        }
        let a = project(&basis, &p.initial_a, exec)?;
        let b = p.initial_b.as_ref().map(|b| project(&basis, b, exec)).transpose()?;
        Ok(FractionalProblem::new(p.alpha, basis, a, b)?
            .with_execution(exec)
            .with_sign_info(SignInfo {
                a: p.sign_definite_a,
                b: p.sign_definite_b,
            }))
    }
}

fn one_signed_on_grid(basis: &SpectralBasis, data: &InitialData) -> Result<bool> {
    let extent = basis.extent();
    let values: Vec<f64> = match basis.rule().points().map(|p| data.eval(&extent, p)).collect::<Option<Vec<_>>>() {
        Some(v) => v,
        // sampled data: reconstruct from the projection
        None => {
            let c = project(basis, data, Execution::Sequential)?;
            basis
                .rule()
                .points()
                .map(|p| {
                    c.values
                        .iter()
                        .enumerate()
                        .flat_map(|(n, row)| row.iter().enumerate().map(move |(k, v)| (n, k, *v)))
                        .map(|(n, k, v)| v * basis.eval(n, k, p))
                        .sum()
                })
                .collect()
        }
    };
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let slack = 1e-12 * scale;
    Ok(values.iter().all(|&v| v >= -slack) || values.iter().all(|&v| v <= slack))
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub times: Vec<f64>,
    /// Scalar observation per time: the value for one-point outputs, the
    /// observation-space norm otherwise.
    pub values: Vec<f64>,
    pub expansion: Option<AsymptoticExpansion>,
    pub fit: Option<DecayFit>,
    pub superpolynomial: Option<SuperpolynomialReport>,
    pub verdict: ClassificationVerdict,
    /// Eigenspaces failing injectivity, and how many were checked.
    pub injectivity: Option<(Vec<usize>, usize)>,
    pub weyl: Option<f64>,
    pub summary: String,
}

/// Execute the whole pipeline for `config`.
pub fn run(config: &ExperimentConfig, exec: Execution) -> Result<RunOutput> {
    let problem = config.build_problem(exec)?;
    let map = ObservationMap::new(config.observation.clone(), problem.basis())?;
    let g = &config.time_grid;
    let times = log_grid(g.t_min, g.t_max, g.points)?;
    let observed = map.series(&problem, &times, exec)?;
    let values: Vec<f64> = observed.iter().map(|o| o.scalar()).collect();
    let samples = DecaySamples::new(times.clone(), values.clone())?;
    let expansion = match problem.order() {
        Order::Fractional(_) => Some(asymptotic_profile(&problem, &map, config.analysis.depth)?),
        Order::Classical => None,
    };
    let fit = fit_power_law(&samples, None).ok();
    let superpolynomial = detect_superpolynomial(&samples, &config.analysis.tau_ladder, config.analysis.tail_decades).ok();
    let verdict = classify_initial_value(&problem, &config.observation, &samples)?;
    let injectivity = match config.observation.target {
        Target::Points { .. } | Target::Weighted { .. } => Some((
            map.injectivity_failures(problem.basis())?,
            problem.basis().distinct_count(),
        )),
        _ => None,
    };
    let weyl = weyl_exponent(problem.basis()).ok();
    let summary = format!(
        "alpha = {}, {} eigenfunctions in {} eigenspaces, lambda_1 = {:.12e}, observation dimension {}",
        problem.alpha(),
        problem.basis().mode_count(),
        problem.basis().distinct_count(),
        problem.basis().eigenvalues()[0],
        map.dim()
    );
    Ok(RunOutput {
        times,
        values,
        expansion,
        fit,
        superpolynomial,
        verdict,
        injectivity,
        weyl,
        summary,
    })
}

/// 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

impl RunOutput {
    pub fn series_csv(&self) -> String {
        let mut s = String::from("t,value\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            let _ = writeln!(s, "{},{}", fmt17(*t), fmt17(*v));
        }
        s
    }

    pub fn expansion_csv(&self) -> String {
        let mut s = String::from("s_m,Q_m\n");
        if let Some(e) = &self.expansion {
            for term in &e.terms {
                let _ = writeln!(s, "{},{}", fmt17(term.exponent), fmt17(term.scalar()));
            }
        }
        s
    }

    pub fn verdict_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.summary);
        if let Some(w) = self.weyl {
            let _ = writeln!(s, "weyl exponent: {w:.6}");
        }
        if let Some(e) = &self.expansion {
            let _ = writeln!(s, "expansion remainder exponent: {}", e.remainder_exponent);
            for t in &e.terms {
                let _ = writeln!(
                    s,
                    "term: family {:?} l={} s={} Q={}{}{}",
                    t.family,
                    t.ell,
                    t.exponent,
                    fmt17(t.scalar()),
                    if t.vanishing { " (gamma pole, dropped)" } else { "" },
                    if !t.vanishing && !t.resolved { " (below rounding floor)" } else { "" },
                );
            }
        }
        if let Some(f) = &self.fit {
            let _ = writeln!(
                s,
                "full-grid fit: exponent {:.6} rms {:.2e} decades",
                f.exponent, f.rms_residual
            );
        }
        if let Some(r) = &self.superpolynomial {
            let _ = writeln!(s, "superpolynomial detector: {}", r.superpolynomial);
        }
        if let Some((fails, checked)) = &self.injectivity {
            if fails.is_empty() {
                let _ = writeln!(s, "injectivity: holds on all {checked} eigenspaces of the truncation");
            } else {
                let list: Vec<String> = fails.iter().map(|n| (n + 1).to_string()).collect();
                let _ = writeln!(
                    s,
                    "injectivity: fails on eigenspaces {} of the {checked} in the truncation",
                    list.join(", ")
                );
            }
        }
        s.push_str("classification:\n");
        s.push_str(&self.verdict.to_string());
        s
    }

    /// Write `<prefix>_series.csv`, `<prefix>_expansion.csv` and
    /// `<prefix>_verdict.txt` into `dir`.
    pub fn write(&self, dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let files = [
            (format!("{prefix}_series.csv"), self.series_csv()),
            (format!("{prefix}_expansion.csv"), self.expansion_csv()),
            (format!("{prefix}_verdict.txt"), self.verdict_text()),
        ];
        let mut out = Vec::new();
        for (name, body) in files {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            out.push(path);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[problem]
alpha = 0.5
modes = 16
initial_a = { kind = "sin_mode", modes = [1] }
sign_definite_a = true

[problem.domain]
kind = "interval"
length = 3.141592653589793

[observation]
quantity = "operator_image"
target = { kind = "points", points = [[1.5707963267948966]] }
"#;

    #[test]
    fn parses_and_runs() {
        let cfg = ExperimentConfig::from_toml(BASIC, Path::new(".")).unwrap();
        let out = run(&cfg, Execution::Parallel).unwrap();
        assert_eq!(out.times.len(), 41);
        assert!(out.series_csv().starts_with("t,value\n"));
        assert!(out.expansion_csv().starts_with("s_m,Q_m\n"));
        let claim = out.verdict.claim("u(x0,0)").unwrap();
        assert_eq!(claim.verdict, crate::decay::Verdict::Nonzero);
        let again = run(&cfg, Execution::Sequential).unwrap();
        assert_eq!(out.series_csv(), again.series_csv());
        assert_eq!(out.verdict_text(), again.verdict_text());
    }

    #[test]
    fn names_bad_keys() {
        let wave = BASIC.replace("alpha = 0.5", "alpha = 1.5");
        match ExperimentConfig::from_toml(&wave, Path::new(".")) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "problem.initial_b"),
            other => panic!("{other:?}"),
        }
        let broken = BASIC.replace("modes = 16", "modes = = 16");
        match ExperimentConfig::from_toml(&broken, Path::new(".")) {
            Err(Error::Config { message, .. }) => assert!(message.contains("line"), "{message}"),
            other => panic!("{other:?}"),
        }
        let unknown = BASIC.replace("modes = 16", "modez = 16");
        assert!(matches!(ExperimentConfig::from_toml(&unknown, Path::new(".")), Err(Error::Config { .. })));
    }
}
