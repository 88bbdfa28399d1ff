//! Initial data and its modal coefficients.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::{sin_pi, Geometry, Mode, SpectralBasis};
use crate::error::{Error, Result};
use crate::par::Execution;

fn one() -> f64 {
    1.0
}

/// Initial value or initial velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    /// `amplitude · Π sin(m_i π x_i / L_i)`, one mode number per axis.
    SinMode {
        modes: Vec<usize>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `amplitude · Π x_i (L_i - x_i)`.
    PolynomialBump {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `amplitude · exp(1 - 1/(1 - r²))` for `r = |x - center| / radius < 1`.
    SmoothBump {
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Values at the basis quadrature points, one per line; optional
    /// leading coordinate columns are checked against the grid.
    Samples { path: PathBuf },
    Sum { terms: Vec<InitialData> },
}

impl InitialData {
    pub fn sin_mode(m: usize) -> Self {
        InitialData::SinMode {
            modes: vec![m],
            amplitude: 1.0,
        }
    }

    pub fn scaled_sin_mode(modes: Vec<usize>, amplitude: f64) -> Self {
        InitialData::SinMode { modes, amplitude }
    }

    /// Resolve relative sample paths against `dir`.
    pub fn with_base_dir(self, dir: &Path) -> Self {
        match self {
            InitialData::Samples { path } if path.is_relative() => InitialData::Samples { path: dir.join(path) },
            InitialData::Sum { terms } => InitialData::Sum {
                terms: terms.into_iter().map(|t| t.with_base_dir(dir)).collect(),
            },
            other => other,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            InitialData::Zero => true,
            InitialData::SinMode { amplitude, .. }
            | InitialData::PolynomialBump { amplitude }
            | InitialData::SmoothBump { amplitude, .. } => *amplitude == 0.0,
            InitialData::Samples { .. } => false,
            InitialData::Sum { terms } => terms.iter().all(InitialData::is_zero),
        }
    }

    /// Pointwise value; `None` for sampled data.
    pub fn eval(&self, extent: &[f64], x: &[f64]) -> Option<f64> {
        Some(match self {
            InitialData::Zero => 0.0,
            InitialData::SinMode { modes, amplitude } => {
                amplitude
                    * modes
                        .iter()
                        .zip(extent)
                        .zip(x)
                        .map(|((&m, &l), &xi)| sin_pi(m as f64 * xi / l))
                        .product::<f64>()
            }
            InitialData::PolynomialBump { amplitude } => {
                amplitude * extent.iter().zip(x).map(|(&l, &xi)| xi * (l - xi)).product::<f64>()
            }
            InitialData::SmoothBump {
                center,
                radius,
                amplitude,
            } => {
                let r2: f64 = center.iter().zip(x).map(|(c, xi)| (xi - c).powi(2)).sum::<f64>() / (radius * radius);
                if r2 < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - r2)).exp()
                } else {
                    0.0
                }
            }
            InitialData::Samples { .. } => return None,
            InitialData::Sum { terms } => {
                let mut s = 0.0;
                for t in terms {
                    s += t.eval(extent, x)?;
                }
                s
            }
        })
    }

    fn validate(&self, basis: &SpectralBasis) -> Result<()> {
        let d = basis.dimension();
        match self {
            InitialData::SinMode { modes, amplitude } => {
                if modes.len() != d || modes.contains(&0) {
                    return Err(Error::InvalidArgument(format!(
                        "sin_mode needs {d} positive mode number(s), got {modes:?}"
                    )));
                }
                if !amplitude.is_finite() {
                    return Err(Error::InvalidArgument("amplitude must be finite".into()));
                }
            }
            InitialData::SmoothBump { center, radius, .. } => {
                if center.len() != d || !(*radius > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "smooth_bump needs a {d}-dimensional center and a positive radius"
                    )));
                }
            }
            InitialData::Sum { terms } => {
                for t in terms {
                    t.validate(basis)?;
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Inner products `(f, φ_{nk})` arranged by eigenspace, with `‖f‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalCoefficients {
    pub values: Vec<Vec<f64>>,
    /// `‖f‖²` from the basis quadrature, or exactly when `f` lies in the span.
    pub norm_sq: f64,
}

impl ModalCoefficients {
    pub fn zeros(basis: &SpectralBasis) -> Self {
        Self {
            values: basis.multiplicities().iter().map(|&d| vec![0.0; d]).collect(),
            norm_sq: 0.0,
        }
    }

    pub fn captured_sq(&self) -> f64 {
        self.values.iter().flatten().map(|c| c * c).sum()
    }

    /// `‖f‖² - Σ (f, φ_{nk})²`, the energy outside the truncated span.
    pub fn parseval_residual(&self) -> f64 {
        self.norm_sq - self.captured_sq()
    }

    /// Square root of the positive part of the Parseval residual.
    pub fn tail_norm(&self) -> f64 {
        self.parseval_residual().max(0.0).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(|&c| c == 0.0)
    }
}

/// Sin-mode terms that are eigenfunctions of `basis`, as `(n, k, coefficient)`.
fn exact_sin_terms(basis: &SpectralBasis, data: &InitialData) -> Option<Vec<(usize, usize, f64)>> {
    match (data, basis.geometry()) {
        (InitialData::Zero, _) => Some(Vec::new()),
        (InitialData::SinMode { modes, amplitude }, Geometry::Interval { length }) => {
            let (n, k) = basis.find_mode(Mode::Interval(modes[0]))?;
            Some(vec![(n, k, amplitude * (length / 2.0).sqrt())])
        }
        (InitialData::SinMode { modes, amplitude }, Geometry::Rectangle { width, height }) => {
            let (n, k) = basis.find_mode(Mode::Rectangle(modes[0], modes[1]))?;
            Some(vec![(n, k, amplitude * (width * height).sqrt() / 2.0)])
        }
        (InitialData::Sum { terms }, _) => {
            let mut out = Vec::new();
            for t in terms {
                out.extend(exact_sin_terms(basis, t)?);
            }
            Some(out)
        }
        _ => None,
    }
}

fn read_samples(basis: &SpectralBasis, path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let rule = basis.rule();
    let mut values = Vec::with_capacity(rule.len());
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidArgument(format!("{}:{}: not a number", path.display(), lineno + 1)))?;
        let index = values.len();
        let coords = &fields[..fields.len() - 1];
        if !coords.is_empty() {
            if index >= rule.len() || coords.len() != rule.dimension {
                return Err(Error::QuadratureMismatch(format!(
                    "{}:{}: sample does not correspond to a quadrature point",
                    path.display(),
                    lineno + 1
                )));
            }
            let p = rule.point(index);
            if coords.iter().zip(p).any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + b.abs())) {
                return Err(Error::QuadratureMismatch(format!(
                    "{}:{}: coordinates {coords:?} differ from quadrature point {p:?}",
                    path.display(),
                    lineno + 1
                )));
            }
        }
        values.push(fields[fields.len() - 1]);
    }
    Ok(values)
}

/// Modal coefficients of `data`. Sine modes that belong to a closed-form
/// basis are projected exactly; everything else uses the basis quadrature.
pub fn project(basis: &SpectralBasis, data: &InitialData, exec: Execution) -> Result<ModalCoefficients> {
    data.validate(basis)?;
    let mut coeffs = ModalCoefficients::zeros(basis);
    if let Some(terms) = exact_sin_terms(basis, data) {
        for (n, k, c) in terms {
            coeffs.values[n][k] += c;
        }
        coeffs.norm_sq = coeffs.captured_sq();
        return Ok(coeffs);
    }
    let values: Vec<f64> = match data {
        InitialData::Samples { path } => read_samples(basis, path)?,
        InitialData::Sum { terms } if terms.iter().any(|t| matches!(t, InitialData::Samples { .. })) => {
            let mut total = vec![0.0; basis.rule().len()];
            for t in terms {
                let part = grid_values(basis, t)?;
                total.iter_mut().zip(part).for_each(|(a, b)| *a += b);
            }
            total
        }
        _ => grid_values(basis, data)?,
    };
    let projected = basis.project_values(&values, exec)?;
    let mut out = ModalCoefficients {
        values: projected,
        norm_sq: 0.0,
    };
    out.norm_sq = basis
        .rule()
        .weights
        .iter()
        .zip(&values)
        .map(|(w, v)| w * v * v)
        .sum();
    // snap quadrature excess for data that lives in the span
    if out.norm_sq < out.captured_sq() {
        out.norm_sq = out.captured_sq();
    }
    Ok(out)
}

fn grid_values(basis: &SpectralBasis, data: &InitialData) -> Result<Vec<f64>> {
    if let InitialData::Samples { path } = data {
        return read_samples(basis, path);
    }
    let extent = basis.extent();
    Ok(basis
        .rule()
        .points()
        .map(|p| data.eval(&extent, p).expect("closed-form data"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{interval_basis, rectangle_basis};
    use std::f64::consts::PI;

    #[test]
    fn projection_examples() {
        let b = interval_basis(PI, 3).unwrap();
        let c = project(&b, &InitialData::sin_mode(1), Execution::Sequential).unwrap();
        assert!((c.values[0][0] - 1.253_314_137_3).abs() < 1e-10);
        assert_eq!(c.values[1][0], 0.0);
        assert_eq!(c.parseval_residual(), 0.0);
        let z = project(&b, &InitialData::Zero, Execution::Sequential).unwrap();
        assert!(z.is_zero());
        // (x(π - x), √(2/π) sin x) = 4 √(2/π), frozen from the closed-form integral
        let c = project(&b, &InitialData::PolynomialBump { amplitude: 1.0 }, Execution::Sequential).unwrap();
        assert!((c.values[0][0] - 4.0 * (2.0 / PI).sqrt()).abs() < 1e-12);
        assert!((c.values[0][0] - 3.191_538_243_211_46).abs() < 1e-12);
        assert!(c.values[1][0].abs() < 1e-13);
        assert!(c.parseval_residual() > 0.0);
    }

    #[test]
    fn quadrature_agrees_with_exact_sine_projection() {
        let b = rectangle_basis(1.0, 2.0, 6).unwrap();
        let exact = project(&b, &InitialData::scaled_sin_mode(vec![2, 3], 0.7), Execution::Sequential).unwrap();
        let extent = b.extent();
        let f = |p: &[f64]| InitialData::scaled_sin_mode(vec![2, 3], 0.7).eval(&extent, p).unwrap();
        let numeric = b.project_fn(f, Execution::Parallel);
        for (u, v) in exact.values.iter().flatten().zip(numeric.iter().flatten()) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
