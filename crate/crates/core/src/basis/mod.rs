//! Dirichlet eigenpairs of the elliptic operator on the model domains.
//!
//! Three constructions share one [`SpectralBasis`] type: the sine basis of an
//! interval, the tensor sine basis of a rectangle and a finite-difference
//! Sturm-Liouville operator `-(a u')' - c u` on a uniform mesh.

mod samples;
mod tridiagonal;

use std::f64::consts::PI;

pub use samples::SampledFunction;
pub use tridiagonal::lowest_eigenpairs;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::quadrature::{PointRule, Rule1d};

/// Relative tolerance for merging closed-form eigenvalues.
pub const CLOSED_FORM_GROUP_TOL: f64 = 1e-12;
/// Relative tolerance for merging discrete Sturm-Liouville eigenvalues.
pub const DISCRETE_GROUP_TOL: f64 = 1e-8;

/// `sin(πx)`, exactly zero at integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == r.floor() {
        return 0.0;
    }
    if r <= 0.5 {
        (PI * r).sin()
    } else if r <= 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

/// `cos(πx)`, exactly zero at half-integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// A single eigenfunction before grouping into eigenspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Interval(usize),
    Rectangle(usize, usize),
    Mesh(usize),
}

/// Discretized Sturm-Liouville operator and its eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshOperator {
    pub length: f64,
    pub step: f64,
    /// `a` at the mesh nodes `0, h, ..., L`.
    pub a: Vec<f64>,
    /// `c` at the mesh nodes.
    pub c: Vec<f64>,
    /// Eigenvector values at the interior nodes, normalized so that the
    /// mesh inner product `Σ h φ_i ψ_i` is the identity.
    vectors: Vec<Vec<f64>>,
}

impl MeshOperator {
    pub fn nodes(&self) -> usize {
        self.a.len()
    }

    fn node_value(&self, mode: usize, node: usize) -> f64 {
        if node == 0 || node + 1 >= self.nodes() {
            0.0
        } else {
            self.vectors[mode][node - 1]
        }
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let s = (x / self.step).clamp(0.0, (self.nodes() - 1) as f64);
        let i = (s.floor() as usize).min(self.nodes() - 2);
        (i, s - i as f64)
    }

    fn eval(&self, mode: usize, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        (1.0 - t) * self.node_value(mode, i) + t * self.node_value(mode, i + 1)
    }

    fn slope(&self, mode: usize, x: f64) -> f64 {
        let (i, _) = self.locate(x);
        (self.node_value(mode, i + 1) - self.node_value(mode, i)) / self.step
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Interval { length: f64 },
    Rectangle { width: f64, height: f64 },
    SturmLiouville(Box<MeshOperator>),
}

/// Eigenvalues, multiplicities, eigenfunction evaluators and the inner
/// product quadrature of one model problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    geometry: Geometry,
    modes: Vec<Mode>,
    mode_values: Vec<f64>,
    groups: Vec<Vec<usize>>,
    eigenvalues: Vec<f64>,
    rule: PointRule,
    axes: Vec<Rule1d>,
    rect_index: Vec<usize>,
    per_axis: usize,
    group_tol: f64,
    complete_below: f64,
}

/// Consecutive runs of sorted `values` whose relative spread to the first
/// member of the run is within `rel_tol`.
pub fn group_sorted(values: &[f64], rel_tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut anchor = f64::NAN;
    for (i, &v) in values.iter().enumerate() {
        if !groups.is_empty() && (v - anchor).abs() <= rel_tol * v.abs() {
            groups.last_mut().unwrap().push(i);
        } else {
            anchor = v;
            groups.push(vec![i]);
        }
    }
    groups
}

fn group_means(values: &[f64], groups: &[Vec<usize>]) -> Vec<f64> {
    groups
        .iter()
        .map(|g| g.iter().map(|&i| values[i]).sum::<f64>() / g.len() as f64)
        .collect()
}

fn positive_length(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Sine basis of `(0, L)`: `λ_n = (nπ/L)²`, `φ_n = √(2/L) sin(nπx/L)`.
pub fn interval_basis(length: f64, modes: usize) -> Result<SpectralBasis> {
    positive_length("interval length", length)?;
    if modes == 0 {
        return Err(Error::InvalidArgument("mode count must be at least 1".into()));
    }
    let values: Vec<f64> = (1..=modes).map(|n| (n as f64 * PI / length).powi(2)).collect();
    let axis = Rule1d::for_modes(0.0, length, modes);
    let groups = (0..modes).map(|i| vec![i]).collect();
    Ok(SpectralBasis {
        geometry: Geometry::Interval { length },
        modes: (1..=modes).map(Mode::Interval).collect(),
        eigenvalues: values.clone(),
        mode_values: values,
        groups,
        rule: PointRule::from_1d(&axis),
        axes: vec![axis],
        rect_index: Vec::new(),
        per_axis: modes,
        group_tol: CLOSED_FORM_GROUP_TOL,
        complete_below: f64::INFINITY,
    })
}

/// Tensor sine basis of `(0, L1) × (0, L2)` over `(m, n) ∈ {1..N}²`.
///
/// Eigenvalues within relative `1e-12` share one eigenspace. Only
/// eigenvalues below [`SpectralBasis::complete_below`] have all of their
/// eigenfunctions inside the truncation.
pub fn rectangle_basis(width: f64, height: f64, per_axis: usize) -> Result<SpectralBasis> {
    positive_length("rectangle side L1", width)?;
    positive_length("rectangle side L2", height)?;
    if per_axis == 0 {
        return Err(Error::InvalidArgument("mode count must be at least 1".into()));
    }
    let mut raw: Vec<(f64, usize, usize)> = Vec::with_capacity(per_axis * per_axis);
    for m in 1..=per_axis {
        for n in 1..=per_axis {
            let value = ((m * m) as f64 / (width * width) + (n * n) as f64 / (height * height)) * PI * PI;
            raw.push((value, m, n));
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mode_values: Vec<f64> = raw.iter().map(|r| r.0).collect();
    let modes: Vec<Mode> = raw.iter().map(|r| Mode::Rectangle(r.1, r.2)).collect();
    let mut rect_index = vec![0; per_axis * per_axis];
    for (id, r) in raw.iter().enumerate() {
        rect_index[(r.1 - 1) * per_axis + (r.2 - 1)] = id;
    }
    let groups = group_sorted(&mode_values, CLOSED_FORM_GROUP_TOL);
    let eigenvalues = groups.iter().map(|g| mode_values[g[0]]).collect();
    let ax = Rule1d::for_modes(0.0, width, per_axis);
    let ay = Rule1d::for_modes(0.0, height, per_axis);
    let next = (per_axis + 1) as f64;
    Ok(SpectralBasis {
        geometry: Geometry::Rectangle { width, height },
        modes,
        mode_values,
        groups,
        eigenvalues,
        rule: PointRule::tensor(&ax, &ay),
        axes: vec![ax, ay],
        rect_index,
        per_axis,
        group_tol: CLOSED_FORM_GROUP_TOL,
        complete_below: PI * PI * next * next * (1.0 / (width * width)).min(1.0 / (height * height)),
    })
}

/// Finite-difference eigenpairs of `A u = -(a u')' - c u` on `(0, L)` with
/// Dirichlet ends.
///
/// `a` and `c` are samples at the `M + 1` nodes of the uniform mesh; `a` is
/// averaged harmonically onto the half nodes so the stencil stays symmetric.
pub fn sturm_liouville_basis(a: &[f64], c: &[f64], length: f64, modes: usize) -> Result<SpectralBasis> {
    positive_length("interval length", length)?;
    if a.len() != c.len() {
        return Err(Error::InvalidArgument(format!(
            "coefficient samples differ in length: a has {}, c has {}",
            a.len(),
            c.len()
        )));
    }
    if a.len() < 3 {
        return Err(Error::InvalidArgument("mesh needs at least two cells".into()));
    }
    let cells = a.len() - 1;
    let step = length / cells as f64;
    for (i, &v) in a.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Ellipticity { x: i as f64 * step, value: v });
        }
    }
    for (i, &v) in c.iter().enumerate() {
        if v > 0.0 || !v.is_finite() {
            return Err(Error::PotentialSign { x: i as f64 * step, value: v });
        }
    }
    if modes == 0 || modes > cells - 1 {
        return Err(Error::InsufficientModes { required: modes.max(1), available: cells - 1 });
    }
    let half: Vec<f64> = a.windows(2).map(|w| 2.0 * w[0] * w[1] / (w[0] + w[1])).collect();
    let h2 = step * step;
    let diag: Vec<f64> = (1..cells).map(|i| (half[i - 1] + half[i]) / h2 - c[i]).collect();
    let off: Vec<f64> = (1..cells - 1).map(|i| -half[i] / h2).collect();
    let (values, vectors) = lowest_eigenpairs(&diag, &off, modes, DISCRETE_GROUP_TOL);
    let scale = 1.0 / step.sqrt();
    let vectors = vectors
        .into_iter()
        .map(|v| v.into_iter().map(|x| x * scale).collect())
        .collect();
    let groups = group_sorted(&values, DISCRETE_GROUP_TOL);
    let eigenvalues = group_means(&values, &groups);
    let nodes: Vec<f64> = (0..=cells).map(|i| i as f64 * step).collect();
    let mut weights = vec![step; cells + 1];
    weights[0] = 0.5 * step;
    weights[cells] = 0.5 * step;
    Ok(SpectralBasis {
        geometry: Geometry::SturmLiouville(Box::new(MeshOperator {
            length,
            step,
            a: a.to_vec(),
            c: c.to_vec(),
            vectors,
        })),
        modes: (0..modes).map(Mode::Mesh).collect(),
        mode_values: values,
        groups,
        eigenvalues,
        rule: PointRule {
            dimension: 1,
            coords: nodes,
            weights,
        },
        axes: Vec::new(),
        rect_index: Vec::new(),
        per_axis: modes,
        group_tol: DISCRETE_GROUP_TOL,
        complete_below: f64::INFINITY,
    })
}

/// Least-squares slope of `log μ_n` against `log n` over the upper half of the
/// eigenvalues counted with multiplicity; Weyl's law predicts `2/d`. For the
/// rectangle only the complete part of the truncated spectrum is used.
pub fn weyl_exponent(basis: &SpectralBasis) -> Result<f64> {
    let counted = basis.counted_eigenvalues();
    if counted.len() < 10 {
        return Err(Error::InsufficientModes { required: 10, available: counted.len() });
    }
    let start = counted.len() / 2;
    let xs: Vec<f64> = (start..counted.len()).map(|i| ((i + 1) as f64).ln()).collect();
    let ys: Vec<f64> = counted[start..].iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

impl SpectralBasis {
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn dimension(&self) -> usize {
        match self.geometry {
            Geometry::Rectangle { .. } => 2,
            _ => 1,
        }
    }

    /// Distinct eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn distinct_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn multiplicity(&self, n: usize) -> usize {
        self.groups[n].len()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    /// Total number of eigenfunctions.
    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn mode(&self, n: usize, k: usize) -> Mode {
        self.modes[self.groups[n][k]]
    }

    /// Modes per axis used at construction (or the requested mode count).
    pub fn truncation(&self) -> usize {
        self.per_axis
    }

    /// Eigenvalues below this bound are complete within the truncation.
    pub fn complete_below(&self) -> f64 {
        self.complete_below
    }

    /// Eigenvalues in the complete part, repeated by multiplicity.
    pub fn counted_eigenvalues(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (n, &v) in self.eigenvalues.iter().enumerate() {
            if v < self.complete_below {
                out.extend(std::iter::repeat_n(v, self.multiplicity(n)));
            }
        }
        out
    }

    pub fn group_tolerance(&self) -> f64 {
        self.group_tol
    }

    /// The basis regrouped from its raw eigenvalues with its own tolerance.
    pub fn regrouped(&self) -> SpectralBasis {
        let order: Vec<usize> = self.groups.iter().flatten().copied().collect();
        let values: Vec<f64> = order.iter().map(|&i| self.mode_values[i]).collect();
        let groups: Vec<Vec<usize>> = group_sorted(&values, self.group_tol)
            .into_iter()
            .map(|g| g.into_iter().map(|i| order[i]).collect())
            .collect();
        let eigenvalues = match self.geometry {
            Geometry::SturmLiouville(_) => group_means(&self.mode_values, &groups),
            _ => groups.iter().map(|g| self.mode_values[g[0]]).collect(),
        };
        SpectralBasis {
            groups,
            eigenvalues,
            ..self.clone()
        }
    }

    /// Quadrature for the `L²(Ω)` inner product.
    pub fn rule(&self) -> &PointRule {
        &self.rule
    }

    pub fn extent(&self) -> Vec<f64> {
        match &self.geometry {
            Geometry::Interval { length } => vec![*length],
            Geometry::Rectangle { width, height } => vec![*width, *height],
            Geometry::SturmLiouville(op) => vec![op.length],
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let extent = self.extent();
        x.len() == extent.len()
            && x.iter()
                .zip(&extent)
                .all(|(&xi, &l)| xi.is_finite() && xi >= -1e-12 * l && xi <= l * (1.0 + 1e-12))
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain(x.to_vec()))
        }
    }

    /// `sup |φ_{nk}|` over all eigenfunctions in the basis.
    pub fn sup_bound(&self) -> f64 {
        match &self.geometry {
            Geometry::Interval { length } => (2.0 / length).sqrt(),
            Geometry::Rectangle { width, height } => 2.0 / (width * height).sqrt(),
            Geometry::SturmLiouville(op) => op
                .vectors
                .iter()
                .flatten()
                .fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }

    fn eval_mode(&self, mode: Mode, x: &[f64]) -> f64 {
        match (&self.geometry, mode) {
            (Geometry::Interval { length }, Mode::Interval(m)) => {
                (2.0 / length).sqrt() * sin_pi(m as f64 * x[0] / length)
            }
            (Geometry::Rectangle { width, height }, Mode::Rectangle(m, n)) => {
                2.0 / (width * height).sqrt()
                    * sin_pi(m as f64 * x[0] / width)
                    * sin_pi(n as f64 * x[1] / height)
            }
            (Geometry::SturmLiouville(op), Mode::Mesh(k)) => op.eval(k, x[0]),
            _ => unreachable!("mode does not belong to this geometry"),
        }
    }

    fn gradient_mode(&self, mode: Mode, x: &[f64]) -> Vec<f64> {
        match (&self.geometry, mode) {
            (Geometry::Interval { length }, Mode::Interval(m)) => {
                let k = m as f64 / length;
                vec![(2.0 / length).sqrt() * PI * k * cos_pi(k * x[0])]
            }
            (Geometry::Rectangle { width, height }, Mode::Rectangle(m, n)) => {
                let norm = 2.0 / (width * height).sqrt();
                let (kx, ky) = (m as f64 / width, n as f64 / height);
                vec![
                    norm * PI * kx * cos_pi(kx * x[0]) * sin_pi(ky * x[1]),
                    norm * PI * ky * sin_pi(kx * x[0]) * cos_pi(ky * x[1]),
                ]
            }
            (Geometry::SturmLiouville(op), Mode::Mesh(k)) => vec![op.slope(k, x[0])],
            _ => unreachable!("mode does not belong to this geometry"),
        }
    }

    /// `φ_{nk}(x)`.
    pub fn eval(&self, n: usize, k: usize, x: &[f64]) -> f64 {
        self.eval_mode(self.mode(n, k), x)
    }

    /// `∇φ_{nk}(x)`; piecewise-linear slope on a mesh.
    pub fn gradient(&self, n: usize, k: usize, x: &[f64]) -> Vec<f64> {
        self.gradient_mode(self.mode(n, k), x)
    }

    /// Principal coefficient `a(x)` of the operator (1 on the closed-form
    /// domains).
    pub fn diffusion(&self, x: &[f64]) -> f64 {
        match &self.geometry {
            Geometry::SturmLiouville(op) => {
                let (i, t) = op.locate(x[0]);
                (1.0 - t) * op.a[i] + t * op.a[i + 1]
            }
            _ => 1.0,
        }
    }

    /// Position `(n, k)` of a mode given by its labels, if present.
    pub fn find_mode(&self, mode: Mode) -> Option<(usize, usize)> {
        let id = match (&self.geometry, mode) {
            (Geometry::Interval { .. }, Mode::Interval(m)) if m >= 1 && m <= self.modes.len() => m - 1,
            (Geometry::Rectangle { .. }, Mode::Rectangle(m, n))
                if (1..=self.per_axis).contains(&m) && (1..=self.per_axis).contains(&n) =>
            {
                self.rect_index[(m - 1) * self.per_axis + (n - 1)]
            }
            (Geometry::SturmLiouville(_), Mode::Mesh(k)) if k < self.modes.len() => k,
            _ => return None,
        };
        self.groups.iter().enumerate().find_map(|(n, g)| g.iter().position(|&i| i == id).map(|k| (n, k)))
    }

    /// Arrange per-mode values (indexed by raw mode id) by eigenspace.
    fn arrange(&self, raw: &[f64]) -> Vec<Vec<f64>> {
        self.groups.iter().map(|g| g.iter().map(|&i| raw[i]).collect()).collect()
    }

    /// Coefficients `(f, φ_{nk})` from values of `f` at the rule points,
    /// arranged by eigenspace.
    pub fn project_values(&self, values: &[f64], exec: Execution) -> Result<Vec<Vec<f64>>> {
        if values.len() != self.rule.len() {
            return Err(Error::QuadratureMismatch(format!(
                "expected {} samples on the basis quadrature grid, got {}",
                self.rule.len(),
                values.len()
            )));
        }
        let raw = match &self.geometry {
            Geometry::Rectangle { width, height } => {
                let (ax, ay) = (&self.axes[0], &self.axes[1]);
                let ny = ay.len();
                let (sx, sy) = ((2.0 / width).sqrt(), (2.0 / height).sqrt());
                // partial sums over the first axis, then the second
                let partial: Vec<Vec<f64>> = par::map_range(exec, self.per_axis, |mi| {
                    let m = (mi + 1) as f64;
                    let mut row = vec![0.0; ny];
                    for (i, (&x, &w)) in ax.nodes.iter().zip(&ax.weights).enumerate() {
                        let f = w * sx * sin_pi(m * x / width);
                        for (j, r) in row.iter_mut().enumerate() {
                            *r += f * values[i * ny + j];
                        }
                    }
                    row
                });
                let table_y: Vec<Vec<f64>> = (1..=self.per_axis)
                    .map(|n| {
                        ay.nodes
                            .iter()
                            .zip(&ay.weights)
                            .map(|(&y, &w)| w * sy * sin_pi(n as f64 * y / height))
                            .collect()
                    })
                    .collect();
                let mut raw = vec![0.0; self.modes.len()];
                for (mi, row) in partial.iter().enumerate() {
                    for (ni, ty) in table_y.iter().enumerate() {
                        let v: f64 = row.iter().zip(ty).map(|(a, b)| a * b).sum();
                        raw[self.rect_index[mi * self.per_axis + ni]] = v;
                    }
                }
                raw
            }
            _ => par::map_slice(exec, &self.modes, |&mode| {
                self.rule
                    .points()
                    .zip(&self.rule.weights)
                    .zip(values)
                    .map(|((p, &w), &f)| w * f * self.eval_mode(mode, p))
                    .sum()
            }),
        };
        Ok(self.arrange(&raw))
    }

    /// Coefficients of a function given as a closure.
    pub fn project_fn<F>(&self, f: F, exec: Execution) -> Vec<Vec<f64>>
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        let points: Vec<&[f64]> = self.rule.points().collect();
        let values = par::map_slice(exec, &points, |p| f(p));
        self.project_values(&values, exec).expect("values match the rule")
    }

    /// Human-readable label of eigenfunction `(n, k)`.
    pub fn mode_label(&self, n: usize, k: usize) -> String {
        match self.mode(n, k) {
            Mode::Interval(m) => format!("sin {m}"),
            Mode::Rectangle(m, p) => format!("sin {m} x sin {p}"),
            Mode::Mesh(j) => format!("mesh mode {}", j + 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_examples() {
        let b = interval_basis(PI, 3).unwrap();
        for (v, e) in b.eigenvalues().iter().zip([1.0, 4.0, 9.0]) {
            assert!((v - e).abs() < 1e-13);
        }
        let x = [0.7];
        assert!((b.eval(1, 0, &x) - (2.0 / PI).sqrt() * (2.0 * 0.7f64).sin()).abs() < 1e-15);
        assert_eq!(b.eval(1, 0, &[PI / 2.0]), 0.0);
        assert!((interval_basis(1.0, 1).unwrap().eigenvalues()[0] - PI * PI).abs() < 1e-13);
        assert!(interval_basis(-1.0, 3).is_err());
        assert!(interval_basis(1.0, 0).is_err());
    }

    #[test]
    fn rectangle_examples() {
        let b = rectangle_basis(1.0, 1.0, 2).unwrap();
        assert_eq!(b.distinct_count(), 3);
        assert_eq!(b.multiplicities(), vec![1, 2, 1]);
        assert!((b.eigenvalues()[1] - 5.0 * PI * PI).abs() < 1e-12);
        let b = rectangle_basis(1.0, std::f64::consts::SQRT_2, 4).unwrap();
        assert_eq!(b.distinct_count(), 16);
        assert!(b.multiplicities().iter().all(|&d| d == 1));
        let b = rectangle_basis(2.0, 1.0, 1).unwrap();
        assert!((b.eigenvalues()[0] - 1.25 * PI * PI).abs() < 1e-12);
        assert!(rectangle_basis(0.0, 1.0, 2).is_err());
    }

    #[test]
    fn sturm_liouville_examples() {
        let m = 2000;
        let b = sturm_liouville_basis(&vec![1.0; m + 1], &vec![0.0; m + 1], PI, 3).unwrap();
        for (v, e) in b.eigenvalues().iter().zip([1.0, 4.0, 9.0]) {
            assert!(((v - e) / e).abs() < 1e-5, "{v} vs {e}");
        }
        let b = sturm_liouville_basis(&vec![1.0; m + 1], &vec![-1.0; m + 1], PI, 1).unwrap();
        assert!((b.eigenvalues()[0] - 2.0).abs() < 1e-5);
        let mut c = vec![0.0; m + 1];
        c[700] = 1.0;
        assert!(matches!(
            sturm_liouville_basis(&vec![1.0; m + 1], &c, PI, 1),
            Err(Error::PotentialSign { .. })
        ));
        let mut a = vec![1.0; m + 1];
        a[5] = 0.0;
        assert!(matches!(
            sturm_liouville_basis(&a, &vec![0.0; m + 1], PI, 1),
            Err(Error::Ellipticity { .. })
        ));
    }

    #[test]
    fn weyl_examples() {
        let b = interval_basis(PI, 100).unwrap();
        assert!((weyl_exponent(&b).unwrap() - 2.0).abs() < 1e-10);
        let b = rectangle_basis(1.0, std::f64::consts::SQRT_2, 30).unwrap();
        let w = weyl_exponent(&b).unwrap();
        assert!((w - 1.0).abs() < 0.15, "{w}");
        let b = interval_basis(PI, 5).unwrap();
        assert!(matches!(weyl_exponent(&b), Err(Error::InsufficientModes { .. })));
    }

    #[test]
    fn orthonormal_sturm_liouville_modes() {
        let m = 400;
        let a: Vec<f64> = (0..=m).map(|i| 1.0 + 0.5 * (i as f64 / m as f64)).collect();
        let b = sturm_liouville_basis(&a, &vec![-0.3; m + 1], 2.0, 8).unwrap();
        let rule = b.rule();
        for i in 0..8 {
            for j in 0..8 {
                let dot = rule.integrate(|p| b.eval(i, 0, p) * b.eval(j, 0, p));
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((dot - e).abs() < 1e-10, "{i} {j}: {dot}");
            }
        }
    }

    #[test]
    fn regrouping_is_idempotent() {
        let b = rectangle_basis(1.0, 1.0, 6).unwrap();
        let r = b.regrouped();
        assert_eq!(b.multiplicities(), r.multiplicities());
        assert_eq!(b.eigenvalues(), r.eigenvalues());
        assert_eq!(r, r.regrouped());
    }

    #[test]
    fn sin_pi_is_exact_at_integers() {
        assert_eq!(sin_pi(1.0), 0.0);
        assert_eq!(sin_pi(-3.0), 0.0);
        assert_eq!(sin_pi(0.5), 1.0);
        assert_eq!(sin_pi(1.5), -1.0);
        assert_eq!(cos_pi(0.5), 0.0);
        for i in 0..100 {
            let x = -3.0 + 0.0637 * i as f64;
            assert!((sin_pi(x) - (PI * x).sin()).abs() < 1e-14);
        }
    }
}
