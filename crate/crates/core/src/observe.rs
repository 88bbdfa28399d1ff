//! Observation maps: subdomain restriction, boundary flux, point values and
//! weighted averages.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{sin_pi, Geometry, Mode, SpectralBasis};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::quadrature::Rule1d;
use crate::solver::{project, FractionalProblem, InitialData, Quantity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `x = 0`.
    Left,
    /// `x = L` (or `x = width`).
    Right,
    /// `y = 0`.
    Bottom,
    /// `y = height`.
    Top,
}

/// Weight function of a weighted average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// The `k`-th eigenfunction of the `n`-th distinct eigenvalue (1-based).
    Eigenfunction {
        n: usize,
        #[serde(default = "first")]
        k: usize,
    },
    Function { data: InitialData },
}

fn first() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Target {
    /// `L²` restriction to the box `lower ≤ x ≤ upper`.
    Subdomain { lower: Vec<f64>, upper: Vec<f64> },
    /// Conormal derivative on one side, optionally restricted to `range`.
    BoundaryFlux {
        side: Side,
        #[serde(default)]
        range: Option<[f64; 2]>,
    },
    Points { points: Vec<Vec<f64>> },
    Weighted { profiles: Vec<Profile> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationSpec {
    pub target: Target,
    #[serde(default = "field")]
    pub quantity: Quantity,
}

fn field() -> Quantity {
    Quantity::Field
}

impl ObservationSpec {
    pub fn point(x: Vec<f64>, quantity: Quantity) -> Self {
        Self {
            target: Target::Points { points: vec![x] },
            quantity,
        }
    }

    pub fn subdomain(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self {
            target: Target::Subdomain { lower, upper },
            quantity: Quantity::Field,
        }
    }
}

/// Element of the observation space with the weights of its norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Observed {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Observed {
    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// The single value for one-dimensional unit-weight outputs, else the norm.
    pub fn scalar(&self) -> f64 {
        if self.values.len() == 1 && self.weights[0] == 1.0 {
            self.values[0]
        } else {
            self.norm()
        }
    }
}

#[derive(Debug, Clone)]
enum Plan {
    /// Values at explicit points: `φ` or a gradient component times the
    /// conormal factor.
    Pointwise {
        points: Vec<Vec<f64>>,
        flux: Option<(usize, f64)>,
    },
    /// Tensor grid on a box of a rectangle, evaluated separably.
    SeparableBox { x: Vec<f64>, y: Vec<f64> },
    Inner { profiles: Vec<Vec<Vec<f64>>> },
}

/// A compiled observation map on a fixed basis.
#[derive(Debug, Clone)]
pub struct ObservationMap {
    spec: ObservationSpec,
    plan: Plan,
    weights: Vec<f64>,
}

fn side_axis(side: Side) -> (usize, bool) {
    match side {
        Side::Left => (0, false),
        Side::Right => (0, true),
        Side::Bottom => (1, false),
        Side::Top => (1, true),
    }
}

impl ObservationMap {
    pub fn new(spec: ObservationSpec, basis: &SpectralBasis) -> Result<Self> {
        let d = basis.dimension();
        let extent = basis.extent();
        let panels = basis.truncation();
        let (plan, weights) = match &spec.target {
            Target::Subdomain { lower, upper } => {
                if lower.len() != d || upper.len() != d {
                    return Err(Error::InvalidArgument(format!("subdomain corners need {d} coordinates")));
                }
                for i in 0..d {
                    if !(lower[i] < upper[i]) || lower[i] < 0.0 || upper[i] > extent[i] * (1.0 + 1e-12) {
                        return Err(Error::InvalidArgument(format!(
                            "subdomain [{lower:?}, {upper:?}] is empty or leaves the domain"
                        )));
                    }
                }
                let rules: Vec<Rule1d> = (0..d)
                    .map(|i| Rule1d::for_modes(lower[i], upper[i], panels))
                    .collect();
                if d == 1 {
                    let points = rules[0].nodes.iter().map(|&x| vec![x]).collect();
                    (Plan::Pointwise { points, flux: None }, rules[0].weights.clone())
                } else if matches!(basis.geometry(), Geometry::Rectangle { .. }) {
                    let mut w = Vec::with_capacity(rules[0].len() * rules[1].len());
                    for wx in &rules[0].weights {
                        for wy in &rules[1].weights {
                            w.push(wx * wy);
                        }
                    }
                    (
                        Plan::SeparableBox {
                            x: rules[0].nodes.clone(),
                            y: rules[1].nodes.clone(),
                        },
                        w,
                    )
                } else {
                    return Err(Error::OutOfScope("subdomain observation on this geometry".into()));
                }
            }
            Target::BoundaryFlux { side, range } => {
                let (axis, far) = side_axis(*side);
                if axis >= d {
                    return Err(Error::InvalidArgument(format!("side {side:?} does not exist in {d} dimension(s)")));
                }
                let wall = if far { extent[axis] } else { 0.0 };
                let normal = if far { 1.0 } else { -1.0 };
                if d == 1 {
                    (
                        Plan::Pointwise {
                            points: vec![vec![wall]],
                            flux: Some((0, normal)),
                        },
                        vec![1.0],
                    )
                } else {
                    let other = 1 - axis;
                    let [lo, hi] = range.unwrap_or([0.0, extent[other]]);
                    if !(lo < hi) || lo < 0.0 || hi > extent[other] * (1.0 + 1e-12) {
                        return Err(Error::InvalidArgument(format!("boundary range [{lo}, {hi}] leaves the side")));
                    }
                    let rule = Rule1d::for_modes(lo, hi, panels);
                    let points = rule
                        .nodes
                        .iter()
                        .map(|&s| {
                            let mut p = vec![0.0; 2];
                            p[axis] = wall;
                            p[other] = s;
                            p
                        })
                        .collect();
                    (
                        Plan::Pointwise {
                            points,
                            flux: Some((axis, normal)),
                        },
                        rule.weights,
                    )
                }
            }
            Target::Points { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidArgument("at least one observation point is needed".into()));
                }
                for p in points {
                    basis.check_point(p)?;
                }
                (
                    Plan::Pointwise {
                        points: points.clone(),
                        flux: None,
                    },
                    vec![1.0; points.len()],
                )
            }
            Target::Weighted { profiles } => {
                if profiles.is_empty() {
                    return Err(Error::InvalidArgument("at least one weight profile is needed".into()));
                }
                let mut rows = Vec::with_capacity(profiles.len());
                for prof in profiles {
                    rows.push(match prof {
                        Profile::Eigenfunction { n, k } => {
                            if *n == 0 || *n > basis.distinct_count() || *k == 0 || *k > basis.multiplicity(n - 1) {
                                return Err(Error::InvalidArgument(format!(
                                    "eigenfunction ({n}, {k}) is not in the basis"
                                )));
                            }
                            let mut c: Vec<Vec<f64>> =
                                basis.multiplicities().iter().map(|&m| vec![0.0; m]).collect();
                            c[n - 1][k - 1] = 1.0;
                            c
                        }
                        Profile::Function { data } => project(basis, data, Execution::Sequential)?.values,
                    });
                }
                let m = rows.len();
                (Plan::Inner { profiles: rows }, vec![1.0; m])
            }
        };
        if let Quantity::Caputo(beta) = spec.quantity {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::InvalidArgument(format!("beta = {beta} must lie in (0, 1)")));
            }
        }
        Ok(Self { spec, plan, weights })
    }

    pub fn spec(&self) -> &ObservationSpec {
        &self.spec
    }

    pub fn quantity(&self) -> Quantity {
        self.spec.quantity
    }

    /// Dimension of the discrete observation space.
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Image of a modal state arranged by eigenspace.
    pub fn apply(&self, basis: &SpectralBasis, state: &[Vec<f64>]) -> Vec<f64> {
        match &self.plan {
            Plan::Pointwise { points, flux } => points
                .iter()
                .map(|p| {
                    let mut v = 0.0;
                    for (n, row) in state.iter().enumerate() {
                        for (k, &c) in row.iter().enumerate() {
                            if c == 0.0 {
                                continue;
                            }
                            v += c * match flux {
                                None => basis.eval(n, k, p),
                                Some((axis, normal)) => normal * basis.gradient(n, k, p)[*axis],
                            };
                        }
                    }
                    match flux {
                        Some(_) => basis.diffusion(p) * v,
                        None => v,
                    }
                })
                .collect(),
            Plan::SeparableBox { x, y } => separable_box(basis, state, x, y),
            Plan::Inner { profiles } => profiles
                .iter()
                .map(|rho| {
                    rho.iter()
                        .flatten()
                        .zip(state.iter().flatten())
                        .map(|(r, c)| r * c)
                        .sum()
                })
                .collect(),
        }
    }

    /// `F(u(t))` of the observed quantity.
    pub fn observe(&self, problem: &FractionalProblem, t: f64) -> Result<Observed> {
        let state = problem.evolve(self.spec.quantity, t)?;
        Ok(Observed {
            values: self.apply(problem.basis(), &state),
            weights: self.weights.clone(),
        })
    }

    /// [`Self::observe`] over many times.
    pub fn series(&self, problem: &FractionalProblem, times: &[f64], exec: Execution) -> Result<Vec<Observed>> {
        par::try_map_slice(exec, times, |&t| self.observe(problem, t))
    }

    /// Whether `F` is injective on the `n`-th eigenspace (points and weighted
    /// averages only): the image matrix must have full column rank with
    /// singular values above `1e-8` relative to the largest.
    pub fn eigenspace_injective(&self, basis: &SpectralBasis, n: usize) -> Result<bool> {
        if !matches!(self.spec.target, Target::Points { .. } | Target::Weighted { .. }) {
            return Err(Error::OutOfScope(
                "eigenspace injectivity is checked for point and weighted observations".into(),
            ));
        }
        let d = basis.multiplicity(n);
        let mut columns = Vec::with_capacity(d);
        for k in 0..d {
            let mut state: Vec<Vec<f64>> = basis.multiplicities().iter().map(|&m| vec![0.0; m]).collect();
            state[n][k] = 1.0;
            columns.push(self.apply(basis, &state));
        }
        let m = self.dim();
        let matrix = DMatrix::from_fn(m, d, |i, j| columns[j][i]);
        let sv = matrix.singular_values();
        let top = sv.iter().cloned().fold(0.0, f64::max);
        if top <= 1e-14 {
            return Ok(false);
        }
        let rank = sv.iter().filter(|&&s| s > 1e-8 * top).count();
        Ok(rank == d)
    }

    /// Eigenspaces (0-based) of the truncated basis on which `F` fails to be
    /// injective.
    pub fn injectivity_failures(&self, basis: &SpectralBasis) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for n in 0..basis.distinct_count() {
            if !self.eigenspace_injective(basis, n)? {
                out.push(n);
            }
        }
        Ok(out)
    }
}

fn separable_box(basis: &SpectralBasis, state: &[Vec<f64>], xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let Geometry::Rectangle { width, height } = basis.geometry() else {
        unreachable!("separable plan is built for rectangles only")
    };
    let mut per_axis = 0;
    let mut entries = Vec::new();
    for (n, row) in state.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            if let Mode::Rectangle(i, j) = basis.mode(n, k) {
                per_axis = per_axis.max(i).max(j);
                if c != 0.0 {
                    entries.push((i, j, c));
                }
            }
        }
    }
    let mut coeff = vec![0.0; per_axis * per_axis];
    for (i, j, c) in entries {
        coeff[(i - 1) * per_axis + (j - 1)] = c;
    }
    let sx: Vec<f64> = xs
        .iter()
        .flat_map(|&x| (1..=per_axis).map(move |m| sin_pi(m as f64 * x / width)))
        .collect();
    let sy: Vec<f64> = ys
        .iter()
        .flat_map(|&y| (1..=per_axis).map(move |m| sin_pi(m as f64 * y / height)))
        .collect();
    // inner[m][j] = Σ_n coeff[m][n] sy[j][n]
    let mut inner = vec![0.0; per_axis * ys.len()];
    for m in 0..per_axis {
        for j in 0..ys.len() {
            let mut s = 0.0;
            for n in 0..per_axis {
                s += coeff[m * per_axis + n] * sy[j * per_axis + n];
            }
            inner[m * ys.len() + j] = s;
        }
    }
    let norm = 2.0 / (width * height).sqrt();
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for i in 0..xs.len() {
        for j in 0..ys.len() {
            let mut s = 0.0;
            for m in 0..per_axis {
                s += sx[i * per_axis + m] * inner[m * ys.len() + j];
            }
            out.push(norm * s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{interval_basis, rectangle_basis};
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn subdomain_norm_of_initial_value() {
        let basis = Arc::new(interval_basis(PI, 16).unwrap());
        let p = FractionalProblem::from_data(0.5, basis.clone(), &InitialData::sin_mode(1), None, Execution::Sequential)
            .unwrap();
        let map = ObservationMap::new(ObservationSpec::subdomain(vec![0.0], vec![PI / 2.0]), &basis).unwrap();
        let v = map.observe(&p, 0.0).unwrap().norm();
        assert!((v - (PI / 4.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn separable_box_matches_pointwise() {
        let basis = rectangle_basis(1.0, 2.0, 5).unwrap();
        let data = InitialData::Sum {
            terms: vec![
                InitialData::scaled_sin_mode(vec![1, 2], 1.0),
                InitialData::scaled_sin_mode(vec![3, 1], -0.5),
            ],
        };
        let c = project(&basis, &data, Execution::Sequential).unwrap();
        let map = ObservationMap::new(ObservationSpec::subdomain(vec![0.2, 0.5], vec![0.7, 1.5]), &basis).unwrap();
        let values = map.apply(&basis, &c.values);
        let Plan::SeparableBox { x, y } = &map.plan else { panic!() };
        let extent = basis.extent();
        let mut idx = 0;
        for &xi in x {
            for &yj in y {
                let exact = data.eval(&extent, &[xi, yj]).unwrap();
                assert!((values[idx] - exact).abs() < 1e-13);
                idx += 1;
            }
        }
    }

    #[test]
    fn boundary_flux_of_sine() {
        let basis = interval_basis(PI, 8).unwrap();
        let c = project(&basis, &InitialData::sin_mode(1), Execution::Sequential).unwrap();
        let spec = ObservationSpec {
            target: Target::BoundaryFlux {
                side: Side::Left,
                range: None,
            },
            quantity: Quantity::Field,
        };
        let map = ObservationMap::new(spec, &basis).unwrap();
        // -u'(0) for u = sin x
        assert!((map.apply(&basis, &c.values)[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn point_injectivity_on_square() {
        let basis = rectangle_basis(PI, PI, 4).unwrap();
        // φ_{12} and φ_{21} share an eigenvalue; one generic point separates
        // neither pair, two points do
        let one = ObservationMap::new(ObservationSpec::point(vec![0.7, 1.3], Quantity::Field), &basis).unwrap();
        let two = ObservationMap::new(
            ObservationSpec {
                target: Target::Points {
                    points: vec![vec![0.7, 1.3], vec![1.1, 0.4]],
                },
                quantity: Quantity::Field,
            },
            &basis,
        )
        .unwrap();
        let pair = (0..basis.distinct_count()).find(|&n| basis.multiplicity(n) == 2).unwrap();
        assert!(one.eigenspace_injective(&basis, 0).unwrap());
        assert!(!one.eigenspace_injective(&basis, pair).unwrap());
        assert!(two.eigenspace_injective(&basis, pair).unwrap());
        assert!(ObservationMap::new(ObservationSpec::point(vec![4.0, 1.0], Quantity::Field), &basis).is_err());
    }
}
