//! Composite Gauss-Legendre rules on intervals and tensor products.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

/// Nodes per panel.
pub const PANEL_DEGREE: usize = 16;

fn reference_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut pairs = GaussLegendre::new(PANEL_DEGREE)
            .expect("valid degree")
            .into_node_weight_pairs();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    /// `panels` equal panels on `[a, b]`, each with [`PANEL_DEGREE`] nodes.
    pub fn composite(a: f64, b: f64, panels: usize) -> Self {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * PANEL_DEGREE);
        let mut weights = Vec::with_capacity(panels * PANEL_DEGREE);
        for p in 0..panels {
            let lo = a + width * p as f64;
            let mid = lo + 0.5 * width;
            for &(x, w) in reference_rule() {
                nodes.push(mid + 0.5 * width * x);
                weights.push(0.5 * width * w);
            }
        }
        Self { nodes, weights }
    }

    /// Panel count giving at least 64 nodes and one panel per two modes.
    pub fn for_modes(a: f64, b: f64, modes: usize) -> Self {
        Self::composite(a, b, (modes / 2).max(4))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Flat list of quadrature points in one or two dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRule {
    pub dimension: usize,
    /// Point coordinates, `dimension` entries per point.
    pub coords: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PointRule {
    pub fn from_1d(rule: &Rule1d) -> Self {
        Self {
            dimension: 1,
            coords: rule.nodes.clone(),
            weights: rule.weights.clone(),
        }
    }

    /// Tensor product with the first axis varying slowest.
    pub fn tensor(x: &Rule1d, y: &Rule1d) -> Self {
        let mut coords = Vec::with_capacity(2 * x.len() * y.len());
        let mut weights = Vec::with_capacity(x.len() * y.len());
        for (&xi, &wi) in x.nodes.iter().zip(&x.weights) {
            for (&yj, &wj) in y.nodes.iter().zip(&y.weights) {
                coords.push(xi);
                coords.push(yj);
                weights.push(wi * wj);
            }
        }
        Self {
            dimension: 2,
            coords,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.dimension)
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points().zip(&self.weights).map(|(p, &w)| w * f(p)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn integrates_oscillatory_sine_products() {
        let rule = Rule1d::for_modes(0.0, PI, 64);
        assert!(rule.len() >= 64);
        let v = rule.integrate(|x| (63.0 * x).sin() * (63.0 * x).sin());
        assert!((v - PI / 2.0).abs() < 1e-13);
        let v = rule.integrate(|x| (63.0 * x).sin() * (62.0 * x).sin());
        assert!(v.abs() < 1e-13);
    }

    #[test]
    fn tensor_rule_area() {
        let x = Rule1d::composite(0.0, 2.0, 4);
        let y = Rule1d::composite(0.0, 3.0, 4);
        let r = PointRule::tensor(&x, &y);
        assert!((r.integrate(|_| 1.0) - 6.0).abs() < 1e-12);
        assert!((r.integrate(|p| p[0] * p[1]) - 9.0).abs() < 1e-12);
    }
}
