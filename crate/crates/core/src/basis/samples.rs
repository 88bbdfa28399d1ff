//! Two-column sampled functions `(x, value)` with linear interpolation.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampledFunction {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least two (x, value) pairs, got {} x and {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("sample abscissae must be strictly increasing".into()));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("samples must be finite".into()));
        }
        Ok(Self { xs, ys })
    }

    /// Whitespace- or comma-separated columns; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(Error::InvalidArgument(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("line {}: cannot parse `{s}`", lineno + 1)))
            };
            xs.push(parse(fields[0])?);
            ys.push(parse(fields[1])?);
        }
        Self::new(xs, ys)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Linear interpolation, constant beyond the end samples.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
    }

    pub fn resample(&self, mesh: &[f64]) -> Vec<f64> {
        mesh.iter().map(|&x| self.eval(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_interpolates() {
        let f = SampledFunction::parse("# x a\n0 1\n1, 3\n\n2 3 # flat\n").unwrap();
        assert_eq!(f.eval(0.5), 2.0);
        assert_eq!(f.eval(1.5), 3.0);
        assert_eq!(f.eval(-1.0), 1.0);
        assert!(SampledFunction::parse("0 1 2\n").is_err());
        assert!(SampledFunction::parse("1 0\n0 1\n").is_err());
    }
}
