//! Symmetric tridiagonal eigenpairs by Sturm bisection and inverse iteration.

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off_sq: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off_sq[i - 1] / q };
        q = diag[i] - x - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based).
fn bisect(diag: &[f64], off_sq: &[f64], k: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off_sq, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Solve `(T - shift) x = rhs` with partial pivoting; the matrix is
/// overwritten into band factors each call.
fn shifted_solve(diag: &[f64], off: &[f64], shift: f64, rhs: &mut [f64]) {
    let n = diag.len();
    // rows hold (sub, main, super, super2) after pivoting
    let mut main: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let mut sup: Vec<f64> = off.to_vec();
    sup.push(0.0);
    let mut sup2 = vec![0.0; n];
    let mut sub: Vec<f64> = off.to_vec();
    let tiny = f64::EPSILON * diag.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1.0);
    for i in 0..n.saturating_sub(1) {
        if sub[i].abs() > main[i].abs() {
            // swap rows i and i + 1
            let (m0, s0, t0) = (main[i], sup[i], sup2[i]);
            main[i] = sub[i];
            sup[i] = main[i + 1];
            sup2[i] = sup[i + 1];
            main[i + 1] = s0;
            sup[i + 1] = t0;
            let lower = m0;
            rhs.swap(i, i + 1);
            let factor = lower / main[i];
            main[i + 1] -= factor * sup[i];
            sup[i + 1] -= factor * sup2[i];
            rhs[i + 1] -= factor * rhs[i];
        } else {
            if main[i] == 0.0 {
                main[i] = tiny;
            }
            let factor = sub[i] / main[i];
            main[i + 1] -= factor * sup[i];
            rhs[i + 1] -= factor * rhs[i];
        }
        sub[i] = 0.0;
    }
    if main[n - 1] == 0.0 {
        main[n - 1] = tiny;
    }
    for i in (0..n).rev() {
        let mut v = rhs[i];
        if i + 1 < n {
            v -= sup[i] * rhs[i + 1];
        }
        if i + 2 < n {
            v -= sup2[i] * rhs[i + 2];
        }
        rhs[i] = v / main[i];
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// The `count` smallest eigenpairs of the symmetric tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off`. Eigenvectors are orthonormal in
/// the Euclidean inner product; eigenvalues closer than `cluster_tol`
/// (relative) are reorthogonalized against each other.
pub fn lowest_eigenpairs(
    diag: &[f64],
    off: &[f64],
    count: usize,
    cluster_tol: f64,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = diag.len();
    assert!(off.len() + 1 == n && count <= n);
    let off_sq: Vec<f64> = off.iter().map(|e| e * e).collect();
    let (lo, hi) = gershgorin(diag, off);
    let mut values: Vec<f64> = Vec::with_capacity(count);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    for k in 0..count {
        let lambda = bisect(diag, &off_sq, k, lo, hi);
        let shift = lambda - 4.0 * f64::EPSILON * lambda.abs().max(1.0);
        // deterministic, not orthogonal to any low mode
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7 + k * 3) % 11) as f64 / 11.0).collect();
        normalize(&mut v);
        for _ in 0..4 {
            shifted_solve(diag, off, shift, &mut v);
            for (j, u) in vectors.iter().enumerate() {
                if (values[j] - lambda).abs() <= cluster_tol * lambda.abs() {
                    let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(u).for_each(|(x, y)| *x -= dot * y);
                }
            }
            normalize(&mut v);
        }
        // fix the sign so that the first significant entry is positive
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-8) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        values.push(lambda);
        vectors.push(v);
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn discrete_laplacian_closed_form() {
        let n = 200;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let (values, vectors) = lowest_eigenpairs(&diag, &off, 5, 1e-10);
        for (k, (&lambda, v)) in values.iter().zip(&vectors).enumerate() {
            let theta = (k + 1) as f64 * PI / (n + 1) as f64;
            let exact = 2.0 - 2.0 * theta.cos();
            assert!(((lambda - exact) / exact).abs() < 1e-12, "k = {k}");
            let residual: f64 = (0..n)
                .map(|i| {
                    let left = if i > 0 { -v[i - 1] } else { 0.0 };
                    let right = if i + 1 < n { -v[i + 1] } else { 0.0 };
                    (2.0 * v[i] + left + right - lambda * v[i]).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            assert!(residual < 1e-10, "k = {k}: {residual}");
        }
        for i in 0..5 {
            for j in 0..5 {
                let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-10);
            }
        }
    }
}
