//! Certificates that the origin lies in the interior of a convex hull, and
//! separating half-spaces when it does not.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::{null_space, relative_rank};
use crate::simplex::{solve, LpOutcome};

/// Strictly positive convex coefficients with `sum a_i v_i = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullCertificate {
    pub coefficients: Vec<f64>,
    pub margin: f64,
    pub residual: f64,
}

impl HullCertificate {
    pub fn is_valid(&self) -> bool {
        self.margin > 0.0 && self.residual <= 1e-9
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HullVerdict {
    Interior(HullCertificate),
    /// `y` with `y . v_i >= -1e-9` for every input vector.
    Separated { functional: Vec<f64> },
    /// All vectors vanish.
    Degenerate,
    /// Zero is in the interior but with margin below the requested tolerance.
    Marginal(HullCertificate),
}

impl HullVerdict {
    pub fn certificate(&self) -> Option<&HullCertificate> {
        match self {
            HullVerdict::Interior(c) => Some(c),
            _ => None,
        }
    }
}

/// Largest `s` such that `sum a_i v_i = 0`, `sum a_i = 1`, `a_i >= s`.
///
/// Returns `None` when zero is not in the hull at all.
pub fn max_margin_coefficients(vs: &[DVector<f64>]) -> Option<(Vec<f64>, f64)> {
    let n = vs.len();
    let d = vs[0].len();
    // Variables b_1..b_n, s with a_i = s + b_i.
    let mut a = DMatrix::zeros(d + 1, n + 1);
    for (i, v) in vs.iter().enumerate() {
        for k in 0..d {
            a[(k, i)] = v[k];
            a[(k, n)] += v[k];
        }
        a[(d, i)] = 1.0;
    }
    a[(d, n)] = n as f64;
    let mut b = DVector::zeros(d + 1);
    b[d] = 1.0;
    let mut c = DVector::zeros(n + 1);
    c[n] = 1.0;
    match solve(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => {
            let s = x[n];
            let coeffs: Vec<f64> = (0..n).map(|i| s + x[i]).collect();
            Some((coeffs, s))
        }
        _ => None,
    }
}

/// Separating functional maximizing `sum_i y . v_i` over `|y_k| <= 1`,
/// `y . v_i >= 0`. Returns it when the optimum is positive.
fn separator_lp(vs: &[DVector<f64>]) -> Option<Vec<f64>> {
    let n = vs.len();
    let d = vs[0].len();
    // y = u - 1 with 0 <= u <= 2. Variables: u (d), w (d) with u + w = 2, slack s (n).
    let cols = 2 * d + n;
    let mut a = DMatrix::zeros(n + d, cols);
    let mut b = DVector::zeros(n + d);
    for (i, v) in vs.iter().enumerate() {
        for k in 0..d {
            a[(i, k)] = v[k];
        }
        a[(i, 2 * d + i)] = -1.0;
        b[i] = v.sum();
    }
    for k in 0..d {
        a[(n + k, k)] = 1.0;
        a[(n + k, d + k)] = 1.0;
        b[n + k] = 2.0;
    }
    let total: DVector<f64> = vs.iter().fold(DVector::zeros(d), |acc, v| acc + v);
    let mut c = DVector::zeros(cols);
    for k in 0..d {
        c[k] = total[k];
    }
    match solve(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => {
            let y: Vec<f64> = (0..d).map(|k| x[k] - 1.0).collect();
            let yv = DVector::from_column_slice(&y);
            let obj = yv.dot(&total);
            if obj > 1e-9 {
                Some(y)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Decides whether the origin lies in the interior of `conv{v_i}`.
pub fn zero_in_hull_interior(vs: &[DVector<f64>], margin_tol: f64) -> HullVerdict {
    if vs.is_empty() {
        return HullVerdict::Degenerate;
    }
    let d = vs[0].len();
    let scale = vs.iter().map(|v| v.amax()).fold(0.0, f64::max);
    if scale == 0.0 {
        return HullVerdict::Degenerate;
    }
    let normed: Vec<DVector<f64>> = vs.iter().map(|v| v / scale).collect();
    let stacked = DMatrix::from_columns(&normed);
    let rank = relative_rank(&stacked, 1e-10);
    if rank < d {
        let ns = null_space(&stacked.transpose(), 1e-10);
        let y: Vec<f64> = ns.column(0).iter().copied().collect();
        return HullVerdict::Separated { functional: y };
    }
    if let Some((coeffs, s)) = max_margin_coefficients(&normed) {
        let residual = vs
            .iter()
            .zip(&coeffs)
            .fold(DVector::zeros(d), |acc, (v, &a)| acc + v * a)
            .norm();
        let cert = HullCertificate { coefficients: coeffs, margin: s, residual };
        if s >= margin_tol && s > 0.0 {
            return HullVerdict::Interior(cert);
        }
        if s > 0.0 {
            if let Some(y) = separator_lp(&normed) {
                return HullVerdict::Separated { functional: y };
            }
            return HullVerdict::Marginal(cert);
        }
    }
    match separator_lp(&normed) {
        Some(y) => HullVerdict::Separated { functional: y },
        None => {
            // Zero is on the boundary with every functional vanishing on the
            // sum; any null direction of the active set separates.
            let ns = null_space(&stacked.transpose(), 1e-8);
            if ns.ncols() > 0 {
                HullVerdict::Separated { functional: ns.column(0).iter().copied().collect() }
            } else {
                HullVerdict::Marginal(HullCertificate { coefficients: vec![0.0; vs.len()], margin: 0.0, residual: 0.0 })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn gaussian(d: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
        DVector::from_fn(d, |_, _| StandardNormal.sample(rng))
    }

    #[test]
    fn cross_polytope() {
        let vs = vec![v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, -1.0])];
        match zero_in_hull_interior(&vs, 1e-6) {
            HullVerdict::Interior(c) => {
                for a in c.coefficients {
                    assert!((a - 0.25).abs() < 1e-12);
                }
                assert!(c.residual < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_vector_is_separated() {
        match zero_in_hull_interior(&[v(&[1.0])], 1e-6) {
            HullVerdict::Separated { functional } => assert!(functional[0] > 0.0),
            other => panic!("{other:?}"),
        }
        assert_eq!(zero_in_hull_interior(&[v(&[0.0, 0.0])], 1e-6), HullVerdict::Degenerate);
    }

    #[test]
    fn boundary_point_is_separated() {
        let vs = vec![v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0])];
        match zero_in_hull_interior(&vs, 1e-6) {
            HullVerdict::Separated { functional } => {
                for x in &vs {
                    assert!(v(&functional).dot(x) >= -1e-9);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dichotomy_against_planted_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..1000 {
            let d = rng.random_range(1..=8);
            let n = rng.random_range(1..=3 * d + 3);
            let planted_interior = trial % 2 == 0;
            let mut vs: Vec<DVector<f64>> = (0..n).map(|_| gaussian(d, &mut rng)).collect();
            if planted_interior {
                for k in 0..d {
                    let mut e = DVector::zeros(d);
                    e[k] = 1.0;
                    vs.push(e.clone());
                    vs.push(-e);
                }
            } else {
                let y = gaussian(d, &mut rng).normalize();
                for x in vs.iter_mut() {
                    let along = x.dot(&y);
                    *x += &y * (0.1 - along.min(0.0) + along.abs());
                }
            }
            let verdict = zero_in_hull_interior(&vs, 1e-9);
            match &verdict {
                HullVerdict::Interior(c) => {
                    assert!(planted_interior, "trial {trial}");
                    assert!(c.is_valid());
                    assert!(c.coefficients.iter().all(|&a| a >= 1e-9));
                    assert!((c.coefficients.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                }
                HullVerdict::Separated { functional } => {
                    assert!(!planted_interior, "trial {trial}");
                    let y = v(functional);
                    assert!(y.norm() > 0.0);
                    for x in &vs {
                        assert!(y.dot(x) >= -1e-9);
                    }
                }
                other => panic!("trial {trial}: {other:?}"),
            }
        }
    }

    #[test]
    fn dichotomy_against_direction_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let d = rng.random_range(1..=4);
            let n = rng.random_range(1..=4 * d);
            let vs: Vec<DVector<f64>> = (0..n).map(|_| gaussian(d, &mut rng)).collect();
            let verdict = zero_in_hull_interior(&vs, 1e-9);
            if let HullVerdict::Interior(_) = verdict {
                // No sampled direction has every v_i in its closed half-space.
                for _ in 0..2000 {
                    let y = gaussian(d, &mut rng);
                    assert!(vs.iter().any(|x| y.dot(x) < 0.0));
                }
            } else {
                assert!(matches!(verdict, HullVerdict::Separated { .. }));
            }
        }
    }

    #[test]
    fn scaling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let vs: Vec<DVector<f64>> = (0..12).map(|_| gaussian(3, &mut rng)).collect();
            let base = zero_in_hull_interior(&vs, 1e-9);
            for lambda in [0.25, 8.0, 3.7] {
                let scaled: Vec<DVector<f64>> = vs.iter().map(|x| x * lambda).collect();
                let other = zero_in_hull_interior(&scaled, 1e-9);
                match (&base, &other) {
                    (HullVerdict::Interior(a), HullVerdict::Interior(b)) => {
                        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
                            assert!((x - y).abs() < 1e-12);
                        }
                    }
                    (HullVerdict::Separated { .. }, HullVerdict::Separated { .. }) => {}
                    _ => panic!("verdict changed under scaling"),
                }
            }
        }
    }
}
