//! Integer walks shadowing a ray and the bounded partial sums they induce.

use nalgebra::DVector;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("ray direction must be strictly positive")]
    NonPositiveDirection,
    #[error("need at least one step")]
    NoSteps,
    #[error("coefficients and vectors differ in length")]
    LengthMismatch,
    #[error("weighted sum of the vectors is {0:.3e}, expected zero")]
    NotNull(f64),
}

/// Euclidean distance from the integer point `x` to the ray `{t a : t >= 0}`.
pub fn distance_to_ray(x: &[i64], a: &[f64]) -> f64 {
    let aa: f64 = a.iter().map(|v| v * v).sum();
    let xa: f64 = x.iter().zip(a).map(|(&xi, ai)| xi as f64 * ai).sum();
    let t = (xa / aa).max(0.0);
    x.iter()
        .zip(a)
        .map(|(&xi, ai)| (xi as f64 - t * ai).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Lattice points `x_1, x_2, ...` with unit coordinate increments that stay
/// within `sqrt(2n)` of the ray through `a`.
///
/// At each event time `t = m / a_j` the floor vector `floor(t a)` gains one in
/// every coordinate whose event falls at `t`; the walk reaches it by unit steps
/// taken in increasing coordinate order.
pub fn lattice_ray_walk(a: &[f64], steps: usize) -> Result<Vec<Vec<i64>>, WalkError> {
    Ok(walk_increments(a, steps)?.1)
}

/// The coordinate index of each step together with the visited points.
pub fn walk_increments(a: &[f64], steps: usize) -> Result<(Vec<usize>, Vec<Vec<i64>>), WalkError> {
    if a.is_empty() || a.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(WalkError::NonPositiveDirection);
    }
    if steps == 0 {
        return Err(WalkError::NoSteps);
    }
    let n = a.len();
    let mut x = vec![0i64; n];
    let mut points = Vec::with_capacity(steps);
    let mut idx = Vec::with_capacity(steps);
    while points.len() < steps {
        let times: Vec<f64> = (0..n).map(|j| (x[j] + 1) as f64 / a[j]).collect();
        let t = times.iter().copied().fold(f64::INFINITY, f64::min);
        for j in 0..n {
            if times[j] == t && points.len() < steps {
                x[j] += 1;
                idx.push(j);
                points.push(x.clone());
            }
        }
    }
    Ok((idx, points))
}

/// Partial-sum bound `R = n sqrt(2n) max |v_j|`.
pub fn partial_sum_bound(vs: &[DVector<f64>]) -> f64 {
    let n = vs.len() as f64;
    let max = vs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    n * (2.0 * n).sqrt() * max
}

/// Indices `i_1, i_2, ...` such that every partial sum `v_{i_1} + ... + v_{i_k}`
/// has norm at most [`partial_sum_bound`], given `sum a_i v_i = 0`.
pub fn bounded_partial_sum_sequence(
    vs: &[DVector<f64>],
    a: &[f64],
    length: usize,
) -> Result<Vec<usize>, WalkError> {
    if vs.len() != a.len() {
        return Err(WalkError::LengthMismatch);
    }
    if vs.is_empty() {
        return Err(WalkError::NonPositiveDirection);
    }
    let d = vs[0].len();
    let sum = vs.iter().zip(a).fold(DVector::zeros(d), |acc, (v, &ai)| acc + v * ai);
    let scale = vs.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    if sum.norm() > 1e-9 * scale {
        return Err(WalkError::NotNull(sum.norm()));
    }
    Ok(walk_increments(a, length)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_dimensional_walk() {
        let w = lattice_ray_walk(&[1.0], 5).unwrap();
        assert_eq!(w, vec![vec![1], vec![2], vec![3], vec![4], vec![5]]);
        assert!(w.iter().all(|x| distance_to_ray(x, &[1.0]) == 0.0));
    }

    #[test]
    fn staircase() {
        let w = lattice_ray_walk(&[1.0, 1.0], 4).unwrap();
        assert_eq!(w, vec![vec![1, 0], vec![1, 1], vec![2, 1], vec![2, 2]]);
        let w = lattice_ray_walk(&[2.0, 1.0], 10_000).unwrap();
        assert!(w.iter().all(|x| distance_to_ray(x, &[2.0, 1.0]) <= 2.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(lattice_ray_walk(&[1.0, 0.0], 3), Err(WalkError::NonPositiveDirection));
        assert_eq!(lattice_ray_walk(&[1.0], 0), Err(WalkError::NoSteps));
    }

    #[test]
    fn distance_bound_and_floor_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let n = rng.random_range(1..=6);
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
            let w = lattice_ray_walk(&a, 2000).unwrap();
            let bound = (2.0 * n as f64).sqrt();
            let mut prev = vec![0i64; n];
            for x in &w {
                assert!(distance_to_ray(x, &a) <= bound);
                let diff: i64 = x.iter().zip(&prev).map(|(p, q)| p - q).sum();
                assert_eq!(diff, 1);
                prev = x.clone();
            }
            // Every floor point floor(t a) at an event time is visited.
            let last_t = (0..n).map(|j| w.last().unwrap()[j] as f64 / a[j]).fold(f64::INFINITY, f64::min);
            for j in 0..n {
                for m in 1..=20 {
                    let t = m as f64 / a[j];
                    if t >= last_t {
                        break;
                    }
                    // floor(t a_i), counted with the walk's own event times.
                    let y: Vec<i64> = a
                        .iter()
                        .map(|ai| (1..).take_while(|&k| k as f64 / ai <= t).count() as i64)
                        .collect();
                    assert!(w.contains(&y), "{y:?}");
                }
            }
        }
    }

    #[test]
    fn alternating_partial_sums() {
        let vs = vec![DVector::from_vec(vec![1.0]), DVector::from_vec(vec![-1.0])];
        let idx = bounded_partial_sum_sequence(&vs, &[0.5, 0.5], 10).unwrap();
        assert_eq!(idx, vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(partial_sum_bound(&vs), 4.0);
    }

    #[test]
    fn triangle_partial_sums() {
        let vs: Vec<DVector<f64>> = (0..3)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                DVector::from_vec(vec![t.cos(), t.sin()])
            })
            .collect();
        let idx = bounded_partial_sum_sequence(&vs, &[1.0 / 3.0; 3], 1000).unwrap();
        let r = partial_sum_bound(&vs);
        assert!((r - 3.0 * 6f64.sqrt()).abs() < 1e-12);
        let mut s = DVector::zeros(2);
        for i in idx {
            s += &vs[i];
            assert!(s.norm() <= r);
        }
    }

    #[test]
    fn single_vector_must_vanish() {
        let vs = vec![DVector::from_vec(vec![0.0, 0.0])];
        let idx = bounded_partial_sum_sequence(&vs, &[1.0], 5).unwrap();
        assert_eq!(idx, vec![0; 5]);
        let vs = vec![DVector::from_vec(vec![1.0])];
        assert!(matches!(bounded_partial_sum_sequence(&vs, &[1.0], 5), Err(WalkError::NotNull(_))));
    }
}
