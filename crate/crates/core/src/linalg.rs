//! Dense matrix functions for small real matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogError {
    #[error("matrix has an eigenvalue near -1 (min cos angle {min_cos:.3e}); outside the principal branch")]
    OutsidePrincipalBranch { min_cos: f64 },
    #[error("square-root iteration did not converge")]
    SqrtDiverged,
    #[error("logarithm is not in the image of ad (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },
    #[error("input is not square")]
    NotSquare,
}

const TAYLOR_DEGREE: usize = 18;

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.norm();
    let mut s = 0u32;
    if norm > 0.5 {
        s = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a / 2f64.powi(s as i32);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=TAYLOR_DEGREE {
        term = &term * &scaled / k as f64;
        result += &term;
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Principal square root by the Denman-Beavers iteration.
pub fn sqrtm(a: &DMatrix<f64>) -> Result<DMatrix<f64>, LogError> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().ok_or(LogError::SqrtDiverged)?;
        let zi = z.clone().try_inverse().ok_or(LogError::SqrtDiverged)?;
        let y_next = (&y + zi) * 0.5;
        let z_next = (&z + yi) * 0.5;
        let change = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if change <= 1e-15 * y.norm().max(1.0) {
            return Ok(y);
        }
    }
    let check = (&y * &y - a).norm();
    if check < 1e-10 * a.norm().max(1.0) {
        Ok(y)
    } else {
        Err(LogError::SqrtDiverged)
    }
}

/// Smallest eigenvalue of the symmetric part. For an orthogonal matrix this is
/// the cosine of its largest rotation angle.
pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.min()
}

/// Principal logarithm of a matrix whose spectrum avoids the negative real
/// axis, by inverse scaling and squaring.
///
/// Rejects inputs whose symmetric part has an eigenvalue within `1e-8` of `-1`.
pub fn logm(m: &DMatrix<f64>) -> Result<DMatrix<f64>, LogError> {
    if !m.is_square() {
        return Err(LogError::NotSquare);
    }
    let n = m.nrows();
    let min_cos = min_symmetric_eigenvalue(m);
    if min_cos < -1.0 + 1e-8 {
        return Err(LogError::OutsidePrincipalBranch { min_cos });
    }
    let id = DMatrix::<f64>::identity(n, n);
    let mut x = m.clone();
    let mut k = 0i32;
    while (&x - &id).norm() >= 0.25 {
        x = sqrtm(&x)?;
        k += 1;
        if k > 60 {
            return Err(LogError::SqrtDiverged);
        }
    }
    // log X = 2 atanh(Z) with Z = (X - I)(X + I)^-1.
    let plus = (&x + &id).try_inverse().ok_or(LogError::SqrtDiverged)?;
    let z = (&x - &id) * plus;
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut acc = z.clone();
    for j in 1..40 {
        term = &term * &z2;
        let add = &term / (2 * j + 1) as f64;
        let small = add.norm();
        acc += add;
        if small < 1e-18 {
            break;
        }
    }
    Ok(acc * 2f64.powi(k + 1))
}

/// Numerical rank with threshold `rel_tol * max(sigma_max, 1)`.
pub fn numerical_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let threshold = rel_tol * sv.max().max(1.0);
    sv.iter().filter(|&&s| s > threshold).count()
}

/// Numerical rank with threshold relative to the largest singular value only.
pub fn relative_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn pinv_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let max = svd.singular_values.max();
    let eps = 1e-12 * max.max(1e-300) * (a.nrows().max(a.ncols()) as f64);
    svd.solve(b, eps).expect("both factors were computed")
}

/// Orthonormal basis of the null space of `a`, as columns.
pub fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = a.ncols();
    // Pad to at least n rows so the SVD exposes all right singular vectors.
    let padded = if a.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let max = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= rel_tol * max.max(1e-300))
        .map(|(i, _)| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_skew(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
        (&g - g.transpose()) * (scale / 2.0)
    }

    fn series_exp(a: &DMatrix<f64>) -> DMatrix<f64> {
        let n = a.nrows();
        let mut acc = DMatrix::identity(n, n);
        let mut term = DMatrix::identity(n, n);
        for k in 1..80 {
            term = &term * a / k as f64;
            acc += &term;
        }
        acc
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(expm(&DMatrix::zeros(4, 4)), DMatrix::identity(4, 4));
    }

    #[test]
    fn exp_matches_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2, 3, 8, 14] {
            let a = random_skew(n, 0.3, &mut rng);
            assert!((expm(&a) - series_exp(&a)).amax() < 1e-12);
        }
    }

    #[test]
    fn exp_of_rotation_generator() {
        let t = 2.7f64;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a);
        let want = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!((e - want).amax() < 1e-14);
    }

    #[test]
    fn log_inverts_exp() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [3, 8, 14] {
            for scale in [1e-6, 0.1, 0.5, 0.9] {
                let a = random_skew(n, scale / (n as f64).sqrt(), &mut rng);
                let l = logm(&expm(&a)).unwrap();
                assert!((&l - &a).amax() < 1e-10, "n={n} scale={scale}");
                assert!((&l + l.transpose()).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn log_near_half_turn() {
        let t = std::f64::consts::PI - 0.01;
        let a = DMatrix::from_row_slice(3, 3, &[0.0, -t, 0.0, t, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let l = logm(&expm(&a)).unwrap();
        assert!((l - a).amax() < 1e-9);
        let half = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(logm(&half), Err(LogError::OutsidePrincipalBranch { .. })));
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = expm(&random_skew(6, 0.8, &mut rng));
        let r = sqrtm(&a).unwrap();
        assert!((&r * &r - a).amax() < 1e-13);
    }

    #[test]
    fn ranks_and_null_space() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(numerical_rank(&a, 1e-9), 2);
        let ns = null_space(&a, 1e-9);
        assert_eq!(ns.ncols(), 1);
        assert!((ns[(2, 0)].abs() - 1.0).abs() < 1e-14);
        assert_eq!(numerical_rank(&DMatrix::zeros(3, 3), 1e-9), 0);
        let x = pinv_solve(&a, &DVector::from_vec(vec![2.0, 3.0]));
        assert!((x - DVector::from_vec(vec![2.0, 3.0, 0.0])).amax() < 1e-14);
    }
}
