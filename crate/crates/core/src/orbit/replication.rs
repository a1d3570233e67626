//! Rational approximation of convex coefficients and the replicated tuple
//! sizes they induce.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplicationError {
    #[error("tolerance must be positive")]
    NonPositiveDelta,
    #[error("coefficients must be positive and finite")]
    BadCoefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationPlan {
    /// `(p_i, q_i)` in lowest terms.
    pub rationals: Vec<(BigUint, BigUint)>,
    /// `p_i * prod_{j != i} q_j`.
    pub counts: Vec<BigUint>,
    /// Sum of the counts.
    pub n: BigUint,
}

impl ReplicationPlan {
    pub fn denominator_product(&self) -> BigUint {
        self.rationals.iter().map(|(_, q)| q.clone()).product()
    }

    pub fn counts_u64(&self) -> Option<Vec<u64>> {
        self.counts.iter().map(|c| c.to_u64()).collect()
    }
}

/// The fraction with the smallest denominator in the open interval `(lo, hi)`,
/// `0 <= lo < hi`, found by batched Stern-Brocot descent.
pub fn simplest_in_open_interval(lo: &BigRational, hi: &BigRational) -> BigRational {
    assert!(lo < hi && !lo.is_negative());
    simplest(lo.clone(), Some(hi.clone()))
}

/// Simplest rational in `(lo, hi)`; `hi = None` stands for infinity.
fn simplest(lo: BigRational, hi: Option<BigRational>) -> BigRational {
    let fl = lo.floor();
    let next = &fl + BigRational::one();
    let fits = match &hi {
        None => true,
        Some(h) => &next < h,
    };
    if fits {
        return next;
    }
    // The interval lies in (fl, fl + 1]; descend on the reciprocal of the
    // fractional parts.
    let hi = hi.expect("bounded case");
    let frac_lo = &lo - &fl;
    let frac_hi = &hi - &fl;
    let new_lo = frac_hi.recip();
    let new_hi = if frac_lo.is_zero() { None } else { Some(frac_lo.recip()) };
    fl + simplest(new_lo, new_hi).recip()
}

pub fn replication_plan(a: &[f64], delta: f64) -> Result<ReplicationPlan, ReplicationError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(ReplicationError::NonPositiveDelta);
    }
    let mut rationals = Vec::with_capacity(a.len());
    let d = BigRational::from_float(delta).expect("finite");
    for &ai in a {
        if !(ai > 0.0) || !ai.is_finite() {
            return Err(ReplicationError::BadCoefficient);
        }
        let x = BigRational::from_float(ai).expect("finite");
        let lo = (&x - &d).max(BigRational::zero());
        let hi = &x + &d;
        let r = simplest_in_open_interval(&lo, &hi);
        let p = r.numer().to_biguint().expect("positive");
        let q = r.denom().to_biguint().expect("positive");
        rationals.push((p, q));
    }
    let counts: Vec<BigUint> = (0..rationals.len())
        .map(|i| {
            let mut c = rationals[i].0.clone();
            for (j, (_, q)) in rationals.iter().enumerate() {
                if j != i {
                    c *= q;
                }
            }
            c
        })
        .collect();
    let n = counts.iter().sum();
    Ok(ReplicationPlan { rationals, counts, n })
}

/// `p / q` as a float, for diagnostics.
pub fn ratio_f64(p: &BigUint, q: &BigUint) -> f64 {
    BigRational::new(BigInt::from(p.clone()), BigInt::from(q.clone())).to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn examples() {
        let plan = replication_plan(&[0.5, 0.5], 1e-3).unwrap();
        assert_eq!(plan.rationals, vec![(big(1), big(2)), (big(1), big(2))]);
        assert_eq!(plan.n, big(4));
        let plan = replication_plan(&[1.0], 0.3).unwrap();
        assert_eq!(plan.rationals, vec![(big(1), big(1))]);
        assert_eq!(plan.n, big(1));
        let plan = replication_plan(&[1.0 / 3.0, 2.0 / 3.0], 1e-6).unwrap();
        assert_eq!(plan.rationals, vec![(big(1), big(3)), (big(2), big(3))]);
        assert_eq!(plan.n, big(9));
        assert_eq!(replication_plan(&[0.5], 0.0), Err(ReplicationError::NonPositiveDelta));
    }

    /// Smallest denominator by direct search.
    fn brute(x: f64, delta: f64) -> u64 {
        (1u64..)
            .find(|&q| {
                let p = (x * q as f64).round().max(1.0);
                (p / q as f64 - x).abs() < delta * (1.0 - 1e-12)
                    || ((p + 1.0) / q as f64 - x).abs() < delta * (1.0 - 1e-12)
            })
            .unwrap()
    }

    #[test]
    fn minimal_denominators() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..500 {
            let x: f64 = rng.random_range(0.01..1.0);
            let delta = 10f64.powf(rng.random_range(-5.0..-1.0));
            let plan = replication_plan(&[x], delta).unwrap();
            let (p, q) = &plan.rationals[0];
            assert!((ratio_f64(p, q) - x).abs() < delta);
            assert_eq!(q.to_u64().unwrap(), brute(x, delta));
        }
    }

    #[test]
    fn replication_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = rng.random_range(1..=5);
            let a: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
            let plan = replication_plan(&a, 1e-2).unwrap();
            let sum: BigUint = plan.counts.iter().sum();
            assert_eq!(sum, plan.n);
            // Diagonal inputs: Q * sum (p_i / q_i) v_i equals the replicated sum.
            let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let q_prod = plan.denominator_product().to_f64().unwrap();
            let lhs: f64 = q_prod
                * plan.rationals.iter().zip(&v).map(|((p, q), vi)| ratio_f64(p, q) * vi).sum::<f64>();
            let rhs: f64 = plan.counts.iter().zip(&v).map(|(c, vi)| c.to_f64().unwrap() * vi).sum();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(q_prod));
        }
    }
}
