//! Sums over adjoint orbits and the tuples that make them vanish.

pub mod hull;
pub mod replication;
pub mod walk;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AdjointMatrix, AlgebraVector, CompactAlgebraBasis};
use crate::least_squares::{gauss_newton, GaussNewtonOptions, ManifoldProblem};
use crate::linalg::relative_rank;

pub use hull::{zero_in_hull_interior, HullCertificate, HullVerdict};
pub use replication::{replication_plan, ReplicationError, ReplicationPlan};
pub use walk::{bounded_partial_sum_sequence, distance_to_ray, lattice_ray_walk, partial_sum_bound, WalkError};

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("orbit of the zero vector is a point")]
    ZeroVector,
    #[error("no spanning configuration after {0} attempts")]
    TriesExhausted(usize),
    #[error("refinement stagnated up to n = {n_max} (best residual {best_residual:.3e})")]
    Stagnated { n_max: usize, best_residual: f64 },
}

pub fn orbit_vectors(x: &AlgebraVector, gs: &[AdjointMatrix]) -> Vec<AlgebraVector> {
    gs.iter().map(|g| &g.0 * x).collect()
}

/// `Ad(g_1) X + ... + Ad(g_n) X`.
pub fn orbit_sum(x: &AlgebraVector, gs: &[AdjointMatrix]) -> AlgebraVector {
    gs.iter().fold(DVector::zeros(x.len()), |acc, g| acc + &g.0 * x)
}

/// Rank of the differential of `(g_i) -> sum Ad(g_i) X`, whose columns are the
/// brackets `[Y_j, Ad(g_i) X]` over basis vectors `Y_j`.
pub fn orbit_sum_rank(basis: &CompactAlgebraBasis, x: &AlgebraVector, gs: &[AdjointMatrix]) -> usize {
    if gs.is_empty() {
        return 0;
    }
    relative_rank(&orbit_sum_jacobian(basis, x, gs), 1e-9)
}

fn orbit_sum_jacobian(basis: &CompactAlgebraBasis, x: &AlgebraVector, gs: &[AdjointMatrix]) -> DMatrix<f64> {
    let n = basis.dim;
    let mut j = DMatrix::zeros(n, n * gs.len());
    for (i, g) in gs.iter().enumerate() {
        let v = &g.0 * x;
        j.view_mut((0, i * n), (n, n)).copy_from(&(-basis.ad(&v)));
    }
    j
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpanningConfiguration {
    pub elements: Vec<AdjointMatrix>,
    pub certificate: HullCertificate,
    pub attempts: usize,
}

/// Random group elements whose orbit vectors contain zero in the interior of
/// their convex hull. Starts at `dim + 1` points and doubles.
pub fn sample_spanning_configuration<R: Rng + ?Sized>(
    basis: &CompactAlgebraBasis,
    x: &AlgebraVector,
    rng: &mut R,
    max_tries: usize,
) -> Result<SpanningConfiguration, OrbitError> {
    if x.norm() < 1e-12 {
        return Err(OrbitError::ZeroVector);
    }
    const TRIES_PER_SIZE: usize = 4;
    let mut n = basis.dim + 1;
    let mut attempts = 0;
    while attempts < max_tries {
        for _ in 0..TRIES_PER_SIZE {
            if attempts >= max_tries {
                break;
            }
            attempts += 1;
            let gs: Vec<AdjointMatrix> = (0..n).map(|_| basis.random_group_element(rng)).collect();
            let vs = orbit_vectors(x, &gs);
            if let HullVerdict::Interior(cert) = zero_in_hull_interior(&vs, 1e-9) {
                if cert.is_valid() {
                    return Ok(SpanningConfiguration { elements: gs, certificate: cert, attempts });
                }
            }
        }
        n *= 2;
    }
    Err(OrbitError::TriesExhausted(attempts))
}

struct OrbitSumProblem<'a> {
    basis: &'a CompactAlgebraBasis,
    x: &'a AlgebraVector,
}

impl ManifoldProblem for OrbitSumProblem<'_> {
    type Point = Vec<AdjointMatrix>;

    fn residual(&self, p: &Self::Point) -> DVector<f64> {
        orbit_sum(self.x, p)
    }

    fn jacobian(&self, p: &Self::Point) -> DMatrix<f64> {
        orbit_sum_jacobian(self.basis, self.x, p)
    }

    fn retract(&self, p: &Self::Point, step: &DVector<f64>) -> Self::Point {
        let n = self.basis.dim;
        p.iter()
            .enumerate()
            .map(|(i, g)| {
                let xi = step.rows(i * n, n).into_owned();
                self.basis.group_exp(&xi).mul(g)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VanishingTuple {
    pub n: usize,
    pub elements: Vec<AdjointMatrix>,
    pub residual: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct VanishingOptions {
    pub n_max: usize,
    pub restarts_per_n: usize,
    pub residual_tol: f64,
    pub seed_tries: usize,
}

impl Default for VanishingOptions {
    fn default() -> Self {
        VanishingOptions { n_max: 16, restarts_per_n: 3, residual_tol: 1e-10, seed_tries: 64 }
    }
}

/// Largest-remainder rounding of `n a_i` to integers summing to `n`.
pub fn largest_remainder_counts(a: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = a.iter().sum();
    let exact: Vec<f64> = a.iter().map(|&ai| n as f64 * ai / total).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut left = n - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = exact[i] - exact[i].floor();
        let rj = exact[j] - exact[j].floor();
        rj.partial_cmp(&ri).unwrap().then(i.cmp(&j))
    });
    for &i in &order {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

/// Finds `g_1..g_n` with `sum Ad(g_i) X = 0` at which the orbit-sum map is a
/// submersion, refining replicated hull-certificate seeds by Gauss-Newton.
pub fn find_vanishing_submersive_tuple<R: Rng + ?Sized>(
    basis: &CompactAlgebraBasis,
    x: &AlgebraVector,
    rng: &mut R,
    opts: &VanishingOptions,
) -> Result<VanishingTuple, OrbitError> {
    if x.norm() < 1e-12 {
        return Err(OrbitError::ZeroVector);
    }
    let seed = sample_spanning_configuration(basis, x, rng, opts.seed_tries)?;
    let problem = OrbitSumProblem { basis, x };
    let gn = GaussNewtonOptions { tol: opts.residual_tol, ..GaussNewtonOptions::default() };
    let mut best = f64::INFINITY;
    for n in 2..=opts.n_max {
        let counts = largest_remainder_counts(&seed.certificate.coefficients, n);
        for _ in 0..opts.restarts_per_n {
            let mut start = Vec::with_capacity(n);
            for (g, &c) in seed.elements.iter().zip(&counts) {
                for _ in 0..c {
                    let jitter = basis.random_vector(rng, 0.05);
                    start.push(basis.group_exp(&jitter).mul(g));
                }
            }
            let out = gauss_newton(&problem, start, &gn);
            best = best.min(out.residual_norm);
            if out.converged {
                let rank = orbit_sum_rank(basis, x, &out.point);
                if rank == basis.dim {
                    return Ok(VanishingTuple { n, elements: out.point, residual: out.residual_norm, rank });
                }
            }
        }
    }
    Err(OrbitError::Stagnated { n_max: opts.n_max, best_residual: best })
}
