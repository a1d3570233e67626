//! Products of conjugacy classes, the tangent spaces of word maps, and
//! remainders of the Baker-Campbell-Hausdorff product.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AdjointMatrix, AlgebraError, AlgebraVector, CompactAlgebraBasis};
use crate::least_squares::{gauss_newton, GaussNewtonOptions, ManifoldProblem};
use crate::linalg::numerical_rank;
use crate::root_system::CartanType;

#[derive(Debug, Error)]
pub enum ClassPowerError {
    #[error("class parameter t must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("class representative must be a unit vector (norm {0})")]
    NotUnit(f64),
    #[error("word length must be at least 1")]
    EmptyWord,
    #[error("tangent rank stalled at {rank} of {dim} after {tuple_len} factors")]
    RankStall { rank: usize, dim: usize, tuple_len: usize },
    #[error("word solve stagnated at residual {:.3e}", record.residual)]
    Stagnated { record: Box<WordRecord> },
    #[error("logarithm failed, reduce t or delta: {0}")]
    Log(#[from] AlgebraError),
    #[error("scaling grid needs at least two distinct positive values")]
    DegenerateGrid,
}

/// The conjugacy class of `exp(t X)` for a unit vector `X`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConjugacyClass {
    pub x: AlgebraVector,
    pub t: f64,
    #[serde(skip)]
    element: Option<AdjointMatrix>,
}

impl ConjugacyClass {
    pub fn new(basis: &CompactAlgebraBasis, x: AlgebraVector, t: f64) -> Result<Self, ClassPowerError> {
        if !(t > 0.0) {
            return Err(ClassPowerError::NonPositiveScale(t));
        }
        let norm = basis.killing_norm(&x);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(ClassPowerError::NotUnit(norm));
        }
        let element = Some(basis.group_exp(&(&x * t)));
        Ok(ConjugacyClass { x, t, element })
    }

    pub fn element(&self, basis: &CompactAlgebraBasis) -> AdjointMatrix {
        match &self.element {
            Some(e) => e.clone(),
            None => basis.group_exp(&(&self.x * self.t)),
        }
    }

    pub fn conjugate(&self, basis: &CompactAlgebraBasis, g: &AdjointMatrix) -> AdjointMatrix {
        g.mul(&self.element(basis)).mul(&g.inverse())
    }
}

/// `prod g_i exp(t X) g_i^-1`.
pub fn word_map(basis: &CompactAlgebraBasis, gs: &[AdjointMatrix], class: &ConjugacyClass) -> AdjointMatrix {
    let e = class.element(basis);
    gs.iter()
        .fold(AdjointMatrix::identity(basis.dim), |acc, g| acc.mul(&g.mul(&e).mul(&g.inverse())))
}

/// `prod g_i y_i g_i^-1 * y_n^-1 ... y_1^-1`, which is the identity when every `g_i = e`.
pub fn inverse_pattern_word(gs: &[AdjointMatrix], ys: &[AdjointMatrix]) -> AdjointMatrix {
    let dim = gs.first().map(|g| g.0.nrows()).unwrap_or(0);
    let mut w = AdjointMatrix::identity(dim);
    for (g, y) in gs.iter().zip(ys) {
        w = w.mul(&g.mul(y).mul(&g.inverse()));
    }
    for y in ys.iter().rev() {
        w = w.mul(&y.inverse());
    }
    w
}

fn l_n_matrix(xs: &[AdjointMatrix]) -> DMatrix<f64> {
    let dim = xs[0].0.nrows();
    let id = DMatrix::<f64>::identity(dim, dim);
    let mut m = DMatrix::zeros(dim, dim * xs.len());
    let mut prefix = id.clone();
    for (i, x) in xs.iter().enumerate() {
        m.view_mut((0, i * dim), (dim, dim)).copy_from(&(&prefix * (&id - &x.0)));
        prefix = prefix * &x.0;
    }
    m
}

/// Rank of `(1 - Ad x_1) g + Ad(x_1) (1 - Ad x_2) g + ...`.
pub fn tangent_rank_l_n(xs: &[AdjointMatrix]) -> usize {
    if xs.is_empty() {
        return 0;
    }
    numerical_rank(&l_n_matrix(xs), 1e-9)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GreedyTuple {
    pub elements: Vec<AdjointMatrix>,
    pub ranks: Vec<usize>,
}

/// Prepends random conjugates of the class element while each strictly
/// increases the rank of `L_n`, until the rank is full.
pub fn greedy_class_tuple<R: Rng + ?Sized>(
    basis: &CompactAlgebraBasis,
    class: &ConjugacyClass,
    cap: usize,
    rng: &mut R,
) -> Result<GreedyTuple, ClassPowerError> {
    const CANDIDATES: usize = 32;
    let dim = basis.dim;
    let mut xs: Vec<AdjointMatrix> = Vec::new();
    let mut ranks = Vec::new();
    let mut rank = 0;
    while rank < dim && xs.len() < cap {
        let mut grew = false;
        for _ in 0..CANDIDATES {
            let h = basis.random_group_element(rng);
            let mut cand = vec![class.conjugate(basis, &h)];
            cand.extend(xs.iter().cloned());
            let r = tangent_rank_l_n(&cand);
            if r > rank {
                xs = cand;
                rank = r;
                ranks.insert(0, r);
                grew = true;
                break;
            }
        }
        if !grew {
            break;
        }
    }
    if rank < dim {
        return Err(ClassPowerError::RankStall { rank, dim, tuple_len: xs.len() });
    }
    Ok(GreedyTuple { elements: xs, ranks })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WordRecord {
    pub elements: Vec<AdjointMatrix>,
    pub product: AdjointMatrix,
    pub residual: f64,
    pub rank: usize,
    pub iterations: usize,
}

struct WordProblem<'a> {
    basis: &'a CompactAlgebraBasis,
    e: AdjointMatrix,
    target: &'a AdjointMatrix,
}

impl WordProblem<'_> {
    fn conjugates(&self, gs: &[AdjointMatrix]) -> Vec<DMatrix<f64>> {
        gs.iter().map(|g| &g.0 * &self.e.0 * g.0.transpose()).collect()
    }
}

impl ManifoldProblem for WordProblem<'_> {
    type Point = Vec<AdjointMatrix>;

    fn residual(&self, p: &Self::Point) -> DVector<f64> {
        let dim = self.basis.dim;
        let w = self
            .conjugates(p)
            .iter()
            .fold(DMatrix::identity(dim, dim), |acc, c| acc * c);
        let diff = w - &self.target.0;
        DVector::from_column_slice(diff.as_slice())
    }

    fn jacobian(&self, p: &Self::Point) -> DMatrix<f64> {
        let dim = self.basis.dim;
        let cs = self.conjugates(p);
        let n = cs.len();
        let mut suffix = vec![DMatrix::<f64>::identity(dim, dim); n + 1];
        for i in (0..n).rev() {
            suffix[i] = &cs[i] * &suffix[i + 1];
        }
        let mut jac = DMatrix::zeros(dim * dim, n * dim);
        let mut prefix = DMatrix::<f64>::identity(dim, dim);
        for i in 0..n {
            for (k, ad) in self.basis.ad_basis().iter().enumerate() {
                let d = &prefix * (ad * &cs[i] - &cs[i] * ad) * &suffix[i + 1];
                jac.column_mut(i * dim + k).copy_from_slice(d.as_slice());
            }
            prefix = prefix * &cs[i];
        }
        jac
    }

    fn retract(&self, p: &Self::Point, step: &DVector<f64>) -> Self::Point {
        let dim = self.basis.dim;
        p.iter()
            .enumerate()
            .map(|(i, g)| self.basis.group_exp(&step.rows(i * dim, dim).into_owned()).mul(g))
            .collect()
    }
}

pub const WORD_TOL: f64 = 1e-8;

/// Gauss-Newton on `(g_1..g_n) -> ||word_map(g) - target||_F` from a given start.
pub fn solve_word_from(
    basis: &CompactAlgebraBasis,
    class: &ConjugacyClass,
    start: Vec<AdjointMatrix>,
    target: &AdjointMatrix,
) -> Result<WordRecord, ClassPowerError> {
    if start.is_empty() {
        return Err(ClassPowerError::EmptyWord);
    }
    let problem = WordProblem { basis, e: class.element(basis), target };
    let opts = GaussNewtonOptions { tol: 1e-12, ..GaussNewtonOptions::default() };
    let out = gauss_newton(&problem, start, &opts);
    let product = word_map(basis, &out.point, class);
    let xs: Vec<AdjointMatrix> = out.point.iter().map(|g| class.conjugate(basis, g)).collect();
    let record = WordRecord {
        rank: tangent_rank_l_n(&xs),
        residual: (&product.0 - &target.0).norm(),
        product,
        elements: out.point,
        iterations: out.iterations,
    };
    if record.residual <= WORD_TOL {
        Ok(record)
    } else {
        Err(ClassPowerError::Stagnated { record: Box::new(record) })
    }
}

/// Solves `word_map(g_1..g_n) = target` from a random start.
pub fn solve_word_to_target<R: Rng + ?Sized>(
    basis: &CompactAlgebraBasis,
    class: &ConjugacyClass,
    n: usize,
    target: &AdjointMatrix,
    rng: &mut R,
) -> Result<WordRecord, ClassPowerError> {
    if n == 0 {
        return Err(ClassPowerError::EmptyWord);
    }
    let start: Vec<AdjointMatrix> = (0..n).map(|_| basis.random_group_element(rng)).collect();
    solve_word_from(basis, class, start, target)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassPowerReport {
    #[serde(rename = "type")]
    pub cartan_type: CartanType,
    pub t: f64,
    pub n: usize,
    pub reachable: bool,
    pub min_residual: f64,
    pub rank_at_best: usize,
    pub interior_targets_hit: usize,
    pub interior_targets: usize,
    pub interior: bool,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityCheckOptions {
    pub samples: usize,
    pub epsilon: f64,
    pub base_seed: u64,
}

impl Default for IdentityCheckOptions {
    fn default() -> Self {
        IdentityCheckOptions { samples: 32, epsilon: 1e-3, base_seed: 0 }
    }
}

/// Multi-start search for `e` in `C^n`, followed by reachability of `6 dim`
/// random targets `exp(eps B)` around it.
pub fn class_power_identity_check(
    basis: &CompactAlgebraBasis,
    class: &ConjugacyClass,
    n: usize,
    opts: &IdentityCheckOptions,
) -> ClassPowerReport {
    let id = AdjointMatrix::identity(basis.dim);
    let seeds: Vec<u64> = (0..opts.samples as u64).map(|s| opts.base_seed.wrapping_add(s)).collect();
    let mut best: Option<WordRecord> = None;
    for &seed in &seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rec = match solve_word_to_target(basis, class, n, &id, &mut rng) {
            Ok(r) => r,
            Err(ClassPowerError::Stagnated { record }) => *record,
            Err(_) => continue,
        };
        let better = best.as_ref().is_none_or(|b| rec.residual < b.residual);
        let done = rec.residual <= WORD_TOL && rec.rank == basis.dim;
        if better || (done && best.as_ref().is_some_and(|b| b.rank < basis.dim)) {
            best = Some(rec);
        }
        if done {
            break;
        }
    }
    let total = 6 * basis.dim;
    let Some(best) = best else {
        return ClassPowerReport {
            cartan_type: basis.cartan_type,
            t: class.t,
            n,
            reachable: false,
            min_residual: f64::INFINITY,
            rank_at_best: 0,
            interior_targets_hit: 0,
            interior_targets: total,
            interior: false,
            seeds,
        };
    };
    let reachable = best.residual <= WORD_TOL;
    let mut hits = 0;
    if reachable {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.base_seed ^ 0x5eed_1d);
        for k in 0..total {
            let b = basis.random_unit_vector(&mut rng);
            let target = basis.group_exp(&(b * opts.epsilon));
            let mut ok = solve_word_from(basis, class, best.elements.clone(), &target).is_ok();
            let mut restart = 0;
            while !ok && restart < opts.samples.max(1) {
                let mut r = ChaCha8Rng::seed_from_u64(opts.base_seed.wrapping_add(1000 + 97 * k as u64 + restart as u64));
                ok = solve_word_to_target(basis, class, n, &target, &mut r).is_ok();
                restart += 1;
            }
            if ok {
                hits += 1;
            }
        }
    }
    ClassPowerReport {
        cartan_type: basis.cartan_type,
        t: class.t,
        n,
        reachable,
        min_residual: best.residual,
        rank_at_best: best.rank,
        interior_targets_hit: hits,
        interior_targets: total,
        interior: reachable && hits == total,
        seeds,
    }
}

/// `log(prod exp(t X_i)) - t sum X_i`.
pub fn bch_remainder(
    basis: &CompactAlgebraBasis,
    t: f64,
    xs: &[AlgebraVector],
) -> Result<AlgebraVector, ClassPowerError> {
    let mut g = AdjointMatrix::identity(basis.dim);
    let mut sum = basis.zero();
    for x in xs {
        g = g.mul(&basis.group_exp(&(x * t)));
        sum += x * t;
    }
    if xs.len() <= 1 {
        return Ok(basis.zero());
    }
    Ok(basis.group_log(&g)? - sum)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BchFit {
    /// Least-squares slope of `log ||r||` against `log t`; `None` when the
    /// remainder vanishes identically.
    pub exponent: Option<f64>,
    /// `max ||r|| / t^2` over the grid.
    pub constant: f64,
    pub exact_zero: bool,
    pub norms: Vec<f64>,
}

/// Geometric grid of `count` values from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

pub fn default_bch_grid() -> Vec<f64> {
    geometric_grid(1e-4, 1e-2, 12)
}

pub fn bch_scaling_fit(
    basis: &CompactAlgebraBasis,
    xs: &[AlgebraVector],
    t_grid: &[f64],
) -> Result<BchFit, ClassPowerError> {
    let mut ts: Vec<f64> = t_grid.iter().copied().filter(|&t| t > 0.0).collect();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();
    if ts.len() < 2 {
        return Err(ClassPowerError::DegenerateGrid);
    }
    let mut norms = Vec::with_capacity(ts.len());
    for &t in &ts {
        norms.push(basis.killing_norm(&bch_remainder(basis, t, xs)?));
    }
    let constant = ts.iter().zip(&norms).map(|(t, r)| r / (t * t)).fold(0.0, f64::max);
    let scale: f64 = xs.iter().map(|x| basis.killing_norm(x)).sum::<f64>().max(1.0);
    let exact_zero = ts.iter().zip(&norms).all(|(t, r)| *r <= 1e-12 * t * scale);
    let exponent = if exact_zero {
        None
    } else {
        let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        let ly: Vec<f64> = norms.iter().map(|r| r.max(f64::MIN_POSITIVE).ln()).collect();
        let mx = lx.iter().sum::<f64>() / lx.len() as f64;
        let my = ly.iter().sum::<f64>() / ly.len() as f64;
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
        Some(sxy / sxx)
    };
    Ok(BchFit { exponent, constant, exact_zero, norms })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MuReport {
    pub n: usize,
    pub delta: f64,
    pub samples: usize,
    /// Largest observed `||log(prod exp(t X_i))|| / t`.
    pub mu_hat: f64,
    /// `max_k (k + delta m_k)`.
    pub mu_bound: f64,
    /// Largest observed `||r_k|| / t^2` for each `k = 1..n`.
    pub m_k: Vec<f64>,
}

/// Samples `k <= n` unit vectors and `t < delta` and compares the product
/// radius with the bound `max_k (k + delta m_k)`.
pub fn product_radius_mu<R: Rng + ?Sized>(
    basis: &CompactAlgebraBasis,
    n: usize,
    delta: f64,
    samples: usize,
    rng: &mut R,
) -> Result<MuReport, ClassPowerError> {
    let mut m_k = vec![0.0f64; n];
    let mut mu_hat: f64 = 0.0;
    for s in 0..samples {
        let k = 1 + s % n;
        let t = delta * rng.random_range(f64::EPSILON..1.0);
        let xs: Vec<AlgebraVector> = (0..k).map(|_| basis.random_unit_vector(rng)).collect();
        let r = bch_remainder(basis, t, &xs)?;
        let sum: AlgebraVector = xs.iter().fold(basis.zero(), |acc, x| acc + x * t);
        let ratio = basis.killing_norm(&(sum + &r)) / t;
        mu_hat = mu_hat.max(ratio);
        m_k[k - 1] = m_k[k - 1].max(basis.killing_norm(&r) / (t * t));
    }
    let mu_bound = m_k
        .iter()
        .enumerate()
        .map(|(i, m)| (i + 1) as f64 + delta * m)
        .fold(0.0, f64::max);
    Ok(MuReport { n, delta, samples, mu_hat, mu_bound, m_k })
}
