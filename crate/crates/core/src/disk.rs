//! Disk bounds for normalized characters and the arc-lemma constants.
//!
//! `Θ_c` is the closed disk tangent to the unit circle at `1` and to the line
//! `Re z = c`. A normalized character value `z ≠ 1` lies in `Θ_c` exactly when
//! `c <= h(z)`, so the best constant over a scan is the minimum of `h`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::character::{cartan_f64, irrep_table, CharacterError, CharacterEvaluator, CharacterSample, MultiplicityCache, TorusPoint};
use crate::root_system::{enumerate_adjoint_dominant_weights, CartanType, RootSystemSpec, Weight};

/// Largest tensor grid a scan will evaluate.
pub const MAX_GRID_POINTS: usize = 50_000_000;

/// Values this close to `1` are treated as the identity value and skipped.
pub const ONE_EXCLUSION: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DiskError {
    #[error("h(z) is undefined at z = 1")]
    AtOne,
    #[error("disk parameter must lie in (-1, 1), got {0}")]
    BadParameter(f64),
    #[error("scan produced no values away from z = 1")]
    EmptySample,
    #[error("grid of {0} points exceeds the scan limit")]
    GridTooLarge(usize),
    #[error("grid needs at least one point per dimension")]
    EmptyGrid,
    #[error("arc [{lo}, {hi}] must satisfy 0 < lo <= hi < 1")]
    BadArc { lo: f64, hi: f64 },
    #[error("x = {0} is not in the arc")]
    OutsideArc(f64),
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("omega must have modulus 1, got {0}")]
    NotUnitModulus(f64),
    #[error("need k >= 1 and 0 < c < 1")]
    BadInequalityInput,
    #[error(transparent)]
    Character(#[from] CharacterError),
}

/// `h(z) = (|z|^2 - Re z) / (Re z - 1)`, the largest `c` with `z ∈ Θ_c`.
pub fn disk_requirement(z: Complex64) -> Result<f64, DiskError> {
    if !(z.re < 1.0) {
        return Err(DiskError::AtOne);
    }
    // |z|^2 - Re z = Re z (Re z - 1) + (Im z)^2
    Ok(z.re + z.im * z.im / (z.re - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskParam {
    pub c: f64,
}

impl DiskParam {
    pub fn new(c: f64) -> Result<Self, DiskError> {
        if c > -1.0 && c < 1.0 {
            Ok(DiskParam { c })
        } else {
            Err(DiskError::BadParameter(c))
        }
    }

    /// From the disk of radius `1 - c'` centred at `c'`.
    pub fn from_proof_parameter(c_proof: f64) -> Result<Self, DiskError> {
        Self::new(2.0 * c_proof - 1.0)
    }

    pub fn proof_parameter(&self) -> f64 {
        (self.c + 1.0) / 2.0
    }

    pub fn center(&self) -> f64 {
        (1.0 + self.c) / 2.0
    }

    pub fn radius(&self) -> f64 {
        (1.0 - self.c) / 2.0
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center()).norm() <= self.radius()
    }
}

/// Result of a disk scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskEstimate {
    pub cartan_type: CartanType,
    pub weight_bound: Option<usize>,
    pub grid: usize,
    pub c_hat: f64,
    pub attaining: CharacterSample,
    /// `<alpha_k, theta>` at the attaining point.
    pub attaining_root_angles: Vec<f64>,
    pub irreps: usize,
    pub samples: usize,
}

/// The torus points `theta` with root angles `2 pi k / n`, `k` in `0..n` per
/// coordinate, in row-major order.
pub fn torus_grid(rs: &RootSystemSpec, n: usize) -> Result<Vec<TorusPoint>, DiskError> {
    if n == 0 {
        return Err(DiskError::EmptyGrid);
    }
    let total = n
        .checked_pow(rs.rank as u32)
        .filter(|&t| t <= MAX_GRID_POINTS)
        .ok_or(DiskError::GridTooLarge(usize::MAX.min(n.saturating_pow(rs.rank as u32))))?;
    let inv = cartan_f64(rs).try_inverse().expect("Cartan matrix is invertible");
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; rs.rank];
    for _ in 0..total {
        let y = DVector::from_iterator(rs.rank, idx.iter().map(|&k| (k as f64 / n as f64) * 2.0 * PI));
        out.push(TorusPoint::new((&inv * y).iter().copied().collect()));
        for d in (0..rs.rank).rev() {
            idx[d] += 1;
            if idx[d] < n {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(out)
}

struct Scanner {
    evaluators: Vec<(Weight, CharacterEvaluator)>,
    offsets: Vec<i64>,
}

impl Scanner {
    fn new(rs: &RootSystemSpec, weights: &[Weight], cache: Option<&MultiplicityCache>) -> Result<Self, DiskError> {
        let mut evaluators = Vec::with_capacity(weights.len());
        let mut offsets = vec![0i64; rs.rank];
        for w in weights {
            let ev = CharacterEvaluator::new(&irrep_table(rs, w, cache)?);
            for (o, &m) in offsets.iter_mut().zip(ev.max_abs()) {
                *o = (*o).max(m);
            }
            evaluators.push((w.clone(), ev));
        }
        Ok(Scanner { evaluators, offsets })
    }

    fn powers(&self, theta: &TorusPoint) -> Vec<Vec<Complex64>> {
        self.offsets
            .iter()
            .zip(&theta.theta)
            .map(|(&m, &t)| (-m..=m).map(|k| Complex64::from_polar(1.0, k as f64 * t)).collect())
            .collect()
    }
}

/// Normalized character values of the given irreps over [`torus_grid`], irrep
/// by irrep.
pub fn character_scan(
    rs: &RootSystemSpec,
    weights: &[Weight],
    grid: usize,
    cache: Option<&MultiplicityCache>,
) -> Result<Vec<CharacterSample>, DiskError> {
    let points = torus_grid(rs, grid)?;
    let scanner = Scanner::new(rs, weights, cache)?;
    let powers: Vec<_> = points.iter().map(|p| scanner.powers(p)).collect();
    let mut out = Vec::with_capacity(points.len() * weights.len());
    for (w, ev) in &scanner.evaluators {
        for (p, pw) in points.iter().zip(&powers) {
            let z = ev.value_with_shared_powers(pw, &scanner.offsets) / ev.dim();
            out.push(CharacterSample { lambda: w.clone(), theta: p.clone(), z });
        }
    }
    Ok(out)
}

/// Minimum of `h` over the listed irreps and the `grid^rank` torus grid.
///
/// Values within [`ONE_EXCLUSION`] of `1` are skipped. Ties keep the first
/// sample in (irrep, grid point) order.
pub fn disk_scan(
    rs: &RootSystemSpec,
    weights: &[Weight],
    grid: usize,
    cache: Option<&MultiplicityCache>,
) -> Result<DiskEstimate, DiskError> {
    let points = torus_grid(rs, grid)?;
    let scanner = Scanner::new(rs, weights, cache)?;
    let mut best: Option<(f64, usize, usize, Complex64)> = None;
    let mut samples = 0usize;
    for (g, p) in points.iter().enumerate() {
        let pw = scanner.powers(p);
        for (i, (_, ev)) in scanner.evaluators.iter().enumerate() {
            let z = ev.value_with_shared_powers(&pw, &scanner.offsets) / ev.dim();
            if (z - 1.0).norm() <= ONE_EXCLUSION {
                continue;
            }
            samples += 1;
            let h = disk_requirement(z)?;
            let better = match best {
                None => true,
                Some((bh, bi, bg, _)) => h < bh || (h == bh && (i, g) < (bi, bg)),
            };
            if better {
                best = Some((h, i, g, z));
            }
        }
    }
    let (c_hat, i, g, z) = best.ok_or(DiskError::EmptySample)?;
    let theta = points[g].clone();
    Ok(DiskEstimate {
        cartan_type: rs.cartan_type,
        weight_bound: None,
        grid,
        c_hat,
        attaining_root_angles: theta.root_angles(rs),
        attaining: CharacterSample { lambda: scanner.evaluators[i].0.clone(), theta, z },
        irreps: weights.len(),
        samples,
    })
}

/// [`disk_scan`] over every root-lattice dominant weight of level at most
/// `weight_bound`, the trivial one included.
pub fn empirical_disk_constant(
    rs: &RootSystemSpec,
    weight_bound: usize,
    grid: usize,
    cache: Option<&MultiplicityCache>,
) -> Result<DiskEstimate, DiskError> {
    let weights = enumerate_adjoint_dominant_weights(rs, weight_bound);
    let mut est = disk_scan(rs, &weights, grid, cache)?;
    est.weight_bound = Some(weight_bound);
    Ok(est)
}

/// A closed arc `{exp(2 pi i x) : x_lo <= x <= x_hi}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub x_lo: f64,
    pub x_hi: f64,
}

impl ArcSpec {
    pub fn new(x_lo: f64, x_hi: f64) -> Result<Self, DiskError> {
        if x_lo > 0.0 && x_lo <= x_hi && x_hi < 1.0 {
            Ok(ArcSpec { x_lo, x_hi })
        } else {
            Err(DiskError::BadArc { lo: x_lo, hi: x_hi })
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi
    }

    /// Distance from the arc to `0` in `R/Z`.
    pub fn gap(&self) -> f64 {
        self.x_lo.min(1.0 - self.x_hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcConstants {
    pub arc: ArcSpec,
    pub b: u64,
    pub m: f64,
    pub q: u64,
    pub delta: f64,
    pub p: u64,
    pub epsilon: f64,
}

impl ArcConstants {
    /// `2 p q`, the largest exponent the construction can return.
    pub fn k_bound(&self) -> u64 {
        2 * self.p * self.q
    }
}

/// Safety factor applied to the exact covering radius.
pub const DELTA_SAFETY: f64 = 0.9;

fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// `Re exp(2 pi i k x) <= 0`.
pub fn re_power_nonpositive(k: u64, x: f64) -> bool {
    (2.0 * PI * frac(k as f64 * x)).cos() <= 0.0
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Radius of the largest neighbourhood of `s0` covered by the sets
/// `{x : jx mod 1 ∈ [1/4, 3/4]}`, `q <= j <= 2q`.
fn covering_radius(s0: f64, q: u64) -> f64 {
    let w = 1.0 / q as f64;
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for j in q..=2 * q {
        let jf = j as f64;
        let k_lo = (jf * (s0 - w)).floor() as i64 - 1;
        let k_hi = (jf * (s0 + w)).ceil() as i64 + 1;
        for k in k_lo..=k_hi {
            intervals.push(((k as f64 + 0.25) / jf, (k as f64 + 0.75) / jf));
        }
    }
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in intervals {
        match cur {
            Some((lo, hi)) if a <= hi => cur = Some((lo, hi.max(b))),
            Some((lo, hi)) => {
                if lo <= s0 && s0 <= hi {
                    break;
                }
                cur = Some((a, b));
            }
            None => cur = Some((a, b)),
        }
    }
    match cur {
        Some((lo, hi)) if lo <= s0 && s0 <= hi => (s0 - lo).min(hi - s0).min(w),
        _ => 0.0,
    }
}

/// The explicit constants of the arc lemma for a class-power bound `b`.
///
/// `delta` is the exact covering radius of `S = {t/s : 1 <= t < s <= q}`,
/// computed by merging the covering intervals, times [`DELTA_SAFETY`].
pub fn arc_constants(arc: ArcSpec, b: u64) -> Result<ArcConstants, DiskError> {
    let arc = ArcSpec::new(arc.x_lo, arc.x_hi)?;
    let m = arc.gap();
    let mut q = (b + 1).max((1.0 / m).floor() as u64).max(2);
    while !(1.0 / (q as f64) < m) {
        q += 1;
    }
    let mut radius = f64::INFINITY;
    for s in 2..=q {
        for t in 1..s {
            if gcd(t, s) == 1 {
                radius = radius.min(covering_radius(t as f64 / s as f64, q));
            }
        }
    }
    let delta = DELTA_SAFETY * radius;
    let p = (1.0 / delta).floor() as u64 + 1;
    let two_pq = 2.0 * p as f64 * q as f64;
    Ok(ArcConstants { arc, b, m, q, delta, p, epsilon: 1.0 / (two_pq * two_pq) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PigeonholeRoute {
    /// `k = j L` from the two pigeonhole steps.
    Pigeonhole,
    /// The pigeonhole multiple did not land in the half circle; `k = j`.
    DirectScan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PigeonholeResult {
    pub x: f64,
    /// Smallest `k1 <= q` with `||k1 x|| <= 1/q`.
    pub k1: u64,
    /// Smallest `L <= p` with `||L k1 x|| <= 1/p`.
    pub l: u64,
    pub j: u64,
    pub k: u64,
    pub route: PigeonholeRoute,
    /// Smallest `k >= 1` with `Re exp(2 pi i k x) <= 0`.
    pub brute_k: u64,
}

fn convergent_denominators(y: f64, limit: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    let (mut q_prev, mut q_cur) = (0u64, 1u64);
    let mut r = frac(y);
    for _ in 0..64 {
        if r < 1e-15 {
            break;
        }
        let inv = 1.0 / r;
        let a = inv.floor();
        r = inv - a;
        if a > limit as f64 {
            break;
        }
        let q_next = match (a as u64).checked_mul(q_cur).and_then(|v| v.checked_add(q_prev)) {
            Some(v) if v <= limit => v,
            _ => break,
        };
        out.push(q_next);
        q_prev = q_cur;
        q_cur = q_next;
    }
    out
}

/// Smallest `k >= from` with `Re exp(2 pi i k x) <= 0`.
pub fn smallest_k_from(x: f64, from: u64) -> u64 {
    (from.max(1)..).find(|&k| re_power_nonpositive(k, x)).expect("unbounded search")
}

/// The exponent `k` of the arc lemma for `x` in the arc.
pub fn pigeonhole_k(x: f64, consts: &ArcConstants) -> Result<PigeonholeResult, DiskError> {
    if !consts.arc.contains(x) {
        return Err(DiskError::OutsideArc(x));
    }
    let (q, p) = (consts.q, consts.p);
    let qf = q as f64;
    let k1 = (1..=q).find(|&k| dist_to_int(k as f64 * x) <= 1.0 / qf).unwrap_or(q);
    let y = k1 as f64 * x;
    let within = |l: u64| dist_to_int(l as f64 * y) <= 1.0 / p as f64;
    let l = convergent_denominators(y, p)
        .into_iter()
        .find(|&l| within(l))
        .or_else(|| (1..=p.min(10_000_000)).find(|&l| within(l)))
        .unwrap_or(1);
    let brute_k = smallest_k_from(x, 1);
    let hit = |mult: u64| (q..=2 * q).find(|&j| re_power_nonpositive(j * mult, x));
    if let Some(j) = hit(l) {
        return Ok(PigeonholeResult { x, k1, l, j, k: j * l, route: PigeonholeRoute::Pigeonhole, brute_k });
    }
    let j = hit(1).expect("multiples jx, q <= j <= 2q, wrap the circle in steps of at most 1/2");
    Ok(PigeonholeResult { x, k1, l, j, k: j, route: PigeonholeRoute::DirectScan, brute_k })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusDeviation {
    /// `||P - omega I||_F`.
    pub norm: f64,
    /// `1 - Re(conj(omega) tr P) / n`.
    pub delta: f64,
    /// `|norm^2 - 2 n delta|`.
    pub identity_residual: f64,
}

pub fn unitarity_defect(p: &DMatrix<Complex64>) -> f64 {
    let n = p.nrows();
    (p.adjoint() * p - DMatrix::<Complex64>::identity(n, n)).norm()
}

fn check_unit(omega: Complex64) -> Result<(), DiskError> {
    if (omega.norm() - 1.0).abs() > 1e-12 {
        return Err(DiskError::NotUnitModulus(omega.norm()));
    }
    Ok(())
}

pub fn frobenius_deviation(p: &DMatrix<Complex64>, omega: Complex64) -> Result<FrobeniusDeviation, DiskError> {
    check_unit(omega)?;
    let defect = if p.is_square() { unitarity_defect(p) } else { f64::INFINITY };
    if defect > 1e-9 {
        return Err(DiskError::NotUnitary(defect));
    }
    let n = p.nrows();
    let shifted = p - DMatrix::<Complex64>::identity(n, n) * omega;
    let norm = shifted.norm();
    let delta = 1.0 - (omega.conj() * p.trace()).re / n as f64;
    let identity_residual = (norm * norm - 2.0 * n as f64 * delta).abs();
    Ok(FrobeniusDeviation { norm, delta, identity_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelescopingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `||P_1 ... P_k - omega^k I||_F <= sum ||P_i - omega I||_F`.
pub fn telescoping_check(ps: &[DMatrix<Complex64>], omega: Complex64) -> Result<TelescopingCheck, DiskError> {
    check_unit(omega)?;
    let n = ps.first().map_or(0, |p| p.nrows());
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut prod = id.clone();
    let mut rhs = 0.0;
    for p in ps {
        let defect = unitarity_defect(p);
        if defect > 1e-9 {
            return Err(DiskError::NotUnitary(defect));
        }
        prod *= p;
        rhs += (p - &id * omega).norm();
    }
    let lhs = (prod - id * omega.powu(ps.len() as u32)).norm();
    Ok(TelescopingCheck { lhs, rhs, holds: lhs <= rhs + 1e-10 })
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian
/// matrix, with the phases of `R` normalized.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub samples: usize,
    pub in_arc: usize,
    pub min_delta: Option<f64>,
    pub epsilon: f64,
    /// `min_delta - epsilon`.
    pub margin: Option<f64>,
    pub violations: usize,
    pub passes: bool,
}

/// Position of `z / |z|` as a point of `[0, 1)`.
pub fn circle_coordinate(z: Complex64) -> f64 {
    frac(z.arg() / (2.0 * PI))
}

/// Checks `1 - |z| >= epsilon` for every sample whose direction lies in the arc.
pub fn delta_lower_bound_check(samples: &[CharacterSample], consts: &ArcConstants) -> DeltaReport {
    let mut in_arc = 0;
    let mut min_delta: Option<f64> = None;
    let mut violations = 0;
    for s in samples {
        if s.z.norm() == 0.0 || !consts.arc.contains(circle_coordinate(s.z)) {
            continue;
        }
        in_arc += 1;
        let delta = 1.0 - s.z.norm();
        if delta < consts.epsilon {
            violations += 1;
        }
        min_delta = Some(min_delta.map_or(delta, |d: f64| d.min(delta)));
    }
    DeltaReport {
        samples: samples.len(),
        in_arc,
        min_delta,
        epsilon: consts.epsilon,
        margin: min_delta.map(|d| d - consts.epsilon),
        violations,
        passes: violations == 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalInequality {
    /// `1 - 1/k^2`.
    pub lhs: f64,
    /// `1 - c(1-c)(pi/2k)^2`.
    pub rhs: f64,
    /// `4/pi^2 > c(1-c)`.
    pub bound_holds: bool,
    /// `lhs <= rhs`, so `|z| <= lhs` and `|z| > rhs` cannot both hold.
    pub contradiction: bool,
}

pub fn final_inequality_check(k: u64, c: f64) -> Result<FinalInequality, DiskError> {
    if k == 0 || !(c > 0.0 && c < 1.0) {
        return Err(DiskError::BadInequalityInput);
    }
    let kf = k as f64;
    let cc = c * (1.0 - c);
    let lhs = 1.0 - 1.0 / (kf * kf);
    let rhs = 1.0 - cc * (PI / (2.0 * kf)).powi(2);
    Ok(FinalInequality { lhs, rhs, bound_holds: 4.0 / (PI * PI) > cc, contradiction: lhs <= rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::normalized_character;
    use crate::root_system::build_root_system;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rs(label: &str) -> RootSystemSpec {
        build_root_system(label.parse().unwrap()).unwrap()
    }

    #[test]
    fn h_examples() {
        assert_eq!(disk_requirement(Complex64::new(0.0, 0.0)).unwrap(), 0.0);
        for r in [-1.0, -0.5, 0.0, 0.3, 0.999] {
            assert!((disk_requirement(Complex64::new(r, 0.0)).unwrap() - r).abs() < 1e-14);
        }
        for a in [0.1, 1.0, 3.0, 6.0] {
            let h = disk_requirement(Complex64::from_polar(1.0, a)).unwrap();
            assert!((h + 1.0).abs() < 1e-12);
        }
        assert!(matches!(disk_requirement(Complex64::new(1.0, 0.0)), Err(DiskError::AtOne)));
    }

    #[test]
    fn membership_matches_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let mut checked = 0;
        for _ in 0..100_000 {
            let z = Complex64::from_polar(rng.random::<f64>().sqrt(), rng.random_range(0.0..2.0 * PI));
            let c = rng.random_range(-0.999..0.999);
            let h = disk_requirement(z).unwrap();
            if (h - c).abs() < 1e-12 {
                continue;
            }
            assert_eq!(DiskParam::new(c).unwrap().contains(z), c <= h, "z={z} c={c} h={h}");
            checked += 1;
        }
        assert!(checked > 99_000);
    }

    #[test]
    fn disk_geometry() {
        let d = DiskParam::new(-0.5).unwrap();
        assert!(d.contains(Complex64::new(1.0, 0.0)));
        assert!(d.contains(Complex64::new(-0.5, 0.0)));
        assert!(!d.contains(Complex64::new(-0.5 - 1e-9, 0.0)));
        let e = DiskParam::from_proof_parameter(0.25).unwrap();
        assert_eq!(e.c, -0.5);
        assert_eq!(e.proof_parameter(), 0.25);
        assert!(DiskParam::new(1.0).is_err());
    }

    /// Brute minimum of `sin((2l+1)u) / ((2l+1) sin u)` over a fine `u` grid.
    fn so3_oracle(l_max: usize) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for l in 1..=l_max {
            let d = (2 * l + 1) as f64;
            for i in 1..200_000 {
                let u = PI * i as f64 / 200_000.0;
                let v = (d * u).sin() / (d * u.sin());
                if v < best.0 {
                    best = (v, l);
                }
            }
        }
        best
    }

    #[test]
    fn so3_constant() {
        let a1 = rs("A1");
        let est = empirical_disk_constant(&a1, 40, 10_000, None).unwrap();
        assert!((est.c_hat + 1.0 / 3.0).abs() < 1e-9, "{}", est.c_hat);
        assert_eq!(est.attaining.lambda, Weight(vec![2]));
        assert!((est.attaining_root_angles[0] - PI).abs() < 1e-9);
        let (oracle, l) = so3_oracle(20);
        assert_eq!(l, 1);
        assert!((oracle - est.c_hat).abs() < 1e-9);
    }

    #[test]
    fn single_irrep_and_trivial() {
        let a1 = rs("A1");
        let est = disk_scan(&a1, &[Weight(vec![4])], 4000, None).unwrap();
        assert!((est.c_hat + 0.25).abs() < 1e-6, "{}", est.c_hat);
        assert!(matches!(disk_scan(&a1, &[Weight(vec![0])], 100, None), Err(DiskError::EmptySample)));
    }

    #[test]
    fn scan_monotone() {
        let a2 = rs("A2");
        let mut prev = f64::INFINITY;
        for bound in [2, 4, 6] {
            let c = empirical_disk_constant(&a2, bound, 24, None).unwrap().c_hat;
            assert!(c <= prev && c > -1.0 && c < 0.0);
            prev = c;
        }
        let mut prev = f64::INFINITY;
        for grid in [6, 12, 24, 48] {
            let c = empirical_disk_constant(&a2, 4, grid, None).unwrap().c_hat;
            assert!(c <= prev);
            prev = c;
        }
    }

    #[test]
    fn scan_agrees_with_direct_evaluation() {
        let b2 = rs("B2");
        let weights = enumerate_adjoint_dominant_weights(&b2, 3);
        let samples = character_scan(&b2, &weights, 7, None).unwrap();
        assert_eq!(samples.len(), weights.len() * 49);
        for s in samples.iter().step_by(5) {
            let table = irrep_table(&b2, &s.lambda, None).unwrap();
            let direct = normalized_character(&table, &s.theta).z;
            assert!((direct - s.z).norm() < 1e-12);
        }
    }

    #[test]
    fn arc_constant_examples() {
        let c = arc_constants(ArcSpec::new(0.5, 0.5).unwrap(), 2).unwrap();
        assert_eq!((c.m, c.q), (0.5, 3));
        let c = arc_constants(ArcSpec::new(0.4, 0.6).unwrap(), 2).unwrap();
        assert_eq!((c.m, c.q), (0.4, 3));
        let c = arc_constants(ArcSpec::new(0.01, 0.99).unwrap(), 2).unwrap();
        assert_eq!(c.q, 101);
        let c = arc_constants(ArcSpec::new(0.3, 0.7).unwrap(), 10).unwrap();
        assert_eq!(c.q, 11);
        assert!(1.0 / (c.p as f64) < c.delta && c.delta > 0.0);
        assert!((c.epsilon - 1.0 / (2.0 * c.p as f64 * c.q as f64).powi(2)).abs() < 1e-30);
        assert!(ArcSpec::new(0.0, 0.5).is_err());
        assert!(ArcSpec::new(0.6, 0.5).is_err());
    }

    /// Every point near `S` has a multiple `jx`, `q <= j <= 2q`, in the left
    /// half circle.
    #[test]
    fn delta_covers_neighbourhoods() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for q_target in [3u64, 5, 8, 13] {
            let arc = ArcSpec::new(1.0 / q_target as f64 + 1e-3, 0.5).unwrap();
            let c = arc_constants(arc, 1).unwrap();
            for s in 2..=c.q {
                for t in 1..s {
                    for _ in 0..20 {
                        let x = t as f64 / s as f64 + rng.random_range(-c.delta..c.delta);
                        assert!((c.q..=2 * c.q).any(|j| {
                            let f = frac(j as f64 * x);
                            (0.25..=0.75).contains(&f)
                        }));
                    }
                }
            }
            // The unshrunk radius is sharp: some point just beyond it fails.
            let r = c.delta / DELTA_SAFETY;
            let fails = (2..=c.q).flat_map(|s| (1..s).map(move |t| (t, s))).any(|(t, s)| {
                [-1.0, 1.0].iter().any(|sg| {
                    let x = t as f64 / s as f64 + sg * r * (1.0 + 1e-6);
                    !(c.q..=2 * c.q).any(|j| (0.25..=0.75).contains(&frac(j as f64 * x)))
                })
            });
            assert!(fails, "q = {}", c.q);
        }
    }

    #[test]
    fn pigeonhole_examples() {
        let c = arc_constants(ArcSpec::new(0.05, 0.95).unwrap(), 2).unwrap();
        for (x, brute) in [(0.5, 1), (1.0 / 3.0, 1), (0.1, 3)] {
            let r = pigeonhole_k(x, &c).unwrap();
            assert_eq!(r.brute_k, brute);
            assert!(re_power_nonpositive(r.k, x));
            assert!(r.k <= c.k_bound() && r.k >= c.b && r.brute_k <= r.k);
        }
        assert!(pigeonhole_k(0.01, &c).is_err());
    }

    #[test]
    fn pigeonhole_random_arcs() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..10 {
            let lo = rng.random_range(0.05..0.5);
            let hi = rng.random_range(lo..0.95);
            let b = rng.random_range(1..6);
            let c = arc_constants(ArcSpec::new(lo, hi).unwrap(), b).unwrap();
            for _ in 0..2000 {
                let x = rng.random_range(lo..=hi);
                let r = pigeonhole_k(x, &c).unwrap();
                assert!(re_power_nonpositive(r.k, x));
                assert!(r.k <= c.k_bound() && r.k > b && r.k1 >= 2);
                assert!(r.brute_k <= r.k);
            }
        }
    }

    #[test]
    fn convergents() {
        assert_eq!(convergent_denominators(PI - 3.0, 33_200), vec![1, 7, 106, 113, 33102]);
        assert_eq!(convergent_denominators(0.5, 100), vec![1, 2]);
    }

    #[test]
    fn frobenius_examples() {
        let id = DMatrix::<Complex64>::identity(2, 2);
        let r = frobenius_deviation(&id, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!((r.norm, r.delta), (0.0, 0.0));
        let mut p = id.clone();
        p[(1, 1)] = Complex64::new(-1.0, 0.0);
        let r = frobenius_deviation(&p, Complex64::new(1.0, 0.0)).unwrap();
        assert!((r.norm * r.norm - 4.0).abs() < 1e-15 && (r.delta - 1.0).abs() < 1e-15);
        let bad = id * Complex64::new(2.0, 0.0);
        assert!(matches!(frobenius_deviation(&bad, Complex64::new(1.0, 0.0)), Err(DiskError::NotUnitary(_))));
    }

    #[test]
    fn frobenius_against_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let n = rng.random_range(1..=8);
            let p = random_unitary(n, &mut rng);
            assert!(unitarity_defect(&p) < 1e-12);
            let omega = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
            let r = frobenius_deviation(&p, omega).unwrap();
            let t = p.clone().schur().unpack().1;
            let eig: f64 = (0..n).map(|i| (omega - t[(i, i)]).norm_sqr()).sum();
            assert!((r.norm * r.norm - eig).abs() < 1e-12);
            assert!(r.identity_residual < 1e-12);
        }
    }

    #[test]
    fn telescoping() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let omega = Complex64::from_polar(1.0, 0.7);
        let n = 3;
        let scalar = vec![DMatrix::<Complex64>::identity(n, n) * omega; 4];
        let r = telescoping_check(&scalar, omega).unwrap();
        assert!(r.lhs < 1e-14 && r.rhs < 1e-14 && r.holds);
        let single = vec![random_unitary(n, &mut rng)];
        let r = telescoping_check(&single, omega).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-14);
        for _ in 0..1000 {
            let n = rng.random_range(1..=6);
            let k = rng.random_range(1..=8);
            let ps: Vec<_> = (0..k).map(|_| random_unitary(n, &mut rng)).collect();
            let omega = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
            assert!(telescoping_check(&ps, omega).unwrap().holds);
        }
    }

    #[test]
    fn delta_check_on_so3() {
        let a1 = rs("A1");
        let weights = enumerate_adjoint_dominant_weights(&a1, 20);
        let samples = character_scan(&a1, &weights, 2000, None).unwrap();
        let c = arc_constants(ArcSpec::new(0.45, 0.55).unwrap(), 2).unwrap();
        let r = delta_lower_bound_check(&samples, &c);
        assert!(r.passes && r.in_arc > 0);
        assert!((r.min_delta.unwrap() - 2.0 / 3.0).abs() < 1e-9);
        let empty = delta_lower_bound_check(&[], &c);
        assert!(empty.passes && empty.min_delta.is_none());
    }

    #[test]
    fn final_inequality() {
        let r = final_inequality_check(7, 0.5).unwrap();
        assert!(r.bound_holds && r.contradiction);
        let r = final_inequality_check(5, 0.1).unwrap();
        assert!(r.bound_holds && r.contradiction && r.lhs < r.rhs);
        for i in 1..1000 {
            let c = i as f64 / 1000.0;
            for k in 1..=100 {
                let r = final_inequality_check(k, c).unwrap();
                assert!(r.bound_holds && r.contradiction);
            }
        }
        assert!(final_inequality_check(0, 0.5).is_err());
        assert!(final_inequality_check(3, 1.0).is_err());
    }
}
