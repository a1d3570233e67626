//! Irreducible characters of the adjoint group restricted to a maximal torus.
//!
//! Weight multiplicities come from Freudenthal's recursion over the dominant
//! weights below the highest weight; characters are evaluated as
//! multiplicity-weighted Fourier sums, which stay valid at singular torus
//! points where the Weyl quotient formula degenerates.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::root_system::{ratio_floor_nonneg, CartanType, RootSystemError, RootSystemSpec, Weight};

#[derive(Debug, Error)]
pub enum CharacterError {
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error("dimension of {0} overflows 64 bits")]
    DimensionOverflow(Weight),
    #[error("Freudenthal recursion produced non-integral multiplicity {value} at {weight}")]
    NonIntegralMultiplicity { weight: Weight, value: f64 },
    #[error("multiplicities of {lambda} sum to {sum}, Weyl dimension is {dim}")]
    DimensionMismatch { lambda: Weight, sum: u64, dim: u64 },
    #[error("tensor-grid quadrature supports rank <= 2, got rank {0}")]
    QuadratureRank(usize),
    #[error("quadrature needs at least one point per dimension")]
    EmptyQuadrature,
    #[error("cache I/O: {0}")]
    Io(#[from] io::Error),
    #[error("cache entry is malformed: {0}")]
    Cache(String),
}

/// Weight multiplicities of one irreducible representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrrepTable {
    pub cartan_type: CartanType,
    pub lambda: Weight,
    pub mults: BTreeMap<Weight, u64>,
    pub dim: u64,
}

impl IrrepTable {
    pub fn total_multiplicity(&self) -> u64 {
        self.mults.values().sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.lambda.is_zero()
    }
}

/// A point of the maximal torus in simple-coroot coordinates:
/// `<mu, theta> = sum_j theta_j <mu, alpha_j^vee>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusPoint {
    pub theta: Vec<f64>,
}

impl TorusPoint {
    pub fn new(theta: Vec<f64>) -> Self {
        TorusPoint { theta }
    }

    pub fn origin(rank: usize) -> Self {
        TorusPoint { theta: vec![0.0; rank] }
    }

    /// Builds the point whose pairings with the simple roots are `angles`.
    pub fn from_root_angles(rs: &RootSystemSpec, angles: &[f64]) -> Self {
        let a = cartan_f64(rs);
        let y = DVector::from_column_slice(angles);
        let theta = a.lu().solve(&y).expect("Cartan matrix is invertible");
        TorusPoint { theta: theta.iter().copied().collect() }
    }

    /// Pairings `<alpha_k, theta>` with the simple roots. The adjoint torus is
    /// exactly periodic with period `2 pi` in each of these.
    pub fn root_angles(&self, rs: &RootSystemSpec) -> Vec<f64> {
        let a = cartan_f64(rs);
        (a * DVector::from_column_slice(&self.theta)).iter().copied().collect()
    }

    /// Canonical representative modulo `2 pi` times the coweight lattice.
    pub fn reduced(&self, rs: &RootSystemSpec) -> Self {
        let y: Vec<f64> = self.root_angles(rs).iter().map(|v| v.rem_euclid(2.0 * PI)).collect();
        Self::from_root_angles(rs, &y)
    }

    pub fn pairing(&self, mu: &Weight) -> f64 {
        self.theta.iter().zip(&mu.0).map(|(t, &m)| t * m as f64).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().all(|t| t.is_finite())
    }
}

pub(crate) fn cartan_f64(rs: &RootSystemSpec) -> DMatrix<f64> {
    DMatrix::from_fn(rs.rank, rs.rank, |i, j| rs.cartan_matrix[i][j] as f64)
}

/// One sampled normalized character value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterSample {
    pub lambda: Weight,
    pub theta: TorusPoint,
    pub z: Complex64,
}

fn require_dominant(rs: &RootSystemSpec, lambda: &Weight) -> Result<(), CharacterError> {
    rs.check_rank(lambda)?;
    if !lambda.is_dominant() {
        return Err(RootSystemError::NotDominant(lambda.clone()).into());
    }
    Ok(())
}

/// Weyl dimension formula, evaluated in exact integer arithmetic.
pub fn weyl_dimension(rs: &RootSystemSpec, lambda: &Weight) -> Result<u64, CharacterError> {
    require_dominant(rs, lambda)?;
    let overflow = || CharacterError::DimensionOverflow(lambda.clone());
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for d in &rs.positive_coroot_coords {
        let shifted: i64 = d.iter().zip(&lambda.0).map(|(di, li)| di * (li + 1)).sum();
        let rho: i64 = d.iter().sum();
        num = num.checked_mul(shifted as u128).ok_or_else(overflow)?;
        den = den.checked_mul(rho as u128).ok_or_else(overflow)?;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    debug_assert_eq!(den, 1);
    u64::try_from(num / den).map_err(|_| overflow())
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Weight multiplicities of the irreducible representation with highest
/// weight `lambda`.
pub fn weight_multiplicities(rs: &RootSystemSpec, lambda: &Weight) -> Result<IrrepTable, CharacterError> {
    require_dominant(rs, lambda)?;
    let rank = rs.rank;
    let gram = rs.fundamental_gram();
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..rank {
            for j in 0..rank {
                s += a[i] * gram[(i, j)] * b[j];
            }
        }
        s
    };
    let to_f = |w: &Weight| -> Vec<f64> { w.0.iter().map(|&c| c as f64).collect() };
    let shifted = |w: &Weight| -> Vec<f64> { w.0.iter().map(|&c| c as f64 + 1.0).collect() };

    let pos_roots = rs.positive_root_weights();
    let pos_roots_f: Vec<Vec<f64>> = pos_roots.iter().map(to_f).collect();
    let simple = rs.simple_root_weights();

    // Dominant weights mu <= lambda: lambda - sum k_i alpha_i with
    // 0 <= k_i <= root coordinate of lambda.
    let bounds: Vec<i64> = rs.root_coordinates(lambda)?.iter().map(ratio_floor_nonneg).collect();
    let mut dominant: Vec<(i64, Weight)> = Vec::new();
    let mut k = vec![0i64; rank];
    loop {
        let mut mu = lambda.clone();
        for (i, &ki) in k.iter().enumerate() {
            mu = mu.add_scaled(&simple[i].0, -ki);
        }
        if mu.is_dominant() {
            dominant.push((k.iter().sum(), mu));
        }
        let mut pos = 0;
        while pos < rank {
            k[pos] += 1;
            if k[pos] <= bounds[pos] {
                break;
            }
            k[pos] = 0;
            pos += 1;
        }
        if pos == rank {
            break;
        }
    }
    dominant.sort();

    let norm_top = {
        let v = shifted(lambda);
        ip(&v, &v)
    };
    let mut dom_mult: BTreeMap<Weight, u64> = BTreeMap::new();
    for (depth, mu) in &dominant {
        if *depth == 0 {
            dom_mult.insert(mu.clone(), 1);
            continue;
        }
        let mut num = 0.0;
        for (alpha, alpha_f) in pos_roots.iter().zip(&pos_roots_f) {
            let mut step = 1;
            loop {
                let nu = mu.add_scaled(&alpha.0, step);
                let m = match dom_mult.get(&rs.dominant_conjugate(&nu)) {
                    Some(&m) => m,
                    None => break,
                };
                num += m as f64 * ip(&to_f(&nu), alpha_f);
                step += 1;
            }
        }
        let v = shifted(mu);
        let den = norm_top - ip(&v, &v);
        let value = 2.0 * num / den;
        let rounded = value.round();
        if (value - rounded).abs() > 1e-6 || rounded < 1.0 {
            return Err(CharacterError::NonIntegralMultiplicity { weight: mu.clone(), value });
        }
        dom_mult.insert(mu.clone(), rounded as u64);
    }

    let mut mults = BTreeMap::new();
    for (mu, &m) in &dom_mult {
        for w in rs.weyl_orbit(mu) {
            mults.insert(w, m);
        }
    }
    let dim = weyl_dimension(rs, lambda)?;
    let sum: u64 = mults.values().sum();
    if sum != dim {
        return Err(CharacterError::DimensionMismatch { lambda: lambda.clone(), sum, dim });
    }
    Ok(IrrepTable { cartan_type: rs.cartan_type, lambda: lambda.clone(), mults, dim })
}

/// `chi(theta) = sum_mu m_mu exp(i <mu, theta>)`.
pub fn character_value(table: &IrrepTable, theta: &TorusPoint) -> Complex64 {
    table
        .mults
        .iter()
        .map(|(mu, &m)| Complex64::from_polar(m as f64, theta.pairing(mu)))
        .sum()
}

/// `chi(theta) / chi(e)`, the average eigenvalue of the representing matrix.
pub fn normalized_character(table: &IrrepTable, theta: &TorusPoint) -> CharacterSample {
    let z = character_value(table, theta) / table.dim as f64;
    CharacterSample { lambda: table.lambda.clone(), theta: theta.clone(), z }
}

/// Haar integral of a character over the group via the Weyl integration
/// formula on a uniform tensor grid of the adjoint torus.
///
/// The torus is parametrized by its simple-root angles, each ranging over
/// `[0, 2 pi)`, with density `|W|^-1 prod_{alpha > 0} 4 sin^2(alpha / 2)`.
pub fn haar_character_integral(
    rs: &RootSystemSpec,
    table: &IrrepTable,
    points_per_dim: usize,
) -> Result<Complex64, CharacterError> {
    if rs.rank > 2 {
        return Err(CharacterError::QuadratureRank(rs.rank));
    }
    if points_per_dim == 0 {
        return Err(CharacterError::EmptyQuadrature);
    }
    let evaluator = CharacterEvaluator::new(table);
    let order = rs.cartan_type.weyl_order() as f64;
    let n = points_per_dim;
    let total = n.pow(rs.rank as u32);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut angles = vec![0.0; rs.rank];
    for flat in 0..total {
        let mut rem = flat;
        for a in angles.iter_mut() {
            *a = 2.0 * PI * (rem % n) as f64 / n as f64;
            rem /= n;
        }
        let density: f64 = rs
            .positive_root_coords
            .iter()
            .map(|c| {
                let phase: f64 = c.iter().zip(&angles).map(|(&ci, y)| ci as f64 * y).sum();
                4.0 * (phase / 2.0).sin().powi(2)
            })
            .product();
        let theta = TorusPoint::from_root_angles(rs, &angles);
        acc += evaluator.value(&theta) * density;
    }
    Ok(acc / (order * total as f64))
}

/// Character evaluation with precomputed powers of `exp(i theta_j)`, used by
/// dense scans.
#[derive(Debug, Clone)]
pub struct CharacterEvaluator {
    weights: Vec<Vec<i64>>,
    mults: Vec<f64>,
    max_abs: Vec<i64>,
    dim: f64,
}

impl CharacterEvaluator {
    pub fn new(table: &IrrepTable) -> Self {
        let rank = table.lambda.0.len();
        let mut max_abs = vec![0i64; rank];
        let mut weights = Vec::with_capacity(table.mults.len());
        let mut mults = Vec::with_capacity(table.mults.len());
        for (mu, &m) in &table.mults {
            for (j, &c) in mu.0.iter().enumerate() {
                max_abs[j] = max_abs[j].max(c.abs());
            }
            weights.push(mu.0.clone());
            mults.push(m as f64);
        }
        CharacterEvaluator { weights, mults, max_abs, dim: table.dim as f64 }
    }

    pub fn dim(&self) -> f64 {
        self.dim
    }

    /// Powers `exp(i k theta_j)` for `|k| <= max_abs[j]`, indexed by `k + max_abs[j]`.
    pub fn powers(&self, theta: &TorusPoint) -> Vec<Vec<Complex64>> {
        self.max_abs
            .iter()
            .zip(&theta.theta)
            .map(|(&m, &t)| (-m..=m).map(|k| Complex64::from_polar(1.0, k as f64 * t)).collect())
            .collect()
    }

    pub fn value(&self, theta: &TorusPoint) -> Complex64 {
        let powers = self.powers(theta);
        self.value_with_powers(&powers)
    }

    pub(crate) fn value_with_powers(&self, powers: &[Vec<Complex64>]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (mu, &m) in self.weights.iter().zip(&self.mults) {
            let mut term = Complex64::new(m, 0.0);
            for (j, &c) in mu.iter().enumerate() {
                term *= powers[j][(c + self.max_abs[j]) as usize];
            }
            acc += term;
        }
        acc
    }

    /// Largest coefficient magnitude per coordinate, for sizing shared power tables.
    pub fn max_abs(&self) -> &[i64] {
        &self.max_abs
    }

    pub(crate) fn value_with_shared_powers(&self, powers: &[Vec<Complex64>], offsets: &[i64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (mu, &m) in self.weights.iter().zip(&self.mults) {
            let mut term = Complex64::new(m, 0.0);
            for (j, &c) in mu.iter().enumerate() {
                term *= powers[j][(c + offsets[j]) as usize];
            }
            acc += term;
        }
        acc
    }
}

/// On-disk cache of multiplicity tables, one JSON document per `(type, lambda)`.
#[derive(Debug, Clone)]
pub struct MultiplicityCache {
    dir: PathBuf,
}

/// Environment variable naming the cache directory used by the CLI.
pub const CACHE_DIR_ENV: &str = "ADJLAB_CACHE_DIR";

#[derive(Debug, Serialize, Deserialize)]
struct CacheDocument {
    schema: u32,
    #[serde(rename = "type")]
    cartan_type: CartanType,
    lambda: Weight,
    dim: u64,
    weights: Vec<CacheEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    weight: Weight,
    mult: u64,
}

impl MultiplicityCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        MultiplicityCache { dir: dir.into() }
    }

    /// Cache rooted at `$ADJLAB_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_DIR_ENV).map(|d| Self::new(PathBuf::from(d)))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, ty: CartanType, lambda: &Weight) -> PathBuf {
        let parts: Vec<String> = lambda.0.iter().map(|c| c.to_string()).collect();
        self.dir.join(format!("{}_{}.json", ty, parts.join("_")))
    }

    pub fn store(&self, table: &IrrepTable) -> Result<(), CharacterError> {
        fs::create_dir_all(&self.dir)?;
        let doc = CacheDocument {
            schema: 1,
            cartan_type: table.cartan_type,
            lambda: table.lambda.clone(),
            dim: table.dim,
            weights: table
                .mults
                .iter()
                .map(|(w, &m)| CacheEntry { weight: w.clone(), mult: m })
                .collect(),
        };
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CharacterError::Cache(e.to_string()))?;
        fs::write(self.path_for(table.cartan_type, &table.lambda), text)?;
        Ok(())
    }

    pub fn load(&self, ty: CartanType, lambda: &Weight) -> Result<Option<IrrepTable>, CharacterError> {
        let path = self.path_for(ty, lambda);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(path)?;
        let doc: CacheDocument = serde_json::from_str(&text).map_err(|e| CharacterError::Cache(e.to_string()))?;
        if doc.cartan_type != ty || doc.lambda != *lambda {
            return Err(CharacterError::Cache("key does not match file contents".into()));
        }
        let mults: BTreeMap<Weight, u64> = doc.weights.into_iter().map(|e| (e.weight, e.mult)).collect();
        if mults.values().sum::<u64>() != doc.dim {
            return Err(CharacterError::Cache("multiplicities do not sum to dim".into()));
        }
        Ok(Some(IrrepTable { cartan_type: ty, lambda: doc.lambda, mults, dim: doc.dim }))
    }

    /// Loads the table if cached, otherwise computes and stores it.
    pub fn get_or_compute(&self, rs: &RootSystemSpec, lambda: &Weight) -> Result<IrrepTable, CharacterError> {
        if let Some(t) = self.load(rs.cartan_type, lambda)? {
            return Ok(t);
        }
        let t = weight_multiplicities(rs, lambda)?;
        self.store(&t)?;
        Ok(t)
    }
}

/// Computes a table through the optional cache.
pub fn irrep_table(
    rs: &RootSystemSpec,
    lambda: &Weight,
    cache: Option<&MultiplicityCache>,
) -> Result<IrrepTable, CharacterError> {
    match cache {
        Some(c) => c.get_or_compute(rs, lambda),
        None => weight_multiplicities(rs, lambda),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::{build_root_system, enumerate_adjoint_dominant_weights, generate_weyl_group};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rs(label: &str) -> RootSystemSpec {
        build_root_system(label.parse().unwrap()).unwrap()
    }

    fn w(v: &[i64]) -> Weight {
        Weight(v.to_vec())
    }

    #[test]
    fn dimensions() {
        assert_eq!(weyl_dimension(&rs("A1"), &w(&[0])).unwrap(), 1);
        assert_eq!(weyl_dimension(&rs("A1"), &w(&[2])).unwrap(), 3);
        assert_eq!(weyl_dimension(&rs("A2"), &w(&[1, 1])).unwrap(), 8);
        assert_eq!(weyl_dimension(&rs("A2"), &w(&[3, 0])).unwrap(), 10);
        assert_eq!(weyl_dimension(&rs("B2"), &w(&[0, 2])).unwrap(), 10);
        assert_eq!(weyl_dimension(&rs("B2"), &w(&[1, 0])).unwrap(), 5);
        assert_eq!(weyl_dimension(&rs("G2"), &w(&[1, 0])).unwrap(), 7);
        assert_eq!(weyl_dimension(&rs("G2"), &w(&[0, 1])).unwrap(), 14);
        assert!(weyl_dimension(&rs("A2"), &w(&[-1, 2])).is_err());
    }

    #[test]
    fn dimension_formula_oracle() {
        // Product over positive roots with Euclidean inner products, in floats.
        for label in ["A2", "B2", "C2", "G2"] {
            let r = rs(label);
            let rho = DVector::from_column_slice(&r.weyl_vector);
            for lam in enumerate_adjoint_dominant_weights(&r, 5) {
                let lr = r.weight_vector(&lam) + &rho;
                let mut d = 1.0;
                for a in &r.positive_roots {
                    let a = DVector::from_column_slice(a);
                    d *= lr.dot(&a) / rho.dot(&a);
                }
                assert_eq!(weyl_dimension(&r, &lam).unwrap() as f64, d.round(), "{label} {lam}");
            }
        }
    }

    #[test]
    fn multiplicity_examples() {
        let t = weight_multiplicities(&rs("A1"), &w(&[2])).unwrap();
        assert_eq!(t.mults.len(), 3);
        for mu in [w(&[-2]), w(&[0]), w(&[2])] {
            assert_eq!(t.mults[&mu], 1);
        }
        let t = weight_multiplicities(&rs("A2"), &w(&[1, 1])).unwrap();
        assert_eq!(t.mults[&w(&[0, 0])], 2);
        assert_eq!(t.mults.len(), 7);
        assert_eq!(t.mults.values().filter(|&&m| m == 1).count(), 6);
        let t = weight_multiplicities(&rs("G2"), &w(&[0, 0])).unwrap();
        assert_eq!(t.mults.len(), 1);
        assert_eq!(t.dim, 1);
    }

    #[test]
    fn adjoint_representation_has_rank_zero_weight() {
        for label in ["A2", "B2", "C2", "G2", "A3", "D4"] {
            let r = rs(label);
            let hr = &r.positive_root_coords[r.highest_root_index()];
            let lam = r.root_coords_to_weight(hr);
            let t = weight_multiplicities(&r, &lam).unwrap();
            assert_eq!(t.dim as usize, r.algebra_dim(), "{label}");
            assert_eq!(t.mults[&Weight::zero(r.rank)] as usize, r.rank, "{label}");
        }
    }

    #[test]
    fn table_invariants() {
        for label in ["A2", "B2", "G2"] {
            let r = rs(label);
            let group = generate_weyl_group(&r).unwrap();
            for lam in enumerate_adjoint_dominant_weights(&r, 6) {
                let t = weight_multiplicities(&r, &lam).unwrap();
                assert_eq!(t.mults[&lam], 1);
                assert_eq!(t.total_multiplicity(), t.dim);
                for (mu, m) in &t.mults {
                    for e in &group {
                        assert_eq!(t.mults.get(&e.apply_weight(mu)), Some(m));
                    }
                }
            }
        }
    }

    #[test]
    fn character_value_examples() {
        let r = rs("A1");
        let t = weight_multiplicities(&r, &w(&[2])).unwrap();
        assert_eq!(character_value(&t, &TorusPoint::origin(1)), Complex64::new(3.0, 0.0));
        let at = |y: f64| character_value(&t, &TorusPoint::from_root_angles(&r, &[y]));
        assert!((at(PI) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(at(2.0 * PI / 3.0).norm() < 1e-12);
        let s = normalized_character(&t, &TorusPoint::from_root_angles(&r, &[PI]));
        assert!((s.z - Complex64::new(-1.0 / 3.0, 0.0)).norm() < 1e-12);
        let a2 = rs("A2");
        let t = weight_multiplicities(&a2, &w(&[1, 1])).unwrap();
        assert_eq!(normalized_character(&t, &TorusPoint::origin(2)).z, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn character_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for label in ["A1", "A2", "B2", "G2"] {
            let r = rs(label);
            let group = generate_weyl_group(&r).unwrap();
            let coroots = DMatrix::from_fn(r.rank, r.rank, |k, j| {
                2.0 * r.simple_roots[j][k] / r.simple_root_length_sq(j)
            });
            let coroots_inv = coroots.clone().try_inverse().unwrap();
            let cartan = cartan_f64(&r);
            let cartan_inv = cartan.clone().try_inverse().unwrap();
            for lam in enumerate_adjoint_dominant_weights(&r, 4) {
                let t = weight_multiplicities(&r, &lam).unwrap();
                for _ in 0..20 {
                    let th: Vec<f64> = (0..r.rank).map(|_| rng.random_range(-7.0..7.0)).collect();
                    let p = TorusPoint::new(th.clone());
                    let v = character_value(&t, &p);
                    let neg = TorusPoint::new(th.iter().map(|x| -x).collect());
                    assert!((character_value(&t, &neg) - v.conj()).norm() < 1e-12);
                    for k in 0..r.rank {
                        let mut shifted = th.clone();
                        for j in 0..r.rank {
                            shifted[j] += 2.0 * PI * cartan_inv[(j, k)];
                        }
                        let vs = character_value(&t, &TorusPoint::new(shifted));
                        assert!((vs - v).norm() < 1e-12 * t.dim as f64, "{label} {lam}");
                    }
                    let red = p.reduced(&r);
                    assert!((character_value(&t, &red) - v).norm() < 1e-11 * t.dim as f64);
                    let e = &coroots * DVector::from_column_slice(&th);
                    for g in &group {
                        let img = coroots_inv.clone() * (&g.matrix * &e);
                        let vw = character_value(&t, &TorusPoint::new(img.iter().copied().collect()));
                        assert!((vw - v).norm() < 1e-12 * t.dim as f64);
                    }
                    let ev = CharacterEvaluator::new(&t);
                    assert!((ev.value(&p) - v).norm() < 1e-11 * t.dim as f64);
                }
            }
        }
    }

    #[test]
    fn normalized_values_stay_in_unit_disk() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for label in ["A2", "G2"] {
            let r = rs(label);
            for lam in enumerate_adjoint_dominant_weights(&r, 3) {
                let t = weight_multiplicities(&r, &lam).unwrap();
                let ev = CharacterEvaluator::new(&t);
                for _ in 0..10_000 {
                    let th: Vec<f64> = (0..r.rank).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
                    let z = ev.value(&TorusPoint::new(th)) / ev.dim();
                    assert!(z.norm() <= 1.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn haar_integrals() {
        let a1 = rs("A1");
        let triv = weight_multiplicities(&a1, &w(&[0])).unwrap();
        assert!((haar_character_integral(&a1, &triv, 16).unwrap() - 1.0).norm() < 1e-9);
        let adj = weight_multiplicities(&a1, &w(&[2])).unwrap();
        assert!(haar_character_integral(&a1, &adj, 2048).unwrap().norm() < 1e-6);
        // A coarse grid cannot resolve the integrand; refinement converges.
        let coarse = haar_character_integral(&a1, &adj, 2).unwrap().norm();
        let fine = haar_character_integral(&a1, &adj, 8).unwrap().norm();
        assert!(fine <= coarse + 1e-12);
        let a2 = rs("A2");
        let triv = weight_multiplicities(&a2, &w(&[0, 0])).unwrap();
        assert!((haar_character_integral(&a2, &triv, 32).unwrap() - 1.0).norm() < 1e-9);
        let adj = weight_multiplicities(&a2, &w(&[1, 1])).unwrap();
        assert!(haar_character_integral(&a2, &adj, 64).unwrap().norm() < 1e-4);
        assert!(matches!(
            haar_character_integral(&rs("A3"), &weight_multiplicities(&rs("A3"), &w(&[0, 0, 0])).unwrap(), 4),
            Err(CharacterError::QuadratureRank(3))
        ));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = MultiplicityCache::new(dir.path());
        let r = rs("B2");
        let lam = w(&[2, 2]);
        assert!(cache.load(r.cartan_type, &lam).unwrap().is_none());
        let t = cache.get_or_compute(&r, &lam).unwrap();
        let loaded = cache.load(r.cartan_type, &lam).unwrap().unwrap();
        assert_eq!(t, loaded);
        assert!(dir.path().join("B2_2_2.json").exists());
    }
}
