//! Root systems, Weyl groups and the weight lattice of a simple type.
//!
//! Weights are carried in the fundamental-weight basis as integer vectors.
//! The Cartan matrix follows the convention `A[i][j] = <alpha_i, alpha_j^vee>`,
//! so row `i` is the fundamental-weight expansion of the simple root `alpha_i`.
//! Euclidean realizations normalize long roots to squared length 2.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest rank accepted for the generic classical families.
pub const MAX_RANK: usize = 8;

/// Default cap on the number of Weyl group elements enumerated explicitly.
pub const DEFAULT_WEYL_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootSystemError {
    #[error("unsupported type label `{0}`")]
    UnsupportedType(String),
    #[error("weight has {got} coefficients, rank is {rank}")]
    RankMismatch { rank: usize, got: usize },
    #[error("weight {0} is not dominant")]
    NotDominant(Weight),
    #[error("Weyl group closure exceeded the cap of {cap} elements")]
    WeylGroupTooLarge { cap: usize },
}

/// Cartan–Killing type of a simple Lie algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CartanType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    G2,
}

impl CartanType {
    pub fn rank(&self) -> usize {
        match *self {
            CartanType::A(n) | CartanType::B(n) | CartanType::C(n) | CartanType::D(n) => n,
            CartanType::G2 => 2,
        }
    }

    fn validate(self) -> Result<Self, RootSystemError> {
        let ok = match self {
            CartanType::A(n) => (1..=MAX_RANK).contains(&n),
            CartanType::B(n) | CartanType::C(n) => (2..=MAX_RANK).contains(&n),
            CartanType::D(n) => (4..=MAX_RANK).contains(&n),
            CartanType::G2 => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(RootSystemError::UnsupportedType(self.to_string()))
        }
    }

    /// Order of the Weyl group, from the classification.
    pub fn weyl_order(&self) -> u64 {
        let fact = |n: u64| (1..=n).product::<u64>();
        match *self {
            CartanType::A(n) => fact(n as u64 + 1),
            CartanType::B(n) | CartanType::C(n) => (1u64 << n) * fact(n as u64),
            CartanType::D(n) => (1u64 << (n - 1)) * fact(n as u64),
            CartanType::G2 => 12,
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CartanType::A(n) => write!(f, "A{n}"),
            CartanType::B(n) => write!(f, "B{n}"),
            CartanType::C(n) => write!(f, "C{n}"),
            CartanType::D(n) => write!(f, "D{n}"),
            CartanType::G2 => write!(f, "G2"),
        }
    }
}

impl FromStr for CartanType {
    type Err = RootSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || RootSystemError::UnsupportedType(s.to_string());
        if s.eq_ignore_ascii_case("G2") {
            return Ok(CartanType::G2);
        }
        let mut chars = s.chars();
        let family = chars.next().ok_or_else(err)?.to_ascii_uppercase();
        let rank: usize = chars.as_str().parse().map_err(|_| err())?;
        let ty = match family {
            'A' => CartanType::A(rank),
            'B' => CartanType::B(rank),
            'C' => CartanType::C(rank),
            'D' => CartanType::D(rank),
            _ => return Err(err()),
        };
        ty.validate().map_err(|_| err())
    }
}

impl Serialize for CartanType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CartanType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A weight in fundamental-weight coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Sum of the fundamental-weight coefficients, `<lambda, sum_i alpha_i^vee>`.
    pub fn level(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub(crate) fn add_scaled(&self, other: &[i64], k: i64) -> Weight {
        Weight(self.0.iter().zip(other).map(|(a, b)| a + k * b).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for Weight {
    fn from(v: Vec<i64>) -> Self {
        Weight(v)
    }
}

/// Combinatorial and Euclidean data of a reduced irreducible root system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSystemSpec {
    pub cartan_type: CartanType,
    pub rank: usize,
    /// Simple roots as rows, in a rank-dimensional Euclidean realization.
    pub simple_roots: Vec<Vec<f64>>,
    pub cartan_matrix: Vec<Vec<i64>>,
    /// Positive roots in the Euclidean realization, ordered by height then
    /// lexicographically in simple-root coordinates.
    pub positive_roots: Vec<Vec<f64>>,
    /// Positive roots in simple-root coordinates (same order).
    pub positive_root_coords: Vec<Vec<i64>>,
    /// Positive coroots in simple-coroot coordinates (same order).
    pub positive_coroot_coords: Vec<Vec<i64>>,
    pub fundamental_weights: Vec<Vec<f64>>,
    pub weyl_vector: Vec<f64>,
}

impl RootSystemSpec {
    /// Euclidean inner product of two vectors of the realization.
    pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// Squared length of the positive root with index `idx`.
    pub fn root_length_sq(&self, idx: usize) -> f64 {
        let r = &self.positive_roots[idx];
        Self::dot(r, r)
    }

    pub fn simple_root_length_sq(&self, i: usize) -> f64 {
        let r = &self.simple_roots[i];
        Self::dot(r, r)
    }

    /// Dimension of the Lie algebra, `rank + 2 * #positive roots`.
    pub fn algebra_dim(&self) -> usize {
        self.rank + 2 * self.positive_roots.len()
    }

    /// Index of the highest root (a long root).
    pub fn highest_root_index(&self) -> usize {
        self.positive_root_coords
            .iter()
            .enumerate()
            .max_by_key(|(_, c)| c.iter().sum::<i64>())
            .map(|(i, _)| i)
            .expect("root system has positive roots")
    }

    /// Root-lattice element given in simple-root coordinates, converted to
    /// fundamental-weight coordinates.
    pub fn root_coords_to_weight(&self, coords: &[i64]) -> Weight {
        let r = self.rank;
        Weight(
            (0..r)
                .map(|i| (0..r).map(|j| coords[j] * self.cartan_matrix[j][i]).sum())
                .collect(),
        )
    }

    /// Positive roots in fundamental-weight coordinates.
    pub fn positive_root_weights(&self) -> Vec<Weight> {
        self.positive_root_coords
            .iter()
            .map(|c| self.root_coords_to_weight(c))
            .collect()
    }

    /// Simple roots in fundamental-weight coordinates (rows of the Cartan matrix).
    pub fn simple_root_weights(&self) -> Vec<Weight> {
        self.cartan_matrix.iter().map(|row| Weight(row.clone())).collect()
    }

    /// Euclidean vector of a weight.
    pub fn weight_vector(&self, w: &Weight) -> DVector<f64> {
        let mut v = DVector::zeros(self.rank);
        for (i, &c) in w.0.iter().enumerate() {
            for k in 0..self.rank {
                v[k] += c as f64 * self.fundamental_weights[i][k];
            }
        }
        v
    }

    /// Gram matrix `(omega_i, omega_j)` of the fundamental weights.
    pub fn fundamental_gram(&self) -> DMatrix<f64> {
        let r = self.rank;
        DMatrix::from_fn(r, r, |i, j| {
            Self::dot(&self.fundamental_weights[i], &self.fundamental_weights[j])
        })
    }

    /// Simple reflection `s_i` applied to a weight in fundamental coordinates.
    pub fn reflect_weight(&self, i: usize, w: &Weight) -> Weight {
        let li = w.0[i];
        Weight(
            w.0.iter()
                .enumerate()
                .map(|(k, &c)| c - li * self.cartan_matrix[i][k])
                .collect(),
        )
    }

    /// The unique dominant weight in the Weyl orbit of `w`.
    pub fn dominant_conjugate(&self, w: &Weight) -> Weight {
        let mut cur = w.clone();
        while let Some(i) = cur.0.iter().position(|&c| c < 0) {
            cur = self.reflect_weight(i, &cur);
        }
        cur
    }

    /// The Weyl orbit of a weight, sorted.
    pub fn weyl_orbit(&self, w: &Weight) -> Vec<Weight> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(w.clone());
        queue.push_back(w.clone());
        while let Some(cur) = queue.pop_front() {
            for i in 0..self.rank {
                let next = self.reflect_weight(i, &cur);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Exact coordinates of a weight in the basis of simple roots.
    pub fn root_coordinates(&self, w: &Weight) -> Result<Vec<Ratio<i64>>, RootSystemError> {
        self.check_rank(w)?;
        // lambda_i = sum_j c_j A[j][i], i.e. A^T c = lambda.
        let r = self.rank;
        let mat: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| self.cartan_matrix[j][i]).collect())
            .collect();
        Ok(solve_rational(&mat, &w.0))
    }

    pub(crate) fn check_rank(&self, w: &Weight) -> Result<(), RootSystemError> {
        if w.0.len() != self.rank {
            Err(RootSystemError::RankMismatch { rank: self.rank, got: w.0.len() })
        } else {
            Ok(())
        }
    }
}

/// Exact solve of a nonsingular integer system by rational elimination.
fn solve_rational(mat: &[Vec<i64>], rhs: &[i64]) -> Vec<Ratio<i64>> {
    let n = rhs.len();
    let mut a: Vec<Vec<Ratio<i64>>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, &b)| {
            row.iter()
                .map(|&x| Ratio::from_integer(x))
                .chain(std::iter::once(Ratio::from_integer(b)))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("Cartan matrix is nonsingular");
        a.swap(col, pivot);
        let p = a[col][col];
        for k in col..=n {
            a[col][k] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for k in col..=n {
                    let v = a[col][k] * f;
                    a[r][k] -= v;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n]).collect()
}

/// An element of the Weyl group.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylElement {
    /// Orthogonal matrix on the Euclidean realization.
    pub matrix: DMatrix<f64>,
    /// Integer action on fundamental-weight coordinates (column vectors).
    pub weight_action: DMatrix<i64>,
    /// Reduced word in simple reflections; the leftmost letter acts last.
    pub word: Vec<usize>,
    pub sign: i8,
}

impl WeylElement {
    pub fn apply_weight(&self, w: &Weight) -> Weight {
        let v = DVector::from_column_slice(&w.0);
        Weight((&self.weight_action * v).iter().copied().collect())
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }
}

fn simple_roots_for(ty: CartanType) -> Vec<Vec<f64>> {
    let s2 = 2f64.sqrt();
    match ty {
        CartanType::A(1) => vec![vec![s2]],
        CartanType::A(2) => vec![vec![s2, 0.0], vec![-s2 / 2.0, 6f64.sqrt() / 2.0]],
        CartanType::B(2) => vec![vec![1.0, -1.0], vec![0.0, 1.0]],
        CartanType::C(2) => vec![vec![1.0 / s2, -1.0 / s2], vec![0.0, s2]],
        CartanType::G2 => vec![vec![(2.0f64 / 3.0).sqrt(), 0.0], vec![-6f64.sqrt() / 2.0, s2 / 2.0]],
        _ => generic_realization(ty),
    }
}

/// Realization of the classical families from the Gram matrix of simple roots
/// by Cholesky factorization.
fn generic_realization(ty: CartanType) -> Vec<Vec<f64>> {
    let n = ty.rank();
    let mut lengths = vec![2.0; n];
    let mut links: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    match ty {
        CartanType::B(_) => lengths[n - 1] = 1.0,
        CartanType::C(_) => {
            for l in lengths.iter_mut().take(n - 1) {
                *l = 1.0;
            }
        }
        CartanType::D(_) => {
            links.pop();
            links.push((n - 3, n - 1));
        }
        _ => {}
    }
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        gram[(i, i)] = lengths[i];
    }
    for &(i, j) in &links {
        // Adjacent simple roots meet at the angle fixed by the shorter one.
        let v = -lengths[i].min(lengths[j]) / 2.0;
        let v = if (lengths[i] - lengths[j]).abs() > 0.5 { -1.0 } else { v };
        gram[(i, j)] = v;
        gram[(j, i)] = v;
    }
    let chol = gram.cholesky().expect("simple-root Gram matrix is positive definite");
    let l = chol.l();
    (0..n).map(|i| (0..n).map(|k| l[(i, k)]).collect()).collect()
}

/// Builds the root system of the given type.
pub fn build_root_system(ty: CartanType) -> Result<RootSystemSpec, RootSystemError> {
    let ty = ty.validate()?;
    let rank = ty.rank();
    let simple_roots = simple_roots_for(ty);
    let dot = RootSystemSpec::dot;

    let cartan_matrix: Vec<Vec<i64>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    let v = 2.0 * dot(&simple_roots[i], &simple_roots[j])
                        / dot(&simple_roots[j], &simple_roots[j]);
                    v.round() as i64
                })
                .collect()
        })
        .collect();

    let positive_root_coords = positive_roots_by_strings(&cartan_matrix);
    let positive_roots: Vec<Vec<f64>> = positive_root_coords
        .iter()
        .map(|c| {
            (0..rank)
                .map(|k| (0..rank).map(|i| c[i] as f64 * simple_roots[i][k]).sum())
                .collect()
        })
        .collect();
    let simple_len: Vec<f64> = simple_roots.iter().map(|r| dot(r, r)).collect();
    let positive_coroot_coords: Vec<Vec<i64>> = positive_root_coords
        .iter()
        .zip(&positive_roots)
        .map(|(c, r)| {
            let len = dot(r, r);
            c.iter()
                .zip(&simple_len)
                .map(|(&ci, &li)| (ci as f64 * li / len).round() as i64)
                .collect()
        })
        .collect();

    // <omega_i, alpha_j^vee> = delta_ij: the matrix of fundamental weights is
    // the inverse transpose of the matrix of simple coroots.
    let coroots = DMatrix::from_fn(rank, rank, |j, k| 2.0 * simple_roots[j][k] / simple_len[j]);
    let omega = coroots
        .transpose()
        .try_inverse()
        .expect("simple coroots are linearly independent");
    let fundamental_weights: Vec<Vec<f64>> =
        (0..rank).map(|i| (0..rank).map(|k| omega[(i, k)]).collect()).collect();
    let weyl_vector: Vec<f64> =
        (0..rank).map(|k| fundamental_weights.iter().map(|w| w[k]).sum()).collect();

    Ok(RootSystemSpec {
        cartan_type: ty,
        rank,
        simple_roots,
        cartan_matrix,
        positive_roots,
        positive_root_coords,
        positive_coroot_coords,
        fundamental_weights,
        weyl_vector,
    })
}

/// Positive roots in simple-root coordinates via root strings.
fn positive_roots_by_strings(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rank = cartan.len();
    let unit = |i: usize| {
        let mut v = vec![0i64; rank];
        v[i] = 1;
        v
    };
    let mut all: BTreeSet<Vec<i64>> = (0..rank).map(unit).collect();
    let mut layer: Vec<Vec<i64>> = (0..rank).map(unit).collect();
    while !layer.is_empty() {
        let mut next = BTreeSet::new();
        for beta in &layer {
            for i in 0..rank {
                if *beta == unit(i) {
                    continue;
                }
                // <beta, alpha_i^vee> = sum_j beta_j A[j][i]
                let pairing: i64 = (0..rank).map(|j| beta[j] * cartan[j][i]).sum();
                let mut p = 0;
                loop {
                    let mut down = beta.clone();
                    down[i] -= p + 1;
                    if all.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                if p - pairing > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if !all.contains(&up) {
                        next.insert(up);
                    }
                }
            }
        }
        for r in &next {
            all.insert(r.clone());
        }
        layer = next.into_iter().collect();
    }
    let mut roots: Vec<Vec<i64>> = all.into_iter().collect();
    roots.sort_by(|a, b| {
        let ha: i64 = a.iter().sum();
        let hb: i64 = b.iter().sum();
        ha.cmp(&hb).then_with(|| a.cmp(b))
    });
    roots
}

/// Enumerates the Weyl group by closure under simple reflections.
///
/// Elements are produced in breadth-first order, so every stored word is
/// reduced and the identity comes first.
pub fn generate_weyl_group(rs: &RootSystemSpec) -> Result<Vec<WeylElement>, RootSystemError> {
    generate_weyl_group_capped(rs, DEFAULT_WEYL_CAP)
}

pub fn generate_weyl_group_capped(
    rs: &RootSystemSpec,
    cap: usize,
) -> Result<Vec<WeylElement>, RootSystemError> {
    let r = rs.rank;
    let gens_f: Vec<DMatrix<f64>> = (0..r)
        .map(|i| {
            let a = DVector::from_column_slice(&rs.simple_roots[i]);
            let len = a.dot(&a);
            DMatrix::identity(r, r) - (&a * a.transpose()) * (2.0 / len)
        })
        .collect();
    let gens_i: Vec<DMatrix<i64>> = (0..r)
        .map(|i| {
            DMatrix::from_fn(r, r, |k, j| {
                let id = i64::from(k == j);
                if j == i {
                    id - rs.cartan_matrix[i][k]
                } else {
                    id
                }
            })
        })
        .collect();

    let identity = WeylElement {
        matrix: DMatrix::identity(r, r),
        weight_action: DMatrix::identity(r, r),
        word: Vec::new(),
        sign: 1,
    };
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    index.insert(identity.weight_action.iter().copied().collect(), 0);
    let mut elements = vec![identity];
    let mut head = 0;
    while head < elements.len() {
        for i in 0..r {
            let action = &gens_i[i] * &elements[head].weight_action;
            let key: Vec<i64> = action.iter().copied().collect();
            if index.contains_key(&key) {
                continue;
            }
            if elements.len() >= cap {
                return Err(RootSystemError::WeylGroupTooLarge { cap });
            }
            let parent = &elements[head];
            let mut word = Vec::with_capacity(parent.word.len() + 1);
            word.push(i);
            word.extend_from_slice(&parent.word);
            let elem = WeylElement {
                matrix: &gens_f[i] * &parent.matrix,
                weight_action: action,
                sign: -parent.sign,
                word,
            };
            index.insert(key, elements.len());
            elements.push(elem);
        }
        head += 1;
    }
    Ok(elements)
}

/// Whether `lambda` is an integer combination of simple roots.
pub fn is_in_root_lattice(rs: &RootSystemSpec, lambda: &Weight) -> bool {
    match rs.root_coordinates(lambda) {
        Ok(c) => c.iter().all(|x| x.is_integer()),
        Err(_) => false,
    }
}

/// Dominant root-lattice weights of level at most `bound`, sorted
/// lexicographically. These label the irreducible characters of the adjoint
/// group.
pub fn enumerate_adjoint_dominant_weights(rs: &RootSystemSpec, bound: usize) -> Vec<Weight> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; rs.rank];
    enumerate_rec(rs, bound as i64, 0, &mut cur, &mut out);
    out.sort();
    out
}

fn enumerate_rec(rs: &RootSystemSpec, left: i64, pos: usize, cur: &mut Vec<i64>, out: &mut Vec<Weight>) {
    if pos == cur.len() {
        let w = Weight(cur.clone());
        if is_in_root_lattice(rs, &w) {
            out.push(w);
        }
        return;
    }
    for c in 0..=left {
        cur[pos] = c;
        enumerate_rec(rs, left - c, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Floor of a rational, or -1 when it is negative.
pub(crate) fn ratio_floor_nonneg(x: &Ratio<i64>) -> i64 {
    if x.is_negative() {
        -1
    } else {
        x.floor().to_integer()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(label: &str) -> RootSystemSpec {
        build_root_system(label.parse().unwrap()).unwrap()
    }

    #[test]
    fn parses_type_labels() {
        assert_eq!("A2".parse::<CartanType>().unwrap(), CartanType::A(2));
        assert_eq!("g2".parse::<CartanType>().unwrap(), CartanType::G2);
        assert!("E8".parse::<CartanType>().is_err());
        assert!("B1".parse::<CartanType>().is_err());
        assert!("A9".parse::<CartanType>().is_err());
        assert!("".parse::<CartanType>().is_err());
    }

    #[test]
    fn positive_root_counts() {
        for (label, count) in [("A1", 1), ("A2", 3), ("B2", 4), ("C2", 4), ("G2", 6), ("A3", 6), ("B3", 9), ("C3", 9), ("D4", 12)] {
            assert_eq!(rs(label).positive_roots.len(), count, "{label}");
        }
    }

    #[test]
    fn cartan_matrices() {
        assert_eq!(rs("A1").cartan_matrix, vec![vec![2]]);
        assert_eq!(rs("A2").cartan_matrix, vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(rs("B2").cartan_matrix, vec![vec![2, -2], vec![-1, 2]]);
        assert_eq!(rs("C2").cartan_matrix, vec![vec![2, -1], vec![-2, 2]]);
        assert_eq!(rs("G2").cartan_matrix, vec![vec![2, -1], vec![-3, 2]]);
        for label in ["B3", "C4", "D5", "A6"] {
            let r = rs(label);
            for i in 0..r.rank {
                assert_eq!(r.cartan_matrix[i][i], 2);
                for j in 0..r.rank {
                    if i != j {
                        assert!(r.cartan_matrix[i][j] <= 0);
                    }
                }
            }
        }
    }

    #[test]
    fn long_roots_have_length_two() {
        for label in ["A1", "A2", "B2", "C2", "G2", "B4", "C3", "D4"] {
            let r = rs(label);
            let max = (0..r.positive_roots.len())
                .map(|i| r.root_length_sq(i))
                .fold(0.0, f64::max);
            assert!((max - 2.0).abs() < 1e-12, "{label}: {max}");
        }
    }

    #[test]
    fn weyl_vector_two_ways() {
        for label in ["A1", "A2", "B2", "C2", "G2", "A4", "B3", "D4"] {
            let r = rs(label);
            for k in 0..r.rank {
                let half: f64 = r.positive_roots.iter().map(|a| a[k]).sum::<f64>() / 2.0;
                assert!((half - r.weyl_vector[k]).abs() < 1e-12, "{label}");
            }
        }
    }

    #[test]
    fn weyl_group_orders() {
        for (label, order, even) in [("A1", 2, 1), ("A2", 6, 3), ("B2", 8, 4), ("C2", 8, 4), ("G2", 12, 6)] {
            let r = rs(label);
            let w = generate_weyl_group(&r).unwrap();
            assert_eq!(w.len(), order, "{label}");
            assert_eq!(w.iter().filter(|e| e.sign == 1).count(), even, "{label}");
            assert_eq!(w[0].word.len(), 0);
            assert_eq!(r.cartan_type.weyl_order(), order as u64);
        }
        assert_eq!(generate_weyl_group(&rs("B3")).unwrap().len(), 48);
        assert_eq!(generate_weyl_group(&rs("D4")).unwrap().len(), 192);
    }

    #[test]
    fn weyl_cap_is_enforced() {
        let err = generate_weyl_group_capped(&rs("A3"), 10).unwrap_err();
        assert_eq!(err, RootSystemError::WeylGroupTooLarge { cap: 10 });
    }

    #[test]
    fn weyl_elements_orthogonal_and_signed() {
        for label in ["A2", "B2", "G2"] {
            let r = rs(label);
            for w in generate_weyl_group(&r).unwrap() {
                let ortho = &w.matrix.transpose() * &w.matrix - DMatrix::identity(r.rank, r.rank);
                assert!(ortho.amax() < 1e-12);
                assert!((w.matrix.determinant() - f64::from(w.sign)).abs() < 1e-12);
                let parity = if w.word.len() % 2 == 0 { 1 } else { -1 };
                assert_eq!(w.sign, parity);
            }
        }
    }

    #[test]
    fn weyl_elements_permute_roots() {
        for label in ["A2", "B2", "C2", "G2"] {
            let r = rs(label);
            let roots: Vec<Weight> = r.positive_root_weights();
            let mut all: BTreeSet<Weight> = roots.iter().cloned().collect();
            for w in &roots {
                all.insert(Weight(w.0.iter().map(|c| -c).collect()));
            }
            for e in generate_weyl_group(&r).unwrap() {
                for root in &roots {
                    assert!(all.contains(&e.apply_weight(root)));
                }
                // Euclidean action agrees with the integer action.
                for (k, rv) in r.positive_roots.iter().enumerate() {
                    let img = &e.matrix * DVector::from_column_slice(rv);
                    let img_w = r.weight_vector(&e.apply_weight(&roots[k]));
                    assert!((img - img_w).amax() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn root_lattice_membership() {
        let a1 = rs("A1");
        assert!(!is_in_root_lattice(&a1, &Weight(vec![1])));
        assert!(is_in_root_lattice(&a1, &Weight(vec![2])));
        let a2 = rs("A2");
        assert!(is_in_root_lattice(&a2, &Weight(vec![1, 1])));
        assert!(!is_in_root_lattice(&a2, &Weight(vec![1, 0])));
        assert!(is_in_root_lattice(&a2, &Weight(vec![3, 0])));
        let g2 = rs("G2");
        assert!(is_in_root_lattice(&g2, &Weight(vec![1, 0])));
        for label in ["A1", "A2", "B2", "C2", "G2", "D4"] {
            let r = rs(label);
            for root in r.positive_root_weights() {
                assert!(is_in_root_lattice(&r, &root));
            }
        }
    }

    #[test]
    fn adjoint_dominant_enumeration() {
        let w = |v: Vec<i64>| Weight(v);
        assert_eq!(enumerate_adjoint_dominant_weights(&rs("A1"), 4), vec![w(vec![0]), w(vec![2]), w(vec![4])]);
        assert_eq!(enumerate_adjoint_dominant_weights(&rs("A1"), 1), vec![w(vec![0])]);
        assert_eq!(enumerate_adjoint_dominant_weights(&rs("A2"), 2), vec![w(vec![0, 0]), w(vec![1, 1])]);
    }

    #[test]
    fn adjoint_enumeration_matches_brute_force() {
        for label in ["A2", "B2", "C2", "G2", "A3"] {
            let r = rs(label);
            let got = enumerate_adjoint_dominant_weights(&r, 6);
            // Independent membership test: lambda is in the root lattice iff
            // it lies in the Z-span of the simple roots, found by scanning
            // small integer combinations.
            let simple = r.simple_root_weights();
            let mut reach = BTreeSet::new();
            let span = 20i64;
            let mut coeffs = vec![-span; r.rank];
            loop {
                let mut v = Weight::zero(r.rank);
                for (c, s) in coeffs.iter().zip(&simple) {
                    v = v.add_scaled(&s.0, *c);
                }
                if v.is_dominant() && v.level() <= 6 {
                    reach.insert(v);
                }
                let mut k = 0;
                while k < r.rank {
                    coeffs[k] += 1;
                    if coeffs[k] <= span {
                        break;
                    }
                    coeffs[k] = -span;
                    k += 1;
                }
                if k == r.rank {
                    break;
                }
            }
            let expected: Vec<Weight> = reach.into_iter().collect();
            assert_eq!(got, expected, "{label}");
        }
    }

    #[test]
    fn json_round_trip() {
        let r = rs("G2");
        let s = serde_json::to_string(&r).unwrap();
        let back: RootSystemSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(s.contains("\"cartan_type\":\"G2\""));
    }

    #[test]
    fn dominant_conjugate_and_orbits() {
        let r = rs("A2");
        assert_eq!(r.dominant_conjugate(&Weight(vec![-1, -1])), Weight(vec![1, 1]));
        assert_eq!(r.weyl_orbit(&Weight(vec![1, 1])).len(), 6);
        assert_eq!(r.weyl_orbit(&Weight(vec![0, 0])).len(), 1);
        let g2 = rs("G2");
        assert_eq!(g2.weyl_orbit(&Weight(vec![1, 1])).len(), 12);
    }
}
