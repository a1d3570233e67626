//! Chevalley basis of a complex simple Lie algebra.
//!
//! Structure constants are fixed by choosing signs on extraspecial pairs and
//! propagating through the standard relations among the `N_{a,b}`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::root_system::RootSystemSpec;

/// Basis `h_1..h_r, e_a` for every root `a`, positive roots first.
#[derive(Debug, Clone)]
pub struct ChevalleyBasis {
    pub rank: usize,
    /// All roots in simple-root coordinates: positives, then their negatives in the same order.
    pub roots: Vec<Vec<i64>>,
    /// Coroot coordinates of the positive roots.
    pub coroots: Vec<Vec<i64>>,
    n_pos: usize,
    cartan: Vec<Vec<i64>>,
    gram: DMatrix<f64>,
    index: BTreeMap<Vec<i64>, usize>,
    /// `N_{a,b}` for ordered pairs of positive roots with `a + b` a root.
    n_pos_table: BTreeMap<(usize, usize), f64>,
}

impl ChevalleyBasis {
    pub fn new(rs: &RootSystemSpec) -> Self {
        let rank = rs.rank;
        let mut order: Vec<usize> = (0..rs.positive_root_coords.len()).collect();
        order.sort_by_key(|&i| {
            let c = &rs.positive_root_coords[i];
            (c.iter().sum::<i64>(), c.clone())
        });
        let pos: Vec<Vec<i64>> = order.iter().map(|&i| rs.positive_root_coords[i].clone()).collect();
        let coroots: Vec<Vec<i64>> = order.iter().map(|&i| rs.positive_coroot_coords[i].clone()).collect();
        let n_pos = pos.len();
        let mut roots = pos.clone();
        roots.extend(pos.iter().map(|c| c.iter().map(|x| -x).collect::<Vec<_>>()));
        let index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let gram = DMatrix::from_fn(rank, rank, |i, j| RootSystemSpec::dot(&rs.simple_roots[i], &rs.simple_roots[j]));
        let mut basis = ChevalleyBasis {
            rank,
            roots,
            coroots,
            n_pos,
            cartan: rs.cartan_matrix.clone(),
            gram,
            index,
            n_pos_table: BTreeMap::new(),
        };
        basis.fill_table();
        basis
    }

    pub fn dim(&self) -> usize {
        self.rank + self.roots.len()
    }

    pub fn n_positive(&self) -> usize {
        self.n_pos
    }

    pub fn root_index(&self, coords: &[i64]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    fn is_positive(&self, i: usize) -> bool {
        i < self.n_pos
    }

    fn negate(&self, i: usize) -> usize {
        if i < self.n_pos {
            i + self.n_pos
        } else {
            i - self.n_pos
        }
    }

    fn sum(&self, a: usize, b: usize) -> Option<usize> {
        let s: Vec<i64> = self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| x + y).collect();
        self.root_index(&s)
    }

    fn diff(&self, a: usize, b: usize) -> Option<usize> {
        self.sum(a, self.negate(b))
    }

    fn inner(&self, a: &[i64], b: &[i64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += a[i] as f64 * self.gram[(i, j)] * b[j] as f64;
            }
        }
        s
    }

    fn len_sq(&self, i: usize) -> f64 {
        self.inner(&self.roots[i], &self.roots[i])
    }

    /// Largest `p` with `b - p a` a root.
    fn string_down(&self, a: usize, b: usize) -> i64 {
        let mut p = 0;
        let mut cur: Vec<i64> = self.roots[b].clone();
        loop {
            let next: Vec<i64> = cur.iter().zip(&self.roots[a]).map(|(x, y)| x - y).collect();
            if self.root_index(&next).is_none() {
                return p;
            }
            cur = next;
            p += 1;
        }
    }

    fn fill_table(&mut self) {
        for xi in 0..self.n_pos {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for a in 0..xi {
                for b in a + 1..xi {
                    if self.sum(a, b) == Some(xi) {
                        pairs.push((a, b));
                    }
                }
            }
            let Some(&(g, d)) = pairs.first() else { continue };
            let n_gd = (self.string_down(g, d) + 1) as f64;
            self.n_pos_table.insert((g, d), n_gd);
            self.n_pos_table.insert((d, g), -n_gd);
            let xi_len = self.len_sq(xi);
            for &(a, b) in &pairs[1..] {
                let mut acc = 0.0;
                if let Some(bg) = self.diff(b, g) {
                    acc += self.n(b, self.negate(g)) * self.n(a, self.negate(d)) / self.len_sq(bg);
                }
                if let Some(ag) = self.diff(a, g) {
                    acc += self.n(self.negate(g), a) * self.n(b, self.negate(d)) / self.len_sq(ag);
                }
                let v = (xi_len / n_gd * acc).round();
                let expect = (self.string_down(a, b) + 1) as f64;
                assert_eq!(v.abs(), expect, "structure constant magnitude");
                self.n_pos_table.insert((a, b), v);
                self.n_pos_table.insert((b, a), -v);
            }
        }
    }

    /// `N_{a,b}` for roots `a, b` with `a + b` a root.
    pub fn n(&self, a: usize, b: usize) -> f64 {
        match (self.is_positive(a), self.is_positive(b)) {
            (true, true) => self.n_pos_table[&(a, b)],
            (false, false) => -self.n(self.negate(a), self.negate(b)),
            _ => {
                let s = self.sum(a, b).expect("a + b is a root");
                let c = self.negate(s);
                let cc = self.len_sq(c);
                let v = if self.is_positive(c) == self.is_positive(a) {
                    self.n(c, a) * cc / self.len_sq(b)
                } else {
                    self.n(b, c) * cc / self.len_sq(a)
                };
                v.round()
            }
        }
    }

    /// `ad` matrices of the basis elements: column `j` of `out[k]` is `[b_k, b_j]`.
    pub fn ad_matrices(&self) -> Vec<DMatrix<f64>> {
        let dim = self.dim();
        let r = self.rank;
        let mut out = vec![DMatrix::zeros(dim, dim); dim];
        // <a, alpha_i^vee> for every root a.
        let pair = |a: usize, i: usize| -> f64 {
            (0..r).map(|k| self.roots[a][k] * self.cartan[k][i]).sum::<i64>() as f64
        };
        for a in 0..self.roots.len() {
            for i in 0..r {
                let v = pair(a, i);
                out[i][(r + a, r + a)] = v;
                out[r + a][(r + a, i)] = -v;
            }
        }
        for a in 0..self.roots.len() {
            for b in 0..self.roots.len() {
                if b == self.negate(a) {
                    let (sign, p) = if self.is_positive(a) { (1.0, a) } else { (-1.0, b) };
                    for i in 0..r {
                        out[r + a][(i, r + b)] = sign * self.coroots[p][i] as f64;
                    }
                } else if let Some(s) = self.sum(a, b) {
                    out[r + a][(r + s, r + b)] = self.n(a, b);
                }
            }
        }
        out
    }
}
