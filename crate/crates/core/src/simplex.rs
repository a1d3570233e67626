//! Dense two-phase simplex with Bland's rule.
//!
//! Solves `max c.x` subject to `A x = b`, `x >= 0`. Intended for the small
//! feasibility problems of the orbit lab (a few dozen rows and columns).

use nalgebra::{DMatrix, DVector};

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: DVector<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    t: DMatrix<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.t.nrows() - 1
    }

    fn cols(&self) -> usize {
        self.t.ncols() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[(r, c)];
        let ncols = self.t.ncols();
        for j in 0..ncols {
            self.t[(r, j)] /= p;
        }
        for i in 0..self.t.nrows() {
            if i != r {
                let f = self.t[(i, c)];
                if f != 0.0 {
                    for j in 0..ncols {
                        let v = self.t[(r, j)];
                        self.t[(i, j)] -= f * v;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the objective row (last row holds reduced
    /// costs, maximizing). Columns `>= allowed` never enter.
    fn optimize(&mut self, allowed: usize) -> bool {
        let m = self.rows();
        let rhs = self.cols();
        loop {
            let entering = (0..allowed).find(|&j| self.t[(m, j)] > EPS);
            let Some(c) = entering else { return true };
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..m {
                let a = self.t[(i, c)];
                if a > EPS {
                    let ratio = self.t[(i, rhs)] / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bv)) => ratio < br - EPS || (ratio <= br + EPS && self.basis[i] < bv),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                Some((_, r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn set_objective(&mut self, c: &[f64]) {
        let m = self.rows();
        let ncols = self.t.ncols();
        for j in 0..ncols {
            self.t[(m, j)] = if j < c.len() { c[j] } else { 0.0 };
        }
        for i in 0..m {
            let cb = self.t[(m, self.basis[i])];
            if cb != 0.0 {
                for j in 0..ncols {
                    let v = self.t[(i, j)];
                    self.t[(m, j)] -= cb * v;
                }
            }
        }
    }
}

pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> LpOutcome {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    // Columns: n structural, m artificial, rhs.
    let mut t = DMatrix::zeros(m + 1, n + m + 1);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = sign * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, n + m)] = sign * b[i];
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect() };

    let mut phase1 = vec![0.0; n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = -1.0;
    }
    tab.set_objective(&phase1);
    tab.optimize(n + m);
    let infeas = -tab.t[(m, n + m)];
    let scale = b.amax().max(1.0);
    if infeas.abs() > 1e-9 * scale {
        return LpOutcome::Infeasible;
    }
    // Drive artificial variables out of the basis.
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab.t[(i, j)].abs() > 1e-9) {
                tab.pivot(i, j);
                keep.push(i);
            }
        } else {
            keep.push(i);
        }
    }
    if keep.len() < m {
        let mut rows: Vec<usize> = keep.clone();
        rows.push(m);
        let t = DMatrix::from_fn(rows.len(), n + m + 1, |i, j| tab.t[(rows[i], j)]);
        let basis = keep.iter().map(|&i| tab.basis[i]).collect();
        tab = Tableau { t, basis };
    }
    let cvec: Vec<f64> = c.iter().copied().collect();
    tab.set_objective(&cvec);
    if !tab.optimize(n) {
        return LpOutcome::Unbounded;
    }
    let rhs = tab.cols();
    let mut x = DVector::zeros(n);
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.t[(i, rhs)].max(0.0);
        }
    }
    let value = c.dot(&x);
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_optimum() {
        // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6.
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 1.0, 0.0, 3.0, 1.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![4.0, 6.0]);
        let c = DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]);
        match solve(&a, &b, &c) {
            LpOutcome::Optimal { x, value } => {
                assert!((value - 2.8).abs() < 1e-12);
                assert!((x[0] - 1.6).abs() < 1e-12 && (x[1] - 1.2).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        assert_eq!(solve(&a, &DVector::from_vec(vec![-1.0]), &DVector::from_vec(vec![1.0, 0.0])), LpOutcome::Infeasible);
        let a = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        assert_eq!(solve(&a, &DVector::from_vec(vec![1.0]), &DVector::from_vec(vec![1.0, 0.0])), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let c = DVector::from_vec(vec![1.0, 0.0]);
        match solve(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example, which cycles under the textbook largest-coefficient rule.
        let a = DMatrix::from_row_slice(
            3,
            7,
            &[
                0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0, 0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0,
                1.0,
            ],
        );
        let b = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        let c = DVector::from_vec(vec![0.75, -150.0, 0.02, -6.0, 0.0, 0.0, 0.0]);
        match solve(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => assert!((value - 0.05).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }
}
