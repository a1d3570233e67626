//! Compact real form of a simple Lie algebra and its adjoint group.
//!
//! The compact form is spanned by `i h_j`, `e_a - e_-a` and `i (e_a + e_-a)`
//! over a Chevalley basis, then orthonormalized for the negated Killing form
//! rescaled by `kappa_scale`. In that basis every `ad X` is skew-symmetric
//! and every `Ad g` is a rotation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::character::TorusPoint;
use crate::chevalley::ChevalleyBasis;
use crate::linalg::{expm, logm, LogError};
use crate::root_system::{CartanType, RootSystemSpec};

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("compact form construction failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Log(#[from] LogError),
}

/// Structure constants of the compact real form in an orthonormal basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompactAlgebraBasis {
    pub cartan_type: CartanType,
    pub rank: usize,
    pub dim: usize,
    /// `c[i][j][k]` with `[e_i, e_j] = sum_k c[i][j][k] e_k`.
    pub structure_constants: Vec<Vec<Vec<f64>>>,
    /// Killing form in this basis, equal to `-kappa_scale * I`.
    pub killing_gram: DMatrix<f64>,
    /// `-B(X, X)` for unit `X`.
    pub kappa_scale: f64,
    /// Columns: images of `i h_j` for the simple coroots.
    pub torus_embedding: DMatrix<f64>,
    #[serde(skip)]
    ads: Vec<DMatrix<f64>>,
}

pub type AlgebraVector = DVector<f64>;

/// `Ad(g)` as a rotation of the orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AdjointMatrix(pub DMatrix<f64>);

impl AdjointMatrix {
    pub fn identity(dim: usize) -> Self {
        AdjointMatrix(DMatrix::identity(dim, dim))
    }

    pub fn mul(&self, other: &AdjointMatrix) -> AdjointMatrix {
        AdjointMatrix(&self.0 * &other.0)
    }

    pub fn inverse(&self) -> AdjointMatrix {
        AdjointMatrix(self.0.transpose())
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.0.nrows();
        (self.0.transpose() * &self.0 - DMatrix::<f64>::identity(n, n)).amax()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

impl CompactAlgebraBasis {
    pub fn ad_basis(&self) -> &[DMatrix<f64>] {
        &self.ads
    }

    pub fn zero(&self) -> AlgebraVector {
        DVector::zeros(self.dim)
    }

    pub fn ad(&self, x: &AlgebraVector) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (k, &c) in x.iter().enumerate() {
            if c != 0.0 {
                m += &self.ads[k] * c;
            }
        }
        m
    }

    pub fn bracket(&self, x: &AlgebraVector, y: &AlgebraVector) -> AlgebraVector {
        self.ad(x) * y
    }

    /// Normalized inner product `-B(X, Y) / kappa_scale`.
    pub fn inner(&self, x: &AlgebraVector, y: &AlgebraVector) -> f64 {
        x.dot(y)
    }

    pub fn killing_norm(&self, x: &AlgebraVector) -> f64 {
        x.norm()
    }

    /// Raw Killing form `B(X, Y) = tr(ad X ad Y)`.
    pub fn killing(&self, x: &AlgebraVector, y: &AlgebraVector) -> f64 {
        (self.ad(x) * self.ad(y)).trace()
    }

    pub fn group_exp(&self, x: &AlgebraVector) -> AdjointMatrix {
        AdjointMatrix(expm(&self.ad(x)))
    }

    /// Principal logarithm, rejecting elements with a rotation angle near `pi`.
    pub fn group_log(&self, m: &AdjointMatrix) -> Result<AlgebraVector, AlgebraError> {
        let l = logm(&m.0)?;
        let y = self.coordinates_of_ad(&l);
        let residual = (self.ad(&y) - &l).amax();
        if residual > 1e-8 * l.amax().max(1.0) {
            return Err(LogError::NotInAlgebra { residual }.into());
        }
        Ok(y)
    }

    /// Coordinates of the orthogonal projection of `l` onto the image of `ad`.
    pub fn coordinates_of_ad(&self, l: &DMatrix<f64>) -> AlgebraVector {
        DVector::from_iterator(self.dim, self.ads.iter().map(|a| a.dot(l) / self.kappa_scale))
    }

    pub fn adjoint_action(&self, g: &AdjointMatrix, x: &AlgebraVector) -> AlgebraVector {
        &g.0 * x
    }

    pub fn torus_element(&self, theta: &TorusPoint) -> AlgebraVector {
        &self.torus_embedding * DVector::from_column_slice(&theta.theta)
    }

    pub fn random_vector<R: Rng + ?Sized>(&self, rng: &mut R, std: f64) -> AlgebraVector {
        DVector::from_fn(self.dim, |_, _| {
            let v: f64 = StandardNormal.sample(rng);
            std * v
        })
    }

    pub fn random_unit_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgebraVector {
        loop {
            let v = self.random_vector(rng, 1.0);
            let n = v.norm();
            if n > 1e-6 {
                return v / n;
            }
        }
    }

    /// A well-spread random group element, `exp` of a wide Gaussian.
    pub fn random_group_element<R: Rng + ?Sized>(&self, rng: &mut R) -> AdjointMatrix {
        self.group_exp(&self.random_vector(rng, 2.0))
    }

    /// Largest componentwise Jacobi residual over all basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let lhs = self.ad(&self.ads[i].column(j).into_owned());
                let rhs = &self.ads[i] * &self.ads[j] - &self.ads[j] * &self.ads[i];
                worst = worst.max((lhs - rhs).amax());
            }
        }
        worst
    }
}

/// Builds the compact real form of the given root system.
pub fn build_compact_form(rs: &RootSystemSpec) -> Result<CompactAlgebraBasis, AlgebraError> {
    let cb = ChevalleyBasis::new(rs);
    let ads_c = cb.ad_matrices();
    let n = cb.dim();
    let r = cb.rank;
    let np = cb.n_positive();
    let i_unit = Complex64::new(0.0, 1.0);

    // Columns: the compact basis in Chevalley coordinates.
    let mut frame = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..r {
        frame[(j, j)] = i_unit;
    }
    for a in 0..np {
        let (p, m) = (r + a, r + a + np);
        frame[(p, r + 2 * a)] = Complex64::new(1.0, 0.0);
        frame[(m, r + 2 * a)] = Complex64::new(-1.0, 0.0);
        frame[(p, r + 2 * a + 1)] = i_unit;
        frame[(m, r + 2 * a + 1)] = i_unit;
    }
    let frame_inv = frame
        .clone()
        .try_inverse()
        .ok_or_else(|| AlgebraError::Construction("compact frame is singular".into()))?;
    let ads_c: Vec<DMatrix<Complex64>> = ads_c.iter().map(|m| m.map(|x| Complex64::new(x, 0.0))).collect();

    let mut ads_compact = Vec::with_capacity(n);
    for k in 0..n {
        let mut ad = DMatrix::<Complex64>::zeros(n, n);
        for (c, m) in frame.column(k).iter().zip(&ads_c) {
            if *c != Complex64::new(0.0, 0.0) {
                ad += m * *c;
            }
        }
        let real = &frame_inv * ad * &frame;
        let imag = real.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if imag > 1e-10 {
            return Err(AlgebraError::Construction(format!("bracket leaves the real form ({imag:.2e})")));
        }
        ads_compact.push(real.map(|z| z.re));
    }

    let killing = DMatrix::from_fn(n, n, |i, j| (&ads_compact[i] * &ads_compact[j]).trace());
    let hr = &cb.coroots[rs_highest(&cb)];
    let h_theta = DVector::from_fn(n, |i, _| if i < r { hr[i] as f64 } else { 0.0 });
    let kappa_scale = -(h_theta.transpose() * &killing * &h_theta)[(0, 0)] / 4.0;
    if !(kappa_scale > 0.0) {
        return Err(AlgebraError::Construction("Killing form is not negative definite".into()));
    }
    let gram = -&killing / kappa_scale;
    let chol = gram
        .cholesky()
        .ok_or_else(|| AlgebraError::Construction("Killing form is not negative definite".into()))?;
    let lt = chol.l().transpose();
    let lt_inv = lt
        .clone()
        .try_inverse()
        .ok_or_else(|| AlgebraError::Construction("singular Killing form".into()))?;

    // ad of each orthonormal frame vector, in orthonormal coordinates.
    let mut ads_on = Vec::with_capacity(n);
    for i in 0..n {
        let mut ad = DMatrix::zeros(n, n);
        for k in 0..n {
            let c = lt_inv[(k, i)];
            if c != 0.0 {
                ad += &ads_compact[k] * c;
            }
        }
        ads_on.push(&lt * ad * &lt_inv);
    }
    // Enforce total antisymmetry of c_ijk = (ad_i)_{kj}.
    let mut c = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let perms = [
                    ads_on[i][(k, j)],
                    -ads_on[j][(k, i)],
                    ads_on[j][(i, k)],
                    -ads_on[k][(i, j)],
                    ads_on[k][(j, i)],
                    -ads_on[i][(j, k)],
                ];
                let v = perms.iter().sum::<f64>() / 6.0;
                c[i][j][k] = v;
                c[j][i][k] = -v;
            }
        }
    }
    let ads: Vec<DMatrix<f64>> = (0..n).map(|i| DMatrix::from_fn(n, n, |k, j| c[i][j][k])).collect();
    let torus_embedding = lt.columns(0, r).into_owned();

    let basis = CompactAlgebraBasis {
        cartan_type: rs.cartan_type,
        rank: r,
        dim: n,
        structure_constants: c,
        killing_gram: DMatrix::identity(n, n) * -kappa_scale,
        kappa_scale,
        torus_embedding,
        ads,
    };
    let jac = basis.jacobi_residual();
    if jac > 1e-10 {
        return Err(AlgebraError::Construction(format!("Jacobi residual {jac:.2e}")));
    }
    Ok(basis)
}

fn rs_highest(cb: &ChevalleyBasis) -> usize {
    (0..cb.n_positive())
        .max_by_key(|&i| cb.roots[i].iter().sum::<i64>())
        .expect("nonempty")
}

impl CompactAlgebraBasis {
    /// Rebuilds the cached `ad` matrices after deserialization.
    pub fn restore(mut self) -> Self {
        let n = self.dim;
        self.ads = (0..n)
            .map(|i| DMatrix::from_fn(n, n, |k, j| self.structure_constants[i][j][k]))
            .collect();
        self
    }
}
