//! Python module `adjlab`: root systems, characters, the compact adjoint
//! realization and the experiment entry points.
//!
//! Matrices cross the boundary as lists of rows, complex numbers as Python
//! `complex`, weights as lists of ints in fundamental-weight coordinates.

use adjlab::algebra::{build_compact_form, AdjointMatrix, CompactAlgebraBasis};
use adjlab::character::{haar_character_integral, normalized_character, weight_multiplicities, weyl_dimension, TorusPoint};
use adjlab::class_power::{
    bch_scaling_fit, class_power_identity_check, default_bch_grid, greedy_class_tuple, tangent_rank_l_n,
    ConjugacyClass, IdentityCheckOptions,
};
use adjlab::disk::{arc_constants, disk_requirement, empirical_disk_constant, pigeonhole_k, ArcSpec, PigeonholeRoute};
use adjlab::orbit::walk::{distance_to_ray, lattice_ray_walk};
use adjlab::orbit::{find_vanishing_submersive_tuple, orbit_sum, orbit_sum_rank, VanishingOptions};
use adjlab::{build_root_system, enumerate_adjoint_dominant_weights, CartanType, RootSystemSpec, Weight};
use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(r: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = r.len();
    if r.iter().any(|row| row.len() != n) {
        return Err(PyValueError::new_err("expected a square matrix"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| r[i][j]))
}

fn parse_type(label: &str) -> PyResult<CartanType> {
    label.parse().map_err(value_err)
}

fn root_system(label: &str) -> PyResult<RootSystemSpec> {
    build_root_system(parse_type(label)?).map_err(value_err)
}

/// A root system of the given Cartan type, e.g. `RootSystem("G2")`.
#[pyclass(frozen)]
struct RootSystem {
    inner: RootSystemSpec,
}

#[pymethods]
impl RootSystem {
    #[new]
    fn new(label: &str) -> PyResult<Self> {
        Ok(RootSystem { inner: root_system(label)? })
    }

    #[getter]
    fn cartan_type(&self) -> String {
        self.inner.cartan_type.to_string()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.algebra_dim()
    }

    #[getter]
    fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        self.inner.cartan_matrix.clone()
    }

    #[getter]
    fn positive_roots(&self) -> Vec<Vec<i64>> {
        self.inner.positive_root_coords.clone()
    }

    fn weyl_order(&self) -> u64 {
        self.inner.cartan_type.weyl_order()
    }

    /// Dominant root-lattice weights of level at most `bound`.
    fn dominant_weights(&self, bound: usize) -> Vec<Vec<i64>> {
        enumerate_adjoint_dominant_weights(&self.inner, bound).into_iter().map(|w| w.0).collect()
    }

    fn weyl_dimension(&self, lam: Vec<i64>) -> PyResult<u64> {
        weyl_dimension(&self.inner, &Weight(lam)).map_err(value_err)
    }

    /// Normalized character `chi(theta) / dim` with `theta` in coroot coordinates.
    fn character(&self, lam: Vec<i64>, theta: Vec<f64>) -> PyResult<(f64, f64)> {
        if theta.len() != self.inner.rank {
            return Err(PyValueError::new_err("theta has the wrong length"));
        }
        let table = weight_multiplicities(&self.inner, &Weight(lam)).map_err(value_err)?;
        let z = normalized_character(&table, &TorusPoint::new(theta)).z;
        Ok((z.re, z.im))
    }

    /// Same as `character` with the torus point given by its simple-root angles.
    fn character_at_root_angles(&self, lam: Vec<i64>, angles: Vec<f64>) -> PyResult<(f64, f64)> {
        if angles.len() != self.inner.rank {
            return Err(PyValueError::new_err("angles has the wrong length"));
        }
        let theta = TorusPoint::from_root_angles(&self.inner, &angles).theta;
        self.character(lam, theta)
    }

    fn haar_integral(&self, lam: Vec<i64>, points_per_dim: usize) -> PyResult<(f64, f64)> {
        let table = weight_multiplicities(&self.inner, &Weight(lam)).map_err(value_err)?;
        let z = haar_character_integral(&self.inner, &table, points_per_dim).map_err(value_err)?;
        Ok((z.re, z.im))
    }

    fn __repr__(&self) -> String {
        format!("RootSystem('{}')", self.inner.cartan_type)
    }
}

/// The compact real form in a Killing-orthonormal basis, with its adjoint group.
#[pyclass(frozen)]
struct LieAlgebra {
    inner: CompactAlgebraBasis,
}

#[pymethods]
impl LieAlgebra {
    #[new]
    fn new(label: &str) -> PyResult<Self> {
        let inner = build_compact_form(&root_system(label)?).map_err(value_err)?;
        Ok(LieAlgebra { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn kappa_scale(&self) -> f64 {
        self.inner.kappa_scale
    }

    fn bracket(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
        let (x, y) = (self.vector(x)?, self.vector(y)?);
        Ok(self.inner.bracket(&x, &y).iter().copied().collect())
    }

    fn killing(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.killing(&self.vector(x)?, &self.vector(y)?))
    }

    fn jacobi_residual(&self) -> f64 {
        self.inner.jacobi_residual()
    }

    /// `Ad(exp X)` as a list of rows.
    fn exp(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(&self.inner.group_exp(&self.vector(x)?).0))
    }

    fn log(&self, g: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        let m = self.matrix(&g)?;
        Ok(self.inner.group_log(&m).map_err(value_err)?.iter().copied().collect())
    }

    fn random_unit_vector(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.inner.random_unit_vector(&mut rng).iter().copied().collect()
    }

    fn random_group_element(&self, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rows(&self.inner.random_group_element(&mut rng).0)
    }

    /// `sum_i Ad(g_i) X` and the rank of its differential.
    fn orbit_sum(&self, x: Vec<f64>, gs: Vec<Vec<Vec<f64>>>) -> PyResult<(Vec<f64>, usize)> {
        let x = self.vector(x)?;
        let gs = gs.iter().map(|g| self.matrix(g)).collect::<PyResult<Vec<_>>>()?;
        Ok((orbit_sum(&x, &gs).iter().copied().collect(), orbit_sum_rank(&self.inner, &x, &gs)))
    }

    /// Searches for a vanishing orbit sum of `X` at which the sum map is submersive.
    fn find_vanishing_tuple<'py>(&self, py: Python<'py>, x: Vec<f64>, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let x = self.vector(x)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = find_vanishing_submersive_tuple(&self.inner, &x, &mut rng, &VanishingOptions::default())
            .map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("n", t.n)?;
        d.set_item("residual", t.residual)?;
        d.set_item("rank", t.rank)?;
        d.set_item("elements", t.elements.iter().map(|g| rows(&g.0)).collect::<Vec<_>>())?;
        Ok(d)
    }

    /// Rank of `L_n` for `n` random conjugates of `exp(t X)`, built greedily.
    fn greedy_rank(&self, x: Vec<f64>, t: f64, seed: u64) -> PyResult<(usize, usize)> {
        let class = ConjugacyClass::new(&self.inner, self.vector(x)?, t).map_err(value_err)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = greedy_class_tuple(&self.inner, &class, self.inner.dim, &mut rng).map_err(value_err)?;
        Ok((g.elements.len(), tangent_rank_l_n(&g.elements)))
    }

    /// Multi-start check that the identity is an interior point of `C^n`.
    fn class_power_identity_check<'py>(
        &self,
        py: Python<'py>,
        x: Vec<f64>,
        t: f64,
        n: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let class = ConjugacyClass::new(&self.inner, self.vector(x)?, t).map_err(value_err)?;
        let r = class_power_identity_check(&self.inner, &class, n, &IdentityCheckOptions { base_seed: seed, ..Default::default() });
        let d = PyDict::new(py);
        d.set_item("n", r.n)?;
        d.set_item("reachable", r.reachable)?;
        d.set_item("interior", r.interior)?;
        d.set_item("min_residual", r.min_residual)?;
        d.set_item("rank_at_best", r.rank_at_best)?;
        Ok(d)
    }

    /// Fitted exponent of the BCH remainder, `None` for commuting inputs.
    fn bch_exponent(&self, xs: Vec<Vec<f64>>) -> PyResult<Option<f64>> {
        let xs = xs.into_iter().map(|x| self.vector(x)).collect::<PyResult<Vec<_>>>()?;
        Ok(bch_scaling_fit(&self.inner, &xs, &default_bch_grid()).map_err(value_err)?.exponent)
    }
}

impl LieAlgebra {
    fn vector(&self, x: Vec<f64>) -> PyResult<DVector<f64>> {
        if x.len() != self.inner.dim {
            return Err(PyValueError::new_err(format!("expected a vector of length {}", self.inner.dim)));
        }
        Ok(DVector::from_vec(x))
    }

    fn matrix(&self, g: &[Vec<f64>]) -> PyResult<AdjointMatrix> {
        let m = from_rows(g)?;
        if m.nrows() != self.inner.dim {
            return Err(PyValueError::new_err(format!("expected a {0} x {0} matrix", self.inner.dim)));
        }
        Ok(AdjointMatrix(m))
    }
}

/// `h(z)`, the largest `c` with `z` in the disk through `c` and `1`.
#[pyfunction]
fn disk_requirement_of(z: (f64, f64)) -> PyResult<f64> {
    disk_requirement(nalgebra::Complex::new(z.0, z.1)).map_err(value_err)
}

/// Empirical disk constant over root-lattice irreps of level `<= weight_bound`.
#[pyfunction]
fn estimate_c<'py>(py: Python<'py>, label: &str, weight_bound: usize, grid: usize) -> PyResult<Bound<'py, PyDict>> {
    let rs = root_system(label)?;
    let e = empirical_disk_constant(&rs, weight_bound, grid, None).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("c_hat", e.c_hat)?;
    d.set_item("lambda", e.attaining.lambda.0.clone())?;
    d.set_item("theta", e.attaining.theta.theta.clone())?;
    d.set_item("root_angles", e.attaining_root_angles.clone())?;
    d.set_item("z", (e.attaining.z.re, e.attaining.z.im))?;
    d.set_item("irreps", e.irreps)?;
    Ok(d)
}

/// Arc constants `(m, q, delta, p, epsilon)` and the pigeonhole exponent for `x`.
#[pyfunction]
#[pyo3(signature = (x, x_lo, x_hi, b = 1))]
fn pigeonhole<'py>(py: Python<'py>, x: f64, x_lo: f64, x_hi: f64, b: u64) -> PyResult<Bound<'py, PyDict>> {
    let c = arc_constants(ArcSpec::new(x_lo, x_hi).map_err(value_err)?, b).map_err(value_err)?;
    let r = pigeonhole_k(x, &c).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("m", c.m)?;
    d.set_item("q", c.q)?;
    d.set_item("delta", c.delta)?;
    d.set_item("p", c.p)?;
    d.set_item("epsilon", c.epsilon)?;
    d.set_item("k", r.k)?;
    d.set_item("k_bound", c.k_bound())?;
    d.set_item("brute_k", r.brute_k)?;
    d.set_item("pigeonhole_route", r.route == PigeonholeRoute::Pigeonhole)?;
    Ok(d)
}

/// Points of the lattice walk toward the ray through `a` and their distances to it.
#[pyfunction]
fn lattice_walk(a: Vec<f64>, steps: usize) -> PyResult<(Vec<Vec<i64>>, Vec<f64>)> {
    let pts = lattice_ray_walk(&a, steps).map_err(value_err)?;
    let dist = pts.iter().map(|p| distance_to_ray(p, &a)).collect();
    Ok((pts, dist))
}

#[pymodule]
#[pyo3(name = "adjlab")]
fn adjlab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RootSystem>()?;
    m.add_class::<LieAlgebra>()?;
    m.add_function(wrap_pyfunction!(disk_requirement_of, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_c, m)?)?;
    m.add_function(wrap_pyfunction!(pigeonhole, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_walk, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_rows_roundtrip() {
        let m = DMatrix::from_fn(3, 3, |i, j| (3 * i + j) as f64);
        assert_eq!(from_rows(&rows(&m)).unwrap(), m);
        assert!(from_rows(&[vec![1.0, 2.0]]).is_err());
    }
}
