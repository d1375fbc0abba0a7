//! Python bindings: weight families, orthonormal bases, Bergman kernel
//! diagnostics, random-polynomial zeros, and Monte-Carlo CLT ensembles.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bzl_core::bergman;
use bzl_core::cltlab;
use bzl_core::orthobasis::{build_onb, OrthoBasis};
use bzl_core::quadrature::{build_polar_rule, build_polar_rule_at, default_radius};
use bzl_core::rng::trial_rng;
use bzl_core::weights::{
    check_hypotheses, equilibrium_radial, Disc, Gaussian, GaussianBump, Power, SinPerturbed,
    WeightSequence,
};
use bzl_core::zerostats::{
    find_roots, linear_statistic, linear_statistic_log, sample_polynomial, TestFunction,
};
use bzl_core::Complex64;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A weight sequence φₙ.
#[pyclass(name = "Weight", frozen)]
struct PyWeight {
    inner: WeightSequence,
}

#[pymethods]
impl PyWeight {
    /// φ(z) = scale·|z|².
    #[staticmethod]
    #[pyo3(signature = (scale = 0.5))]
    fn gaussian(scale: f64) -> Self {
        PyWeight { inner: Arc::new(Gaussian { scale }) }
    }

    /// φ(z) = |z|^{2p}/(2p).
    #[staticmethod]
    fn power(p: u32) -> Self {
        PyWeight { inner: Arc::new(Power { p }) }
    }

    /// φₙ(z) = |z|²/2 + n^{amp_exponent}·bump(z).
    #[staticmethod]
    #[pyo3(signature = (amp_exponent, center = Complex64::new(0.5, 0.0), radius = 0.3))]
    fn gaussian_bump(amp_exponent: f64, center: Complex64, radius: f64) -> Self {
        PyWeight { inner: Arc::new(GaussianBump { amp_exponent, center, radius }) }
    }

    /// φₙ(z) = |z|²/2 + sin(√n·Re z) — violates the CLT hypotheses.
    #[staticmethod]
    fn sin_perturbed() -> Self {
        PyWeight { inner: Arc::new(SinPerturbed) }
    }

    fn eval(&self, n: usize, z: Complex64) -> f64 {
        self.inner.eval(n, z)
    }

    fn curvature(&self, n: usize, z: Complex64) -> f64 {
        self.inner.hessian_zzbar(n, z)
    }

    /// (inner_radius, outer_radius) of the equilibrium support.
    fn equilibrium_radii(&self, n: usize) -> PyResult<(f64, f64)> {
        let eq = equilibrium_radial(&self.inner, n).map_err(err)?;
        Ok((eq.inner_radius, eq.outer_radius))
    }

    /// Check the CLT hypotheses over a degree schedule; returns a dict.
    fn check_hypotheses<'py>(
        &self,
        py: Python<'py>,
        n_list: Vec<usize>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let u = Disc { center: Complex64::new(0.0, 0.0), radius: 0.6 };
        let r = check_hypotheses(self.inner.as_ref(), &n_list, u, 3.0, 1.0).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("growth_ok", r.growth_ok)?;
        d.set_item("growth_margin", r.growth_margin)?;
        d.set_item("c3_trend_ok", r.c3_trend_ok)?;
        d.set_item("ellipticity_c", r.ellipticity_c)?;
        d.set_item("ellipticity_a", r.ellipticity_a)?;
        d.set_item("single_weight", r.single_weight)?;
        d.set_item("all_ok", r.all_ok)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Weight({})", self.inner.describe())
    }
}

/// Orthonormal polynomial basis for (weight, n).
#[pyclass(name = "Basis", frozen)]
struct PyBasis {
    inner: Arc<OrthoBasis>,
}

#[pymethods]
impl PyBasis {
    #[new]
    fn new(weight: &PyWeight, n: usize) -> PyResult<Self> {
        let w = weight.inner.clone();
        let r = default_radius(w.equilibrium_radius_hint(n).unwrap_or(1.0));
        let q = build_polar_rule(r, 2 * n + 16, 4 * n + 16).map_err(err)?;
        Ok(PyBasis { inner: Arc::new(build_onb(&q, &w, n).map_err(err)?) })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.d_n
    }

    #[getter]
    fn condition_estimate(&self) -> f64 {
        self.inner.cond_estimate
    }

    /// Kₙ(z, w).
    fn kernel(&self, z: Complex64, w: Complex64) -> Complex64 {
        bergman::kernel(&self.inner, z, w)
    }

    /// Bₙ(z) = Kₙ(z,z)e^{−2nφₙ(z)}.
    fn bergman_function(&self, z: Complex64) -> f64 {
        bergman::bergman_function(&self.inner, z)
    }

    /// ρₙ(z, w).
    fn correlation(&self, z: Complex64, w: Complex64) -> PyResult<Complex64> {
        bergman::correlation(&self.inner, z, w).map_err(err)
    }

    /// n⁻¹Bₙ(z)/((2/π)λ(z)); converges to 1 in the bulk.
    fn tyz_ratio(&self, z: Complex64) -> PyResult<f64> {
        bergman::tyz_ratio(&self.inner, z).map_err(err)
    }

    fn in_bulk(&self, z: Complex64) -> bool {
        bergman::in_bulk(&self.inner, z)
    }

    /// Roots of one sampled Gaussian random polynomial.
    fn sample_roots(&self, seed: u64, trial: u64) -> PyResult<Vec<Complex64>> {
        let mut rng = trial_rng(seed, trial);
        let f = sample_polynomial(&self.inner, &mut rng);
        Ok(find_roots(&f).map_err(err)?.roots)
    }

    /// (root-sum statistic, log-integral statistic) of one sample for a
    /// bump test function — the Poincaré-Lelong cross-check.
    fn dual_statistics(
        &self,
        seed: u64,
        trial: u64,
        center: Complex64,
        radius: f64,
    ) -> PyResult<(f64, f64)> {
        let phi = TestFunction::bump(center, radius);
        let q = build_polar_rule_at(center, radius, 96, 192).map_err(err)?;
        let mut rng = trial_rng(seed, trial);
        let f = sample_polynomial(&self.inner, &mut rng);
        let zs = find_roots(&f).map_err(err)?;
        let s1 = linear_statistic(&zs, &phi);
        let s2 = linear_statistic_log(&f, &phi, &q).map_err(err)?;
        Ok((s1, s2))
    }
}

/// Monte-Carlo ensemble of the linear statistic; returns the summary dict.
#[pyfunction]
#[pyo3(signature = (weight, n, trials, seed, center = Complex64::new(0.0, 0.0), radius = 0.6))]
fn run_ensemble<'py>(
    py: Python<'py>,
    weight: &PyWeight,
    n: usize,
    trials: usize,
    seed: u64,
    center: Complex64,
    radius: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let phi = TestFunction::bump(center, radius);
    let s = cltlab::run_ensemble(&weight.inner, &phi, n, trials, seed).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n", s.n)?;
    d.set_item("trials", s.trials)?;
    d.set_item("mean", s.mean)?;
    d.set_item("variance", s.variance)?;
    d.set_item("skewness", s.skewness)?;
    d.set_item("excess_kurtosis", s.excess_kurtosis)?;
    d.set_item("ks_statistic", s.ks_statistic)?;
    d.set_item("ks_p", s.ks_p)?;
    d.set_item("standardized", s.standardized)?;
    Ok(d)
}

/// sup_z ∫|ρₙ(z,·)| over a disc — Sodin-Tsirelson condition (c1).
#[pyfunction]
#[pyo3(signature = (basis, center, radius, grid_size = 8))]
fn condition_c1(basis: &PyBasis, center: Complex64, radius: f64, grid_size: usize) -> PyResult<f64> {
    let x = Disc { center, radius };
    cltlab::st_condition_c1(&basis.inner, &x, grid_size).map_err(err)
}

#[pymodule]
fn bzl_py(_py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWeight>()?;
    m.add_class::<PyBasis>()?;
    m.add_function(wrap_pyfunction!(run_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(condition_c1, m)?)?;
    Ok(())
}
