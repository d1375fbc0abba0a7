//! Planar quadrature over a disc B_R with a certified tail bound.
//!
//! The rule is a tensor product: Gauss-Legendre in u = r² on [0, R²] (so
//! radial polynomials integrate exactly) times the uniform trapezoid rule in
//! angle. With `n_radial` radial nodes the rule is exact on z^j z̄^k for
//! j + k ≤ 2·n_radial − 2 and |j − k| < n_angular.

use std::f64::consts::PI;

use crate::weights::{check_growth, Weight};
use crate::{Complex64, Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_{n-1}(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Node/weight rule over the disc of radius `radius` about `center`.
#[derive(Debug, Clone)]
pub struct PlanarQuadrature {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub radius: f64,
    pub center: Complex64,
    pub n_radial: usize,
    pub n_angular: usize,
    radial_nodes: Vec<f64>,
    radial_weights: Vec<f64>,
}

/// Tensor rule: Gauss-Legendre in r² on [0, R²] times trapezoid in angle.
pub fn build_polar_rule(r: f64, n_radial: usize, n_angular: usize) -> Result<PlanarQuadrature> {
    build_polar_rule_at(Complex64::new(0.0, 0.0), r, n_radial, n_angular)
}

/// Same rule translated to an arbitrary disc center.
pub fn build_polar_rule_at(
    center: Complex64,
    r: f64,
    n_radial: usize,
    n_angular: usize,
) -> Result<PlanarQuadrature> {
    if n_radial < 2 || n_angular < 4 || !(r > 0.0) {
        return Err(Error::InvalidSize { n_radial, n_angular });
    }
    let (gl_nodes, gl_weights) = gauss_legendre(n_radial);
    // Map [-1,1] to u ∈ [0, R²]; node weight in the plane is w_gl·π/n_angular.
    let r2 = r * r;
    let radial_nodes: Vec<f64> = gl_nodes
        .iter()
        .map(|&x| (0.5 * r2 * (x + 1.0)).sqrt())
        .collect();
    let radial_weights: Vec<f64> = gl_weights.iter().map(|&w| 0.5 * r2 * w * PI).collect();
    let mut nodes = Vec::with_capacity(n_radial * n_angular);
    let mut weights = Vec::with_capacity(n_radial * n_angular);
    for (ri, wi) in radial_nodes.iter().zip(&radial_weights) {
        for j in 0..n_angular {
            let theta = 2.0 * PI * j as f64 / n_angular as f64;
            nodes.push(center + ri * Complex64::new(theta.cos(), theta.sin()));
            weights.push(wi / n_angular as f64);
        }
    }
    Ok(PlanarQuadrature {
        nodes,
        weights,
        radius: r,
        center,
        n_radial,
        n_angular,
        radial_nodes,
        radial_weights,
    })
}

/// Default rule sized for degree-n Gram matrices: exact through monomial
/// degree 2n with margin for the weight factor.
pub fn default_rule_for_degree(r: f64, n: usize) -> Result<PlanarQuadrature> {
    build_polar_rule(r, 2 * n + 16, 4 * n + 16)
}

/// Default truncation radius: three times the outer equilibrium radius,
/// never below 3.
pub fn default_radius(outer_equilibrium_radius: f64) -> f64 {
    (3.0 * outer_equilibrium_radius).max(3.0)
}

impl PlanarQuadrature {
    /// Σ weights·f(nodes).
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&z, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(z);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite(z));
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Real-valued convenience wrapper around [`integrate`].
    pub fn integrate_real<F: Fn(Complex64) -> f64>(&self, f: F) -> Result<f64> {
        Ok(self.integrate(|z| Complex64::new(f(z), 0.0))?.re)
    }

    /// Radial sub-rule: ∫ f(|z|) dV = Σ w_i·f(r_i) for radial integrands.
    pub fn radial_rule(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.radial_nodes
            .iter()
            .copied()
            .zip(self.radial_weights.iter().copied())
    }
}

/// Rigorous bound on the neglected mass ∫_{|z|>R} |z|^{2n} e^{-2nφₙ} dV,
/// valid once the growth condition is verified: the integrand is dominated
/// by |z|^{-2nε} there, giving 2π·R^{2-2nε}/(2nε − 2).
pub fn tail_bound(w: &dyn Weight, n: usize, r: f64, epsilon: f64) -> Result<f64> {
    if n as f64 * epsilon <= 1.0 {
        return Err(Error::DivergentTail { n, epsilon });
    }
    let (ok, _) = check_growth(w, n, r, epsilon);
    if !ok {
        return Err(Error::GrowthUnverified);
    }
    let e = 2.0 * n as f64 * epsilon - 2.0;
    Ok(2.0 * PI * r.powf(-e) / e)
}
