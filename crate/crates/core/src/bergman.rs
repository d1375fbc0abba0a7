//! Bergman kernel, Bergman function, normalized correlation, and the
//! numerical diagnostics quantifying the diagonal, near-diagonal, and
//! off-diagonal kernel asymptotics.
//!
//! All kernel quantities at large n are computed through the weighted basis
//! values uⱼ(z) = Pⱼ(z)e^{-nφₙ(z)}: the factors Kₙ and e^{-2nφₙ} are each
//! astronomically large/small separately, while u stays O(√n).

use std::f64::consts::PI;

use crate::orthobasis::OrthoBasis;
use crate::quadrature::{tail_bound, PlanarQuadrature};
use crate::weights::{curvature, Weight};
use crate::{Complex64, Error, Result};

/// Curvature floor and radius margin for bulk membership: the asymptotic
/// theorems need strictly positive curvature in the interior of the
/// equilibrium support, and the 0.99 margin keeps clear of edge effects.
pub const BULK_CURVATURE_FLOOR: f64 = 1e-6;
pub const BULK_RADIUS_MARGIN: f64 = 0.99;

/// Bulk membership test for the basis' weight at degree n.
pub fn in_bulk(b: &OrthoBasis, z: Complex64) -> bool {
    let lam = match curvature(b.weight.as_ref(), b.n, z) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let r1 = match b.bulk_radius {
        Some(r) => r,
        None => return false,
    };
    lam >= BULK_CURVATURE_FLOOR && z.norm() <= BULK_RADIUS_MARGIN * r1
}

/// Kₙ(z,w) = Σ Pⱼ(z)·conj(Pⱼ(w)), the raw (unweighted) kernel sum.
pub fn kernel(b: &OrthoBasis, z: Complex64, w: Complex64) -> Complex64 {
    b.values(z)
        .iter()
        .zip(&b.values(w))
        .map(|(a, c)| a * c.conj())
        .sum()
}

/// Bₙ(z) = Kₙ(z,z)e^{-2nφₙ(z)} = |u(z)|².
pub fn bergman_function(b: &OrthoBasis, z: Complex64) -> f64 {
    b.weighted_values(z).iter().map(|u| u.norm_sqr()).sum()
}

/// Normalized correlation ρₙ(z,z') = Kₙ(z,z')/√(Kₙ(z,z)Kₙ(z',z')).
pub fn correlation(b: &OrthoBasis, z: Complex64, zp: Complex64) -> Result<Complex64> {
    let uz = b.weighted_values(z);
    let uw = b.weighted_values(zp);
    let nz: f64 = uz.iter().map(|u| u.norm_sqr()).sum();
    let nw: f64 = uw.iter().map(|u| u.norm_sqr()).sum();
    if !(nz > 0.0) || !(nw > 0.0) {
        return Err(Error::DegenerateDiagonal);
    }
    let k: Complex64 = uz.iter().zip(&uw).map(|(a, c)| a * c.conj()).sum();
    Ok(k / (nz * nw).sqrt())
}

/// Diagonal Tian-Yau-Zelditch ratio n⁻¹Bₙ(z)/((2/π)λⁿ(z)); → 1 in the bulk.
pub fn tyz_ratio(b: &OrthoBasis, z: Complex64) -> Result<f64> {
    if !in_bulk(b, z) {
        return Err(Error::OutsideBulk(z));
    }
    let lam = curvature(b.weight.as_ref(), b.n, z)?;
    Ok(bergman_function(b, z) / (b.n as f64) / ((2.0 / PI) * lam))
}

/// Local normal frame at a bulk point: φₙ(z₀+ζ) − Re g(ζ) = λ|ζ|² + O(|ζ|³)
/// with g holomorphic of degree ≤ 2.
#[derive(Debug, Clone)]
pub struct NormalFrame {
    pub center: Complex64,
    /// g(ζ) = g0 + g1·ζ + g2·ζ².
    pub g0: f64,
    pub g1: Complex64,
    pub g2: Complex64,
    /// Curvature eigenvalue λⁿ(z₀).
    pub lambda: f64,
    /// εₙ = 2‖φₙ‖_{C³,B_R}·(log n)³/√n.
    pub epsilon_n: f64,
}

impl NormalFrame {
    pub fn g(&self, zeta: Complex64) -> Complex64 {
        Complex64::new(self.g0, 0.0) + self.g1 * zeta + self.g2 * zeta * zeta
    }
}

/// Build the normal frame of the basis' weight at `z0`, validating the
/// third-order Taylor residual on probe displacements.
pub fn normal_frame(w: &dyn Weight, n: usize, z0: Complex64, r_big: f64) -> Result<NormalFrame> {
    let lambda = curvature(w, n, z0)?;
    let grad = w.grad(n, z0);
    // φ_z = (φ_x − iφ_y)/2; the linear coefficient of g is 2φ_z.
    let g1 = Complex64::new(grad[0], -grad[1]);
    // φ_zz = (φ_xx − φ_yy − 2iφ_xy)/4 from second differences of eval.
    let h = 1e-4 * z0.norm().max(1.0);
    let f = |p: Complex64| w.eval(n, p);
    let ex = Complex64::new(h, 0.0);
    let ey = Complex64::new(0.0, h);
    let fxx = (f(z0 + ex) - 2.0 * f(z0) + f(z0 - ex)) / (h * h);
    let fyy = (f(z0 + ey) - 2.0 * f(z0) + f(z0 - ey)) / (h * h);
    let fxy = (f(z0 + ex + ey) - f(z0 + ex - ey) - f(z0 - ex + ey) + f(z0 - ex - ey))
        / (4.0 * h * h);
    let g2 = Complex64::new((fxx - fyy) / 4.0, -fxy / 2.0);
    let c3 = w.c3_norm_estimate(n, r_big);
    let nf = n as f64;
    let frame = NormalFrame {
        center: z0,
        g0: f(z0),
        g1,
        g2,
        lambda,
        epsilon_n: 2.0 * c3 * nf.ln().powi(3) / nf.sqrt(),
    };
    // Taylor residual check on |ζ| ≤ 0.1 probes.
    for k in 0..16 {
        let theta = 2.0 * PI * k as f64 / 16.0;
        let zeta = 0.1 * Complex64::new(theta.cos(), theta.sin());
        let resid = (f(z0 + zeta) - (frame.g(zeta)).re - lambda * zeta.norm_sqr()).abs();
        let allow = (c3 + 1.0) * zeta.norm().powi(3) + 1e-9;
        if resid > allow {
            return Err(Error::FrameInvalid(format!(
                "Taylor residual {resid:.3e} exceeds {allow:.3e} at displacement {zeta}"
            )));
        }
    }
    Ok(frame)
}

/// Near-diagonal kernel ratio in normal coordinates about the frame center,
/// normalized so the contract is convergence to 1:
///
///   n⁻¹·Kₙ(z₀+u/√n, z₀+v̄/√n)·exp(−n(g(u/√n) + conj(g(v̄/√n))))
///   ───────────────────────────────────────────────────────────  ÷ (2/π).
///              λ·exp(2λ·u·v)
pub fn near_diagonal_ratio(
    b: &OrthoBasis,
    frame: &NormalFrame,
    u: Complex64,
    v: Complex64,
) -> Result<Complex64> {
    let n = b.n as f64;
    let logn = n.ln();
    if u.norm() > logn || v.norm() > logn {
        return Err(Error::FrameInvalid(format!(
            "displacements must satisfy |u|,|v| ≤ log n = {logn:.3}"
        )));
    }
    if !in_bulk(b, frame.center) {
        return Err(Error::OutsideBulk(frame.center));
    }
    let zu = frame.center + u / n.sqrt();
    let zv = frame.center + v.conj() / n.sqrt();
    let uu = b.weighted_values(zu);
    let uv = b.weighted_values(zv);
    let kappa: Complex64 = uu.iter().zip(&uv).map(|(a, c)| a * c.conj()).sum();
    // Restore e^{+nφ} against the weighted kernel and subtract the
    // holomorphic part in the exponent; the combined exponent is O(λ(|u|²+|v|²)).
    let w = b.weight.as_ref();
    let e_u = n * (w.eval(b.n, zu) - frame.g(u / n.sqrt()));
    let e_v = n * (w.eval(b.n, zv) - frame.g(v.conj() / n.sqrt()).conj());
    let num = kappa * (e_u + e_v).exp() / n;
    let den = frame.lambda * (2.0 * frame.lambda * u * v).exp();
    Ok(num / den / (2.0 / PI))
}

/// Exponential decay fit |ρₙ| ≤ C·e^{-T√n·r} along a ray.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub c_fit: f64,
    pub t_fit: f64,
    /// Coefficient of determination of the model C·e^{-T√n·r} against the
    /// observed |ρ| values (linear scale, where the model makes its claim).
    pub r_squared: f64,
    /// Radii actually used (|ρ| above the rounding floor).
    pub radii: Vec<f64>,
}

/// Floor below which log|ρ| is rounding noise.
const RHO_FLOOR: f64 = 1e-13;

/// Fit log|ρₙ(z, z+r·d)| against −√n·r by ρ²-weighted least squares (the
/// standard weighting when an exponential model is fitted through its
/// logarithm).
pub fn offdiag_decay_fit(
    b: &OrthoBasis,
    z: Complex64,
    direction: Complex64,
    radii: &[f64],
) -> Result<DecayFit> {
    let dir = direction / direction.norm();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut used = Vec::new();
    let sqrt_n = (b.n as f64).sqrt();
    for &r in radii {
        if r <= 0.0 {
            continue;
        }
        // Only the probe points need bulk membership; the ray base may sit
        // at an isolated curvature zero (e.g. the origin of |z|^{2p}/2p).
        let zp = z + r * dir;
        if !in_bulk(b, zp) {
            return Err(Error::OutsideBulk(zp));
        }
        let rho = correlation(b, z, zp)?.norm();
        if rho > RHO_FLOOR {
            xs.push(sqrt_n * r);
            ys.push(rho.ln());
            used.push(r);
        }
    }
    if used.len() < 4 {
        return Err(Error::InsufficientPoints(used.len()));
    }
    // Weighted LS of y = logC − T·x with weights ρ².
    let ws: Vec<f64> = ys.iter().map(|y| (2.0 * y).exp()).collect();
    let sw: f64 = ws.iter().sum();
    let mx = xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(&ws).map(|(x, w)| w * (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .zip(&ws)
        .map(|((x, y), w)| w * (x - mx) * (y - my))
        .sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // Goodness of fit is judged on |ρ| itself: the ρ²-weighted log regression
    // is the standard linearization of least squares for C·e^{-T·x}, so the
    // residuals that matter are the linear-scale ones.
    let rhos: Vec<f64> = ys.iter().map(|y| y.exp()).collect();
    let mean_rho = rhos.iter().sum::<f64>() / rhos.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, rho) in xs.iter().zip(&rhos) {
        let fit = (intercept + slope * x).exp();
        ss_res += (rho - fit) * (rho - fit);
        ss_tot += (rho - mean_rho) * (rho - mean_rho);
    }
    Ok(DecayFit {
        c_fit: intercept.exp(),
        t_fit: -slope,
        r_squared: 1.0 - ss_res / ss_tot,
        radii: used,
    })
}

/// ∫Bₙ dV against dim 𝒫ₙ = n+1; requires a verified tail certificate below
/// 1e-8 (the growth margin is searched over a grid of ε).
pub fn density_check(b: &OrthoBasis, q: &PlanarQuadrature) -> Result<(f64, usize)> {
    let mut best = f64::INFINITY;
    for &eps in &[8.0, 4.0, 2.0, 1.0, 0.5] {
        if let Ok(t) = tail_bound(b.weight.as_ref(), b.n, q.radius, eps) {
            best = best.min(t);
        }
    }
    if !(best < 1e-8) {
        return Err(Error::GrowthUnverified);
    }
    let mut total = 0.0;
    for (&z, &w) in q.nodes.iter().zip(&q.weights) {
        total += w * bergman_function(b, z);
    }
    Ok((total, b.n + 1))
}

/// Gaussian-weight kernel oracle: for φ = |z|²/2 the kernel is the truncated
/// exponential Kₙ(z,w) = (n/π)·Σ_{k≤n}(n·z·w̄)^k/k!. Test reference only.
pub fn gaussian_kernel_oracle(n: usize, z: Complex64, w: Complex64) -> Complex64 {
    let arg = n as f64 * z * w.conj();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..=n {
        term *= arg / k as f64;
        sum += term;
    }
    sum * (n as f64 / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthobasis::build_onb;
    use crate::quadrature::{build_polar_rule, default_radius, default_rule_for_degree};
    use crate::weights::{Gaussian, Power, WeightSequence};
    use std::sync::Arc;

    fn gaussian_basis(n: usize) -> OrthoBasis {
        let w: WeightSequence = Arc::new(Gaussian { scale: 0.5 });
        let q = default_rule_for_degree(default_radius(1.0), n).unwrap();
        build_onb(&q, &w, n).unwrap()
    }

    #[test]
    fn kernel_examples_n2() {
        let b = gaussian_basis(2);
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let k00 = kernel(&b, zero, zero);
        assert!((k00.re - 2.0 / PI).abs() < 1e-6, "{k00}");
        let k11 = kernel(&b, one, one);
        assert!((k11.re - 10.0 / PI).abs() < 1e-5, "{k11}");
        // Against the truncated-exponential oracle.
        let orc = gaussian_kernel_oracle(2, one, one);
        assert!((k11 - orc).norm() < 1e-5);
    }

    #[test]
    fn kernel_hermitian_exactly() {
        let b = gaussian_basis(6);
        let z = Complex64::new(0.4, 0.3);
        let w = Complex64::new(-0.2, 0.5);
        let diff = kernel(&b, z, w) - kernel(&b, w, z).conj();
        assert_eq!(diff.norm(), 0.0);
    }

    #[test]
    fn bergman_function_at_origin() {
        let b = gaussian_basis(10);
        let v = bergman_function(&b, Complex64::new(0.0, 0.0));
        assert!((v - 10.0 / PI).abs() < 1e-9, "{v}");
    }

    #[test]
    fn correlation_examples() {
        let b = gaussian_basis(2);
        let z = Complex64::new(0.37, -0.11);
        let rho = correlation(&b, z, z).unwrap();
        assert!((rho - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let r01 = correlation(&b, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
            .unwrap()
            .norm();
        assert!((r01 - 2.0 / 20.0f64.sqrt()).abs() < 1e-6, "{r01}");
    }

    #[test]
    fn correlation_bounded_by_one() {
        let b = gaussian_basis(12);
        for k in 0..40 {
            let z = Complex64::new(0.05 * k as f64 - 1.0, 0.3);
            let zp = Complex64::new(0.4, -0.05 * k as f64);
            let rho = correlation(&b, z, zp).unwrap().norm();
            assert!(rho <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn tyz_exact_at_origin() {
        for n in [5, 25, 60] {
            let b = gaussian_basis(n);
            let v = tyz_ratio(&b, Complex64::new(0.0, 0.0)).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "n={n}: {v}");
        }
    }

    #[test]
    fn tyz_outside_bulk_rejected() {
        let b = gaussian_basis(10);
        assert!(matches!(
            tyz_ratio(&b, Complex64::new(1.5, 0.0)),
            Err(Error::OutsideBulk(_))
        ));
        // Quartic weight has vanishing curvature at the origin.
        let w: WeightSequence = Arc::new(Power { p: 2 });
        let q = default_rule_for_degree(3.0, 10).unwrap();
        let bq = build_onb(&q, &w, 10).unwrap();
        assert!(matches!(
            tyz_ratio(&bq, Complex64::new(0.0, 0.0)),
            Err(Error::OutsideBulk(_))
        ));
    }

    #[test]
    fn near_diagonal_reduces_to_tyz_at_zero() {
        let b = gaussian_basis(40);
        let frame = normal_frame(b.weight.as_ref(), 40, Complex64::new(0.0, 0.0), 3.0).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let ratio = near_diagonal_ratio(&b, &frame, zero, zero).unwrap();
        let tyz = tyz_ratio(&b, zero).unwrap();
        assert!((ratio.re - tyz).abs() < 1e-10);
        assert!(ratio.im.abs() < 1e-12);
    }

    #[test]
    fn near_diagonal_swap_conjugate_symmetry() {
        let b = gaussian_basis(50);
        let frame = normal_frame(b.weight.as_ref(), 50, Complex64::new(0.1, 0.0), 3.0).unwrap();
        let u = Complex64::new(0.7, 0.2);
        let v = Complex64::new(-0.3, 0.5);
        let a = near_diagonal_ratio(&b, &frame, u, v).unwrap();
        let c = near_diagonal_ratio(&b, &frame, v, u).unwrap();
        assert!((a - c.conj()).norm() < 1e-9 * a.norm());
    }

    #[test]
    fn near_diagonal_matches_oracle_at_n100() {
        let b = gaussian_basis(100);
        let frame = normal_frame(b.weight.as_ref(), 100, Complex64::new(0.0, 0.0), 3.0).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let ratio = near_diagonal_ratio(&b, &frame, one, one).unwrap();
        assert!((ratio - Complex64::new(1.0, 0.0)).norm() < 0.05, "{ratio}");
    }

    #[test]
    fn decay_fit_positive_and_tight() {
        for n in [25usize, 50] {
            let b = gaussian_basis(n);
            let radii: Vec<f64> = (0..16).map(|i| 0.1 + 0.7 * i as f64 / 15.0).collect();
            let fit =
                offdiag_decay_fit(&b, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), &radii)
                    .unwrap();
            assert!(fit.t_fit > 0.0);
            assert!(fit.r_squared > 0.9, "n={n}: r²={}", fit.r_squared);
        }
    }

    #[test]
    fn decay_fit_needs_enough_points() {
        let b = gaussian_basis(25);
        let radii = [0.1, 0.2, 0.3];
        assert!(matches!(
            offdiag_decay_fit(&b, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), &radii),
            Err(Error::InsufficientPoints(3))
        ));
    }

    #[test]
    fn correlation_oracle_gaussian() {
        // |ρ(0, r)| ≈ e^{-n r²/2} for the Gaussian weight.
        let b = gaussian_basis(50);
        let r = 0.5;
        let rho = correlation(&b, Complex64::new(0.0, 0.0), Complex64::new(r, 0.0))
            .unwrap()
            .norm();
        let expect = (-50.0 * r * r / 2.0f64).exp();
        assert!((rho - expect).abs() < 1e-3 * expect, "{rho} vs {expect}");
    }

    #[test]
    fn density_matches_dimension() {
        for n in [5usize, 10] {
            let b = gaussian_basis(n);
            let q = default_rule_for_degree(default_radius(1.0), n).unwrap();
            let (integral, expected) = density_check(&b, &q).unwrap();
            assert_eq!(expected, n + 1);
            assert!(
                (integral - expected as f64).abs() < 1e-6 * expected as f64,
                "n={n}: {integral}"
            );
        }
    }

    #[test]
    fn reproducing_property_on_monomials() {
        let n = 8;
        let b = gaussian_basis(n);
        let q = default_rule_for_degree(default_radius(1.0), n).unwrap();
        let z = Complex64::new(0.3, 0.2);
        for deg in [0usize, 1, 3, 8] {
            let lhs = q
                .integrate(|zeta| {
                    kernel(&b, z, zeta)
                        * zeta.powi(deg as i32)
                        * (-2.0 * n as f64 * b.weight.eval(n, zeta)).exp()
                })
                .unwrap();
            let rhs = z.powi(deg as i32);
            assert!(
                (lhs - rhs).norm() < 1e-6 * rhs.norm().max(1.0),
                "deg={deg}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn kernel_matrix_positive_semidefinite() {
        let b = gaussian_basis(15);
        let pts: Vec<Complex64> = (0..9)
            .map(|k| Complex64::new(0.2 * (k % 3) as f64 - 0.2, 0.2 * (k / 3) as f64 - 0.2))
            .collect();
        let m = pts.len();
        let mut a = crate::linalg::CMatrix::zeros(m, m);
        for i in 0..m {
            let ui = b.weighted_values(pts[i]);
            for j in 0..m {
                let uj = b.weighted_values(pts[j]);
                let k: Complex64 = ui.iter().zip(&uj).map(|(x, y)| x * y.conj()).sum();
                a.set(i, j, k);
            }
        }
        let (evals, _) = crate::linalg::hermitian_eigen(&a);
        let trace: f64 = (0..m).map(|i| a.get(i, i).re).sum();
        assert!(evals[0] > -1e-8 * trace, "min eig {} trace {trace}", evals[0]);
    }

    #[test]
    fn tyz_improves_with_n() {
        // Monotone-improvement smoke test at a fixed bulk point.
        let z = Complex64::new(0.8, 0.0);
        for (wa, wb) in [
            (gaussian_basis(25), gaussian_basis(50)),
        ] {
            let e1 = (tyz_ratio(&wa, z).unwrap() - 1.0).abs();
            let e2 = (tyz_ratio(&wb, z).unwrap() - 1.0).abs();
            assert!(e2 < e1, "{e1} -> {e2}");
        }
    }

    #[test]
    fn extremal_inequality_for_random_samples() {
        use rand::Rng;
        let n = 12;
        let b = gaussian_basis(n);
        let q = default_rule_for_degree(default_radius(1.0), n).unwrap();
        let mut rng = crate::rng::trial_rng(7, 0);
        let probes = [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.1),
            Complex64::new(-0.3, 0.6),
        ];
        for _ in 0..100 {
            let c: Vec<Complex64> = (0..=n)
                .map(|_| {
                    let re: f64 = rng.sample(rand_distr::StandardNormal);
                    let im: f64 = rng.sample(rand_distr::StandardNormal);
                    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                })
                .collect();
            // ‖f‖² under the weighted norm via orthonormality = |c|².
            let norm2: f64 = c.iter().map(|x| x.norm_sqr()).sum();
            let _ = &q;
            for &z in &probes {
                let u = b.weighted_values(z);
                let fz: Complex64 = c.iter().zip(&u).map(|(a, p)| a * p).sum();
                let lhs = fz.norm_sqr() / norm2;
                let bn = bergman_function(&b, z);
                assert!(lhs <= bn * (1.0 + 1e-10), "{lhs} vs {bn}");
            }
        }
    }
}
