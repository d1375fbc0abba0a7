//! Independent-oracle suite: every derived reference value used by the
//! acceptance tests is first reproduced here by its stated closed-form or
//! independent-route oracle, before being asserted against the main
//! implementation. Oracles covered: Gaussian moments π·k!/n^{k+1}, the
//! truncated-exponential kernel, the Gaussian correlation law e^{−nr²/2},
//! Green's identity for the logarithmic potential, and Vieta's formulas.

use std::f64::consts::PI;
use std::sync::Arc;

use bzl_core::bergman::{correlation, gaussian_kernel_oracle, kernel};
use bzl_core::orthobasis::{build_onb, OrthoBasis};
use bzl_core::quadrature::{build_polar_rule, build_polar_rule_at, default_rule_for_degree};
use bzl_core::weights::{Gaussian, WeightSequence};
use bzl_core::zerostats::{roots_of, TestFunction};
use bzl_core::Complex64;

fn gaussian_basis(n: usize) -> OrthoBasis {
    let w: WeightSequence = Arc::new(Gaussian { scale: 0.5 });
    let q = default_rule_for_degree(3.0, n).unwrap();
    build_onb(&q, &w, n).unwrap()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Oracle 1: ∫|z|^{2k}e^{−n|z|²}dV = π·k!/n^{k+1}, reproduced by raw
/// quadrature with no basis machinery involved.
#[test]
fn gaussian_moment_oracle_reproduced_by_quadrature() {
    let q = build_polar_rule(4.0, 96, 32).unwrap();
    for n in [2usize, 5, 10] {
        for k in 0..=5 {
            let direct = q
                .integrate_real(|z| z.norm_sqr().powi(k as i32) * (-(n as f64) * z.norm_sqr()).exp())
                .unwrap();
            let oracle = PI * factorial(k) / (n as f64).powi(k as i32 + 1);
            assert!(
                (direct - oracle).abs() < 1e-8 * oracle,
                "n={n} k={k}: {direct} vs {oracle}"
            );
        }
    }
}

/// Oracle 1 consequence: basis norms σₖ² = π·k!/n^{k+1}, so P₀ = √(n/π) and
/// |P₃(1)| = √(n⁴/(π·3!)).
#[test]
fn basis_norms_match_moment_oracle() {
    let b = gaussian_basis(10);
    let p = b.values(Complex64::new(1.0, 0.0));
    assert!((p[0].norm() - (10.0 / PI).sqrt()).abs() < 1e-8);
    let p3 = (1e4 / (PI * 6.0)).sqrt();
    assert!((p[3].norm() - p3).abs() < 1e-6 * p3);
}

/// Oracle 2: the truncated-exponential kernel (n/π)Σ_{k≤n}(nzw̄)^k/k!
/// matches the quadrature-built kernel everywhere tested.
#[test]
fn truncated_exponential_kernel_oracle() {
    for n in [2usize, 10, 40] {
        let b = gaussian_basis(n);
        for (z, w) in [
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
            (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
            (Complex64::new(0.3, 0.4), Complex64::new(-0.2, 0.6)),
        ] {
            let main = kernel(&b, z, w);
            let oracle = gaussian_kernel_oracle(n, z, w);
            // At n=2 the Gram integrals truncated at R=3 carry a real tail
            // Γ(k+1, nR²) of ~1e-6 relative; the oracle has no truncation.
            assert!(
                (main - oracle).norm() < 1e-5 * oracle.norm().max(1.0),
                "n={n}: {main} vs {oracle}"
            );
        }
    }
    // The two pinned n=2 values: K(0,0) = 2/π, K(1,1) = 10/π.
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    assert!((gaussian_kernel_oracle(2, zero, zero).re - 2.0 / PI).abs() < 1e-14);
    assert!((gaussian_kernel_oracle(2, one, one).re - 10.0 / PI).abs() < 1e-14);
    // And the derived correlation value |ρ(0,1)| = 2/√20.
    let rho = correlation(&gaussian_basis(2), zero, one).unwrap().norm();
    assert!((rho - 2.0 / 20.0f64.sqrt()).abs() < 1e-6);
}

/// Oracle 3: Gaussian correlation law |ρₙ(0,r)| = e^{−nr²/2}; integrating
/// the law gives ∫e^{−nr²/2}·2πr dr = 2π/n, the (c1) reference.
#[test]
fn gaussian_correlation_law_and_c1_reference() {
    let n = 50;
    let b = gaussian_basis(n);
    for r in [0.1, 0.3, 0.5, 0.7] {
        let rho = correlation(&b, Complex64::new(0.0, 0.0), Complex64::new(r, 0.0))
            .unwrap()
            .norm();
        let law = (-(n as f64) * r * r / 2.0).exp();
        assert!((rho - law).abs() < 1e-3 * law, "r={r}: {rho} vs {law}");
    }
    // Quadrature of the law itself reproduces 2π/n.
    let q = build_polar_rule(2.0, 128, 16).unwrap();
    let integral = q
        .integrate_real(|z| (-(n as f64) * z.norm_sqr() / 2.0).exp())
        .unwrap();
    let oracle = 2.0 * PI / n as f64;
    assert!((integral - oracle).abs() < 1e-8 * oracle, "{integral} vs {oracle}");
}

/// Oracle 4: Green's identity (1/2π)∫log|z−a|ΔΦ dV = Φ(a), evaluated by raw
/// quadrature on the analytic ΔΦ — no polynomial sampling involved.
#[test]
fn greens_identity_oracle() {
    let phi = TestFunction::bump(Complex64::new(0.0, 0.0), 0.4);
    let q = build_polar_rule_at(phi.support_center, phi.support_radius, 512, 128).unwrap();
    for a in [Complex64::new(0.0, 0.0), Complex64::new(0.1, -0.05)] {
        let v = q
            .integrate_real(|z| (z - a).norm().max(1e-300).ln() * (phi.laplacian)(z))
            .unwrap()
            / (2.0 * PI);
        let expect = (phi.value)(a);
        assert!((v - expect).abs() < 1e-4, "a={a}: {v} vs {expect}");
    }
    // Compact support kills harmonic additions: log|5| contributes nothing.
    let c = q
        .integrate_real(|z| 5.0f64.ln() * (phi.laplacian)(z))
        .unwrap()
        / (2.0 * PI);
    assert!(c.abs() < 1e-8, "{c}");
}

/// Oracle 5: Vieta — for known factored polynomials the root finder returns
/// exactly the coefficient identities it is later tested against.
#[test]
fn vieta_oracle_on_known_factorizations() {
    // (z−2)(z+3)(z−i) expanded: z³ + (1−i)z² + (−6−i)z + 6i.
    let coeffs = [
        Complex64::new(0.0, 6.0),
        Complex64::new(-6.0, -1.0),
        Complex64::new(1.0, -1.0),
        Complex64::new(1.0, 0.0),
    ];
    let zs = roots_of(&coeffs).unwrap();
    let sum: Complex64 = zs.roots.iter().sum();
    let expect = -coeffs[2] / coeffs[3];
    assert!((sum - expect).norm() < 1e-10, "{sum} vs {expect}");
    let prod: Complex64 = zs.roots.iter().product();
    let expect_p = -coeffs[0] / coeffs[3];
    assert!((prod - expect_p).norm() < 1e-10, "{prod} vs {expect_p}");
    for target in [
        Complex64::new(2.0, 0.0),
        Complex64::new(-3.0, 0.0),
        Complex64::new(0.0, 1.0),
    ] {
        let d = zs.roots.iter().map(|r| (r - target).norm()).fold(f64::MAX, f64::min);
        assert!(d < 1e-12, "missing root {target}");
    }
}
