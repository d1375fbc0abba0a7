//! Weight sequences φₙ, their derivatives and curvature, hypothesis checks,
//! and equilibrium potentials for radial weights.

use std::sync::Arc;

use crate::{Complex64, Error, Result};

/// A closed disc in the plane.
#[derive(Debug, Clone, Copy)]
pub struct Disc {
    pub center: Complex64,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Disc { center, radius }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

/// A sequence of weight functions φₙ on the plane.
///
/// Implementations may be a single fixed weight (`varying() == false`) or a
/// genuinely n-dependent family. Derivative methods default to Richardson-
/// extrapolated central differences; analytic overrides are preferred where
/// available since several diagnostics compare against them at 1e-10 scale.
pub trait Weight: Send + Sync {
    fn eval(&self, n: usize, z: Complex64) -> f64;

    /// ∇φₙ(z) as (∂x, ∂y).
    fn grad(&self, n: usize, z: Complex64) -> [f64; 2] {
        fd_grad(&|p| self.eval(n, p), z)
    }

    /// φₙ,_{zz̄}(z) = Δφₙ(z)/4, the curvature eigenvalue λⁿ(z).
    fn hessian_zzbar(&self, n: usize, z: Complex64) -> f64 {
        fd_hessian_zzbar(&|p| self.eval(n, p), z)
    }

    /// Upper estimate of the C³ seminorm of φₙ on the disc of radius `r`.
    fn c3_norm_estimate(&self, n: usize, r: f64) -> f64 {
        fd_c3_norm(&|p| self.eval(n, p), r)
    }

    /// True when φₙ(z) depends only on |z| for every n.
    fn radial(&self) -> bool;

    /// False when φₙ = φ for all n (single-weight regime).
    fn varying(&self) -> bool;

    /// Outer radius of the equilibrium support, where known. Radial weights
    /// compute it; small perturbations of a radial weight may return the
    /// radius of the unperturbed weight as a working value.
    fn equilibrium_radius_hint(&self, n: usize) -> Option<f64> {
        let _ = n;
        None
    }

    fn describe(&self) -> String;
}

/// Shared handle to a weight sequence; immutable, safe across threads.
pub type WeightSequence = Arc<dyn Weight>;

const FD_STEP: f64 = 1e-4;

fn fd_step(z: Complex64) -> f64 {
    FD_STEP * z.norm().max(1.0)
}

/// Central-difference gradient, Richardson-extrapolated once.
pub fn fd_grad(f: &dyn Fn(Complex64) -> f64, z: Complex64) -> [f64; 2] {
    let h = fd_step(z);
    let d = |h: f64| {
        let dx = (f(z + Complex64::new(h, 0.0)) - f(z - Complex64::new(h, 0.0))) / (2.0 * h);
        let dy = (f(z + Complex64::new(0.0, h)) - f(z - Complex64::new(0.0, h))) / (2.0 * h);
        [dx, dy]
    };
    let a = d(h);
    let b = d(h / 2.0);
    [
        (4.0 * b[0] - a[0]) / 3.0,
        (4.0 * b[1] - a[1]) / 3.0,
    ]
}

/// Centered second-difference Laplacian over 4, Richardson-extrapolated once.
pub fn fd_hessian_zzbar(f: &dyn Fn(Complex64) -> f64, z: Complex64) -> f64 {
    let h = fd_step(z);
    let lap = |h: f64| {
        (f(z + Complex64::new(h, 0.0))
            + f(z - Complex64::new(h, 0.0))
            + f(z + Complex64::new(0.0, h))
            + f(z - Complex64::new(0.0, h))
            - 4.0 * f(z))
            / (h * h)
    };
    let a = lap(h);
    let b = lap(h / 2.0);
    (4.0 * b - a) / 3.0 / 4.0
}

/// Max third-order central difference over a 64×64 grid on the disc of
/// radius `r`. An estimate of the C³ seminorm, not a bound.
pub fn fd_c3_norm(f: &dyn Fn(Complex64) -> f64, r: f64) -> f64 {
    let h = 1e-3 * r.max(1.0);
    let third = |z: Complex64, dir: Complex64| {
        (f(z + 2.0 * dir) - 2.0 * f(z + dir) + 2.0 * f(z - dir) - f(z - 2.0 * dir))
            / (2.0 * dir.norm().powi(3))
    };
    let mixed = |z: Complex64, d1: Complex64, d2: Complex64| {
        // D_{d1 d1 d2} via second difference in d1 of the first difference in d2.
        let g = |p: Complex64| (f(p + d2) - f(p - d2)) / (2.0 * d2.norm());
        (g(z + d1) - 2.0 * g(z) + g(z - d1)) / d1.norm_sqr()
    };
    let ex = Complex64::new(h, 0.0);
    let ey = Complex64::new(0.0, h);
    let mut max = 0.0f64;
    let m = 64;
    for i in 0..m {
        for j in 0..m {
            let x = -r + 2.0 * r * (i as f64 + 0.5) / m as f64;
            let y = -r + 2.0 * r * (j as f64 + 0.5) / m as f64;
            let z = Complex64::new(x, y);
            if z.norm() > r {
                continue;
            }
            for v in [
                third(z, ex),
                third(z, ey),
                mixed(z, ex, ey),
                mixed(z, ey, ex),
            ] {
                max = max.max(v.abs());
            }
        }
    }
    max
}

/// φ(z) = scale·|z|².
pub struct Gaussian {
    pub scale: f64,
}

impl Weight for Gaussian {
    fn eval(&self, _n: usize, z: Complex64) -> f64 {
        self.scale * z.norm_sqr()
    }
    fn grad(&self, _n: usize, z: Complex64) -> [f64; 2] {
        [2.0 * self.scale * z.re, 2.0 * self.scale * z.im]
    }
    fn hessian_zzbar(&self, _n: usize, _z: Complex64) -> f64 {
        self.scale
    }
    fn c3_norm_estimate(&self, _n: usize, _r: f64) -> f64 {
        0.0
    }
    fn radial(&self) -> bool {
        true
    }
    fn varying(&self) -> bool {
        false
    }
    fn equilibrium_radius_hint(&self, _n: usize) -> Option<f64> {
        // r·φ'(r) = 2·scale·r² = 1
        Some((2.0 * self.scale).recip().sqrt())
    }
    fn describe(&self) -> String {
        format!("gaussian(scale={})", self.scale)
    }
}

/// φ(z) = |z|^{2p}/(2p).
pub struct Power {
    pub p: u32,
}

impl Weight for Power {
    fn eval(&self, _n: usize, z: Complex64) -> f64 {
        let p = self.p as f64;
        z.norm_sqr().powi(self.p as i32) / (2.0 * p)
    }
    fn grad(&self, _n: usize, z: Complex64) -> [f64; 2] {
        // φ'(r) = r^{2p-1}; ∇φ = r^{2p-2}·(x, y)
        let f = z.norm_sqr().powi(self.p as i32 - 1);
        [f * z.re, f * z.im]
    }
    fn hessian_zzbar(&self, _n: usize, z: Complex64) -> f64 {
        // Δφ/4 = p·r^{2p-2}/2
        let p = self.p as f64;
        p * z.norm_sqr().powi(self.p as i32 - 1) / 2.0
    }
    fn c3_norm_estimate(&self, _n: usize, r: f64) -> f64 {
        let p = self.p as f64;
        if self.p <= 1 {
            return 0.0;
        }
        (2.0 * p - 1.0) * (2.0 * p - 2.0) * r.powf(2.0 * p - 3.0)
    }
    fn radial(&self) -> bool {
        true
    }
    fn varying(&self) -> bool {
        false
    }
    fn equilibrium_radius_hint(&self, _n: usize) -> Option<f64> {
        // r·φ'(r) = r^{2p} = 1
        Some(1.0)
    }
    fn describe(&self) -> String {
        format!("power(p={})", self.p)
    }
}

/// φₙ(z) = |z|²/2 + n^{amp_exponent}·B(z) with a C³ compactly supported bump
/// B(z) = (r²/4)·(1 − |z−z₀|²/r²)⁴ on the disc of radius r about z₀.
///
/// The r²/4 prefactor normalizes the bump curvature to −1 at the center, so
/// the perturbed weight stays strictly subharmonic for amplitudes below 1/2.
pub struct GaussianBump {
    pub amp_exponent: f64,
    pub center: Complex64,
    pub radius: f64,
}

impl GaussianBump {
    fn amp(&self, n: usize) -> f64 {
        (n as f64).powf(self.amp_exponent)
    }

    fn bump(&self, z: Complex64) -> f64 {
        let s = (z - self.center).norm_sqr() / (self.radius * self.radius);
        if s >= 1.0 {
            0.0
        } else {
            0.25 * self.radius * self.radius * (1.0 - s).powi(4)
        }
    }
}

impl Weight for GaussianBump {
    fn eval(&self, n: usize, z: Complex64) -> f64 {
        0.5 * z.norm_sqr() + self.amp(n) * self.bump(z)
    }
    fn grad(&self, n: usize, z: Complex64) -> [f64; 2] {
        let zeta = z - self.center;
        let s = zeta.norm_sqr() / (self.radius * self.radius);
        let mut g = [z.re, z.im];
        if s < 1.0 {
            // dB/du = −(1−s)³ with u = |ζ|²
            let du = -(1.0 - s).powi(3) * self.amp(n);
            g[0] += 2.0 * du * zeta.re;
            g[1] += 2.0 * du * zeta.im;
        }
        g
    }
    fn hessian_zzbar(&self, n: usize, z: Complex64) -> f64 {
        let zeta = z - self.center;
        let r2 = self.radius * self.radius;
        let s = zeta.norm_sqr() / r2;
        let mut lambda = 0.5;
        if s < 1.0 {
            // ∂∂̄B = B_uu·u + B_u
            let bu = -(1.0 - s).powi(3);
            let buu = 3.0 * (1.0 - s).powi(2) / r2;
            lambda += self.amp(n) * (buu * zeta.norm_sqr() + bu);
        }
        lambda
    }
    fn radial(&self) -> bool {
        false
    }
    fn varying(&self) -> bool {
        self.amp_exponent != 0.0
    }
    fn equilibrium_radius_hint(&self, _n: usize) -> Option<f64> {
        // Perturbation of |z|²/2, whose equilibrium support is the unit disc.
        Some(1.0)
    }
    fn describe(&self) -> String {
        format!(
            "gaussian_bump(amp_exponent={}, center={}, radius={})",
            self.amp_exponent, self.center, self.radius
        )
    }
}

/// φₙ(z) = |z|²/2 + sin(√n·Re z): a hypothesis-violating family whose C³
/// seminorm grows like n^{3/2}.
pub struct SinPerturbed;

impl Weight for SinPerturbed {
    fn eval(&self, n: usize, z: Complex64) -> f64 {
        0.5 * z.norm_sqr() + ((n as f64).sqrt() * z.re).sin()
    }
    fn grad(&self, n: usize, z: Complex64) -> [f64; 2] {
        let s = (n as f64).sqrt();
        [z.re + s * (s * z.re).cos(), z.im]
    }
    fn hessian_zzbar(&self, n: usize, z: Complex64) -> f64 {
        let s = (n as f64).sqrt();
        0.5 - 0.25 * (n as f64) * (s * z.re).sin()
    }
    fn c3_norm_estimate(&self, n: usize, _r: f64) -> f64 {
        (n as f64).powf(1.5)
    }
    fn radial(&self) -> bool {
        false
    }
    fn varying(&self) -> bool {
        true
    }
    fn describe(&self) -> String {
        "sin_perturbed".into()
    }
}

/// Curvature eigenvalue λⁿ(z) = Δφₙ(z)/4. The Monge-Ampère density is
/// (2/π)·λⁿ(z).
pub fn curvature(w: &dyn Weight, n: usize, z: Complex64) -> Result<f64> {
    let v = w.hessian_zzbar(n, z);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(z))
    }
}

/// Check that φₙ(z) ≥ (1+ε)log|z| holds (with margin) outside B_R, by
/// sampling 256 directions and 32 radii in [R, 4R] and requiring the excess
/// to be nondecreasing along every sampled ray.
pub fn check_growth(w: &dyn Weight, n: usize, r_big: f64, epsilon: f64) -> (bool, f64) {
    assert!(r_big > 1.0, "growth check requires R > 1");
    let n_dirs = 256;
    let n_radii = 32;
    let mut margin = f64::INFINITY;
    let mut monotone = true;
    for i in 0..n_dirs {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / n_dirs as f64;
        let dir = Complex64::new(theta.cos(), theta.sin());
        let mut prev = f64::NEG_INFINITY;
        for j in 0..n_radii {
            let r = r_big * (1.0 + 3.0 * j as f64 / (n_radii - 1) as f64);
            let excess = w.eval(n, r * dir) - (1.0 + epsilon) * r.ln();
            margin = margin.min(excess);
            if excess < prev - 1e-12 {
                monotone = false;
            }
            prev = excess;
        }
    }
    (margin > 0.0 && monotone, margin)
}

/// Equilibrium potential of a radial weight: the contact set is the annulus
/// (or disc) between `inner_radius` and `outer_radius`, with logarithmic
/// extension outside.
pub struct EquilibriumPotential {
    pub inner_radius: f64,
    pub outer_radius: f64,
    weight: WeightSequence,
    n: usize,
    value_at_outer: f64,
    value_at_inner: f64,
}

impl EquilibriumPotential {
    pub fn eval(&self, z: Complex64) -> f64 {
        let r = z.norm();
        if r > self.outer_radius {
            self.value_at_outer + (r / self.outer_radius).ln()
        } else if r < self.inner_radius {
            self.value_at_inner
        } else {
            self.weight.eval(self.n, z)
        }
    }

    /// Density of MA(φₙᵉ): (2/π)·λⁿ(z) on the contact annulus, zero outside.
    pub fn mass_density(&self, z: Complex64) -> f64 {
        let r = z.norm();
        if r > self.outer_radius || r < self.inner_radius {
            0.0
        } else {
            (2.0 / std::f64::consts::PI) * self.weight.hessian_zzbar(self.n, z).max(0.0)
        }
    }
}

fn radial_rphi(w: &dyn Weight, n: usize, r: f64) -> f64 {
    r * w.grad(n, Complex64::new(r, 0.0))[0]
}

/// Compute the equilibrium potential of a radial weight by bisecting
/// r·φₙ'(r) = 1 (and = 0 for the inner radius of an annulus).
pub fn equilibrium_radial(w: &WeightSequence, n: usize) -> Result<EquilibriumPotential> {
    if !w.radial() {
        return Err(Error::NotRadial);
    }
    let r_max = 8.0;
    let f = |r: f64| radial_rphi(w.as_ref(), n, r);
    let outer = bisect(&f, 1.0, 1e-9, r_max)
        .ok_or(Error::NoBracketing { target: 1.0, r_max })?;
    let inner = if f(1e-6) >= -1e-12 {
        0.0
    } else {
        bisect(&f, 0.0, 1e-9, outer).ok_or(Error::NoBracketing { target: 0.0, r_max })?
    };
    Ok(EquilibriumPotential {
        inner_radius: inner,
        outer_radius: outer,
        value_at_outer: w.eval(n, Complex64::new(outer, 0.0)),
        value_at_inner: w.eval(n, Complex64::new(inner, 0.0)),
        weight: w.clone(),
        n,
    })
}

/// Bisection for f(r) = target on (lo, r_max]; |f(r) − target| < 1e-12.
fn bisect(f: &dyn Fn(f64) -> f64, target: f64, lo0: f64, hi0: f64) -> Option<f64> {
    let steps = 4096;
    let mut lo = lo0;
    let mut hi = hi0;
    let mut found = false;
    let mut prev_r = lo0;
    let mut prev_v = f(lo0.max(1e-12)) - target;
    for i in 1..=steps {
        let r = lo0 + (hi0 - lo0) * i as f64 / steps as f64;
        let v = f(r) - target;
        if prev_v <= 0.0 && v >= 0.0 {
            lo = prev_r;
            hi = r;
            found = true;
            break;
        }
        prev_r = r;
        prev_v = v;
    }
    if !found {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid) - target;
        if v.abs() < 1e-12 || (hi - lo) < 1e-16 {
            return Some(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Outcome of checking the CLT hypotheses (1)-(3) for a weight sequence.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub growth_ok: bool,
    pub growth_margin: f64,
    pub bound_sup_phi: f64,
    pub bound_sup_dphi: f64,
    /// ‖φₙ‖_{C³,B_R}·log³n/√n per entry of n_list; must not increase.
    pub c3_over_sqrtn_log3n: Vec<f64>,
    pub c3_trend_ok: bool,
    pub ellipticity_c: f64,
    pub ellipticity_a: f64,
    /// Single-weight regime: assumptions (1)-(3) are redundant and the C³
    /// trend check is skipped.
    pub single_weight: bool,
    pub all_ok: bool,
}

/// Evaluate assumptions (1)-(3) over `n_list`, with ellipticity constants
/// taken over a grid on the disc `u` and sup bounds over a grid on B_R.
pub fn check_hypotheses(
    w: &dyn Weight,
    n_list: &[usize],
    u: Disc,
    r_big: f64,
    epsilon: f64,
) -> Result<HypothesisReport> {
    if n_list.is_empty() {
        return Err(Error::TooFewDegrees(1));
    }
    if !(u.radius > 0.0) {
        return Err(Error::EmptyGrid);
    }
    let single = !w.varying();
    let grid = 48;

    let mut sup_phi = 0.0f64;
    let mut sup_dphi = 0.0f64;
    for &n in n_list {
        for i in 0..grid {
            for j in 0..grid {
                let x = -r_big + 2.0 * r_big * (i as f64 + 0.5) / grid as f64;
                let y = -r_big + 2.0 * r_big * (j as f64 + 0.5) / grid as f64;
                let z = Complex64::new(x, y);
                if z.norm() > r_big {
                    continue;
                }
                sup_phi = sup_phi.max(w.eval(n, z).abs());
                let g = w.grad(n, z);
                sup_dphi = sup_dphi.max(g[0].hypot(g[1]));
            }
        }
    }

    let seq: Vec<f64> = n_list
        .iter()
        .map(|&n| {
            let nf = n as f64;
            w.c3_norm_estimate(n, r_big) * nf.ln().powi(3) / nf.sqrt()
        })
        .collect();
    let c3_trend_ok = if single || seq.len() < 2 {
        true
    } else {
        // Falsifier: flag families whose normalized C³ norm fails to decay.
        *seq.last().unwrap() <= seq.first().unwrap() + 1e-12
    };

    let mut c = f64::INFINITY;
    let mut a = f64::NEG_INFINITY;
    for &n in n_list {
        for i in 0..grid {
            for j in 0..grid {
                let x = u.center.re - u.radius + 2.0 * u.radius * (i as f64 + 0.5) / grid as f64;
                let y = u.center.im - u.radius + 2.0 * u.radius * (j as f64 + 0.5) / grid as f64;
                let z = Complex64::new(x, y);
                if (z - u.center).norm() > u.radius {
                    continue;
                }
                let lam = curvature(w, n, z)?;
                c = c.min(lam);
                a = a.max(lam);
            }
        }
    }

    let (growth_ok, margin) = n_list
        .iter()
        .map(|&n| check_growth(w, n, r_big, epsilon))
        .fold((true, f64::INFINITY), |(ok, m), (ok2, m2)| {
            (ok && ok2, m.min(m2))
        });

    let all_ok = growth_ok
        && sup_phi.is_finite()
        && sup_dphi.is_finite()
        && c3_trend_ok
        && c > 0.0
        && a.is_finite();
    Ok(HypothesisReport {
        growth_ok,
        growth_margin: margin,
        bound_sup_phi: sup_phi,
        bound_sup_dphi: sup_dphi,
        c3_over_sqrtn_log3n: seq,
        c3_trend_ok,
        ellipticity_c: c,
        ellipticity_a: a,
        single_weight: single,
        all_ok,
    })
}
