//! Gaussian random polynomials in the orthonormal basis, their zero sets,
//! and linear statistics of the zeros computed by two independent routes:
//! a direct sum over roots and the logarithmic-potential integral
//! (1/2π)∫ log|f| ΔΦ dV. Agreement of the two routes is the strongest
//! internal correctness oracle of the whole pipeline.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;
use crate::orthobasis::OrthoBasis;
use crate::quadrature::PlanarQuadrature;
use crate::{Complex64, Error, Result};

/// f(z) = Σⱼ cⱼPⱼ(z) with iid standard complex Gaussian cⱼ.
#[derive(Clone)]
pub struct RandomPolynomial {
    pub basis: Arc<OrthoBasis>,
    /// Basis coefficients cⱼ (E cⱼ = 0, E|cⱼ|² = 1).
    pub c: Vec<Complex64>,
    /// Coefficients over the scaled monomials mₖ = z^k/σₖ.
    pub monomial_coeffs: Vec<Complex64>,
}

/// Roots (with multiplicity) of a sampled polynomial.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    pub roots: Vec<Complex64>,
    /// Backward errors |p(root)|/Σ|bₖ||root|^k of the normalized polynomial.
    pub residuals: Vec<f64>,
    /// Two roots within cluster_tolerance·(1+|root|) are reported as one
    /// multiplicity cluster.
    pub cluster_tolerance: f64,
    /// Clusters as (centroid, multiplicity); singletons included.
    pub clusters: Vec<(Complex64, usize)>,
    /// Leading coefficients stripped as numerically zero.
    pub degree_drop: usize,
}

/// Backward-error residual contract for every reported root.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

/// A C²⁺ test function Φ compactly supported in a disc, together with its
/// analytic Laplacian (so ψ = ΔΦ/2π needs no numerical differentiation).
pub struct TestFunction {
    pub value: Box<dyn Fn(Complex64) -> f64 + Send + Sync>,
    pub laplacian: Box<dyn Fn(Complex64) -> f64 + Send + Sync>,
    pub support_center: Complex64,
    pub support_radius: f64,
}

impl TestFunction {
    /// Radial bump Φ(z) = (1 − s)³ on the disc (s = |z−z₀|²/r²), zero
    /// outside — C² across the boundary, with
    /// ΔΦ = (12/r²)(1 − s)(3s − 1) on the disc.
    pub fn bump(center: Complex64, radius: f64) -> Self {
        let r2 = radius * radius;
        let c = center;
        TestFunction {
            value: Box::new(move |z: Complex64| {
                let s = (z - c).norm_sqr() / r2;
                if s >= 1.0 {
                    0.0
                } else {
                    (1.0 - s).powi(3)
                }
            }),
            laplacian: Box::new(move |z: Complex64| {
                let s = (z - c).norm_sqr() / r2;
                if s >= 1.0 {
                    0.0
                } else {
                    12.0 / r2 * (1.0 - s) * (3.0 * s - 1.0)
                }
            }),
            support_center: center,
            support_radius: radius,
        }
    }

    /// ψ(z) = ΔΦ(z)/(2π), the density of ddᶜΦ against area measure.
    pub fn psi(&self, z: Complex64) -> f64 {
        (self.laplacian)(z) / (2.0 * PI)
    }
}

/// Draw a random polynomial: cⱼ = x + iy with x, y independent N(0, 1/2).
pub fn sample_polynomial<R: Rng>(b: &Arc<OrthoBasis>, rng: &mut R) -> RandomPolynomial {
    let c: Vec<Complex64> = (0..b.d_n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    let monomial_coeffs = b.combine_coefficients(&c);
    RandomPolynomial { basis: Arc::clone(b), c, monomial_coeffs }
}

/// log|f(z)|, computed through the weighted basis values so the kernel-sized
/// factors cancel: log|Σcⱼuⱼ(z)| + nφₙ(z).
pub fn log_abs(f: &RandomPolynomial, z: Complex64) -> f64 {
    let u = f.basis.weighted_values(z);
    let s: Complex64 = f.c.iter().zip(&u).map(|(a, p)| a * p).sum();
    s.norm().ln() + f.basis.n as f64 * f.basis.weight.eval(f.basis.n, z)
}

fn horner(b: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &coef in b.iter().rev() {
        dp = dp * z + p;
        p = p * z + coef;
    }
    (p, dp)
}

fn backward_error(b: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = horner(b, z);
    let mut scale = 0.0;
    let mut zk = 1.0;
    for coef in b {
        scale += coef.norm() * zk;
        zk *= z.norm();
    }
    p.norm() / scale.max(f64::MIN_POSITIVE)
}

/// Initial guesses à la Bini (MPSolve): moduli from the slopes of the upper
/// convex hull of (k, log|bₖ|), so clusters of very different magnitude each
/// get a starting circle of the right radius. Essential once coefficients
/// span many orders of magnitude (high-degree orthonormal samples do).
fn bini_initial_guesses(b: &[Complex64]) -> Vec<Complex64> {
    let d = b.len() - 1;
    let pts: Vec<(usize, f64)> = b
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| (k, c.norm().ln()))
        .collect();
    // Upper convex hull by monotone scan over increasing k.
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &(k, y) in &pts {
        while hull.len() >= 2 {
            let (k1, y1) = hull[hull.len() - 2];
            let (k2, y2) = hull[hull.len() - 1];
            // Drop k2 if it lies below the chord k1–k.
            if (y2 - y1) * (k - k1) as f64 <= (y - y1) * (k2 - k1) as f64 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((k, y));
    }
    let mut z = Vec::with_capacity(d);
    // Exact zero coefficients below the first hull vertex mean roots at the
    // origin; seed them on a tiny circle instead of exactly at 0.
    let k_first = hull.first().map(|&(k, _)| k).unwrap_or(0);
    for j in 0..k_first {
        let th = 2.0 * PI * j as f64 / k_first.max(1) as f64 + 0.4;
        z.push(1e-8 * Complex64::new(th.cos(), th.sin()));
    }
    for seg in hull.windows(2) {
        let (k1, y1) = seg[0];
        let (k2, y2) = seg[1];
        let m = k2 - k1;
        let r = ((y1 - y2) / m as f64).exp();
        for j in 0..m {
            // Per-segment phase offset breaks the symmetry that would make
            // distinct circles' points collide on conjugate-symmetric input.
            let th = 2.0 * PI * j as f64 / m as f64 + 0.4 + 0.7 * k1 as f64;
            z.push(r * Complex64::new(th.cos(), th.sin()) + Complex64::new(1e-3, 2e-3));
        }
    }
    z
}

fn aberth(b: &[Complex64], max_iters: usize) -> Option<Vec<Complex64>> {
    let d = b.len() - 1;
    let lead = b[d].norm();
    let cauchy = 1.0 + b[..d].iter().map(|c| c.norm() / lead).fold(0.0, f64::max);
    let mut z = bini_initial_guesses(b);
    debug_assert_eq!(z.len(), d);
    for it in 0..max_iters {
        let mut max_step = 0.0f64;
        for j in 0..d {
            // All roots lie within the Cauchy bound; an iterate outside it
            // (or lost to overflow) cannot recover by local steps, so restart
            // it on a fresh circle. The golden-angle phase avoids recreating
            // the collision that expelled it.
            let finite = z[j].re.is_finite() && z[j].im.is_finite();
            if !finite || z[j].norm() > 2.0 * cauchy {
                let th = 2.399_963 * (j + it) as f64 + 0.17;
                z[j] = 0.8 * cauchy * Complex64::new(th.cos(), th.sin());
                max_step = max_step.max(1.0);
                continue;
            }
            let (p, dp) = horner(b, z[j]);
            if p.norm() == 0.0 {
                continue;
            }
            if !(p.re.is_finite() && p.im.is_finite() && dp.re.is_finite() && dp.im.is_finite()) {
                let th = 2.399_963 * (j + it) as f64 + 0.17;
                z[j] = 0.8 * cauchy * Complex64::new(th.cos(), th.sin());
                max_step = max_step.max(1.0);
                continue;
            }
            let ratio = if dp.norm() > 0.0 {
                // Scale before dividing: the naive complex division squares
                // |dp| internally and overflows once |dp| ≳ 1e154.
                let s = dp.norm();
                (p / s) / (dp / s)
            } else {
                // Multiple-root plateau: fall back to a damped value step.
                p * 1e-2
            };
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 0..d {
                if k != j {
                    let diff = z[j] - z[k];
                    // A collided pair would inject inf here; the repulsion
                    // below separates them on the next sweep instead.
                    if diff.norm() > 0.0 {
                        sum += 1.0 / diff;
                    }
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !(w.re.is_finite() && w.im.is_finite()) {
                // Overflowed correction (near-collision): nudge instead of
                // stepping, and keep iterating.
                let nudge = Complex64::new(1e-6, 2e-6) * (1.0 + z[j].norm());
                z[j] += nudge;
                max_step = max_step.max(1.0);
                continue;
            }
            z[j] -= w;
            max_step = max_step.max(w.norm() / (1.0 + z[j].norm()));
        }
        if max_step < 1e-14 && z.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Some(z);
        }
    }
    None
}

fn companion_roots(b: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = b.len() - 1;
    let mut h = CMatrix::zeros(d, d);
    for i in 1..d {
        h.set(i, i - 1, Complex64::new(1.0, 0.0));
    }
    for i in 0..d {
        h.set(i, d - 1, -b[i] / b[d]);
    }
    crate::linalg::hessenberg_eigenvalues(&h, 100 * d)
}

fn newton_polish(b: &[Complex64], roots: &mut [Complex64]) {
    for r in roots.iter_mut() {
        let mut best = *r;
        let mut best_err = backward_error(b, best);
        let mut z = *r;
        for _ in 0..5 {
            let (p, dp) = horner(b, z);
            if dp.norm() == 0.0 {
                break;
            }
            z -= p / dp;
            let err = backward_error(b, z);
            if err < best_err {
                best = z;
                best_err = err;
            } else {
                break;
            }
        }
        *r = best;
    }
}

/// Collapse groups of roots within `tol·(1+|z|)` to their centroid,
/// preserving multiplicity: a numerically smeared m-fold root is recovered
/// to much higher accuracy at the cluster centroid.
fn collapse_clusters(roots: &mut [Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let n = roots.len();
    let mut assigned = vec![usize::MAX; n];
    let mut next = 0usize;
    for i in 0..n {
        if assigned[i] != usize::MAX {
            continue;
        }
        assigned[i] = next;
        // Transitive closure over the proximity relation.
        let mut changed = true;
        while changed {
            changed = false;
            for j in 0..n {
                if assigned[j] != usize::MAX {
                    continue;
                }
                for k in 0..n {
                    if assigned[k] == next
                        && (roots[j] - roots[k]).norm() < tol * (1.0 + roots[k].norm())
                    {
                        assigned[j] = next;
                        changed = true;
                        break;
                    }
                }
            }
        }
        next += 1;
    }
    let mut clusters = Vec::with_capacity(next);
    for g in 0..next {
        let members: Vec<usize> = (0..n).filter(|&i| assigned[i] == g).collect();
        let centroid = members.iter().map(|&i| roots[i]).sum::<Complex64>()
            / members.len() as f64;
        for &i in &members {
            roots[i] = centroid;
        }
        clusters.push((centroid, members.len()));
    }
    clusters
}

/// Roots of Σ bₖ z^k, on raw monomial coefficients. Leading coefficients
/// below 1e-14·max|b| are stripped (degree drop recorded, never perturbed).
pub fn roots_of(b_raw: &[Complex64]) -> Result<ZeroSet> {
    let max_mag = b_raw.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !(max_mag > 1e-300) {
        return Err(Error::ZeroPolynomial);
    }
    let mut d = b_raw.len() - 1;
    while d > 0 && b_raw[d].norm() < 1e-14 * max_mag {
        d -= 1;
    }
    let degree_drop = b_raw.len() - 1 - d;
    let b: Vec<Complex64> = b_raw[..=d].iter().map(|c| c / max_mag).collect();
    if d == 0 {
        return Ok(ZeroSet {
            roots: vec![],
            residuals: vec![],
            cluster_tolerance: 1e-6,
            clusters: vec![],
            degree_drop,
        });
    }

    let mut roots = match aberth(&b, 500) {
        Some(r) => r,
        None => companion_roots(&b)?,
    };
    newton_polish(&b, &mut roots);
    // Cluster width for an m-fold root scales like ε^{1/m}; 2e-5 covers
    // m ≤ 3 at double precision while staying far below typical root
    // spacing of Gaussian samples.
    let clusters = collapse_clusters(&mut roots, 2e-5);
    let mut residuals: Vec<f64> = roots.iter().map(|&r| backward_error(&b, r)).collect();

    if residuals.iter().any(|&e| !(e < RESIDUAL_LIMIT)) {
        // Retry from the companion-matrix eigenvalues before giving up.
        let mut alt = companion_roots(&b).map_err(|_| Error::NonConvergent)?;
        newton_polish(&b, &mut alt);
        let alt_clusters = collapse_clusters(&mut alt, 2e-5);
        let alt_res: Vec<f64> = alt.iter().map(|&r| backward_error(&b, r)).collect();
        if alt_res.iter().all(|&e| e < RESIDUAL_LIMIT) {
            return Ok(ZeroSet {
                roots: alt,
                residuals: alt_res,
                cluster_tolerance: 1e-6,
                clusters: alt_clusters,
                degree_drop,
            });
        }
        return Err(Error::NonConvergent);
    }
    residuals.iter_mut().for_each(|e| *e = e.max(0.0));
    Ok(ZeroSet { roots, residuals, cluster_tolerance: 1e-6, clusters, degree_drop })
}

/// Zero set of a sampled polynomial. Root finding runs on the scaled-monomial
/// coefficients bₖ = aₖ/σₖ rebalanced in log space, so nothing overflows for
/// large n.
pub fn find_roots(f: &RandomPolynomial) -> Result<ZeroSet> {
    let b = &f.basis;
    // log|bₖ| = log|aₖ| − log σₖ; rebalance by the max before exponentiating.
    let logs: Vec<f64> = f
        .monomial_coeffs
        .iter()
        .zip(&b.log_sigma)
        .map(|(a, ls)| if a.norm() > 0.0 { a.norm().ln() - ls } else { f64::NEG_INFINITY })
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::ZeroPolynomial);
    }
    let coeffs: Vec<Complex64> = f
        .monomial_coeffs
        .iter()
        .zip(&logs)
        .map(|(a, &l)| {
            if l.is_finite() {
                a / a.norm() * (l - top).exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    roots_of(&coeffs)
}

/// Root-sum route: ⟨[Z_f], Φ⟩ = Σ_{f(ζ)=0} Φ(ζ).
pub fn linear_statistic(zs: &ZeroSet, phi: &TestFunction) -> f64 {
    zs.roots.iter().map(|&r| (phi.value)(r)).sum()
}

/// Number of roots inside supp Φ (CSV diagnostic).
pub fn roots_in_support(zs: &ZeroSet, phi: &TestFunction) -> usize {
    zs.roots
        .iter()
        .filter(|r| (*r - phi.support_center).norm() <= phi.support_radius)
        .count()
}

/// Logarithmic route: (1/2π)∫ log|f| ΔΦ dV over a rule covering supp Φ.
/// A node landing on a zero of f is jittered once; a second hit is an error.
pub fn linear_statistic_log(
    f: &RandomPolynomial,
    phi: &TestFunction,
    q: &PlanarQuadrature,
) -> Result<f64> {
    let inside = q
        .nodes
        .iter()
        .filter(|z| (**z - phi.support_center).norm() <= phi.support_radius)
        .count();
    if inside < 1000 {
        return Err(Error::InsufficientPoints(inside));
    }
    // Detect near-zero nodes relative to the largest sampled magnitude.
    let mags: Vec<f64> = q
        .nodes
        .iter()
        .map(|&z| {
            let u = f.basis.weighted_values(z);
            let s: Complex64 = f.c.iter().zip(&u).map(|(a, p)| a * p).sum();
            s.norm()
        })
        .collect();
    let top = mags.iter().cloned().fold(0.0, f64::max);
    let mut total = 0.0;
    for ((&z, &w), &mag) in q.nodes.iter().zip(&q.weights).zip(&mags) {
        let lap = (phi.laplacian)(z);
        if lap == 0.0 {
            continue;
        }
        let z_eff = if mag > 1e-12 * top {
            z
        } else {
            let zj = z + Complex64::new(1e-7, 1.3e-7) * (1.0 + z.norm());
            let u = f.basis.weighted_values(zj);
            let s: Complex64 = f.c.iter().zip(&u).map(|(a, p)| a * p).sum();
            if s.norm() <= 1e-12 * top {
                return Err(Error::NodeOnZero);
            }
            zj
        };
        total += w * lap * log_abs(f, z_eff);
    }
    Ok(total / (2.0 * PI))
}
