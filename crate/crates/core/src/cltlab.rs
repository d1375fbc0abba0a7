//! Monte-Carlo laboratory for the central limit theorem of linear statistics
//! of zeros, plus the two correlation-decay conditions (c1)/(c2) that drive
//! the moment method:
//!
//!   (c1)  sup_{x∈X} ∫_X |ρₙ(x,y)| dV(y) → 0,
//!   (c2)  ∫∫ |ρₙ|²ψ(x)ψ(y) dV dV / sup_x ∫|ρₙ(x,·)| dV  stays bounded
//!         below, with m=1 reference limit ½∫ψ² dV.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::bergman::in_bulk;
use crate::orthobasis::{build_onb, OrthoBasis};
use crate::quadrature::{build_polar_rule_at, default_radius, default_rule_for_degree};
use crate::rng::trial_rng;
use crate::weights::{Disc, WeightSequence};
use crate::zerostats::{find_roots, linear_statistic, sample_polynomial, TestFunction};
use crate::{Complex64, Error, Result};

/// Moments and normality diagnostics of one Monte-Carlo ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub variance: f64,
    /// (Zᵢ − mean)/√variance, in trial order.
    pub standardized: Vec<f64>,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_statistic: f64,
    pub ks_p: f64,
}

/// Per-degree values of the two decay conditions.
#[derive(Debug, Clone)]
pub struct STConditionReport {
    pub c1_values: Vec<(usize, f64)>,
    pub c2_ratios: Vec<(usize, f64)>,
    /// ½∫ψ² dV, the m = 1 limiting value of the (c2) ratio.
    pub c2_limit_reference: f64,
}

/// Variance of the linear statistic along a degree schedule.
#[derive(Debug, Clone)]
pub struct VarianceTrend {
    pub points: Vec<(usize, f64)>,
    /// Monotone decreasing, allowing one inversion within two standard
    /// errors of the variance estimator.
    pub decreasing: bool,
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Asymptotic Kolmogorov tail Q(x) = 2Σ_{k≥1}(−1)^{k−1}e^{−2k²x²},
/// truncated once terms drop below 1e-10.
fn kolmogorov_p(x: f64) -> f64 {
    if x < 1e-3 {
        return 1.0;
    }
    let mut p = 0.0;
    let mut sign = 1.0;
    for k in 1..200 {
        let term = 2.0 * (-2.0 * (k * k) as f64 * x * x).exp();
        p += sign * term;
        sign = -sign;
        if term < 1e-10 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// Skewness, excess kurtosis, KS statistic against N(0,1), and asymptotic
/// KS p-value of a sample (standardized internally).
pub fn normality_tests(samples: &[f64]) -> Result<(f64, f64, f64, f64)> {
    if samples.len() < 100 {
        return Err(Error::DegenerateSample);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    // A constant sample leaves only accumulation rounding (~ε·mean)² in the
    // variance, so degeneracy is judged relative to the mean's magnitude.
    if !(var > 1e-30 + (1e-12 * mean).powi(2)) {
        return Err(Error::DegenerateSample);
    }
    let sd = var.sqrt();
    let mut std: Vec<f64> = samples.iter().map(|x| (x - mean) / sd).collect();
    let skew = std.iter().map(|x| x * x * x).sum::<f64>() / n;
    let exkurt = std.iter().map(|x| x.powi(4)).sum::<f64>() / n - 3.0;
    std.sort_by(f64::total_cmp);
    let mut d = 0.0f64;
    for (i, &x) in std.iter().enumerate() {
        let f = normal_cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs()).max((f - i as f64 / n).abs());
    }
    Ok((skew, exkurt, d, kolmogorov_p(n.sqrt() * d)))
}

fn support_in_bulk(b: &OrthoBasis, phi: &TestFunction) -> bool {
    let c = phi.support_center;
    let r = phi.support_radius;
    let probes = [
        c,
        c + Complex64::new(r, 0.0),
        c - Complex64::new(r, 0.0),
        c + Complex64::new(0.0, r),
        c - Complex64::new(0.0, r),
    ];
    probes.iter().all(|&z| in_bulk(b, z))
}

/// Run `trials` independent samples of the root-sum linear statistic and
/// summarize. A fixed (seed, trial) pair always yields the same sample, so
/// the whole summary is a pure function of the arguments.
pub fn run_ensemble(
    w: &WeightSequence,
    phi: &TestFunction,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<EnsembleSummary> {
    if trials < 100 {
        return Err(Error::DegenerateSample);
    }
    let q = default_rule_for_degree(default_radius(w.equilibrium_radius_hint(n).unwrap_or(1.0)), n)?;
    let basis = Arc::new(build_onb(&q, w, n)?);
    if !support_in_bulk(&basis, phi) {
        return Err(Error::SupportOutsideBulk);
    }
    let stats: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let f = sample_polynomial(&basis, &mut rng);
            let zs = find_roots(&f)?;
            Ok(linear_statistic(&zs, phi))
        })
        .collect::<Result<Vec<f64>>>()?;
    summarize(n, &stats)
}

/// Build an [`EnsembleSummary`] from raw per-trial statistics.
pub fn summarize(n: usize, stats: &[f64]) -> Result<EnsembleSummary> {
    let trials = stats.len();
    let tn = trials as f64;
    let mean = stats.iter().sum::<f64>() / tn;
    let variance = stats.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (tn - 1.0);
    if !(variance > 1e-30) {
        return Err(Error::DegenerateVariance(variance));
    }
    let sd = variance.sqrt();
    let standardized: Vec<f64> = stats.iter().map(|x| (x - mean) / sd).collect();
    let (skewness, excess_kurtosis, ks_statistic, ks_p) = normality_tests(stats)?;
    Ok(EnsembleSummary {
        n,
        trials,
        mean,
        variance,
        standardized,
        skewness,
        excess_kurtosis,
        ks_statistic,
        ks_p,
    })
}

/// sup over a grid of z ∈ X of ∫_X |ρₙ(z,·)| dV.
pub fn st_condition_c1(b: &Arc<OrthoBasis>, x_disc: &Disc, grid_size: usize) -> Result<f64> {
    let c = x_disc.center;
    let r = x_disc.radius;
    for &p in &[
        c,
        c + Complex64::new(r, 0.0),
        c - Complex64::new(r, 0.0),
        c + Complex64::new(0.0, r),
        c - Complex64::new(0.0, r),
    ] {
        if !in_bulk(b, p) {
            return Err(Error::OutsideBulk(p));
        }
    }
    // Quadrature on X sized to resolve the √n-scale correlation length.
    let n_rad = (2 * b.n + 32).min(400);
    let n_ang = (4 * b.n + 32).min(800);
    let q = build_polar_rule_at(c, r, n_rad, n_ang)?;
    let mut grid = Vec::new();
    for i in 0..grid_size {
        for j in 0..grid_size {
            let zx = c.re - r + 2.0 * r * (i as f64 + 0.5) / grid_size as f64;
            let zy = c.im - r + 2.0 * r * (j as f64 + 0.5) / grid_size as f64;
            let z = Complex64::new(zx, zy);
            if (z - c).norm() <= r {
                grid.push(z);
            }
        }
    }
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&z| {
            let uz = b.weighted_values(z);
            let nz: f64 = uz.iter().map(|u| u.norm_sqr()).sum();
            let mut total = 0.0;
            for (&y, &wt) in q.nodes.iter().zip(&q.weights) {
                let uy = b.weighted_values(y);
                let ny: f64 = uy.iter().map(|u| u.norm_sqr()).sum();
                let k: Complex64 = uz.iter().zip(&uy).map(|(a, v)| a * v.conj()).sum();
                total += wt * k.norm() / (nz * ny).sqrt();
            }
            total
        })
        .collect();
    Ok(values.iter().cloned().fold(0.0, f64::max))
}

/// ½∫ψ² dV over supp ψ.
pub fn c2_limit_reference(phi: &TestFunction) -> Result<f64> {
    let q = build_polar_rule_at(phi.support_center, phi.support_radius, 64, 128)?;
    let v = q.integrate_real(|z| phi.psi(z) * phi.psi(z))?;
    if !(v > 1e-30) {
        return Err(Error::ZeroPsi);
    }
    Ok(0.5 * v)
}

/// The (c2) ratio at this degree: the double integral factorizes through
/// M_{jk} = ∫ ψ(x)uⱼ(x)ūₖ(x)/|u(x)|² dV as Σ_{jk}|M_{jk}|², avoiding the
/// O(nodes²) double sum.
pub fn st_condition_c2(
    b: &Arc<OrthoBasis>,
    phi: &TestFunction,
    x_disc: &Disc,
    grid_size: usize,
) -> Result<f64> {
    c2_limit_reference(phi)?;
    let c = x_disc.center;
    let n_rad = (2 * b.n + 32).min(400);
    let n_ang = (4 * b.n + 32).min(800);
    let q = build_polar_rule_at(c, x_disc.radius, n_rad, n_ang)?;
    let d = b.d_n;
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for (&x, &wt) in q.nodes.iter().zip(&q.weights) {
        let psi = phi.psi(x);
        if psi == 0.0 {
            continue;
        }
        let u = b.weighted_values(x);
        let nx: f64 = u.iter().map(|v| v.norm_sqr()).sum();
        let s = wt * psi / nx;
        for j in 0..d {
            let uj = u[j] * s;
            for k in 0..d {
                m[j * d + k] += uj * u[k].conj();
            }
        }
    }
    let numerator: f64 = m.iter().map(|v| v.norm_sqr()).sum();
    let denominator = st_condition_c1(b, x_disc, grid_size)?;
    Ok(numerator / denominator)
}

/// Evaluate both conditions across a degree schedule.
pub fn st_condition_report(
    w: &WeightSequence,
    phi: &TestFunction,
    n_list: &[usize],
    grid_size: usize,
) -> Result<STConditionReport> {
    let x_disc = Disc { center: phi.support_center, radius: phi.support_radius };
    let mut c1_values = Vec::new();
    let mut c2_ratios = Vec::new();
    for &n in n_list {
        let q = default_rule_for_degree(default_radius(w.equilibrium_radius_hint(n).unwrap_or(1.0)), n)?;
        let b = Arc::new(build_onb(&q, w, n)?);
        c1_values.push((n, st_condition_c1(&b, &x_disc, grid_size)?));
        c2_ratios.push((n, st_condition_c2(&b, phi, &x_disc, grid_size)?));
    }
    Ok(STConditionReport {
        c1_values,
        c2_ratios,
        c2_limit_reference: c2_limit_reference(phi)?,
    })
}

/// Ensemble variances along an increasing degree schedule.
pub fn variance_trend(
    w: &WeightSequence,
    phi: &TestFunction,
    n_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<VarianceTrend> {
    if n_list.len() < 3 {
        return Err(Error::TooFewDegrees(n_list.len()));
    }
    if n_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::TooFewDegrees(n_list.len()));
    }
    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let s = run_ensemble(w, phi, n, trials, seed)?;
        points.push((n, s.variance));
    }
    let mut inversions = 0;
    let mut hard_break = false;
    for win in points.windows(2) {
        let (_, v0) = win[0];
        let (n1, v1) = win[1];
        if win[0].0 == n1 {
            continue;
        }
        if v1 > v0 {
            inversions += 1;
            // Standard error of a sample variance ≈ v·√(2/(N−1)).
            let se = v0 * (2.0 / (trials as f64 - 1.0)).sqrt();
            if v1 > v0 + 2.0 * se {
                hard_break = true;
            }
        }
    }
    Ok(VarianceTrend { points, decreasing: inversions <= 1 && !hard_break })
}

/// Draw `count` pseudo-random standard normals from a trial substream
/// (calibration input for the normality harness).
pub fn synthetic_normals(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = trial_rng(seed, u64::MAX);
    (0..count).map(|_| rng.sample(StandardNormal)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::Gaussian;

    fn gaussian_weight() -> WeightSequence {
        Arc::new(Gaussian { scale: 0.5 })
    }

    fn gaussian_basis(n: usize) -> Arc<OrthoBasis> {
        let w = gaussian_weight();
        let q = default_rule_for_degree(default_radius(1.0), n).unwrap();
        Arc::new(build_onb(&q, &w, n).unwrap())
    }

    #[test]
    fn normality_calibration_standard_normal() {
        let xs = synthetic_normals(42, 100_000);
        let (skew, exkurt, _d, p) = normality_tests(&xs).unwrap();
        assert!(skew.abs() < 0.03, "{skew}");
        assert!(exkurt.abs() < 0.06, "{exkurt}");
        assert!(p > 0.01, "{p}");
    }

    #[test]
    fn normality_rejects_exponential() {
        let mut rng = trial_rng(9, 1);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let (skew, _, _, p) = normality_tests(&xs).unwrap();
        assert!((skew - 2.0).abs() < 0.05, "{skew}");
        assert!(p < 1e-6, "{p}");
    }

    #[test]
    fn normality_degenerate_inputs() {
        assert!(matches!(normality_tests(&[1.0; 50]), Err(Error::DegenerateSample)));
        assert!(matches!(normality_tests(&[3.7; 500]), Err(Error::DegenerateSample)));
    }

    #[test]
    fn ensemble_deterministic() {
        let w = gaussian_weight();
        let phi = TestFunction::bump(Complex64::new(0.0, 0.0), 0.5);
        let a = run_ensemble(&w, &phi, 20, 120, 31).unwrap();
        let b = run_ensemble(&w, &phi, 20, 120, 31).unwrap();
        assert_eq!(a, b);
        assert!(a.standardized.iter().sum::<f64>().abs() / (a.trials as f64) < 1e-12);
        let v = a.standardized.iter().map(|x| x * x).sum::<f64>()
            / (a.trials as f64 - 1.0);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ensemble_rejects_support_outside_bulk() {
        let w = gaussian_weight();
        let phi = TestFunction::bump(Complex64::new(0.9, 0.0), 0.3);
        assert!(matches!(
            run_ensemble(&w, &phi, 20, 120, 1),
            Err(Error::SupportOutsideBulk)
        ));
    }

    #[test]
    fn c1_matches_gaussian_oracle_and_decays() {
        let x = Disc { center: Complex64::new(0.0, 0.0), radius: 0.7 };
        let v50 = st_condition_c1(&gaussian_basis(50), &x, 8).unwrap();
        let oracle = 2.0 * std::f64::consts::PI / 50.0;
        assert!(v50 < oracle * 1.3 && v50 > oracle / 1.3, "{v50} vs {oracle}");
        assert!(v50 <= std::f64::consts::PI * 0.7 * 0.7 + 1e-9);
        let v20 = st_condition_c1(&gaussian_basis(20), &x, 8).unwrap();
        let v80 = st_condition_c1(&gaussian_basis(80), &x, 8).unwrap();
        assert!(v80 < v20, "{v80} vs {v20}");
    }

    #[test]
    fn c1_rejects_disc_outside_bulk() {
        let x = Disc { center: Complex64::new(0.8, 0.0), radius: 0.5 };
        assert!(matches!(
            st_condition_c1(&gaussian_basis(20), &x, 4),
            Err(Error::OutsideBulk(_))
        ));
    }

    #[test]
    fn c2_positive_and_quadratic_in_psi() {
        let b = gaussian_basis(40);
        let phi = TestFunction::bump(Complex64::new(0.0, 0.0), 0.5);
        let x = Disc { center: Complex64::new(0.0, 0.0), radius: 0.5 };
        let r1 = st_condition_c2(&b, &phi, &x, 6).unwrap();
        assert!(r1 > 0.0 && r1.is_finite());
        // Doubling ψ scales the ratio by exactly 4.
        let phi2 = TestFunction {
            value: Box::new({
                let inner = TestFunction::bump(Complex64::new(0.0, 0.0), 0.5);
                move |z| 2.0 * (inner.value)(z)
            }),
            laplacian: Box::new({
                let inner = TestFunction::bump(Complex64::new(0.0, 0.0), 0.5);
                move |z| 2.0 * (inner.laplacian)(z)
            }),
            support_center: Complex64::new(0.0, 0.0),
            support_radius: 0.5,
        };
        let r2 = st_condition_c2(&b, &phi2, &x, 6).unwrap();
        assert!((r2 - 4.0 * r1).abs() < 1e-9 * r2, "{r2} vs 4×{r1}");
    }

    #[test]
    fn variance_trend_decreasing() {
        let w = gaussian_weight();
        let phi = TestFunction::bump(Complex64::new(0.0, 0.0), 0.5);
        let t = variance_trend(&w, &phi, &[20, 40, 80], 300, 7).unwrap();
        assert!(t.decreasing, "{:?}", t.points);
        assert!(t.points[2].1 < t.points[0].1);
    }

    #[test]
    fn variance_trend_preconditions() {
        let w = gaussian_weight();
        let phi = TestFunction::bump(Complex64::new(0.0, 0.0), 0.5);
        assert!(matches!(
            variance_trend(&w, &phi, &[20], 300, 7),
            Err(Error::TooFewDegrees(1))
        ));
    }

    #[test]
    fn duplicate_degrees_identical_variance() {
        let w = gaussian_weight();
        let phi = TestFunction::bump(Complex64::new(0.0, 0.0), 0.5);
        let t = variance_trend(&w, &phi, &[20, 20, 40], 150, 3).unwrap();
        assert_eq!(t.points[0].1, t.points[1].1);
    }

    #[test]
    fn ks_p_value_known_points() {
        // Kolmogorov distribution: Q(1.0) ≈ 0.27, Q(1.36) ≈ 0.049.
        assert!((kolmogorov_p(1.0) - 0.26999).abs() < 1e-4);
        assert!((kolmogorov_p(1.3581) - 0.05).abs() < 5e-4);
    }
}
