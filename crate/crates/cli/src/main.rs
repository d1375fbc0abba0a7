//! `bzl` — experiment runner for the Bergman-kernel zero-statistics
//! laboratory. Every subcommand reads one TOML config, writes CSV/JSON
//! artifacts plus a manifest.json into `--out`, and is a pure function of
//! (config, seed): identical inputs give byte-identical CSV/JSON outputs.
//!
//! Exit codes: 0 success, 1 error, 2 contract violation under `--strict`.

mod config;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use bzl_core::bergman::{
    bergman_function, correlation, density_check, offdiag_decay_fit, tyz_ratio,
};
use bzl_core::cltlab::{st_condition_c1, st_condition_c2, c2_limit_reference, summarize};
use bzl_core::orthobasis::{build_onb, OrthoBasis};
use bzl_core::quadrature::{build_polar_rule, build_polar_rule_at, default_radius};
use bzl_core::rng::trial_rng;
use bzl_core::weights::{check_hypotheses, equilibrium_radial, Disc};
use bzl_core::zerostats::{
    find_roots, linear_statistic, linear_statistic_log, roots_in_support, sample_polynomial,
    TestFunction,
};
use bzl_core::Complex64;

use config::{load_config, Config};

#[derive(Parser)]
#[command(name = "bzl", version, about = "Weighted Bergman kernel and zero-statistics laboratory")]
struct Cli {
    /// TOML config file, or a manifest.json from a previous run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = "bzl-out")]
    out: PathBuf,
    /// Exit 2 when a numerical contract is violated.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Bergman function and Tian-Yau-Zelditch ratio sweep.
    KernelDiagnostics,
    /// Off-diagonal correlation decay fit per degree.
    DecayFit,
    /// Equilibrium support and measure of a radial weight.
    Equilibrium,
    /// Sodin-Tsirelson conditions (c1)/(c2) across degrees.
    Conditions,
    /// Monte-Carlo CLT ensemble for the linear statistic of zeros.
    CltRun,
    /// Check the CLT hypotheses (1)-(3) for the configured weight family.
    HypothesisCheck,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::KernelDiagnostics => "kernel-diagnostics",
            Cmd::DecayFit => "decay-fit",
            Cmd::Equilibrium => "equilibrium",
            Cmd::Conditions => "conditions",
            Cmd::CltRun => "clt-run",
            Cmd::HypothesisCheck => "hypothesis-check",
        }
    }
}

fn main() {
    if let Ok(t) = std::env::var("BZL_THREADS") {
        match t.parse::<usize>() {
            Ok(threads) if threads > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
            _ => {
                eprintln!("error: BZL_THREADS must be a positive integer");
                std::process::exit(1);
            }
        }
    }
    let cli = Cli::parse();
    std::process::exit(match run(&cli) {
        Ok(true) => 0,
        Ok(false) => {
            if cli.strict {
                eprintln!("contract violation (strict mode)");
                2
            } else {
                eprintln!("warning: contract violated (non-strict run, exiting 0)");
                0
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    });
}

fn run(cli: &Cli) -> Result<bool, String> {
    let started = Instant::now();
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| format!("cannot create output dir {}: {e}", cli.out.display()))?;

    let (ok, outputs) = match cli.cmd {
        Cmd::KernelDiagnostics => kernel_diagnostics(&cfg, &cli.out)?,
        Cmd::DecayFit => decay_fit(&cfg, &cli.out)?,
        Cmd::Equilibrium => equilibrium(&cfg, &cli.out)?,
        Cmd::Conditions => conditions(&cfg, &cli.out)?,
        Cmd::CltRun => clt_run(&cfg, &cli.out)?,
        Cmd::HypothesisCheck => hypothesis_check(&cfg, &cli.out)?,
    };

    let manifest = json!({
        "command": cli.cmd.name(),
        "seed": cfg.seed,
        "strict": cli.strict,
        "contract_ok": ok,
        "config": serde_json::to_value(&cfg).map_err(|e| e.to_string())?,
        "versions": {
            "bzl-cli": env!("CARGO_PKG_VERSION"),
        },
        "wall_time_seconds": started.elapsed().as_secs_f64(),
        "outputs": outputs,
    });
    write_text(
        &cli.out.join("manifest.json"),
        &(serde_json::to_string_pretty(&manifest).map_err(|e| e.to_string())? + "\n"),
    )?;
    Ok(ok)
}

fn write_text(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), String> {
    let mut s = String::with_capacity(rows.len() * 48 + header.len() + 1);
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    write_text(path, &s)
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<(), String> {
    write_text(path, &(serde_json::to_string_pretty(v).map_err(|e| e.to_string())? + "\n"))
}

fn build_basis(cfg: &Config, n: usize) -> Result<Arc<OrthoBasis>, String> {
    let w = cfg.weight.build();
    let auto_r = default_radius(w.equilibrium_radius_hint(n).unwrap_or(1.0));
    let r = cfg.quadrature.r.resolve(auto_r).map_err(|e| format!("quadrature.R: {e}"))?;
    let n_radial = cfg
        .quadrature
        .n_radial
        .resolve(2 * n + 16)
        .map_err(|e| format!("quadrature.n_radial: {e}"))?;
    let n_angular = cfg
        .quadrature
        .n_angular
        .resolve(4 * n + 16)
        .map_err(|e| format!("quadrature.n_angular: {e}"))?;
    let q = build_polar_rule(r, n_radial, n_angular).map_err(|e| e.to_string())?;
    Ok(Arc::new(build_onb(&q, &w, n).map_err(|e| format!("basis at n={n}: {e}"))?))
}

fn phi_of(cfg: &Config) -> TestFunction {
    TestFunction::bump(
        Complex64::new(cfg.test_function.center[0], cfg.test_function.center[1]),
        cfg.test_function.radius,
    )
}

fn degrees(cfg: &Config, default: &[usize]) -> Vec<usize> {
    cfg.n_list.clone().unwrap_or_else(|| default.to_vec())
}

fn kernel_diagnostics(cfg: &Config, out: &Path) -> Result<(bool, Vec<String>), String> {
    let n_list = degrees(cfg, &[5, 10, 20, 40]);
    let mut rows = Vec::new();
    let mut density = Vec::new();
    let mut ok = true;
    for &n in &n_list {
        let b = build_basis(cfg, n)?;
        let bulk = b.bulk_radius.unwrap_or(1.0);
        for i in 0..=16 {
            for &theta in &[0.0, std::f64::consts::FRAC_PI_4] {
                let r = 0.9 * bulk * i as f64 / 16.0;
                let z = Complex64::new(r * f64::cos(theta), r * f64::sin(theta));
                let bn = bergman_function(&b, z);
                let tyz = tyz_ratio(&b, z).map_err(|e| format!("tyz at {z}: {e}"))?;
                rows.push(format!("{n},{},{},{bn},{tyz}", z.re, z.im));
                if n == *n_list.iter().max().unwrap() && r <= 0.5 * bulk {
                    ok &= (tyz - 1.0).abs() < 0.05;
                }
            }
        }
        let q = build_polar_rule(
            default_radius(b.bulk_radius.unwrap_or(1.0)),
            2 * n + 16,
            4 * n + 16,
        )
        .map_err(|e| e.to_string())?;
        let (integral, dim) = density_check(&b, &q).map_err(|e| e.to_string())?;
        ok &= (integral - dim as f64).abs() < 1e-6 * dim as f64;
        density.push(json!({ "n": n, "integral": integral, "dimension": dim }));
    }
    write_csv(&out.join("diagnostics.csv"), "n,z_re,z_im,B_n,tyz_ratio", &rows)?;
    write_json(
        &out.join("summary.json"),
        &json!({ "weight": cfg.weight.name(), "density": density, "contract_ok": ok }),
    )?;
    Ok((ok, vec!["diagnostics.csv".into(), "summary.json".into()]))
}

fn decay_fit(cfg: &Config, out: &Path) -> Result<(bool, Vec<String>), String> {
    let n_list = degrees(cfg, &[25, 50, 100]);
    let radii: Vec<f64> = (0..cfg.r_count)
        .map(|i| cfg.r_min + (cfg.r_max - cfg.r_min) * i as f64 / (cfg.r_count - 1) as f64)
        .collect();
    let origin = Complex64::new(0.0, 0.0);
    let dir = Complex64::new(1.0, 0.0);
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut ok = true;
    for &n in &n_list {
        let b = build_basis(cfg, n)?;
        let fit = offdiag_decay_fit(&b, origin, dir, &radii)
            .map_err(|e| format!("decay fit at n={n}: {e}"))?;
        for &r in &radii {
            let rho = correlation(&b, origin, Complex64::new(r, 0.0))
                .map_err(|e| e.to_string())?
                .norm();
            rows.push(format!("{n},{r},{rho},{},{},{}", fit.t_fit, fit.c_fit, fit.r_squared));
        }
        let half = correlation(&b, origin, Complex64::new(0.5, 0.0))
            .map_err(|e| e.to_string())?
            .norm();
        let bound = fit.c_fit * (-fit.t_fit * (n as f64).sqrt() * 0.5).exp();
        ok &= fit.t_fit > 0.0 && fit.r_squared > 0.9 && half <= bound;
        fits.push(json!({
            "n": n, "T_fit": fit.t_fit, "C_fit": fit.c_fit, "r_squared": fit.r_squared,
            "rho_at_half": half, "bound_at_half": bound,
        }));
    }
    write_csv(&out.join("decay.csv"), "n,r,abs_rho,fit_T,fit_C,r2", &rows)?;
    write_json(
        &out.join("summary.json"),
        &json!({ "weight": cfg.weight.name(), "fits": fits, "contract_ok": ok }),
    )?;
    Ok((ok, vec!["decay.csv".into(), "summary.json".into()]))
}

fn equilibrium(cfg: &Config, out: &Path) -> Result<(bool, Vec<String>), String> {
    let w = cfg.weight.build();
    let eq = equilibrium_radial(&w, cfg.n).map_err(|e| e.to_string())?;
    let q = build_polar_rule(eq.outer_radius, 256, 64).map_err(|e| e.to_string())?;
    let mass = q.integrate_real(|z| eq.mass_density(z)).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for i in 0..=200 {
        let r = 1.5 * eq.outer_radius * i as f64 / 200.0;
        let z = Complex64::new(r, 0.0);
        rows.push(format!(
            "{r},{},{},{}",
            w.eval(cfg.n, z),
            eq.eval(z),
            eq.mass_density(z)
        ));
    }
    let ok = (mass - 1.0).abs() < 1e-6;
    write_csv(&out.join("profile.csv"), "r,phi,phi_eq,mass_density", &rows)?;
    write_json(
        &out.join("equilibrium.json"),
        &json!({
            "weight": cfg.weight.name(), "n": cfg.n,
            "inner_radius": eq.inner_radius, "outer_radius": eq.outer_radius,
            "total_mass": mass, "contract_ok": ok,
        }),
    )?;
    Ok((ok, vec!["profile.csv".into(), "equilibrium.json".into()]))
}

fn conditions(cfg: &Config, out: &Path) -> Result<(bool, Vec<String>), String> {
    let n_list = degrees(cfg, &[20, 40, 80]);
    let phi = phi_of(cfg);
    let x_disc = Disc { center: phi.support_center, radius: phi.support_radius };
    let reference = c2_limit_reference(&phi).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    let mut c1_prev = f64::INFINITY;
    let mut ok = true;
    for &n in &n_list {
        let b = build_basis(cfg, n)?;
        let c1 = st_condition_c1(&b, &x_disc, cfg.grid_size).map_err(|e| e.to_string())?;
        let c2 = st_condition_c2(&b, &phi, &x_disc, cfg.grid_size).map_err(|e| e.to_string())?;
        ok &= c1 < c1_prev && c2 > 0.0 && c2.is_finite();
        c1_prev = c1;
        rows.push(format!("{n},{c1},{c2}"));
    }
    write_csv(&out.join("conditions.csv"), "n,c1,c2_ratio", &rows)?;
    write_json(
        &out.join("summary.json"),
        &json!({
            "weight": cfg.weight.name(), "n_list": n_list,
            "c2_limit_reference": reference, "contract_ok": ok,
        }),
    )?;
    Ok((ok, vec!["conditions.csv".into(), "summary.json".into()]))
}

fn clt_run(cfg: &Config, out: &Path) -> Result<(bool, Vec<String>), String> {
    let n = cfg.n;
    let b = build_basis(cfg, n)?;
    let phi = phi_of(cfg);
    if !bzl_core::bergman::in_bulk(&b, phi.support_center) {
        return Err(format!("test function support at {} is outside the bulk", phi.support_center));
    }
    let logq = build_polar_rule_at(phi.support_center, phi.support_radius, 96, 192)
        .map_err(|e| e.to_string())?;
    let per_trial: Vec<(f64, f64, usize)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let f = sample_polynomial(&b, &mut rng);
            let zs = find_roots(&f).map_err(|e| format!("trial {t}: {e}"))?;
            let s_root = linear_statistic(&zs, &phi);
            let s_log =
                linear_statistic_log(&f, &phi, &logq).map_err(|e| format!("trial {t}: {e}"))?;
            Ok((s_root, s_log, roots_in_support(&zs, &phi)))
        })
        .collect::<Result<_, String>>()?;
    let stats: Vec<f64> = per_trial.iter().map(|r| r.0).collect();
    let summary = summarize(n, &stats).map_err(|e| e.to_string())?;

    let dual_ok = per_trial
        .iter()
        .all(|(a, b, _)| (a - b).abs() / (1.0 + a.abs()) < 1e-3);
    let x_disc = Disc { center: phi.support_center, radius: phi.support_radius };
    let c1 = st_condition_c1(&b, &x_disc, cfg.grid_size).map_err(|e| e.to_string())?;
    let c2 = st_condition_c2(&b, &phi, &x_disc, cfg.grid_size).map_err(|e| e.to_string())?;
    let reference = c2_limit_reference(&phi).map_err(|e| e.to_string())?;
    let ok = dual_ok
        && summary.skewness.abs() < 0.15
        && summary.excess_kurtosis.abs() < 0.3
        && summary.ks_p > 0.01;

    let rows: Vec<String> = per_trial
        .iter()
        .zip(&summary.standardized)
        .enumerate()
        .map(|(t, ((sr, sl, k), std))| format!("{t},{n},{sr},{sl},{k},{std}"))
        .collect();
    write_csv(
        &out.join("samples.csv"),
        "trial,n,statistic_rootsum,statistic_log,n_roots_in_support,standardized",
        &rows,
    )?;
    write_json(
        &out.join("summary.json"),
        &json!({
            "weight": cfg.weight.name(), "n": n, "trials": cfg.trials, "seed": cfg.seed,
            "mean": summary.mean, "variance": summary.variance,
            "skewness": summary.skewness, "excess_kurtosis": summary.excess_kurtosis,
            "ks_statistic": summary.ks_statistic, "ks_p": summary.ks_p,
            "c1": c1, "c2": c2, "c2_reference": reference,
            "dual_route_ok": dual_ok, "contract_ok": ok,
        }),
    )?;
    Ok((ok, vec!["samples.csv".into(), "summary.json".into()]))
}

fn hypothesis_check(cfg: &Config, out: &Path) -> Result<(bool, Vec<String>), String> {
    let w = cfg.weight.build();
    let n_list = degrees(cfg, &[16, 32, 64, 128]);
    let u = Disc {
        center: Complex64::new(cfg.test_function.center[0], cfg.test_function.center[1]),
        radius: cfg.test_function.radius,
    };
    let report = check_hypotheses(w.as_ref(), &n_list, u, 3.0, 1.0).map_err(|e| e.to_string())?;
    write_json(
        &out.join("report.json"),
        &json!({
            "weight": cfg.weight.name(), "n_list": n_list,
            "growth_ok": report.growth_ok, "growth_margin": report.growth_margin,
            "bound_sup_phi": report.bound_sup_phi, "bound_sup_dphi": report.bound_sup_dphi,
            "c3_over_sqrtn_log3n": report.c3_over_sqrtn_log3n,
            "c3_trend_ok": report.c3_trend_ok,
            "ellipticity_c": report.ellipticity_c, "ellipticity_a": report.ellipticity_a,
            "single_weight": report.single_weight, "all_ok": report.all_ok,
        }),
    )?;
    Ok((report.all_ok, vec!["report.json".into()]))
}
