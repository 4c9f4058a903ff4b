//! The four workflows: exact, sweep, circuit, bench.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use kdlab::circuit::{self, KdEstimate, ShotPlan};
use kdlab::kdq::{self, ExactReport};
use kdlab::numerics::C64;
use kdlab::sweep;

use crate::config::{Format, NoisePreset, RunConfig};

/// Published device/simulator reference values, shipped as static
/// annotations alongside computed results.
pub const PUBLISHED_REFERENCE: &str = include_str!("../data/published_reference.json");

/// Where a command's primary output goes.
pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    fn write(&self, contents: &str) -> Result<()> {
        match self {
            Sink::Stdout => {
                print!("{contents}");
                Ok(())
            }
            Sink::File(path) => {
                if let Some(dir) = path.parent() {
                    if !dir.as_os_str().is_empty() {
                        std::fs::create_dir_all(dir)?;
                    }
                }
                std::fs::write(path, contents)
                    .with_context(|| format!("writing {}", path.display()))
            }
        }
    }
}

/// Write the run manifest next to the outputs so any run can be repeated
/// byte-for-byte from it.
fn write_manifest(out: Option<&Path>, command: &str, config: &RunConfig) -> Result<()> {
    let Some(out) = out else { return Ok(()) };
    let manifest = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
    });
    let path = if out.extension().is_some() {
        out.with_extension("manifest.json")
    } else {
        out.join("manifest.json")
    };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&manifest)?))
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn sink(out: Option<&Path>) -> Sink {
    match out {
        None => Sink::Stdout,
        Some(p) => Sink::File(p.to_path_buf()),
    }
}

fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(format!("{}\n", serde_json::to_string_pretty(value)?))
}

/// Exact pipeline over the configured times.
pub fn run_exact(config: &RunConfig, out: Option<&Path>) -> Result<()> {
    let mut reports: Vec<ExactReport> = Vec::new();
    for &tau in &config.tau {
        let setting = config.setting.resolve(tau)?;
        let report = kdq::exact_report(&setting, &config.model)?;
        eprintln!(
            "tau_a = {tau}: n_as = {:.6}, n_h = {:.6}, n_inf = {:.6}",
            report.measures.n_as, report.measures.n_h, report.measures.n_inf
        );
        reports.push(report);
    }
    let rendered = match config.format {
        Format::Json => to_json_pretty(&reports)?,
        Format::Csv => {
            let mut s = String::from(
                "tau,i,j,q_re,q_im,p,mod_re,mod_im,n_as,n_h,n_inf\n",
            );
            for r in &reports {
                for i in 0..2 {
                    for j in 0..2 {
                        s.push_str(&format!(
                            "{},{},{},{},{},{},{},{},{},{},{}\n",
                            r.tau_a,
                            i,
                            j,
                            r.kd.q[i][j].re,
                            r.kd.q[i][j].im,
                            r.tpm.p[i][j],
                            r.terms.real_term[i][j],
                            r.terms.imag_term[i][j],
                            r.measures.n_as,
                            r.measures.n_h,
                            r.measures.n_inf,
                        ));
                    }
                }
            }
            s
        }
    };
    sink(out).write(&rendered)?;
    write_manifest(out, "exact", config)
}

/// Heatmap + CDF sweep; `out` must be a directory (created if missing).
pub fn run_sweep(config: &RunConfig, out: Option<&Path>) -> Result<()> {
    let heatmap = sweep::sweep_heatmap(&config.sweep, &config.model)?;
    let cdf_tau = config.tau.last().copied().unwrap_or(3.66);
    let cdf = sweep::sweep_cdf(&config.sweep, &config.model, cdf_tau)?;

    // Summary statistics per omega at the CDF time.
    for (k, &omega) in cdf.omega.iter().enumerate() {
        let vals = &cdf.values[k];
        let median = vals[vals.len() / 2];
        eprintln!(
            "omega = {omega}: min = {:.3e}, median = {:.3e}, max = {:.3e} ({} at tau_a = {cdf_tau})",
            vals[0],
            median,
            vals[vals.len() - 1],
            cdf.measure,
        );
    }

    match out {
        None => {
            // No output directory: emit the CDF (the compact dataset).
            match config.format {
                Format::Json => print!("{}", to_json_pretty(&cdf)?),
                Format::Csv => {
                    let mut buf = Vec::new();
                    cdf.write_csv(&mut buf)?;
                    std::io::stdout().write_all(&buf)?;
                }
            }
            Ok(())
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("creating {}", dir.display()))?;
            match config.format {
                Format::Json => {
                    std::fs::write(dir.join("heatmap.json"), to_json_pretty(&heatmap)?)?;
                    std::fs::write(dir.join("cdf.json"), to_json_pretty(&cdf)?)?;
                }
                Format::Csv => {
                    let mut buf = Vec::new();
                    heatmap.write_csv(&mut buf)?;
                    std::fs::write(dir.join("heatmap.csv"), &buf)?;
                    buf.clear();
                    heatmap.write_trace_csv(&mut buf)?;
                    std::fs::write(dir.join("trace.csv"), &buf)?;
                    buf.clear();
                    cdf.write_csv(&mut buf)?;
                    std::fs::write(dir.join("cdf.csv"), &buf)?;
                }
            }
            write_manifest(Some(dir), "sweep", config)
        }
    }
}

fn shot_plan(config: &RunConfig) -> ShotPlan {
    match (config.shots, config.noise) {
        (Some(n), NoisePreset::None) => ShotPlan::Sampled(n),
        (_, NoisePreset::None) => ShotPlan::Exact,
        // Noisy runs always sample trajectories.
        _ => ShotPlan::Sampled(config.trajectories),
    }
}

#[derive(Serialize)]
struct CircuitRow {
    tau: f64,
    i: usize,
    j: usize,
    est_re: f64,
    est_im: f64,
    se_re: f64,
    se_im: f64,
    exact_re: f64,
    exact_im: f64,
    /// Deviation from exact in units of the standard error (0 when the
    /// estimate is deterministic).
    sigma_re: f64,
    sigma_im: f64,
}

#[derive(Serialize)]
struct CircuitReport {
    tau: f64,
    rmse: f64,
    estimate: KdEstimate,
    rows: Vec<CircuitRow>,
}

/// Protocol-circuit estimation over the configured times.
pub fn run_circuit(config: &RunConfig, out: Option<&Path>) -> Result<()> {
    let plan = shot_plan(config);
    let noise = config.noise.model();
    let mut reports = Vec::new();
    for &tau in &config.tau {
        let setting = config.setting.resolve(tau)?;
        let est = circuit::estimate_kd(
            &setting,
            &config.model,
            plan,
            noise.as_ref(),
            config.n_trotter,
            config.seed,
        )?;
        let exact = kdq::kd_distribution(&setting, &config.model)?;
        let rmse = est.rmse(&exact);
        eprintln!("tau_a = {tau}: rmse vs exact = {rmse:.6}");
        let mut rows = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let e: C64 = est.entry(i, j);
                let d = e - exact.q[i][j];
                let sig = |d: f64, se: f64| if se > 0.0 { d / se } else { 0.0 };
                rows.push(CircuitRow {
                    tau,
                    i,
                    j,
                    est_re: e.re,
                    est_im: e.im,
                    se_re: est.std_err_re[i][j],
                    se_im: est.std_err_im[i][j],
                    exact_re: exact.q[i][j].re,
                    exact_im: exact.q[i][j].im,
                    sigma_re: sig(d.re, est.std_err_re[i][j]),
                    sigma_im: sig(d.im, est.std_err_im[i][j]),
                });
            }
        }
        reports.push(CircuitReport {
            tau,
            rmse,
            estimate: est,
            rows,
        });
    }
    let rendered = match config.format {
        Format::Json => to_json_pretty(&reports)?,
        Format::Csv => {
            let mut s = String::from(
                "tau,i,j,est_re,est_im,se_re,se_im,exact_re,exact_im,sigma_re,sigma_im,rmse\n",
            );
            for r in &reports {
                for row in &r.rows {
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                        row.tau,
                        row.i,
                        row.j,
                        row.est_re,
                        row.est_im,
                        row.se_re,
                        row.se_im,
                        row.exact_re,
                        row.exact_im,
                        row.sigma_re,
                        row.sigma_im,
                        r.rmse,
                    ));
                }
            }
            s
        }
    };
    sink(out).write(&rendered)?;
    write_manifest(out, "circuit", config)
}

#[derive(Serialize)]
struct BenchRow {
    label: String,
    n_as: Vec<f64>,
    rmse: Vec<f64>,
}

/// Comparison table: exact theory vs noiseless and noisy circuit runs,
/// annotated with the static published reference values.
pub fn run_bench(config: &RunConfig, out: Option<&Path>) -> Result<()> {
    let taus = &config.tau;
    let mut rows: Vec<BenchRow> = Vec::new();

    let mut theory = BenchRow {
        label: "theory".into(),
        n_as: Vec::new(),
        rmse: Vec::new(),
    };
    for &tau in taus {
        let setting = config.setting.resolve(tau)?;
        let kd = kdq::kd_distribution(&setting, &config.model)?;
        theory.n_as.push(kdq::n_as(&kd));
        theory.rmse.push(0.0);
    }
    rows.push(theory);

    let estimate_row = |label: &str, plan: ShotPlan, preset: NoisePreset| -> Result<BenchRow> {
        let noise = preset.model();
        let mut row = BenchRow {
            label: label.into(),
            n_as: Vec::new(),
            rmse: Vec::new(),
        };
        for &tau in taus {
            let setting = config.setting.resolve(tau)?;
            let est = circuit::estimate_kd(
                &setting,
                &config.model,
                plan,
                noise.as_ref(),
                config.n_trotter,
                config.seed,
            )?;
            let exact = kdq::kd_distribution(&setting, &config.model)?;
            let q = kdq::KDDistribution {
                q: [
                    [est.entry(0, 0), est.entry(0, 1)],
                    [est.entry(1, 0), est.entry(1, 1)],
                ],
            };
            row.n_as.push(kdq::n_as(&q));
            row.rmse.push(est.rmse(&exact));
        }
        Ok(row)
    };

    let noiseless_plan = match config.shots {
        Some(n) => ShotPlan::Sampled(n),
        None => ShotPlan::Exact,
    };
    rows.push(estimate_row("circuit", noiseless_plan, NoisePreset::None)?);
    rows.push(estimate_row(
        "circuit+table4-ibm",
        ShotPlan::Sampled(config.trajectories),
        NoisePreset::Table4Ibm,
    )?);
    rows.push(estimate_row(
        "circuit+table4-ionq",
        ShotPlan::Sampled(config.trajectories),
        NoisePreset::Table4Ionq,
    )?);

    let reference: serde_json::Value = serde_json::from_str(PUBLISHED_REFERENCE)?;
    for row in &rows {
        eprintln!(
            "{:>20}: n_as = {:?}, rmse = {:?}",
            row.label, row.n_as, row.rmse
        );
    }

    let rendered = match config.format {
        Format::Json => to_json_pretty(&json!({
            "tau": taus,
            "rows": rows,
            "published_reference": reference,
        }))?,
        Format::Csv => {
            let mut s = String::from("label,metric");
            for tau in taus {
                s.push_str(&format!(",tau_{tau}"));
            }
            s.push('\n');
            let mut push_row = |label: &str, metric: &str, vals: &[f64]| {
                s.push_str(label);
                s.push(',');
                s.push_str(metric);
                for v in vals {
                    s.push_str(&format!(",{v}"));
                }
                s.push('\n');
            };
            for row in &rows {
                push_row(&row.label, "n_as", &row.n_as);
                push_row(&row.label, "rmse", &row.rmse);
            }
            // Static annotations from the published hardware runs.
            for (metric, obj) in [("n_as", &reference["n_as"]), ("rmse", &reference["rmse"])] {
                if let Some(map) = obj.as_object() {
                    for (label, vals) in map {
                        let vals: Vec<f64> = vals
                            .as_array()
                            .map(|a| a.iter().filter_map(|v| v.as_f64()).collect())
                            .unwrap_or_default();
                        push_row(&format!("reference:{label}"), metric, &vals);
                    }
                }
            }
            s
        }
    };
    sink(out).write(&rendered)?;
    write_manifest(out, "bench", config)
}
