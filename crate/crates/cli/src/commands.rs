use std::path::Path;
use std::sync::Arc;

use mflangevin::fixedpoint::{self, DEFAULT_GRID_N, DEFAULT_M_MAX};
use mflangevin::modifier::{self, CoercivityReport, Domain, GridSpec, ModifierPlan, RProperties};
use mflangevin::quadrature::GibbsDensity;
use mflangevin::simulate::{self, DriftMode, Replica, SimConfig};
use mflangevin::{stats, Config, Error, Result};
use serde::Serialize;

use crate::manifest::{create_dir, sibling, write_json, write_text, RunManifest};
use crate::Common;

pub const THREADS_ENV: &str = "MFLANGEVIN_THREADS";
/// TV distance below which the single-particle run counts as well sampled.
pub const GIBBS_TV_THRESHOLD: f64 = 0.03;

fn load_config(common: &Common) -> Result<Config> {
    let mut cfg = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for kv in &common.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("override {kv:?} is not KEY=VALUE")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if !cfg.contains("threads") {
        if let Ok(v) = std::env::var(THREADS_ENV) {
            cfg.set("threads", v.trim())
                .map_err(|_| Error::InvalidConfig(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
        }
    }
    Ok(cfg)
}

fn threads(cfg: &Config) -> Result<usize> {
    cfg.get("threads", 0usize)
}

fn sim_config(cfg: &Config) -> Result<SimConfig> {
    let mut c = cfg.sim_config()?;
    if cfg.wants_modified_drift()? {
        let a = cfg.get("domain.a", 0.0)?;
        let drift = modifier::build_modified_drift(&c.params, Domain::AtLeast(a), 1e-10)?;
        c.drift_mode = DriftMode::Modified(Arc::new(drift));
    }
    Ok(c)
}

pub fn phase_diagram(common: &Common, out: &Path, tol: f64) -> Result<()> {
    let cfg = load_config(common)?;
    let params = cfg.model()?;
    let grid = cfg.sigma_grid()?;
    RunManifest::new("phase-diagram", &cfg, &[out.to_path_buf()])?.write(&sibling(out, ".manifest.json"))?;
    let rows = simulate::with_pool(threads(&cfg)?, || fixedpoint::phase_diagram(&params, &grid, tol))?;
    write_text(out, &fixedpoint::phase_diagram_csv(&rows))?;
    let bad = rows.iter().filter(|r| r.status != fixedpoint::RowStatus::Ok).count();
    println!(
        "{} rows written to {} ({bad} without convergence)",
        rows.len(),
        out.display()
    );
    Ok(())
}

pub fn fixed_points(common: &Common, sigma: Option<f64>, out: Option<&Path>) -> Result<()> {
    let mut cfg = load_config(common)?;
    if let Some(s) = sigma {
        cfg.set("sigma", &s.to_string())?;
    }
    let params = cfg.model()?;
    let report = fixedpoint::find_all_fixed_points(&params, DEFAULT_M_MAX, DEFAULT_GRID_N, 1e-12)?;
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    if let Some(path) = out {
        write_text(path, &(json.clone() + "\n"))?;
    }
    println!("{json}");
    Ok(())
}

#[derive(Serialize)]
struct CriticalSigmaOut {
    sigma_c: f64,
    tolerance: f64,
    kappa: f64,
}

pub fn critical_sigma(common: &Common, lo: f64, hi: f64, tol: f64) -> Result<()> {
    let cfg = load_config(common)?;
    let params = cfg.model()?;
    let sigma_c = fixedpoint::critical_sigma(&params, lo, hi, tol)?;
    let out = CriticalSigmaOut {
        sigma_c,
        tolerance: tol,
        kappa: params.kappa,
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    Ok(())
}

#[derive(Serialize)]
struct SnapshotEntry {
    index: usize,
    time: f64,
    file: String,
}

pub fn simulate(common: &Common, out: &Path, mirror: bool) -> Result<()> {
    let cfg = load_config(common)?;
    let c = sim_config(&cfg)?;
    create_dir(out)?;
    let traj = out.join("trajectory.csv");
    let mut outputs = vec![traj.clone()];
    if c.record_particles {
        outputs.push(out.join("snapshots"));
    }
    let name = if mirror { "simulate --mirror" } else { "simulate" };
    RunManifest::new(name, &cfg, &outputs)?.write(&out.join("manifest.json"))?;

    let replica = if mirror {
        Replica::mirrored(&c, 0)?
    } else {
        Replica::new(&c, 0)?
    };
    let rec = simulate::run_replica_trajectory(&c, replica)?;
    write_text(&traj, &rec.to_csv())?;
    if c.record_particles {
        let dir = out.join("snapshots");
        create_dir(&dir)?;
        let mut entries = Vec::with_capacity(rec.snapshots.len());
        for (i, (t, xs)) in rec.snapshots.iter().enumerate() {
            let file = format!("snapshot_{i:05}.csv");
            write_text(&dir.join(&file), &simulate::snapshot_csv(xs))?;
            entries.push(SnapshotEntry {
                index: i,
                time: *t,
                file,
            });
        }
        write_json(&dir.join("manifest.json"), &entries)?;
    }
    let last = rec.barycenter.last().copied().unwrap_or(f64::NAN);
    println!(
        "{} points to t = {}; final barycenter {last:.6}",
        rec.times.len(),
        rec.times.last().copied().unwrap_or(0.0)
    );
    Ok(())
}

pub fn exit_times(common: &Common, domain_a: Option<f64>, replicas: Option<usize>, out: &Path) -> Result<()> {
    let mut cfg = load_config(common)?;
    if let Some(a) = domain_a {
        cfg.set("domain.a", &a.to_string())?;
    }
    if let Some(k) = replicas {
        cfg.set("replicas", &k.to_string())?;
    }
    let a = cfg.get("domain.a", 0.0)?;
    let k: usize = cfg.get("replicas", 100)?;
    if k == 0 {
        return Err(Error::InvalidConfig("key `replicas` must be at least 1".into()));
    }
    let c = sim_config(&cfg)?;
    let outcomes_path = sibling(out, "_outcomes.json");
    RunManifest::new("exit-times", &cfg, &[out.to_path_buf(), outcomes_path.clone()])?
        .write(&sibling(out, ".manifest.json"))?;

    let outcomes = simulate::run_exit_ensemble(&c, a, k)?;
    let report = stats::exit_report(&outcomes);
    write_json(&outcomes_path, &outcomes)?;
    write_json(out, &report)?;
    if report.n_failed == report.n_total {
        let first = outcomes[0].error.clone().unwrap_or_default();
        return Err(Error::AllReplicasFailed(k, first));
    }
    println!(
        "{} replicas, {} censored; mean exit {}; KS {}",
        report.n_total,
        report.n_censored,
        report.mean_exit.map_or("undefined".into(), |m| format!("{m:.4}")),
        report.ks_distance.map_or("omitted".into(), |d| format!("{d:.4}")),
    );
    Ok(())
}

#[derive(Serialize)]
struct ModifierCheckOut<'a> {
    valid: bool,
    eta_measured: f64,
    unique_critical_point: bool,
    w_prime_at_critical: f64,
    f_tilde_fixed_points: &'a [f64],
    r_properties: RProperties,
    m_star: f64,
    plan: &'a ModifierPlan,
    w_prime_csv: String,
}

pub fn modifier_check(common: &Common, domain_a: Option<f64>, out: &Path) -> Result<()> {
    let mut cfg = load_config(common)?;
    if let Some(a) = domain_a {
        cfg.set("domain.a", &a.to_string())?;
    }
    let params = cfg.model()?;
    let a = cfg.get("domain.a", 0.0)?;
    let drift = modifier::build_modified_drift(&params, Domain::AtLeast(a), 1e-10)?;
    let (report, failure): (CoercivityReport, Option<Error>) =
        match modifier::verify_modifier(&params, &drift, GridSpec::default()) {
            Ok(r) => (r, None),
            Err(Error::VerificationFailed(r)) => ((*r).clone(), Some(Error::VerificationFailed(r))),
            Err(e) => return Err(e),
        };
    let csv_path = sibling(out, "_w_prime.csv");
    write_text(&csv_path, &report.w_prime_csv())?;
    let view = ModifierCheckOut {
        valid: report.is_valid(),
        eta_measured: report.eta_measured,
        unique_critical_point: report.unique_critical_point,
        w_prime_at_critical: report.w_prime_at_critical,
        f_tilde_fixed_points: &report.f_tilde_fixed_points,
        r_properties: report.r_properties,
        m_star: report.m_star,
        plan: &drift.plan,
        w_prime_csv: csv_path.display().to_string(),
    };
    write_json(out, &view)?;
    println!(
        "eta = {:.6e}, unique critical point: {}, fixed points of the modified map: {:?}",
        report.eta_measured, report.unique_critical_point, report.f_tilde_fixed_points
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct GibbsOut {
    tv_distance: f64,
    threshold: f64,
    status: &'static str,
    steps: u64,
    burn_in: u64,
    dt: f64,
    sigma: f64,
    bins: usize,
    range: (f64, f64),
    histogram_csv: String,
}

pub fn gibbs_oracle(common: &Common, steps: Option<u64>, out: &Path) -> Result<()> {
    let mut cfg = load_config(common)?;
    if let Some(n) = steps {
        cfg.set("gibbs.steps", &n.to_string())?;
    }
    cfg.set("n_particles", "1")?;
    let steps: u64 = cfg.get("gibbs.steps", 10_000_000)?;
    let burn_in: u64 = cfg.get("gibbs.burn_in", 100_000)?;
    let bins: usize = cfg.get("gibbs.bins", 50)?;
    let range = (cfg.get("gibbs.lo", -2.5)?, cfg.get("gibbs.hi", 2.5)?);
    let mut c = cfg.sim_config()?;
    if !cfg.contains("init.kind") {
        c.init = simulate::InitLaw::Point(0.0);
    }
    let hist_path = sibling(out, "_hist.csv");
    RunManifest::new("gibbs-oracle", &cfg, &[out.to_path_buf(), hist_path.clone()])?
        .write(&sibling(out, ".manifest.json"))?;

    let hist = simulate::occupation_histogram(&c, burn_in, steps, bins, range)?;
    let gibbs = GibbsDensity::new(&c.params, 1e-10)?;
    let tv = stats::tv_distance(&hist, |l, r| gibbs.mass(l, r))?;
    write_text(&hist_path, &hist.to_csv())?;
    let status = if tv < GIBBS_TV_THRESHOLD {
        "ok"
    } else {
        "insufficient sampling"
    };
    write_json(
        out,
        &GibbsOut {
            tv_distance: tv,
            threshold: GIBBS_TV_THRESHOLD,
            status,
            steps,
            burn_in,
            dt: c.dt,
            sigma: c.params.sigma,
            bins,
            range,
            histogram_csv: hist_path.display().to_string(),
        },
    )?;
    println!("tv distance {tv:.5} ({status})");
    Ok(())
}
