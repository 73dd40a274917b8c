//! Euler–Maruyama integration of the `N`-particle system
//!
//! ```text
//! dX^i = -V'(X^i) dt - kappa (X^i - X̄) dt [- sigma^2 h'(X̄) dt] + sqrt(2) sigma dB^i
//! ```
//!
//! The bracketed term is present only in modified mode. A trajectory is a
//! deterministic function of its config and seed; replica `k` of an ensemble
//! draws from `stream_seed(seed, k)`, one normal per particle per step in
//! particle order, after the `N` normals used for the initial positions.

pub mod rng;

use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{ModelParams, PotentialKind};
use crate::modifier::{Domain, ModifiedDrift};
use crate::stats::Histogram;
use rng::{stream_seed, NormalStream};

/// Particles beyond this magnitude abort the run.
pub const BLOWUP_LIMIT: f64 = 1e6;
/// Largest time step accepted for the double well.
pub const MAX_DT_DOUBLE_WELL: f64 = 0.05;
pub const DEFAULT_DT: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitLaw {
    Gaussian { mean: f64, variance: f64 },
    Point(f64),
    FromFile(PathBuf),
}

#[derive(Clone, Debug)]
pub enum DriftMode {
    Original,
    Modified(Arc<ModifiedDrift>),
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub params: ModelParams,
    pub n_particles: usize,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    pub init: InitLaw,
    pub drift_mode: DriftMode,
    /// Steps between recorded points.
    pub record_every: usize,
    pub record_particles: bool,
    /// Worker threads for ensembles; `0` uses the global pool.
    pub threads: usize,
}

impl SimConfig {
    pub fn new(params: ModelParams, n_particles: usize) -> Self {
        Self {
            params,
            n_particles,
            dt: DEFAULT_DT,
            horizon: 1.0,
            seed: 0,
            init: InitLaw::Point(0.0),
            drift_mode: DriftMode::Original,
            record_every: 1,
            record_particles: false,
            threads: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().into_result()?;
        if self.n_particles == 0 {
            return Err(Error::InvalidConfig("n_particles must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive (got {})", self.dt)));
        }
        if !(self.horizon >= self.dt) {
            return Err(Error::InvalidConfig(format!(
                "horizon {} must be at least dt {}",
                self.horizon, self.dt
            )));
        }
        if self.params.potential.kind == PotentialKind::DoubleWell && self.dt > MAX_DT_DOUBLE_WELL {
            return Err(Error::InvalidConfig(format!(
                "dt {} exceeds {MAX_DT_DOUBLE_WELL} for the double well",
                self.dt
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1".into()));
        }
        if let InitLaw::Gaussian { variance, .. } = self.init {
            if !(variance >= 0.0) {
                return Err(Error::InvalidConfig(format!("init variance {variance} is negative")));
            }
        }
        Ok(())
    }

    pub fn n_steps(&self) -> u64 {
        (self.horizon / self.dt).round() as u64
    }
}

/// Sequential mean; shared by the integrator and the recorder so recorded
/// barycenters equal snapshot means bit for bit.
#[inline]
pub fn barycenter(particles: &[f64]) -> f64 {
    particles.iter().sum::<f64>() / particles.len() as f64
}

pub fn moment4(particles: &[f64]) -> f64 {
    particles.iter().map(|x| (x * x) * (x * x)).sum::<f64>() / particles.len() as f64
}

fn read_particles(path: &PathBuf) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap().trim();
        match field.parse::<f64>() {
            Ok(x) => out.push(x),
            // header row
            Err(_) if lineno == 0 => continue,
            Err(_) => {
                return Err(Error::File {
                    path: path.display().to_string(),
                    message: format!("line {}: cannot parse {field:?}", lineno + 1),
                })
            }
        }
    }
    Ok(out)
}

/// Initial positions: `N` i.i.d. draws from the initial law.
pub fn init_particles(config: &SimConfig, noise: &mut NormalStream) -> Result<Vec<f64>> {
    let n = config.n_particles;
    match &config.init {
        InitLaw::Point(x) => Ok(vec![*x; n]),
        InitLaw::Gaussian { mean, variance } => {
            let sd = variance.sqrt();
            Ok((0..n).map(|_| mean + sd * noise.next()).collect())
        }
        InitLaw::FromFile(path) => {
            let xs = read_particles(path)?;
            if xs.len() != n {
                return Err(Error::File {
                    path: path.display().to_string(),
                    message: format!("expected {n} particles, found {}", xs.len()),
                });
            }
            Ok(xs)
        }
    }
}

#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn step_kernel<G: Fn(f64) -> f64, const BIASED: bool>(
    grad: G,
    kappa: f64,
    xbar: f64,
    bias: f64,
    particles: &mut [f64],
    dt: f64,
    amp: f64,
    noise: &mut NormalStream,
) -> (f64, bool) {
    let mut sum = 0.0;
    let mut ok = true;
    for x in particles.iter_mut() {
        let xi = *x;
        let mut drift = grad(xi) + kappa * (xi - xbar);
        if BIASED {
            drift += bias;
        }
        let next = xi - drift * dt + amp * noise.next();
        ok &= next.abs() <= BLOWUP_LIMIT;
        sum += next;
        *x = next;
    }
    (sum, ok)
}

#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn kernel<const BIASED: bool>(
    params: &ModelParams,
    xbar: f64,
    bias: f64,
    particles: &mut [f64],
    dt: f64,
    amp: f64,
    noise: &mut NormalStream,
) -> (f64, bool) {
    let kappa = params.kappa;
    match params.potential.kind {
        PotentialKind::DoubleWell => {
            step_kernel::<_, BIASED>(|x| x * (x * x - 1.0), kappa, xbar, bias, particles, dt, amp, noise)
        }
        PotentialKind::EvenPolynomial => {
            let v = &params.potential;
            step_kernel::<_, BIASED>(|x| v.grad(x), kappa, xbar, bias, particles, dt, amp, noise)
        }
    }
}

/// One Euler–Maruyama step. The barycenter is computed once before the
/// update; the barycenter after the update is returned.
///
/// When `h'(x̄) = 0` the modified step runs the original kernel, so both
/// modes agree bit for bit while the barycenter stays in the domain.
pub fn em_step(
    params: &ModelParams,
    drift: &DriftMode,
    particles: &mut [f64],
    dt: f64,
    noise: &mut NormalStream,
) -> Result<f64> {
    let xbar = barycenter(particles);
    let bias = match drift {
        DriftMode::Original => 0.0,
        DriftMode::Modified(d) => params.temperature() * d.h_prime_interp(xbar),
    };
    let amp = (2.0 * dt).sqrt() * params.sigma;
    let (sum, ok) = if bias == 0.0 {
        kernel::<false>(params, xbar, bias, particles, dt, amp, noise)
    } else {
        kernel::<true>(params, xbar, bias, particles, dt, amp, noise)
    };
    if !ok {
        return Err(Error::NumericalBlowup { time: f64::NAN });
    }
    Ok(sum / particles.len() as f64)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub barycenter: Vec<f64>,
    pub moment4: Vec<f64>,
    /// `(time, positions)` at each recorded point when requested.
    pub snapshots: Vec<(f64, Vec<f64>)>,
}

impl TrajectoryRecord {
    fn push(&mut self, t: f64, particles: &[f64], with_particles: bool) {
        self.times.push(t);
        self.barycenter.push(barycenter(particles));
        self.moment4.push(moment4(particles));
        if with_particles {
            self.snapshots.push((t, particles.to_vec()));
        }
    }

    /// `t,xbar,moment4` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,xbar,moment4\n");
        for i in 0..self.times.len() {
            let _ = writeln!(out, "{},{},{}", self.times[i], self.barycenter[i], self.moment4[i]);
        }
        out
    }

    /// Mean of the recorded barycenter over `t in [t0, t1]`.
    pub fn time_average(&self, t0: f64, t1: f64) -> Option<f64> {
        let vals: Vec<f64> = self
            .times
            .iter()
            .zip(&self.barycenter)
            .filter(|(t, _)| **t >= t0 && **t <= t1)
            .map(|(_, x)| *x)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }
}

/// `index,x` rows of one snapshot.
pub fn snapshot_csv(particles: &[f64]) -> String {
    let mut out = String::from("index,x\n");
    for (i, x) in particles.iter().enumerate() {
        let _ = writeln!(out, "{i},{x}");
    }
    out
}

/// A single replica's state and random stream.
#[derive(Clone, Debug)]
pub struct Replica {
    pub particles: Vec<f64>,
    pub noise: NormalStream,
    pub steps: u64,
}

impl Replica {
    pub fn new(config: &SimConfig, replica: u64) -> Result<Self> {
        Self::with_stream(config, NormalStream::new(stream_seed(config.seed, replica)))
    }

    /// The replica with negated initial positions and negated noise.
    pub fn mirrored(config: &SimConfig, replica: u64) -> Result<Self> {
        let mut r = Self::with_stream(config, NormalStream::mirrored(stream_seed(config.seed, replica)))?;
        for x in r.particles.iter_mut() {
            *x = match config.init {
                // draws are already negated
                InitLaw::Gaussian { mean, .. } => *x - 2.0 * mean,
                _ => -*x,
            };
        }
        Ok(r)
    }

    fn with_stream(config: &SimConfig, mut noise: NormalStream) -> Result<Self> {
        config.validate()?;
        let particles = init_particles(config, &mut noise)?;
        Ok(Self {
            particles,
            noise,
            steps: 0,
        })
    }

    pub fn time(&self, dt: f64) -> f64 {
        self.steps as f64 * dt
    }

    pub fn step(&mut self, config: &SimConfig) -> Result<f64> {
        let out = em_step(
            &config.params,
            &config.drift_mode,
            &mut self.particles,
            config.dt,
            &mut self.noise,
        );
        self.steps += 1;
        out.map_err(|_| Error::NumericalBlowup {
            time: self.time(config.dt),
        })
    }
}

/// Integrates to the horizon, recording at `t = 0` and every `record_every`
/// steps (and at the final step).
pub fn run_trajectory(config: &SimConfig) -> Result<TrajectoryRecord> {
    let replica = Replica::new(config, 0)?;
    run_replica_trajectory(config, replica)
}

pub fn run_replica_trajectory(config: &SimConfig, mut replica: Replica) -> Result<TrajectoryRecord> {
    let n_steps = config.n_steps();
    let mut rec = TrajectoryRecord::default();
    rec.push(0.0, &replica.particles, config.record_particles);
    while replica.steps < n_steps {
        replica.step(config)?;
        if replica.steps.is_multiple_of(config.record_every as u64) || replica.steps == n_steps {
            rec.push(replica.time(config.dt), &replica.particles, config.record_particles);
        }
    }
    Ok(rec)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExitOutcome {
    /// First step time with the barycenter outside the domain, or the horizon.
    pub exit_time: f64,
    pub exited: bool,
    #[serde(rename = "replica")]
    pub replica_index: u64,
    pub seed_stream: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Runs replica `k` until the barycenter leaves the domain (checked at step
/// boundaries) or the horizon is reached.
pub fn run_exit_replica(config: &SimConfig, domain: Domain, replica_index: u64) -> Result<ExitOutcome> {
    let seed_stream = stream_seed(config.seed, replica_index);
    let mut replica = Replica::new(config, replica_index)?;
    let n_steps = config.n_steps();
    let horizon = n_steps as f64 * config.dt;
    let mut xbar = barycenter(&replica.particles);
    while domain.contains(xbar) {
        if replica.steps >= n_steps {
            return Ok(ExitOutcome {
                exit_time: horizon,
                exited: false,
                replica_index,
                seed_stream,
                error: None,
            });
        }
        xbar = replica.step(config)?;
    }
    Ok(ExitOutcome {
        exit_time: replica.time(config.dt),
        exited: true,
        replica_index,
        seed_stream,
        error: None,
    })
}

/// Exit time from `[domain_a, ∞)` for replica 0.
pub fn run_exit(config: &SimConfig, domain_a: f64) -> Result<ExitOutcome> {
    run_exit_replica(config, Domain::AtLeast(domain_a), 0)
}

/// Runs `f` on a pool of `threads` workers, or on the global pool when `threads` is 0.
pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Independent replicas run in parallel. Output is ordered by replica index
/// and does not depend on scheduling. A failing replica is reported as
/// censored with its error message; the rest of the ensemble proceeds.
pub fn run_exit_ensemble_in(config: &SimConfig, domain: Domain, n_replicas: usize) -> Result<Vec<ExitOutcome>> {
    config.validate()?;
    if n_replicas == 0 {
        return Err(Error::InvalidConfig("n_replicas must be at least 1".into()));
    }
    let outcomes = with_pool(config.threads, || {
        (0..n_replicas as u64)
            .into_par_iter()
            .map(|k| match run_exit_replica(config, domain, k) {
                Ok(o) => o,
                Err(e) => ExitOutcome {
                    exit_time: f64::NAN,
                    exited: false,
                    replica_index: k,
                    seed_stream: stream_seed(config.seed, k),
                    error: Some(e.to_string()),
                },
            })
            .collect()
    });
    Ok(outcomes)
}

pub fn run_exit_ensemble(config: &SimConfig, domain_a: f64, n_replicas: usize) -> Result<Vec<ExitOutcome>> {
    run_exit_ensemble_in(config, Domain::AtLeast(domain_a), n_replicas)
}

/// Runs `n_seeds` trajectories with seeds `seed, seed + 1, ...` in parallel.
pub fn run_trajectories(config: &SimConfig, n_seeds: usize) -> Result<Vec<TrajectoryRecord>> {
    with_pool(config.threads, || {
        (0..n_seeds as u64)
            .into_par_iter()
            .map(|k| {
                let mut c = config.clone();
                c.seed = config.seed.wrapping_add(k);
                run_trajectory(&c)
            })
            .collect()
    })
}

/// Occupation histogram of a single particle: positions after each step
/// following `burn_in` steps.
pub fn occupation_histogram(
    config: &SimConfig,
    burn_in: u64,
    steps: u64,
    bins: usize,
    range: (f64, f64),
) -> Result<Histogram> {
    let mut hist = Histogram::new(bins, range)?;
    let mut c = config.clone();
    c.n_particles = 1;
    let mut replica = Replica::new(&c, 0)?;
    for _ in 0..burn_in {
        replica.step(&c)?;
    }
    for _ in 0..steps {
        replica.step(&c)?;
        hist.add(replica.particles[0]);
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(sigma: f64, n: usize) -> SimConfig {
        let mut c = SimConfig::new(ModelParams::double_well(sigma), n);
        c.horizon = 1.0;
        c.seed = 11;
        c
    }

    #[test]
    fn config_validation() {
        let mut c = base(0.5, 10);
        assert!(c.validate().is_ok());
        c.dt = 0.06;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c.dt = 0.01;
        c.n_particles = 0;
        assert!(c.validate().is_err());
        c.n_particles = 3;
        c.horizon = 0.001;
        assert!(c.validate().is_err());
        c.horizon = 1.0;
        c.params.sigma = 0.0;
        assert!(matches!(c.validate(), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn point_init() {
        let mut c = base(0.5, 3);
        c.init = InitLaw::Point(1.0);
        let mut s = NormalStream::new(0);
        assert_eq!(init_particles(&c, &mut s).unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn gaussian_init_mean() {
        let mut c = base(0.5, 10_000);
        c.init = InitLaw::Gaussian {
            mean: 1.0,
            variance: 0.25,
        };
        let mut s = NormalStream::new(stream_seed(5, 0));
        let xs = init_particles(&c, &mut s).unwrap();
        assert!((barycenter(&xs) - 1.0).abs() < 3.0 * 0.5 / 100.0);

        c.init = InitLaw::Gaussian {
            mean: -1.0,
            variance: 0.25,
        };
        let mut m = NormalStream::mirrored(stream_seed(5, 0));
        let ys = init_particles(&c, &mut m).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn zero_noise_equilibrium() {
        let mut p = ModelParams::double_well(0.5);
        p.sigma = 0.0;
        let mut xs = vec![1.0];
        let mut s = NormalStream::new(1);
        for _ in 0..100 {
            em_step(&p, &DriftMode::Original, &mut xs, 0.01, &mut s).unwrap();
        }
        assert_eq!(xs, vec![1.0]);
    }

    #[test]
    fn zero_noise_antisymmetry() {
        let mut p = ModelParams::double_well(0.5);
        p.sigma = 0.0;
        let mut xs = vec![0.3, -0.3];
        let mut s = NormalStream::new(1);
        for _ in 0..500 {
            let xbar = em_step(&p, &DriftMode::Original, &mut xs, 0.01, &mut s).unwrap();
            assert_eq!(xbar, 0.0);
            assert_eq!(xs[0], -xs[1]);
        }
        assert!(xs[0] > 0.0 && xs[0] < 0.3);
    }

    #[test]
    fn blowup_is_detected() {
        let mut c = base(0.5, 4);
        c.dt = 0.05;
        c.init = InitLaw::Point(50.0);
        let err = run_trajectory(&c).unwrap_err();
        match err {
            Error::NumericalBlowup { time } => assert!(time > 0.0 && time < 1.0),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn trajectory_is_deterministic_and_consistent() {
        let mut c = base(0.5, 50);
        c.init = InitLaw::Gaussian {
            mean: 1.0,
            variance: 0.25,
        };
        c.record_every = 7;
        c.record_particles = true;
        let a = run_trajectory(&c).unwrap();
        let b = run_trajectory(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(*a.times.last().unwrap(), 1.0);
        assert!(a.times.windows(2).all(|w| w[0] < w[1]));
        for (k, (t, xs)) in a.snapshots.iter().enumerate() {
            assert_eq!(*t, a.times[k]);
            assert_eq!(barycenter(xs), a.barycenter[k]);
        }
    }

    #[test]
    fn unreachable_boundary_is_censored() {
        let mut c = base(0.5, 20);
        c.init = InitLaw::Point(1.0);
        c.horizon = 2.0;
        let out = run_exit(&c, -1e6).unwrap();
        assert!(!out.exited);
        assert_eq!(out.exit_time, 2.0);
    }

    #[test]
    fn ensemble_is_ordered_and_reproducible() {
        let mut c = base(0.6, 10);
        c.init = InitLaw::Point(0.5);
        c.horizon = 50.0;
        let a = run_exit_ensemble(&c, 0.1, 4).unwrap();
        let b = run_exit_ensemble(&c, 0.1, 4).unwrap();
        assert_eq!(a, b);
        for (k, o) in a.iter().enumerate() {
            assert_eq!(o.replica_index, k as u64);
            assert!(o.exit_time <= c.horizon);
            assert_eq!(o.exited, o.exit_time < c.horizon);
        }
        assert!(run_exit_ensemble(&c, 0.1, 0).is_err());
        c.threads = 2;
        assert_eq!(run_exit_ensemble(&c, 0.1, 4).unwrap(), a);
    }

    #[test]
    fn missing_init_file() {
        let mut c = base(0.5, 2);
        c.init = InitLaw::FromFile("/nonexistent/particles.csv".into());
        assert!(matches!(run_trajectory(&c), Err(Error::File { .. })));
    }
}
