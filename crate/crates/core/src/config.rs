//! Flat `key = value` run configuration.
//!
//! One entry per line, `#` starts a comment, keys are dotted. Lists are
//! comma-separated. Unknown keys and malformed values are errors that name
//! the key.
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `sigma` | noise level | 0.5 |
//! | `kappa` | interaction strength | 1 |
//! | `potential.kind` | `double_well` or `even_polynomial` | `double_well` |
//! | `potential.coefficients` | coefficients of `x^2, x^4, ...` | |
//! | `n_particles` | particles per replica | 100 |
//! | `dt` | time step | 0.01 |
//! | `horizon` | final time | 100 |
//! | `seed` | master seed | 0 |
//! | `init.kind` | `gaussian`, `point` or `file` | `gaussian` |
//! | `init.mean`, `init.variance` | gaussian initial law | 1, 0.25 |
//! | `init.x` | point initial law | 1 |
//! | `init.path` | one position per line | |
//! | `record_every` | steps between recorded points | 100 |
//! | `record_particles` | write snapshots | false |
//! | `drift_mode` | `original` or `modified` | `original` |
//! | `domain.a` | exit boundary | 0 |
//! | `replicas` | ensemble size | 100 |
//! | `threads` | worker threads, 0 = auto | 0 |
//! | `phase.sigma_min`, `phase.sigma_max`, `phase.sigma_step` | phase-diagram grid | 0.05, 1.0, 0.01 |
//! | `gibbs.steps`, `gibbs.burn_in` | single-particle run | 10000000, 100000 |
//! | `gibbs.bins`, `gibbs.lo`, `gibbs.hi` | occupation histogram | 50, -2.5, 2.5 |

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{ModelParams, PotentialSpec};
use crate::simulate::{DriftMode, InitLaw, SimConfig};

pub const KNOWN_KEYS: &[&str] = &[
    "sigma",
    "kappa",
    "potential.kind",
    "potential.coefficients",
    "n_particles",
    "dt",
    "horizon",
    "seed",
    "init.kind",
    "init.mean",
    "init.variance",
    "init.x",
    "init.path",
    "record_every",
    "record_particles",
    "drift_mode",
    "domain.a",
    "replicas",
    "threads",
    "phase.sigma_min",
    "phase.sigma_max",
    "phase.sigma_step",
    "gibbs.steps",
    "gibbs.burn_in",
    "gibbs.bins",
    "gibbs.lo",
    "gibbs.hi",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "line {}: expected key = value, got {line:?}",
                    i + 1
                )));
            };
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::File {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Sets or overrides a key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::InvalidConfig(format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(Error::InvalidConfig(format!("key `{key}` has an empty value")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("key `{key}`: cannot parse {v:?}"))),
        }
    }

    pub fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.entries.get(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|_| Error::InvalidConfig(format!("key `{key}`: cannot parse {v:?} as a list of numbers")))
    }

    /// Canonical text: sorted `key = value` lines. Equal configs give equal text.
    pub fn canonical(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn model(&self) -> Result<ModelParams> {
        let sigma = self.get("sigma", 0.5)?;
        let kappa = self.get("kappa", 1.0)?;
        let potential = match self.raw("potential.kind").unwrap_or("double_well") {
            "double_well" => PotentialSpec::double_well(),
            "even_polynomial" => {
                let c = self.get_list("potential.coefficients")?.ok_or_else(|| {
                    Error::InvalidConfig("key `potential.coefficients` is required for even_polynomial".into())
                })?;
                PotentialSpec::even_polynomial(c)
            }
            other => {
                return Err(Error::InvalidConfig(format!(
                    "key `potential.kind`: unknown kind {other:?}"
                )))
            }
        };
        let params = ModelParams {
            sigma,
            kappa,
            potential,
        };
        params.validate().into_result()?;
        Ok(params)
    }

    pub fn init_law(&self) -> Result<InitLaw> {
        Ok(match self.raw("init.kind").unwrap_or("gaussian") {
            "gaussian" => InitLaw::Gaussian {
                mean: self.get("init.mean", 1.0)?,
                variance: self.get("init.variance", 0.25)?,
            },
            "point" => InitLaw::Point(self.get("init.x", 1.0)?),
            "file" => InitLaw::FromFile(
                self.raw("init.path")
                    .ok_or_else(|| Error::InvalidConfig("key `init.path` is required for init.kind = file".into()))?
                    .into(),
            ),
            other => return Err(Error::InvalidConfig(format!("key `init.kind`: unknown kind {other:?}"))),
        })
    }

    /// Simulation settings in original drift mode; callers install a
    /// modified drift themselves.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let mut c = SimConfig::new(self.model()?, self.get("n_particles", 100usize)?);
        c.dt = self.get("dt", crate::simulate::DEFAULT_DT)?;
        c.horizon = self.get("horizon", 100.0)?;
        c.seed = self.get("seed", 0u64)?;
        c.init = self.init_law()?;
        c.record_every = self.get("record_every", 100usize)?;
        c.record_particles = self.get("record_particles", false)?;
        c.threads = self.get("threads", 0usize)?;
        c.drift_mode = DriftMode::Original;
        c.validate()?;
        Ok(c)
    }

    pub fn wants_modified_drift(&self) -> Result<bool> {
        match self.raw("drift_mode").unwrap_or("original") {
            "original" => Ok(false),
            "modified" => Ok(true),
            other => Err(Error::InvalidConfig(format!(
                "key `drift_mode`: unknown mode {other:?}"
            ))),
        }
    }

    pub fn sigma_grid(&self) -> Result<Vec<f64>> {
        let lo: f64 = self.get("phase.sigma_min", 0.05)?;
        let hi: f64 = self.get("phase.sigma_max", 1.0)?;
        let step: f64 = self.get("phase.sigma_step", 0.01)?;
        if !(lo > 0.0 && hi >= lo && step > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "key `phase.sigma_step`: bad grid {lo}..{hi} step {step}"
            )));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| lo + i as f64 * step).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let mut c = Config::parse("# comment\nsigma = 0.6\nkappa=2 # trailing\n\n").unwrap();
        assert_eq!(c.get("sigma", 0.0).unwrap(), 0.6);
        c.set("sigma", "0.7").unwrap();
        let m = c.model().unwrap();
        assert_eq!((m.sigma, m.kappa), (0.7, 2.0));
        assert_eq!(c.canonical(), "kappa = 2\nsigma = 0.7\n");
    }

    #[test]
    fn errors_name_the_key() {
        let e = Config::parse("sigmaa = 1").unwrap_err().to_string();
        assert!(e.contains("sigmaa"), "{e}");
        let e = Config::parse("sigma = abc").unwrap().model().unwrap_err().to_string();
        assert!(e.contains("sigma"), "{e}");
        let e = Config::parse("just words").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
        assert!(Config::parse("sigma = 0").unwrap().model().is_err());
    }

    #[test]
    fn polynomial_and_init() {
        let c = Config::parse(
            "potential.kind = even_polynomial\npotential.coefficients = -0.5, 0.25\ninit.kind = point\ninit.x = 2",
        )
        .unwrap();
        let m = c.model().unwrap();
        assert_eq!(m.potential.coefficients, vec![-0.5, 0.25]);
        assert_eq!(c.init_law().unwrap(), InitLaw::Point(2.0));
    }

    #[test]
    fn sigma_grid_default() {
        let g = Config::default().sigma_grid().unwrap();
        assert_eq!(g.len(), 96);
        assert!((g[95] - 1.0).abs() < 1e-12);
    }
}
