//! Empirical-measure statistics: 1-D Wasserstein distances, moments,
//! histograms and exit-time reports.

use serde::Serialize;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::simulate::ExitOutcome;

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// W2 between two equal-weight empirical measures of the same size.
pub fn w2_empirical_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (a, b) = (sorted(a), sorted(b));
    let ss: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((ss / a.len() as f64).sqrt())
}

/// W2 between a sample and a law given by its quantile function.
///
/// Both measures are discretised at the midpoint ranks `(i + 1/2)/n_quantiles`;
/// the sample's quantiles are read from its sorted order statistics.
pub fn w2_sample_vs_density<Q: Fn(f64) -> f64>(sample: &[f64], quantile_fn: Q, n_quantiles: usize) -> Result<f64> {
    if sample.is_empty() || n_quantiles == 0 {
        return Err(Error::EmptyInput);
    }
    let s = sorted(sample);
    let n = s.len();
    let ss: f64 = (0..n_quantiles)
        .map(|i| {
            let p = (i as f64 + 0.5) / n_quantiles as f64;
            let j = ((p * n as f64) as usize).min(n - 1);
            let d = s[j] - quantile_fn(p);
            d * d
        })
        .sum();
    Ok((ss / n_quantiles as f64).sqrt())
}

/// Kolmogorov–Smirnov distance to the unit exponential law.
pub fn ks_vs_unit_exponential(times: &[f64]) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::EmptyInput);
    }
    let s = sorted(times);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &t) in s.iter().enumerate() {
        let cdf = -(-t.max(0.0)).exp_m1();
        d = d.max((i as f64 / n - cdf).abs());
        d = d.max(((i + 1) as f64 / n - cdf).abs());
    }
    Ok(d.min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExitTimeReport {
    pub n_total: usize,
    pub n_censored: usize,
    /// Mean over uncensored times.
    pub mean_exit: Option<f64>,
    pub ks_distance: Option<f64>,
    /// 95% normal-approximation half-width of `mean_exit`.
    pub mean_ci_halfwidth: Option<f64>,
    /// Set when some replicas are censored; the mean is then biased low.
    pub censoring_caveat: bool,
    /// Replicas that failed with an error; counted as censored.
    pub n_failed: usize,
}

impl ExitTimeReport {
    pub fn censored_fraction(&self) -> f64 {
        self.n_censored as f64 / self.n_total as f64
    }
}

pub fn exit_report(outcomes: &[ExitOutcome]) -> ExitTimeReport {
    let times: Vec<f64> = outcomes.iter().filter(|o| o.exited).map(|o| o.exit_time).collect();
    let n_total = outcomes.len();
    let n_censored = n_total - times.len();
    let n_failed = outcomes.iter().filter(|o| o.error.is_some()).count();
    let (mut mean_exit, mut ks_distance, mut mean_ci_halfwidth) = (None, None, None);
    if !times.is_empty() {
        let n = times.len() as f64;
        let mean = times.iter().sum::<f64>() / n;
        mean_exit = Some(mean);
        if times.len() > 1 {
            let var = times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n - 1.0);
            mean_ci_halfwidth = Some(1.96 * (var / n).sqrt());
        }
        if mean > 0.0 {
            let normalized: Vec<f64> = times.iter().map(|t| t / mean).collect();
            ks_distance = ks_vs_unit_exponential(&normalized).ok();
        }
    }
    ExitTimeReport {
        n_total,
        n_censored,
        mean_exit,
        ks_distance,
        mean_ci_halfwidth,
        censoring_caveat: n_censored > 0,
        n_failed,
    }
}

/// k-th absolute empirical moment.
pub fn moment_k(sample: &[f64], k: i32) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(sample.iter().map(|x| x.abs().powi(k)).sum::<f64>() / sample.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    /// Samples outside `[lo, hi]`.
    pub outside: u64,
}

impl Histogram {
    pub fn new(bins: usize, range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = range;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || bins == 0 {
            return Err(Error::BadRange(lo, hi));
        }
        Ok(Self {
            lo,
            hi,
            counts: vec![0; bins],
            outside: 0,
        })
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if !(x >= self.lo && x <= self.hi) {
            self.outside += 1;
            return;
        }
        let bins = self.counts.len();
        let i = (((x - self.lo) / (self.hi - self.lo) * bins as f64) as usize).min(bins - 1);
        self.counts[i] += 1;
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let w = self.width();
        let right = if i + 1 == self.bins() {
            self.hi
        } else {
            self.lo + (i + 1) as f64 * w
        };
        (self.lo + i as f64 * w, right)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.outside
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            let (l, r) = self.edges(i);
            let _ = writeln!(out, "{l},{r},{c}");
        }
        out
    }
}

/// Equal-width histogram; bins are left-closed and the last one is also
/// right-closed.
pub fn histogram(sample: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    let mut h = Histogram::new(bins, range)?;
    for &x in sample {
        h.add(x);
    }
    Ok(h)
}

/// Total variation between a histogram and a probability law given by its
/// mass on intervals. Mass of either measure outside the range counts too.
pub fn tv_distance<M: FnMut(f64, f64) -> Result<f64>>(hist: &Histogram, mut mass: M) -> Result<f64> {
    let total = hist.total();
    if total == 0 {
        return Err(Error::EmptyInput);
    }
    let n = total as f64;
    let mut inside_q = 0.0;
    let mut sum = 0.0;
    for (i, &c) in hist.counts.iter().enumerate() {
        let (l, r) = hist.edges(i);
        let q = mass(l, r)?;
        inside_q += q;
        sum += (c as f64 / n - q).abs();
    }
    sum += (hist.outside as f64 / n - (1.0 - inside_q).max(0.0)).abs();
    Ok(0.5 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exited(t: f64) -> ExitOutcome {
        ExitOutcome {
            exit_time: t,
            exited: true,
            replica_index: 0,
            seed_stream: 0,
            error: None,
        }
    }

    #[test]
    fn w2_examples() {
        assert_eq!(w2_empirical_1d(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(w2_empirical_1d(&[0.0], &[1.0]).unwrap(), 1.0);
        assert!(matches!(
            w2_empirical_1d(&[0.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn w2_point_mass_vs_law() {
        // logistic quantile function
        let q = |p: f64| (p / (1.0 - p)).ln();
        let d = w2_sample_vs_density(&vec![0.0; 100], q, 100_000).unwrap();
        // E X^2 for the logistic law is pi^2/3
        let expected = (std::f64::consts::PI.powi(2) / 3.0).sqrt();
        assert!((d - expected).abs() < 1e-2, "{d} vs {expected}");
    }

    #[test]
    fn ks_examples() {
        let n = 1000;
        let t: Vec<f64> = (1..=n).map(|i| -(1.0 - (i as f64 - 0.5) / n as f64).ln()).collect();
        assert!(ks_vs_unit_exponential(&t).unwrap() < 0.01);
        let ones = vec![1.0; 10];
        assert!((ks_vs_unit_exponential(&ones).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((ks_vs_unit_exponential(&[2f64.ln()]).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(ks_vs_unit_exponential(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn report_degenerate_and_scale_invariant() {
        let censored = ExitOutcome {
            exited: false,
            ..exited(5.0)
        };
        let r = exit_report(&[censored.clone(), censored]);
        assert_eq!(r.n_censored, 2);
        assert!(r.mean_exit.is_none() && r.ks_distance.is_none());
        assert!(r.censoring_caveat);

        let t: Vec<ExitOutcome> = [0.3, 1.2, 0.7, 2.5, 0.1].iter().map(|&t| exited(t)).collect();
        let t10: Vec<ExitOutcome> = t.iter().map(|o| exited(o.exit_time * 10.0)).collect();
        let (a, b) = (exit_report(&t), exit_report(&t10));
        assert!((a.ks_distance.unwrap() - b.ks_distance.unwrap()).abs() < 1e-14);
        assert!(!a.censoring_caveat);
        assert_eq!(a.n_censored, 0);
    }

    #[test]
    fn histogram_convention() {
        let h = histogram(&[0.0, 0.5, 1.0], 2, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts, vec![1, 2]);
        let h = histogram(&[0.0, 0.25, 1.0], 2, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts, vec![2, 1]);
        assert!(matches!(histogram(&[0.0], 2, (1.0, 0.0)), Err(Error::BadRange(..))));
        assert!(h.to_csv().starts_with("bin_left,bin_right,count\n0,0.5,2\n"));
    }

    #[test]
    fn moments() {
        assert_eq!(moment_k(&[-1.0, 1.0], 4).unwrap(), 1.0);
        assert!(moment_k(&[], 2).is_err());
    }

    #[test]
    fn tv_of_density_with_itself() {
        // exact bin masses of the uniform law on [0, 1] with 10 bins
        let h = Histogram {
            lo: 0.0,
            hi: 1.0,
            counts: vec![1; 10],
            outside: 0,
        };
        let tv = tv_distance(&h, |l, r| Ok(r - l)).unwrap();
        assert!(tv < 1e-10);
        let tv = tv_distance(&h, |l, r| Ok(if r <= 0.5 { 2.0 * (r - l) } else { 0.0 })).unwrap();
        assert!((tv - 0.5).abs() < 1e-12);
    }
}
