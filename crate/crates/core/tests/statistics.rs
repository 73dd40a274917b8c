use mflangevin::quadrature::QuantileTable;
use mflangevin::simulate::rng::NormalStream;
use mflangevin::simulate::ExitOutcome;
use mflangevin::stats::{exit_report, ks_vs_unit_exponential, w2_sample_vs_density};

fn std_normal() -> QuantileTable {
    QuantileTable::from_log_density(|x| -0.5 * x * x, 0.0, 12.0, 20_000)
}

#[test]
fn sample_from_the_law_is_close_in_w2() {
    let q = std_normal();
    let mut rng = NormalStream::new(5);
    let xs: Vec<f64> = (0..10_000).map(|_| rng.next()).collect();
    let d = w2_sample_vs_density(&xs, |p| q.quantile(p), 10_000).unwrap();
    assert!(d < 0.05, "W2 = {d}");
}

#[test]
fn point_mass_at_zero_gives_the_root_second_moment() {
    let q = std_normal();
    let d = w2_sample_vs_density(&vec![0.0; 1000], |p| q.quantile(p), 100_000).unwrap();
    assert!((d - 1.0).abs() < 5e-3, "W2 = {d}");
}

#[test]
fn exact_quantiles_are_close_in_ks() {
    let n = 1000;
    let ts: Vec<f64> = (1..=n).map(|i| -(1.0 - (i as f64 - 0.5) / n as f64).ln()).collect();
    assert!(ks_vs_unit_exponential(&ts).unwrap() < 0.01);
}

fn outcomes(times: &[f64], horizon: f64) -> Vec<ExitOutcome> {
    times
        .iter()
        .enumerate()
        .map(|(k, &t)| ExitOutcome {
            exit_time: t.min(horizon),
            exited: t < horizon,
            replica_index: k as u64,
            seed_stream: k as u64,
            error: None,
        })
        .collect()
}

#[test]
fn synthetic_exponential_report() {
    let mut rng = NormalStream::new(2024);
    let ts: Vec<f64> = (0..200).map(|_| -3.0 * (1.0 - rng.uniform()).ln()).collect();
    let r = exit_report(&outcomes(&ts, f64::INFINITY));
    assert_eq!(r.n_censored, 0);
    assert!(r.ks_distance.unwrap() < 0.096, "{r:?}");
    assert!((r.mean_exit.unwrap() - 3.0).abs() < 3.0 * r.mean_ci_halfwidth.unwrap());
}

#[test]
fn all_censored_report() {
    let r = exit_report(&outcomes(&[5.0, 6.0], 1.0));
    assert_eq!(r.n_censored, 2);
    assert!(r.mean_exit.is_none() && r.ks_distance.is_none());
}
