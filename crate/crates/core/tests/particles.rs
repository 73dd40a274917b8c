use mflangevin::fixedpoint::iterate_to_fixed_point;
use mflangevin::simulate::rng::NormalStream;
use mflangevin::simulate::{self, barycenter, init_particles, moment4, InitLaw, SimConfig};
use mflangevin::ModelParams;

#[test]
fn gaussian_init_mean_within_clt_bound() {
    let mut c = SimConfig::new(ModelParams::double_well(0.5), 10_000);
    c.init = InitLaw::Gaussian {
        mean: 1.0,
        variance: 0.25,
    };
    let mut rng = NormalStream::new(7);
    let xs = init_particles(&c, &mut rng).unwrap();
    assert!((barycenter(&xs) - 1.0).abs() < 3.0 * 0.5 / 100.0);
}

#[test]
fn fourth_moment_stays_bounded_from_far_starts() {
    for x0 in [10.0, 50.0] {
        let mut c = SimConfig::new(ModelParams::double_well(0.5), 500);
        c.dt = 1e-4;
        c.horizon = 1.0;
        c.init = InitLaw::Point(x0);
        c.record_every = 1000;
        let rec = simulate::run_trajectory(&c).unwrap();
        let last = *rec.moment4.last().unwrap();
        assert!(last < 100.0, "x0 = {x0}: moment4(1) = {last}");
        assert!(rec.moment4.iter().all(|m| m.is_finite()));
    }
}

#[test]
fn blow_up_is_reported_with_its_time() {
    let mut c = SimConfig::new(ModelParams::double_well(0.5), 10);
    c.dt = 0.05;
    c.horizon = 10.0;
    c.init = InitLaw::Point(50.0);
    match simulate::run_trajectory(&c) {
        Err(mflangevin::Error::NumericalBlowup { time }) => assert!(time > 0.0 && time <= 10.0),
        other => panic!("expected blow-up, got {other:?}"),
    }
}

#[test]
fn large_system_at_the_stable_point_does_not_exit() {
    let p = ModelParams::double_well(0.5);
    let mp = iterate_to_fixed_point(&p, 1.0, 1e-13, 1_000_000).unwrap().0;
    let mut c = SimConfig::new(p, 2000);
    c.init = InitLaw::Point(mp);
    c.horizon = 1e3;
    c.seed = 3;
    let out = simulate::run_exit(&c, 0.0).unwrap();
    assert!(!out.exited);
    assert_eq!(out.exit_time, 1e3);
}

#[test]
fn ensembles_repeat_exactly() {
    let mut c = SimConfig::new(ModelParams::double_well(0.6), 20);
    c.init = InitLaw::Point(0.57);
    c.horizon = 500.0;
    c.seed = 11;
    let a = simulate::run_exit_ensemble(&c, 0.1, 4).unwrap();
    let b = simulate::run_exit_ensemble(&c, 0.1, 4).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.iter().map(|o| o.replica_index).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
}

#[test]
fn mirrored_csv_is_the_negated_csv() {
    let mut c = SimConfig::new(ModelParams::double_well(0.5), 50);
    c.init = InitLaw::Point(0.3);
    c.horizon = 5.0;
    let a = simulate::run_replica_trajectory(&c, simulate::Replica::new(&c, 0).unwrap()).unwrap();
    let b = simulate::run_replica_trajectory(&c, simulate::Replica::mirrored(&c, 0).unwrap()).unwrap();
    for (x, y) in a.barycenter.iter().zip(&b.barycenter) {
        assert!((x + y).abs() <= 1e-12);
    }
    assert_eq!(a.moment4, b.moment4);
    let _ = moment4(&[1.0]);
}
