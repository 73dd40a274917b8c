use mflangevin::model::{potential_grad, potential_value, PotentialSpec};
use mflangevin::quadrature::{f_of_m, DEFAULT_TOL};
use mflangevin::stats::{ks_vs_unit_exponential, w2_empirical_1d};
use mflangevin::ModelParams;
use proptest::prelude::*;

fn samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, n)
}

proptest! {
    #[test]
    fn w2_is_symmetric((a, b) in (1usize..40).prop_flat_map(|n| (samples(n), samples(n)))) {
        let ab = w2_empirical_1d(&a, &b).unwrap();
        let ba = w2_empirical_1d(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!(ab >= 0.0);
    }

    #[test]
    fn w2_triangle_inequality((a, b, c) in (1usize..40).prop_flat_map(|n| (samples(n), samples(n), samples(n)))) {
        let ab = w2_empirical_1d(&a, &b).unwrap();
        let bc = w2_empirical_1d(&b, &c).unwrap();
        let ac = w2_empirical_1d(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9);
    }

    #[test]
    fn w2_ignores_order((a, b) in (1usize..40).prop_flat_map(|n| (samples(n), samples(n))), rot in 0usize..40) {
        let mut r = a.clone();
        let k = rot % r.len();
        r.rotate_left(k);
        r.reverse();
        prop_assert_eq!(w2_empirical_1d(&a, &b).unwrap(), w2_empirical_1d(&r, &b).unwrap());
    }

    #[test]
    fn ks_lies_in_the_unit_interval(ts in prop::collection::vec(0.0f64..1e6, 1..100)) {
        let d = ks_vs_unit_exponential(&ts).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn potential_is_even(x in -1e3f64..1e3) {
        let s = PotentialSpec::double_well();
        prop_assert_eq!(potential_value(&s, x), potential_value(&s, -x));
        prop_assert_eq!(potential_grad(&s, x), -potential_grad(&s, -x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn f_is_odd(m in -8.0f64..8.0, sigma in 0.2f64..1.2) {
        let p = ModelParams::double_well(sigma);
        let a = f_of_m(&p, m, DEFAULT_TOL).unwrap();
        let b = f_of_m(&p, -m, DEFAULT_TOL).unwrap();
        prop_assert!((a + b).abs() < 1e-9, "f({m}) = {a}, f(-{m}) = {b}");
    }
}
