use std::f64::consts::PI;

use kinspec::norms::{lq_norm, weighted_samples_norm};
use kinspec::spectral::{forward, inverse, Field, TorusGrid};
use kinspec::transforms::{gamma_shear, twisted_convolution};
use proptest::prelude::*;

fn grid() -> TorusGrid {
    TorusGrid::new(1, 16, 16, 2.0 * PI, 6.0 * PI).unwrap()
}

fn field(values: Vec<f64>) -> Field {
    Field::new(grid(), values).unwrap()
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 256)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shear_is_an_isometry(v in values(), t in -3.0f64..3.0) {
        let s = forward(&field(v)).unwrap();
        let out = gamma_shear(&s, t).unwrap();
        prop_assert!((out.l2() - s.l2()).abs() <= 1e-12 * s.l2().max(1e-300));
    }

    #[test]
    fn shear_group_law(v in values(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let f = forward(&field(v)).unwrap();
        let two = gamma_shear(&gamma_shear(&f, s).unwrap(), t).unwrap();
        let one = gamma_shear(&f, s + t).unwrap();
        prop_assert!(two.sub(&one).l2() <= 1e-10 * f.l2().max(1e-300));
    }

    #[test]
    fn transform_round_trip(v in values()) {
        let f = field(v);
        prop_assert!(inverse(&forward(&f).unwrap()).unwrap().sub(&f).max_abs() < 1e-13);
    }

    #[test]
    fn minkowski(a in values(), b in values(), q in 1.0f64..4.0) {
        let (f, g) = (field(a), field(b));
        let mut sum = f.clone();
        sum.axpy(1.0, &g);
        prop_assert!(lq_norm(&sum, q).unwrap() <= lq_norm(&f, q).unwrap() + lq_norm(&g, q).unwrap() + 1e-12);
    }

    #[test]
    fn twisted_young(a in values(), b in values(), t in 0.0f64..2.5, q in 1.0f64..3.0) {
        let (f, g) = (field(a), field(b));
        let c = twisted_convolution(&f, &g, t).unwrap();
        prop_assert!(lq_norm(&c, q).unwrap() <= lq_norm(&f, 1.0).unwrap() * lq_norm(&g, q).unwrap() + 1e-10);
    }

    #[test]
    fn weighted_norm_is_homogeneous(vals in prop::collection::vec(0.0f64..5.0, 8), c in 0.1f64..10.0, p in 1.0f64..4.0, mu in 0.3f64..1.0) {
        let times: Vec<f64> = (1..=8).map(|j| j as f64 / 8.0).collect();
        let scaled: Vec<f64> = vals.iter().map(|v| c * v).collect();
        let a = weighted_samples_norm(&times, &vals, p, mu).unwrap();
        let b = weighted_samples_norm(&times, &scaled, p, mu).unwrap();
        prop_assert!((b - c * a).abs() <= 1e-12 * b.max(1.0));
    }
}
