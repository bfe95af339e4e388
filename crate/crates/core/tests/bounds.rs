use std::sync::Arc;

use condrisk::bounds::{
    block_schedule, derived_thresholds, hypercube_covering, linear_covering_bound, scaling_check, theorem2_bound,
    BoundParams,
};
use condrisk::Error;

fn rel_close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs()
}

fn base(t: f64, n_samples: usize, k: usize, d: usize, b: f64) -> BoundParams {
    BoundParams {
        t,
        n_samples,
        k,
        d,
        b,
        k1: 1.0,
        k2: 1.0,
        lipschitz: 1.0,
        gamma: 1.0,
        d0: 1.0,
        d1: 1.0,
        d2: 1.0,
        loss_lipschitz: 1.0,
        risk_lipschitz: None,
        beta: Arc::new(|j| (-(j as f64)).exp()),
        covering: Arc::new(|_, _| 1.0),
        mu: 1,
        a: 1,
    }
}

#[test]
fn thresholds_match_high_precision_values() {
    // (t, d, b, K1, K2, L, gamma, D0, D2, L_H) -> (t1, t2, t3)
    #[rustfmt::skip]
    let cases = [
        ([0.6, 1.0, 0.1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
         [0.098_333_333_333_333_333, 0.000_153_645_833_333_333_33, 3_050.847_457_627_118_6]),
        ([0.9, 2.0, 0.05, 0.4, 0.2, 2.5, 0.5, 1.5, 3.0, 2.0],
         [0.224, 1.093_75e-5, 3_587_372_448.979_591_8]),
        ([0.3, 3.0, 0.01, 0.75, 0.2, 1.5, 1.0, 0.8, 10.0, 1.0],
         [0.0397, 8.270_833_333_333_333_3e-10, 11_335_012_594.458_438]),
        ([1.0, 1.0, 0.3, 0.398_942_280_401_432_7, 1.0, 0.241_970_724_519_143_4, 1.0, 1.0, 1.0, 1.0],
         [0.151_666_666_666_666_67, 0.001_782_056_038_995_476_8, 53.180_379_015_196_352]),
        ([0.05, 4.0, 0.02, 1.0, 0.5, 4.0, 0.25, 2.0, 0.5, 0.5],
         [0.0164, 8.2e-11, 2.186_954_087_876_681_7e40]),
    ];
    for (c, want) in cases {
        let p = BoundParams {
            k1: c[3],
            k2: c[4],
            lipschitz: c[5],
            gamma: c[6],
            d0: c[7],
            d2: c[8],
            loss_lipschitz: c[9],
            ..base(c[0], 10_000, 1, c[1] as usize, c[2])
        };
        let th = derived_thresholds(&p).unwrap();
        assert!(rel_close(th.t1, want[0], 1e-12), "t1 {} vs {}", th.t1, want[0]);
        assert!(rel_close(th.t2, want[1], 1e-12), "t2 {} vs {}", th.t2, want[1]);
        // t3 goes through a fractional power
        assert!(rel_close(th.t3, want[2], 1e-10), "t3 {} vs {}", th.t3, want[2]);
    }
}

#[test]
fn two_block_schedules_match_high_precision_values() {
    let p = BoundParams { mu: 100, a: 10, ..base(0.5, 4000, 1, 1, 0.2) };
    let r = theorem2_bound(&p).unwrap();
    assert!(rel_close(r.thresholds.t1, 0.076_666_666_666_666_667, 1e-13));
    assert!(rel_close(r.thresholds.t2, 0.000_239_583_333_333_333_33, 1e-13));
    assert!(rel_close(r.thresholds.t3, 978.260_869_565_217_39, 1e-13));
    assert!(rel_close(r.term1, 15_651.994_226_574_884, 1e-10), "{}", r.term1);
    assert!(rel_close(r.term2, 0.000_399_236_495_128_859_79, 1e-10), "{}", r.term2);
    assert!(rel_close(r.total, r.term1 + r.term2, 1e-15));
    assert_eq!(r.n, 3999);

    let p = BoundParams { mu: 200, a: 5, ..p };
    let r = theorem2_bound(&p).unwrap();
    assert!(rel_close(r.term1, 15_651.814_542_169_084, 1e-10), "{}", r.term1);
    assert!(rel_close(r.term2, 17.676_363_957_523_993, 1e-10), "{}", r.term2);
    assert!(rel_close(r.log_total, r.total.ln(), 1e-12));
}

#[test]
fn dependence_term_vanishes_exactly() {
    let single = BoundParams { mu: 1, a: 10, ..base(0.5, 4000, 1, 1, 0.2) };
    assert_eq!(theorem2_bound(&single).unwrap().term2, 0.0);
    let iid = BoundParams { mu: 100, a: 10, beta: Arc::new(|_| 0.0), ..single };
    let r = theorem2_bound(&iid).unwrap();
    assert_eq!(r.term2, 0.0);
    assert_eq!(r.total, r.term1);
}

#[test]
fn vacuous_and_invalid_inputs_are_reported() {
    let p = BoundParams { mu: 10, a: 10, ..base(0.1, 4000, 1, 1, 0.5) };
    assert!(matches!(theorem2_bound(&p), Err(Error::VacuousRegime { .. })));
    let p = BoundParams { mu: 1000, a: 10, ..base(0.5, 4000, 1, 1, 0.2) };
    assert!(matches!(theorem2_bound(&p), Err(Error::InvalidArgument(_))));
    let p = BoundParams { gamma: 1.5, ..base(0.5, 4000, 1, 1, 0.2) };
    assert!(theorem2_bound(&p).is_err());
}

#[test]
fn log_total_survives_overflow() {
    let p = BoundParams { mu: 1, a: 1, ..base(0.05, 100_000, 10, 4, 0.02) };
    let r = theorem2_bound(&p).unwrap();
    assert!(r.log_total.is_finite());
    assert!(r.log_total > 709.0);
    assert_eq!(r.total, f64::INFINITY);
}

#[test]
fn hypercube_covering_values() {
    assert_eq!(hypercube_covering(1, 0.5), 1.0);
    assert!(rel_close(hypercube_covering(2, 0.25), 8.0, 1e-14));
    assert!(rel_close(hypercube_covering(4, 0.1), 10f64.powi(4), 1e-12));
    assert_eq!(hypercube_covering(3, 10.0), 1.0);
}

#[test]
fn linear_covering_properties() {
    let (radius, dim) = (2.0, 2);
    let range = radius * 3f64.sqrt();
    assert_eq!(linear_covering_bound(range, radius, dim, 50), 1.0);
    assert_eq!(linear_covering_bound(10.0 * range, radius, dim, 50), 1.0);

    let thetas: Vec<f64> = (1..200).map(|i| range * i as f64 / 200.0).collect();
    for n in [1, 5, 100, 10_000] {
        let vals: Vec<f64> = thetas.iter().map(|t| linear_covering_bound(*t, radius, dim, n)).collect();
        assert!(vals.iter().all(|v| *v >= 1.0));
        assert!(vals.windows(2).all(|w| w[1] <= w[0]), "not monotone for n = {n}");
    }
    // bounded in n: the packing bound takes over
    let big = linear_covering_bound(0.01, radius, dim, 1_000_000);
    assert_eq!(big, linear_covering_bound(0.01, radius, dim, 10_000_000));
    // log-log slope -(dim + 1) in theta once the packing bound is active
    let slope = (linear_covering_bound(0.001, radius, dim, 1_000_000).ln()
        - linear_covering_bound(0.002, radius, dim, 1_000_000).ln())
        / 2f64.ln();
    assert!((slope - 3.0).abs() < 1e-9, "{slope}");
}

#[test]
fn block_schedules_respect_the_budget() {
    for n in [40, 97, 1000, 4096, 123_457] {
        for d in [1, 2, 3] {
            let (mu, a) = block_schedule(n, d, None).unwrap();
            assert!(4 * mu * a * d <= n);
            assert_eq!(mu * a, n / (4 * d));
            let (mu, a) = block_schedule(n, d, Some(2)).unwrap();
            assert_eq!(mu, 2);
            assert_eq!(a, n / (8 * d));
        }
    }
    assert!(block_schedule(7, 2, None).is_err());
    assert!(block_schedule(100, 1, Some(26)).is_err());
}

#[test]
fn scaling_rows_follow_the_schedule() {
    let template = BoundParams { t: 0.5, ..base(0.5, 10, 1, 1, 0.5) };
    let grid = [100, 1_000, 10_000, 100_000];
    let rows = scaling_check(&template, &grid);
    assert_eq!(rows.len(), grid.len());
    for row in &rows {
        let n = row.n_samples as f64;
        assert!(rel_close(row.b, n.powf(-1.0 / 6.0), 1e-14));
        assert_eq!(row.a, ((n.cbrt() / 2.0).round() as usize).max(1));
        assert_eq!(row.mu, row.n_samples / (4 * row.a));
        let r = row.result.as_ref().unwrap();
        assert!(r.log_total.is_finite());
    }
    // t1 grows toward t D0 / 6 as the bandwidth shrinks
    let t1: Vec<f64> = rows.iter().map(|r| r.result.as_ref().unwrap().thresholds.t1).collect();
    assert!(t1.windows(2).all(|w| w[1] > w[0]));
    assert!(t1[3] < 0.5 / 6.0);

    let vacuous = scaling_check(&BoundParams { t: 0.01, ..template }, &[100]);
    assert!(matches!(vacuous[0].result, Err(Error::VacuousRegime { .. })));
}
