use condrisk::estimator::{history_weights, WeightVector, Weighting};
use condrisk::learners::{ecrm_fit, ecrm_fit_weighted, erm_fit, sliding_window_fit, WlsProblem};
use condrisk::processes::{
    conditional_risk_oracle, forward_posterior, random_chain, simulate, stationary_distribution, AffineLabel,
    EmissionBox, OracleConfig, StatePosterior,
};
use condrisk::{HiddenMarkovSpec, Hypothesis, LossKind, SampleSequence, TrainConfig};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_state(flip: f64) -> HiddenMarkovSpec {
    HiddenMarkovSpec {
        transition: vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]],
        affine_labels: vec![AffineLabel { a: [1.0, 0.0], c: -5.0 }, AffineLabel { a: [-1.0, 0.0], c: 5.0 }],
        emission_box: EmissionBox::default(),
        initial_distribution: vec![0.5, 0.5],
    }
}

fn assert_same(a: &Hypothesis, b: &Hypothesis, tol: f64) {
    for (x, y) in a.weights.iter().zip(&b.weights) {
        assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
    }
    assert!((a.bias - b.bias).abs() <= tol, "{a:?} vs {b:?}");
}

/// Least squares through an SVD of the design matrix.
fn svd_fit(seq: &SampleSequence, rows: std::ops::Range<usize>) -> Hypothesis {
    let n = rows.len();
    let x = DMatrix::from_fn(n, 3, |r, c| if c < 2 { seq.features(rows.start + r)[c] } else { 1.0 });
    let y = DVector::from_fn(n, |r, _| f64::from(seq.label(rows.start + r)));
    let beta = x.svd(true, true).solve(&y, 1e-14).unwrap();
    Hypothesis::new(vec![beta[0], beta[1]], beta[2], LossKind::ZeroOne)
}

#[test]
fn uniform_weights_reduce_to_erm_on_successors() {
    let seq = simulate(&random_chain(3), 400, 5).unwrap();
    for d in [1, 2, 5] {
        let u = WeightVector::uniform(d, seq.len());
        let ecrm = ecrm_fit_weighted(&seq, &u, 1e-8, LossKind::ZeroOne).unwrap();
        let erm = erm_fit(&seq.suffix(d), 1e-8).unwrap();
        assert_same(&ecrm, &erm, 1e-8);
    }
}

#[test]
fn erm_matches_svd_solution() {
    let seq = simulate(&random_chain(9), 300, 2).unwrap();
    assert_same(&erm_fit(&seq, 0.0).unwrap(), &svd_fit(&seq, 0..300), 1e-10);
}

#[test]
fn full_length_window_is_erm() {
    let seq = simulate(&random_chain(4), 120, 8).unwrap();
    let window = sliding_window_fit(&seq, seq.len(), 1e-8).unwrap();
    assert_same(&window, &erm_fit(&seq, 1e-8).unwrap(), 1e-12);
}

#[test]
fn short_window_matches_svd_solution() {
    let seq = simulate(&random_chain(6), 50, 3).unwrap();
    let got = sliding_window_fit(&seq, 4, 0.0).unwrap();
    assert_same(&got, &svd_fit(&seq, 46..50), 1e-10);
}

#[test]
fn fit_ignores_weight_scale() {
    let seq = simulate(&random_chain(1), 200, 4).unwrap();
    let w = history_weights(&seq, 3, &Weighting::StratifiedSet { base_width: 0.3 }, seq.last_history(3).unwrap())
        .unwrap();
    let base = ecrm_fit_weighted(&seq, &w, 1e-6, LossKind::ZeroOne).unwrap();
    for c in [1e-6, 0.37, 1e5] {
        let scaled = ecrm_fit_weighted(&seq, &w.scaled(c), 1e-6, LossKind::ZeroOne).unwrap();
        assert_same(&base, &scaled, 1e-10);
    }
}

#[test]
fn solution_is_a_local_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 80;
    let features: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random(), rng.random()]).collect();
    let labels: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let prob = WlsProblem::new(features, labels, weights, 0.01).unwrap();
    let h = prob.solve(LossKind::ZeroOne).unwrap();
    let best = prob.objective(&h);
    for coord in 0..3 {
        for delta in [-1e-3, 1e-3] {
            let mut g = h.clone();
            if coord < 2 {
                g.weights[coord] += delta;
            } else {
                g.bias += delta;
            }
            assert!(prob.objective(&g) > best, "coordinate {coord} step {delta}");
        }
    }
}

#[test]
fn separable_data_is_fit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let mut rows = Vec::new();
    for i in 0..200 {
        let right = i % 2 == 0;
        let x1 = if right { rng.random_range(0.8..0.95) } else { rng.random_range(0.05..0.2) };
        rows.push(vec![x1, rng.random::<f64>(), if right { 1.0 } else { 0.0 }]);
    }
    let seq = SampleSequence::from_rows(&rows).unwrap();
    let h = erm_fit(&seq, 1e-8).unwrap();
    assert!((0..seq.len()).all(|i| h.predict(seq.features(i)) == seq.label(i)));
}

#[test]
fn balanced_opposite_states_give_a_flat_fit() {
    let spec = two_state(0.5);
    let seq = simulate(&spec, 20_000, 11).unwrap();
    let h = erm_fit(&seq, 1e-8).unwrap();
    assert!(h.weights.iter().all(|w| w.abs() < 0.05), "{h:?}");
    let pi = StatePosterior::new(stationary_distribution(&spec.transition).unwrap()).unwrap();
    let risk = conditional_risk_oracle(&spec, &pi, &h, &OracleConfig::default()).unwrap();
    assert!((risk - 0.5).abs() < 0.05, "{risk}");
}

#[test]
fn sticky_states_are_learned_conditionally() {
    // each state labels by the sign of x1 - 5, in opposite directions
    let spec = two_state(0.02);
    let seq = simulate(&spec, 3_000, 21).unwrap();
    let d = 4;
    let cfg = TrainConfig::new(d, Weighting::StratifiedSet { base_width: 0.3 });
    let h = ecrm_fit(&seq, seq.last_history(d).unwrap(), &cfg).unwrap();
    let post = forward_posterior(&spec, &seq).unwrap();
    let risk = conditional_risk_oracle(&spec, &post, &h, &OracleConfig::default()).unwrap();
    assert!(risk < 0.05, "conditional risk {risk}");
    // the unconditional fit cannot do this
    let erm = erm_fit(&seq, 1e-8).unwrap();
    let erm_risk = conditional_risk_oracle(&spec, &post, &erm, &OracleConfig::default()).unwrap();
    assert!(erm_risk > risk);
}
