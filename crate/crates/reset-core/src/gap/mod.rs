//! Monte Carlo machinery for the generalization-gap theory: composed
//! transition-operator sampling, covariance-trace spread, the empirical gap
//! of a fixed predictor under a shifted distribution, the linear-class
//! Rademacher complexity with its capacity bound, and binned (conditional)
//! mutual information with the data-processing check.

pub mod mi;

use serde::{Deserialize, Serialize};

use crate::sim::tasks::Split;
use crate::sim::{apply_primitive, observe, state_vector, ActionPrimitive, Observation, Task, WorldState};

/// Provenance of a sample matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub task: Task,
    pub split: Split,
    pub policy: String,
    pub horizon: usize,
}

/// An `n x d` matrix of state vectors with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub vectors: Vec<Vec<f64>>,
    pub meta: SampleMeta,
}

impl SampleSet {
    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }
}

/// Trace of the population covariance (divide by n) of the rows: the total
/// variance across all state dimensions.
pub fn cov_trace_rows(rows: &[Vec<f64>]) -> f64 {
    assert!(!rows.is_empty());
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mut mean = vec![0.0; d];
    for row in rows {
        for (m, v) in mean.iter_mut().zip(row.iter()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut total = 0.0;
    for row in rows {
        for (m, v) in mean.iter().zip(row.iter()) {
            total += (v - m) * (v - m);
        }
    }
    total / n
}

pub fn cov_trace(samples: &SampleSet) -> f64 {
    cov_trace_rows(&samples.vectors)
}

/// The anchor condition: the candidate distribution is strictly more
/// concentrated than the reference.
pub fn is_anchor(anchor: &SampleSet, initial: &SampleSet) -> bool {
    assert_eq!(anchor.dim(), initial.dim());
    cov_trace(anchor) < cov_trace(initial)
}

/// Empirical Rademacher complexity of the norm-bounded linear class on the
/// sample: `(B / n) * sqrt(sum_i ||s_i||^2)`.
pub fn rademacher_linear(samples: &SampleSet, b_norm: f64) -> f64 {
    assert!(b_norm > 0.0);
    let n = samples.n() as f64;
    let sum_sq: f64 = samples
        .vectors
        .iter()
        .map(|row| row.iter().map(|v| v * v).sum::<f64>())
        .sum();
    b_norm / n * sum_sq.sqrt()
}

/// High-probability capacity bound on the expected gap: twice the empirical
/// Rademacher complexity.
pub fn gap_bound(samples: &SampleSet, b_norm: f64) -> f64 {
    2.0 * rademacher_linear(samples, b_norm)
}

/// Variance-form surrogate of the bound, `B * sqrt(tr Sigma) / sqrt(n)`; for
/// centered samples this matches `rademacher_linear` exactly (the mean-norm
/// term vanishes).
pub fn trace_bound_surrogate(samples: &SampleSet, b_norm: f64) -> f64 {
    b_norm * cov_trace(samples).sqrt() / (samples.n() as f64).sqrt()
}

/// A state-dependent action source driven through the simulator by
/// [`rollout_samples`]. Returning `None` leaves the state untouched.
pub trait RolloutPolicy {
    fn act(&self, state: &WorldState, obs: &Observation) -> Option<ActionPrimitive>;
}

/// The identity policy: never acts.
pub struct NoOpPolicy;

impl RolloutPolicy for NoOpPolicy {
    fn act(&self, _state: &WorldState, _obs: &Observation) -> Option<ActionPrimitive> {
        None
    }
}

/// Scripted restructuring heuristic as a policy: replans from the current
/// state each step and stops once the scene is anchored.
pub struct OracleReductionPolicy;

impl RolloutPolicy for OracleReductionPolicy {
    fn act(&self, state: &WorldState, _obs: &Observation) -> Option<ActionPrimitive> {
        crate::datagen::oracle_reduction_plan(state).into_iter().next()
    }
}

/// Monte Carlo realization of the t-fold composed transition operator:
/// `n` independent rollouts of `policy` from fresh draws of `sampler`, each on
/// its own derived random stream; row i is the state vector after `t` steps.
pub fn rollout_samples(
    policy: &dyn RolloutPolicy,
    sampler: &mut dyn FnMut(&mut rand_chacha::ChaCha8Rng) -> WorldState,
    horizon: usize,
    n: usize,
    master_seed: u64,
    meta: SampleMeta,
) -> SampleSet {
    assert!(n >= 1);
    let mut vectors = Vec::with_capacity(n);
    for i in 0..n {
        let mut scene_rng = crate::rng::stream(master_seed, "rollout-scene", i as u64);
        let mut step_rng = crate::rng::stream(master_seed, "rollout-step", i as u64);
        let mut state = sampler(&mut scene_rng);
        for _ in 0..horizon {
            let obs = observe(&state, &mut step_rng);
            if let Some(action) = policy.act(&state, &obs) {
                let (next, _) = apply_primitive(&state, &action, &mut step_rng);
                state = next;
            }
        }
        vectors.push(state_vector(&state));
    }
    SampleSet { vectors, meta }
}

/// Everything measured for one gap experiment. The expected/empirical losses
/// and their difference come from the fixed predictor; `tr_sigma` is the
/// spread of the evaluated input distribution; the capacity quantities
/// (`rademacher`, `bound`, `bound_trace`) are computed on the training sample
/// with the recorded norm `b_norm`, which is what the bound is a function of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub expected_loss: f64,
    pub empirical_loss: f64,
    pub gap: f64,
    pub tr_sigma: f64,
    pub rademacher: f64,
    pub bound: f64,
    pub bound_trace: f64,
    pub n: usize,
    pub b_norm: f64,
}

/// Squared Euclidean distance, the loss used throughout.
pub fn squared_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Empirical generalization gap of a fixed predictor: mean loss over `n_test`
/// fresh draws of the evaluation pair distribution minus the mean loss over
/// the training pairs.
#[allow(clippy::type_complexity)]
pub fn empirical_gap(
    predict: &dyn Fn(&[f64]) -> Vec<f64>,
    train: &[(Vec<f64>, Vec<f64>)],
    test_sampler: &mut dyn FnMut(&mut rand_chacha::ChaCha8Rng) -> (Vec<f64>, Vec<f64>),
    loss: &dyn Fn(&[f64], &[f64]) -> f64,
    n_test: usize,
    b_norm: f64,
    master_seed: u64,
) -> GapReport {
    assert!(!train.is_empty() && n_test >= 1);
    let empirical_loss = train
        .iter()
        .map(|(x, y)| loss(&predict(x), y))
        .sum::<f64>()
        / train.len() as f64;

    let mut test_inputs = Vec::with_capacity(n_test);
    let mut expected_loss = 0.0;
    for i in 0..n_test {
        let mut rng = crate::rng::stream(master_seed, "gap-test", i as u64);
        let (x, y) = test_sampler(&mut rng);
        expected_loss += loss(&predict(&x), &y);
        test_inputs.push(x);
    }
    expected_loss /= n_test as f64;

    let train_inputs: Vec<Vec<f64>> = train.iter().map(|(x, _)| x.clone()).collect();
    let train_set = SampleSet {
        vectors: train_inputs,
        meta: SampleMeta {
            task: Task::PickPlace,
            split: Split::InDist,
            policy: "train".to_string(),
            horizon: 0,
        },
    };
    let rademacher = rademacher_linear(&train_set, b_norm);
    GapReport {
        expected_loss,
        empirical_loss,
        gap: expected_loss - empirical_loss,
        tr_sigma: cov_trace_rows(&test_inputs),
        rademacher,
        bound: 2.0 * rademacher,
        bound_trace: trace_bound_surrogate(&train_set, b_norm),
        n: train.len(),
        b_norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::sim::tasks::sample_scenario;
    use rand::Rng;

    fn set(rows: Vec<Vec<f64>>) -> SampleSet {
        SampleSet {
            vectors: rows,
            meta: SampleMeta {
                task: Task::PickPlace,
                split: Split::InDist,
                policy: "test".to_string(),
                horizon: 0,
            },
        }
    }

    #[test]
    fn cov_trace_hand_values() {
        assert_eq!(cov_trace(&set(vec![vec![0.4, 0.7]])), 0.0);
        let a = set(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]);
        assert!((cov_trace(&a) - 1.0).abs() < 1e-15);
        let b = set(vec![vec![1.0, 1.0], vec![-1.0, -1.0]]);
        assert!((cov_trace(&b) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cov_trace_translation_invariant_and_quadratic_in_scale() {
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|i| {
                let mut rng = stream(51, "rows", i);
                (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect()
            })
            .collect();
        let base = cov_trace_rows(&rows);

        let shifted: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v + 17.25).collect())
            .collect();
        assert!((cov_trace_rows(&shifted) - base).abs() < 1e-12);

        let alpha = 2.5;
        let scaled: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v * alpha).collect())
            .collect();
        assert!((cov_trace_rows(&scaled) - alpha * alpha * base).abs() < 1e-9);
    }

    #[test]
    fn anchor_condition_is_strict() {
        let spread = set(vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
        let point = set(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(is_anchor(&point, &spread));
        assert!(!is_anchor(&spread, &spread));
    }

    #[test]
    fn rademacher_hand_values() {
        assert_eq!(rademacher_linear(&set(vec![vec![0.0, 0.0]]), 1.0), 0.0);
        assert!((rademacher_linear(&set(vec![vec![3.0, 4.0]]), 1.0) - 5.0).abs() < 1e-15);
        let two = set(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!((rademacher_linear(&two, 2.0) - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((gap_bound(&set(vec![vec![3.0, 4.0]]), 1.0) - 10.0).abs() < 1e-15);
    }

    #[test]
    fn rademacher_homogeneous_in_norm_bound() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let mut rng = stream(53, "rows", i);
                (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect()
            })
            .collect();
        let s = set(rows);
        let b = 0.7;
        assert_eq!(rademacher_linear(&s, 2.0 * b), 2.0 * rademacher_linear(&s, b));
    }

    #[test]
    fn centered_identity_links_bound_and_trace_form() {
        // mean ||s||^2 = tr Sigma + ||mean||^2, exactly.
        let rows: Vec<Vec<f64>> = (0..64)
            .map(|i| {
                let mut rng = stream(57, "rows", i);
                (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect()
            })
            .collect();
        let s = set(rows.clone());
        let n = s.n() as f64;
        let mean: Vec<f64> = (0..5)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect();
        let mean_norm_sq: f64 = mean.iter().map(|v| v * v).sum();
        let b = 1.3;
        let lhs = gap_bound(&s, b);
        let rhs = 2.0 * b * ((cov_trace(&s) + mean_norm_sq) / n).sqrt();
        assert!((lhs - rhs).abs() < 1e-9, "lhs={lhs} rhs={rhs}");
    }

    #[test]
    fn bound_scales_as_inverse_sqrt_n() {
        let draw = |n: usize, tag: &str| -> SampleSet {
            set((0..n)
                .map(|i| {
                    let mut rng = stream(59, tag, i as u64);
                    (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect()
                })
                .collect())
        };
        let b = 1.0;
        let small = gap_bound(&draw(500, "a"), b);
        let large = gap_bound(&draw(1000, "b"), b);
        let ratio = small / large;
        let expect = 2.0f64.sqrt();
        assert!(
            (ratio / expect - 1.0).abs() < 0.10,
            "ratio {ratio} vs {expect}"
        );
    }

    #[test]
    fn zero_horizon_rollout_returns_start_vectors() {
        let meta = SampleMeta {
            task: Task::PickPlace,
            split: Split::Ood,
            policy: "noop".to_string(),
            horizon: 0,
        };
        let mut sampler =
            |rng: &mut rand_chacha::ChaCha8Rng| sample_scenario(Task::PickPlace, Split::Ood, rng);
        let zero = rollout_samples(&NoOpPolicy, &mut sampler, 0, 20, 61, meta.clone());
        let idle = rollout_samples(&NoOpPolicy, &mut sampler, 3, 20, 61, meta);
        // A no-op policy at zero noise is a fixed point of composition.
        assert_eq!(zero.vectors, idle.vectors);
        for (i, row) in zero.vectors.iter().enumerate() {
            let mut rng = stream(61, "rollout-scene", i as u64);
            let scene = sample_scenario(Task::PickPlace, Split::Ood, &mut rng);
            assert_eq!(*row, state_vector(&scene));
        }
    }

    #[test]
    fn oracle_reduction_clears_covered_flags() {
        let meta = SampleMeta {
            task: Task::RevealPick,
            split: Split::Ood,
            policy: "oracle".to_string(),
            horizon: 4,
        };
        let mut sampler =
            |rng: &mut rand_chacha::ChaCha8Rng| sample_scenario(Task::RevealPick, Split::Ood, rng);
        let reduced = rollout_samples(&OracleReductionPolicy, &mut sampler, 4, 50, 67, meta);
        for row in &reduced.vectors {
            // Covered flag of the target lives at index 4.
            assert_eq!(row[4], 0.0);
        }
    }

    #[test]
    fn gap_is_zero_for_constant_predictor_and_targets() {
        let train: Vec<(Vec<f64>, Vec<f64>)> = (0..10)
            .map(|i| (vec![i as f64, 1.0], vec![0.5, 0.5]))
            .collect();
        let predict = |_: &[f64]| vec![0.5, 0.5];
        let mut sampler = |rng: &mut rand_chacha::ChaCha8Rng| {
            (vec![rng.gen_range(0.0..10.0), 1.0], vec![0.5, 0.5])
        };
        let report = empirical_gap(
            &predict,
            &train,
            &mut sampler,
            &squared_error,
            100,
            1.0,
            71,
        );
        assert_eq!(report.gap, 0.0);
        assert_eq!(report.expected_loss, 0.0);
    }

    #[test]
    fn gap_vanishes_when_test_resamples_train_rows() {
        let train: Vec<(Vec<f64>, Vec<f64>)> = (0..8)
            .map(|i| {
                let mut rng = stream(73, "train", i);
                let x: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
                let y = vec![x[0] * 2.0 - x[1]];
                (x, y)
            })
            .collect();
        let predict = |x: &[f64]| vec![x[0] * 2.0 - x[1] + 0.03];
        // Test distribution = uniform resampling of the training rows; with
        // n_test a multiple of the train size and stratified draws the means
        // agree exactly, so the gap is zero.
        let train_clone = train.clone();
        let counter = std::cell::Cell::new(0usize);
        let mut sampler = move |_: &mut rand_chacha::ChaCha8Rng| {
            let i = counter.get();
            counter.set(i + 1);
            train_clone[i % train_clone.len()].clone()
        };
        let report = empirical_gap(
            &predict,
            &train,
            &mut sampler,
            &squared_error,
            8 * 25,
            1.0,
            79,
        );
        assert!(report.gap.abs() < 1e-12);
    }
}
