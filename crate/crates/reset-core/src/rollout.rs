//! The execution loop: score the scene, restructure while the score stays
//! above threshold (bounded by a step budget and a progress guard), then hand
//! over to the base policy. Also the direct-rollout baseline and the
//! retrieval ablation that skips flow generation.

use serde::{Deserialize, Serialize};

use crate::datagen::flow::{downsample_flow, extract_flow, PointFlow};
use crate::datagen::{oracle_reduction_plan, render_primitive_states};
use crate::gap::RolloutPolicy;
use crate::learn::base::{predict_base, predict_naive, BaseModel, NaiveModel};
use crate::learn::flowgen::{predict_flow, FlowGenerator};
use crate::learn::reduction::{predict_primitive, ReductionModel};
use crate::learn::score::{score, ScoreModel};
use crate::sim::{apply_primitive, is_success, observe, ActionPrimitive, Observation, WorldState};

/// Restructuring step budget.
pub const M_MAX: usize = 4;
/// Minimum score decrease per restructuring step before aborting.
pub const EPS_PROG: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Success,
    Failure,
    BudgetExceeded,
    NoProgress,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Failure => "failure",
            Outcome::BudgetExceeded => "budget_exceeded",
            Outcome::NoProgress => "no_progress",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub observation: Observation,
    pub flow: PointFlow,
    pub primitive: ActionPrimitive,
    pub score_before: f64,
    pub score_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutTrace {
    pub reduction_steps: Vec<ReductionStep>,
    pub base_steps: Vec<(Observation, ActionPrimitive)>,
    pub outcome: Outcome,
    pub final_state: WorldState,
}

/// A source of restructuring proposals: a flow plan plus the primitive that
/// realizes it.
pub trait Reducer {
    fn propose(&self, state: &WorldState, obs: &Observation) -> Option<(PointFlow, ActionPrimitive)>;
}

/// The learned pipeline: flow retrieval followed by the flow-to-primitive
/// policy.
pub struct LearnedReducer<'a> {
    pub flowgen: &'a FlowGenerator,
    pub reduction: &'a ReductionModel,
}

impl Reducer for LearnedReducer<'_> {
    fn propose(&self, _state: &WorldState, obs: &Observation) -> Option<(PointFlow, ActionPrimitive)> {
        let flow = predict_flow(self.flowgen, obs).ok()?;
        if flow.is_empty() {
            return None;
        }
        let primitive = predict_primitive(self.reduction, &flow, obs);
        Some((flow, primitive))
    }
}

/// Ground-truth substitutes: the scripted plan provides the primitive and its
/// rendered flow directly.
pub struct OracleReducer;

impl Reducer for OracleReducer {
    fn propose(&self, state: &WorldState, _obs: &Observation) -> Option<(PointFlow, ActionPrimitive)> {
        let action = oracle_reduction_plan(state).into_iter().next()?;
        let mut dry = crate::rng::stream(0, "oracle-flow", 0);
        let mut noiseless = state.clone();
        noiseless.env.sigma_act = 0.0;
        let (frames, _, ok) = render_primitive_states(&noiseless, &action, &mut dry);
        if !ok {
            return None;
        }
        let mut states = vec![noiseless];
        states.extend(frames);
        let raw = extract_flow(&states);
        let flow = if raw.is_empty() {
            PointFlow::empty()
        } else {
            downsample_flow(&raw)
        };
        Some((flow, action))
    }
}

/// The retrieval ablation: the primitive comes straight from the observation.
pub struct NaiveReducer<'a> {
    pub naive: &'a NaiveModel,
}

impl Reducer for NaiveReducer<'_> {
    fn propose(&self, _state: &WorldState, obs: &Observation) -> Option<(PointFlow, ActionPrimitive)> {
        Some((PointFlow::empty(), predict_naive(self.naive, obs)))
    }
}

fn run_base_phase(
    base: &BaseModel,
    state: WorldState,
    rng: &mut rand_chacha::ChaCha8Rng,
    trace: &mut RolloutTrace,
) -> WorldState {
    // Open-loop base phase: one primitive per task script position.
    let obs = observe(&state, rng);
    let action = predict_base(base, &obs);
    let (next, _) = apply_primitive(&state, &action, rng);
    trace.base_steps.push((obs, action));
    next
}

fn finish(mut trace: RolloutTrace, state: WorldState, cause: Outcome) -> RolloutTrace {
    trace.outcome = if is_success(&state) {
        Outcome::Success
    } else {
        cause
    };
    trace.final_state = state;
    trace
}

/// Threshold-gated restructuring followed by the base policy. Aborts with
/// `BudgetExceeded` after `m_max` restructuring steps and with `NoProgress`
/// when a step fails to lower the score by [`EPS_PROG`].
pub fn reset_rollout(
    score_model: &ScoreModel,
    c_hat: f64,
    reducer: &dyn Reducer,
    base: &BaseModel,
    scene: &WorldState,
    m_max: usize,
    master_seed: u64,
) -> RolloutTrace {
    let mut rng = crate::rng::stream(master_seed, "rollout", 0);
    let mut trace = RolloutTrace {
        reduction_steps: Vec::new(),
        base_steps: Vec::new(),
        outcome: Outcome::Failure,
        final_state: scene.clone(),
    };
    let mut state = scene.clone();

    loop {
        let obs = observe(&state, &mut rng);
        let s_before = score(score_model, &obs);
        if s_before < c_hat {
            break;
        }
        if trace.reduction_steps.len() >= m_max {
            return finish(trace, state, Outcome::BudgetExceeded);
        }
        let Some((flow, primitive)) = reducer.propose(&state, &obs) else {
            return finish(trace, state, Outcome::NoProgress);
        };
        let (next, _) = apply_primitive(&state, &primitive, &mut rng);
        let obs_after = observe(&next, &mut rng);
        let s_after = score(score_model, &obs_after);
        trace.reduction_steps.push(ReductionStep {
            observation: obs,
            flow,
            primitive,
            score_before: s_before,
            score_after: s_after,
        });
        state = next;
        if s_before - s_after < EPS_PROG && s_after >= c_hat {
            return finish(trace, state, Outcome::NoProgress);
        }
    }

    let final_state = run_base_phase(base, state, &mut rng, &mut trace);
    finish(trace, final_state, Outcome::Failure)
}

/// Base policy only, no restructuring.
pub fn direct_rollout(base: &BaseModel, scene: &WorldState, master_seed: u64) -> RolloutTrace {
    let mut rng = crate::rng::stream(master_seed, "rollout", 0);
    let mut trace = RolloutTrace {
        reduction_steps: Vec::new(),
        base_steps: Vec::new(),
        outcome: Outcome::Failure,
        final_state: scene.clone(),
    };
    let final_state = run_base_phase(base, scene.clone(), &mut rng, &mut trace);
    finish(trace, final_state, Outcome::Failure)
}

/// Same loop as [`reset_rollout`] but the corrective primitive comes directly
/// from the observation, skipping flow generation.
pub fn naive_rollout(
    score_model: &ScoreModel,
    c_hat: f64,
    naive: &NaiveModel,
    base: &BaseModel,
    scene: &WorldState,
    m_max: usize,
    master_seed: u64,
) -> RolloutTrace {
    let reducer = NaiveReducer { naive };
    reset_rollout(score_model, c_hat, &reducer, base, scene, m_max, master_seed)
}

/// Score-gated learned reduction as a policy for composed-operator sampling.
pub struct LearnedReductionPolicy<'a> {
    pub score: &'a ScoreModel,
    pub c_hat: f64,
    pub flowgen: &'a FlowGenerator,
    pub reduction: &'a ReductionModel,
}

impl RolloutPolicy for LearnedReductionPolicy<'_> {
    fn act(&self, _state: &WorldState, obs: &Observation) -> Option<ActionPrimitive> {
        if score(self.score, obs) < self.c_hat {
            return None;
        }
        let flow = predict_flow(self.flowgen, obs).ok()?;
        if flow.is_empty() {
            return None;
        }
        Some(predict_primitive(self.reduction, &flow, obs))
    }
}
