//! Desk-scale two-stage manipulation: a deterministic 2D tabletop simulator,
//! scripted and learned restructuring policies that move arbitrary starts
//! into low-variance anchor states, a behavior-cloned base policy, and Monte
//! Carlo estimators for the generalization-gap quantities the approach is
//! built on (covariance traces, linear-class Rademacher bounds, binned
//! conditional mutual information).

pub mod datagen;
pub mod gap;
pub mod geom;
pub mod io;
pub mod learn;
pub mod rng;
pub mod rollout;
pub mod sim;

pub use datagen::flow::{downsample_flow, extract_flow, locate_moving, PointFlow, FLOW_HORIZON};
pub use datagen::{
    gen_expert, gen_play, label_scores, oracle_reduction_plan, oracle_task_plan, script_demo,
    DemoVideo, ExpertDemo, PlayRecord,
};
pub use gap::mi::{dpi_check, mi_binned, mi_report, MiReport, EPS_MI};
pub use gap::{
    cov_trace, empirical_gap, gap_bound, is_anchor, rademacher_linear, rollout_samples, GapReport,
    SampleMeta, SampleSet,
};
pub use learn::base::{fit_base, fit_naive, predict_base, predict_naive, BaseModel, NaiveModel};
pub use learn::flowgen::{fit_flow, predict_flow, FlowGenerator};
pub use learn::reduction::{fit_reduction, flow_descriptor, predict_primitive, ReductionModel};
pub use learn::score::{calibrate_threshold, fit_score, score, ScoreModel};
pub use learn::{featurize, LearnError, FEATURE_LEN};
pub use rollout::{
    direct_rollout, naive_rollout, reset_rollout, LearnedReducer, NaiveReducer, OracleReducer,
    Outcome, ReductionStep, RolloutTrace, EPS_PROG, M_MAX,
};
pub use sim::tasks::{sample_scenario, scene_shift, Split};
pub use sim::{
    apply_primitive, is_success, observe, state_vector, ActionPrimitive, GoalSpec, ObjectClass,
    ObjectSpec, Observation, Pose2, PrimitiveClass, Shape, Task, Theta, WorldState,
};
