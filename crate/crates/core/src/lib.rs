//! Clinical escalation dynamics.
//!
//! Hourly vital-sign snapshots are encoded into an instantaneous risk vector,
//! integrated over time by one of three latent dynamics, mapped to a scalar
//! escalation pressure and a discrete action, and scored with lead-time,
//! area and jerk metrics over seeded synthetic ward scenarios.

pub mod dynamics;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod output;
pub mod policy;
pub mod risk;
pub mod scenario;
pub mod snapshot;

pub use dynamics::{init_state, step, AgentVariant, DynamicsConfig, LatentState, Velocity};
pub use error::{Error, Result};
pub use harness::{run_batch, run_episode, RunConfig, RunOutput, SummaryRow, SummaryTable};
pub use metrics::{
    escalation_jerk, escalation_status, evaluate, first_escalation, unease_area, unease_lead_time,
    EpisodeTrace, EscalationStatus, GroundTruthWindow, MetricsReport, TraceSample,
};
pub use policy::{pressure, select_action, Action, PressureSample};
pub use risk::{encode_risk, RiskVector};
pub use scenario::{
    compute_window, generate_base, generate_batch, inject_noise, Batch, BatchConfig, NoiseConfig,
    ScenarioKind, ScenarioMix, ScenarioTemplate,
};
pub use snapshot::{detect_violations, PatientSnapshot, ViolationVector};
