//! Legibility metrics over an episode's escalation-pressure trajectory.
//!
//! - `tau`: first hour the agent selects A2.
//! - Unease lead time (ULT): hours from the first pressure above
//!   [`ELEVATION_THRESHOLD`] to `tau`. Undefined when the agent never escalates.
//! - Unease area (UA): pressure summed through `tau` inclusive, or over the
//!   whole trace when the agent never escalates.
//! - Escalation jerk (EJ): largest absolute hour-to-hour change in pressure
//!   over the full trace, escalation or not.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{AgentVariant, Velocity};
use crate::error::{Error, Result};
use crate::policy::{select_action, Action};
use crate::risk::RiskVector;
use crate::snapshot::PatientSnapshot;

/// Pressure must exceed this for an hour to count as elevated.
pub const ELEVATION_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: u32,
    pub snapshot: PatientSnapshot,
    pub r: RiskVector,
    pub z: RiskVector,
    pub vel: Velocity,
    pub e: f64,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub variant: AgentVariant,
    pub scenario_id: String,
    pub seed: u64,
    pub samples: Vec<TraceSample>,
}

impl EpisodeTrace {
    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::invalid(format!("trace `{}` is empty", self.scenario_id)));
        }
        for (i, s) in self.samples.iter().enumerate() {
            if s.t != i as u32 + 1 {
                return Err(Error::invalid(format!(
                    "trace `{}` hours are not contiguous at row {}",
                    self.scenario_id,
                    i + 1
                )));
            }
            if select_action(s.e).map_err(|e| e.at_hour(s.t))? != s.action {
                return Err(Error::invalid(format!(
                    "trace `{}` hour {}: action {} inconsistent with pressure {}",
                    self.scenario_id, s.t, s.action, s.e
                )));
            }
        }
        Ok(())
    }

    pub fn pressures(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.e).collect()
    }

    pub fn actions(&self) -> Vec<Action> {
        self.samples.iter().map(|s| s.action).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Acceptable escalation hours. Absent bounds mean escalation is never warranted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroundTruthWindow {
    pub t_min: Option<u32>,
    pub t_max: Option<u32>,
}

impl GroundTruthWindow {
    pub const NONE: GroundTruthWindow = GroundTruthWindow {
        t_min: None,
        t_max: None,
    };

    pub fn new(t_min: u32, t_max: u32) -> Self {
        Self {
            t_min: Some(t_min),
            t_max: Some(t_max),
        }
    }

    pub fn is_present(&self) -> bool {
        self.t_min.is_some()
    }

    pub fn validate(&self, horizon: Option<u32>) -> Result<()> {
        match (self.t_min, self.t_max) {
            (None, None) => Ok(()),
            (Some(lo), Some(hi)) => {
                if lo < 1 || lo > hi {
                    return Err(Error::invalid(format!("window [{lo}, {hi}] must satisfy 1 <= t_min <= t_max")));
                }
                if let Some(h) = horizon {
                    if hi > h {
                        return Err(Error::invalid(format!("window end {hi} exceeds horizon {h}")));
                    }
                }
                Ok(())
            }
            _ => Err(Error::invalid("window bounds must be both present or both absent")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EscalationStatus {
    Early,
    Within,
    Late,
    Missed,
    CorrectNonEscalation,
    FalseEscalation,
}

impl EscalationStatus {
    pub const ALL: [EscalationStatus; 6] = [
        EscalationStatus::Early,
        EscalationStatus::Within,
        EscalationStatus::Late,
        EscalationStatus::Missed,
        EscalationStatus::CorrectNonEscalation,
        EscalationStatus::FalseEscalation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EscalationStatus::Early => "early",
            EscalationStatus::Within => "within",
            EscalationStatus::Late => "late",
            EscalationStatus::Missed => "missed",
            EscalationStatus::CorrectNonEscalation => "correct_non_escalation",
            EscalationStatus::FalseEscalation => "false_escalation",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown escalation status `{s}`")))
    }
}

impl fmt::Display for EscalationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tau: Option<u32>,
    pub status: EscalationStatus,
    pub ult: Option<u32>,
    pub ua: f64,
    pub ej: f64,
}

fn first_escalation_in(actions: impl IntoIterator<Item = Action>) -> Option<u32> {
    actions
        .into_iter()
        .position(|a| a.is_escalation())
        .map(|i| i as u32 + 1)
}

pub fn first_escalation(trace: &EpisodeTrace) -> Result<Option<u32>> {
    if trace.is_empty() {
        return Err(Error::invalid("cannot locate escalation in an empty trace"));
    }
    Ok(first_escalation_in(trace.samples.iter().map(|s| s.action)))
}

/// ULT over a raw pressure series given its first escalation hour.
pub fn lead_time_of(pressures: &[f64], tau: Option<u32>) -> Option<u32> {
    let tau = tau?;
    let first_elevated = pressures.iter().position(|&e| e > ELEVATION_THRESHOLD)? as u32 + 1;
    debug_assert!(first_elevated <= tau, "pressure at escalation must be elevated");
    Some(tau.saturating_sub(first_elevated))
}

pub fn area_of(pressures: &[f64], tau: Option<u32>) -> f64 {
    let end = match tau {
        Some(t) => (t as usize).min(pressures.len()),
        None => pressures.len(),
    };
    pressures[..end].iter().sum()
}

pub fn jerk_of(pressures: &[f64]) -> f64 {
    pressures
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max)
}

pub fn unease_lead_time(trace: &EpisodeTrace) -> Result<Option<u32>> {
    let tau = first_escalation(trace)?;
    Ok(lead_time_of(&trace.pressures(), tau))
}

pub fn unease_area(trace: &EpisodeTrace) -> Result<f64> {
    let tau = first_escalation(trace)?;
    Ok(area_of(&trace.pressures(), tau))
}

pub fn escalation_jerk(trace: &EpisodeTrace) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::invalid("cannot compute jerk of an empty trace"));
    }
    Ok(jerk_of(&trace.pressures()))
}

pub fn escalation_status(tau: Option<u32>, window: &GroundTruthWindow) -> EscalationStatus {
    // Presence is decided by t_min; a validated window never has only one bound.
    match (tau, window.t_min) {
        (Some(t), Some(lo)) => {
            let hi = window.t_max.unwrap_or(lo);
            if t < lo {
                EscalationStatus::Early
            } else if t > hi {
                EscalationStatus::Late
            } else {
                EscalationStatus::Within
            }
        }
        (None, Some(_)) => EscalationStatus::Missed,
        (None, None) => EscalationStatus::CorrectNonEscalation,
        (Some(_), None) => EscalationStatus::FalseEscalation,
    }
}

pub fn evaluate(trace: &EpisodeTrace, window: &GroundTruthWindow) -> Result<MetricsReport> {
    trace.validate()?;
    window.validate(Some(trace.len() as u32))?;
    let pressures = trace.pressures();
    let tau = first_escalation_in(trace.samples.iter().map(|s| s.action));
    Ok(MetricsReport {
        tau,
        status: escalation_status(tau, window),
        ult: lead_time_of(&pressures, tau),
        ua: area_of(&pressures, tau),
        ej: jerk_of(&pressures),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::select_action;

    fn trace_from(pressures: &[f64]) -> EpisodeTrace {
        let samples = pressures
            .iter()
            .enumerate()
            .map(|(i, &e)| TraceSample {
                t: i as u32 + 1,
                snapshot: PatientSnapshot {
                    t: i as u32 + 1,
                    map: 85.0,
                    spo2: 97.0,
                    rr: 16.0,
                    temp: 37.0,
                    mental_abnormal: false,
                    urine_reduced: false,
                },
                r: RiskVector::new(1.0, 0.0, 1.0),
                z: RiskVector::new(1.0, 0.0, 1.0),
                vel: Velocity::ZERO,
                e,
                action: select_action(e).unwrap(),
            })
            .collect();
        EpisodeTrace {
            variant: AgentVariant::Stateless,
            scenario_id: "test".into(),
            seed: 0,
            samples,
        }
    }

    #[test]
    fn tau_examples() {
        assert_eq!(first_escalation(&trace_from(&[0.1, 0.45, 0.7, 0.8])).unwrap(), Some(3));
        assert_eq!(first_escalation(&trace_from(&[0.1, 0.1, 0.1])).unwrap(), None);
        assert_eq!(first_escalation(&trace_from(&[0.9, 0.1])).unwrap(), Some(1));
        assert!(first_escalation(&trace_from(&[])).is_err());
    }

    #[test]
    fn hand_computed_sequence() {
        let tr = trace_from(&[0.1, 0.35, 0.5, 0.65]);
        assert_eq!(unease_lead_time(&tr).unwrap(), Some(2));
        assert!((unease_area(&tr).unwrap() - 1.6).abs() < 1e-12);
        assert!((escalation_jerk(&tr).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn lead_time_edge_cases() {
        assert_eq!(unease_lead_time(&trace_from(&[0.7, 0.2])).unwrap(), Some(0));
        assert_eq!(unease_lead_time(&trace_from(&[0.2, 0.25, 0.2])).unwrap(), None);
    }

    #[test]
    fn area_branches() {
        assert_eq!(unease_area(&trace_from(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
        assert!((unease_area(&trace_from(&[0.2, 0.2])).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn jerk_cases() {
        assert_eq!(escalation_jerk(&trace_from(&[0.3; 5])).unwrap(), 0.0);
        assert_eq!(escalation_jerk(&trace_from(&[0.0, 1.0])).unwrap(), 1.0);
        assert_eq!(escalation_jerk(&trace_from(&[0.5])).unwrap(), 0.0);
        // full trace, not truncated at escalation
        assert!((escalation_jerk(&trace_from(&[0.6, 0.65, 0.05])).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn status_partition() {
        let w = GroundTruthWindow::new(4, 8);
        assert_eq!(escalation_status(Some(5), &w), EscalationStatus::Within);
        assert_eq!(escalation_status(Some(4), &w), EscalationStatus::Within);
        assert_eq!(escalation_status(Some(8), &w), EscalationStatus::Within);
        assert_eq!(escalation_status(Some(3), &w), EscalationStatus::Early);
        assert_eq!(escalation_status(Some(9), &w), EscalationStatus::Late);
        assert_eq!(escalation_status(None, &w), EscalationStatus::Missed);
        assert_eq!(escalation_status(None, &GroundTruthWindow::NONE), EscalationStatus::CorrectNonEscalation);
        assert_eq!(escalation_status(Some(2), &GroundTruthWindow::NONE), EscalationStatus::FalseEscalation);
    }

    #[test]
    fn window_validation() {
        assert!(GroundTruthWindow::new(4, 8).validate(Some(24)).is_ok());
        assert!(GroundTruthWindow::new(9, 8).validate(None).is_err());
        assert!(GroundTruthWindow::new(0, 3).validate(None).is_err());
        assert!(GroundTruthWindow::new(20, 26).validate(Some(24)).is_err());
        let half = GroundTruthWindow { t_min: Some(3), t_max: None };
        assert!(half.validate(None).is_err());
    }

    #[test]
    fn evaluate_rejects_inconsistent_action() {
        let mut tr = trace_from(&[0.1, 0.7]);
        tr.samples[1].action = Action::A1;
        assert!(evaluate(&tr, &GroundTruthWindow::NONE).is_err());
    }

    #[test]
    fn report_invariants() {
        let tr = trace_from(&[0.1, 0.35, 0.5, 0.65]);
        let rep = evaluate(&tr, &GroundTruthWindow::new(3, 4)).unwrap();
        assert_eq!(rep.tau, Some(4));
        assert_eq!(rep.status, EscalationStatus::Within);
        assert_eq!(rep.ult, Some(2));
        let quiet = evaluate(&trace_from(&[0.1, 0.2]), &GroundTruthWindow::NONE).unwrap();
        assert_eq!(quiet.tau, None);
        assert_eq!(quiet.ult, None);
        assert_eq!(quiet.status, EscalationStatus::CorrectNonEscalation);
    }
}
