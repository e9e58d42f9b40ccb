//! Escalation pressure and the fixed three-level action map.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::risk::RiskVector;

const W_INSTABILITY: f64 = 0.4;
const W_URGENCY: f64 = 0.4;
const W_LOST_MARGIN: f64 = 0.2;

/// Pressure at or above this selects heightened vigilance.
pub const VIGILANCE_THRESHOLD: f64 = 0.4;
/// Pressure at or above this selects escalation.
pub const ESCALATION_THRESHOLD: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    /// Conservative management.
    A0,
    /// Heightened vigilance.
    A1,
    /// Escalation. The only action counted as an explicit escalation.
    A2,
}

impl Action {
    pub fn as_str(&self) -> &'static str {
        match self {
            Action::A0 => "A0",
            Action::A1 => "A1",
            Action::A2 => "A2",
        }
    }

    pub fn is_escalation(&self) -> bool {
        matches!(self, Action::A2)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A0" => Ok(Action::A0),
            "A1" => Ok(Action::A1),
            "A2" => Ok(Action::A2),
            other => Err(Error::invalid(format!("unknown action `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureSample {
    pub t: u32,
    pub e: f64,
    pub action: Action,
}

/// Scalar escalation pressure of a latent (S, U, C) state.
pub fn pressure(z: &RiskVector) -> f64 {
    W_INSTABILITY * (1.0 - z.s) + W_URGENCY * z.u + W_LOST_MARGIN * (1.0 - z.c)
}

pub fn select_action(e: f64) -> Result<Action> {
    if !e.is_finite() || !(0.0..=1.0).contains(&e) {
        return Err(Error::invalid(format!("pressure must be in [0, 1], got {e}")));
    }
    Ok(if e >= ESCALATION_THRESHOLD {
        Action::A2
    } else if e >= VIGILANCE_THRESHOLD {
        Action::A1
    } else {
        Action::A0
    })
}

pub fn pressure_sample(t: u32, z: &RiskVector) -> Result<PressureSample> {
    let e = pressure(z);
    Ok(PressureSample {
        t,
        e,
        action: select_action(e)?,
    })
}
