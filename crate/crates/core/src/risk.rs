//! Memoryless encoding of one snapshot into an instantaneous risk vector.
//!
//! The weights below are fixed constants. They are shared by every agent
//! variant so that only the temporal dynamics differ between runs.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Result};
use crate::snapshot::{detect_violations, PatientSnapshot};

const S_MAP: f64 = 0.3;
const S_SPO2: f64 = 0.3;
const S_RR: f64 = 0.2;
const S_TEMP: f64 = 0.2;

const U_MAP: f64 = 0.4;
const U_SPO2: f64 = 0.3;
const U_RR: f64 = 0.2;
const U_TEMP: f64 = 0.1;

const C_MENTAL: f64 = 0.4;
const C_URINE: f64 = 0.4;

/// Stability, urgency and control margin, each in [0, 1].
///
/// The same shape is reused for the accumulated latent state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskVector {
    pub s: f64,
    pub u: f64,
    pub c: f64,
}

impl RiskVector {
    pub const fn new(s: f64, u: f64, c: f64) -> Self {
        Self { s, u, c }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.s, self.u, self.c]
    }

    pub fn from_array([s, u, c]: [f64; 3]) -> Self {
        Self { s, u, c }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("s", self.s)?;
        ensure_finite("u", self.u)?;
        ensure_finite("c", self.c)?;
        Ok(())
    }

    pub fn in_unit_cube(&self) -> bool {
        self.as_array().iter().all(|v| (0.0..=1.0).contains(v))
    }
}

fn ind(flag: bool) -> f64 {
    if flag {
        1.0
    } else {
        0.0
    }
}

pub fn encode_risk(snapshot: &PatientSnapshot) -> Result<RiskVector> {
    let v = detect_violations(snapshot)?;
    let s = (1.0
        - S_MAP * ind(v.hypotension)
        - S_SPO2 * ind(v.hypoxemia)
        - S_RR * ind(v.tachypnea)
        - S_TEMP * ind(v.fever))
    .max(0.0);
    let u = (U_MAP * ind(v.hypotension)
        + U_SPO2 * ind(v.hypoxemia)
        + U_RR * ind(v.tachypnea)
        + U_TEMP * ind(v.fever))
    .min(1.0);
    let c = 1.0 - C_MENTAL * ind(v.mental_abnormal) - C_URINE * ind(v.urine_reduced);
    Ok(RiskVector { s, u, c })
}
