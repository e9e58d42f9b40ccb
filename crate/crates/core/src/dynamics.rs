//! Temporal integration of instantaneous risk into an accumulated latent state.
//!
//! Three variants are supported:
//!
//! - `Stateless`: the latent state is the latest risk vector.
//! - `FirstOrder`: exponential smoothing with a single coefficient.
//! - `SecondOrder`: direction-dependent smoothing plus a smoothed velocity
//!   term, with the latent state clipped to the unit cube.
//!
//! The second-order coefficient is chosen per step from the whole triple:
//! the fast coefficient applies whenever *any* component of the new risk is
//! strictly below the current latent value. For stability and control margin
//! a fall means worsening, but for urgency a fall means improvement, so a
//! rising urgency on its own is integrated with the slow coefficient. The
//! rule is applied as written and not corrected per component.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::risk::RiskVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentVariant {
    Stateless,
    FirstOrder,
    SecondOrder,
}

impl AgentVariant {
    pub const ALL: [AgentVariant; 3] = [
        AgentVariant::Stateless,
        AgentVariant::FirstOrder,
        AgentVariant::SecondOrder,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AgentVariant::Stateless => "stateless",
            AgentVariant::FirstOrder => "first_order",
            AgentVariant::SecondOrder => "second_order",
        }
    }
}

impl fmt::Display for AgentVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgentVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "stateless" => Ok(AgentVariant::Stateless),
            "first_order" | "first" => Ok(AgentVariant::FirstOrder),
            "second_order" | "second" => Ok(AgentVariant::SecondOrder),
            other => Err(Error::invalid(format!("unknown agent variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    pub alpha: f64,
    pub alpha_up: f64,
    pub alpha_down: f64,
    pub beta: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            alpha_up: 0.15,
            alpha_down: 0.4,
            beta: 0.6,
        }
    }
}

impl DynamicsConfig {
    /// Coefficients must lie in (0, 1] and `alpha_down >= alpha_up`.
    ///
    /// `beta = 0` is also accepted: it disables the velocity term, which is
    /// how the second-order system reduces to first-order smoothing.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("alpha_up", self.alpha_up),
            ("alpha_down", self.alpha_down),
        ] {
            ensure_finite(name, v)?;
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(format!("{name} must be in (0, 1], got {v}")));
            }
        }
        ensure_finite("beta", self.beta)?;
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::invalid(format!("beta must be in [0, 1], got {}", self.beta)));
        }
        if self.alpha_down < self.alpha_up {
            return Err(Error::invalid(format!(
                "alpha_down ({}) must be >= alpha_up ({})",
                self.alpha_down, self.alpha_up
            )));
        }
        Ok(())
    }
}

/// Smoothed rate of change of the latent state. Not clipped.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Velocity {
    pub s: f64,
    pub u: f64,
    pub c: f64,
}

impl Velocity {
    pub const ZERO: Velocity = Velocity {
        s: 0.0,
        u: 0.0,
        c: 0.0,
    };

    pub fn as_array(&self) -> [f64; 3] {
        [self.s, self.u, self.c]
    }

    pub fn from_array([s, u, c]: [f64; 3]) -> Self {
        Self { s, u, c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatentState {
    pub z: RiskVector,
    pub vel: Velocity,
    pub t: u32,
}

pub fn init_state(r1: RiskVector, _variant: AgentVariant) -> LatentState {
    LatentState {
        z: r1,
        vel: Velocity::ZERO,
        t: 1,
    }
}

/// The smoothing coefficient a second-order step uses for input `r`.
pub fn hysteresis_alpha(z: &RiskVector, r: &RiskVector, cfg: &DynamicsConfig) -> f64 {
    let falling = r
        .as_array()
        .iter()
        .zip(z.as_array())
        .any(|(ri, zi)| *ri < zi);
    if falling {
        cfg.alpha_down
    } else {
        cfg.alpha_up
    }
}

/// `a * r + (1 - a) * z`, written so that `r == z` returns `z` bit-exactly.
fn blend(z: f64, r: f64, a: f64) -> f64 {
    z + a * (r - z)
}

pub fn step(
    state: &LatentState,
    r: &RiskVector,
    variant: AgentVariant,
    cfg: &DynamicsConfig,
) -> Result<LatentState> {
    step_traced(state, r, variant, cfg).map(|(next, _)| next)
}

/// Like [`step`], also returning the smoothing coefficient that was applied
/// (`None` for the stateless variant).
pub fn step_traced(
    state: &LatentState,
    r: &RiskVector,
    variant: AgentVariant,
    cfg: &DynamicsConfig,
) -> Result<(LatentState, Option<f64>)> {
    r.validate()?;
    state.z.validate()?;
    for v in state.vel.as_array() {
        ensure_finite("vel", v)?;
    }
    if state.t < 1 {
        return Err(Error::invalid("latent state hour must be >= 1"));
    }

    let z = state.z.as_array();
    let ri = r.as_array();
    let (next_z, next_vel, alpha) = match variant {
        AgentVariant::Stateless => (*r, Velocity::ZERO, None),
        AgentVariant::FirstOrder => {
            let a = cfg.alpha;
            let out: [f64; 3] = std::array::from_fn(|i| blend(z[i], ri[i], a));
            debug_assert!(
                out.iter().all(|v| (0.0..=1.0).contains(v)),
                "first-order update left the unit cube: {out:?}"
            );
            (RiskVector::from_array(out), Velocity::ZERO, Some(a))
        }
        AgentVariant::SecondOrder => {
            let a = hysteresis_alpha(&state.z, r, cfg);
            let b = cfg.beta;
            let vel = state.vel.as_array();
            let z_hat: [f64; 3] = std::array::from_fn(|i| blend(z[i], ri[i], a));
            let new_vel: [f64; 3] = std::array::from_fn(|i| b * (z_hat[i] - z[i]) + (1.0 - b) * vel[i]);
            let new_z: [f64; 3] = std::array::from_fn(|i| (z_hat[i] + new_vel[i]).clamp(0.0, 1.0));
            (
                RiskVector::from_array(new_z),
                Velocity::from_array(new_vel),
                Some(a),
            )
        }
    };

    Ok((
        LatentState {
            z: next_z,
            vel: next_vel,
            t: state.t + 1,
        },
        alpha,
    ))
}
