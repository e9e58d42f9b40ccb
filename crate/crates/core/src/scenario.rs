//! Seeded synthetic ward trajectories.
//!
//! Base trajectories come from parametric templates for three archetypes
//! (stable, slow drift, abrupt). Sparse perturbations are injected into the
//! numeric vitals afterwards, and ground-truth escalation windows are computed
//! from the perturbed sequence only.
//!
//! Randomness: every trajectory gets its own 64-bit seed derived from the
//! master seed by a SplitMix64 counter. That seed keys a ChaCha8 generator;
//! stream 0 drives base generation, stream 1 noise injection, and stream 2
//! the onset hour drawn for batch members.
//! Output is therefore independent of generation order or thread count.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::GroundTruthWindow;
use crate::snapshot::{detect_violations, snapshots_to_csv, validate_sequence, PatientSnapshot};

pub const RNG_ALGORITHM: &str = "splitmix64-counter+chacha8-streams/v1";
pub const NOISE_MODEL_VERSION: &str = "sparse-spike-reversal-isolated/v1";
pub const WINDOW_RULE_VERSION: &str = "co-violation>=2-persist-2h-width-4h/v1";

/// Hours of persistence required before a co-violation opens a window.
const WINDOW_PERSISTENCE: u32 = 2;
/// t_max - t_min.
const WINDOW_SPAN: u32 = 3;
const WINDOW_MIN_VIOLATIONS: usize = 2;

const BASE_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;
const ONSET_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Abrupt,
    SlowDrift,
    Stable,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [ScenarioKind::Abrupt, ScenarioKind::SlowDrift, ScenarioKind::Stable];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Abrupt => "abrupt",
            ScenarioKind::SlowDrift => "slow_drift",
            ScenarioKind::Stable => "stable",
        }
    }

    pub fn deteriorates(&self) -> bool {
        !matches!(self, ScenarioKind::Stable)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One value per numeric vital, in snapshot column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vitals {
    pub map: f64,
    pub spo2: f64,
    pub rr: f64,
    pub temp: f64,
}

impl Vitals {
    pub const fn new(map: f64, spo2: f64, rr: f64, temp: f64) -> Self {
        Self { map, spo2, rr, temp }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.map, self.spo2, self.rr, self.temp]
    }

    pub fn from_array([map, spo2, rr, temp]: [f64; 4]) -> Self {
        Self { map, spo2, rr, temp }
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::invalid(format!("{name}: invalid range [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }

    fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }
}

/// Plausibility limits every emitted value is clamped to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlausibilityBounds {
    pub map: Range,
    pub spo2: Range,
    pub rr: Range,
    pub temp: Range,
}

impl Default for PlausibilityBounds {
    fn default() -> Self {
        Self {
            map: Range::new(41.0, 160.0),
            spo2: Range::new(50.0, 100.0),
            rr: Range::new(6.0, 60.0),
            temp: Range::new(34.0, 42.0),
        }
    }
}

impl PlausibilityBounds {
    pub fn ranges(&self) -> [Range; 4] {
        [self.map, self.spo2, self.rr, self.temp]
    }

    pub fn contains(&self, s: &PatientSnapshot) -> bool {
        self.ranges()
            .iter()
            .zip(s.vitals())
            .all(|(r, v)| (r.lo..=r.hi).contains(&v))
    }
}

/// Decimal places kept for each vital.
const PRECISION: [i32; 4] = [1, 1, 1, 2];

fn round_to(v: f64, places: i32) -> f64 {
    let k = 10f64.powi(places);
    (v * k).round() / k
}

fn finish(values: [f64; 4], bounds: &PlausibilityBounds) -> [f64; 4] {
    let ranges = bounds.ranges();
    std::array::from_fn(|i| round_to(ranges[i].clamp(values[i]), PRECISION[i]))
}

/// Per-archetype generation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateParams {
    /// Normal-range starting vitals.
    pub baseline: Vitals,
    /// Uniform jitter half-width applied to the baseline per trajectory.
    pub baseline_jitter: Vitals,
    /// Linear change per hour from onset (slow drift).
    pub drift_per_hour: Vitals,
    /// Step change applied at onset (abrupt).
    pub step: Vitals,
    /// Per-trajectory multiplier range on drift rates and step magnitudes.
    pub severity_scale: Range,
    /// Onset hour is drawn uniformly from this inclusive range in batches.
    pub onset_range: [u32; 2],
    /// Hours after onset at which urine output becomes reduced.
    pub urine_reduced_after: Option<u32>,
    /// Hours after onset at which mental status becomes abnormal.
    pub mental_abnormal_after: Option<u32>,
}

const NORMAL_BASELINE: Vitals = Vitals::new(88.0, 97.5, 16.0, 36.9);
const NORMAL_JITTER: Vitals = Vitals::new(3.0, 1.0, 2.0, 0.3);
const NO_CHANGE: Vitals = Vitals::new(0.0, 0.0, 0.0, 0.0);

impl TemplateParams {
    pub fn default_for(kind: ScenarioKind) -> Self {
        match kind {
            ScenarioKind::Stable => Self {
                baseline: NORMAL_BASELINE,
                baseline_jitter: NORMAL_JITTER,
                drift_per_hour: NO_CHANGE,
                step: NO_CHANGE,
                severity_scale: Range::new(1.0, 1.0),
                onset_range: [1, 1],
                urine_reduced_after: None,
                mental_abnormal_after: None,
            },
            ScenarioKind::SlowDrift => Self {
                baseline: NORMAL_BASELINE,
                baseline_jitter: NORMAL_JITTER,
                drift_per_hour: Vitals::new(-2.5, -0.6, 1.0, 0.1),
                step: NO_CHANGE,
                severity_scale: Range::new(0.85, 1.15),
                onset_range: [4, 12],
                urine_reduced_after: Some(8),
                mental_abnormal_after: Some(12),
            },
            ScenarioKind::Abrupt => Self {
                baseline: NORMAL_BASELINE,
                baseline_jitter: NORMAL_JITTER,
                drift_per_hour: NO_CHANGE,
                step: Vitals::new(-20.0, -5.0, 9.0, 0.8),
                severity_scale: Range::new(0.9, 1.1),
                onset_range: [6, 16],
                urine_reduced_after: Some(2),
                mental_abnormal_after: Some(4),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTemplate {
    pub kind: ScenarioKind,
    pub horizon_hours: u32,
    /// Deterioration start. Ignored for stable scenarios.
    pub onset_hour: u32,
    pub params: TemplateParams,
    pub bounds: PlausibilityBounds,
}

impl ScenarioTemplate {
    pub fn new(kind: ScenarioKind, horizon_hours: u32, onset_hour: u32) -> Self {
        Self {
            kind,
            horizon_hours,
            onset_hour,
            params: TemplateParams::default_for(kind),
            bounds: PlausibilityBounds::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon_hours < 1 {
            return Err(Error::invalid("horizon must be at least one hour"));
        }
        if self.kind.deteriorates() && !(1..self.horizon_hours).contains(&self.onset_hour) {
            return Err(Error::invalid(format!(
                "onset hour {} must satisfy 1 <= onset < horizon ({})",
                self.onset_hour, self.horizon_hours
            )));
        }
        let p = &self.params;
        p.severity_scale.validate("severity_scale")?;
        for v in [p.baseline, p.baseline_jitter, p.drift_per_hour, p.step] {
            if v.as_array().iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("template vitals must be finite"));
            }
        }
        if p.baseline_jitter.as_array().iter().any(|&j| j < 0.0) {
            return Err(Error::invalid("baseline jitter must be non-negative"));
        }
        // Every jittered baseline must stay violation-free.
        let lo = Vitals::from_array(std::array::from_fn(|i| p.baseline.as_array()[i] - p.baseline_jitter.as_array()[i]));
        let hi = Vitals::from_array(std::array::from_fn(|i| p.baseline.as_array()[i] + p.baseline_jitter.as_array()[i]));
        for corner in [lo, hi] {
            let s = vitals_snapshot(1, corner, false, false);
            if detect_violations(&s)?.moderate_count() > 0 || !self.bounds.contains(&s) {
                return Err(Error::invalid(format!(
                    "baseline range must be violation-free and plausible; {corner:?} is not"
                )));
            }
        }
        for r in self.bounds.ranges() {
            r.validate("plausibility bounds")?;
        }
        Ok(())
    }
}

fn vitals_snapshot(t: u32, v: Vitals, mental_abnormal: bool, urine_reduced: bool) -> PatientSnapshot {
    PatientSnapshot {
        t,
        map: v.map,
        spo2: v.spo2,
        rr: v.rr,
        temp: v.temp,
        mental_abnormal,
        urine_reduced,
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Noise-free hourly trajectory for one template.
pub fn generate_base(template: &ScenarioTemplate, seed: u64) -> Result<Vec<PatientSnapshot>> {
    template.validate()?;
    let mut rng = rng_for(seed, BASE_STREAM);
    let p = &template.params;

    let baseline: [f64; 4] = std::array::from_fn(|i| {
        let j = p.baseline_jitter.as_array()[i];
        let centre = p.baseline.as_array()[i];
        if j == 0.0 {
            centre
        } else {
            centre + rng.gen_range(-j..=j)
        }
    });
    let scale = p.severity_scale.sample(&mut rng);
    let onset = template.onset_hour;
    let drift = p.drift_per_hour.as_array();
    let step = p.step.as_array();

    let flag_at = |after: Option<u32>, t: u32| match after {
        Some(h) if template.kind.deteriorates() => t >= onset + h,
        _ => false,
    };

    let out = (1..=template.horizon_hours)
        .map(|t| {
            let mut v = baseline;
            if template.kind.deteriorates() && t >= onset {
                let elapsed = (t - onset) as f64;
                for i in 0..4 {
                    match template.kind {
                        ScenarioKind::SlowDrift => v[i] += scale * drift[i] * elapsed,
                        ScenarioKind::Abrupt => v[i] += scale * step[i],
                        ScenarioKind::Stable => {}
                    }
                }
            }
            let v = finish(v, &template.bounds);
            vitals_snapshot(
                t,
                Vitals::from_array(v),
                flag_at(p.mental_abnormal_after, t),
                flag_at(p.urine_reduced_after, t),
            )
        })
        .collect();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpikeRanges {
    pub map: Range,
    pub spo2: Range,
    pub rr: Range,
    pub temp: Range,
}

impl Default for SpikeRanges {
    fn default() -> Self {
        Self {
            map: Range::new(8.0, 15.0),
            spo2: Range::new(2.0, 4.0),
            rr: Range::new(3.0, 6.0),
            temp: Range::new(0.3, 0.6),
        }
    }
}

impl SpikeRanges {
    fn ranges(&self) -> [Range; 4] {
        [self.map, self.spo2, self.rr, self.temp]
    }
}

/// Direction in which each vital worsens.
const WORSENING: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Expected fraction of (hour, vital) cells that end up perturbed.
    pub per_variable_event_rate: f64,
    pub spike_ranges: SpikeRanges,
    /// Inclusive hour-count range for short-lived reversals.
    pub reversal_length_range: [u32; 2],
    pub bounds: PlausibilityBounds,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            per_variable_event_rate: 0.08,
            spike_ranges: SpikeRanges::default(),
            reversal_length_range: [1, 2],
            bounds: PlausibilityBounds::default(),
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        let rate = self.per_variable_event_rate;
        if !(0.0..=0.3).contains(&rate) {
            return Err(Error::invalid(format!("noise event rate must be in [0, 0.3], got {rate}")));
        }
        for r in self.spike_ranges.ranges() {
            r.validate("spike range")?;
            if r.lo < 0.0 {
                return Err(Error::invalid("spike magnitudes must be non-negative"));
            }
        }
        let [lo, hi] = self.reversal_length_range;
        if lo < 1 || lo > hi {
            return Err(Error::invalid(format!("reversal length range [{lo}, {hi}] is invalid")));
        }
        for r in self.bounds.ranges() {
            r.validate("plausibility bounds")?;
        }
        Ok(())
    }

    /// Probability that a cell starts a new event, chosen so that the expected
    /// share of perturbed cells equals `per_variable_event_rate`.
    fn start_probability(&self) -> f64 {
        let [lo, hi] = self.reversal_length_range;
        let mean_reversal = (lo + hi) as f64 / 2.0;
        let mean_cells = (1.0 + 1.0 + mean_reversal) / 3.0;
        self.per_variable_event_rate / mean_cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NoiseEvent {
    /// Single-hour move in the worsening direction.
    Spike,
    /// Move against the local trend for a few hours, then back to trend.
    Reversal,
    /// Single reading off in either direction.
    Isolated,
}

/// Injects sparse perturbations into the four numeric vitals.
///
/// Flags are never perturbed. A zero event rate returns the input unchanged.
pub fn inject_noise(base: &[PatientSnapshot], cfg: &NoiseConfig) -> Result<Vec<PatientSnapshot>> {
    validate_sequence(base)?;
    cfg.validate()?;
    if cfg.per_variable_event_rate == 0.0 {
        return Ok(base.to_vec());
    }

    let mut rng = rng_for(cfg.seed, NOISE_STREAM);
    let start_p = cfg.start_probability();
    let spikes = cfg.spike_ranges.ranges();
    let n = base.len();
    let mut values: Vec<[f64; 4]> = base.iter().map(|s| s.vitals()).collect();

    for var in 0..4 {
        let mut covered_until = 0usize;
        for i in 0..n {
            // Always consume one draw per cell so the stream layout does not
            // depend on earlier outcomes.
            let u: f64 = rng.gen();
            if i < covered_until || u >= start_p {
                continue;
            }
            let event = match rng.gen_range(0..3u8) {
                0 => NoiseEvent::Spike,
                1 => NoiseEvent::Reversal,
                _ => NoiseEvent::Isolated,
            };
            let mag = spikes[var].sample(&mut rng);
            let base_v = base[i].vitals()[var];
            match event {
                NoiseEvent::Spike => {
                    values[i][var] = base_v + WORSENING[var] * mag;
                    covered_until = i + 1;
                }
                NoiseEvent::Isolated => {
                    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    values[i][var] = base_v + sign * mag;
                    covered_until = i + 1;
                }
                NoiseEvent::Reversal => {
                    let [lo, hi] = cfg.reversal_length_range;
                    let len = rng.gen_range(lo..=hi) as usize;
                    let trend = if i > 0 {
                        base_v - base[i - 1].vitals()[var]
                    } else if n > 1 {
                        base[1].vitals()[var] - base_v
                    } else {
                        0.0
                    };
                    let dir = if trend > 0.0 {
                        -1.0
                    } else if trend < 0.0 {
                        1.0
                    } else {
                        // Flat trend: move toward the improving side.
                        -WORSENING[var]
                    };
                    let end = (i + len).min(n);
                    for cell in values.iter_mut().take(end).skip(i) {
                        cell[var] += dir * mag;
                    }
                    covered_until = end;
                }
            }
        }
    }

    let out = base
        .iter()
        .zip(values)
        .map(|(s, v)| {
            let v = finish(v, &cfg.bounds);
            PatientSnapshot {
                map: v[0],
                spo2: v[1],
                rr: v[2],
                temp: v[3],
                ..*s
            }
        })
        .collect();
    Ok(out)
}

/// Ground-truth escalation window for a perturbed trajectory.
///
/// Opens at the first hour where at least two moderate violations co-occur
/// and persist into the next hour; closes three hours later (or at the
/// horizon). Absent if no such hour exists.
pub fn compute_window(perturbed: &[PatientSnapshot]) -> Result<GroundTruthWindow> {
    validate_sequence(perturbed)?;
    let counts = perturbed
        .iter()
        .map(|s| detect_violations(s).map(|v| v.moderate_count()))
        .collect::<Result<Vec<_>>>()?;
    let persist = WINDOW_PERSISTENCE as usize;
    let horizon = perturbed.len() as u32;
    let start = counts
        .windows(persist)
        .position(|w| w.iter().all(|&c| c >= WINDOW_MIN_VIOLATIONS));
    Ok(match start {
        Some(i) => {
            let t_min = i as u32 + 1;
            GroundTruthWindow::new(t_min, (t_min + WINDOW_SPAN).min(horizon))
        }
        None => GroundTruthWindow::NONE,
    })
}

/// Scenario-kind proportions of a batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioMix {
    pub abrupt: f64,
    pub slow_drift: f64,
    pub stable: f64,
}

impl Default for ScenarioMix {
    fn default() -> Self {
        Self {
            abrupt: 0.4,
            slow_drift: 0.4,
            stable: 0.2,
        }
    }
}

impl ScenarioMix {
    fn shares(&self) -> [f64; 3] {
        [self.abrupt, self.slow_drift, self.stable]
    }

    pub fn validate(&self) -> Result<()> {
        let shares = self.shares();
        if shares.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid("scenario proportions must be non-negative"));
        }
        let total: f64 = shares.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("scenario proportions must sum to 1, got {total}")));
        }
        Ok(())
    }

    /// Trajectory counts per kind (abrupt, slow drift, stable) by largest
    /// remainder. Ties go to the earlier kind.
    pub fn allocate(&self, n: usize) -> Result<[usize; 3]> {
        self.validate()?;
        let quotas = self.shares().map(|p| p * n as f64);
        let mut counts = quotas.map(|q| q.floor() as usize);
        let assigned: usize = counts.iter().sum();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
        });
        for &k in order.iter().take(n.saturating_sub(assigned)) {
            counts[k] += 1;
        }
        Ok(counts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchConfig {
    pub n: usize,
    pub horizon_hours: u32,
    pub mix: ScenarioMix,
    pub abrupt: TemplateParams,
    pub slow_drift: TemplateParams,
    pub stable: TemplateParams,
    pub noise: NoiseConfig,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            n: 50,
            horizon_hours: 24,
            mix: ScenarioMix::default(),
            abrupt: TemplateParams::default_for(ScenarioKind::Abrupt),
            slow_drift: TemplateParams::default_for(ScenarioKind::SlowDrift),
            stable: TemplateParams::default_for(ScenarioKind::Stable),
            noise: NoiseConfig::default(),
        }
    }
}

impl BatchConfig {
    pub fn params(&self, kind: ScenarioKind) -> &TemplateParams {
        match kind {
            ScenarioKind::Abrupt => &self.abrupt,
            ScenarioKind::SlowDrift => &self.slow_drift,
            ScenarioKind::Stable => &self.stable,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::invalid("batch size must be at least 1"));
        }
        self.mix.validate()?;
        self.noise.validate()?;
        for kind in ScenarioKind::ALL {
            let [lo, hi] = self.params(kind).onset_range;
            if lo > hi {
                return Err(Error::invalid(format!("{kind}: onset range [{lo}, {hi}] is empty")));
            }
            if kind.deteriorates() {
                for onset in [lo, hi] {
                    self.template(kind, onset).validate()?;
                }
            } else {
                self.template(kind, 1).validate()?;
            }
        }
        Ok(())
    }

    fn template(&self, kind: ScenarioKind, onset_hour: u32) -> ScenarioTemplate {
        ScenarioTemplate {
            kind,
            horizon_hours: self.horizon_hours,
            onset_hour,
            params: *self.params(kind),
            bounds: self.noise.bounds,
        }
    }
}

/// SplitMix64 output function.
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th trajectory of a batch.
pub fn trajectory_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add((index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

pub fn content_hash(trajectory: &[PatientSnapshot]) -> String {
    hex::encode(Sha256::digest(snapshots_to_csv(trajectory).as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchEntry {
    pub scenario_id: String,
    pub kind: ScenarioKind,
    pub seed: u64,
    pub onset_hour: Option<u32>,
    pub window: GroundTruthWindow,
    pub content_hash: String,
    #[serde(skip)]
    pub trajectory: Vec<PatientSnapshot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub master_seed: u64,
    pub config: BatchConfig,
    pub entries: Vec<BatchEntry>,
}

impl Batch {
    /// Hash over every scenario id and snapshot row, in batch order.
    pub fn batch_hash(&self) -> String {
        let mut h = Sha256::new();
        for e in &self.entries {
            h.update(e.scenario_id.as_bytes());
            h.update(b"\n");
            h.update(snapshots_to_csv(&e.trajectory).as_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Generates one batch entry: base, then noise, then the window.
pub fn generate_entry(cfg: &BatchConfig, kind: ScenarioKind, index: usize, seed: u64) -> Result<BatchEntry> {
    let params = cfg.params(kind);
    let onset = if kind.deteriorates() {
        let [lo, hi] = params.onset_range;
        rng_for(seed, ONSET_STREAM).gen_range(lo..=hi)
    } else {
        1
    };
    let template = cfg.template(kind, onset);
    let base = generate_base(&template, seed)?;
    let noise = NoiseConfig { seed, ..cfg.noise };
    let perturbed = inject_noise(&base, &noise)?;
    let window = compute_window(&perturbed)?;
    Ok(BatchEntry {
        scenario_id: format!("traj-{index:03}-{kind}"),
        kind,
        seed,
        onset_hour: kind.deteriorates().then_some(onset),
        window,
        content_hash: content_hash(&perturbed),
        trajectory: perturbed,
    })
}

pub fn generate_batch(cfg: &BatchConfig, master_seed: u64) -> Result<Batch> {
    cfg.validate()?;
    let counts = cfg.mix.allocate(cfg.n)?;
    let kinds: Vec<ScenarioKind> = ScenarioKind::ALL
        .iter()
        .zip(counts)
        .flat_map(|(&k, c)| std::iter::repeat_n(k, c))
        .collect();
    let entries = kinds
        .par_iter()
        .enumerate()
        .map(|(i, &kind)| generate_entry(cfg, kind, i, trajectory_seed(master_seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Batch {
        master_seed,
        config: cfg.clone(),
        entries,
    })
}
