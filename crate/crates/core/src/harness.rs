//! Episode and batch runners.
//!
//! Every selected variant consumes the same perturbed trajectories. Episodes
//! always run to the full horizon, including after escalation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{init_state, step, AgentVariant, DynamicsConfig};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, EpisodeTrace, EscalationStatus, GroundTruthWindow, MetricsReport, TraceSample};
use crate::output;
use crate::policy::{pressure, select_action};
use crate::risk::encode_risk;
use crate::scenario::{generate_batch, Batch, BatchConfig, BatchEntry, ScenarioKind};
use crate::snapshot::{validate_sequence, PatientSnapshot};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub variants: Vec<AgentVariant>,
    pub dynamics: DynamicsConfig,
    pub batch: BatchConfig,
    /// Use a previously generated batch instead of generating one.
    pub batch_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            variants: AgentVariant::ALL.to_vec(),
            dynamics: DynamicsConfig::default(),
            batch: BatchConfig::default(),
            batch_dir: None,
            output_dir: PathBuf::from("out"),
            seed: DEFAULT_SEED,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.variants.is_empty() {
            return Err(Error::invalid("at least one agent variant must be selected"));
        }
        let mut seen = self.variants.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.variants.len() {
            return Err(Error::invalid("agent variants must not repeat"));
        }
        self.dynamics.validate()?;
        if self.batch_dir.is_none() {
            self.batch.validate()?;
        }
        Ok(())
    }
}

/// Runs one variant over one trajectory.
pub fn run_episode(
    trajectory: &[PatientSnapshot],
    variant: AgentVariant,
    cfg: &DynamicsConfig,
) -> Result<EpisodeTrace> {
    validate_sequence(trajectory)?;
    cfg.validate()?;
    let mut samples = Vec::with_capacity(trajectory.len());
    let mut state = None;
    for x in trajectory {
        let sample = (|| {
            let r = encode_risk(x)?;
            let next = match &state {
                None => init_state(r, variant),
                Some(prev) => step(prev, &r, variant, cfg)?,
            };
            let e = pressure(&next.z);
            let action = select_action(e)?;
            state = Some(next);
            Ok::<_, Error>(TraceSample {
                t: x.t,
                snapshot: *x,
                r,
                z: next.z,
                vel: next.vel,
                e,
                action,
            })
        })()
        .map_err(|e| e.at_hour(x.t))?;
        samples.push(sample);
    }
    Ok(EpisodeTrace {
        variant,
        scenario_id: String::new(),
        seed: 0,
        samples,
    })
}

/// One evaluated (trajectory, variant) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMetrics {
    pub scenario_id: String,
    pub kind: ScenarioKind,
    pub variant: AgentVariant,
    pub seed: u64,
    pub window: GroundTruthWindow,
    pub report: MetricsReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Sample mean and (n - 1) standard deviation. A single value has std 0;
/// no values yields `None`.
pub fn mean_std(values: &[f64]) -> Option<MeanStd> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    Some(MeanStd { mean, std, n })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variant: AgentVariant,
    pub n: usize,
    pub ult: Option<MeanStd>,
    /// Runs without escalation, left out of the ULT aggregate.
    pub ult_excluded: usize,
    pub ua: MeanStd,
    pub ej: MeanStd,
    pub status_counts: BTreeMap<EscalationStatus, usize>,
}

impl SummaryRow {
    pub fn count(&self, status: EscalationStatus) -> usize {
        self.status_counts.get(&status).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    /// Aggregates per variant, in `variants` order. Input order fixes the
    /// summation order, so the result does not depend on scheduling.
    pub fn from_metrics(variants: &[AgentVariant], metrics: &[TraceMetrics]) -> Result<Self> {
        let rows = variants
            .iter()
            .map(|&variant| {
                let mine: Vec<&TraceMetrics> = metrics.iter().filter(|m| m.variant == variant).collect();
                if mine.is_empty() {
                    return Err(Error::invalid(format!("no traces for variant {variant}")));
                }
                let ults: Vec<f64> = mine.iter().filter_map(|m| m.report.ult.map(f64::from)).collect();
                let uas: Vec<f64> = mine.iter().map(|m| m.report.ua).collect();
                let ejs: Vec<f64> = mine.iter().map(|m| m.report.ej).collect();
                let mut status_counts: BTreeMap<EscalationStatus, usize> =
                    EscalationStatus::ALL.iter().map(|&s| (s, 0)).collect();
                for m in &mine {
                    *status_counts.entry(m.report.status).or_default() += 1;
                }
                Ok(SummaryRow {
                    variant,
                    n: mine.len(),
                    ult: mean_std(&ults),
                    ult_excluded: mine.len() - ults.len(),
                    ua: mean_std(&uas).expect("non-empty"),
                    ej: mean_std(&ejs).expect("non-empty"),
                    status_counts,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }

    pub fn row(&self, variant: AgentVariant) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.variant == variant)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub batch: Batch,
    pub variants: Vec<AgentVariant>,
    pub dynamics: DynamicsConfig,
    /// Ordered by trajectory, then by variant in selection order.
    pub traces: Vec<EpisodeTrace>,
    pub metrics: Vec<TraceMetrics>,
    pub summary: SummaryTable,
}

fn run_entry(entry: &BatchEntry, variant: AgentVariant, cfg: &DynamicsConfig) -> Result<(EpisodeTrace, TraceMetrics)> {
    let mut trace = run_episode(&entry.trajectory, variant, cfg)
        .map_err(|e| Error::invalid(format!("{} / {variant}: {e}", entry.scenario_id)))?;
    trace.scenario_id = entry.scenario_id.clone();
    trace.seed = entry.seed;
    let report = evaluate(&trace, &entry.window)?;
    let metrics = TraceMetrics {
        scenario_id: entry.scenario_id.clone(),
        kind: entry.kind,
        variant,
        seed: entry.seed,
        window: entry.window,
        report,
    };
    Ok((trace, metrics))
}

/// Runs every selected variant over every batch trajectory, in memory.
pub fn execute_batch(batch: Batch, variants: &[AgentVariant], dynamics: &DynamicsConfig) -> Result<RunOutput> {
    if variants.is_empty() {
        return Err(Error::invalid("at least one agent variant must be selected"));
    }
    dynamics.validate()?;
    let jobs: Vec<(&BatchEntry, AgentVariant)> = batch
        .entries
        .iter()
        .flat_map(|e| variants.iter().map(move |&v| (e, v)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|(e, v)| run_entry(e, *v, dynamics))
        .collect::<Result<Vec<_>>>()?;
    let (traces, metrics): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let summary = SummaryTable::from_metrics(variants, &metrics)?;
    Ok(RunOutput {
        batch,
        variants: variants.to_vec(),
        dynamics: *dynamics,
        traces,
        metrics,
        summary,
    })
}

/// Obtains the batch (generated or loaded) and runs it without writing files.
pub fn execute(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let batch = match &config.batch_dir {
        Some(dir) => output::load_batch(dir)?,
        None => generate_batch(&config.batch, config.seed)?,
    };
    execute_batch(batch, &config.variants, &config.dynamics)
}

/// Runs a batch and writes traces, metrics, summary, plot data and the
/// manifest under `config.output_dir`.
pub fn run_batch(config: &RunConfig) -> Result<RunOutput> {
    let out = execute(config)?;
    output::write_run(&out, &config.output_dir)?;
    Ok(out)
}
