//! On-disk formats: batches, per-timestep traces, metrics, summaries, plot
//! data and run manifests.
//!
//! Layout of a run directory:
//!
//! ```text
//! <out>/manifest.json
//! <out>/summary.csv
//! <out>/metrics.csv
//! <out>/traces/<scenario>__<variant>.csv
//! <out>/plot/<scenario>__<variant>.csv
//! <out>/plot/aggregate_{ult,ua,ej}.csv
//! <out>/batch/batch.json
//! <out>/batch/trajectories/<scenario>.csv
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back reproduces the in-memory values exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{AgentVariant, DynamicsConfig, Velocity};
use crate::error::{Error, Result};
use crate::harness::{mean_std, MeanStd, RunOutput, SummaryTable, TraceMetrics};
use crate::metrics::{area_of, jerk_of, lead_time_of, EpisodeTrace, EscalationStatus, GroundTruthWindow, MetricsReport, TraceSample};
use crate::policy::{pressure, select_action, Action};
use crate::risk::{encode_risk, RiskVector};
use crate::scenario::{
    compute_window, content_hash, Batch, BatchConfig, BatchEntry, NOISE_MODEL_VERSION, RNG_ALGORITHM,
    WINDOW_RULE_VERSION,
};
use crate::snapshot::{read_snapshots, snapshots_to_csv, PatientSnapshot};

pub const TRACE_HEADER: [&str; 18] = [
    "t",
    "map",
    "spo2",
    "rr",
    "temp",
    "mental_abnormal",
    "urine_reduced",
    "r_s",
    "r_u",
    "r_c",
    "z_s",
    "z_u",
    "z_c",
    "vel_s",
    "vel_u",
    "vel_c",
    "E",
    "action",
];

pub const METRICS_HEADER: [&str; 11] = [
    "scenario_id",
    "kind",
    "variant",
    "seed",
    "t_min",
    "t_max",
    "tau",
    "status",
    "ult",
    "ua",
    "ej",
];

pub const PLOT_HEADER: [&str; 3] = ["t", "E", "action"];

const TOOL: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header).expect("in-memory csv write");
    for row in rows {
        wtr.write_record(&row).expect("in-memory csv write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory csv flush")).expect("utf-8")
}

fn parse<T: std::str::FromStr>(field: &str, col: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("cannot parse `{field}` in column {col}")))
}

fn parse_opt<T: std::str::FromStr>(field: &str, col: &str) -> Result<Option<T>> {
    if field.trim().is_empty() {
        Ok(None)
    } else {
        parse(field, col).map(Some)
    }
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str], what: &str) -> Result<()> {
    let headers = rdr.headers()?;
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::invalid(format!(
            "unexpected {what} header: {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

pub fn trace_file_name(scenario_id: &str, variant: AgentVariant) -> String {
    format!("{scenario_id}__{variant}.csv")
}

pub fn trace_to_csv(trace: &EpisodeTrace) -> String {
    csv_text(
        &TRACE_HEADER,
        trace.samples.iter().map(|s| {
            let x = &s.snapshot;
            vec![
                s.t.to_string(),
                x.map.to_string(),
                x.spo2.to_string(),
                x.rr.to_string(),
                x.temp.to_string(),
                (x.mental_abnormal as u8).to_string(),
                (x.urine_reduced as u8).to_string(),
                s.r.s.to_string(),
                s.r.u.to_string(),
                s.r.c.to_string(),
                s.z.s.to_string(),
                s.z.u.to_string(),
                s.z.c.to_string(),
                s.vel.s.to_string(),
                s.vel.u.to_string(),
                s.vel.c.to_string(),
                s.e.to_string(),
                s.action.to_string(),
            ]
        }),
    )
}

/// Parses a trace file body. Scenario id, variant and seed are not stored
/// in the file and must be supplied.
pub fn trace_from_csv(text: &str, scenario_id: &str, variant: AgentVariant, seed: u64) -> Result<EpisodeTrace> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    check_header(&mut rdr, &TRACE_HEADER, "trace")?;
    let mut samples = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| -> Result<f64> { parse(&rec[i], TRACE_HEADER[i]) };
        let flag = |i: usize| -> Result<bool> {
            match &rec[i] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::invalid(format!("{} must be 0 or 1, got `{other}`", TRACE_HEADER[i]))),
            }
        };
        let t: u32 = parse(&rec[0], "t")?;
        samples.push(TraceSample {
            t,
            snapshot: PatientSnapshot {
                t,
                map: f(1)?,
                spo2: f(2)?,
                rr: f(3)?,
                temp: f(4)?,
                mental_abnormal: flag(5)?,
                urine_reduced: flag(6)?,
            },
            r: RiskVector::new(f(7)?, f(8)?, f(9)?),
            z: RiskVector::new(f(10)?, f(11)?, f(12)?),
            vel: Velocity {
                s: f(13)?,
                u: f(14)?,
                c: f(15)?,
            },
            e: f(16)?,
            action: rec[17].parse::<Action>()?,
        });
    }
    Ok(EpisodeTrace {
        variant,
        scenario_id: scenario_id.to_string(),
        seed,
        samples,
    })
}

/// Re-derives every recorded quantity that is a pure function of other
/// columns and checks it against the file: contiguous hours, risk from the
/// snapshot, pressure from the latent state, action from the pressure.
/// Returns the number of rows checked.
pub fn lint_trace(trace: &EpisodeTrace) -> Result<usize> {
    if trace.samples.is_empty() {
        return Err(Error::invalid(format!("trace {} has no rows", trace.scenario_id)));
    }
    for (i, s) in trace.samples.iter().enumerate() {
        let fail = |what: String| Error::invalid(format!("trace {} / {} hour {}: {what}", trace.scenario_id, trace.variant, s.t));
        if s.t != i as u32 + 1 {
            return Err(fail("hours are not contiguous".into()));
        }
        let r = encode_risk(&s.snapshot)?;
        if r != s.r {
            return Err(fail(format!("recorded risk {:?} != encoded {:?}", s.r, r)));
        }
        let e = pressure(&s.z);
        if (e - s.e).abs() > 1e-12 {
            return Err(fail(format!("recorded E {} != pressure(z) {e}", s.e)));
        }
        let a = select_action(s.e)?;
        if a != s.action {
            return Err(fail(format!("recorded action {} != select_action(E) {a}", s.action)));
        }
        if !s.z.in_unit_cube() {
            return Err(fail(format!("latent state {:?} outside the unit cube", s.z)));
        }
    }
    Ok(trace.samples.len())
}

pub fn lint_trace_file(path: &Path, variant: AgentVariant) -> Result<usize> {
    let text = read_file(path)?;
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    lint_trace(&trace_from_csv(&text, id, variant, 0)?)
}

pub fn metrics_to_csv(metrics: &[TraceMetrics]) -> String {
    csv_text(
        &METRICS_HEADER,
        metrics.iter().map(|m| {
            vec![
                m.scenario_id.clone(),
                m.kind.to_string(),
                m.variant.to_string(),
                m.seed.to_string(),
                opt(m.window.t_min),
                opt(m.window.t_max),
                opt(m.report.tau),
                m.report.status.to_string(),
                opt(m.report.ult),
                m.report.ua.to_string(),
                m.report.ej.to_string(),
            ]
        }),
    )
}

pub fn metrics_from_csv(text: &str) -> Result<Vec<TraceMetrics>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    check_header(&mut rdr, &METRICS_HEADER, "metrics")?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let kind = serde_json::from_value(serde_json::Value::String(rec[1].to_string()))
            .map_err(|_| Error::invalid(format!("unknown scenario kind `{}`", &rec[1])))?;
        out.push(TraceMetrics {
            scenario_id: rec[0].to_string(),
            kind,
            variant: rec[2].parse()?,
            seed: parse(&rec[3], "seed")?,
            window: GroundTruthWindow {
                t_min: parse_opt(&rec[4], "t_min")?,
                t_max: parse_opt(&rec[5], "t_max")?,
            },
            report: MetricsReport {
                tau: parse_opt(&rec[6], "tau")?,
                status: EscalationStatus::parse(&rec[7])?,
                ult: parse_opt(&rec[8], "ult")?,
                ua: parse(&rec[9], "ua")?,
                ej: parse(&rec[10], "ej")?,
            },
        });
    }
    Ok(out)
}

pub fn summary_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "variant",
        "n",
        "ult_mean",
        "ult_std",
        "ult_excluded",
        "ua_mean",
        "ua_std",
        "ej_mean",
        "ej_std",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(EscalationStatus::ALL.iter().map(|s| s.as_str().to_string()));
    h
}

pub fn summary_to_csv(summary: &SummaryTable) -> String {
    let header = summary_header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_text(
        &header,
        summary.rows.iter().map(|r| {
            let mut row = vec![
                r.variant.to_string(),
                r.n.to_string(),
                opt(r.ult.map(|m| m.mean)),
                opt(r.ult.map(|m| m.std)),
                r.ult_excluded.to_string(),
                r.ua.mean.to_string(),
                r.ua.std.to_string(),
                r.ej.mean.to_string(),
                r.ej.std.to_string(),
            ];
            row.extend(EscalationStatus::ALL.iter().map(|&s| r.count(s).to_string()));
            row
        }),
    )
}

/// Fixed-width rendering of the summary for terminals.
pub fn summary_to_text(summary: &SummaryTable) -> String {
    let mut s = format!(
        "{:<13} {:>4} {:>15} {:>6} {:>15} {:>15}  {}\n",
        "variant", "n", "ULT mean/std", "excl", "UA mean/std", "EJ mean/std", "early/within/late/missed/cne/false"
    );
    for r in &summary.rows {
        let ult = r
            .ult
            .map(|m| format!("{:.3}/{:.3}", m.mean, m.std))
            .unwrap_or_else(|| "-".into());
        let counts: Vec<String> = EscalationStatus::ALL.iter().map(|&st| r.count(st).to_string()).collect();
        s.push_str(&format!(
            "{:<13} {:>4} {:>15} {:>6} {:>15} {:>15}  {}\n",
            r.variant.as_str(),
            r.n,
            ult,
            r.ult_excluded,
            format!("{:.3}/{:.3}", r.ua.mean, r.ua.std),
            format!("{:.3}/{:.3}", r.ej.mean, r.ej.std),
            counts.join("/")
        ));
    }
    s
}

pub fn plot_to_csv(trace: &EpisodeTrace) -> String {
    csv_text(
        &PLOT_HEADER,
        trace
            .samples
            .iter()
            .map(|s| vec![s.t.to_string(), s.e.to_string(), s.action.to_string()]),
    )
}

/// Per-variant aggregate of one metric, as written to `aggregate_<metric>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub variant: AgentVariant,
    pub stats: Option<MeanStd>,
}

pub const AGGREGATE_HEADER: [&str; 4] = ["variant", "mean", "std", "n"];
pub const AGGREGATE_METRICS: [&str; 3] = ["ult", "ua", "ej"];

fn aggregate_to_csv(rows: &[AggregateRow]) -> String {
    csv_text(
        &AGGREGATE_HEADER,
        rows.iter().map(|r| {
            vec![
                r.variant.to_string(),
                opt(r.stats.map(|m| m.mean)),
                opt(r.stats.map(|m| m.std)),
                r.stats.map(|m| m.n).unwrap_or(0).to_string(),
            ]
        }),
    )
}

/// Writes one `t,E,action` file per trace plus per-variant aggregate files
/// for ULT, UA and EJ computed from those same rows. Returns paths relative
/// to `output_dir`.
pub fn emit_plot_data(traces: &[EpisodeTrace], output_dir: &Path) -> Result<Vec<PathBuf>> {
    if traces.is_empty() {
        return Err(Error::invalid("no traces to emit plot data for"));
    }
    let mut written = Vec::new();
    let mut variants: Vec<AgentVariant> = Vec::new();
    for tr in traces {
        if !variants.contains(&tr.variant) {
            variants.push(tr.variant);
        }
    }
    let mut per_metric: [Vec<AggregateRow>; 3] = Default::default();
    for &v in &variants {
        let mut ult = Vec::new();
        let mut ua = Vec::new();
        let mut ej = Vec::new();
        for tr in traces.iter().filter(|t| t.variant == v) {
            let e = tr.pressures();
            let tau = tr.actions().iter().position(|a| a.is_escalation()).map(|i| i as u32 + 1);
            if let Some(l) = lead_time_of(&e, tau) {
                ult.push(l as f64);
            }
            ua.push(area_of(&e, tau));
            ej.push(jerk_of(&e));
        }
        for (slot, vals) in per_metric.iter_mut().zip([ult, ua, ej]) {
            slot.push(AggregateRow {
                variant: v,
                stats: mean_std(&vals),
            });
        }
    }

    for tr in traces {
        let rel = PathBuf::from("plot").join(trace_file_name(&tr.scenario_id, tr.variant));
        write_file(&output_dir.join(&rel), plot_to_csv(tr).as_bytes())?;
        written.push(rel);
    }
    for (name, rows) in AGGREGATE_METRICS.iter().zip(&per_metric) {
        let rel = PathBuf::from("plot").join(format!("aggregate_{name}.csv"));
        write_file(&output_dir.join(&rel), aggregate_to_csv(rows).as_bytes())?;
        written.push(rel);
    }
    Ok(written)
}

pub fn read_aggregate(path: &Path) -> Result<Vec<AggregateRow>> {
    let text = read_file(path)?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    check_header(&mut rdr, &AGGREGATE_HEADER, "aggregate")?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let mean: Option<f64> = parse_opt(&rec[1], "mean")?;
        let std: Option<f64> = parse_opt(&rec[2], "std")?;
        let n: usize = parse(&rec[3], "n")?;
        out.push(AggregateRow {
            variant: rec[0].parse()?,
            stats: mean.zip(std).map(|(mean, std)| MeanStd { mean, std, n }),
        });
    }
    Ok(out)
}

/// Per-trajectory record in batch and run manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub scenario_id: String,
    pub kind: crate::scenario::ScenarioKind,
    pub seed: u64,
    pub onset_hour: Option<u32>,
    pub window: GroundTruthWindow,
    pub content_hash: String,
    /// Hash of the snapshot rows each variant actually consumed.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub consumed_hash: BTreeMap<AgentVariant, String>,
}

impl TrajectoryRecord {
    fn from_entry(e: &BatchEntry) -> Self {
        Self {
            scenario_id: e.scenario_id.clone(),
            kind: e.kind,
            seed: e.seed,
            onset_hour: e.onset_hour,
            window: e.window,
            content_hash: e.content_hash.clone(),
            consumed_hash: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchManifest {
    pub tool: String,
    pub master_seed: u64,
    pub rng_algorithm: String,
    pub noise_model: String,
    pub window_rule: String,
    pub config: BatchConfig,
    pub batch_hash: String,
    pub trajectories: Vec<TrajectoryRecord>,
}

impl BatchManifest {
    pub fn of(batch: &Batch) -> Self {
        Self {
            tool: TOOL.to_string(),
            master_seed: batch.master_seed,
            rng_algorithm: RNG_ALGORITHM.to_string(),
            noise_model: NOISE_MODEL_VERSION.to_string(),
            window_rule: WINDOW_RULE_VERSION.to_string(),
            config: batch.config.clone(),
            batch_hash: batch.batch_hash(),
            trajectories: batch.entries.iter().map(TrajectoryRecord::from_entry).collect(),
        }
    }
}

pub fn write_batch(batch: &Batch, dir: &Path) -> Result<()> {
    for e in &batch.entries {
        let path = dir.join("trajectories").join(format!("{}.csv", e.scenario_id));
        write_file(&path, snapshots_to_csv(&e.trajectory).as_bytes())?;
    }
    let manifest = serde_json::to_string_pretty(&BatchManifest::of(batch))?;
    write_file(&dir.join("batch.json"), manifest.as_bytes())
}

/// Loads a batch written by [`write_batch`], verifying every content hash,
/// every window, and the batch hash.
pub fn load_batch(dir: &Path) -> Result<Batch> {
    let manifest: BatchManifest = serde_json::from_str(&read_file(&dir.join("batch.json"))?)
        .map_err(|e| Error::MalformedBatch(format!("batch.json: {e}")))?;
    if manifest.trajectories.is_empty() {
        return Err(Error::MalformedBatch("batch has no trajectories".into()));
    }
    let mut entries = Vec::with_capacity(manifest.trajectories.len());
    for rec in &manifest.trajectories {
        let path = dir.join("trajectories").join(format!("{}.csv", rec.scenario_id));
        let trajectory = read_snapshots(read_file(&path)?.as_bytes())
            .map_err(|e| Error::MalformedBatch(format!("{}: {e}", path.display())))?;
        let hash = content_hash(&trajectory);
        if hash != rec.content_hash {
            return Err(Error::MalformedBatch(format!(
                "{}: content hash {hash} does not match manifest {}",
                rec.scenario_id, rec.content_hash
            )));
        }
        let window = compute_window(&trajectory)?;
        if window != rec.window {
            return Err(Error::MalformedBatch(format!(
                "{}: recorded window {:?} differs from recomputed {:?}",
                rec.scenario_id, rec.window, window
            )));
        }
        entries.push(BatchEntry {
            scenario_id: rec.scenario_id.clone(),
            kind: rec.kind,
            seed: rec.seed,
            onset_hour: rec.onset_hour,
            window,
            content_hash: hash,
            trajectory,
        });
    }
    let batch = Batch {
        master_seed: manifest.master_seed,
        config: manifest.config,
        entries,
    };
    if batch.batch_hash() != manifest.batch_hash {
        return Err(Error::MalformedBatch("batch hash mismatch".into()));
    }
    Ok(batch)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub master_seed: u64,
    pub rng_algorithm: String,
    pub noise_model: String,
    pub window_rule: String,
    pub variants: Vec<AgentVariant>,
    pub dynamics: DynamicsConfig,
    pub batch_config: BatchConfig,
    pub batch_hash: String,
    pub trajectories: Vec<TrajectoryRecord>,
    /// sha256 of every other file in the run directory, by relative path.
    pub files: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&read_file(path)?)?)
    }
}

fn consumed_hash(trace: &EpisodeTrace) -> String {
    let rows: Vec<PatientSnapshot> = trace.samples.iter().map(|s| s.snapshot).collect();
    content_hash(&rows)
}

fn rel_key(p: &Path) -> String {
    p.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

pub fn write_run(out: &RunOutput, dir: &Path) -> Result<RunManifest> {
    let mut files = BTreeMap::new();
    let mut put = |rel: PathBuf, bytes: &[u8]| -> Result<()> {
        write_file(&dir.join(&rel), bytes)?;
        files.insert(rel_key(&rel), sha256_hex(bytes));
        Ok(())
    };

    for tr in &out.traces {
        put(
            PathBuf::from("traces").join(trace_file_name(&tr.scenario_id, tr.variant)),
            trace_to_csv(tr).as_bytes(),
        )?;
    }
    put(PathBuf::from("metrics.csv"), metrics_to_csv(&out.metrics).as_bytes())?;
    put(PathBuf::from("summary.csv"), summary_to_csv(&out.summary).as_bytes())?;
    for rel in emit_plot_data(&out.traces, dir)? {
        let bytes = fs::read(dir.join(&rel)).map_err(|e| Error::io(dir.join(&rel), e))?;
        files.insert(rel_key(&rel), sha256_hex(&bytes));
    }
    write_batch(&out.batch, &dir.join("batch"))?;

    let mut trajectories: Vec<TrajectoryRecord> = out.batch.entries.iter().map(TrajectoryRecord::from_entry).collect();
    for tr in &out.traces {
        let rec = trajectories
            .iter_mut()
            .find(|r| r.scenario_id == tr.scenario_id)
            .expect("trace belongs to the batch");
        rec.consumed_hash.insert(tr.variant, consumed_hash(tr));
    }
    let manifest = RunManifest {
        tool: TOOL.to_string(),
        master_seed: out.batch.master_seed,
        rng_algorithm: RNG_ALGORITHM.to_string(),
        noise_model: NOISE_MODEL_VERSION.to_string(),
        window_rule: WINDOW_RULE_VERSION.to_string(),
        variants: out.variants.clone(),
        dynamics: out.dynamics,
        batch_config: out.batch.config.clone(),
        batch_hash: out.batch.batch_hash(),
        trajectories,
        files,
    };
    write_file(&dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(manifest)
}

/// Result of re-reading a run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summary: SummaryTable,
    pub traces_checked: usize,
    pub rows_checked: usize,
    pub plot_files: Vec<PathBuf>,
}

/// Recomputes the summary from `metrics.csv`, lints every trace file,
/// checks cross-variant input identity, and (re)writes `summary.csv` and
/// plot data.
pub fn report(dir: &Path) -> Result<Report> {
    let manifest = RunManifest::load(&dir.join("manifest.json"))?;
    let metrics = metrics_from_csv(&read_file(&dir.join("metrics.csv"))?)?;
    let summary = SummaryTable::from_metrics(&manifest.variants, &metrics)?;

    let mut traces = Vec::new();
    let mut rows = 0;
    for rec in &manifest.trajectories {
        let mut hashes = rec.consumed_hash.values();
        if let Some(first) = hashes.next() {
            if hashes.any(|h| h != first) || *first != rec.content_hash {
                return Err(Error::invalid(format!(
                    "{}: variants consumed different inputs",
                    rec.scenario_id
                )));
            }
        }
        for &v in &manifest.variants {
            let path = dir.join("traces").join(trace_file_name(&rec.scenario_id, v));
            let tr = trace_from_csv(&read_file(&path)?, &rec.scenario_id, v, rec.seed)?;
            rows += lint_trace(&tr)?;
            traces.push(tr);
        }
    }
    write_file(&dir.join("summary.csv"), summary_to_csv(&summary).as_bytes())?;
    let plot_files = emit_plot_data(&traces, dir)?;
    Ok(Report {
        summary,
        traces_checked: traces.len(),
        rows_checked: rows,
        plot_files,
    })
}
