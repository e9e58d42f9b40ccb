//! Acceptance criteria. Each criterion prints one PASS/FAIL line; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use escalation_core::dynamics::{init_state, step, AgentVariant, DynamicsConfig, Velocity};
use escalation_core::harness::{execute, run_batch, run_episode, RunConfig, DEFAULT_SEED};
use escalation_core::metrics::{
    escalation_jerk, escalation_status, unease_area, unease_lead_time, EpisodeTrace, EscalationStatus,
    GroundTruthWindow, TraceSample,
};
use escalation_core::output::RunManifest;
use escalation_core::policy::{pressure, select_action, Action};
use escalation_core::risk::{encode_risk, RiskVector};
use escalation_core::scenario::ScenarioKind;
use escalation_core::snapshot::PatientSnapshot;

fn report(id: u32, name: &str, ok: bool, detail: impl AsRef<str>) {
    println!(
        "[{}] criterion {id:>2}: {name} -- {}",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

/// Indicator pattern (MAP<75, SpO2<94, RR>22, Temp>=38.3).
type Indicators = (bool, bool, bool, bool);

/// Hand-evaluated (S, U) for the sixteen vital-sign indicator patterns.
const SU_TABLE: [(Indicators, f64, f64); 16] = [
    ((false, false, false, false), 1.0, 0.0),
    ((false, false, false, true), 0.8, 0.1),
    ((false, false, true, false), 0.8, 0.2),
    ((false, false, true, true), 0.6, 0.3),
    ((false, true, false, false), 0.7, 0.3),
    ((false, true, false, true), 0.5, 0.4),
    ((false, true, true, false), 0.5, 0.5),
    ((false, true, true, true), 0.3, 0.6),
    ((true, false, false, false), 0.7, 0.4),
    ((true, false, false, true), 0.5, 0.5),
    ((true, false, true, false), 0.5, 0.6),
    ((true, false, true, true), 0.3, 0.7),
    ((true, true, false, false), 0.4, 0.7),
    ((true, true, false, true), 0.2, 0.8),
    ((true, true, true, false), 0.2, 0.9),
    ((true, true, true, true), 0.0, 1.0),
];

/// Hand-evaluated C for (mental abnormal, urine reduced).
const C_TABLE: [((bool, bool), f64); 4] = [
    ((false, false), 1.0),
    ((false, true), 0.6),
    ((true, false), 0.6),
    ((true, true), 0.2),
];

fn lattice_snapshot((m, o, r, t): Indicators, (mental, urine): (bool, bool)) -> PatientSnapshot {
    PatientSnapshot {
        t: 1,
        map: if m { 72.0 } else { 85.0 },
        spo2: if o { 93.0 } else { 97.0 },
        rr: if r { 24.0 } else { 16.0 },
        temp: if t { 38.5 } else { 37.0 },
        mental_abnormal: mental,
        urine_reduced: urine,
    }
}

fn all_lattice_points() -> Vec<(PatientSnapshot, [f64; 3])> {
    let mut out = Vec::new();
    for (bits, s, u) in SU_TABLE {
        for (flags, c) in C_TABLE {
            out.push((lattice_snapshot(bits, flags), [s, u, c]));
        }
    }
    out
}

#[test]
fn c01_encoder_oracle() {
    let start = Instant::now();
    let points = all_lattice_points();
    let mut worst = 0.0f64;
    for (snap, want) in &points {
        let got = encode_risk(snap).unwrap().as_array();
        for (g, w) in got.iter().zip(want) {
            worst = worst.max((g - w).abs());
        }
    }
    let elapsed = start.elapsed();
    let ok = points.len() == 64 && worst <= 1e-12 && within(elapsed, 1);
    report(1, "encoder oracle (64 combinations)", ok, format!("max |err| = {worst:.1e}, {elapsed:?}"));
    assert!(ok);
}

#[test]
fn c02_pressure_and_policy_oracle() {
    let start = Instant::now();
    let points = all_lattice_points();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (snap, _) = &points[rng.gen_range(0..points.len())];
        let z = encode_risk(snap).unwrap();
        let oracle = 0.4 * (1.0 - z.s) + 0.4 * z.u + 0.2 * (1.0 - z.c);
        worst = worst.max((pressure(&z) - oracle).abs());
    }
    let boundaries = [
        (0.39, Action::A0),
        (0.40, Action::A1),
        (0.59, Action::A1),
        (0.599_999_999, Action::A1),
        (0.60, Action::A2),
    ];
    let boundaries_ok = boundaries.iter().all(|&(e, a)| select_action(e).unwrap() == a);
    let elapsed = start.elapsed();
    let ok = worst <= 1e-12 && boundaries_ok && within(elapsed, 1);
    report(
        2,
        "pressure/policy oracle",
        ok,
        format!("max |err| = {worst:.1e}, boundaries ok = {boundaries_ok}, {elapsed:?}"),
    );
    assert!(ok);
}

fn random_risk(rng: &mut impl Rng) -> RiskVector {
    RiskVector::new(rng.gen(), rng.gen(), rng.gen())
}

#[test]
fn c03_second_order_reduces_to_first_order() {
    let start = Instant::now();
    let cfg = DynamicsConfig {
        alpha: 0.3,
        alpha_up: 0.3,
        alpha_down: 0.3,
        beta: 0.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut vel_nonzero = false;
    for _ in 0..1000 {
        let inputs: Vec<RiskVector> = (0..50).map(|_| random_risk(&mut rng)).collect();
        let mut first = init_state(inputs[0], AgentVariant::FirstOrder);
        let mut second = init_state(inputs[0], AgentVariant::SecondOrder);
        for r in &inputs[1..] {
            first = step(&first, r, AgentVariant::FirstOrder, &cfg).unwrap();
            second = step(&second, r, AgentVariant::SecondOrder, &cfg).unwrap();
            vel_nonzero |= second.vel != Velocity::ZERO;
            for (a, b) in first.z.as_array().iter().zip(second.z.as_array()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-12 && !vel_nonzero && within(elapsed, 5);
    report(
        3,
        "second-order reduction (1000 x 50 steps)",
        ok,
        format!("max |diff| = {worst:.1e}, velocity stayed zero = {}, {elapsed:?}", !vel_nonzero),
    );
    assert!(ok);
}

#[test]
fn c04_fixed_point_and_geometric_convergence() {
    let cfg = DynamicsConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);

    let mut fixed_ok = true;
    for _ in 0..100 {
        let r = random_risk(&mut rng);
        for v in AgentVariant::ALL {
            let mut st = init_state(r, v);
            for _ in 0..50 {
                st = step(&st, &r, v, &cfg).unwrap();
                fixed_ok &= st.z == r && st.vel == Velocity::ZERO;
            }
        }
    }

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z1 = random_risk(&mut rng);
        let r = random_risk(&mut rng);
        let mut st = init_state(z1, AgentVariant::FirstOrder);
        for t in 2..=50u32 {
            st = step(&st, &r, AgentVariant::FirstOrder, &cfg).unwrap();
            let factor = (1.0 - cfg.alpha).powi(t as i32 - 1);
            for i in 0..3 {
                let want = factor * (z1.as_array()[i] - r.as_array()[i]).abs();
                let got = (st.z.as_array()[i] - r.as_array()[i]).abs();
                worst = worst.max((got - want).abs());
            }
        }
    }
    let ok = fixed_ok && worst <= 1e-9;
    report(
        4,
        "fixed point and first-order geometric decay",
        ok,
        format!("fixed point exact = {fixed_ok}, max decay err = {worst:.1e}"),
    );
    assert!(ok);
}

#[test]
fn c05_bounds_fuzz() {
    let cfg = DynamicsConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut steps = 0usize;
    let mut violations = 0usize;
    while steps < 100_000 {
        let variant = AgentVariant::ALL[rng.gen_range(0..3)];
        let mut st = init_state(random_risk(&mut rng), variant);
        for _ in 0..rng.gen_range(1..200) {
            // Mix lattice-like extremes with interior points.
            let r = if rng.gen_bool(0.5) {
                RiskVector::new(
                    [0.0, 1.0][rng.gen_range(0..2)],
                    [0.0, 1.0][rng.gen_range(0..2)],
                    [0.2, 0.6, 1.0][rng.gen_range(0..3)],
                )
            } else {
                random_risk(&mut rng)
            };
            st = step(&st, &r, variant, &cfg).unwrap();
            let e = pressure(&st.z);
            if !st.z.in_unit_cube() || !(0.0..=1.0).contains(&e) {
                violations += 1;
            }
            steps += 1;
        }
    }
    let ok = violations == 0;
    report(5, "bounds fuzz", ok, format!("{steps} steps, {violations} out-of-range states"));
    assert!(ok);
}

fn trace_of(pressures: &[f64]) -> EpisodeTrace {
    EpisodeTrace {
        variant: AgentVariant::Stateless,
        scenario_id: "hand".into(),
        seed: 0,
        samples: pressures
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let t = i as u32 + 1;
                TraceSample {
                    t,
                    snapshot: PatientSnapshot {
                        t,
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
                }
            })
            .collect(),
    }
}

#[test]
fn c06_metrics_oracle() {
    let tr = trace_of(&[0.1, 0.35, 0.5, 0.65]);
    let ult = unease_lead_time(&tr).unwrap();
    let ua = unease_area(&tr).unwrap();
    let ej = escalation_jerk(&tr).unwrap();
    let metrics_ok = ult == Some(2) && (ua - 1.6).abs() <= 1e-12 && (ej - 0.25).abs() <= 1e-12;

    let w = GroundTruthWindow::new(4, 8);
    let cases = [
        (Some(3), w, EscalationStatus::Early),
        (Some(5), w, EscalationStatus::Within),
        (Some(9), w, EscalationStatus::Late),
        (None, w, EscalationStatus::Missed),
        (None, GroundTruthWindow::NONE, EscalationStatus::CorrectNonEscalation),
        (Some(5), GroundTruthWindow::NONE, EscalationStatus::FalseEscalation),
    ];
    let status_ok = cases.iter().all(|(tau, w, want)| escalation_status(*tau, w) == *want);
    let ok = metrics_ok && status_ok;
    report(
        6,
        "metrics oracle",
        ok,
        format!("(ULT, UA, EJ) = ({ult:?}, {ua}, {ej}); six status cases ok = {status_ok}"),
    );
    assert!(ok);
}

struct Ordering {
    ej: [f64; 3],
    ua: [f64; 3],
}

impl Ordering {
    fn of(seed: u64) -> Ordering {
        let cfg = RunConfig {
            seed,
            ..Default::default()
        };
        let out = execute(&cfg).unwrap();
        let get = |v: AgentVariant| out.summary.row(v).unwrap().clone();
        let (s, f, so) = (
            get(AgentVariant::Stateless),
            get(AgentVariant::FirstOrder),
            get(AgentVariant::SecondOrder),
        );
        Ordering {
            ej: [s.ej.mean, f.ej.mean, so.ej.mean],
            ua: [s.ua.mean, f.ua.mean, so.ua.mean],
        }
    }

    /// Stateless > SecondOrder > FirstOrder on EJ (margin 0.02) and
    /// FirstOrder > SecondOrder > Stateless on UA (margin 0.05).
    fn holds(&self) -> bool {
        let [ej_s, ej_f, ej_so] = self.ej;
        let [ua_s, ua_f, ua_so] = self.ua;
        ej_s - ej_so >= 0.02 && ej_so - ej_f >= 0.02 && ua_f - ua_so >= 0.05 && ua_so - ua_s >= 0.05
    }
}

#[test]
fn c07_table_one_ordering() {
    let start = Instant::now();
    let default_cfg = RunConfig::default();
    assert_eq!(default_cfg.batch.n, 50);
    assert_eq!(default_cfg.batch.horizon_hours, 24);
    assert_eq!(default_cfg.batch.noise.per_variable_event_rate, 0.08);
    assert_eq!(
        (default_cfg.batch.mix.abrupt, default_cfg.batch.mix.slow_drift, default_cfg.batch.mix.stable),
        (0.4, 0.4, 0.2)
    );

    let o = Ordering::of(DEFAULT_SEED);
    let default_ok = o.holds();
    let elapsed = start.elapsed();
    let detail = format!(
        "seed {DEFAULT_SEED}: EJ stateless/second/first = {:.3}/{:.3}/{:.3}, UA first/second/stateless = {:.3}/{:.3}/{:.3}, {elapsed:?}",
        o.ej[0], o.ej[2], o.ej[1], o.ua[1], o.ua[2], o.ua[0]
    );

    // Seed robustness: the ordering must also hold on at least 80% of 20
    // independent master seeds.
    let held = (1..=20u64).filter(|&s| Ordering::of(s.wrapping_mul(7919)).holds()).count();
    let ok = default_ok && within(elapsed, 30) && held >= 16;
    report(7, "Table 1 ordering", ok, format!("{detail}; held on {held}/20 seeds"));
    assert!(ok);
}

fn max_jump(trace: &EpisodeTrace) -> f64 {
    escalation_jerk(trace).unwrap()
}

#[test]
fn c08_abrupt_jump_is_smoothed() {
    let out = execute(&RunConfig::default()).unwrap();
    let cfg = DynamicsConfig::default();
    let jumps: Vec<(String, f64, f64)> = out
        .batch
        .entries
        .iter()
        .filter(|e| e.kind == ScenarioKind::Abrupt)
        .map(|e| {
            let stateless = max_jump(&run_episode(&e.trajectory, AgentVariant::Stateless, &cfg).unwrap());
            let second = max_jump(&run_episode(&e.trajectory, AgentVariant::SecondOrder, &cfg).unwrap());
            (e.scenario_id.clone(), stateless, second)
        })
        .collect();
    let holds = |&(_, s, so): &(String, f64, f64)| s >= 0.3 && so < s;
    let (id, s, so) = &jumps[0];
    let ok = holds(&jumps[0]);
    let all = jumps.iter().filter(|j| holds(j)).count();
    report(
        8,
        "abrupt trajectory: stateless jump >= 0.3, second-order smaller",
        ok,
        format!(
            "{id}: stateless max jump {s:.3}, second-order {so:.3}; holds on {all}/{} abrupt trajectories",
            jumps.len()
        ),
    );
    assert!(ok);
}

#[test]
fn c09_identical_inputs_across_variants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        output_dir: dir.path().to_path_buf(),
        ..Default::default()
    };
    run_batch(&cfg).unwrap();
    let manifest = RunManifest::load(&dir.path().join("manifest.json")).unwrap();
    let mut mismatches = 0;
    for rec in &manifest.trajectories {
        let ok = rec.consumed_hash.len() == 3 && rec.consumed_hash.values().all(|h| *h == rec.content_hash);
        if !ok {
            mismatches += 1;
        }
    }
    let ok = mismatches == 0 && manifest.trajectories.len() == 50;
    report(
        9,
        "identical perturbed inputs across variants",
        ok,
        format!("{} trajectories, {mismatches} hash mismatches", manifest.trajectories.len()),
    );
    assert!(ok);
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn c10_end_to_end_determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let cfg = RunConfig {
            output_dir: dir.path().to_path_buf(),
            ..Default::default()
        };
        run_batch(&cfg).unwrap();
    }
    let ta = read_tree(a.path());
    let tb = read_tree(b.path());
    let has_core = ["manifest.json", "summary.csv", "metrics.csv"].iter().all(|f| ta.contains_key(*f));
    let traces = ta.keys().filter(|k| k.starts_with("traces")).count();
    let ok = has_core && traces == 150 && ta == tb;
    report(
        10,
        "end-to-end determinism",
        ok,
        format!("{} files compared ({traces} traces), identical = {}", ta.len(), ta == tb),
    );
    assert!(ok);
}
