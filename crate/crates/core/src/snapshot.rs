//! Hourly patient snapshots and the binary physiological invariants they violate.
//!
//! Units are fixed: MAP in mmHg, SpO2 in percent, respiratory rate in
//! breaths/min, temperature in °C. Mental status and urine output are
//! carried as binary flags.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

pub const MAP_LOW: f64 = 75.0;
pub const MAP_SEVERE: f64 = 70.0;
pub const SPO2_LOW: f64 = 94.0;
pub const SPO2_SEVERE: f64 = 92.0;
pub const RR_HIGH: f64 = 22.0;
pub const TEMP_FEVER: f64 = 38.3;

/// Column order of the snapshot table.
pub const SNAPSHOT_HEADER: [&str; 7] = [
    "t",
    "map",
    "spo2",
    "rr",
    "temp",
    "mental_abnormal",
    "urine_reduced",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatientSnapshot {
    pub t: u32,
    pub map: f64,
    pub spo2: f64,
    pub rr: f64,
    pub temp: f64,
    pub mental_abnormal: bool,
    pub urine_reduced: bool,
}

impl PatientSnapshot {
    pub fn validate(&self) -> Result<()> {
        if self.t < 1 {
            return Err(Error::invalid("snapshot hour must be >= 1"));
        }
        ensure_finite("map", self.map)?;
        ensure_finite("spo2", self.spo2)?;
        ensure_finite("rr", self.rr)?;
        ensure_finite("temp", self.temp)?;
        Ok(())
    }

    /// The numeric vitals in table order.
    pub fn vitals(&self) -> [f64; 4] {
        [self.map, self.spo2, self.rr, self.temp]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ViolationVector {
    pub hypotension: bool,
    pub hypotension_severe: bool,
    pub hypoxemia: bool,
    pub hypoxemia_severe: bool,
    pub tachypnea: bool,
    pub fever: bool,
    pub mental_abnormal: bool,
    pub urine_reduced: bool,
}

impl ViolationVector {
    /// Number of moderate invariants violated (severe variants are not counted
    /// separately).
    pub fn moderate_count(&self) -> usize {
        [
            self.hypotension,
            self.hypoxemia,
            self.tachypnea,
            self.fever,
            self.mental_abnormal,
            self.urine_reduced,
        ]
        .iter()
        .filter(|&&f| f)
        .count()
    }

    pub fn as_array(&self) -> [bool; 8] {
        [
            self.hypotension,
            self.hypotension_severe,
            self.hypoxemia,
            self.hypoxemia_severe,
            self.tachypnea,
            self.fever,
            self.mental_abnormal,
            self.urine_reduced,
        ]
    }
}

pub fn detect_violations(snapshot: &PatientSnapshot) -> Result<ViolationVector> {
    snapshot.validate()?;
    Ok(ViolationVector {
        hypotension: snapshot.map < MAP_LOW,
        hypotension_severe: snapshot.map < MAP_SEVERE,
        hypoxemia: snapshot.spo2 < SPO2_LOW,
        hypoxemia_severe: snapshot.spo2 < SPO2_SEVERE,
        tachypnea: snapshot.rr > RR_HIGH,
        fever: snapshot.temp >= TEMP_FEVER,
        mental_abnormal: snapshot.mental_abnormal,
        urine_reduced: snapshot.urine_reduced,
    })
}

/// Checks that a sequence is non-empty, valid, and runs t = 1..T contiguously.
pub fn validate_sequence(snapshots: &[PatientSnapshot]) -> Result<()> {
    if snapshots.is_empty() {
        return Err(Error::invalid("snapshot sequence is empty"));
    }
    for (i, s) in snapshots.iter().enumerate() {
        s.validate().map_err(|e| e.at_hour(s.t))?;
        let expected = i as u32 + 1;
        if s.t != expected {
            return Err(Error::invalid(format!(
                "snapshot hours must run 1..T contiguously; row {} has t={} (expected {expected})",
                i + 1,
                s.t
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotRow {
    t: u32,
    map: f64,
    spo2: f64,
    rr: f64,
    temp: f64,
    mental_abnormal: u8,
    urine_reduced: u8,
}

fn flag(name: &'static str, v: u8) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(Error::invalid(format!("{name} must be 0 or 1, got {other}"))),
    }
}

pub fn read_snapshots<R: Read>(reader: R) -> Result<Vec<PatientSnapshot>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(SNAPSHOT_HEADER.iter().copied()) {
        return Err(Error::invalid(format!(
            "unexpected snapshot header: {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for row in rdr.deserialize::<SnapshotRow>() {
        let row = row?;
        out.push(PatientSnapshot {
            t: row.t,
            map: row.map,
            spo2: row.spo2,
            rr: row.rr,
            temp: row.temp,
            mental_abnormal: flag("mental_abnormal", row.mental_abnormal)?,
            urine_reduced: flag("urine_reduced", row.urine_reduced)?,
        });
    }
    validate_sequence(&out)?;
    Ok(out)
}

pub fn write_snapshots<W: Write>(writer: W, snapshots: &[PatientSnapshot]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for s in snapshots {
        wtr.serialize(SnapshotRow {
            t: s.t,
            map: s.map,
            spo2: s.spo2,
            rr: s.rr,
            temp: s.temp,
            mental_abnormal: s.mental_abnormal as u8,
            urine_reduced: s.urine_reduced as u8,
        })?;
    }
    wtr.flush().map_err(|e| Error::io("<snapshot writer>", e))?;
    Ok(())
}

pub fn snapshots_to_csv(snapshots: &[PatientSnapshot]) -> String {
    let mut buf = Vec::new();
    write_snapshots(&mut buf, snapshots).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}
