//! Flat CSV and JSON renderings of a [`SweepReport`].
//!
//! Both formats carry the same rows: one per `(sweep value, trial)` followed
//! by an aggregate row with `trial = -1`. CSV floats use 9 significant digits
//! and booleans are written as `0`/`1`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sweep::{PointRecord, SweepParam, SweepPlan, SweepReport, SweepSummary};

/// Column order of the CSV output.
pub const CSV_COLUMNS: [&str; 16] = [
    "sweep_param",
    "sweep_value",
    "d",
    "epsilon",
    "delta",
    "lipschitz",
    "cells",
    "m_exact",
    "m_approx",
    "m_classic",
    "trial",
    "m_actual",
    "hit_cap",
    "ratio_actual_over_approx",
    "improvement",
    "empirical_failure_rate",
];

/// Trial value marking a per-point aggregate row.
pub const AGGREGATE_TRIAL: i64 = -1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_param: SweepParam,
    pub sweep_value: f64,
    pub d: u32,
    pub epsilon: f64,
    pub delta: f64,
    pub lipschitz: f64,
    pub cells: u64,
    pub m_exact: u64,
    pub m_approx: u64,
    pub m_classic: u64,
    pub trial: i64,
    pub m_actual: Option<f64>,
    #[serde(with = "zero_one")]
    pub hit_cap: bool,
    pub ratio_actual_over_approx: Option<f64>,
    pub improvement: f64,
    pub empirical_failure_rate: Option<f64>,
}

mod zero_one {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(D::Error::custom(format!("expected 0 or 1, got {other}"))),
        }
    }
}

fn point_rows(vary: SweepParam, point: &PointRecord) -> Vec<SweepRow> {
    let base = |trial, m_actual, hit_cap, ratio, failure| SweepRow {
        sweep_param: vary,
        sweep_value: point.value,
        d: point.params.d,
        epsilon: point.params.epsilon,
        delta: point.params.delta,
        lipschitz: point.params.lipschitz,
        cells: point.grid.cells,
        m_exact: point.bounds.m_exact,
        m_approx: point.bounds.m_approx,
        m_classic: point.bounds.m_classic,
        trial,
        m_actual,
        hit_cap,
        ratio_actual_over_approx: ratio,
        improvement: point.improvement(),
        empirical_failure_rate: failure,
    };
    let m_approx = point.bounds.m_approx as f64;
    let mut rows: Vec<SweepRow> = point
        .trials
        .iter()
        .enumerate()
        .map(|(t, trial)| {
            let m = trial.m_actual.map(|m| m as f64);
            let failed = m.is_none_or(|m| m > m_approx);
            base(
                t as i64,
                m,
                trial.hit_cap,
                m.map(|m| m / m_approx),
                Some(if failed { 1.0 } else { 0.0 }),
            )
        })
        .collect();
    rows.push(base(
        AGGREGATE_TRIAL,
        point.mean_m_actual(),
        point.trials.iter().any(|t| t.hit_cap),
        point.mean_ratio(),
        point.empirical_failure_rate(),
    ));
    rows
}

impl SweepReport {
    /// Detail and aggregate rows in output order.
    pub fn rows(&self) -> Vec<SweepRow> {
        self.points.iter().flat_map(|p| point_rows(self.plan.vary, p)).collect()
    }
}

/// Formats with 9 significant digits, dropping trailing zeros.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_sig9).unwrap_or_default()
}

/// Writes the CSV header followed by every row of `report`.
pub fn emit_csv<W: Write>(report: &SweepReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in report.rows() {
        w.write_record([
            row.sweep_param.name().to_string(),
            format_sig9(row.sweep_value),
            row.d.to_string(),
            format_sig9(row.epsilon),
            format_sig9(row.delta),
            format_sig9(row.lipschitz),
            row.cells.to_string(),
            row.m_exact.to_string(),
            row.m_approx.to_string(),
            row.m_classic.to_string(),
            row.trial.to_string(),
            opt(row.m_actual),
            u8::from(row.hit_cap).to_string(),
            opt(row.ratio_actual_over_approx),
            format_sig9(row.improvement),
            opt(row.empirical_failure_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// The JSON document: plan, flat records, and summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub plan: SweepPlan,
    pub records: Vec<SweepRow>,
    pub summary: SweepSummary,
}

impl From<&SweepReport> for SweepDocument {
    fn from(report: &SweepReport) -> Self {
        SweepDocument {
            plan: report.plan.clone(),
            records: report.rows(),
            summary: report.summary.clone(),
        }
    }
}

pub fn emit_json<W: Write>(report: &SweepReport, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &SweepDocument::from(report))?;
    writeln!(out)?;
    Ok(())
}

pub fn parse_json<R: Read>(input: R) -> Result<SweepDocument> {
    Ok(serde_json::from_reader(input)?)
}
