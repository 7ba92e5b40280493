use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{
    apply_sieve_flags, bound_satisfaction, check_pair, diff_table, empirical_delta_comparison,
    equal_coefficient_count, pi_star, sieve_certificate, BoundTally, CertificateSummary, DeltaRow,
    LabConfig, PrimeRecord, SignMode, DEFAULT_SIEVE_FLOOR,
};
use crate::error::{Error, Result};
use crate::richert::SieveFamily;

/// Bumped whenever a key is added, removed or renamed.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 8] = ["p", "a1", "a2", "d", "omega", "big_omega", "factor_string", "flags"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub k1: u32,
    pub k2: u32,
    pub x: u64,
    pub sign: SignMode,
    pub h_list: Vec<u64>,
    pub delta_ells: Vec<u64>,
    pub delta_n: u32,
    pub sieve_floor: u64,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(k1: u32, k2: u32, x: u64) -> Self {
        ExperimentSpec {
            k1,
            k2,
            x,
            sign: SignMode::Minus,
            h_list: vec![2, 3, 4, 6, 12],
            delta_ells: vec![3, 5, 7, 11, 13],
            delta_n: 1,
            sieve_floor: DEFAULT_SIEVE_FLOOR,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportCounts {
    pub primes_considered: usize,
    pub zero_difference: usize,
    pub quarantined: usize,
    /// `π*(X, h)` keyed by `h` in decimal.
    pub pi_star: BTreeMap<String, usize>,
    pub bound_satisfaction: BoundTally,
    pub max_omega: usize,
    pub max_big_omega: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

/// Everything a run produced. Only `timestamps` varies between identical runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub k1: u32,
    pub k2: u32,
    pub k: u32,
    pub x: u64,
    pub sign: SignMode,
    pub seed: u64,
    pub sieve_floor: u64,
    pub h_list: Vec<u64>,
    pub counts: ReportCounts,
    pub delta_comparison: Vec<DeltaRow>,
    pub certificates: Vec<CertificateSummary>,
    pub rows: Vec<PrimeRecord>,
    pub timestamps: Option<Timestamps>,
}

impl ExperimentReport {
    pub fn empty(k1: u32, k2: u32, x: u64) -> Self {
        ExperimentReport {
            schema_version: REPORT_SCHEMA_VERSION,
            tool_version: crate::VERSION.to_string(),
            k1,
            k2,
            k: k1.max(k2),
            x,
            sign: SignMode::Minus,
            seed: 0,
            sieve_floor: DEFAULT_SIEVE_FLOOR,
            h_list: Vec::new(),
            counts: ReportCounts::default(),
            delta_comparison: Vec::new(),
            certificates: Vec::new(),
            rows: Vec::new(),
            timestamps: None,
        }
    }

    /// Aggregates derived from `rows` alone.
    pub fn recompute_counts(&self) -> Result<ReportCounts> {
        counts_from_rows(&self.rows, self.k, &self.h_list)
    }

    pub fn is_consistent(&self) -> Result<bool> {
        Ok(self.recompute_counts()? == self.counts)
    }

    /// Serialized JSON without the timestamp field.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut r = self.clone();
        r.timestamps = None;
        to_json(&r)
    }
}

fn counts_from_rows(rows: &[PrimeRecord], k: u32, h_list: &[u64]) -> Result<ReportCounts> {
    let tally = bound_satisfaction(rows, k)?;
    let mut pi = BTreeMap::new();
    for &h in h_list {
        pi.insert(h.to_string(), pi_star(rows, &BigUint::from(h))?);
    }
    Ok(ReportCounts {
        primes_considered: rows.len(),
        zero_difference: equal_coefficient_count(rows),
        quarantined: rows.iter().filter(|r| r.is_quarantined()).count(),
        pi_star: pi,
        max_omega: tally.max_omega,
        max_big_omega: tally.max_big_omega,
        bound_satisfaction: tally,
    })
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis())
}

/// Build the table, all counters, the δ comparison and both sieve certificates.
pub fn run_experiment(spec: &ExperimentSpec, config: &LabConfig) -> Result<ExperimentReport> {
    check_pair(spec.k1, spec.k2)?;
    if spec.h_list.contains(&0) {
        return Err(Error::invalid("h_list", "h must be positive"));
    }
    let started = now_ms();
    let k = spec.k1.max(spec.k2);
    let mut rows = diff_table(spec.k1, spec.k2, spec.x, spec.sign, config)?;

    let mut certificates = Vec::new();
    if !rows.is_empty() {
        for family in [SieveFamily::Main, SieveFamily::OmegaVariant] {
            let cert = sieve_certificate(&rows, k, spec.x as f64, family, spec.sieve_floor)?;
            if family == SieveFamily::Main {
                apply_sieve_flags(&mut rows, &cert);
            }
            certificates.push(cert.summary);
        }
    }
    let delta_comparison = if rows.is_empty() {
        Vec::new()
    } else {
        empirical_delta_comparison(&rows, spec.k1, spec.k2, &spec.delta_ells, spec.delta_n)?
    };
    let counts = counts_from_rows(&rows, k, &spec.h_list)?;
    Ok(ExperimentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: crate::VERSION.to_string(),
        k1: spec.k1,
        k2: spec.k2,
        k,
        x: spec.x,
        sign: spec.sign,
        seed: spec.seed,
        sieve_floor: spec.sieve_floor,
        h_list: spec.h_list.clone(),
        counts,
        delta_comparison,
        certificates,
        rows,
        timestamps: Some(Timestamps {
            started_unix_ms: started,
            finished_unix_ms: now_ms(),
        }),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::invalid("format", format!("expected json or csv, got {s:?}"))),
        }
    }
}

fn to_json(report: &ExperimentReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Invariant(format!("report serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn to_csv(report: &ExperimentReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::Invariant(format!("csv encoding failed: {e}"));
    w.write_record(CSV_COLUMNS).map_err(fail)?;
    for r in &report.rows {
        let flags: Vec<&str> = r.flags.iter().map(|f| f.as_str()).collect();
        w.write_record([
            r.p.to_string(),
            r.a1.to_string(),
            r.a2.to_string(),
            r.d.to_string(),
            r.omega.map(|v| v.to_string()).unwrap_or_default(),
            r.big_omega.map(|v| v.to_string()).unwrap_or_default(),
            r.factor_string(),
            flags.join(";"),
        ])
        .map_err(fail)?;
    }
    w.into_inner()
        .map_err(|e| Error::Invariant(format!("csv flush failed: {e}")))
}

pub fn export_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let bytes = match format {
        ReportFormat::Json => to_json(report)?.into_bytes(),
        ReportFormat::Csv => to_csv(report)?,
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Read a JSON report written by [`export_report`].
pub fn import_report(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let report: ExperimentReport = serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    if report.schema_version != REPORT_SCHEMA_VERSION {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: format!("schema version {} is not {REPORT_SCHEMA_VERSION}", report.schema_version),
        });
    }
    Ok(report)
}
