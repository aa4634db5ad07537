//! Numeric encoding of imputed flow records.
//!
//! IP addresses become their unsigned integer value, categorical columns
//! are label-encoded against a fitted [`EncoderVocab`], and the timestamp
//! is decomposed into UTC year/month/day/hour.

use std::collections::BTreeMap;
use std::net::IpAddr;

use chrono::{Datelike, TimeZone, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::ingest::FlowRecord;

/// Column order of the encoded feature matrix.
pub const ENCODED_FEATURE_NAMES: [&str; 20] = [
    "origin_host_numeric",
    "response_host_binary",
    "origin_port",
    "response_port",
    "protocol",
    "service",
    "conn_state",
    "history",
    "duration",
    "orig_bytes",
    "resp_bytes",
    "missed_bytes",
    "orig_pkts",
    "orig_ip_bytes",
    "resp_pkts",
    "resp_ip_bytes",
    "year",
    "month",
    "day",
    "hour",
];

/// Codes for one categorical column. `"unknown"` is always code 0; the
/// categories seen at fit time get codes 1..k in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryMap {
    codes: BTreeMap<String, u32>,
}

impl CategoryMap {
    fn fit<'a>(values: impl Iterator<Item = &'a str>) -> CategoryMap {
        let mut seen: Vec<&str> = values.filter(|v| *v != "unknown").collect();
        seen.sort_unstable();
        seen.dedup();
        let mut codes = BTreeMap::new();
        codes.insert("unknown".to_string(), 0);
        for (i, category) in seen.into_iter().enumerate() {
            codes.insert(category.to_string(), (i + 1) as u32);
        }
        CategoryMap { codes }
    }

    /// Code for a category; unseen categories fall back to `"unknown"`.
    pub fn code(&self, value: &str) -> u32 {
        self.codes.get(value).copied().unwrap_or(0)
    }

    /// Number of codes, including `"unknown"`.
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // "unknown" is always present
    }
}

/// Label-encoding vocabulary for the four categorical flow columns.
/// Frozen after [`EncoderVocab::fit`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderVocab {
    pub protocol: CategoryMap,
    pub service: CategoryMap,
    pub conn_state: CategoryMap,
    pub history: CategoryMap,
}

impl EncoderVocab {
    /// Fit code maps from the categories present in `records`. Missing
    /// values are ignored; they encode as `"unknown"` either way.
    pub fn fit(records: &[FlowRecord]) -> EncoderVocab {
        let column = |get: fn(&FlowRecord) -> Option<&String>| {
            CategoryMap::fit(records.iter().filter_map(get).map(String::as_str))
        };
        EncoderVocab {
            protocol: column(|r| r.protocol.as_ref()),
            service: column(|r| r.service.as_ref()),
            conn_state: column(|r| r.conn_state.as_ref()),
            history: column(|r| r.history.as_ref()),
        }
    }
}

/// Integer value of an IP address as a real. IPv4 maps to its 32-bit
/// value, IPv6 to its 128-bit value.
pub fn ip_numeric(addr: &str) -> Option<f64> {
    match addr.parse::<IpAddr>().ok()? {
        IpAddr::V4(v4) => Some(u32::from(v4) as f64),
        IpAddr::V6(v6) => Some(u128::from(v6) as f64),
    }
}

fn timestamp_parts(ts: f64, row: usize) -> Result<[f64; 4]> {
    let err = || Error::InvalidTimestamp { row, value: ts };
    if !ts.is_finite() {
        return Err(err());
    }
    let secs = ts.floor();
    if secs < i64::MIN as f64 || secs > i64::MAX as f64 {
        return Err(err());
    }
    let when = Utc.timestamp_opt(secs as i64, 0).single().ok_or_else(err)?;
    Ok([
        f64::from(when.year()),
        f64::from(when.month()),
        f64::from(when.day()),
        f64::from(when.hour()),
    ])
}

/// Encode imputed records into the numeric feature matrix described by
/// [`ENCODED_FEATURE_NAMES`]. Records must be imputed first; a missing
/// field is an error naming the offending row.
pub fn encode(records: &[FlowRecord], vocab: &EncoderVocab) -> Result<Dataset> {
    let mut rows = Vec::with_capacity(records.len());
    let mut labels = Vec::with_capacity(records.len());

    for (i, rec) in records.iter().enumerate() {
        let ip = |value: &str| {
            ip_numeric(value).ok_or_else(|| Error::InvalidIpAddress {
                row: i,
                value: value.to_string(),
            })
        };
        let cat = |field: &'static str, value: &Option<String>, map: &CategoryMap| {
            value
                .as_deref()
                .map(|v| f64::from(map.code(v)))
                .ok_or(Error::MissingField { row: i, field })
        };
        let num = |field: &'static str, value: Option<u64>| {
            value
                .map(|v| v as f64)
                .ok_or(Error::MissingField { row: i, field })
        };

        let [year, month, day, hour] = timestamp_parts(rec.ts, i)?;
        let row = vec![
            ip(&rec.orig_host)?,
            ip(&rec.resp_host)?,
            f64::from(rec.orig_port),
            f64::from(rec.resp_port),
            cat("protocol", &rec.protocol, &vocab.protocol)?,
            cat("service", &rec.service, &vocab.service)?,
            cat("conn_state", &rec.conn_state, &vocab.conn_state)?,
            cat("history", &rec.history, &vocab.history)?,
            rec.duration.ok_or(Error::MissingField {
                row: i,
                field: "duration",
            })?,
            num("orig_bytes", rec.orig_bytes)?,
            num("resp_bytes", rec.resp_bytes)?,
            num("missed_bytes", rec.missed_bytes)?,
            num("orig_pkts", rec.orig_pkts)?,
            num("orig_ip_bytes", rec.orig_ip_bytes)?,
            num("resp_pkts", rec.resp_pkts)?,
            num("resp_ip_bytes", rec.resp_ip_bytes)?,
            year,
            month,
            day,
            hour,
        ];
        rows.push(row);
        labels.push(rec.label);
    }

    Dataset::from_rows(
        rows,
        labels,
        ENCODED_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
    )
}
