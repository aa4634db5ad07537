//! Zeek conn.log parser.
//!
//! The format is tab-separated with `#`-prefixed comment lines; a
//! `#fields` line names the columns. `-` and `(empty)` mark missing
//! values. The final label column maps to [`ClassLabel`]: any label
//! containing `Benign` is benign, everything else is malicious.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::data::ClassLabel;
use crate::error::{Error, Result};
use crate::ingest::FlowRecord;

/// Result of parsing one log: the good records plus a count of data lines
/// skipped because a field failed to parse.
#[derive(Debug)]
pub struct ParsedLog {
    pub records: Vec<FlowRecord>,
    pub skipped: usize,
}

const REQUIRED_COLUMNS: [&str; 18] = [
    "ts",
    "id.orig_h",
    "id.orig_p",
    "id.resp_h",
    "id.resp_p",
    "proto",
    "service",
    "duration",
    "orig_bytes",
    "resp_bytes",
    "conn_state",
    "missed_bytes",
    "history",
    "orig_pkts",
    "orig_ip_bytes",
    "resp_pkts",
    "resp_ip_bytes",
    "label",
];

struct ColumnIndex {
    positions: Vec<usize>,
}

impl ColumnIndex {
    fn from_header(names: &[&str]) -> Result<ColumnIndex> {
        let mut positions = Vec::with_capacity(REQUIRED_COLUMNS.len());
        for required in REQUIRED_COLUMNS {
            match names.iter().position(|&n| n == required) {
                Some(pos) => positions.push(pos),
                None => {
                    return Err(Error::MissingColumn {
                        column: required.to_string(),
                    })
                }
            }
        }
        Ok(ColumnIndex { positions })
    }

    fn get<'a>(&self, fields: &[&'a str], column: usize) -> Option<&'a str> {
        let raw = fields.get(self.positions[column]).copied()?;
        if raw == "-" || raw == "(empty)" {
            None
        } else {
            Some(raw)
        }
    }
}

// Column offsets inside REQUIRED_COLUMNS.
const TS: usize = 0;
const ORIG_H: usize = 1;
const ORIG_P: usize = 2;
const RESP_H: usize = 3;
const RESP_P: usize = 4;
const PROTO: usize = 5;
const SERVICE: usize = 6;
const DURATION: usize = 7;
const ORIG_BYTES: usize = 8;
const RESP_BYTES: usize = 9;
const CONN_STATE: usize = 10;
const MISSED_BYTES: usize = 11;
const HISTORY: usize = 12;
const ORIG_PKTS: usize = 13;
const ORIG_IP_BYTES: usize = 14;
const RESP_PKTS: usize = 15;
const RESP_IP_BYTES: usize = 16;
const LABEL: usize = 17;

/// Parse a conn.log stream. Malformed data lines are skipped and counted;
/// a missing `#fields` header is a hard error.
pub fn parse_conn_log<R: BufRead>(reader: R) -> Result<ParsedLog> {
    let mut columns: Option<ColumnIndex> = None;
    let mut records = Vec::new();
    let mut skipped = 0usize;

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line.map_err(|e| Error::Io {
            path: format!("<line {line_no}>"),
            source: e,
        })?;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#fields") {
            let names: Vec<&str> = rest.split('\t').filter(|s| !s.is_empty()).collect();
            columns = Some(ColumnIndex::from_header(&names)?);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let Some(columns) = columns.as_ref() else {
            return Err(Error::MissingFieldsHeader { line: line_no });
        };
        let fields: Vec<&str> = line.split('\t').collect();
        match parse_record(columns, &fields) {
            Some(record) => records.push(record),
            None => {
                log::warn!("conn.log line {line_no}: unparseable record, skipping");
                skipped += 1;
            }
        }
    }
    Ok(ParsedLog { records, skipped })
}

/// Parse a conn.log file from disk.
pub fn parse_conn_log_file(path: &Path) -> Result<ParsedLog> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_conn_log(BufReader::new(file))
}

fn parse_record(columns: &ColumnIndex, fields: &[&str]) -> Option<FlowRecord> {
    let port = |col: usize| -> Option<u16> {
        let value: u32 = columns.get(fields, col)?.parse().ok()?;
        u16::try_from(value).ok()
    };
    let count = |col: usize| -> Option<Option<u64>> {
        match columns.get(fields, col) {
            None => Some(None),
            Some(raw) => raw.parse::<u64>().ok().map(Some),
        }
    };
    let text = |col: usize| columns.get(fields, col).map(str::to_string);

    let ts: f64 = columns.get(fields, TS)?.parse().ok().filter(|v: &f64| v.is_finite())?;
    let duration = match columns.get(fields, DURATION) {
        None => None,
        Some(raw) => Some(raw.parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0)?),
    };
    // Any label containing "Benign" is benign; everything else, malicious.
    let label = if columns.get(fields, LABEL).unwrap_or("").contains("Benign") {
        ClassLabel::Benign
    } else {
        ClassLabel::Malicious
    };

    Some(FlowRecord {
        ts,
        orig_host: columns.get(fields, ORIG_H)?.to_string(),
        resp_host: columns.get(fields, RESP_H)?.to_string(),
        orig_port: port(ORIG_P)?,
        resp_port: port(RESP_P)?,
        protocol: text(PROTO),
        service: text(SERVICE),
        conn_state: text(CONN_STATE),
        history: text(HISTORY),
        duration,
        orig_bytes: count(ORIG_BYTES)?,
        resp_bytes: count(RESP_BYTES)?,
        missed_bytes: count(MISSED_BYTES)?,
        orig_pkts: count(ORIG_PKTS)?,
        orig_ip_bytes: count(ORIG_IP_BYTES)?,
        resp_pkts: count(RESP_PKTS)?,
        resp_ip_bytes: count(RESP_IP_BYTES)?,
        label,
    })
}
