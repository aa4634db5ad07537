//! Flow-log ingestion: parsing Zeek-style conn.log files and turning the
//! records into a numeric [`Dataset`](crate::data::Dataset).
//!
//! The preprocessing chain is: parse, [`FlowRecord::imputed`] to fill
//! missing fields, [`encode`](encode::encode) to a numeric matrix, then
//! [`RobustScaler`](scale::RobustScaler) fitted on the training split.

mod conn_log;
mod encode;
mod scale;

pub use conn_log::{parse_conn_log, parse_conn_log_file, ParsedLog};
pub use encode::{encode, ip_numeric, EncoderVocab, ENCODED_FEATURE_NAMES};
pub use scale::RobustScaler;

use crate::data::ClassLabel;

/// One parsed network flow. Optional fields hold `None` where the log had
/// `-` or `(empty)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRecord {
    pub ts: f64,
    pub orig_host: String,
    pub resp_host: String,
    pub orig_port: u16,
    pub resp_port: u16,
    pub protocol: Option<String>,
    pub service: Option<String>,
    pub conn_state: Option<String>,
    pub history: Option<String>,
    pub duration: Option<f64>,
    pub orig_bytes: Option<u64>,
    pub resp_bytes: Option<u64>,
    pub missed_bytes: Option<u64>,
    pub orig_pkts: Option<u64>,
    pub orig_ip_bytes: Option<u64>,
    pub resp_pkts: Option<u64>,
    pub resp_ip_bytes: Option<u64>,
    pub label: ClassLabel,
}

impl FlowRecord {
    /// Fill missing fields: categorical gaps become `"unknown"`, numeric
    /// gaps become zero. Populated fields are left untouched.
    pub fn imputed(mut self) -> FlowRecord {
        fn unknown(slot: &mut Option<String>) {
            if slot.is_none() {
                *slot = Some("unknown".to_string());
            }
        }
        unknown(&mut self.protocol);
        unknown(&mut self.service);
        unknown(&mut self.conn_state);
        unknown(&mut self.history);
        self.duration.get_or_insert(0.0);
        for slot in [
            &mut self.orig_bytes,
            &mut self.resp_bytes,
            &mut self.missed_bytes,
            &mut self.orig_pkts,
            &mut self.orig_ip_bytes,
            &mut self.resp_pkts,
            &mut self.resp_ip_bytes,
        ] {
            slot.get_or_insert(0);
        }
        self
    }
}

/// Impute a whole batch. See [`FlowRecord::imputed`].
pub fn impute_all(records: Vec<FlowRecord>) -> Vec<FlowRecord> {
    records.into_iter().map(FlowRecord::imputed).collect()
}

#[cfg(test)]
pub(crate) fn test_record() -> FlowRecord {
    FlowRecord {
        ts: 1545403814.5,
        orig_host: "192.168.1.195".into(),
        resp_host: "104.16.28.34".into(),
        orig_port: 41040,
        resp_port: 443,
        protocol: Some("tcp".into()),
        service: Some("ssl".into()),
        conn_state: Some("SF".into()),
        history: Some("ShADadFf".into()),
        duration: Some(4.4),
        orig_bytes: Some(929),
        resp_bytes: Some(5113),
        missed_bytes: Some(0),
        orig_pkts: Some(13),
        orig_ip_bytes: Some(1613),
        resp_pkts: Some(12),
        resp_ip_bytes: Some(5753),
        label: ClassLabel::Benign,
    }
}
