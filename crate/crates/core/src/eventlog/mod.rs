//! Event logs: parsing, validation, and partitioning into process variants.
//!
//! A log is a set of traces; a trace is the time-ordered event sequence of one
//! case. Logs arrive as XES (IEEE 1849-2016) or headered CSV and are immutable
//! once constructed. [`split_variants`] partitions a log into exactly two
//! variants by a pair of mutually exclusive predicates on one attribute;
//! traces matching neither predicate are dropped and counted.

mod csv_io;
mod xes;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{parse_csv, CsvMapping};
pub use xes::parse_xes;

/// Scalar attribute value attached to events or cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    String(String),
}

impl AttrValue {
    /// Numeric view; integers widen to f64.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            AttrValue::Int(i) => Some(*i as f64),
            AttrValue::Float(f) => Some(*f),
            _ => None,
        }
    }

    /// Parse a raw string the way CSV ingestion does: int, then float, then
    /// bool, falling back to the string itself.
    pub fn parse_lossy(raw: &str) -> AttrValue {
        if let Ok(i) = raw.parse::<i64>() {
            return AttrValue::Int(i);
        }
        if let Ok(f) = raw.parse::<f64>() {
            if f.is_finite() {
                return AttrValue::Float(f);
            }
        }
        match raw {
            "true" => AttrValue::Bool(true),
            "false" => AttrValue::Bool(false),
            _ => AttrValue::String(raw.to_string()),
        }
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Bool(b) => write!(f, "{b}"),
            AttrValue::Int(i) => write!(f, "{i}"),
            AttrValue::Float(x) => write!(f, "{x:?}"),
            AttrValue::String(s) => write!(f, "{s}"),
        }
    }
}

/// One recorded activity execution.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub activity: String,
    pub case_id: String,
    pub timestamp: DateTime<Utc>,
    pub attributes: BTreeMap<String, AttrValue>,
}

/// The ordered event sequence of one case.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub case_id: String,
    pub events: Vec<Event>,
    pub case_attributes: BTreeMap<String, AttrValue>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn activities(&self) -> impl Iterator<Item = &str> {
        self.events.iter().map(|e| e.activity.as_str())
    }

    /// Resolve an attribute: case attributes first, then the first event
    /// carrying it.
    pub fn attribute(&self, name: &str) -> Option<&AttrValue> {
        self.case_attributes
            .get(name)
            .or_else(|| self.events.iter().find_map(|e| e.attributes.get(name)))
    }
}

/// An immutable set of traces plus the activity alphabet observed in them.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub traces: Vec<Trace>,
    /// Sorted distinct activity names over all traces.
    pub alphabet: Vec<String>,
}

impl EventLog {
    /// Validate and finalize: events sorted by timestamp (stable, so file
    /// order breaks ties), non-empty traces, unique case ids, alphabet built.
    pub fn from_traces(mut traces: Vec<Trace>) -> Result<EventLog> {
        if traces.is_empty() {
            return Err(Error::NoTraces);
        }
        let mut seen = HashSet::new();
        let mut alphabet: Vec<String> = Vec::new();
        for trace in &mut traces {
            if trace.events.is_empty() {
                return Err(Error::NoTraces);
            }
            if !seen.insert(trace.case_id.clone()) {
                return Err(Error::DuplicateCaseId(trace.case_id.clone()));
            }
            trace.events.sort_by_key(|e| e.timestamp);
            for e in &trace.events {
                alphabet.push(e.activity.clone());
            }
        }
        alphabet.sort_unstable();
        alphabet.dedup();
        Ok(EventLog { traces, alphabet })
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Longest trace length, 0 for an empty log.
    pub fn max_trace_len(&self) -> usize {
        self.traces.iter().map(Trace::len).max().unwrap_or(0)
    }
}

/// Comparison operator of a split predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Ge,
    Gt,
    Le,
    Lt,
}

impl CmpOp {
    fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "eq",
            CmpOp::Ne => "ne",
            CmpOp::Ge => "ge",
            CmpOp::Gt => "gt",
            CmpOp::Le => "le",
            CmpOp::Lt => "lt",
        }
    }
}

/// One comparison against an attribute value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Predicate {
    pub op: CmpOp,
    pub value: AttrValue,
}

impl Predicate {
    pub fn new(op: CmpOp, value: AttrValue) -> Predicate {
        Predicate { op, value }
    }

    /// Whether `actual` satisfies this predicate. Ordering comparisons need
    /// both sides numeric; equality falls back to string/bool comparison.
    pub fn matches(&self, actual: &AttrValue) -> bool {
        match self.op {
            CmpOp::Eq | CmpOp::Ne => {
                let equal = match (actual.as_f64(), self.value.as_f64()) {
                    (Some(a), Some(b)) => a == b,
                    _ => actual == &self.value,
                };
                (self.op == CmpOp::Eq) == equal
            }
            _ => {
                let (Some(a), Some(b)) = (actual.as_f64(), self.value.as_f64()) else {
                    return false;
                };
                match self.op {
                    CmpOp::Ge => a >= b,
                    CmpOp::Gt => a > b,
                    CmpOp::Le => a <= b,
                    CmpOp::Lt => a < b,
                    _ => unreachable!(),
                }
            }
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.op.as_str(), self.value)
    }
}

/// The two predicates defining a variant split, e.g. `ge:50,lt:50`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitRule {
    pub first: Predicate,
    pub second: Predicate,
}

impl FromStr for SplitRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<SplitRule> {
        let bad = || Error::BadSplitRule(s.to_string());
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let parse_one = |part: &str| -> Result<Predicate> {
            let (op, value) = part.split_once(':').ok_or_else(bad)?;
            let op = match op {
                "eq" => CmpOp::Eq,
                "ne" => CmpOp::Ne,
                "ge" => CmpOp::Ge,
                "gt" => CmpOp::Gt,
                "le" => CmpOp::Le,
                "lt" => CmpOp::Lt,
                _ => return Err(bad()),
            };
            Ok(Predicate::new(op, AttrValue::parse_lossy(value)))
        };
        Ok(SplitRule {
            first: parse_one(a)?,
            second: parse_one(b)?,
        })
    }
}

/// A log partitioned into exactly two variants.
#[derive(Debug, Clone)]
pub struct VariantSplit {
    pub variant1: EventLog,
    pub variant2: EventLog,
    pub predicate_description: String,
    /// Sorted union of both variant alphabets.
    pub universal_alphabet: Vec<String>,
    /// Longest trace length across both variants.
    pub max_trace_len: usize,
    /// Input traces matching neither predicate (includes traces missing the
    /// attribute entirely).
    pub dropped: usize,
}

/// Partition `log` on `attribute` by two mutually exclusive predicates.
pub fn split_variants(log: EventLog, attribute: &str, rule: &SplitRule) -> Result<VariantSplit> {
    let mut attribute_seen = false;
    let mut traces1 = Vec::new();
    let mut traces2 = Vec::new();
    let mut dropped = 0usize;

    for trace in log.traces {
        let Some(value) = trace.attribute(attribute) else {
            dropped += 1;
            continue;
        };
        attribute_seen = true;
        match (rule.first.matches(value), rule.second.matches(value)) {
            (true, true) => {
                return Err(Error::OverlappingPredicates {
                    case_id: trace.case_id,
                })
            }
            (true, false) => traces1.push(trace),
            (false, true) => traces2.push(trace),
            (false, false) => dropped += 1,
        }
    }

    if !attribute_seen {
        return Err(Error::AttributeAbsent(attribute.to_string()));
    }
    if traces1.is_empty() {
        return Err(Error::DegenerateSplit(format!(
            "no trace satisfies {}:{}",
            attribute, rule.first
        )));
    }
    if traces2.is_empty() {
        return Err(Error::DegenerateSplit(format!(
            "no trace satisfies {}:{}",
            attribute, rule.second
        )));
    }

    let variant1 = EventLog::from_traces(traces1)?;
    let variant2 = EventLog::from_traces(traces2)?;
    let mut universal_alphabet: Vec<String> = variant1
        .alphabet
        .iter()
        .chain(variant2.alphabet.iter())
        .cloned()
        .collect();
    universal_alphabet.sort_unstable();
    universal_alphabet.dedup();
    let max_trace_len = variant1.max_trace_len().max(variant2.max_trace_len());

    Ok(VariantSplit {
        predicate_description: format!("{attribute} {} vs {}", rule.first, rule.second),
        variant1,
        variant2,
        universal_alphabet,
        max_trace_len,
        dropped,
    })
}

/// Parse a timestamp: RFC 3339 first, then common offset-less forms (read as
/// UTC), then an explicit format when given.
pub(crate) fn parse_timestamp(raw: &str, format: Option<&str>) -> Option<DateTime<Utc>> {
    if let Some(fmt) = format {
        if let Ok(dt) = DateTime::parse_from_str(raw, fmt) {
            return Some(dt.with_timezone(&Utc));
        }
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(naive.and_utc());
        }
        return None;
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(naive.and_utc());
        }
    }
    None
}

fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Write the internal canonical CSV form: one row per event, attributes as
/// sorted-key JSON objects so types survive the round trip.
pub fn write_canonical_csv<W: Write>(log: &EventLog, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["case_id", "activity", "timestamp", "event_attrs", "case_attrs"])?;
    for trace in &log.traces {
        let case_attrs = serde_json::to_string(&trace.case_attributes).expect("serializable");
        for (i, event) in trace.events.iter().enumerate() {
            let event_attrs = serde_json::to_string(&event.attributes).expect("serializable");
            w.write_record([
                trace.case_id.as_str(),
                event.activity.as_str(),
                &format_timestamp(&event.timestamp),
                &event_attrs,
                if i == 0 { &case_attrs } else { "{}" },
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn attrs_from_json(raw: &str, row: usize) -> Result<BTreeMap<String, AttrValue>> {
    serde_json::from_str(raw).map_err(|e| Error::BadTimestamp {
        row,
        value: format!("bad attribute JSON: {e}"),
    })
}

/// Read the canonical CSV form back into an [`EventLog`].
pub fn read_canonical_csv<R: Read>(reader: R) -> Result<EventLog> {
    let mut r = csv::Reader::from_reader(reader);
    let mut order: Vec<String> = Vec::new();
    let mut by_case: BTreeMap<String, Trace> = BTreeMap::new();
    for (idx, record) in r.records().enumerate() {
        let record = record?;
        let row = idx + 2;
        let case_id = record.get(0).unwrap_or("").to_string();
        let activity = record.get(1).unwrap_or("").to_string();
        let raw_ts = record.get(2).unwrap_or("");
        let timestamp = parse_timestamp(raw_ts, None).ok_or_else(|| Error::BadTimestamp {
            row,
            value: raw_ts.to_string(),
        })?;
        let event_attrs = attrs_from_json(record.get(3).unwrap_or("{}"), row)?;
        let case_attrs = attrs_from_json(record.get(4).unwrap_or("{}"), row)?;
        let trace = by_case.entry(case_id.clone()).or_insert_with(|| {
            order.push(case_id.clone());
            Trace {
                case_id: case_id.clone(),
                events: Vec::new(),
                case_attributes: BTreeMap::new(),
            }
        });
        trace.case_attributes.extend(case_attrs);
        trace.events.push(Event {
            activity,
            case_id,
            timestamp,
            attributes: event_attrs,
        });
    }
    let traces = order
        .into_iter()
        .map(|id| by_case.remove(&id).expect("case recorded"))
        .collect();
    EventLog::from_traces(traces)
}
