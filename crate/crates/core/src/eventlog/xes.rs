//! XES (IEEE 1849-2016 XML) ingestion.
//!
//! Reads the `log > trace > event` hierarchy with typed attribute elements
//! (`string`, `date`, `int`, `float`, `boolean`, `id`). The reader accepts a
//! superset of strict XES: unknown elements (`global`, `extension`,
//! `classifier`, nested attribute values) are skipped, and only
//! `concept:name` / `time:timestamp` are mandatory per event.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::{DateTime, Utc};
use quick_xml::events::{BytesStart, Event as XmlEvent};
use quick_xml::Reader;

use super::{parse_timestamp, AttrValue, Event, EventLog, Trace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ctx {
    Log,
    Trace,
    Event,
    Other,
}

#[derive(Default)]
struct PendingEvent {
    activity: Option<String>,
    timestamp_raw: Option<String>,
    attributes: BTreeMap<String, AttrValue>,
}

struct ParsedEvent {
    activity: String,
    timestamp: DateTime<Utc>,
    attributes: BTreeMap<String, AttrValue>,
}

struct XesParser {
    stack: Vec<Ctx>,
    traces: Vec<Trace>,
    case_attrs: BTreeMap<String, AttrValue>,
    case_name: Option<String>,
    pending_events: Vec<ParsedEvent>,
    current_event: PendingEvent,
    empty_traces: usize,
}

fn line_col(bytes: &[u8], pos: usize) -> (usize, usize) {
    let pos = pos.min(bytes.len());
    let line = 1 + bytes[..pos].iter().filter(|&&b| b == b'\n').count();
    let col = pos - bytes[..pos].iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

fn xml_error(bytes: &[u8], pos: u64, err: impl std::fmt::Display) -> Error {
    let (line, column) = line_col(bytes, pos as usize);
    Error::XmlParse {
        line,
        column,
        message: err.to_string(),
    }
}

fn key_value(start: &BytesStart<'_>) -> (Option<String>, Option<String>) {
    let mut key = None;
    let mut value = None;
    for attr in start.attributes().flatten() {
        match attr.key.as_ref() {
            b"key" => key = attr.unescape_value().ok().map(|v| v.into_owned()),
            b"value" => value = attr.unescape_value().ok().map(|v| v.into_owned()),
            _ => {}
        }
    }
    (key, value)
}

fn typed_value(elem: &[u8], raw: String) -> AttrValue {
    match elem {
        b"int" => raw
            .parse::<i64>()
            .map(AttrValue::Int)
            .unwrap_or(AttrValue::String(raw)),
        b"float" => raw
            .parse::<f64>()
            .map(AttrValue::Float)
            .unwrap_or(AttrValue::String(raw)),
        b"boolean" => match raw.as_str() {
            "true" => AttrValue::Bool(true),
            "false" => AttrValue::Bool(false),
            _ => AttrValue::String(raw),
        },
        _ => AttrValue::String(raw),
    }
}

const ATTR_ELEMENTS: [&[u8]; 6] = [b"string", b"date", b"int", b"float", b"boolean", b"id"];

impl XesParser {
    fn new() -> Self {
        XesParser {
            stack: Vec::new(),
            traces: Vec::new(),
            case_attrs: BTreeMap::new(),
            case_name: None,
            pending_events: Vec::new(),
            current_event: PendingEvent::default(),
            empty_traces: 0,
        }
    }

    /// Attribute elements are only interpreted directly under `<trace>` or
    /// `<event>`; anywhere else (log level, nested values) they are ignored.
    fn record_attr(&mut self, elem: &[u8], start: &BytesStart<'_>) {
        let ctx = self.stack.last().copied();
        let (Some(key), Some(value)) = key_value(start) else {
            return;
        };
        match ctx {
            Some(Ctx::Event) => {
                if key == "concept:name" {
                    self.current_event.activity = Some(value);
                } else if key == "time:timestamp" {
                    self.current_event.timestamp_raw = Some(value);
                } else {
                    self.current_event
                        .attributes
                        .insert(key, typed_value(elem, value));
                }
            }
            Some(Ctx::Trace) => {
                if key == "concept:name" {
                    self.case_name = Some(value);
                } else {
                    self.case_attrs.insert(key, typed_value(elem, value));
                }
            }
            _ => {}
        }
    }

    fn finish_event(&mut self) -> Result<()> {
        let trace_index = self.traces.len();
        let pe = std::mem::take(&mut self.current_event);
        let activity = pe.activity.filter(|a| !a.is_empty()).ok_or_else(|| {
            Error::MissingEventKey {
                trace_index,
                key: "concept:name".to_string(),
            }
        })?;
        let raw_ts = pe.timestamp_raw.ok_or_else(|| Error::MissingEventKey {
            trace_index,
            key: "time:timestamp".to_string(),
        })?;
        let timestamp = parse_timestamp(&raw_ts, None).ok_or(Error::BadTimestamp {
            row: trace_index,
            value: raw_ts,
        })?;
        self.pending_events.push(ParsedEvent {
            activity,
            timestamp,
            attributes: pe.attributes,
        });
        Ok(())
    }

    fn finish_trace(&mut self) {
        let index = self.traces.len();
        let case_id = self
            .case_name
            .take()
            .unwrap_or_else(|| format!("trace-{index}"));
        let events: Vec<Event> = std::mem::take(&mut self.pending_events)
            .into_iter()
            .map(|pe| Event {
                activity: pe.activity,
                case_id: case_id.clone(),
                timestamp: pe.timestamp,
                attributes: pe.attributes,
            })
            .collect();
        let case_attributes = std::mem::take(&mut self.case_attrs);
        if events.is_empty() {
            self.empty_traces += 1;
            return;
        }
        self.traces.push(Trace {
            case_id,
            events,
            case_attributes,
        });
    }
}

/// Parse an XES document into an [`EventLog`].
pub fn parse_xes<R: Read>(mut reader: R) -> Result<EventLog> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;

    let mut xml = Reader::from_reader(bytes.as_slice());
    xml.config_mut().trim_text(true);
    let mut buf = Vec::new();
    let mut parser = XesParser::new();

    loop {
        let ev = xml
            .read_event_into(&mut buf)
            .map_err(|e| xml_error(&bytes, xml.error_position(), e))?;
        match ev {
            XmlEvent::Start(start) => {
                let name = start.name();
                let local = name.as_ref();
                match local {
                    b"log" => parser.stack.push(Ctx::Log),
                    b"trace" => parser.stack.push(Ctx::Trace),
                    b"event" => parser.stack.push(Ctx::Event),
                    _ => {
                        if ATTR_ELEMENTS.contains(&local) {
                            parser.record_attr(local, &start);
                        }
                        parser.stack.push(Ctx::Other);
                    }
                }
            }
            XmlEvent::Empty(start) => {
                let name = start.name();
                let local = name.as_ref();
                if ATTR_ELEMENTS.contains(&local) {
                    parser.record_attr(local, &start);
                }
            }
            XmlEvent::End(_) => match parser.stack.pop() {
                Some(Ctx::Event) => parser.finish_event()?,
                Some(Ctx::Trace) => parser.finish_trace(),
                _ => {}
            },
            XmlEvent::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if parser.empty_traces > 0 {
        log::warn!("dropped {} empty trace(s) from XES input", parser.empty_traces);
    }
    EventLog::from_traces(parser.traces)
}
