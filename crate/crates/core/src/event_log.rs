//! Event logs: parsing from delimited text, serialization back to it, and the
//! ordering relations (directly-follows and follows) used by discovery.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while reading or validating an event log.
#[derive(Debug, Error)]
pub enum LogError {
    #[error("missing column `{0}` in header")]
    MissingColumn(String),
    #[error("line {line}: cannot parse timestamp `{value}`")]
    Timestamp { line: u64, value: String },
    #[error("line {line}: invalid activity name `{value}`")]
    Activity { line: u64, value: String },
    #[error("event log is empty")]
    EmptyLog,
    #[error("invalid activity name `{0}`")]
    InvalidActivity(String),
    #[error("trace `{0}` has no events")]
    EmptyTrace(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// An event name. Compared by exact string value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Activity(String);

impl Activity {
    /// Builds an activity, trimming surrounding whitespace. Empty names and
    /// names containing line breaks are rejected.
    pub fn new(name: impl AsRef<str>) -> Result<Self, LogError> {
        let trimmed = name.as_ref().trim();
        if trimmed.is_empty() || trimmed.contains(['\n', '\r']) {
            return Err(LogError::InvalidActivity(name.as_ref().to_string()));
        }
        Ok(Activity(trimmed.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Activity {
    type Error = LogError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Activity::new(value)
    }
}

impl From<Activity> for String {
    fn from(a: Activity) -> String {
        a.0
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Columns carried along with an event but never used by the algorithms.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct EventPayload {
    /// Raw timestamp text as read from the input, if any.
    pub timestamp: Option<String>,
    pub attributes: BTreeMap<String, String>,
}

/// The ordered events of one case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    case_id: String,
    events: Vec<Activity>,
    payload: Vec<EventPayload>,
}

impl Trace {
    pub fn new(case_id: impl Into<String>, events: Vec<Activity>) -> Result<Self, LogError> {
        let case_id = case_id.into();
        if events.is_empty() {
            return Err(LogError::EmptyTrace(case_id));
        }
        let payload = vec![EventPayload::default(); events.len()];
        Ok(Trace { case_id, events, payload })
    }

    /// Shorthand for tests and generators: every name must be a valid activity.
    pub fn from_names<S: AsRef<str>>(case_id: impl Into<String>, names: &[S]) -> Result<Self, LogError> {
        let events = names.iter().map(Activity::new).collect::<Result<Vec<_>, _>>()?;
        Trace::new(case_id, events)
    }

    fn with_payload(case_id: String, events: Vec<(Activity, EventPayload)>) -> Self {
        let (events, payload) = events.into_iter().unzip();
        Trace { case_id, events, payload }
    }

    pub fn case_id(&self) -> &str {
        &self.case_id
    }

    pub fn events(&self) -> &[Activity] {
        &self.events
    }

    pub fn payload(&self) -> &[EventPayload] {
        &self.payload
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// True when no activity occurs twice.
    pub fn is_acyclic(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.events.iter().all(|a| seen.insert(a))
    }

    /// Same case and payload, new activity names. Lengths must match.
    pub fn relabelled(&self, events: Vec<Activity>) -> Trace {
        assert_eq!(events.len(), self.events.len());
        Trace { case_id: self.case_id.clone(), events, payload: self.payload.clone() }
    }
}

/// A multiset of traces. Duplicate event sequences are kept as separate
/// traces with their own case ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLog {
    traces: Vec<Trace>,
}

impl EventLog {
    pub fn new(traces: Vec<Trace>) -> Self {
        EventLog { traces }
    }

    /// Builds a log with generated case ids `c0`, `c1`, ...
    pub fn from_sequences<S: AsRef<str>>(seqs: &[&[S]]) -> Result<Self, LogError> {
        let traces = seqs
            .iter()
            .enumerate()
            .map(|(i, s)| Trace::from_names(format!("c{i}"), s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EventLog { traces })
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn push(&mut self, trace: Trace) {
        self.traces.push(trace);
    }

    /// Multiset sum.
    pub fn sum<'a>(logs: impl IntoIterator<Item = &'a EventLog>) -> EventLog {
        EventLog { traces: logs.into_iter().flat_map(|l| l.traces.iter().cloned()).collect() }
    }

    /// All activities in first-occurrence order.
    pub fn activities(&self) -> Vec<Activity> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for a in self.traces.iter().flat_map(|t| t.events.iter()) {
            if seen.insert(a) {
                out.push(a.clone());
            }
        }
        out
    }

    /// Case ids of traces that repeat an activity.
    pub fn cyclic_cases(&self) -> Vec<String> {
        self.traces.iter().filter(|t| !t.is_acyclic()).map(|t| t.case_id.clone()).collect()
    }

    /// Multiset equality over (case id, event sequence), ignoring payload and order.
    pub fn same_multiset(&self, other: &EventLog) -> bool {
        let key = |l: &EventLog| {
            let mut v: Vec<_> = l.traces.iter().map(|t| (t.case_id.clone(), t.events.clone())).collect();
            v.sort();
            v
        };
        key(self) == key(other)
    }
}

/// True iff no trace repeats an activity.
pub fn is_acyclic_log(log: &EventLog) -> bool {
    log.traces.iter().all(Trace::is_acyclic)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationKind {
    DirectlyFollows,
    Follows,
}

/// A set of ordered activity pairs drawn from one log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderRelation {
    pub kind: RelationKind,
    pub pairs: BTreeSet<(Activity, Activity)>,
}

impl OrderRelation {
    pub fn contains(&self, a: &str, b: &str) -> bool {
        self.pairs.iter().any(|(x, y)| x.as_str() == a && y.as_str() == b)
    }
}

/// Pairs `(a, b)` where `b` immediately follows `a` in some trace.
pub fn directly_follows(log: &EventLog) -> OrderRelation {
    let pairs = log
        .traces
        .iter()
        .flat_map(|t| t.events.windows(2).map(|w| (w[0].clone(), w[1].clone())))
        .collect();
    OrderRelation { kind: RelationKind::DirectlyFollows, pairs }
}

/// Pairs `(a, b)` where `a` occurs at an earlier position than `b` in some trace.
pub fn follows(log: &EventLog) -> OrderRelation {
    let mut pairs = BTreeSet::new();
    for t in &log.traces {
        for (i, a) in t.events.iter().enumerate() {
            for b in &t.events[i + 1..] {
                pairs.insert((a.clone(), b.clone()));
            }
        }
    }
    OrderRelation { kind: RelationKind::Follows, pairs }
}

/// Column names and formats used when reading a log.
#[derive(Debug, Clone)]
pub struct LogConfig {
    pub delimiter: u8,
    pub case_column: String,
    pub timestamp_column: String,
    pub activity_column: String,
    /// A chrono format string. When `None` a fixed list of common formats
    /// (ISO dates and datetimes, `dd.mm.yyyy`, integers) is tried.
    pub timestamp_format: Option<String>,
}

impl Default for LogConfig {
    fn default() -> Self {
        LogConfig {
            delimiter: b',',
            case_column: "case_id".into(),
            timestamp_column: "timestamp".into(),
            activity_column: "activity".into(),
            timestamp_format: None,
        }
    }
}

const AUTO_DATETIME_FORMATS: &[&str] = &[
    "%Y-%m-%d %H:%M:%S%.f",
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%d %H:%M",
    "%d.%m.%Y %H:%M:%S",
    "%d.%m.%Y %H:%M",
    "%d/%m/%Y %H:%M:%S",
];
const AUTO_DATE_FORMATS: &[&str] = &["%Y-%m-%d", "%d.%m.%Y", "%d/%m/%Y"];

/// Converts a timestamp to a sortable key (microseconds, or the raw integer).
fn timestamp_key(raw: &str, format: Option<&str>) -> Option<i64> {
    let raw = raw.trim();
    let from_dt = |dt: NaiveDateTime| dt.and_utc().timestamp_micros();
    let from_date = |d: NaiveDate| d.and_hms_opt(0, 0, 0).map(from_dt);
    if let Some(fmt) = format {
        return NaiveDateTime::parse_from_str(raw, fmt)
            .map(from_dt)
            .ok()
            .or_else(|| NaiveDate::parse_from_str(raw, fmt).ok().and_then(from_date));
    }
    if let Ok(n) = raw.parse::<i64>() {
        return Some(n);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.timestamp_micros());
    }
    AUTO_DATETIME_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(raw, f).ok().map(from_dt))
        .or_else(|| AUTO_DATE_FORMATS.iter().find_map(|f| NaiveDate::parse_from_str(raw, f).ok().and_then(from_date)))
}

/// Reads a delimited log. Rows are grouped by case id (cases ordered by first
/// appearance) and sorted by timestamp within a case; equal timestamps keep
/// input row order.
pub fn parse_log<R: Read>(reader: R, config: &LogConfig) -> Result<EventLog, LogError> {
    let mut rdr = csv::ReaderBuilder::new().delimiter(config.delimiter).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| LogError::MissingColumn(name.to_string()))
    };
    let case_col = col(&config.case_column)?;
    let ts_col = col(&config.timestamp_column)?;
    let act_col = col(&config.activity_column)?;

    let mut order: Vec<String> = Vec::new();
    let mut cases: HashMap<String, Vec<(i64, usize, Activity, EventPayload)>> = HashMap::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(row as u64 + 2, |p| p.line());
        let case = record.get(case_col).unwrap_or("").to_string();
        let raw_ts = record.get(ts_col).unwrap_or("");
        let key = timestamp_key(raw_ts, config.timestamp_format.as_deref())
            .ok_or_else(|| LogError::Timestamp { line, value: raw_ts.to_string() })?;
        let raw_act = record.get(act_col).unwrap_or("");
        let activity =
            Activity::new(raw_act).map_err(|_| LogError::Activity { line, value: raw_act.to_string() })?;
        let attributes = headers
            .iter()
            .zip(record.iter())
            .enumerate()
            .filter(|(i, (_, v))| ![case_col, ts_col, act_col].contains(i) && !v.is_empty())
            .map(|(_, (h, v))| (h.to_string(), v.to_string()))
            .collect();
        let payload = EventPayload { timestamp: Some(raw_ts.to_string()), attributes };
        let events = cases.entry(case.clone()).or_insert_with(|| {
            order.push(case);
            Vec::new()
        });
        events.push((key, row, activity, payload));
    }
    if order.is_empty() {
        return Err(LogError::EmptyLog);
    }
    let traces = order
        .into_iter()
        .map(|case| {
            let mut events = cases.remove(&case).unwrap_or_default();
            events.sort_by_key(|(k, row, _, _)| (*k, *row));
            Trace::with_payload(case, events.into_iter().map(|(_, _, a, p)| (a, p)).collect())
        })
        .collect();
    Ok(EventLog { traces })
}

/// Writes a log in the layout `parse_log` reads with `config`. Events
/// without a recorded timestamp get their position within the trace.
pub fn write_log<W: Write>(log: &EventLog, writer: W, config: &LogConfig) -> Result<(), LogError> {
    let extra: BTreeSet<&str> = log
        .traces
        .iter()
        .flat_map(|t| t.payload.iter().flat_map(|p| p.attributes.keys().map(String::as_str)))
        .collect();
    let mut w = csv::WriterBuilder::new().delimiter(config.delimiter).from_writer(writer);
    let mut header = vec![config.case_column.as_str(), config.timestamp_column.as_str(), config.activity_column.as_str()];
    header.extend(extra.iter().copied());
    w.write_record(&header)?;
    for t in &log.traces {
        for (i, (a, p)) in t.events.iter().zip(&t.payload).enumerate() {
            let ts = p.timestamp.clone().unwrap_or_else(|| i.to_string());
            let mut row = vec![t.case_id.clone(), ts, a.to_string()];
            row.extend(extra.iter().map(|k| p.attributes.get(*k).cloned().unwrap_or_default()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}
