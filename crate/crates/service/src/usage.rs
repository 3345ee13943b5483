//! The append-only usage log and the two aggregations mined from it.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Check,
    Solve,
    Diagnose,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Check => "check",
            Action::Solve => "solve",
            Action::Diagnose => "diagnose",
        }
    }
}

/// One accepted check, solve or diagnose request.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UsageEvent {
    /// UTC, millisecond precision.
    #[serde(with = "millis")]
    pub timestamp: DateTime<Utc>,
    pub session_id: String,
    pub action: Action,
    /// The problem text exactly as sent to the solver.
    pub full_text: String,
    pub outcome_kind: String,
    pub duration_ms: u64,
}

mod millis {
    use chrono::{DateTime, SecondsFormat, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::Millis, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let s = String::deserialize(d)?;
        DateTime::parse_from_rfc3339(&s).map(|t| t.with_timezone(&Utc)).map_err(serde::de::Error::custom)
    }
}

/// Serialised appender: one JSON object per line.
pub struct UsageLog {
    file: Option<Mutex<File>>,
}

impl UsageLog {
    /// A log that drops everything.
    pub fn disabled() -> Self {
        UsageLog { file: None }
    }

    pub fn open(path: &Path) -> io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(UsageLog { file: Some(Mutex::new(file)) })
    }

    pub fn append(&self, event: &UsageEvent) -> io::Result<()> {
        let Some(file) = &self.file else { return Ok(()) };
        let mut line = serde_json::to_string(event)?;
        line.push('\n');
        let mut f = file.lock().unwrap_or_else(|e| e.into_inner());
        f.write_all(line.as_bytes())?;
        f.flush()
    }
}

/// Reads a log. A malformed line is an error naming its line number.
pub fn read_events(path: &Path) -> Result<Vec<UsageEvent>, String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| format!("{}: {e}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| format!("{} line {}: {e}", path.display(), n + 1))?);
    }
    Ok(out)
}

/// Requests per UTC day, in date order.
pub fn by_day(events: &[UsageEvent]) -> Vec<(NaiveDate, usize)> {
    let mut days = BTreeMap::new();
    for e in events {
        *days.entry(e.timestamp.date_naive()).or_insert(0) += 1;
    }
    days.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub timestamp: DateTime<Utc>,
    /// Seconds since the session's previous request; none for its first.
    pub interval_secs: Option<f64>,
    pub action: Action,
    pub prev_action: Option<Action>,
}

/// Inter-arrival times of one session's requests, in time order.
pub fn intervals(events: &[UsageEvent], session: &str) -> Vec<Interval> {
    let mut mine: Vec<&UsageEvent> = events.iter().filter(|e| e.session_id == session).collect();
    mine.sort_by_key(|e| e.timestamp);
    let mut out = Vec::with_capacity(mine.len());
    let mut prev: Option<&UsageEvent> = None;
    for e in mine {
        out.push(Interval {
            timestamp: e.timestamp,
            interval_secs: prev.map(|p| (e.timestamp - p.timestamp).num_milliseconds() as f64 / 1000.0),
            action: e.action,
            prev_action: prev.map(|p| p.action),
        });
        prev = Some(e);
    }
    out
}

pub const BY_DAY_HEADER: &str = "date,count";
pub const INTERVALS_HEADER: &str = "timestamp,interval_secs,action,prev_action";

pub fn by_day_csv(events: &[UsageEvent]) -> String {
    let mut out = format!("{BY_DAY_HEADER}\n");
    for (d, n) in by_day(events) {
        out.push_str(&format!("{d},{n}\n"));
    }
    out
}

pub fn intervals_csv(events: &[UsageEvent], session: &str) -> String {
    let mut out = format!("{INTERVALS_HEADER}\n");
    for i in intervals(events, session) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i.timestamp.to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            i.interval_secs.map(|s| format!("{s:.3}")).unwrap_or_default(),
            i.action.as_str(),
            i.prev_action.map(Action::as_str).unwrap_or_default(),
        ));
    }
    out
}
