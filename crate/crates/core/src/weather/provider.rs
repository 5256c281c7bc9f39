//! Daily weather from a remote service or from recorded payloads.
//!
//! Both sources speak the same JSON payload:
//!
//! ```json
//! {"lat": 46.81, "lon": -71.21,
//!  "daily": [{"date": "2018-04-19", "temp_c": 17.0, "rh_pct": 42.0,
//!             "wind_kmh": 25.0, "rain_mm": 0.0}]}
//! ```
//!
//! A live fetch can record the raw body into a fixture directory; replaying
//! it through [`FixtureProvider`] yields the same series.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::NaiveDate;
use serde::Deserialize;

use crate::fwi::WeatherObservation;

pub const TOKEN_ENV: &str = "PYRORISK_WEATHER_TOKEN";

#[derive(Debug, thiserror::Error)]
pub enum ProviderError {
    #[error("no fixture at {}", .0.display())]
    NotFound(PathBuf),
    #[error("malformed payload at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("network failure after {attempts} attempt(s): {message}")]
    Network {
        message: String,
        attempts: u32,
        retryable: bool,
        /// Suggested wait before the caller tries again.
        retry_after: Duration,
    },
    #[error("invalid request: {0}")]
    Request(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ProviderError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, ProviderError::Network { retryable: true, .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateRange {
    pub from: NaiveDate,
    pub to: NaiveDate,
}

impl DateRange {
    pub fn new(from: NaiveDate, to: NaiveDate) -> Result<Self, ProviderError> {
        if from > to {
            return Err(ProviderError::Request(format!("range start {from} is after end {to}")));
        }
        Ok(Self { from, to })
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        let to = self.to;
        self.from.iter_days().take_while(move |d| *d <= to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    /// One per available day, in date order.
    pub observations: Vec<WeatherObservation>,
    /// Days in the requested range with no observation.
    pub gaps: Vec<NaiveDate>,
}

pub trait WeatherProvider {
    fn id(&self) -> &str;
    fn fetch(&self, lat: f64, lon: f64, range: DateRange) -> Result<WeatherSeries, ProviderError>;
}

#[derive(Deserialize)]
struct Payload {
    daily: Vec<DailyRecord>,
}

#[derive(Deserialize)]
struct DailyRecord {
    date: NaiveDate,
    temp_c: f64,
    rh_pct: f64,
    wind_kmh: f64,
    rain_mm: f64,
}

fn byte_offset(text: &[u8], line: usize, column: usize) -> usize {
    let start: usize = text
        .split_inclusive(|&b| b == b'\n')
        .take(line.saturating_sub(1))
        .map(<[u8]>::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// Decodes a payload and restricts it to `range`.
pub fn parse_payload(body: &[u8], range: DateRange) -> Result<WeatherSeries, ProviderError> {
    let payload: Payload = serde_json::from_slice(body).map_err(|e| ProviderError::Parse {
        offset: byte_offset(body, e.line(), e.column()),
        message: e.to_string(),
    })?;
    let mut by_date = BTreeMap::new();
    for rec in payload.daily {
        if rec.date < range.from || rec.date > range.to {
            continue;
        }
        let obs = WeatherObservation::new(rec.date, rec.temp_c, rec.rh_pct, rec.wind_kmh, rec.rain_mm).map_err(|e| {
            ProviderError::Parse {
                offset: 0,
                message: format!("{}: {e}", rec.date),
            }
        })?;
        if by_date.insert(rec.date, obs).is_some() {
            return Err(ProviderError::Parse {
                offset: 0,
                message: format!("duplicate record for {}", rec.date),
            });
        }
    }
    let gaps = range.days().filter(|d| !by_date.contains_key(d)).collect();
    Ok(WeatherSeries {
        observations: by_date.into_values().collect(),
        gaps,
    })
}

/// File name a payload for this position is stored under.
pub fn fixture_name(lat: f64, lon: f64) -> String {
    format!("weather_{lat:.4}_{lon:.4}.json")
}

/// Replays recorded payloads from a directory.
#[derive(Debug, Clone)]
pub struct FixtureProvider {
    pub dir: PathBuf,
}

impl FixtureProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }
}

impl WeatherProvider for FixtureProvider {
    fn id(&self) -> &str {
        "fixture"
    }

    fn fetch(&self, lat: f64, lon: f64, range: DateRange) -> Result<WeatherSeries, ProviderError> {
        let path = self.dir.join(fixture_name(lat, lon));
        let body = std::fs::read(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => ProviderError::NotFound(path.clone()),
            _ => ProviderError::Io {
                path: path.clone(),
                source: e,
            },
        })?;
        parse_payload(&body, range)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportError {
    pub status: Option<u16>,
    pub message: String,
}

impl TransportError {
    /// Connection failures, throttling and server errors are worth retrying.
    pub fn retryable(&self) -> bool {
        match self.status {
            None => true,
            Some(s) => s == 429 || s >= 500,
        }
    }
}

/// Blocking HTTP GET returning the response body.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str, bearer: Option<&str>) -> Result<Vec<u8>, TransportError>;
}

#[derive(Debug, Clone, Default)]
pub struct UreqTransport;

impl Transport for UreqTransport {
    fn get(&self, url: &str, bearer: Option<&str>) -> Result<Vec<u8>, TransportError> {
        let mut req = ureq::get(url);
        if let Some(token) = bearer {
            req = req.header("Authorization", &format!("Bearer {token}"));
        }
        let err = |e: ureq::Error| TransportError {
            status: match e {
                ureq::Error::StatusCode(s) => Some(s),
                _ => None,
            },
            message: e.to_string(),
        };
        req.call().map_err(err)?.into_body().read_to_vec().map_err(err)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_delay: Duration::from_millis(500),
        }
    }
}

impl RetryPolicy {
    /// Delay before attempt `n + 1`, doubling each time.
    pub fn delay(&self, attempt: u32) -> Duration {
        self.base_delay * 2u32.saturating_pow(attempt.saturating_sub(1))
    }
}

/// Queries `<endpoint>?lat=..&lon=..&start=YYYY-MM-DD&end=YYYY-MM-DD`.
pub struct LiveProvider {
    pub endpoint: String,
    pub token: Option<String>,
    pub retry: RetryPolicy,
    /// When set, each raw body is also written here under [`fixture_name`].
    pub record_dir: Option<PathBuf>,
    transport: Box<dyn Transport>,
}

impl LiveProvider {
    pub fn new(endpoint: impl Into<String>, transport: Box<dyn Transport>) -> Self {
        Self {
            endpoint: endpoint.into(),
            token: std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty()),
            retry: RetryPolicy::default(),
            record_dir: None,
            transport,
        }
    }

    pub fn url(&self, lat: f64, lon: f64, range: DateRange) -> String {
        format!(
            "{}?lat={lat}&lon={lon}&start={}&end={}",
            self.endpoint.trim_end_matches('?'),
            range.from,
            range.to
        )
    }

    fn record(&self, dir: &Path, lat: f64, lon: f64, body: &[u8]) -> Result<(), ProviderError> {
        let path = dir.join(fixture_name(lat, lon));
        std::fs::write(&path, body).map_err(|e| ProviderError::Io { path, source: e })
    }
}

impl WeatherProvider for LiveProvider {
    fn id(&self) -> &str {
        "live"
    }

    fn fetch(&self, lat: f64, lon: f64, range: DateRange) -> Result<WeatherSeries, ProviderError> {
        let url = self.url(lat, lon, range);
        let attempts = self.retry.max_attempts.max(1);
        let mut attempt = 0;
        let body = loop {
            attempt += 1;
            match self.transport.get(&url, self.token.as_deref()) {
                Ok(body) => break body,
                Err(e) if e.retryable() && attempt < attempts => std::thread::sleep(self.retry.delay(attempt)),
                Err(e) => {
                    return Err(ProviderError::Network {
                        retryable: e.retryable(),
                        retry_after: self.retry.delay(attempt),
                        attempts: attempt,
                        message: e.message,
                    })
                }
            }
        };
        if let Some(dir) = &self.record_dir {
            self.record(dir, lat, lon, &body)?;
        }
        parse_payload(&body, range)
    }
}
