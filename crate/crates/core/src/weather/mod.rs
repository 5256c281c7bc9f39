//! Weather ingestion: station CSV files and daily-weather providers.

mod csv_io;
mod provider;

pub use csv_io::{fwi_report_csv, read_weather_csv, weather_csv, StationObservation};
pub use provider::{
    fixture_name, parse_payload, DateRange, FixtureProvider, LiveProvider, ProviderError, RetryPolicy, Transport,
    TransportError, UreqTransport, WeatherProvider, WeatherSeries, TOKEN_ENV,
};

#[derive(Debug, thiserror::Error)]
pub enum WeatherError {
    #[error("weather csv line {line}: {message}")]
    Csv { line: usize, message: String },
}
