use chrono::NaiveDate;
use serde::Deserialize;

use super::WeatherError;
use crate::fwi::{FwiReport, WeatherObservation};

/// A weather CSV row: the observation plus the station position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationObservation {
    pub lat: f64,
    pub lon: f64,
    pub obs: WeatherObservation,
}

#[derive(Deserialize)]
struct Row {
    date: NaiveDate,
    lat: f64,
    lon: f64,
    temp_c: f64,
    rh_pct: f64,
    wind_kmh: f64,
    rain_mm: f64,
}

/// Parses `date,lat,lon,temp_c,rh_pct,wind_kmh,rain_mm`. Extra columns are
/// ignored; rows must be in strictly increasing date order.
pub fn read_weather_csv(text: &str) -> Result<Vec<StationObservation>, WeatherError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out: Vec<StationObservation> = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| WeatherError::Csv {
            line,
            message: e.to_string(),
        })?;
        let obs = WeatherObservation::new(row.date, row.temp_c, row.rh_pct, row.wind_kmh, row.rain_mm)
            .map_err(|e| WeatherError::Csv {
                line,
                message: e.to_string(),
            })?;
        if let Some(prev) = out.last() {
            if prev.obs.date >= obs.date {
                return Err(WeatherError::Csv {
                    line,
                    message: format!("date {} does not follow {}", obs.date, prev.obs.date),
                });
            }
        }
        out.push(StationObservation {
            lat: row.lat,
            lon: row.lon,
            obs,
        });
    }
    if out.is_empty() {
        return Err(WeatherError::Csv {
            line: 1,
            message: "no observations".into(),
        });
    }
    Ok(out)
}

/// `date,ffmc,dmc,dc,isi,bui,fwi` with one decimal.
pub fn fwi_report_csv(reports: &[FwiReport]) -> String {
    let mut out = String::from("date,ffmc,dmc,dc,isi,bui,fwi\n");
    for r in reports {
        out.push_str(&format!(
            "{},{:.1},{:.1},{:.1},{:.1},{:.1},{:.1}\n",
            r.date, r.state.ffmc, r.state.dmc, r.state.dc, r.isi, r.bui, r.fwi
        ));
    }
    out
}

/// `date,lat,lon,temp_c,rh_pct,wind_kmh,rain_mm`
pub fn weather_csv(rows: &[StationObservation]) -> String {
    let mut out = String::from("date,lat,lon,temp_c,rh_pct,wind_kmh,rain_mm\n");
    for r in rows {
        let o = &r.obs;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            o.date, r.lat, r.lon, o.temp_c, o.rh_pct, o.wind_kmh, o.rain_mm
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "date,lat,lon,temp_c,rh_pct,wind_kmh,rain_mm\n\
        2018-04-19,46.81,-71.21,17,42,25,0\n\
        2018-04-20,46.81,-71.21,20,21,25,2.4\n";

    #[test]
    fn parses_and_round_trips() {
        let rows = read_weather_csv(SAMPLE).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].obs.rain_mm, 2.4);
        assert_eq!(weather_csv(&rows), SAMPLE);
    }

    #[test]
    fn reports_line_numbers() {
        let bad = SAMPLE.replace("20,21,25,2.4", "20,121,25,2.4");
        match read_weather_csv(&bad) {
            Err(WeatherError::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let unordered = SAMPLE.replace("2018-04-20", "2018-04-18");
        assert!(read_weather_csv(&unordered).is_err());
        assert!(read_weather_csv("date,lat,lon,temp_c,rh_pct,wind_kmh,rain_mm\n").is_err());
    }
}
