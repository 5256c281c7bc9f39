//! Canadian Forest Fire Weather Index (FWI) system.
//!
//! Daily noon weather drives three fuel moisture codes that carry over from
//! one day to the next:
//!
//! * FFMC, the Fine Fuel Moisture Code (surface litter, fast lag),
//! * DMC, the Duff Moisture Code (loosely compacted organic layer),
//! * DC, the Drought Code (deep compact organic layer).
//!
//! Two intermediate indices follow from them: ISI (fine fuel moisture plus
//! wind) and BUI (DMC plus DC). They combine into the FWI.
//!
//! The equations are the Van Wagner (1987) set, the normative definition of
//! the system. Constants are written out exactly as published so each line
//! can be checked against the equation it implements:
//!
//! | quantity | relation |
//! |----------|----------|
//! | FFMC → moisture | `m = 147.2 (101 − F) / (59.5 + F)` |
//! | rain effect | `rf = r − 0.5`, `m += 42.5 rf e^(−100/(251−m)) (1 − e^(−6.93/rf))`, plus `0.0015 (m − 150)² √rf` when `m > 150`; cap 250 |
//! | drying EMC | `Ed = 0.942 H^0.679 + 11 e^((H−100)/10) + 0.18 (21.1 − T)(1 − e^(−0.115 H))` |
//! | wetting EMC | `Ew = 0.618 H^0.753 + 10 e^((H−100)/10) + 0.18 (21.1 − T)(1 − e^(−0.115 H))` |
//! | log drying rate | `k = (0.424 (1 − (H/100)^1.7) + 0.0694 √W (1 − (H/100)^8)) · 0.581 e^(0.0365 T)` |
//! | log wetting rate | same with `(100 − H)/100` in place of `H/100` |
//! | moisture → FFMC | `F = 59.5 (250 − m) / (147.2 + m)` |
//! | DMC rain | `re = 0.92 r − 1.27`, `Mo = 20 + 280/e^(0.023 P)`, `Mr = Mo + 1000 re / (48.77 + b re)`, `P = 43.43 (5.6348 − ln(Mr − 20))` |
//! | DMC drying | `100 K = 1.894 (T + 1.1)(100 − H) Le · 10⁻⁴` |
//! | DC rain | `rd = 0.83 r − 1.27`, `Q = 800 e^(−D/400)`, `D = D − 400 ln(1 + 3.937 rd / Q)` |
//! | DC drying | `V = 0.36 (T + 2.8) + Lf`, `D += V / 2` |
//! | ISI | `0.208 · e^(0.05039 W) · 91.9 e^(−0.1386 m) (1 + m^5.31 / 4.93·10⁷)` |
//! | BUI | `0.8 P D / (P + 0.4 D)` if `P ≤ 0.4 D`, else `P − (1 − 0.8 D / (P + 0.4 D))(0.92 + (0.0114 P)^1.7)` |
//! | FWI | `B = 0.1 ISI fD`, `fD = 0.626 U^0.809 + 2` (U ≤ 80) or `1000 / (25 + 108.64 e^(−0.023 U))`; `S = e^(2.72 (0.434 ln B)^0.647)` if `B > 1` else `B` |
//!
//! Rain thresholds are 0.5 mm (FFMC), 1.5 mm (DMC) and 2.8 mm (DC).
//! Temperature floors are −1.1 °C (DMC) and −2.8 °C (DC).
//!
//! Inputs outside their physical domain are rejected rather than clamped.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Conventional start-up values for the moisture codes.
pub const DEFAULT_FFMC: f64 = 85.0;
pub const DEFAULT_DMC: f64 = 6.0;
pub const DEFAULT_DC: f64 = 15.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FwiError {
    #[error("`{field}` out of domain: {value} ({constraint})")]
    Domain {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },
}

fn check(field: &'static str, value: f64, ok: bool, constraint: &'static str) -> Result<(), FwiError> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(FwiError::Domain {
            field,
            value,
            constraint,
        })
    }
}

/// One day of noon weather at a station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeatherObservation {
    pub date: NaiveDate,
    pub temp_c: f64,
    pub rh_pct: f64,
    pub wind_kmh: f64,
    pub rain_mm: f64,
}

impl WeatherObservation {
    pub fn new(date: NaiveDate, temp_c: f64, rh_pct: f64, wind_kmh: f64, rain_mm: f64) -> Result<Self, FwiError> {
        let obs = Self {
            date,
            temp_c,
            rh_pct,
            wind_kmh,
            rain_mm,
        };
        obs.validate()?;
        Ok(obs)
    }

    /// Calendar month, 1 to 12.
    pub fn month(&self) -> u32 {
        self.date.month()
    }

    pub fn validate(&self) -> Result<(), FwiError> {
        check("temp_c", self.temp_c, true, "finite")?;
        check("rh_pct", self.rh_pct, (0.0..=100.0).contains(&self.rh_pct), "0 <= rh <= 100")?;
        check("wind_kmh", self.wind_kmh, self.wind_kmh >= 0.0, "wind >= 0")?;
        check("rain_mm", self.rain_mm, self.rain_mm >= 0.0, "rain >= 0")?;
        Ok(())
    }
}

/// Moisture codes carried from one day to the next.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FwiState {
    pub ffmc: f64,
    pub dmc: f64,
    pub dc: f64,
}

impl Default for FwiState {
    fn default() -> Self {
        Self {
            ffmc: DEFAULT_FFMC,
            dmc: DEFAULT_DMC,
            dc: DEFAULT_DC,
        }
    }
}

impl FwiState {
    pub fn validate(&self) -> Result<(), FwiError> {
        check_ffmc(self.ffmc)?;
        check_code("dmc", self.dmc)?;
        check_code("dc", self.dc)
    }
}

/// Moisture codes after today's update plus the behaviour indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FwiReport {
    pub date: NaiveDate,
    pub state: FwiState,
    pub isi: f64,
    pub bui: f64,
    pub fwi: f64,
}

/// Day-length tables by latitude band.
///
/// The standard tables are those of the Canadian system (valid 30°N to
/// 90°N) with the reflected and equatorial variants used for other regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatitudeBand {
    /// 30°N to 90°N.
    #[default]
    North,
    /// 15°N to 30°N.
    NorthSubtropical,
    /// 15°S to 15°N.
    Equatorial,
    /// 30°S to 15°S.
    SouthSubtropical,
    /// 90°S to 30°S.
    South,
}

const DMC_DAY_LENGTH: [[f64; 12]; 5] = [
    [6.5, 7.5, 9.0, 12.8, 13.9, 13.9, 12.4, 10.9, 9.4, 8.0, 7.0, 6.0],
    [7.9, 8.4, 8.9, 9.5, 9.9, 10.2, 10.1, 9.7, 9.1, 8.6, 8.1, 7.8],
    [9.0; 12],
    [10.1, 9.6, 9.1, 8.5, 8.1, 7.8, 7.9, 8.3, 8.9, 9.4, 9.9, 10.2],
    [11.5, 10.5, 9.2, 7.9, 6.8, 6.2, 6.5, 7.4, 8.7, 10.0, 11.2, 11.8],
];

const DC_DAY_LENGTH_FACTOR: [[f64; 12]; 3] = [
    [-1.6, -1.6, -1.6, 0.9, 3.8, 5.8, 6.4, 5.0, 2.4, 0.4, -1.6, -1.6],
    [1.39; 12],
    [6.4, 5.0, 2.4, 0.4, -1.6, -1.6, -1.6, -1.6, -1.6, 0.9, 3.8, 5.8],
];

impl LatitudeBand {
    pub fn from_latitude(lat: f64) -> Result<Self, FwiError> {
        check("lat", lat, (-90.0..=90.0).contains(&lat), "-90 <= lat <= 90")?;
        Ok(if lat >= 30.0 {
            Self::North
        } else if lat >= 15.0 {
            Self::NorthSubtropical
        } else if lat >= -15.0 {
            Self::Equatorial
        } else if lat >= -30.0 {
            Self::SouthSubtropical
        } else {
            Self::South
        })
    }

    /// Effective day length `Le` used by the DMC, in hours.
    pub fn dmc_day_length(self, month: u32) -> f64 {
        let row = match self {
            Self::North => 0,
            Self::NorthSubtropical => 1,
            Self::Equatorial => 2,
            Self::SouthSubtropical => 3,
            Self::South => 4,
        };
        DMC_DAY_LENGTH[row][month_index(month)]
    }

    /// Day-length adjustment `Lf` used by the DC.
    pub fn dc_day_length_factor(self, month: u32) -> f64 {
        let row = match self {
            Self::North | Self::NorthSubtropical => 0,
            Self::Equatorial => 1,
            Self::SouthSubtropical | Self::South => 2,
        };
        DC_DAY_LENGTH_FACTOR[row][month_index(month)]
    }
}

fn month_index(month: u32) -> usize {
    assert!((1..=12).contains(&month), "month {month} outside 1..=12");
    (month - 1) as usize
}

fn check_ffmc(ffmc: f64) -> Result<(), FwiError> {
    check("ffmc", ffmc, (0.0..=101.0).contains(&ffmc), "0 <= ffmc <= 101")
}

fn check_code(field: &'static str, value: f64) -> Result<(), FwiError> {
    check(field, value, value >= 0.0, ">= 0")
}

/// FFMC to fine fuel moisture content (%).
fn ffmc_to_moisture(ffmc: f64) -> f64 {
    147.2 * (101.0 - ffmc) / (59.5 + ffmc)
}

/// Updates yesterday's FFMC with today's weather.
pub fn update_ffmc(prev: f64, obs: &WeatherObservation) -> Result<f64, FwiError> {
    check_ffmc(prev)?;
    obs.validate()?;
    let (t, h, w, r) = (obs.temp_c, obs.rh_pct, obs.wind_kmh, obs.rain_mm);

    let mut mo = ffmc_to_moisture(prev);
    if r > 0.5 {
        let rf = r - 0.5;
        let mut wetted = mo + 42.5 * rf * (-100.0 / (251.0 - mo)).exp() * (1.0 - (-6.93 / rf).exp());
        if mo > 150.0 {
            wetted += 0.0015 * (mo - 150.0).powi(2) * rf.sqrt();
        }
        mo = wetted.min(250.0);
    }

    let temp_term = 0.18 * (21.1 - t) * (1.0 - (-0.115 * h).exp());
    let ed = 0.942 * h.powf(0.679) + 11.0 * ((h - 100.0) / 10.0).exp() + temp_term;
    let m = if mo > ed {
        let k0 = 0.424 * (1.0 - (h / 100.0).powf(1.7)) + 0.0694 * w.sqrt() * (1.0 - (h / 100.0).powi(8));
        let kd = k0 * 0.581 * (0.0365 * t).exp();
        ed + (mo - ed) / 10f64.powf(kd)
    } else {
        let ew = 0.618 * h.powf(0.753) + 10.0 * ((h - 100.0) / 10.0).exp() + temp_term;
        if mo < ew {
            let dry = (100.0 - h) / 100.0;
            let k1 = 0.424 * (1.0 - dry.powf(1.7)) + 0.0694 * w.sqrt() * (1.0 - dry.powi(8));
            let kw = k1 * 0.581 * (0.0365 * t).exp();
            ew - (ew - mo) / 10f64.powf(kw)
        } else {
            mo
        }
    };

    Ok((59.5 * (250.0 - m) / (147.2 + m)).clamp(0.0, 101.0))
}

/// Updates yesterday's DMC with today's weather.
pub fn update_dmc(prev: f64, obs: &WeatherObservation, band: LatitudeBand) -> Result<f64, FwiError> {
    check_code("dmc", prev)?;
    obs.validate()?;
    let (t, h, r) = (obs.temp_c, obs.rh_pct, obs.rain_mm);

    let mut p = prev;
    if r > 1.5 {
        let re = 0.92 * r - 1.27;
        let mo = 20.0 + 280.0 / (0.023 * p).exp();
        let b = if p <= 33.0 {
            100.0 / (0.5 + 0.3 * p)
        } else if p <= 65.0 {
            14.0 - 1.3 * p.ln()
        } else {
            6.2 * p.ln() - 17.2
        };
        let mr = mo + 1000.0 * re / (48.77 + b * re);
        p = (43.43 * (5.6348 - (mr - 20.0).ln())).max(0.0);
    }

    let drying = if t < -1.1 {
        0.0
    } else {
        1.894 * (t + 1.1) * (100.0 - h) * band.dmc_day_length(obs.month()) * 1e-4
    };
    Ok((p + drying).max(0.0))
}

/// Updates yesterday's DC with today's weather.
pub fn update_dc(prev: f64, obs: &WeatherObservation, band: LatitudeBand) -> Result<f64, FwiError> {
    check_code("dc", prev)?;
    obs.validate()?;
    let (t, r) = (obs.temp_c, obs.rain_mm);

    let mut d = prev;
    if r > 2.8 {
        let rd = 0.83 * r - 1.27;
        let q = 800.0 * (-d / 400.0).exp();
        d = (d - 400.0 * (1.0 + 3.937 * rd / q).ln()).max(0.0);
    }

    let potential_et = (0.36 * (t.max(-2.8) + 2.8) + band.dc_day_length_factor(obs.month())).max(0.0);
    Ok(d + 0.5 * potential_et)
}

/// Initial Spread Index from FFMC and wind speed.
pub fn compute_isi(ffmc: f64, wind_kmh: f64) -> Result<f64, FwiError> {
    check_ffmc(ffmc)?;
    check("wind_kmh", wind_kmh, wind_kmh >= 0.0, "wind >= 0")?;
    let m = ffmc_to_moisture(ffmc);
    let fine_fuel = 91.9 * (-0.1386 * m).exp() * (1.0 + m.powf(5.31) / 4.93e7);
    Ok(0.208 * (0.05039 * wind_kmh).exp() * fine_fuel)
}

/// Buildup Index from DMC and DC.
pub fn compute_bui(dmc: f64, dc: f64) -> Result<f64, FwiError> {
    check_code("dmc", dmc)?;
    check_code("dc", dc)?;
    if dmc == 0.0 {
        return Ok(0.0);
    }
    let bui = if dmc <= 0.4 * dc {
        0.8 * dmc * dc / (dmc + 0.4 * dc)
    } else {
        dmc - (1.0 - 0.8 * dc / (dmc + 0.4 * dc)) * (0.92 + (0.0114 * dmc).powf(1.7))
    };
    Ok(bui.max(0.0))
}

/// Fire Weather Index from ISI and BUI.
pub fn compute_fwi(isi: f64, bui: f64) -> Result<f64, FwiError> {
    check("isi", isi, isi >= 0.0, ">= 0")?;
    check_code("bui", bui)?;
    let duff = if bui <= 80.0 {
        0.626 * bui.powf(0.809) + 2.0
    } else {
        1000.0 / (25.0 + 108.64 * (-0.023 * bui).exp())
    };
    let b = 0.1 * isi * duff;
    Ok(if b > 1.0 {
        (2.72 * (0.434 * b.ln()).powf(0.647)).exp()
    } else {
        b
    })
}

/// Advances the moisture codes by one day and derives the behaviour indices.
pub fn step_day(state: &FwiState, obs: &WeatherObservation, band: LatitudeBand) -> Result<FwiReport, FwiError> {
    state.validate()?;
    obs.validate()?;
    let next = FwiState {
        ffmc: update_ffmc(state.ffmc, obs)?,
        dmc: update_dmc(state.dmc, obs, band)?,
        dc: update_dc(state.dc, obs, band)?,
    };
    let isi = compute_isi(next.ffmc, obs.wind_kmh)?;
    let bui = compute_bui(next.dmc, next.dc)?;
    let fwi = compute_fwi(isi, bui)?;
    Ok(FwiReport {
        date: obs.date,
        state: next,
        isi,
        bui,
        fwi,
    })
}

/// Runs the daily chain over a weather series, threading state day to day.
pub fn run_series(
    initial: FwiState,
    observations: &[WeatherObservation],
    band: LatitudeBand,
) -> Result<Vec<FwiReport>, FwiError> {
    let mut state = initial;
    observations
        .iter()
        .map(|obs| {
            let report = step_day(&state, obs, band)?;
            state = report.state;
            Ok(report)
        })
        .collect()
}
