//! Combining the weather signal with the image classifier into a 0–5 danger
//! level.
//!
//! The FWI value picks a base class through five cut points (right-closed:
//! an FWI equal to a threshold lands in the upper class). A burn probability
//! `p` then attenuates it:
//!
//! ```text
//! level = round(base · (1 − p)^γ)   if p ≥ τ
//!       = base                      otherwise
//! ```
//!
//! with rounding half away from zero. Burn severity on a 0–5 scale uses
//! `round(base · (1 − s/5))`. Both rules keep `level ≤ base`.

use serde::{Deserialize, Serialize};

use crate::cnn::ClassScores;
use crate::fwi::FwiReport;
use crate::imaging::TileGrid;

pub const MAX_LEVEL: u8 = 5;
pub const DEFAULT_THRESHOLDS: [f64; 5] = [5.2, 11.2, 21.3, 38.0, 50.0];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FusionError {
    #[error("{field} = {value} is out of range ({constraint})")]
    Domain {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("thresholds {0:?} must be finite and strictly ascending")]
    Thresholds([f64; 5]),
    #[error("{tiles} tiles but {scores} score vectors")]
    CountMismatch { tiles: usize, scores: usize },
    #[error("danger map line {line}: {message}")]
    Csv { line: usize, message: String },
}

fn domain(field: &'static str, value: f64, constraint: &'static str) -> FusionError {
    FusionError::Domain {
        field,
        value,
        constraint,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionConfig {
    pub thresholds: [f64; 5],
    pub gamma: f64,
    pub tau: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            thresholds: DEFAULT_THRESHOLDS,
            gamma: 1.0,
            tau: 0.0,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<(), FusionError> {
        let t = self.thresholds;
        if t.iter().any(|v| !v.is_finite()) || t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FusionError::Thresholds(t));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(domain("gamma", self.gamma, "finite and > 0"));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(domain("tau", self.tau, "in [0, 1]"));
        }
        Ok(())
    }
}

/// Fusion result for one tile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DangerLevel {
    pub level: u8,
    pub base_level: u8,
    pub p_burn: Option<f64>,
    pub severity: Option<u8>,
    pub row: usize,
    pub col: usize,
}

pub fn fwi_to_danger(fwi: f64, cfg: &FusionConfig) -> Result<u8, FusionError> {
    if !(fwi.is_finite() && fwi >= 0.0) {
        return Err(domain("fwi", fwi, "finite and >= 0"));
    }
    Ok(cfg.thresholds.iter().filter(|&&t| fwi >= t).count() as u8)
}

fn check_base(base: u8) -> Result<(), FusionError> {
    if base > MAX_LEVEL {
        return Err(domain("base", base as f64, "0..=5"));
    }
    Ok(())
}

pub fn fuse_binary(base: u8, p_burn: f64, cfg: &FusionConfig) -> Result<DangerLevel, FusionError> {
    check_base(base)?;
    if !(0.0..=1.0).contains(&p_burn) {
        return Err(domain("p_burn", p_burn, "in [0, 1]"));
    }
    let level = if p_burn >= cfg.tau {
        (base as f64 * (1.0 - p_burn).powf(cfg.gamma)).round() as u8
    } else {
        base
    };
    Ok(DangerLevel {
        level,
        base_level: base,
        p_burn: Some(p_burn),
        severity: None,
        row: 0,
        col: 0,
    })
}

pub fn fuse_severity(base: u8, severity: u8) -> Result<DangerLevel, FusionError> {
    check_base(base)?;
    if severity > MAX_LEVEL {
        return Err(domain("severity", severity as f64, "0..=5"));
    }
    let level = (base as f64 * (1.0 - severity as f64 / 5.0)).round() as u8;
    Ok(DangerLevel {
        level,
        base_level: base,
        p_burn: None,
        severity: Some(severity),
        row: 0,
        col: 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DangerMap {
    pub fwi: f64,
    pub base_level: u8,
    /// Ordered by `(row, col)`.
    pub cells: Vec<DangerLevel>,
}

impl DangerMap {
    /// Number of cells at each level 0..=5.
    pub fn histogram(&self) -> [usize; 6] {
        let mut h = [0; 6];
        for c in &self.cells {
            h[c.level as usize] += 1;
        }
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,base_level,p_burn,level\n");
        for c in &self.cells {
            let p = c.p_burn.map_or_else(String::new, |p| format!("{p:.6}"));
            out.push_str(&format!("{},{},{},{},{}\n", c.row, c.col, c.base_level, p, c.level));
        }
        out
    }
}

/// Reads the `row,col,base_level,p_burn,level` format back. An empty
/// `p_burn` field means no classifier probability was involved.
pub fn read_danger_csv(text: &str) -> Result<Vec<DangerLevel>, FusionError> {
    let mut lines = text.lines();
    if lines.next() != Some("row,col,base_level,p_burn,level") {
        return Err(FusionError::Csv {
            line: 1,
            message: "expected header `row,col,base_level,p_burn,level`".into(),
        });
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let bad = |message: String| FusionError::Csv { line: i + 2, message };
        let fields: Vec<_> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad(format!("expected 5 fields, got {}", fields.len())));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("`{s}`: {e}")));
        let (row, col) = (int(fields[0])?, int(fields[1])?);
        let (base, level) = (int(fields[2])?, int(fields[4])?);
        if level > base || base > MAX_LEVEL as usize {
            return Err(bad(format!("levels {level} / {base} violate 0 <= level <= base <= 5")));
        }
        let p_burn = match fields[3] {
            "" => None,
            p => Some(p.parse::<f64>().map_err(|e| bad(format!("`{p}`: {e}")))?),
        };
        out.push(DangerLevel {
            level: level as u8,
            base_level: base as u8,
            p_burn,
            severity: None,
            row,
            col,
        });
    }
    Ok(out)
}

/// Fuses `(row, col, p_burn)` triples against one FWI value.
pub fn assess_cells(cells: &[(usize, usize, f64)], fwi: f64, cfg: &FusionConfig) -> Result<DangerMap, FusionError> {
    cfg.validate()?;
    let base = fwi_to_danger(fwi, cfg)?;
    let mut out = cells
        .iter()
        .map(|&(row, col, p)| fuse_binary(base, p, cfg).map(|d| DangerLevel { row, col, ..d }))
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_by_key(|d| (d.row, d.col));
    Ok(DangerMap {
        fwi,
        base_level: base,
        cells: out,
    })
}

/// One score vector per tile, in grid order.
pub fn assess_grid(
    grid: &TileGrid,
    scores: &[ClassScores],
    report: &FwiReport,
    cfg: &FusionConfig,
) -> Result<DangerMap, FusionError> {
    if grid.tiles.len() != scores.len() {
        return Err(FusionError::CountMismatch {
            tiles: grid.tiles.len(),
            scores: scores.len(),
        });
    }
    let cells: Vec<_> = grid
        .tiles
        .iter()
        .zip(scores)
        .map(|(t, s)| (t.row, t.col, s.p_burn()))
        .collect();
    assess_cells(&cells, report.fwi, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_classes() {
        let cfg = FusionConfig::default();
        assert_eq!(fwi_to_danger(0.0, &cfg), Ok(0));
        assert_eq!(fwi_to_danger(5.1999, &cfg), Ok(0));
        assert_eq!(fwi_to_danger(5.2, &cfg), Ok(1));
        assert_eq!(fwi_to_danger(38.0, &cfg), Ok(4));
        assert_eq!(fwi_to_danger(50.0, &cfg), Ok(5));
        assert_eq!(fwi_to_danger(1e6, &cfg), Ok(5));
        assert!(fwi_to_danger(-0.1, &cfg).is_err());
        assert!(fwi_to_danger(f64::NAN, &cfg).is_err());
    }

    #[test]
    fn binary_rule() {
        let cfg = FusionConfig::default();
        assert_eq!(fuse_binary(4, 0.5, &cfg).unwrap().level, 2);
        assert_eq!(fuse_binary(3, 0.0, &cfg).unwrap().level, 3);
        let steep = FusionConfig { gamma: 3.0, ..cfg.clone() };
        assert_eq!(fuse_binary(5, 1.0, &steep).unwrap().level, 0);
        // 5 · 0.5 = 2.5 rounds away from zero
        assert_eq!(fuse_binary(5, 0.5, &cfg).unwrap().level, 3);
        let floor = FusionConfig { tau: 0.6, ..cfg.clone() };
        assert_eq!(fuse_binary(5, 0.5, &floor).unwrap().level, 5);
        assert!(fuse_binary(6, 0.5, &cfg).is_err());
        assert!(fuse_binary(2, 1.01, &cfg).is_err());
    }

    #[test]
    fn severity_rule() {
        assert_eq!(fuse_severity(3, 2).unwrap().level, 2);
        assert_eq!(fuse_severity(5, 5).unwrap().level, 0);
        assert_eq!(fuse_severity(4, 0).unwrap().level, 4);
        assert!(fuse_severity(4, 6).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = FusionConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.thresholds = [1.0, 2.0, 2.0, 3.0, 4.0];
        assert!(cfg.validate().is_err());
        let cfg = FusionConfig { gamma: 0.0, ..FusionConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn small_grid() {
        let cells = [(0, 0, 0.0), (0, 1, 0.5), (1, 0, 1.0), (1, 1, 0.25)];
        // FWI 40 sits in class 4
        let map = assess_cells(&cells, 40.0, &FusionConfig::default()).unwrap();
        let levels: Vec<_> = map.cells.iter().map(|c| c.level).collect();
        assert_eq!(levels, vec![4, 2, 0, 3]);
        assert_eq!(map.histogram(), [1, 0, 1, 1, 1, 0]);
        let csv = map.to_csv();
        assert!(csv.starts_with("row,col,base_level,p_burn,level\n0,0,4,0.000000,4\n"));
        assert_eq!(read_danger_csv(&csv).unwrap(), map.cells);
        assert!(read_danger_csv("row,col,base_level,p_burn,level\n0,0,2,0.5,3\n").is_err());
    }
}
