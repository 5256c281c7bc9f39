//! Random geometric augmentation.
//!
//! One call draws a flip decision, an angle, a zoom factor and a shift from
//! the supplied generator (always in that order, so the stream position does
//! not depend on which transforms are enabled) and applies them as
//! flip → rotate → zoom → shift. Every step is an inverse mapping from output
//! pixel to source position around the image centre; samples that fall
//! outside the source take the fill value.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::raster::RasterImage;
use super::ImagingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FillMode {
    #[default]
    Zero,
    /// Clamp to the nearest edge pixel.
    Nearest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    #[default]
    Nearest,
    Bilinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentConfig {
    /// Angles are drawn from `[-rotation_deg, rotation_deg]`.
    pub rotation_deg: f64,
    /// Shifts are drawn from `[-f, f]` times the image dimension.
    pub width_shift: f64,
    pub height_shift: f64,
    /// Zoom factors are drawn from `[1 - zoom_range, 1 + zoom_range]`.
    pub zoom_range: f64,
    pub horizontal_flip: bool,
    pub fill: FillMode,
    pub interpolation: Interpolation,
    pub seed: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self::identity()
    }
}

impl AugmentConfig {
    pub fn identity() -> Self {
        Self {
            rotation_deg: 0.0,
            width_shift: 0.0,
            height_shift: 0.0,
            zoom_range: 0.0,
            horizontal_flip: false,
            fill: FillMode::Zero,
            interpolation: Interpolation::Nearest,
            seed: 0,
        }
    }

    /// A moderate training preset.
    pub fn training(seed: u64) -> Self {
        Self {
            rotation_deg: 20.0,
            width_shift: 0.1,
            height_shift: 0.1,
            zoom_range: 0.1,
            horizontal_flip: true,
            seed,
            ..Self::identity()
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rotation_deg == 0.0
            && self.width_shift == 0.0
            && self.height_shift == 0.0
            && self.zoom_range == 0.0
            && !self.horizontal_flip
    }

    pub fn validate(&self) -> Result<(), ImagingError> {
        let fraction = |name: &str, v: f64| {
            if (0.0..1.0).contains(&v) {
                Ok(())
            } else {
                Err(ImagingError::Domain(format!("{name} must be in [0, 1), got {v}")))
            }
        };
        fraction("width_shift", self.width_shift)?;
        fraction("height_shift", self.height_shift)?;
        fraction("zoom_range", self.zoom_range)?;
        if !(self.rotation_deg.is_finite() && self.rotation_deg >= 0.0) {
            return Err(ImagingError::Domain(format!(
                "rotation_deg must be finite and non-negative, got {}",
                self.rotation_deg
            )));
        }
        Ok(())
    }
}

/// Concrete parameters for one augmentation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentDraw {
    pub flip: bool,
    pub angle_deg: f64,
    pub zoom: f64,
    /// Pixel shift, positive moves content right / down.
    pub dx: i64,
    pub dy: i64,
}

impl AugmentDraw {
    pub const IDENTITY: Self = Self {
        flip: false,
        angle_deg: 0.0,
        zoom: 1.0,
        dx: 0,
        dy: 0,
    };

    pub fn sample<R: Rng + ?Sized>(cfg: &AugmentConfig, width: usize, height: usize, rng: &mut R) -> Self {
        let flip_u: f64 = rng.gen();
        let angle_u: f64 = rng.gen_range(-1.0..=1.0);
        let zoom_u: f64 = rng.gen_range(-1.0..=1.0);
        let dx_u: f64 = rng.gen_range(-1.0..=1.0);
        let dy_u: f64 = rng.gen_range(-1.0..=1.0);
        Self {
            flip: cfg.horizontal_flip && flip_u < 0.5,
            angle_deg: angle_u * cfg.rotation_deg,
            zoom: 1.0 + zoom_u * cfg.zoom_range,
            dx: (dx_u * cfg.width_shift * width as f64).round() as i64,
            dy: (dy_u * cfg.height_shift * height as f64).round() as i64,
        }
    }
}

/// Draws parameters from `rng` and applies them.
pub fn augment<R: Rng + ?Sized>(image: &RasterImage, cfg: &AugmentConfig, rng: &mut R) -> RasterImage {
    let draw = AugmentDraw::sample(cfg, image.width(), image.height(), rng);
    apply(image, &draw, cfg.fill, cfg.interpolation)
}

pub fn apply(image: &RasterImage, draw: &AugmentDraw, fill: FillMode, interp: Interpolation) -> RasterImage {
    let mut out = image.clone();
    if draw.flip {
        out = hflip(&out);
    }
    if draw.angle_deg != 0.0 {
        out = rotate(&out, draw.angle_deg, fill, interp);
    }
    if draw.zoom != 1.0 {
        out = zoom(&out, draw.zoom, fill, interp);
    }
    if draw.dx != 0 || draw.dy != 0 {
        out = shift(&out, draw.dx, draw.dy, fill);
    }
    out
}

pub fn hflip(image: &RasterImage) -> RasterImage {
    let (w, h) = (image.width(), image.height());
    let mut out = image.clone();
    for y in 0..h {
        for x in 0..w {
            out.set_pixel(x, y, image.pixel(w - 1 - x, y));
        }
    }
    out
}

fn snap(v: f64) -> f64 {
    for target in [-1.0, 0.0, 1.0] {
        if (v - target).abs() < 1e-12 {
            return target;
        }
    }
    v
}

/// Counter-clockwise rotation about the centre. Multiples of 90° map pixel
/// centres exactly onto pixel centres for square images.
pub fn rotate(image: &RasterImage, angle_deg: f64, fill: FillMode, interp: Interpolation) -> RasterImage {
    let theta = angle_deg.to_radians();
    let (cos, sin) = (snap(theta.cos()), snap(theta.sin()));
    let (cx, cy) = center(image);
    resample(image, fill, interp, |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        (cx + cos * dx - sin * dy, cy + sin * dx + cos * dy)
    })
}

/// `factor > 1` magnifies.
pub fn zoom(image: &RasterImage, factor: f64, fill: FillMode, interp: Interpolation) -> RasterImage {
    let (cx, cy) = center(image);
    resample(image, fill, interp, |x, y| (cx + (x - cx) / factor, cy + (y - cy) / factor))
}

pub fn shift(image: &RasterImage, dx: i64, dy: i64, fill: FillMode) -> RasterImage {
    resample(image, fill, Interpolation::Nearest, |x, y| (x - dx as f64, y - dy as f64))
}

fn center(image: &RasterImage) -> (f64, f64) {
    ((image.width() as f64 - 1.0) / 2.0, (image.height() as f64 - 1.0) / 2.0)
}

fn fetch(image: &RasterImage, x: i64, y: i64, fill: FillMode) -> [f64; 3] {
    let (w, h) = (image.width() as i64, image.height() as i64);
    let inside = (0..w).contains(&x) && (0..h).contains(&y);
    let p = match (inside, fill) {
        (true, _) => image.pixel(x as usize, y as usize),
        (false, FillMode::Zero) => return [0.0; 3],
        (false, FillMode::Nearest) => image.pixel(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize),
    };
    p.map(f64::from)
}

fn resample(
    image: &RasterImage,
    fill: FillMode,
    interp: Interpolation,
    source: impl Fn(f64, f64) -> (f64, f64),
) -> RasterImage {
    let mut out = image.clone();
    for y in 0..image.height() {
        for x in 0..image.width() {
            let (sx, sy) = source(x as f64, y as f64);
            let v = match interp {
                Interpolation::Nearest => fetch(image, sx.round() as i64, sy.round() as i64, fill),
                Interpolation::Bilinear => {
                    let (x0, y0) = (sx.floor(), sy.floor());
                    let (fx, fy) = (sx - x0, sy - y0);
                    let (x0, y0) = (x0 as i64, y0 as i64);
                    let mut acc = [0.0; 3];
                    for (ox, oy, wgt) in [
                        (0, 0, (1.0 - fx) * (1.0 - fy)),
                        (1, 0, fx * (1.0 - fy)),
                        (0, 1, (1.0 - fx) * fy),
                        (1, 1, fx * fy),
                    ] {
                        if wgt == 0.0 {
                            continue;
                        }
                        let p = fetch(image, x0 + ox, y0 + oy, fill);
                        for c in 0..3 {
                            acc[c] += wgt * p[c];
                        }
                    }
                    acc
                }
            };
            out.set_pixel(x, y, v.map(|c| c.round().clamp(0.0, 255.0) as u8));
        }
    }
    out
}
