use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ImagingError;
use crate::cnn::{Shape3, Tensor3};

/// Lat/lon of the upper-left and lower-right corners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoAnchor {
    pub north: f64,
    pub west: f64,
    pub south: f64,
    pub east: f64,
}

/// 8-bit RGB image, row-major, 3 bytes per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
    pub geo: Option<GeoAnchor>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::Domain(format!("image dimensions {width}x{height} must be positive")));
        }
        if data.len() != width * height * 3 {
            return Err(ImagingError::Domain(format!(
                "{width}x{height} RGB image needs {} bytes, got {}",
                width * height * 3,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
            geo: None,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        Self {
            width,
            height,
            data: rgb.iter().copied().cycle().take(width * height * 3).collect(),
            geo: None,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Pixels scaled to `[0, 1]`, shaped `(height, width, 3)`.
    pub fn to_tensor(&self) -> Tensor3 {
        Tensor3::from_u8(Shape3::new(self.height, self.width, 3), &self.data).expect("dimensions checked at construction")
    }

    /// Decodes an 8-bit image. Grayscale is replicated across channels and
    /// alpha is dropped.
    pub fn load(path: &Path) -> Result<Self, ImagingError> {
        let img = image::open(path).map_err(|e| ImagingError::Decode {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let rgb = img.to_rgb8();
        let (w, h) = rgb.dimensions();
        Self::new(w as usize, h as usize, rgb.into_raw())
    }

    pub fn save_png(&self, path: &Path) -> Result<(), ImagingError> {
        image::save_buffer_with_format(
            path,
            &self.data,
            self.width as u32,
            self.height as u32,
            image::ExtendedColorType::Rgb8,
            image::ImageFormat::Png,
        )
        .map_err(|e| ImagingError::Decode {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}
