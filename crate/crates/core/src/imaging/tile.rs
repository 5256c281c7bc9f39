use serde::{Deserialize, Serialize};

use super::raster::RasterImage;
use super::ImagingError;

pub const DEFAULT_TILE_SIZE: usize = 350;

/// What to do with tiles that overhang the right or bottom edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgePolicy {
    /// Fill the overhang with black.
    #[default]
    PadZero,
    /// Mirror the image about its last row/column (edge pixel not repeated).
    PadReflect,
    /// Skip partial tiles entirely.
    DropPartial,
}

impl std::str::FromStr for EdgePolicy {
    type Err = ImagingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pad-zero" => Ok(Self::PadZero),
            "pad-reflect" => Ok(Self::PadReflect),
            "drop-partial" => Ok(Self::DropPartial),
            other => Err(ImagingError::Domain(format!("unknown edge policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tile {
    pub row: usize,
    pub col: usize,
    /// Top-left pixel in the source, `(y, x)`.
    pub origin: (usize, usize),
    /// Extent of real source pixels inside the tile.
    pub valid_width: usize,
    pub valid_height: usize,
    pub image: RasterImage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileGrid {
    pub source_width: usize,
    pub source_height: usize,
    pub tile_size: usize,
    pub policy: EdgePolicy,
    pub rows: usize,
    pub cols: usize,
    /// Row-major by `(row, col)`.
    pub tiles: Vec<Tile>,
}

fn reflect_index(i: usize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let m = i % period;
    if m < n {
        m
    } else {
        period - m
    }
}

/// Cuts `image` into `size × size` tiles on a grid anchored at the origin.
pub fn tile(image: &RasterImage, size: usize, policy: EdgePolicy) -> Result<TileGrid, ImagingError> {
    if size == 0 {
        return Err(ImagingError::Domain("tile size must be positive".into()));
    }
    let (w, h) = (image.width(), image.height());
    let (rows, cols) = match policy {
        EdgePolicy::DropPartial => (h / size, w / size),
        _ => (h.div_ceil(size), w.div_ceil(size)),
    };
    let mut tiles = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        for col in 0..cols {
            let (oy, ox) = (row * size, col * size);
            let valid_height = size.min(h - oy);
            let valid_width = size.min(w - ox);
            let mut data = vec![0u8; size * size * 3];
            let src = image.data();
            for ty in 0..size {
                let dst = &mut data[ty * size * 3..(ty + 1) * size * 3];
                let sy = oy + ty;
                if sy < h {
                    let start = (sy * w + ox) * 3;
                    dst[..valid_width * 3].copy_from_slice(&src[start..start + valid_width * 3]);
                }
                if policy != EdgePolicy::PadReflect || (sy < h && valid_width == size) {
                    continue;
                }
                let ry = reflect_index(sy, h);
                let first = if sy < h { valid_width } else { 0 };
                for tx in first..size {
                    let px = image.pixel(reflect_index(ox + tx, w), ry);
                    dst[tx * 3..tx * 3 + 3].copy_from_slice(&px);
                }
            }
            tiles.push(Tile {
                row,
                col,
                origin: (oy, ox),
                valid_width,
                valid_height,
                image: RasterImage::new(size, size, data)?,
            });
        }
    }
    Ok(TileGrid {
        source_width: w,
        source_height: h,
        tile_size: size,
        policy,
        rows,
        cols,
        tiles,
    })
}

impl TileGrid {
    /// Rebuilds the source from the unpadded region of every tile. Pixels not
    /// covered (only possible with [`EdgePolicy::DropPartial`]) stay black.
    pub fn reassemble(&self) -> RasterImage {
        let mut out = RasterImage::filled(self.source_width, self.source_height, [0, 0, 0]);
        for t in &self.tiles {
            for ty in 0..t.valid_height {
                for tx in 0..t.valid_width {
                    out.set_pixel(t.origin.1 + tx, t.origin.0 + ty, t.image.pixel(tx, ty));
                }
            }
        }
        out
    }
}

/// `<stem>_r<row>_c<col>.png`
pub fn tile_file_name(stem: &str, row: usize, col: usize) -> String {
    format!("{stem}_r{row}_c{col}.png")
}
