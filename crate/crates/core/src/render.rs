//! Danger-map rasters: one solid square per tile, coloured by level.
//!
//! | level | colour    |
//! |-------|-----------|
//! | 0     | `#1A9850` |
//! | 1     | `#91CF60` |
//! | 2     | `#FEE08B` |
//! | 3     | `#FC8D59` |
//! | 4     | `#D73027` |
//! | 5     | `#67001F` |

use crate::fusion::DangerLevel;
use crate::imaging::RasterImage;

pub const PALETTE: [[u8; 3]; 6] = [
    [0x1A, 0x98, 0x50],
    [0x91, 0xCF, 0x60],
    [0xFE, 0xE0, 0x8B],
    [0xFC, 0x8D, 0x59],
    [0xD7, 0x30, 0x27],
    [0x67, 0x00, 0x1F],
];

pub const DEFAULT_CELL_SIZE: usize = 32;

/// Paints each cell as a `cell × cell` block at `(row, col)`. Positions with
/// no cell stay black.
pub fn render_levels(cells: &[DangerLevel], cell: usize) -> Option<RasterImage> {
    if cells.is_empty() || cell == 0 {
        return None;
    }
    let rows = cells.iter().map(|c| c.row).max()? + 1;
    let cols = cells.iter().map(|c| c.col).max()? + 1;
    let mut img = RasterImage::filled(cols * cell, rows * cell, [0, 0, 0]);
    for c in cells {
        let rgb = PALETTE[usize::from(c.level.min(5))];
        for y in 0..cell {
            for x in 0..cell {
                img.set_pixel(c.col * cell + x, c.row * cell + y, rgb);
            }
        }
    }
    Some(img)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centroids_take_palette_colours() {
        let cells: Vec<_> = (0..6)
            .map(|i| DangerLevel {
                level: i as u8,
                base_level: 5,
                p_burn: None,
                severity: None,
                row: i / 3,
                col: i % 3,
            })
            .collect();
        let img = render_levels(&cells, 8).unwrap();
        assert_eq!((img.width(), img.height()), (24, 16));
        for c in &cells {
            assert_eq!(img.pixel(c.col * 8 + 4, c.row * 8 + 4), PALETTE[c.level as usize]);
        }
    }
}
