//! Aerial imagery: PNG rasters, tiling into classifier-sized patches,
//! training augmentation, labelled dataset manifests and batch streaming.

use std::path::PathBuf;

mod augment;
mod batch;
mod manifest;
mod raster;
mod tile;

pub use augment::{
    apply as apply_augmentation, augment, hflip, rotate, shift, zoom, AugmentConfig, AugmentDraw, FillMode,
    Interpolation,
};
pub use batch::{batch_iter, Batch, BatchConfig, BatchIter, EntryError, FsLoader, ImageLoader, DEFAULT_BATCH_SIZE};
pub use manifest::{scan_directory, split_dataset, DatasetManifest, Label, ManifestEntry, Split, SplitFractions};
pub use raster::{GeoAnchor, RasterImage};
pub use tile::{tile, tile_file_name, EdgePolicy, Tile, TileGrid, DEFAULT_TILE_SIZE};

#[derive(Debug, thiserror::Error)]
pub enum ImagingError {
    #[error("{0}")]
    Domain(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Decode { path: PathBuf, message: String },
    #[error("manifest: {0}")]
    Manifest(String),
}
