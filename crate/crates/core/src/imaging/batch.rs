use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::augment::{augment, AugmentConfig};
use super::manifest::{DatasetManifest, Label, Split};
use super::raster::RasterImage;
use super::ImagingError;
use crate::cnn::Tensor3;

pub const DEFAULT_BATCH_SIZE: usize = 16;

pub trait ImageLoader {
    fn load(&self, path: &Path) -> Result<RasterImage, ImagingError>;
}

/// Reads images from disk, resolving relative manifest paths against `root`.
#[derive(Debug, Clone, Default)]
pub struct FsLoader {
    pub root: Option<PathBuf>,
}

impl ImageLoader for FsLoader {
    fn load(&self, path: &Path) -> Result<RasterImage, ImagingError> {
        match &self.root {
            Some(root) if path.is_relative() => RasterImage::load(&root.join(path)),
            _ => RasterImage::load(path),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub batch_size: usize,
    /// `None` or an identity config disables augmentation.
    pub augment: Option<AugmentConfig>,
    /// Splits that get augmented.
    pub augment_splits: Vec<Split>,
    /// Stop at the first unreadable entry instead of reporting and skipping it.
    pub strict: bool,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            batch_size: DEFAULT_BATCH_SIZE,
            augment: None,
            augment_splits: vec![Split::Train],
            strict: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Batch {
    pub tensors: Vec<Tensor3>,
    pub labels: Vec<Label>,
    pub paths: Vec<PathBuf>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct EntryError {
    pub path: PathBuf,
    #[source]
    pub source: ImagingError,
}

/// Streams one epoch of a split in manifest order.
///
/// A failed load is yielded as `Err` in place; in lenient mode the stream
/// then carries on with the next entry, in strict mode it ends.
pub struct BatchIter<'a, L: ImageLoader> {
    entries: Vec<&'a super::manifest::ManifestEntry>,
    pos: usize,
    loader: L,
    cfg: BatchConfig,
    augment: Option<AugmentConfig>,
    rng: ChaCha8Rng,
    pending: Batch,
    done: bool,
}

pub fn batch_iter<'a, L: ImageLoader>(
    manifest: &'a DatasetManifest,
    split: Split,
    loader: L,
    cfg: BatchConfig,
) -> Result<BatchIter<'a, L>, ImagingError> {
    if cfg.batch_size == 0 {
        return Err(ImagingError::Domain("batch size must be positive".into()));
    }
    let entries: Vec<_> = manifest.split(split).collect();
    if entries.is_empty() {
        return Err(ImagingError::Manifest(format!("split `{split}` has no entries")));
    }
    let augment = cfg
        .augment
        .clone()
        .filter(|a| !a.is_identity() && cfg.augment_splits.contains(&split));
    if let Some(a) = &augment {
        a.validate()?;
    }
    let seed = augment.as_ref().map_or(0, |a| a.seed);
    Ok(BatchIter {
        entries,
        pos: 0,
        loader,
        augment,
        rng: ChaCha8Rng::seed_from_u64(seed),
        pending: Batch {
            tensors: Vec::with_capacity(cfg.batch_size),
            labels: Vec::new(),
            paths: Vec::new(),
        },
        cfg,
        done: false,
    })
}

impl<L: ImageLoader> BatchIter<'_, L> {
    fn take_pending(&mut self) -> Batch {
        std::mem::replace(
            &mut self.pending,
            Batch {
                tensors: Vec::with_capacity(self.cfg.batch_size),
                labels: Vec::new(),
                paths: Vec::new(),
            },
        )
    }
}

impl<L: ImageLoader> Iterator for BatchIter<'_, L> {
    type Item = Result<Batch, EntryError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        while self.pos < self.entries.len() {
            let entry = self.entries[self.pos];
            self.pos += 1;
            match self.loader.load(&entry.path) {
                Ok(img) => {
                    let img = match &self.augment {
                        Some(a) => augment(&img, a, &mut self.rng),
                        None => img,
                    };
                    self.pending.tensors.push(img.to_tensor());
                    self.pending.labels.push(entry.label);
                    self.pending.paths.push(entry.path.clone());
                    if self.pending.len() == self.cfg.batch_size {
                        return Some(Ok(self.take_pending()));
                    }
                }
                Err(source) => {
                    if self.cfg.strict {
                        self.done = true;
                    }
                    return Some(Err(EntryError {
                        path: entry.path.clone(),
                        source,
                    }));
                }
            }
        }
        self.done = true;
        (!self.pending.is_empty()).then(|| Ok(self.take_pending()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::manifest::ManifestEntry;

    struct Synthetic;

    impl ImageLoader for Synthetic {
        fn load(&self, path: &Path) -> Result<RasterImage, ImagingError> {
            let name = path.to_string_lossy();
            if name.contains("broken") {
                return Err(ImagingError::Decode {
                    path: path.to_path_buf(),
                    message: "corrupt".into(),
                });
            }
            let v = name.len() as u8;
            Ok(RasterImage::filled(4, 4, [v, v, v]))
        }
    }

    fn manifest(n: usize, broken: &[usize]) -> DatasetManifest {
        DatasetManifest::new(
            (0..n)
                .map(|i| ManifestEntry {
                    path: PathBuf::from(if broken.contains(&i) {
                        format!("broken{i:03}")
                    } else {
                        format!("img{i:03}")
                    }),
                    label: if i % 2 == 0 { Label::Wildfire } else { Label::NoWildfire },
                    split: Split::Train,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn sizes_16_16_1() {
        let m = manifest(33, &[]);
        let sizes: Vec<_> = batch_iter(&m, Split::Train, Synthetic, BatchConfig::default())
            .unwrap()
            .map(|b| b.unwrap().len())
            .collect();
        assert_eq!(sizes, vec![16, 16, 1]);
    }

    #[test]
    fn lenient_and_strict() {
        let m = manifest(20, &[3]);
        let items: Vec<_> = batch_iter(&m, Split::Train, Synthetic, BatchConfig::default())
            .unwrap()
            .collect();
        assert_eq!(items.len(), 3);
        assert!(items[0].is_err());
        let loaded: usize = items.iter().filter_map(|b| b.as_ref().ok()).map(Batch::len).sum();
        assert_eq!(loaded, 19);

        let strict = BatchConfig {
            strict: true,
            ..BatchConfig::default()
        };
        let items: Vec<_> = batch_iter(&m, Split::Train, Synthetic, strict).unwrap().collect();
        assert_eq!(items.len(), 1);
    }

    #[test]
    fn empty_split_rejected() {
        let m = manifest(4, &[]);
        assert!(batch_iter(&m, Split::Test, Synthetic, BatchConfig::default()).is_err());
    }

    #[test]
    fn augmentation_only_on_configured_splits() {
        let m = manifest(3, &[]);
        let cfg = BatchConfig {
            augment: Some(AugmentConfig::training(1)),
            augment_splits: vec![Split::Val],
            ..BatchConfig::default()
        };
        let b = batch_iter(&m, Split::Train, Synthetic, cfg).unwrap().next().unwrap().unwrap();
        let direct = Synthetic.load(Path::new("img000")).unwrap().to_tensor();
        assert_eq!(b.tensors[0], direct);
    }
}
