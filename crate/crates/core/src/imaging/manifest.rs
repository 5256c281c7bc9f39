use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ImagingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    NoWildfire,
    Wildfire,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::NoWildfire, Label::Wildfire];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::NoWildfire => "NoWildfire",
            Label::Wildfire => "Wildfire",
        }
    }

    /// Directory name under the dataset root.
    pub fn dir_name(self) -> &'static str {
        match self {
            Label::NoWildfire => "nowildfire",
            Label::Wildfire => "wildfire",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Label {
    type Err = ImagingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "wildfire" => Ok(Label::Wildfire),
            "nowildfire" => Ok(Label::NoWildfire),
            _ => Err(ImagingError::Manifest(format!("unknown label `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
    Val,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Test, Split::Val];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::Val => "val",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Split {
    type Err = ImagingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            "val" | "validation" => Ok(Split::Val),
            _ => Err(ImagingError::Manifest(format!("unknown split `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: Label,
    pub split: Split,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitFractions {
    pub train: f64,
    pub test: f64,
    pub val: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self {
            train: 0.70,
            test: 0.15,
            val: 0.15,
        }
    }
}

impl SplitFractions {
    pub fn validate(&self) -> Result<(), ImagingError> {
        let all = [self.train, self.test, self.val];
        if all.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(ImagingError::Domain(format!("split fractions {all:?} must lie in [0, 1]")));
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ImagingError::Domain(format!("split fractions sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

// Products like 20·0.15 land a hair below the integer.
fn floor_frac(n: usize, f: f64) -> usize {
    (n as f64 * f + 1e-9).floor() as usize
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetManifest {
    /// Sorted by path.
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(mut entries: Vec<ManifestEntry>) -> Result<Self, ImagingError> {
        entries.sort_by(|a, b| a.path.cmp(&b.path));
        if let Some(w) = entries.windows(2).find(|w| w[0].path == w[1].path) {
            return Err(ImagingError::Manifest(format!("duplicate path {}", w[0].path.display())));
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    pub fn count(&self, split: Option<Split>, label: Option<Label>) -> usize {
        self.entries
            .iter()
            .filter(|e| split.is_none_or(|s| e.split == s) && label.is_none_or(|l| e.label == l))
            .count()
    }

    pub fn split_sizes(&self) -> [usize; 3] {
        Split::ALL.map(|s| self.count(Some(s), None))
    }

    pub fn to_csv(&self) -> Result<String, ImagingError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["path", "label", "split"]).map_err(csv_err)?;
        for e in &self.entries {
            w.write_record([&*e.path.to_string_lossy(), e.label.as_str(), e.split.as_str()])
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| ImagingError::Manifest(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self, ImagingError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let headers = r.headers().map_err(csv_err)?.clone();
        if headers.iter().collect::<Vec<_>>() != ["path", "label", "split"] {
            return Err(ImagingError::Manifest(format!(
                "expected header `path,label,split`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for record in r.records() {
            let record = record.map_err(csv_err)?;
            entries.push(ManifestEntry {
                path: PathBuf::from(&record[0]),
                label: record[1].parse()?,
                split: record[2].parse()?,
            });
        }
        Self::new(entries)
    }
}

fn csv_err(e: csv::Error) -> ImagingError {
    ImagingError::Manifest(e.to_string())
}

/// Assigns splits class by class: each class is sorted by path, shuffled
/// with `seed`, then cut into contiguous train / test / val runs.
///
/// Overall test and val sizes are `⌊N·f⌋` and train takes the rest. Each
/// class gets `⌊n_c·f⌋` test and val items, and the shortfall against the
/// overall target goes to the classes with the largest fractional parts.
pub fn split_dataset(
    entries: &[(PathBuf, Label)],
    fractions: SplitFractions,
    seed: u64,
) -> Result<DatasetManifest, ImagingError> {
    fractions.validate()?;
    if entries.is_empty() {
        return Err(ImagingError::Domain("cannot split an empty entry list".into()));
    }
    let mut seen = BTreeSet::new();
    for (p, _) in entries {
        if !seen.insert(p) {
            return Err(ImagingError::Manifest(format!("duplicate path {}", p.display())));
        }
    }

    let classes: Vec<(Label, Vec<&PathBuf>)> = Label::ALL
        .iter()
        .map(|&l| {
            let mut paths: Vec<_> = entries.iter().filter(|(_, el)| *el == l).map(|(p, _)| p).collect();
            paths.sort();
            (l, paths)
        })
        .filter(|(_, p)| !p.is_empty())
        .collect();
    let n = entries.len();

    let mut test = allocate(&classes, n, fractions.test, &vec![0; classes.len()]);
    let val = allocate(&classes, n, fractions.val, &test);
    // Guard for degenerate fractions where test + val overruns a class.
    for (i, (_, paths)) in classes.iter().enumerate() {
        test[i] = test[i].min(paths.len() - val[i].min(paths.len()));
    }

    let mut out = Vec::with_capacity(n);
    for (i, (label, paths)) in classes.iter().enumerate() {
        let mut order = paths.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (*label as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        order.shuffle(&mut rng);
        let n_train = paths.len() - test[i] - val[i];
        for (j, p) in order.into_iter().enumerate() {
            let split = if j < n_train {
                Split::Train
            } else if j < n_train + test[i] {
                Split::Test
            } else {
                Split::Val
            };
            out.push(ManifestEntry {
                path: p.clone(),
                label: *label,
                split,
            });
        }
    }
    DatasetManifest::new(out)
}

fn allocate(classes: &[(Label, Vec<&PathBuf>)], n: usize, f: f64, taken: &[usize]) -> Vec<usize> {
    let mut counts: Vec<usize> = classes.iter().map(|(_, p)| floor_frac(p.len(), f)).collect();
    let target = floor_frac(n, f);
    let mut deficit = target.saturating_sub(counts.iter().sum());
    let mut order: Vec<usize> = (0..classes.len()).collect();
    let frac = |i: usize| classes[i].1.len() as f64 * f - counts[i] as f64;
    order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(a.cmp(&b)));
    for i in order {
        if deficit == 0 {
            break;
        }
        if counts[i] + taken[i] < classes[i].1.len() {
            counts[i] += 1;
            deficit -= 1;
        }
    }
    counts
}

/// Lists `*.png` files under `root/wildfire` and `root/nowildfire`
/// (directory names matched case-insensitively), sorted by path.
pub fn scan_directory(root: &Path) -> Result<Vec<(PathBuf, Label)>, ImagingError> {
    let io = |path: &Path, e: std::io::Error| ImagingError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let mut out = Vec::new();
    for dir in std::fs::read_dir(root).map_err(|e| io(root, e))? {
        let dir = dir.map_err(|e| io(root, e))?;
        let Ok(label) = dir.file_name().to_string_lossy().parse::<Label>() else {
            continue;
        };
        if !dir.path().is_dir() {
            continue;
        }
        for file in std::fs::read_dir(dir.path()).map_err(|e| io(&dir.path(), e))? {
            let path = file.map_err(|e| io(&dir.path(), e))?.path();
            let is_png = path
                .extension()
                .is_some_and(|x| x.eq_ignore_ascii_case("png"));
            if is_png && path.is_file() {
                out.push((path, label));
            }
        }
    }
    if out.is_empty() {
        return Err(ImagingError::Manifest(format!(
            "no images found under {}/{{wildfire,nowildfire}}",
            root.display()
        )));
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(wild: usize, none: usize) -> Vec<(PathBuf, Label)> {
        (0..wild)
            .map(|i| (PathBuf::from(format!("wildfire/{i:05}.png")), Label::Wildfire))
            .chain((0..none).map(|i| (PathBuf::from(format!("nowildfire/{i:05}.png")), Label::NoWildfire)))
            .collect()
    }

    #[test]
    fn full_dataset_sizes() {
        let m = split_dataset(&synthetic(22710, 20140), SplitFractions::default(), 7).unwrap();
        assert_eq!(m.split_sizes(), [29996, 6427, 6427]);
        assert_eq!(m.count(None, Some(Label::Wildfire)), 22710);
    }

    #[test]
    fn ten_items() {
        let m = split_dataset(&synthetic(10, 0), SplitFractions::default(), 0).unwrap();
        assert_eq!(m.split_sizes(), [8, 1, 1]);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let e = synthetic(50, 40);
        let a = split_dataset(&e, SplitFractions::default(), 3).unwrap();
        assert_eq!(a, split_dataset(&e, SplitFractions::default(), 3).unwrap());
        assert_ne!(a, split_dataset(&e, SplitFractions::default(), 4).unwrap());
    }

    #[test]
    fn errors() {
        assert!(split_dataset(&[], SplitFractions::default(), 0).is_err());
        let mut e = synthetic(3, 0);
        e.push(e[0].clone());
        assert!(split_dataset(&e, SplitFractions::default(), 0).is_err());
        let bad = SplitFractions {
            train: 0.5,
            test: 0.1,
            val: 0.1,
        };
        assert!(split_dataset(&synthetic(3, 3), bad, 0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let m = split_dataset(&synthetic(5, 4), SplitFractions::default(), 1).unwrap();
        let text = m.to_csv().unwrap();
        assert!(text.starts_with("path,label,split\n"));
        assert_eq!(DatasetManifest::from_csv(&text).unwrap(), m);
    }
}
