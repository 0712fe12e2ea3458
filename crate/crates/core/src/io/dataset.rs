//! Dataset manifests and the synthetic noisy-digit boundary generator.
//!
//! The manifest is a text file with a `[train]` and a `[validation]`
//! section, each listing `input<TAB>target` paths relative to the
//! manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;

use super::image_io::{load_image, save_image};
use crate::error::{Error, Result};
use crate::eval::reference_erosion;
use crate::image::BinaryImage;
use crate::lattice::Window;
use crate::loss::{Role, SamplePair, SampleSet};
use crate::rng::{derive_seed, stream, Stream};

pub const MANIFEST_NAME: &str = "manifest.txt";

/// 5x7 digit glyphs, one string per row.
const DIGITS: [[&str; 7]; 10] = [
    [
        "01110", "10001", "10011", "10101", "11001", "10001", "01110",
    ],
    [
        "00100", "01100", "00100", "00100", "00100", "00100", "01110",
    ],
    [
        "01110", "10001", "00001", "00010", "00100", "01000", "11111",
    ],
    [
        "11111", "00010", "00100", "00010", "00001", "10001", "01110",
    ],
    [
        "00010", "00110", "01010", "10010", "11111", "00010", "00010",
    ],
    [
        "11111", "10000", "11110", "00001", "00001", "10001", "01110",
    ],
    [
        "00110", "01000", "10000", "11110", "10001", "10001", "01110",
    ],
    [
        "11111", "00001", "00010", "00100", "01000", "01000", "01000",
    ],
    [
        "01110", "10001", "10001", "01110", "10001", "10001", "01110",
    ],
    [
        "01110", "10001", "10001", "01111", "00001", "00010", "01100",
    ],
];
const GLYPH_ROWS: usize = 7;
const GLYPH_COLS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    /// Side of the square frame.
    pub side: usize,
    /// Digits drawn in turn, sample `i` using `digits[i % digits.len()]`.
    pub digits: Vec<u8>,
    pub train: usize,
    pub validation: usize,
    /// Probability each input pixel is flipped.
    pub noise: f64,
    /// Each glyph cell becomes a square block of a side drawn from this range.
    pub min_scale: usize,
    pub max_scale: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            side: 56,
            digits: (0..10).collect(),
            train: 10,
            validation: 10,
            noise: 0.05,
            min_scale: 5,
            max_scale: 6,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidConfig(m));
        if !(0.0..0.5).contains(&self.noise) {
            return invalid(format!("noise {} outside [0, 0.5)", self.noise));
        }
        if self.digits.is_empty() || self.digits.iter().any(|&d| d > 9) {
            return invalid("digits must be a nonempty list of 0..=9".into());
        }
        if self.train == 0 || self.validation == 0 {
            return invalid("both roles need at least one sample".into());
        }
        if self.min_scale == 0 || self.min_scale > self.max_scale {
            return invalid(format!(
                "bad scale range {}..={}",
                self.min_scale, self.max_scale
            ));
        }
        // one pixel of background margin on every side
        if GLYPH_ROWS * self.max_scale + 2 > self.side {
            return invalid(format!(
                "frame of side {} is too small for glyphs at scale {}",
                self.side, self.max_scale
            ));
        }
        Ok(())
    }
}

/// Rasterizes `digit` at `scale` with its top-left corner at `(top, left)`.
pub fn render_digit(side: usize, digit: u8, scale: usize, top: usize, left: usize) -> BinaryImage {
    let glyph = &DIGITS[digit as usize];
    BinaryImage::from_fn(side, side, |r, c| {
        if r < top || c < left {
            return false;
        }
        let (gr, gc) = ((r - top) / scale, (c - left) / scale);
        gr < GLYPH_ROWS && gc < GLYPH_COLS && glyph[gr].as_bytes()[gc] == b'1'
    })
}

/// Pixels of `x` removed by erosion with the 3x3 cross.
pub fn inner_boundary(x: &BinaryImage) -> BinaryImage {
    let cross = Window::cross(3).expect("3 is a valid side");
    x.difference(&reference_erosion(x, cross.points()))
}

pub fn salt_and_pepper<R: Rng + ?Sized>(x: &BinaryImage, p: f64, rng: &mut R) -> BinaryImage {
    let mut out = x.clone();
    for r in 0..x.height() {
        for c in 0..x.width() {
            if rng.gen_bool(p) {
                out.set(r, c, !x.get(r, c));
            }
        }
    }
    out
}

fn generate_role(cfg: &GeneratorConfig, role: Role, count: usize) -> Result<SampleSet> {
    let mut rng = stream(derive_seed(cfg.seed, role.name()), Stream::Init);
    let pairs = (0..count)
        .map(|i| {
            let digit = cfg.digits[i % cfg.digits.len()];
            let scale = rng.gen_range(cfg.min_scale..=cfg.max_scale);
            let top = rng.gen_range(1..=cfg.side - 1 - GLYPH_ROWS * scale);
            let left = rng.gen_range(1..=cfg.side - 1 - GLYPH_COLS * scale);
            let clean = render_digit(cfg.side, digit, scale, top, left);
            let target = inner_boundary(&clean);
            let input = salt_and_pepper(&clean, cfg.noise, &mut rng);
            SamplePair::new(input, target)
        })
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(pairs, role)
}

/// Generates both roles in memory.
pub fn generate_samples(cfg: &GeneratorConfig) -> Result<(SampleSet, SampleSet)> {
    cfg.validate()?;
    Ok((
        generate_role(cfg, Role::Train, cfg.train)?,
        generate_role(cfg, Role::Validation, cfg.validation)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub root: PathBuf,
    /// `(input, target)` paths relative to `root`.
    pub train: Vec<(PathBuf, PathBuf)>,
    pub validation: Vec<(PathBuf, PathBuf)>,
}

impl DatasetManifest {
    pub fn encode(&self) -> String {
        let mut out = String::new();
        for (name, list) in [("train", &self.train), ("validation", &self.validation)] {
            out.push_str(&format!("[{name}]\n"));
            for (x, y) in list {
                out.push_str(&format!("{}\t{}\n", x.display(), y.display()));
            }
        }
        out
    }

    pub fn write(&self) -> Result<PathBuf> {
        let path = self.root.join(MANIFEST_NAME);
        fs::write(&path, self.encode()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    /// Reads a manifest file; `root` becomes its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest = DatasetManifest {
            root: path.parent().map(Path::to_path_buf).unwrap_or_default(),
            train: Vec::new(),
            validation: Vec::new(),
        };
        let mut section: Option<Role> = None;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            match line {
                "[train]" => section = Some(Role::Train),
                "[validation]" => section = Some(Role::Validation),
                _ => {
                    let (x, y) = line.split_once('\t').ok_or_else(|| {
                        Error::format(path, format!("line {}: expected input<TAB>target", n + 1))
                    })?;
                    let entry = (PathBuf::from(x), PathBuf::from(y));
                    match section {
                        Some(Role::Train) => manifest.train.push(entry),
                        Some(Role::Validation) => manifest.validation.push(entry),
                        None => {
                            return Err(Error::format(
                                path,
                                format!("line {}: pair before any role header", n + 1),
                            ))
                        }
                    }
                }
            }
        }
        Ok(manifest)
    }

    fn load_role(&self, list: &[(PathBuf, PathBuf)], role: Role) -> Result<SampleSet> {
        let pairs = list
            .iter()
            .map(|(x, y)| {
                let (xp, yp) = (self.root.join(x), self.root.join(y));
                let input = load_image(&xp)?;
                let target = load_image(&yp)?;
                SamplePair::new(input, target).map_err(|e| Error::format(&xp, e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        SampleSet::new(pairs, role)
    }

    /// Loads `(train, validation)`.
    pub fn load_samples(&self) -> Result<(SampleSet, SampleSet)> {
        Ok((
            self.load_role(&self.train, Role::Train)?,
            self.load_role(&self.validation, Role::Validation)?,
        ))
    }
}

/// Writes a sample set as packed bitmaps plus a manifest under `root`.
pub fn write_dataset(
    root: impl AsRef<Path>,
    train: &SampleSet,
    val: &SampleSet,
) -> Result<DatasetManifest> {
    let root = root.as_ref();
    let mut manifest = DatasetManifest {
        root: root.to_path_buf(),
        train: Vec::new(),
        validation: Vec::new(),
    };
    for set in [train, val] {
        let dir = set.role().name();
        fs::create_dir_all(root.join(dir)).map_err(|e| Error::io(root.join(dir), e))?;
        for (i, pair) in set.pairs().iter().enumerate() {
            let x = PathBuf::from(dir).join(format!("x_{i:03}.pbm"));
            let y = PathBuf::from(dir).join(format!("y_{i:03}.pbm"));
            save_image(&pair.input, root.join(&x))?;
            save_image(&pair.target, root.join(&y))?;
            match set.role() {
                Role::Train => manifest.train.push((x, y)),
                Role::Validation => manifest.validation.push((x, y)),
            }
        }
    }
    manifest.write()?;
    Ok(manifest)
}

/// Generates the synthetic dataset and writes it under `root`.
pub fn generate_dataset(cfg: &GeneratorConfig, root: impl AsRef<Path>) -> Result<DatasetManifest> {
    let (train, val) = generate_samples(cfg)?;
    write_dataset(root, &train, &val)
}
