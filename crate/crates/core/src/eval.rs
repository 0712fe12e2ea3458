//! Applying W-operators and layer chains to images.
//!
//! A layer with window `W` and table `f` maps `X` to
//! `{x : f(X_{-x} ∩ W) = 1}`: the output at `x` is the table entry whose
//! pattern index has bit `j` set iff `x + w_j` is foreground.

use crate::error::{Error, Result};
use crate::image::BinaryImage;
use crate::lattice::{Layer, NetworkParams, PixelOffset, TruthTable, Window};

/// Per-layer outputs: `stages[0]` is the input, `stages[i]` the output of layer `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerTrace {
    pub stages: Vec<BinaryImage>,
}

impl LayerTrace {
    pub fn output(&self) -> &BinaryImage {
        self.stages.last().expect("trace holds at least the input")
    }
}

/// Pattern index observed through `window` at `(row, col)`.
pub fn local_pattern(image: &BinaryImage, window: &Window, row: i64, col: i64) -> Result<usize> {
    if !image.in_frame(row, col) {
        return Err(Error::OutOfBounds {
            row,
            col,
            height: image.height(),
            width: image.width(),
        });
    }
    Ok(window
        .points()
        .iter()
        .enumerate()
        .filter(|(_, w)| image.get_or_zero(row + w.row as i64, col + w.col as i64))
        .fold(0usize, |acc, (j, _)| acc | (1 << j)))
}

/// Zero-padded copy of an image with precomputed linear offsets for a
/// window, so pattern extraction is branch-free.
struct Padded {
    stride: usize,
    margin: usize,
    data: Vec<u8>,
}

impl Padded {
    fn new(image: &BinaryImage, margin: usize) -> Self {
        let stride = image.width() + 2 * margin;
        let mut data = vec![0u8; stride * (image.height() + 2 * margin)];
        for r in 0..image.height() {
            let base = (r + margin) * stride + margin;
            for c in 0..image.width() {
                data[base + c] = u8::from(image.get(r, c));
            }
        }
        Self {
            stride,
            margin,
            data,
        }
    }

    fn offsets(&self, window: &Window) -> Vec<isize> {
        window
            .points()
            .iter()
            .map(|p| p.row as isize * self.stride as isize + p.col as isize)
            .collect()
    }
}

/// Applies one W-operator. The output frame equals the input frame.
pub fn apply_layer(layer: &Layer, image: &BinaryImage) -> BinaryImage {
    let window = layer.window();
    let table = layer.table();
    let padded = Padded::new(image, window.radius() as usize);
    let offsets = padded.offsets(window);
    let (h, w) = image.dims();
    let mut out = Vec::with_capacity(h * w);
    for r in 0..h {
        let row_base = (r + padded.margin) * padded.stride + padded.margin;
        for c in 0..w {
            let center = (row_base + c) as isize;
            let mut pattern = 0usize;
            for (j, &off) in offsets.iter().enumerate() {
                pattern |= (padded.data[(center + off) as usize] as usize) << j;
            }
            out.push(table.get(pattern));
        }
    }
    BinaryImage::from_vec(h, w, out).expect("dimensions preserved")
}

/// `ψ_n ∘ ⋯ ∘ ψ_1` applied to `image`.
pub fn forward(params: &NetworkParams, image: &BinaryImage) -> BinaryImage {
    let mut layers = params.layers().iter();
    let first = layers.next().expect("network has at least one layer");
    layers.fold(apply_layer(first, image), |x, l| apply_layer(l, &x))
}

pub fn forward_trace(params: &NetworkParams, image: &BinaryImage) -> LayerTrace {
    let mut stages = Vec::with_capacity(params.depth() + 1);
    stages.push(image.clone());
    for l in params.layers() {
        let next = apply_layer(l, stages.last().unwrap());
        stages.push(next);
    }
    LayerTrace { stages }
}

/// Recovers the characteristic function of `op` on `window`: for each
/// pattern, place the corresponding configuration on a frame centered on
/// the origin and read the output there. `op` must be translation invariant
/// and locally defined within `window`.
pub fn char_fn_of(op: impl Fn(&BinaryImage) -> BinaryImage, window: &Window) -> TruthTable {
    let reach = window
        .points()
        .iter()
        .map(|p| p.chebyshev(PixelOffset::ORIGIN))
        .max()
        .unwrap_or(0)
        .max(1) as usize;
    let side = 2 * reach + 1;
    TruthTable::from_fn(window.len(), |pattern| {
        let mut x = BinaryImage::new(side, side);
        for (j, w) in window.points().iter().enumerate() {
            if pattern >> j & 1 == 1 {
                x.set(
                    (reach as i32 + w.row) as usize,
                    (reach as i32 + w.col) as usize,
                    true,
                );
            }
        }
        op(&x).get(reach, reach)
    })
    .expect("bounded window")
}

/// Output at `x` is 1 iff `x + s` is foreground for every `s` in `se`.
pub fn reference_erosion(image: &BinaryImage, se: &[PixelOffset]) -> BinaryImage {
    BinaryImage::from_fn(image.height(), image.width(), |r, c| {
        se.iter()
            .all(|s| image.get_or_zero(r as i64 + s.row as i64, c as i64 + s.col as i64))
    })
}

/// Output at `x` is 1 iff `x + s` is foreground for some `s` in `se`.
/// This is the classical dilation by the reflection of `se`.
pub fn reference_dilation(image: &BinaryImage, se: &[PixelOffset]) -> BinaryImage {
    BinaryImage::from_fn(image.height(), image.width(), |r, c| {
        se.iter()
            .any(|s| image.get_or_zero(r as i64 + s.row as i64, c as i64 + s.col as i64))
    })
}
