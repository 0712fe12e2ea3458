//! Windows, truth tables, and the two Boolean lattices searched during
//! training: characteristic functions with fixed windows, and the window
//! vectors themselves.
//!
//! Two parameter vectors are neighbors in the function lattice when they
//! differ in exactly one truth-table entry of one layer. Two window vectors
//! are neighbors when one window differs by a single added or removed point
//! and both remain valid (connected, nonempty, inside `F_d`).

mod table;
mod window;

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::index;
use rand::Rng;

pub use table::{random_truth_table, TruthTable};
pub use window::{
    is_connected, minkowski_sum, minkowski_sum_sets, PixelOffset, Window, MAX_WINDOW_POINTS,
};

use crate::error::{Error, Result};

/// One W-operator: a window and its characteristic function.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Layer {
    window: Window,
    table: TruthTable,
}

impl Layer {
    pub fn new(window: Window, table: TruthTable) -> Result<Self> {
        if table.vars() != window.len() {
            return Err(Error::InvalidParameter(format!(
                "table has 2^{} entries but the window has {} points",
                table.vars(),
                window.len()
            )));
        }
        Ok(Self { window, table })
    }

    /// `{(0,0)}` with table `[0, 1]`.
    pub fn identity(side: usize) -> Result<Self> {
        Layer::new(
            Window::origin(side)?,
            TruthTable::from_bits(&[false, true])?,
        )
    }

    /// Erosion by the window: 1 only on the full pattern.
    pub fn erosion(window: Window) -> Self {
        let full = (1usize << window.len()) - 1;
        let table = TruthTable::from_fn(window.len(), |p| p == full).expect("bounded window");
        Self { window, table }
    }

    /// `x -> 1` iff some `x + w` is set; 0 only on the empty pattern.
    pub fn dilation(window: Window) -> Self {
        let table = TruthTable::from_fn(window.len(), |p| p != 0).expect("bounded window");
        Self { window, table }
    }

    pub fn constant(window: Window, value: bool) -> Self {
        let table = TruthTable::from_fn(window.len(), |_| value).expect("bounded window");
        Self { window, table }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    pub(crate) fn table_mut(&mut self) -> &mut TruthTable {
        &mut self.table
    }
}

/// A sequential network: layer 0 is applied first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetworkParams {
    layers: Vec<Layer>,
}

impl NetworkParams {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParameter(
                "network needs at least one layer".into(),
            ));
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn windows(&self) -> WindowVector {
        WindowVector {
            windows: self.layers.iter().map(|l| l.window.clone()).collect(),
        }
    }

    pub(crate) fn layer_mut(&mut self, i: usize) -> &mut Layer {
        &mut self.layers[i]
    }
}

/// The windows of every layer, in layer order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WindowVector {
    windows: Vec<Window>,
}

impl WindowVector {
    pub fn new(windows: Vec<Window>) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::InvalidParameter("window vector is empty".into()));
        }
        Ok(Self { windows })
    }

    /// `depth` copies of the five point cross.
    pub fn crosses(depth: usize, side: usize) -> Result<Self> {
        Self::new(vec![Window::cross(side)?; depth])
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Canonical key, one [`Window::key`] per layer joined by `|`.
    pub fn key(&self) -> String {
        self.windows
            .iter()
            .map(Window::key)
            .collect::<Vec<_>>()
            .join("|")
    }

    /// Index of the single layer where `self` and `other` differ, if exactly one does.
    pub fn changed_layer(&self, other: &WindowVector) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        let mut diff = (0..self.len()).filter(|&i| self.windows[i] != other.windows[i]);
        match (diff.next(), diff.next()) {
            (Some(i), None) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for WindowVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// A single distance-1 move in either lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NeighborDescriptor {
    FunctionFlip { layer: usize, pattern: usize },
    WindowAdd { layer: usize, point: PixelOffset },
    WindowRemove { layer: usize, point: PixelOffset },
}

impl NeighborDescriptor {
    pub fn layer(&self) -> usize {
        match *self {
            NeighborDescriptor::FunctionFlip { layer, .. }
            | NeighborDescriptor::WindowAdd { layer, .. }
            | NeighborDescriptor::WindowRemove { layer, .. } => layer,
        }
    }
}

/// Effective window of the composed operator: the Minkowski sum of all
/// layer windows.
pub fn network_window(params: &NetworkParams) -> BTreeSet<PixelOffset> {
    params
        .layers
        .iter()
        .fold(BTreeSet::from([PixelOffset::ORIGIN]), |acc, l| {
            minkowski_sum_sets(&acc, &l.window.point_set())
        })
}

/// `sum_i 2^|W_i|`.
pub fn function_neighborhood_size(params: &NetworkParams) -> usize {
    params.layers.iter().map(|l| l.table.len()).sum()
}

fn flip_at(params: &NetworkParams, mut flat: usize) -> NeighborDescriptor {
    for (layer, l) in params.layers.iter().enumerate() {
        if flat < l.table.len() {
            return NeighborDescriptor::FunctionFlip {
                layer,
                pattern: flat,
            };
        }
        flat -= l.table.len();
    }
    unreachable!("flat index beyond neighborhood")
}

/// Draws `n` distinct flips uniformly from the whole function neighborhood.
/// Returns every flip, in layer then pattern order, when `n` covers it.
pub fn sample_function_neighbors<R: Rng + ?Sized>(
    params: &NetworkParams,
    n: usize,
    rng: &mut R,
) -> Vec<NeighborDescriptor> {
    let total = function_neighborhood_size(params);
    if n >= total {
        return (0..total).map(|i| flip_at(params, i)).collect();
    }
    index::sample(rng, total, n)
        .into_iter()
        .map(|i| flip_at(params, i))
        .collect()
}

pub fn apply_function_flip(
    params: &NetworkParams,
    d: &NeighborDescriptor,
) -> Result<NetworkParams> {
    let NeighborDescriptor::FunctionFlip { layer, pattern } = *d else {
        return Err(Error::InvalidDescriptor(format!(
            "{d:?} is not a function flip"
        )));
    };
    let Some(l) = params.layers.get(layer) else {
        return Err(Error::InvalidDescriptor(format!(
            "layer {layer} out of range for depth {}",
            params.depth()
        )));
    };
    if pattern >= l.table.len() {
        return Err(Error::InvalidDescriptor(format!(
            "pattern {pattern} out of range for a table of {} entries",
            l.table.len()
        )));
    }
    let mut out = params.clone();
    out.layers[layer].table.flip(pattern);
    Ok(out)
}

/// Every valid single-point edit of the window vector, by layer, then over
/// `F_d` in row-major order.
pub fn window_moves(wv: &WindowVector) -> Vec<NeighborDescriptor> {
    let mut moves = Vec::new();
    for (layer, w) in wv.windows.iter().enumerate() {
        for p in w.frame_points() {
            if w.contains(p) {
                if w.without_point(p).is_ok() {
                    moves.push(NeighborDescriptor::WindowRemove { layer, point: p });
                }
            } else if w.with_point(p).is_ok() {
                moves.push(NeighborDescriptor::WindowAdd { layer, point: p });
            }
        }
    }
    moves
}

pub fn apply_window_move(wv: &WindowVector, d: &NeighborDescriptor) -> Result<WindowVector> {
    let (layer, edited) =
        match *d {
            NeighborDescriptor::WindowAdd { layer, point } => {
                let w = wv.windows.get(layer).ok_or_else(|| {
                    Error::InvalidDescriptor(format!("layer {layer} out of range"))
                })?;
                (layer, w.with_point(point))
            }
            NeighborDescriptor::WindowRemove { layer, point } => {
                let w = wv.windows.get(layer).ok_or_else(|| {
                    Error::InvalidDescriptor(format!("layer {layer} out of range"))
                })?;
                (layer, w.without_point(point))
            }
            NeighborDescriptor::FunctionFlip { .. } => {
                return Err(Error::InvalidDescriptor(format!(
                    "{d:?} is not a window move"
                )))
            }
        };
    let edited = edited.map_err(|e| Error::InvalidDescriptor(e.to_string()))?;
    let mut out = wv.clone();
    out.windows[layer] = edited;
    Ok(out)
}

/// All valid window vectors at distance 1.
pub fn window_neighbors(wv: &WindowVector) -> Vec<WindowVector> {
    window_moves(wv)
        .iter()
        .map(|d| apply_window_move(wv, d).expect("enumerated moves are valid"))
        .collect()
}

/// Uniform sample without replacement from [`window_neighbors`]; the full
/// list when `n` covers it.
pub fn sample_window_neighbors<R: Rng + ?Sized>(
    wv: &WindowVector,
    n: usize,
    rng: &mut R,
) -> Vec<WindowVector> {
    let all = window_neighbors(wv);
    if n >= all.len() {
        return all;
    }
    index::sample(rng, all.len(), n)
        .into_iter()
        .map(|i| all[i].clone())
        .collect()
}
