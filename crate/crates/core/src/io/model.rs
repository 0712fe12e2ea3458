//! Text model format.
//!
//! ```text
//! usdmnn-model v1
//! depth 2
//! layer 1 side 3 points -1,0 0,-1 0,0 0,1 1,0
//! table 1 8000e0f0
//! layer 2 side 3 points 0,0
//! table 2 2
//! ```
//!
//! Points are listed in increasing `(row, col)` order, which is the bit
//! order of pattern indices. Tables use little-endian lowercase hex (see
//! [`TruthTable::to_hex`]). Every `NetworkParams` has exactly one encoding.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lattice::{Layer, NetworkParams, PixelOffset, TruthTable, Window};

pub const MODEL_MAGIC: &str = "usdmnn-model";
pub const MODEL_VERSION: &str = "v1";

pub fn encode_model(params: &NetworkParams) -> String {
    let mut out = format!("{MODEL_MAGIC} {MODEL_VERSION}\ndepth {}\n", params.depth());
    for (i, layer) in params.layers().iter().enumerate() {
        let w = layer.window();
        let _ = write!(out, "layer {} side {} points", i + 1, w.side());
        for p in w.points() {
            let _ = write!(out, " {},{}", p.row, p.col);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "table {} {}", i + 1, layer.table().to_hex());
    }
    out
}

fn parse_point(s: &str) -> Option<PixelOffset> {
    let (r, c) = s.split_once(',')?;
    Some(PixelOffset::new(r.parse().ok()?, c.parse().ok()?))
}

pub fn decode_model(text: &str, path: &Path) -> Result<NetworkParams> {
    let bad = |msg: String| Error::format(path, msg);
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::format(path, format!("truncated: expected {what}")))
    };

    let (_, header) = next("header")?;
    match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        [MODEL_MAGIC, MODEL_VERSION] => {}
        [MODEL_MAGIC, v] => return Err(bad(format!("unsupported model version {v}"))),
        _ => return Err(bad("not a model file".into())),
    }
    let (n, line) = next("depth")?;
    let depth: usize = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["depth", d] => d
            .parse()
            .map_err(|_| bad(format!("line {n}: bad depth {d:?}")))?,
        _ => return Err(bad(format!("line {n}: expected depth"))),
    };
    if depth == 0 {
        return Err(bad("depth must be at least 1".into()));
    }

    let mut layers = Vec::with_capacity(depth);
    for i in 1..=depth {
        let (n, line) = next("layer")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let window = match fields.as_slice() {
            ["layer", idx, "side", side, "points", pts @ ..] if *idx == i.to_string() => {
                let side: usize = side
                    .parse()
                    .map_err(|_| bad(format!("line {n}: bad side {side:?}")))?;
                let points = pts
                    .iter()
                    .map(|s| {
                        parse_point(s).ok_or_else(|| bad(format!("line {n}: bad point {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if points.windows(2).any(|p| p[0] >= p[1]) {
                    return Err(bad(format!("line {n}: points must be strictly increasing")));
                }
                Window::new(side, points).map_err(|e| bad(format!("line {n}: {e}")))?
            }
            _ => return Err(bad(format!("line {n}: expected layer {i}"))),
        };
        let (n, line) = next("table")?;
        let table = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["table", idx, hex] if *idx == i.to_string() => TruthTable::from_hex(window.len(), hex)
                .map_err(|e| bad(format!("line {n}: {e}")))?,
            _ => return Err(bad(format!("line {n}: expected table {i}"))),
        };
        layers.push(Layer::new(window, table).map_err(|e| bad(e.to_string()))?);
    }
    if let Some((n, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(bad(format!(
            "line {n}: unexpected trailing content {extra:?}"
        )));
    }
    NetworkParams::new(layers).map_err(|e| bad(e.to_string()))
}

pub fn save_model(params: &NetworkParams, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_model(params)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<NetworkParams> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode_model(&text, path)
}
