//! Brute-force references for checking the main evaluation and training
//! paths.
//!
//! Nothing here goes through [`crate::eval`]: layers are applied by
//! building the translated window intersection `X_{-x} ∩ W` as an explicit
//! set per pixel, and the table is then consulted on that set.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::BinaryImage;
use crate::lattice::{Layer, NeighborDescriptor, NetworkParams, PixelOffset, TruthTable, Window};
use crate::loss::{iou_error, iou_error_from_counts, mean_of, SamplePair, SampleSet};

/// Largest window [`exhaustive_single_layer`] accepts.
pub const MAX_EXHAUSTIVE_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    /// Every table attaining the minimum, in increasing order of the
    /// table read as an integer.
    pub best_tables: Vec<TruthTable>,
    pub min_loss: f64,
    pub tables_examined: usize,
}

/// Foreground set of an image as absolute coordinates.
fn foreground(image: &BinaryImage) -> BTreeSet<(i64, i64)> {
    (0..image.height())
        .flat_map(|r| (0..image.width()).map(move |c| (r, c)))
        .filter(|&(r, c)| image.get(r, c))
        .map(|(r, c)| (r as i64, c as i64))
        .collect()
}

/// `X_{-x} ∩ W` as a subset of window points.
fn translated_intersection(
    fg: &BTreeSet<(i64, i64)>,
    x: (i64, i64),
    window: &Window,
) -> BTreeSet<PixelOffset> {
    window
        .points()
        .iter()
        .copied()
        .filter(|w| fg.contains(&(x.0 + w.row as i64, x.1 + w.col as i64)))
        .collect()
}

/// Looks up the table for a subset of the window by scanning the point list.
fn table_at(table: &TruthTable, window: &Window, subset: &BTreeSet<PixelOffset>) -> bool {
    let mut index = 0usize;
    for (j, w) in window.points().iter().enumerate() {
        if subset.contains(w) {
            index += 1 << j;
        }
    }
    table.get(index)
}

/// `{x in frame : f(X_{-x} ∩ W) = 1}`, evaluated per pixel from sets.
pub fn naive_apply(layer: &Layer, image: &BinaryImage) -> BinaryImage {
    let fg = foreground(image);
    BinaryImage::from_fn(image.height(), image.width(), |r, c| {
        let subset = translated_intersection(&fg, (r as i64, c as i64), layer.window());
        table_at(layer.table(), layer.window(), &subset)
    })
}

pub fn naive_forward(params: &NetworkParams, image: &BinaryImage) -> BinaryImage {
    params
        .layers()
        .iter()
        .fold(image.clone(), |x, l| naive_apply(l, &x))
}

/// Mean IoU error with every image evaluated by [`naive_forward`].
pub fn naive_mean_loss<'a>(
    params: &NetworkParams,
    pairs: impl IntoIterator<Item = &'a SamplePair>,
) -> Result<f64> {
    let errors = pairs
        .into_iter()
        .map(|p| iou_error(&naive_forward(params, &p.input), &p.target))
        .collect::<Result<Vec<_>>>()?;
    if errors.is_empty() {
        return Err(Error::InvalidSample("loss over an empty sample".into()));
    }
    Ok(mean_of(errors))
}

/// Per-pattern pixel counts for one pair: how many pixels see pattern `p`
/// and are foreground in the target, and how many are not.
struct PatternCounts {
    in_target: Vec<usize>,
    off_target: Vec<usize>,
    target_size: usize,
}

fn pattern_counts(window: &Window, pair: &SamplePair) -> PatternCounts {
    let len = 1usize << window.len();
    let mut counts = PatternCounts {
        in_target: vec![0; len],
        off_target: vec![0; len],
        target_size: pair.target.count_ones(),
    };
    let fg = foreground(&pair.input);
    for r in 0..pair.input.height() {
        for c in 0..pair.input.width() {
            let subset = translated_intersection(&fg, (r as i64, c as i64), window);
            let p = window
                .points()
                .iter()
                .enumerate()
                .filter(|(_, w)| subset.contains(w))
                .fold(0usize, |acc, (j, _)| acc | (1 << j));
            if pair.target.get(r, c) {
                counts.in_target[p] += 1;
            } else {
                counts.off_target[p] += 1;
            }
        }
    }
    counts
}

/// Global minimum of the mean training loss over every truth table on
/// `window`, for a single-layer network.
pub fn exhaustive_single_layer(window: &Window, train: &SampleSet) -> Result<ExhaustiveResult> {
    if window.len() > MAX_EXHAUSTIVE_POINTS {
        return Err(Error::Refused(format!(
            "exhaustive search is limited to {MAX_EXHAUSTIVE_POINTS} window points, got {}",
            window.len()
        )));
    }
    let patterns = 1usize << window.len();
    let tables = 1usize << patterns;
    let counts: Vec<PatternCounts> = train
        .pairs()
        .iter()
        .map(|p| pattern_counts(window, p))
        .collect();

    let losses: Vec<f64> = (0..tables)
        .into_par_iter()
        .map(|t| {
            mean_of(counts.iter().map(|c| {
                let (mut inter, mut pred) = (0usize, 0usize);
                for p in 0..patterns {
                    if t >> p & 1 == 1 {
                        inter += c.in_target[p];
                        pred += c.in_target[p] + c.off_target[p];
                    }
                }
                iou_error_from_counts(inter, c.target_size + pred - inter)
            }))
        })
        .collect();
    let min_loss = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let best_tables = (0..tables)
        .filter(|&t| losses[t] == min_loss)
        .map(|t| TruthTable::from_fn(window.len(), |p| t >> p & 1 == 1).expect("small window"))
        .collect();
    Ok(ExhaustiveResult {
        best_tables,
        min_loss,
        tables_examined: tables,
    })
}

/// Every connected window in the frame of `side` with at most
/// `max_points` points, ordered by size and then by point list.
pub fn connected_windows(side: usize, max_points: usize) -> Result<Vec<Window>> {
    let frame: Vec<PixelOffset> = Window::origin(side)?.frame_points().collect();
    let mut level: BTreeSet<Vec<PixelOffset>> = frame.iter().map(|&p| vec![p]).collect();
    let mut out = Vec::new();
    for size in 1..=max_points.min(frame.len()) {
        if size > 1 {
            let mut grown = BTreeSet::new();
            for set in &level {
                for &p in &frame {
                    if !set.contains(&p) && set.iter().any(|&q| q.chebyshev(p) == 1) {
                        let mut next = set.clone();
                        next.push(p);
                        next.sort();
                        grown.insert(next);
                    }
                }
            }
            level = grown;
        }
        for set in &level {
            out.push(Window::new(side, set.iter().copied())?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalResult {
    /// First window, in [`connected_windows`] order, attaining the minimum.
    pub window: Window,
    pub result: ExhaustiveResult,
    pub windows_examined: usize,
}

/// Global minimum of the training loss over all single-layer networks whose
/// window is connected, fits in the frame of `side`, and has at most
/// `max_points` points.
pub fn global_single_layer(
    side: usize,
    max_points: usize,
    train: &SampleSet,
) -> Result<GlobalResult> {
    if max_points > MAX_EXHAUSTIVE_POINTS {
        return Err(Error::Refused(format!(
            "exhaustive search is limited to {MAX_EXHAUSTIVE_POINTS} window points, got {max_points}"
        )));
    }
    let windows = connected_windows(side, max_points)?;
    let mut best: Option<(Window, ExhaustiveResult)> = None;
    for w in &windows {
        let r = exhaustive_single_layer(w, train)?;
        if best.as_ref().is_none_or(|(_, b)| r.min_loss < b.min_loss) {
            best = Some((w.clone(), r));
        }
    }
    let (window, result) =
        best.ok_or_else(|| Error::InvalidParameter("max_points must be at least 1".into()))?;
    Ok(GlobalResult {
        window,
        result,
        windows_examined: windows.len(),
    })
}

/// Full-sample training loss of every single-flip neighbor of `params`,
/// in layer then pattern order.
pub fn all_flip_losses(
    params: &NetworkParams,
    pairs: &[&SamplePair],
) -> Result<Vec<(NeighborDescriptor, f64)>> {
    let flips: Vec<NeighborDescriptor> = params
        .layers()
        .iter()
        .enumerate()
        .flat_map(|(layer, l)| {
            (0..l.table().len())
                .map(move |pattern| NeighborDescriptor::FunctionFlip { layer, pattern })
        })
        .collect();
    flips
        .into_par_iter()
        .map(|d| {
            let NeighborDescriptor::FunctionFlip { layer, pattern } = d else {
                unreachable!()
            };
            let mut layers = params.layers().to_vec();
            let mut table = layers[layer].table().clone();
            table.flip(pattern);
            layers[layer] = Layer::new(layers[layer].window().clone(), table)?;
            let neighbor = NetworkParams::new(layers)?;
            Ok((d, naive_mean_loss(&neighbor, pairs.iter().copied())?))
        })
        .collect()
}

/// True iff no single-flip neighbor has strictly smaller training loss.
pub fn is_local_min(params: &NetworkParams, train: &SampleSet) -> Result<bool> {
    let pairs: Vec<&SamplePair> = train.pairs().iter().collect();
    let here = naive_mean_loss(params, pairs.iter().copied())?;
    Ok(all_flip_losses(params, &pairs)?
        .iter()
        .all(|&(_, loss)| loss >= here))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::apply_layer;
    use crate::lattice::random_truth_table;
    use crate::loss::Role;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair_set(pairs: Vec<(BinaryImage, BinaryImage)>) -> SampleSet {
        SampleSet::new(
            pairs
                .into_iter()
                .map(|(x, y)| SamplePair::new(x, y).unwrap())
                .collect(),
            Role::Train,
        )
        .unwrap()
    }

    fn random_image(rng: &mut impl Rng, h: usize, w: usize) -> BinaryImage {
        BinaryImage::from_fn(h, w, |_, _| rng.gen())
    }

    #[test]
    fn naive_matches_simple_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let img = random_image(&mut rng, 6, 6);
        assert_eq!(naive_apply(&Layer::identity(3).unwrap(), &img), img);
        let one = Layer::constant(Window::cross(3).unwrap(), true);
        assert_eq!(naive_apply(&one, &img).count_ones(), 36);
        for _ in 0..50 {
            let w = Window::square(3).unwrap();
            let layer = Layer::new(w.clone(), random_truth_table(&w, &mut rng)).unwrap();
            let img = random_image(&mut rng, 7, 5);
            assert_eq!(naive_apply(&layer, &img), apply_layer(&layer, &img));
        }
    }

    #[test]
    fn exhaustive_counts_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pairs = (0..3)
            .map(|_| {
                let x = random_image(&mut rng, 6, 6);
                (x.clone(), x)
            })
            .collect();
        let train = pair_set(pairs);
        let origin = Window::origin(3).unwrap();
        let res = exhaustive_single_layer(&origin, &train).unwrap();
        assert_eq!(res.tables_examined, 4);
        assert_eq!(res.min_loss, 0.0);
        assert!(res
            .best_tables
            .contains(&TruthTable::from_bits(&[false, true]).unwrap()));

        let two = Window::new(3, [(0, 0), (0, 1)].map(PixelOffset::from)).unwrap();
        let res = exhaustive_single_layer(&two, &train).unwrap();
        assert_eq!(res.tables_examined, 16);
        let id_on_two = TruthTable::from_fn(2, |p| p & 1 == 1).unwrap();
        assert!(res.best_tables.contains(&id_on_two));
        assert!(matches!(
            exhaustive_single_layer(&Window::cross(3).unwrap(), &train),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn exhaustive_losses_match_naive_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pairs = (0..3)
            .map(|_| (random_image(&mut rng, 6, 6), random_image(&mut rng, 6, 6)))
            .collect();
        let train = pair_set(pairs);
        let w = Window::new(3, [(0, 0), (1, 0), (1, 1)].map(PixelOffset::from)).unwrap();
        let res = exhaustive_single_layer(&w, &train).unwrap();
        for t in &res.best_tables {
            let p = NetworkParams::new(vec![Layer::new(w.clone(), t.clone()).unwrap()]).unwrap();
            let naive = naive_mean_loss(&p, train.pairs()).unwrap();
            assert!((naive - res.min_loss).abs() < 1e-12);
            assert!(is_local_min(&p, &train).unwrap());
        }
    }

    #[test]
    fn local_min_examples() {
        let x = BinaryImage::from_rows(&["000", "000"]).unwrap();
        let train = pair_set(vec![(x.clone(), x.clone())]);
        let zero =
            NetworkParams::new(vec![Layer::constant(Window::origin(3).unwrap(), false)]).unwrap();
        assert!(is_local_min(&zero, &train).unwrap());

        let x = BinaryImage::from_rows(&["010", "110"]).unwrap();
        let train = pair_set(vec![(x.clone(), x.clone())]);
        assert!(!is_local_min(&zero, &train).unwrap());
    }

    #[test]
    fn connected_window_counts() {
        // 9 singletons, 20 adjacent pairs under 8-connectivity
        let ws = connected_windows(3, 2).unwrap();
        assert_eq!(ws.len(), 9 + 20);
        assert!(ws.windows(2).all(|p| p[0].len() <= p[1].len()));
        let all = connected_windows(3, 9).unwrap();
        assert_eq!(all.last().unwrap(), &Window::square(3).unwrap());
        assert!(matches!(
            global_single_layer(
                3,
                5,
                &pair_set(vec![(BinaryImage::new(2, 2), BinaryImage::new(2, 2))])
            ),
            Err(Error::Refused(_))
        ));
    }
}
