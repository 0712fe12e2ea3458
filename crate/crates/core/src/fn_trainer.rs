//! Stochastic lattice descent over the characteristic functions of a
//! network whose windows are held fixed.
//!
//! Each epoch reshuffles the training pairs into batches. For every batch,
//! a random subset of the single-flip neighbors of the current parameters
//! is scored on that batch alone and the best one becomes the new current
//! point, whether or not it improves on it. Only at the end of an epoch is
//! the full-sample loss compared against the best seen so far.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::apply_layer;
use crate::image::BinaryImage;
use crate::lattice::{
    random_truth_table, sample_function_neighbors, Layer, NeighborDescriptor, NetworkParams,
    WindowVector,
};
use crate::loss::{iou_error, mean_loss, mean_of, SamplePair, SampleSet};
use crate::rng::{argmin_random_tie, stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FnTrainConfig {
    /// Neighbors sampled per batch step; `usize::MAX` means all of them.
    pub neighbors: usize,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl FnTrainConfig {
    /// Full neighborhood, one batch holding the whole sample.
    pub fn deterministic(samples: usize, epochs: usize, seed: u64) -> Self {
        Self {
            neighbors: usize::MAX,
            batch_size: samples,
            epochs,
            seed,
        }
    }

    pub fn validate(&self, samples: usize) -> Result<()> {
        if self.neighbors == 0 {
            return Err(Error::InvalidConfig("neighbors must be at least 1".into()));
        }
        if self.batch_size == 0 || self.batch_size > samples {
            return Err(Error::InvalidConfig(format!(
                "batch size {} outside 1..={samples}",
                self.batch_size
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub batches: usize,
    pub current_loss: f64,
    pub best_loss: f64,
    pub elapsed: Duration,
}

/// One batch step of the descent.
#[derive(Debug, Clone, PartialEq)]
pub struct FnMove {
    pub epoch: usize,
    pub batch: usize,
    /// Indices into the training sample forming this batch.
    pub batch_indices: Vec<usize>,
    pub candidates: usize,
    pub chosen: NeighborDescriptor,
    pub batch_loss: f64,
}

#[derive(Debug, Clone)]
pub struct FnTrainResult {
    pub best_params: NetworkParams,
    pub best_train_loss: f64,
    pub history: Vec<EpochRecord>,
    /// Epoch at which the returned point was recorded; 0 if it is the start.
    pub epochs_to_min: usize,
    pub moves: Vec<FnMove>,
}

/// Random permutation of `0..items.len()` cut into consecutive batches of
/// `b`; the last batch is smaller when `b` does not divide the length.
pub fn shuffle_batches<T, R: Rng + ?Sized>(items: &[T], b: usize, rng: &mut R) -> Vec<Vec<usize>> {
    assert!(b >= 1, "batch size must be at least 1");
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(rng);
    order.chunks(b).map(<[usize]>::to_vec).collect()
}

/// Independent random table per layer, each from its own seeded stream.
pub fn default_init<R: Rng + ?Sized>(windows: &WindowVector, rng: &mut R) -> NetworkParams {
    let layers = windows
        .windows()
        .iter()
        .map(|w| {
            let mut layer_rng = ChaCha8Rng::seed_from_u64(rng.next_u64());
            Layer::new(w.clone(), random_truth_table(w, &mut layer_rng))
                .expect("table sized to window")
        })
        .collect();
    NetworkParams::new(layers).expect("window vector is nonempty")
}

/// Scores flip candidates on one batch. Layer inputs for the current point
/// are cached so a flip in layer `i` only reruns layers `i..`.
struct BatchEvaluator<'a> {
    pairs: Vec<&'a SamplePair>,
    /// `stages[k][i]`: input to layer `i` for pair `k`.
    stages: Vec<Vec<BinaryImage>>,
}

impl<'a> BatchEvaluator<'a> {
    fn new(params: &NetworkParams, pairs: Vec<&'a SamplePair>) -> Self {
        let stages = pairs
            .iter()
            .map(|pair| {
                let mut s = Vec::with_capacity(params.depth());
                s.push(pair.input.clone());
                for l in &params.layers()[..params.depth() - 1] {
                    let next = apply_layer(l, s.last().unwrap());
                    s.push(next);
                }
                s
            })
            .collect();
        Self { pairs, stages }
    }

    fn loss(&self, candidate: &NetworkParams, from_layer: usize) -> Result<f64> {
        let errors = self
            .pairs
            .iter()
            .zip(&self.stages)
            .map(|(pair, stages)| {
                let layers = &candidate.layers()[from_layer..];
                let mut x = apply_layer(&layers[0], &stages[from_layer]);
                for l in &layers[1..] {
                    x = apply_layer(l, &x);
                }
                iou_error(&x, &pair.target)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(mean_of(errors))
    }
}

pub fn train_functions(
    windows: &WindowVector,
    init: &NetworkParams,
    train: &SampleSet,
    cfg: &FnTrainConfig,
) -> Result<FnTrainResult> {
    train_functions_observed(windows, init, train, cfg, &mut |_| {})
}

/// [`train_functions`], reporting each finished epoch to `on_epoch`.
pub fn train_functions_observed(
    windows: &WindowVector,
    init: &NetworkParams,
    train: &SampleSet,
    cfg: &FnTrainConfig,
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<FnTrainResult> {
    cfg.validate(train.len())?;
    if init.windows() != *windows {
        return Err(Error::InvalidConfig(
            "initial parameters do not use the given windows".into(),
        ));
    }
    let start = Instant::now();
    let mut shuffle_rng = stream(cfg.seed, Stream::Shuffle);
    let mut neighbor_rng = stream(cfg.seed, Stream::Neighbors);
    let mut tie_rng = stream(cfg.seed, Stream::Ties);

    let pairs = train.pairs();
    let mut current = init.clone();
    let mut best_loss = mean_loss(&current, pairs)?;
    let mut best = current.clone();
    let mut epochs_to_min = 0;
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut moves = Vec::new();

    for epoch in 1..=cfg.epochs {
        let batches = shuffle_batches(pairs, cfg.batch_size, &mut shuffle_rng);
        for (batch, indices) in batches.iter().enumerate() {
            let candidates = sample_function_neighbors(&current, cfg.neighbors, &mut neighbor_rng);
            let evaluator =
                BatchEvaluator::new(&current, indices.iter().map(|&i| &pairs[i]).collect());
            let losses = candidates
                .par_iter()
                .map(|d| {
                    let NeighborDescriptor::FunctionFlip { layer, pattern } = *d else {
                        unreachable!("function sampler yields flips")
                    };
                    let mut cand = current.clone();
                    cand.layer_mut(layer).table_mut().flip(pattern);
                    evaluator.loss(&cand, layer)
                })
                .collect::<Result<Vec<f64>>>()?;
            let k = argmin_random_tie(&losses, &mut tie_rng);
            let NeighborDescriptor::FunctionFlip { layer, pattern } = candidates[k] else {
                unreachable!()
            };
            current.layer_mut(layer).table_mut().flip(pattern);
            moves.push(FnMove {
                epoch,
                batch,
                batch_indices: indices.clone(),
                candidates: candidates.len(),
                chosen: candidates[k],
                batch_loss: losses[k],
            });
        }
        let loss = mean_loss(&current, pairs)?;
        if loss < best_loss {
            best_loss = loss;
            best = current.clone();
            epochs_to_min = epoch;
        }
        let record = EpochRecord {
            epoch,
            batches: batches.len(),
            current_loss: loss,
            best_loss,
            elapsed: start.elapsed(),
        };
        on_epoch(&record);
        history.push(record);
    }

    Ok(FnTrainResult {
        best_params: best,
        best_train_loss: best_loss,
        history,
        epochs_to_min,
        moves,
    })
}
