//! Stochastic lattice descent over window vectors.
//!
//! Each visited window vector is scored by training its characteristic
//! functions on the full training sample and measuring the validation
//! error of the result. Trained results are cached by window key, and the
//! inner run's seed is derived from that key, so results do not depend on
//! the order in which candidates are trained.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fn_trainer::{default_init, train_functions_observed, EpochRecord, FnTrainConfig};
use crate::lattice::{
    random_truth_table, sample_window_neighbors, Layer, NetworkParams, Window, WindowVector,
};
use crate::loss::{mean_loss, SampleSet};
use crate::rng::{argmin_random_tie, derive_seed, stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WinSearchConfig {
    /// Window vectors sampled per batch step; `usize::MAX` means all.
    pub neighbors: usize,
    /// Validation batch size.
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub fn_config: FnTrainConfig,
}

impl WinSearchConfig {
    pub fn validate(&self, train_samples: usize, val_samples: usize) -> Result<()> {
        let outer = FnTrainConfig {
            neighbors: self.neighbors,
            batch_size: self.batch_size,
            epochs: self.epochs,
            seed: self.seed,
        };
        outer
            .validate(val_samples)
            .map_err(|e| Error::InvalidConfig(format!("window search: {e}")))?;
        self.fn_config.validate(train_samples)
    }
}

/// Result of training one window vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedEntry {
    pub params: NetworkParams,
    pub train_loss: f64,
    pub val_loss: f64,
    /// Epoch at which the inner run found its best point.
    pub epochs_to_min: usize,
}

/// Cache of trained window vectors keyed by [`WindowVector::key`].
#[derive(Debug, Default, Clone)]
pub struct TrainedCache {
    entries: HashMap<String, TrainedEntry>,
    /// Inner training runs performed (cache misses).
    pub trainings: usize,
    /// Inner epochs run across all trainings.
    pub inner_epochs: usize,
}

impl TrainedCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, wv: &WindowVector) -> Option<&TrainedEntry> {
        self.entries.get(&wv.key())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &TrainedEntry)> {
        self.entries.iter()
    }

    fn insert(&mut self, wv: &WindowVector, entry: TrainedEntry, epochs: usize) {
        self.trainings += 1;
        self.inner_epochs += epochs;
        self.entries.insert(wv.key(), entry);
    }
}

/// Copies `prev` and replaces `changed_layer` by `new_window` with a fresh
/// random table.
pub fn warm_start_init<R: Rng + ?Sized>(
    prev: &NetworkParams,
    changed_layer: usize,
    new_window: &Window,
    rng: &mut R,
) -> Result<NetworkParams> {
    if changed_layer >= prev.depth() {
        return Err(Error::InvalidParameter(format!(
            "layer {changed_layer} out of range for depth {}",
            prev.depth()
        )));
    }
    let fresh = Window::new(new_window.side(), new_window.points().iter().copied())?;
    let mut layers = prev.layers().to_vec();
    let table = random_truth_table(&fresh, rng);
    layers[changed_layer] = Layer::new(fresh, table)?;
    NetworkParams::new(layers)
}

/// Per-epoch record of the window search.
#[derive(Debug, Clone, PartialEq)]
pub struct WinEpochRecord {
    pub epoch: usize,
    pub batches: usize,
    pub current_loss: f64,
    pub best_loss: f64,
    pub windows_visited: usize,
    pub elapsed: Duration,
}

/// One batch step of the window search.
#[derive(Debug, Clone, PartialEq)]
pub struct WinMove {
    pub epoch: usize,
    pub batch: usize,
    pub batch_indices: Vec<usize>,
    pub from: WindowVector,
    pub candidates: Vec<WindowVector>,
    pub batch_losses: Vec<f64>,
    pub chosen: usize,
}

#[derive(Debug, Clone)]
pub struct WinSearchResult {
    pub best_windows: WindowVector,
    pub best_params: NetworkParams,
    pub best_val_loss: f64,
    /// Training loss of `best_params` on the full training sample.
    pub best_train_loss: f64,
    pub windows_visited: usize,
    pub history: Vec<WinEpochRecord>,
    pub epochs_to_min: usize,
    pub moves: Vec<WinMove>,
    pub cache: TrainedCache,
}

/// Progress events from [`search_windows_observed`].
pub enum SearchEvent<'a> {
    /// An inner training of `key` finished an epoch.
    FnEpoch {
        key: &'a str,
        record: &'a EpochRecord,
    },
    WinEpoch(&'a WinEpochRecord),
}

fn train_entry(
    wv: &WindowVector,
    warm_from: Option<(&NetworkParams, usize)>,
    train: &SampleSet,
    val: &SampleSet,
    cfg: &FnTrainConfig,
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<(TrainedEntry, usize)> {
    let seed = derive_seed(cfg.seed, &wv.key());
    let mut init_rng = stream(seed, Stream::Init);
    let init = match warm_from {
        Some((prev, layer)) => warm_start_init(prev, layer, &wv.windows()[layer], &mut init_rng)?,
        None => default_init(wv, &mut init_rng),
    };
    let inner = FnTrainConfig { seed, ..*cfg };
    let res = train_functions_observed(wv, &init, train, &inner, on_epoch)?;
    let val_loss = mean_loss(&res.best_params, val.pairs())?;
    Ok((
        TrainedEntry {
            params: res.best_params,
            train_loss: res.best_train_loss,
            val_loss,
            epochs_to_min: res.epochs_to_min,
        },
        res.history.len(),
    ))
}

/// Trains `wv` unless cached. `warm_from` is the predecessor's trained
/// parameters and the layer whose window differs.
pub fn evaluate_window_vector(
    wv: &WindowVector,
    warm_from: Option<(&NetworkParams, usize)>,
    train: &SampleSet,
    val: &SampleSet,
    cfg: &FnTrainConfig,
    cache: &mut TrainedCache,
) -> Result<TrainedEntry> {
    if let Some(hit) = cache.get(wv) {
        return Ok(hit.clone());
    }
    let (entry, epochs) = train_entry(wv, warm_from, train, val, cfg, &mut |_| {})?;
    cache.insert(wv, entry.clone(), epochs);
    Ok(entry)
}

pub fn search_windows(
    init_wv: &WindowVector,
    train: &SampleSet,
    val: &SampleSet,
    cfg: &WinSearchConfig,
) -> Result<WinSearchResult> {
    search_windows_observed(init_wv, train, val, cfg, &mut |_| {})
}

pub fn search_windows_observed(
    init_wv: &WindowVector,
    train: &SampleSet,
    val: &SampleSet,
    cfg: &WinSearchConfig,
    on_event: &mut dyn FnMut(SearchEvent<'_>),
) -> Result<WinSearchResult> {
    cfg.validate(train.len(), val.len())?;
    let start = Instant::now();
    let mut shuffle_rng = stream(cfg.seed, Stream::Shuffle);
    let mut neighbor_rng = stream(cfg.seed, Stream::Neighbors);
    let mut tie_rng = stream(cfg.seed, Stream::Ties);
    let fn_cfg = cfg.fn_config;
    let mut cache = TrainedCache::new();

    let init_key = init_wv.key();
    let (entry, epochs) = train_entry(init_wv, None, train, val, &fn_cfg, &mut |r| {
        on_event(SearchEvent::FnEpoch {
            key: &init_key,
            record: r,
        })
    })?;
    cache.insert(init_wv, entry, epochs);

    let mut current = init_wv.clone();
    let mut best = current.clone();
    let mut best_loss = cache.get(&current).unwrap().val_loss;
    let mut epochs_to_min = 0;
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut moves = Vec::new();
    let val_pairs = val.pairs();

    for epoch in 1..=cfg.epochs {
        let batches =
            crate::fn_trainer::shuffle_batches(val_pairs, cfg.batch_size, &mut shuffle_rng);
        for (batch, indices) in batches.iter().enumerate() {
            let candidates = sample_window_neighbors(&current, cfg.neighbors, &mut neighbor_rng);
            let incumbent = cache
                .get(&current)
                .expect("current is always trained")
                .params
                .clone();

            let misses: Vec<&WindowVector> = candidates
                .iter()
                .filter(|c| cache.get(c).is_none())
                .collect();
            let trained = misses
                .par_iter()
                .map(|c| {
                    let layer = current
                        .changed_layer(c)
                        .expect("neighbors differ in one layer");
                    let mut log = Vec::new();
                    let (entry, epochs) = train_entry(
                        c,
                        Some((&incumbent, layer)),
                        train,
                        val,
                        &fn_cfg,
                        &mut |r| log.push(r.clone()),
                    )?;
                    Ok((entry, epochs, log))
                })
                .collect::<Result<Vec<_>>>()?;
            for (c, (entry, epochs, log)) in misses.iter().zip(trained) {
                let key = c.key();
                for r in &log {
                    on_event(SearchEvent::FnEpoch {
                        key: &key,
                        record: r,
                    });
                }
                cache.insert(c, entry, epochs);
            }

            let batch_losses = candidates
                .iter()
                .map(|c| {
                    let params = &cache.get(c).unwrap().params;
                    mean_loss(params, indices.iter().map(|&i| &val_pairs[i]))
                })
                .collect::<Result<Vec<f64>>>()?;
            let k = argmin_random_tie(&batch_losses, &mut tie_rng);
            let next = candidates[k].clone();
            moves.push(WinMove {
                epoch,
                batch,
                batch_indices: indices.clone(),
                from: current.clone(),
                candidates,
                batch_losses,
                chosen: k,
            });
            current = next;
        }
        let loss = cache.get(&current).unwrap().val_loss;
        if loss < best_loss {
            best_loss = loss;
            best = current.clone();
            epochs_to_min = epoch;
        }
        let record = WinEpochRecord {
            epoch,
            batches: batches.len(),
            current_loss: loss,
            best_loss,
            windows_visited: cache.len(),
            elapsed: start.elapsed(),
        };
        on_event(SearchEvent::WinEpoch(&record));
        history.push(record);
    }

    let best_entry = cache.get(&best).unwrap().clone();
    Ok(WinSearchResult {
        best_windows: best,
        best_params: best_entry.params,
        best_val_loss: best_loss,
        best_train_loss: best_entry.train_loss,
        windows_visited: cache.len(),
        history,
        epochs_to_min,
        moves,
        cache,
    })
}
