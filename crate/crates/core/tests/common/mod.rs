#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::Rng;
use usdmnn::io::write_dataset;
use usdmnn::lattice::random_truth_table;
use usdmnn::loss::{Role, SamplePair, SampleSet};
use usdmnn::{BinaryImage, Layer, NetworkParams, PixelOffset, Window};

pub fn random_image(rng: &mut impl Rng, h: usize, w: usize) -> BinaryImage {
    BinaryImage::from_fn(h, w, |_, _| rng.gen())
}

/// Grows a connected window from a random frame point, one random
/// 8-adjacent frame point at a time.
pub fn random_window(rng: &mut impl Rng, side: usize, max_points: usize) -> Window {
    let r = (side / 2) as i32;
    let inside = |p: PixelOffset| p.row.abs() <= r && p.col.abs() <= r;
    let target = rng.gen_range(1..=max_points.min(side * side));
    let mut points = vec![PixelOffset::new(
        rng.gen_range(-r..=r),
        rng.gen_range(-r..=r),
    )];
    while points.len() < target {
        let mut frontier: Vec<PixelOffset> = points
            .iter()
            .flat_map(|p| {
                (-1..=1).flat_map(move |dr| (-1..=1).map(move |dc| *p + PixelOffset::new(dr, dc)))
            })
            .filter(|q| inside(*q) && !points.contains(q))
            .collect();
        frontier.sort();
        frontier.dedup();
        points.push(*frontier.choose(rng).expect("frame not full"));
    }
    Window::new(side, points).expect("grown window is connected")
}

pub fn random_layer(rng: &mut impl Rng, side: usize, max_points: usize) -> Layer {
    let w = random_window(rng, side, max_points);
    let t = random_truth_table(&w, rng);
    Layer::new(w, t).unwrap()
}

/// Pairs `(x, hidden(x))` for random `h` x `w` inputs.
pub fn hidden_task(
    rng: &mut impl Rng,
    hidden: &NetworkParams,
    n: usize,
    h: usize,
    w: usize,
    role: Role,
) -> SampleSet {
    let pairs = (0..n)
        .map(|_| {
            let x = random_image(rng, h, w);
            let y = usdmnn::eval::forward(hidden, &x);
            SamplePair::new(x, y).unwrap()
        })
        .collect();
    SampleSet::new(pairs, role).unwrap()
}

pub fn write_hidden_dataset(
    rng: &mut impl Rng,
    hidden: &NetworkParams,
    n: usize,
    side: usize,
    root: &Path,
) {
    let train = hidden_task(rng, hidden, n, side, side, Role::Train);
    let val = hidden_task(rng, hidden, n, side, side, Role::Validation);
    write_dataset(root, &train, &val).unwrap();
}

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_usdmnn"));
    cmd.env_remove("USDMNN_OUT_DIR");
    cmd
}

pub fn usdmnn(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Value following `key ` on its own line.
pub fn field(text: &str, key: &str) -> Option<String> {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(' ').map(str::to_owned))
}

/// Metrics log with the timing column dropped.
pub fn metrics_without_times(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_owned())
        .collect()
}
