//! Independent random streams derived from one master seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Shuffle = 0,
    Neighbors = 1,
    Ties = 2,
    Init = 3,
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

/// 64-bit FNV-1a, stable across platforms and toolchains.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed for a sub-task identified by `key` under `seed`.
pub fn derive_seed(seed: u64, key: &str) -> u64 {
    let mut bytes = seed.to_le_bytes().to_vec();
    bytes.extend_from_slice(key.as_bytes());
    fnv1a(&bytes)
}

/// Index of a minimum of `values`; ties are broken uniformly with `rng`.
/// Draws from `rng` only when there is more than one minimizer.
pub fn argmin_random_tie<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> usize {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let minimizers: Vec<usize> = (0..values.len()).filter(|&i| values[i] == min).collect();
    match minimizers.len() {
        0 => panic!("argmin of an empty or NaN slice"),
        1 => minimizers[0],
        k => minimizers[rng.gen_range(0..k)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ() {
        let a: u64 = stream(1, Stream::Shuffle).gen();
        let b: u64 = stream(1, Stream::Neighbors).gen();
        assert_ne!(a, b);
        assert_eq!(a, stream(1, Stream::Shuffle).gen::<u64>());
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn argmin_ties() {
        let mut rng = stream(0, Stream::Ties);
        assert_eq!(argmin_random_tie(&[0.3, 0.1, 0.2], &mut rng), 1);
        let mut seen = [false; 2];
        for _ in 0..64 {
            seen[argmin_random_tie(&[0.1, 0.5, 0.1], &mut rng) / 2] = true;
        }
        assert!(seen[0] && seen[1]);
    }
}
