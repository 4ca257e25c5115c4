//! Synthetic IDX files for tests that need the loader without real MNIST.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = vec![0, 0, 8, 1];
    out.extend((labels.len() as u32).to_be_bytes());
    out.extend(labels);
    out
}

pub fn idx_images(rows: usize, cols: usize, images: &[Vec<u8>]) -> Vec<u8> {
    let mut out = vec![0, 0, 8, 3];
    for d in [images.len(), rows, cols] {
        out.extend((d as u32).to_be_bytes());
    }
    for im in images {
        out.extend(im);
    }
    out
}

/// `n` noisy 6x6 images of digits 0, 1 and 7 around a grey background.
/// A zero brightens or darkens the top half by a random amount, a one the
/// bottom half, a seven alternate pixels. Returns the (images, labels) paths.
pub fn write_digits(dir: &Path, stem: &str, n: usize, seed: u64) -> (PathBuf, PathBuf) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut images = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let digit = [0u8, 1, 7][i % 3];
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let amp = sign * rng.gen_range(40.0..100.0);
        let im: Vec<u8> = (0..36)
            .map(|p| {
                let lit = match digit {
                    0 => p < 18,
                    1 => p >= 18,
                    _ => p % 2 == 0,
                };
                let shift = if lit { amp } else { 0.0 };
                (128.0 + shift + rng.gen_range(-3.0..3.0)) as u8
            })
            .collect();
        images.push(im);
        labels.push(digit);
    }
    let ip = dir.join(format!("{stem}-images"));
    let lp = dir.join(format!("{stem}-labels"));
    std::fs::write(&ip, idx_images(6, 6, &images)).unwrap();
    std::fs::write(&lp, idx_labels(&labels)).unwrap();
    (ip, lp)
}
