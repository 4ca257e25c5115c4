//! IDX reader for the MNIST distribution files.
//!
//! Layout: a big-endian `u32` magic (`0x00000803` images, `0x00000801`
//! labels), one big-endian `u32` per dimension, then the raw `u8` payload.

use std::fs;
use std::path::Path;

use crate::data::{LabeledDataset, Sample};
use crate::error::{Error, Result};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn image(&self, i: usize) -> &[u8] {
        let size = self.rows * self.cols;
        &self.pixels[i * size..(i + 1) * size]
    }
}

fn header(bytes: &[u8], magic: u32, dims: usize) -> Result<Vec<usize>> {
    let need = 4 * (1 + dims);
    if bytes.len() < need {
        return Err(Error::Format(format!(
            "header needs {need} bytes, file has {}",
            bytes.len()
        )));
    }
    let word = |k: usize| u32::from_be_bytes(bytes[4 * k..4 * k + 4].try_into().unwrap());
    let found = word(0);
    if found != magic {
        return Err(Error::Format(format!(
            "magic {found:#010x}, expected {magic:#010x}"
        )));
    }
    Ok((1..=dims).map(|k| word(k) as usize).collect())
}

fn payload(bytes: &[u8], offset: usize, expected: usize) -> Result<&[u8]> {
    let body = &bytes[offset..];
    if body.len() != expected {
        return Err(Error::Format(format!(
            "payload is {} bytes, header declares {expected}",
            body.len()
        )));
    }
    Ok(body)
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let dims = header(bytes, LABELS_MAGIC, 1)?;
    Ok(payload(bytes, 8, dims[0])?.to_vec())
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    let dims = header(bytes, IMAGES_MAGIC, 3)?;
    let (count, rows, cols) = (dims[0], dims[1], dims[2]);
    let total = count
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels: payload(bytes, 16, total)?.to_vec(),
    })
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Loads the images whose digit is `d0` or `d1`, relabelled 0 and 1, pixels
/// scaled to `[0, 1]`.
pub fn load_mnist(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    digit_pair: (u8, u8),
) -> Result<LabeledDataset> {
    let (d0, d1) = digit_pair;
    if d0 == d1 || d0 > 9 || d1 > 9 {
        return Err(Error::arg(format!(
            "digit pair must be two distinct digits in 0..=9, got ({d0}, {d1})"
        )));
    }
    let images = parse_idx_images(&read(images_path.as_ref())?)?;
    let labels = parse_idx_labels(&read(labels_path.as_ref())?)?;
    if images.count != labels.len() {
        return Err(Error::Format(format!(
            "{} images but {} labels",
            images.count,
            labels.len()
        )));
    }
    let samples: Vec<Sample> = labels
        .iter()
        .enumerate()
        .filter_map(|(i, &digit)| {
            let label = match digit {
                d if d == d0 => 0,
                d if d == d1 => 1,
                _ => return None,
            };
            let features = images
                .image(i)
                .iter()
                .map(|&p| f64::from(p) / 255.0)
                .collect();
            Some(Sample { features, label })
        })
        .collect();
    if samples.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "no images of digits {d0} or {d1}"
        )));
    }
    LabeledDataset::new(samples)
}
