//! Dataset ingestion and classical preprocessing.

mod dataset;
mod mnist;
mod pca;

pub use dataset::{
    bootstrap_indices, bootstrap_sample, split, split_indices, subsample, subsample_indices,
    LabeledDataset, Sample,
};
pub use mnist::{load_mnist, parse_idx_images, parse_idx_labels, IdxImages};
pub use pca::{apply_pca, fit_pca, FeatureVector, PcaModel};
