//! Bagged ensembles of QCNN learners and their combination rules.

mod analysis;
mod confusion;
mod model;
mod strategy;

pub use analysis::{ensemble_error_rate, similarity_interval};
pub use confusion::ConfusionMatrix;
pub use model::{
    build_ensemble, build_ensemble_encoded, compute_s_max, learner_similarity, pairwise_similarity,
    similarity_matrix, BuildConfig, EnsembleModel, ENSEMBLE_FORMAT_VERSION,
};
pub use strategy::{
    combine, confusion_weight, vote_weight, LogBase, Strategy, StrategyConfig, VotingRecord,
};
