//! Training and evaluation of a single QCNN base learner.

mod adam;
mod encode;
mod gradient;
mod learner;
mod loss;

pub use adam::Adam;
pub use encode::{encode_dataset, EncodedSample, EncodedSet};
pub use gradient::{gradient, loss_and_gradient, LossAndGradient};
pub use learner::{
    evaluate, evaluate_encoded, train, train_encoded, Evaluation, TrainConfig, TrainedLearner,
    DECISION_THRESHOLD, LEARNER_FORMAT_VERSION,
};
pub use loss::{bce_derivative, loss, PROB_EPS};
