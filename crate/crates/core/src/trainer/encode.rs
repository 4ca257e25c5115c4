use crate::data::{apply_pca, LabeledDataset, PcaModel};
use crate::error::{Error, Result};
use crate::quantum::{amplitude_encode, Statevector};

/// A sample ready for the circuit. `state` is `None` when the PCA projection
/// has zero norm and cannot be amplitude-encoded.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedSample {
    pub state: Option<Statevector>,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedSet {
    samples: Vec<EncodedSample>,
}

impl EncodedSet {
    pub fn new(samples: Vec<EncodedSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyDataset("no encoded samples".into()));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[EncodedSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Samples whose projection had zero norm.
    pub fn zero_norm_count(&self) -> usize {
        self.samples.iter().filter(|s| s.state.is_none()).count()
    }

    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let samples = indices
            .iter()
            .map(|&i| {
                self.samples
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::arg(format!("index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }
}

/// Projects with `pca` and amplitude-encodes onto `n_qubits`.
pub fn encode_dataset(
    dataset: &LabeledDataset,
    pca: &PcaModel,
    n_qubits: usize,
) -> Result<EncodedSet> {
    let width = 1usize << n_qubits;
    if pca.n_components() != width {
        return Err(Error::arg(format!(
            "PCA yields {} features but {n_qubits} qubits need {width}",
            pca.n_components()
        )));
    }
    let samples = dataset
        .samples()
        .iter()
        .map(|s| {
            let fv = apply_pca(pca, &s.features)?;
            let state = match amplitude_encode(&fv) {
                Ok(state) => Some(state),
                Err(Error::Encoding(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(EncodedSample {
                state,
                label: s.label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let set = EncodedSet::new(samples)?;
    if set.zero_norm_count() > 0 {
        log::warn!(
            "{} of {} samples project to zero norm and cannot be encoded",
            set.zero_norm_count(),
            set.len()
        );
    }
    Ok(set)
}
