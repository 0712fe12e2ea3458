//! IoU empirical error.

use crate::error::{Error, Result};
use crate::eval::forward;
use crate::image::BinaryImage;
use crate::lattice::NetworkParams;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePair {
    pub input: BinaryImage,
    pub target: BinaryImage,
}

impl SamplePair {
    pub fn new(input: BinaryImage, target: BinaryImage) -> Result<Self> {
        if input.dims() != target.dims() {
            return Err(Error::InvalidPair(format!(
                "input is {:?} but target is {:?}",
                input.dims(),
                target.dims()
            )));
        }
        Ok(Self { input, target })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Train,
    Validation,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Train => "train",
            Role::Validation => "validation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    pairs: Vec<SamplePair>,
    role: Role,
}

impl SampleSet {
    pub fn new(pairs: Vec<SamplePair>, role: Role) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidSample(format!(
                "{} sample is empty",
                role.name()
            )));
        }
        Ok(Self { pairs, role })
    }

    pub fn pairs(&self) -> &[SamplePair] {
        &self.pairs
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// `1 - |I| / |U|` from pixel counts; 0 when the union is empty.
pub fn iou_error_from_counts(intersection: usize, union: usize) -> f64 {
    if union == 0 {
        return 0.0;
    }
    1.0 - intersection as f64 / union as f64
}

pub fn iou_error(pred: &BinaryImage, target: &BinaryImage) -> Result<f64> {
    if pred.dims() != target.dims() {
        return Err(Error::InvalidPair(format!(
            "prediction is {:?} but target is {:?}",
            pred.dims(),
            target.dims()
        )));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&p, &t) in pred.bits().iter().zip(target.bits()) {
        inter += usize::from(p && t);
        union += usize::from(p || t);
    }
    Ok(iou_error_from_counts(inter, union))
}

/// Mean of per-pair errors, summed in list order.
pub fn mean_of(errors: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = errors
        .into_iter()
        .fold((0.0f64, 0usize), |(s, n), e| (s + e, n + 1));
    sum / n as f64
}

/// Mean IoU error of the network over `pairs`: `L_t` on training pairs,
/// `L_v` on validation pairs.
pub fn mean_loss<'a>(
    params: &NetworkParams,
    pairs: impl IntoIterator<Item = &'a SamplePair>,
) -> Result<f64> {
    let errors = pairs
        .into_iter()
        .map(|pair| iou_error(&forward(params, &pair.input), &pair.target))
        .collect::<Result<Vec<f64>>>()?;
    if errors.is_empty() {
        return Err(Error::InvalidSample("loss over an empty sample".into()));
    }
    Ok(mean_of(errors))
}
