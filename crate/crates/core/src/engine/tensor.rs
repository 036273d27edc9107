use serde::Serialize;

use super::EngineError;
use crate::signature::DependencySignature;

/// Values of one variable over the sub-grid of its signature, flattened with
/// axes ascending and the last axis fastest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueTensor {
    pub signature: DependencySignature,
    pub data: Vec<f64>,
}

impl ValueTensor {
    pub fn scalar(value: f64) -> Self {
        Self {
            signature: DependencySignature::EMPTY,
            data: vec![value],
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Broadcasts `value` over the axes of `to` it does not already span.
pub fn expand_tensor(
    value: &ValueTensor,
    to: DependencySignature,
    axis_sizes: &[usize],
) -> Result<ValueTensor, EngineError> {
    let from = value.signature;
    if !from.is_subset_of(to) {
        return Err(EngineError::SignatureNotSubset { from, to });
    }
    if to.axes().any(|a| a >= axis_sizes.len()) {
        return Err(EngineError::SignatureMismatch(format!(
            "{to} exceeds the {} grid axes",
            axis_sizes.len()
        )));
    }
    if value.data.len() != from.point_count(axis_sizes) {
        return Err(EngineError::SignatureMismatch(format!(
            "tensor over {from} holds {} values, expected {}",
            value.data.len(),
            from.point_count(axis_sizes)
        )));
    }

    let axes: Vec<usize> = to.axes().collect();
    let dims: Vec<usize> = axes.iter().map(|&a| axis_sizes[a]).collect();
    // Stride of each target axis within the source tensor; 0 for broadcast axes.
    let strides: Vec<usize> = axes
        .iter()
        .map(|&a| {
            if from.contains(a) {
                from.axes().filter(|&b| b > a).map(|b| axis_sizes[b]).product()
            } else {
                0
            }
        })
        .collect();

    let total = to.point_count(axis_sizes);
    let mut data = Vec::with_capacity(total);
    let mut digits = vec![0usize; axes.len()];
    let mut src = 0usize;
    for _ in 0..total {
        data.push(value.data[src]);
        for i in (0..axes.len()).rev() {
            digits[i] += 1;
            src += strides[i];
            if digits[i] < dims[i] {
                break;
            }
            src -= strides[i] * dims[i];
            digits[i] = 0;
        }
    }
    Ok(ValueTensor {
        signature: to,
        data,
    })
}
