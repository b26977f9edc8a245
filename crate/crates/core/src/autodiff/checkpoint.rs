//! JSON model checkpoints.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::adamw::AdamWState;
use super::tensor::{Parameters, Tensor};
use super::AutodiffError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedArray {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub architecture: String,
    pub maze_size: usize,
    pub parameters: Vec<NamedArray>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<AdamWState>,
}

impl Checkpoint {
    pub fn capture(architecture: &str, maze_size: usize, params: &Parameters, optimizer: Option<&AdamWState>) -> Self {
        let parameters = params
            .iter()
            .map(|(name, t)| NamedArray { name: name.to_string(), shape: t.shape().to_vec(), values: t.values().to_vec() })
            .collect();
        Self { architecture: architecture.to_string(), maze_size, parameters, optimizer: optimizer.cloned() }
    }

    /// Writes the stored values into `params`, which must have the same
    /// names and shapes in the same order.
    pub fn restore_into(&self, params: &mut Parameters) -> Result<(), AutodiffError> {
        if self.parameters.len() != params.len() {
            return Err(AutodiffError::Contract(format!(
                "checkpoint has {} tensors, model has {}",
                self.parameters.len(),
                params.len()
            )));
        }
        let mut restored = Parameters::new();
        for (arr, (name, t)) in self.parameters.iter().zip(params.iter()) {
            if arr.name != name || arr.shape != t.shape() {
                return Err(AutodiffError::Contract(format!(
                    "checkpoint tensor {} {:?} does not match model tensor {name} {:?}",
                    arr.name,
                    arr.shape,
                    t.shape()
                )));
            }
            restored.add(name, Tensor::new(arr.shape.clone(), arr.values.clone())?);
        }
        params.copy_values_from(&restored)
    }

    pub fn to_json(&self) -> Result<String, AutodiffError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, AutodiffError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), AutodiffError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, AutodiffError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
