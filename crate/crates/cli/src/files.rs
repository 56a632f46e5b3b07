//! JSON interchange for block matrices and bipartite vectors.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use posmap_core::linalg::{c, ComplexMatrix, ComplexVector};
use posmap_core::BlockMatrix;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    State,
    Block,
    MapChoi,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// `(m n)^2` entries as `[re, im]`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub m: usize,
    pub n: usize,
    pub kind: MatrixKind,
    pub data: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl MatrixFile {
    pub fn from_block(kind: MatrixKind, block: &BlockMatrix, metadata: Option<Metadata>) -> Self {
        let full = block.full();
        let d = full.nrows();
        let data = (0..d * d).map(|k| full[(k / d, k % d)]).map(|z| [z.re, z.im]).collect();
        Self {
            m: block.m(),
            n: block.n(),
            kind,
            data,
            metadata,
        }
    }

    pub fn to_block(&self) -> Result<BlockMatrix, CliError> {
        let d = self.m * self.n;
        if self.m == 0 || self.n == 0 {
            return Err(CliError::input("m and n must be positive"));
        }
        if self.data.len() != d * d {
            return Err(CliError::input(format!(
                "expected {} entries for m={} n={}, found {}",
                d * d,
                self.m,
                self.n,
                self.data.len()
            )));
        }
        if self.data.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CliError::input("matrix entries must be finite"));
        }
        let full = ComplexMatrix::from_fn(d, d, |r, s| {
            let [re, im] = self.data[r * d + s];
            c(re, im)
        });
        Ok(BlockMatrix::new(self.m, self.n, full)?)
    }

    /// Short label for reports: the family name if recorded, else the given fallback.
    pub fn label(&self, fallback: &str) -> String {
        self.metadata
            .as_ref()
            .and_then(|meta| meta.family.clone())
            .unwrap_or_else(|| fallback.to_string())
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_json(path, self)
    }
}

/// A vector in `C^m ⊗ C^m` (`m^2` entries).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFile {
    pub m: usize,
    pub data: Vec<[f64; 2]>,
}

impl VectorFile {
    pub fn from_vector(m: usize, x: &ComplexVector) -> Self {
        Self {
            m,
            data: x.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_vector(&self) -> Result<ComplexVector, CliError> {
        if self.data.len() != self.m * self.m {
            return Err(CliError::input(format!(
                "expected {} entries for m={}, found {}",
                self.m * self.m,
                self.m,
                self.data.len()
            )));
        }
        if self.data.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CliError::input("vector entries must be finite"));
        }
        Ok(ComplexVector::from_iterator(
            self.data.len(),
            self.data.iter().map(|&[re, im]| c(re, im)),
        ))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }
}

pub fn complex_pairs(x: &ComplexVector) -> Vec<[f64; 2]> {
    x.iter().map(|z| [z.re, z.im]).collect()
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string(value).map_err(|e| CliError::input(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}
