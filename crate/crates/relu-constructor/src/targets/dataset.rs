//! Synthetic regression samples `Y = f₀(X) + η` and their CSV export.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{sample_x, HolderTarget, NoiseSpec, SupportSpec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    /// Writes `x1..xd,y` rows to `csv_path` and `meta` as pretty JSON next to it.
    pub fn write_csv(&self, csv_path: &Path, meta: &DatasetMeta) -> Result<()> {
        let mut w = csv::Writer::from_path(csv_path)?;
        let mut header: Vec<String> = (1..=self.dim()).map(|i| format!("x{i}")).collect();
        header.push("y".into());
        w.write_record(&header)?;
        for (x, y) in self.x.iter().zip(&self.y) {
            w.write_record(x.iter().chain(std::iter::once(y)).map(|v| format!("{v:?}")))?;
        }
        w.flush()?;
        let mut f = File::create(sidecar_path(csv_path))?;
        let text = serde_json::to_string_pretty(meta).map_err(|e| Error::Parse(e.to_string()))?;
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }

    /// Reads a CSV written by [`Dataset::write_csv`]; the last column is the response.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let mut x = Vec::new();
        let mut y = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}"))))
                .collect::<Result<_>>()?;
            let Some((last, xs)) = vals.split_last() else {
                return Err(Error::Parse("empty CSV row".into()));
            };
            if let Some(first) = x.first() {
                let first: &Vec<f64> = first;
                if first.len() != xs.len() {
                    return Err(Error::DimensionMismatch { expected: first.len(), got: xs.len() });
                }
            }
            x.push(xs.to_vec());
            y.push(*last);
        }
        Ok(Dataset { x, y })
    }
}

/// `data.csv` → `data.json`.
pub fn sidecar_path(csv_path: &Path) -> std::path::PathBuf {
    csv_path.with_extension("json")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub target: String,
    pub beta: f64,
    #[serde(rename = "B0")]
    pub b0: f64,
    pub support: SupportSpec,
    pub noise: NoiseSpec,
    pub n: usize,
    pub seed: u64,
}

/// Covariates come from stream 0 of the seeded generator and noise from stream 1,
/// so `X` does not depend on the noise model.
pub fn generate_dataset(
    target: &HolderTarget,
    support: &SupportSpec,
    noise: &NoiseSpec,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    noise.validate()?;
    if support.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), got: support.dim() });
    }
    let x = sample_x(support, n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let y = x.iter().map(|xi| target.eval(xi) + noise.sample(&mut rng)).collect();
    Ok(Dataset { x, y })
}
