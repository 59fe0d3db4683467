//! JSON network format: `{version, input_dim, clip_bound, layers: [{rows, cols, weights, bias}]}`.
//!
//! Floats are written in shortest round-trip form and parsed with exact rounding,
//! so every finite coefficient survives a round trip bit for bit.

use serde::{Deserialize, Serialize};

use super::{Layer, Network};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerRecord {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkRecord {
    version: u32,
    input_dim: usize,
    clip_bound: Option<f64>,
    layers: Vec<LayerRecord>,
}

pub fn serialize(net: &Network) -> Vec<u8> {
    let record = NetworkRecord {
        version: FORMAT_VERSION,
        input_dim: net.input_dim(),
        clip_bound: net.clip_bound(),
        layers: net
            .layers()
            .iter()
            .map(|l| LayerRecord {
                rows: l.rows(),
                cols: l.cols(),
                weights: l.weights().to_vec(),
                bias: l.bias().to_vec(),
            })
            .collect(),
    };
    serde_json::to_vec(&record).expect("finite floats always serialize")
}

pub fn deserialize(bytes: &[u8]) -> Result<Network> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let version = value
        .get("version")
        .ok_or_else(|| Error::Parse("missing `version` field".into()))?
        .as_u64()
        .ok_or_else(|| Error::Parse("`version` must be a nonnegative integer".into()))?;
    if version != u64::from(FORMAT_VERSION) {
        return Err(Error::Version { found: version.min(u64::from(u32::MAX)) as u32, expected: FORMAT_VERSION });
    }
    let record: NetworkRecord = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    if record.layers.is_empty() {
        return Err(Error::Parse("layer list is empty".into()));
    }
    let layers = record
        .layers
        .into_iter()
        .enumerate()
        .map(|(i, l)| Layer::new(l.rows, l.cols, l.weights, l.bias).map_err(|e| Error::Parse(format!("layer {i}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Network::new(record.input_dim, layers, record.clip_bound).map_err(|e| Error::Parse(e.to_string()))
}
