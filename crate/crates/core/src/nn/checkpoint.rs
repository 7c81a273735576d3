//! Versioned weight container.
//!
//! Checkpoints are JSON documents holding named tensors with their shapes
//! and row-major values. Values are stored as the hexadecimal IEEE-754 bit
//! pattern of each f64, so a save/load round trip is bit-exact.

use crate::error::{Error, Result};
use crate::tensor::Tensor;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

const FORMAT: &str = "actisleep-checkpoint";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct TensorRecord {
    name: String,
    shape: Vec<usize>,
    data: String,
}

#[derive(Serialize, Deserialize)]
struct Document {
    format: String,
    version: u32,
    kind: String,
    meta: serde_json::Value,
    tensors: Vec<TensorRecord>,
}

/// A named collection of tensors plus free-form metadata.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub kind: String,
    pub meta: serde_json::Value,
    tensors: Vec<(String, Tensor)>,
}

fn encode_data(t: &Tensor) -> String {
    let mut s = String::with_capacity(t.len() * 16);
    for &v in t.data() {
        s.push_str(&format!("{:016x}", v.to_bits()));
    }
    s
}

fn decode_data(shape: &[usize], hex: &str) -> Result<Tensor> {
    if hex.len() % 16 != 0 {
        return Err(Error::Format("tensor data is not a multiple of 16 hex digits".into()));
    }
    let mut values = Vec::with_capacity(hex.len() / 16);
    for chunk in hex.as_bytes().chunks(16) {
        let word = std::str::from_utf8(chunk).map_err(|_| Error::Format("non-ascii tensor data".into()))?;
        let bits = u64::from_str_radix(word, 16)
            .map_err(|_| Error::Format(format!("bad hex word `{word}` in tensor data")))?;
        values.push(f64::from_bits(bits));
    }
    Tensor::from_vec(shape, values)
}

impl Checkpoint {
    pub fn new(kind: impl Into<String>, meta: serde_json::Value) -> Self {
        Checkpoint {
            kind: kind.into(),
            meta,
            tensors: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, tensor: Tensor) {
        self.tensors.push((name.into(), tensor));
    }

    pub fn tensor(&self, name: &str) -> Result<&Tensor> {
        self.tensors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
            .ok_or_else(|| Error::Format(format!("checkpoint has no tensor `{name}`")))
    }

    pub fn tensor_names(&self) -> impl Iterator<Item = &str> {
        self.tensors.iter().map(|(n, _)| n.as_str())
    }

    pub fn save(&self, mut writer: impl Write) -> Result<()> {
        let doc = Document {
            format: FORMAT.to_string(),
            version: VERSION,
            kind: self.kind.clone(),
            meta: self.meta.clone(),
            tensors: self
                .tensors
                .iter()
                .map(|(name, t)| TensorRecord {
                    name: name.clone(),
                    shape: t.shape().to_vec(),
                    data: encode_data(t),
                })
                .collect(),
        };
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Format(e.to_string()))?;
        writer.write_all(text.as_bytes())?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn save_to_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.save(std::io::BufWriter::new(file))
    }

    pub fn load(mut reader: impl Read) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        let doc: Document = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
        if doc.format != FORMAT {
            return Err(Error::Format(format!("unexpected container format `{}`", doc.format)));
        }
        if doc.version != VERSION {
            return Err(Error::Format(format!("unsupported checkpoint version {}", doc.version)));
        }
        let mut tensors = Vec::with_capacity(doc.tensors.len());
        for rec in doc.tensors {
            tensors.push((rec.name, decode_data(&rec.shape, &rec.data)?));
        }
        Ok(Checkpoint {
            kind: doc.kind,
            meta: doc.meta,
            tensors,
        })
    }

    pub fn load_from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::load(std::io::BufReader::new(file))
    }
}
