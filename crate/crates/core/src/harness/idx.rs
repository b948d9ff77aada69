//! Big-endian IDX tensors of unsigned bytes, the container used by MNIST.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC_LABELS: u32 = 0x0000_0801;
pub const MAGIC_IMAGES: u32 = 0x0000_0803;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdxTensor {
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

impl IdxTensor {
    pub fn new(dims: Vec<usize>, data: Vec<u8>) -> Result<Self> {
        if dims.len() != 1 && dims.len() != 3 {
            return Err(Error::Format(format!("{} dimensions; only 1 and 3 are supported", dims.len())));
        }
        let expected = dims.iter().product::<usize>();
        if expected != data.len() {
            return Err(Error::Format(format!("dims {dims:?} need {expected} bytes, got {}", data.len())));
        }
        Ok(Self { dims, data })
    }

    pub fn len(&self) -> usize {
        self.dims[0]
    }

    pub fn is_empty(&self) -> bool {
        self.dims[0] == 0
    }

    /// Bytes per leading-axis item.
    pub fn item_size(&self) -> usize {
        self.dims[1..].iter().product()
    }

    pub fn item(&self, i: usize) -> &[u8] {
        let s = self.item_size();
        &self.data[i * s..(i + 1) * s]
    }
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Format(format!("header truncated at byte {at}")))
}

pub fn parse_idx(bytes: &[u8]) -> Result<IdxTensor> {
    let magic = read_u32(bytes, 0)?;
    let ndims = match magic {
        MAGIC_LABELS => 1,
        MAGIC_IMAGES => 3,
        other => return Err(Error::Format(format!("bad magic number {other:#010x}"))),
    };
    let dims = (0..ndims).map(|k| read_u32(bytes, 4 + 4 * k).map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
    let offset = 4 + 4 * ndims;
    let expected = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    let payload = &bytes[offset..];
    match expected {
        Some(len) if len == payload.len() => IdxTensor::new(dims, payload.to_vec()),
        Some(len) if len > payload.len() => {
            Err(Error::Format(format!("payload truncated: expected {len} bytes, found {}", payload.len())))
        }
        Some(len) => Err(Error::Format(format!("{} trailing bytes after payload", payload.len() - len))),
        None => Err(Error::Format(format!("dimension product {dims:?} overflows"))),
    }
}

pub fn encode_idx(tensor: &IdxTensor) -> Vec<u8> {
    let magic = if tensor.dims.len() == 1 { MAGIC_LABELS } else { MAGIC_IMAGES };
    let mut out = Vec::with_capacity(4 + 4 * tensor.dims.len() + tensor.data.len());
    out.extend_from_slice(&magic.to_be_bytes());
    for &d in &tensor.dims {
        out.extend_from_slice(&(d as u32).to_be_bytes());
    }
    out.extend_from_slice(&tensor.data);
    out
}

pub fn load_idx(path: impl AsRef<Path>) -> Result<IdxTensor> {
    parse_idx(&fs::read(path)?)
}

pub fn write_idx(path: impl AsRef<Path>, tensor: &IdxTensor) -> Result<()> {
    fs::write(path, encode_idx(tensor))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_vector() {
        let bytes = [0, 0, 8, 1, 0, 0, 0, 3, 7, 2, 1];
        let t = parse_idx(&bytes).unwrap();
        assert_eq!(t.dims, vec![3]);
        assert_eq!(t.data, vec![7, 2, 1]);
    }

    #[test]
    fn two_images() {
        let mut bytes = vec![0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 28, 0, 0, 0, 28];
        bytes.extend(std::iter::repeat_n(9, 1568));
        let t = parse_idx(&bytes).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.item_size(), 784);
        assert_eq!(encode_idx(&t), bytes);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_idx(&[0, 0, 8, 1, 0, 0, 0, 3, 7, 2]), Err(Error::Format(_))));
        assert!(matches!(parse_idx(&[0, 0, 8, 1, 0, 0, 0, 1, 7, 2]), Err(Error::Format(_))));
        assert!(matches!(parse_idx(&[0, 0, 8, 2, 0, 0, 0, 1, 7]), Err(Error::Format(_))));
        assert!(matches!(parse_idx(&[0, 0, 8, 3, 0, 0]), Err(Error::Format(_))));
        assert!(matches!(parse_idx(&[]), Err(Error::Format(_))));
    }
}
