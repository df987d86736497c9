//! Single-file model container.
//!
//! Layout: 8-byte magic, payload length as little-endian `u64`, payload bytes,
//! CRC-32 (IEEE) of the payload as little-endian `u32`.

use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: String },
    #[error("truncated: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("{0} trailing bytes after checksum")]
    TrailingBytes(usize),
}

pub fn encode(magic: &[u8; 8], payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload.len() + 20);
    out.extend_from_slice(magic);
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(payload);
    out.extend_from_slice(&crc32fast::hash(payload).to_le_bytes());
    out
}

/// Returns the payload slice after checking magic, length and checksum.
pub fn decode<'a>(magic: &[u8; 8], bytes: &'a [u8]) -> Result<&'a [u8], ContainerError> {
    if bytes.len() < 16 {
        return Err(ContainerError::Truncated { need: 16, have: bytes.len() });
    }
    if &bytes[..8] != magic {
        return Err(ContainerError::BadMagic { expected: String::from_utf8_lossy(magic).into_owned() });
    }
    let len = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let need = usize::try_from(len)
        .ok()
        .and_then(|l| l.checked_add(20))
        .ok_or(ContainerError::Truncated { need: usize::MAX, have: bytes.len() })?;
    if bytes.len() < need {
        return Err(ContainerError::Truncated { need, have: bytes.len() });
    }
    if bytes.len() > need {
        return Err(ContainerError::TrailingBytes(bytes.len() - need));
    }
    let payload = &bytes[16..need - 4];
    let stored = u32::from_le_bytes(bytes[need - 4..need].try_into().expect("4 bytes"));
    let computed = crc32fast::hash(payload);
    if stored != computed {
        return Err(ContainerError::Checksum { stored, computed });
    }
    Ok(payload)
}
