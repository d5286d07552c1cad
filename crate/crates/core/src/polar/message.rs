use super::code::PolarCode;
use super::crc::crc16_compute;
use crate::error::{Error, Result};

/// Control-message layout: identifier, payload and CRC, written into the
/// information set in ascending index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MessageLayout {
    pub identifier_bits: usize,
    pub payload_bits: usize,
    pub crc_bits: usize,
}

impl Default for MessageLayout {
    fn default() -> Self {
        Self {
            identifier_bits: 16,
            payload_bits: 8,
            crc_bits: 16,
        }
    }
}

impl MessageLayout {
    pub fn fits(&self, code: &PolarCode) -> bool {
        self.identifier_bits + self.payload_bits == code.k() && self.crc_bits == code.crc_len()
    }
}

/// Builds `u` with `identifier || payload || crc16(identifier || payload)`
/// on the information set and zeros elsewhere.
pub fn assemble_message(code: &PolarCode, identifier: &[u8], payload: &[u8]) -> Result<Vec<u8>> {
    let layout = MessageLayout {
        identifier_bits: identifier.len(),
        payload_bits: payload.len(),
        crc_bits: 16,
    };
    if !layout.fits(code) || identifier.is_empty() && payload.is_empty() {
        return Err(Error::Layout {
            identifier: layout.identifier_bits,
            payload: layout.payload_bits,
            crc: layout.crc_bits,
            k: code.k(),
            c: code.crc_len(),
        });
    }
    let mut info: Vec<u8> = identifier.iter().chain(payload).map(|b| b & 1).collect();
    let crc = crc16_compute(&info);
    info.extend_from_slice(&crc);
    let mut u = vec![0u8; code.len()];
    for (&pos, &bit) in code.info_set().iter().zip(&info) {
        u[pos] = bit;
    }
    Ok(u)
}

/// Bits of `u` on the information set, ascending index order.
pub fn extract_info(code: &PolarCode, u: &[u8]) -> Vec<u8> {
    code.info_set().iter().map(|&i| u[i]).collect()
}
