//! Polar code construction, encoding, message assembly and CRC-16.

mod code;
pub mod crc;
mod message;

pub use code::{bhattacharyya, polar_transform, PolarCode, DEFAULT_DESIGN_PARAM};
pub use crc::{crc16_check, crc16_compute, crc16_value, CRC16_POLY};
pub use message::{assemble_message, extract_info, MessageLayout};
