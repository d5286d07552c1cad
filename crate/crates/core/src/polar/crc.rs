//! CRC-16 with generator `z^16 + z^12 + z^5 + 1`.
//!
//! Register starts at zero, bits are processed MSB first, no reflection and
//! no final XOR. Bits are `u8` values in `{0, 1}`.

use crate::error::{Error, Result};

/// Generator polynomial without the leading `z^16` term.
pub const CRC16_POLY: u16 = 0x1021;

/// Remainder of `data * z^16` modulo the generator, as an integer.
pub fn crc16_value(data: &[u8]) -> u16 {
    data.iter().fold(0u16, |reg, &bit| {
        let feedback = ((reg >> 15) as u8 ^ (bit & 1)) != 0;
        let reg = reg << 1;
        if feedback {
            reg ^ CRC16_POLY
        } else {
            reg
        }
    })
}

/// The 16 CRC bits of `data`, most significant first.
pub fn crc16_compute(data: &[u8]) -> [u8; 16] {
    let v = crc16_value(data);
    std::array::from_fn(|i| ((v >> (15 - i)) & 1) as u8)
}

/// True iff the trailing 16 bits equal the CRC of the preceding bits.
pub fn crc16_check(data_with_crc: &[u8]) -> Result<bool> {
    if data_with_crc.len() < 17 {
        return Err(Error::CrcTooShort(data_with_crc.len()));
    }
    let (data, crc) = data_with_crc.split_at(data_with_crc.len() - 16);
    Ok(crc16_compute(data) == crc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use proptest::prelude::*;
    use rand::Rng;

    /// Schoolbook GF(2) long division of `data * z^16` by the full 17-bit
    /// generator.
    fn long_division(data: &[u8]) -> u16 {
        let gen: [u8; 17] = {
            let mut g = [0u8; 17];
            for p in [16, 12, 5, 0] {
                g[16 - p] = 1;
            }
            g
        };
        let mut work: Vec<u8> = data.to_vec();
        work.extend(std::iter::repeat_n(0, 16));
        for i in 0..data.len() {
            if work[i] == 1 {
                for (j, &g) in gen.iter().enumerate() {
                    work[i + j] ^= g;
                }
            }
        }
        work[data.len()..].iter().fold(0u16, |acc, &b| (acc << 1) | b as u16)
    }

    fn ascii_bits(s: &str) -> Vec<u8> {
        s.bytes()
            .flat_map(|byte| (0..8).rev().map(move |i| (byte >> i) & 1))
            .collect()
    }

    #[test]
    fn check_value_123456789() {
        let bits = ascii_bits("123456789");
        assert_eq!(bits.len(), 72);
        assert_eq!(long_division(&bits), 0x31C3);
        assert_eq!(crc16_value(&bits), 0x31C3);
    }

    #[test]
    fn zeros_have_zero_crc() {
        assert_eq!(crc16_compute(&[0; 24]), [0; 16]);
    }

    #[test]
    fn single_bit_flip_detected() {
        let mut msg: Vec<u8> = (0..24).map(|i| (i * 7 % 3 == 0) as u8).collect();
        let crc = crc16_compute(&msg);
        msg.extend_from_slice(&crc);
        assert!(crc16_check(&msg).unwrap());
        for i in 0..msg.len() {
            let mut bad = msg.clone();
            bad[i] ^= 1;
            assert!(!crc16_check(&bad).unwrap(), "flip at {i} undetected");
        }
    }

    #[test]
    fn too_short_is_error() {
        assert!(matches!(crc16_check(&[0; 16]), Err(Error::CrcTooShort(16))));
    }

    #[test]
    fn random_vectors_pass_at_chance_rate() {
        let mut rng = seed::rng(0xC0FFEE);
        let trials = 1_000_000u32;
        let mut buf = [0u8; 40];
        let mut hits = 0u32;
        for _ in 0..trials {
            let w: u64 = rng.random();
            for (i, b) in buf.iter_mut().enumerate() {
                *b = ((w >> i) & 1) as u8;
            }
            hits += crc16_check(&buf).unwrap() as u32;
        }
        let expected = trials as f64 / 65536.0;
        let rel = (hits as f64 - expected).abs() / expected;
        assert!(rel < 0.5, "hits {hits}, expected {expected:.1}");
    }

    proptest! {
        #[test]
        fn register_matches_long_division(data in proptest::collection::vec(0u8..2, 1..120)) {
            prop_assert_eq!(crc16_value(&data), long_division(&data));
        }

        #[test]
        fn appended_crc_checks(data in proptest::collection::vec(0u8..2, 1..64)) {
            let mut framed = data.clone();
            framed.extend_from_slice(&crc16_compute(&data));
            prop_assert!(crc16_check(&framed).unwrap());
        }
    }
}
