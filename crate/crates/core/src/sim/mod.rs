//! Monte-Carlo engine: BLER curves, operating-point calibration and the
//! two-stage missed-detection experiment.
//!
//! Work is split into fixed-size units whose seeds depend only on the root
//! seed and the unit index (see [`crate::seed`]); results are reduced in
//! index order, so the thread count never changes an output.

mod bler;
mod calibrate;
mod mdr;
mod output;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

pub use bler::{measure_bler, run_bler, BlockWorker};
pub use calibrate::{calibrate_operating_point, Calibration, CalibrationConfig};
pub use mdr::{run_mdr, run_trials, second_stage, tabulate, DetectorSpec, MdrRow, MdrTable, Series, TrialConfig, TrialOutcome};
pub use output::{format_float, write_bler_csv, write_mdr_csv};

use crate::error::{Error, Result};
use crate::polar::{assemble_message, PolarCode};

/// Decoder used for a BLER curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderSpec {
    Sc,
    FastSsc,
    Bp { iterations: usize },
    Scl { list: usize, crc: bool },
}

impl DecoderSpec {
    /// The five reference decoders: SC, BP with 15 and 50 iterations and
    /// CRC-aided SCL with lists of 2 and 4.
    pub fn reference_set() -> Vec<DecoderSpec> {
        vec![
            DecoderSpec::Sc,
            DecoderSpec::Bp { iterations: 15 },
            DecoderSpec::Bp { iterations: 50 },
            DecoderSpec::Scl { list: 2, crc: true },
            DecoderSpec::Scl { list: 4, crc: true },
        ]
    }
}

impl fmt::Display for DecoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecoderSpec::Sc => write!(f, "sc"),
            DecoderSpec::FastSsc => write!(f, "fastssc"),
            DecoderSpec::Bp { iterations } => write!(f, "bp{iterations}"),
            DecoderSpec::Scl { list, crc: true } => write!(f, "scl{list}"),
            DecoderSpec::Scl { list, crc: false } => write!(f, "scl{list}-nocrc"),
        }
    }
}

impl FromStr for DecoderSpec {
    type Err = Error;

    /// Accepts `sc`, `fastssc`, `bp<I>`, `scl<L>` (CRC-aided) and
    /// `scl<L>-nocrc`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || Error::Config(format!("unknown decoder {s:?} (expected sc, fastssc, bp<I>, scl<L> or scl<L>-nocrc)"));
        let number = |digits: &str| digits.parse::<usize>().ok().filter(|&v| v >= 1);
        match s.as_str() {
            "sc" => Ok(DecoderSpec::Sc),
            "fastssc" => Ok(DecoderSpec::FastSsc),
            _ => {
                if let Some(rest) = s.strip_prefix("bp") {
                    let iterations = number(rest).ok_or_else(bad)?;
                    Ok(DecoderSpec::Bp { iterations })
                } else if let Some(rest) = s.strip_prefix("scl") {
                    let (digits, crc) = match rest.strip_suffix("-nocrc") {
                        Some(d) => (d, false),
                        None => (rest, true),
                    };
                    let list = number(digits).ok_or_else(bad)?;
                    Ok(DecoderSpec::Scl { list, crc })
                } else {
                    Err(bad())
                }
            }
        }
    }
}

/// When to stop simulating one point: once both minimums are met, or at
/// `max_blocks`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_blocks: u64,
    pub min_errors: u64,
    pub max_blocks: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_blocks: 50_000,
            min_errors: 500,
            max_blocks: 20_000_000,
        }
    }
}

impl StopRule {
    pub fn done(&self, blocks: u64, errors: u64) -> bool {
        blocks >= self.max_blocks || (blocks >= self.min_blocks && errors >= self.min_errors)
    }
}

/// One point of a BLER or MDR curve: `y = count / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
    pub count: u64,
    pub n: u64,
}

impl CurvePoint {
    pub fn new(x: f64, count: u64, n: u64) -> Self {
        let y = if n == 0 { 0.0 } else { count as f64 / n as f64 };
        Self { x, y, count, n }
    }

    /// Binomial standard error of `y`.
    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.y * (1.0 - self.y) / self.n as f64).sqrt()
    }

    /// 95% Wilson score interval.
    pub fn wilson95(&self) -> (f64, f64) {
        if self.n == 0 {
            return (0.0, 1.0);
        }
        let z = 1.959_963_984_540_054;
        let n = self.n as f64;
        let p = self.y;
        let denom = 1.0 + z * z / n;
        let centre = (p + z * z / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
        ((centre - half).max(0.0), (centre + half).min(1.0))
    }
}

/// Random message for `code`: CRC-framed `K` bits when the code carries a
/// 16-bit CRC, otherwise uniform bits on the information set.
pub fn random_message<R: Rng + ?Sized>(code: &PolarCode, rng: &mut R) -> Vec<u8> {
    if code.crc_len() == 16 && code.k() > 0 {
        let bits: Vec<u8> = (0..code.k()).map(|_| rng.random::<bool>() as u8).collect();
        let split = code.k().min(16);
        assemble_message(code, &bits[..split], &bits[split..]).expect("layout matches code")
    } else {
        let mut u = vec![0u8; code.len()];
        for &i in code.info_set() {
            u[i] = rng.random::<bool>() as u8;
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoder_names_round_trip() {
        for spec in DecoderSpec::reference_set()
            .into_iter()
            .chain([DecoderSpec::FastSsc, DecoderSpec::Scl { list: 8, crc: false }])
        {
            assert_eq!(spec.to_string().parse::<DecoderSpec>().unwrap(), spec);
        }
        for bad in ["bp", "bp0", "scl", "ldpc", "scl2-crc"] {
            assert!(bad.parse::<DecoderSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn stop_rule() {
        let rule = StopRule {
            min_blocks: 10,
            min_errors: 3,
            max_blocks: 100,
        };
        assert!(!rule.done(9, 5));
        assert!(!rule.done(50, 2));
        assert!(rule.done(10, 3));
        assert!(rule.done(100, 0));
    }

    #[test]
    fn wilson_interval_brackets_estimate() {
        let p = CurvePoint::new(0.0, 10, 1000);
        let (lo, hi) = p.wilson95();
        assert!(lo < 0.01 && 0.01 < hi);
        assert_eq!(CurvePoint::new(1.0, 0, 0).y, 0.0);
    }
}
