//! First-stage detection metrics and candidate ranking.
//!
//! Every metric is oriented so that a larger value looks more like a
//! codeword of the expected code:
//!
//! * `LS` counts decision-LLR signs of `u` unchanged between BP iterations
//!   `I - 1` and `I`;
//! * `FS` counts frozen positions whose extrinsic decision LLR is non-negative;
//! * `RE` counts positions where the re-encoded `u_hat G` agrees with the
//!   hard decisions on `x`;
//! * `FASTSSC` accumulates per-leaf scores while a Fast-SSC decoder walks the
//!   tree, stopping after `t` contributing leaves.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;

use crate::channel::hard;
use crate::decoders::fastssc::{contributes, FastSscDecoder, FastSscTree, Leaf, NodeKind};
use crate::decoders::BpState;
use crate::error::{Error, Result};
use crate::polar::{polar_transform, PolarCode};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Ls,
    Fs,
    Re,
    FastSsc,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ls, Method::Fs, Method::Re, Method::FastSsc];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Ls => "ls",
            Method::Fs => "fs",
            Method::Re => "re",
            Method::FastSsc => "fastssc",
        }
    }

    /// Smallest meaningful effort.
    pub fn min_effort(&self) -> usize {
        match self {
            Method::Ls => 2,
            _ => 1,
        }
    }

    pub fn is_bp(&self) -> bool {
        !matches!(self, Method::FastSsc)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown detection method {s:?} (expected ls, fs, re or fastssc)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionMetricValue {
    pub value: f64,
    /// BP iterations `I`, or contributing leaves visited `t`.
    pub effort: usize,
    pub method: Method,
}

fn need_iterations(state: &BpState, needed: usize) -> Result<()> {
    if state.iteration() < needed {
        return Err(Error::TooFewIterations {
            needed,
            have: state.iteration(),
        });
    }
    Ok(())
}

/// Number of positions whose decision-LLR sign is the same at `I` and `I - 1`.
pub fn metric_ls(state: &BpState) -> Result<DetectionMetricValue> {
    need_iterations(state, 2)?;
    let same = state
        .alpha()
        .iter()
        .zip(state.alpha_prev())
        .filter(|(&a, &b)| (a >= 0.0) == (b >= 0.0))
        .count();
    Ok(DetectionMetricValue {
        value: same as f64,
        effort: state.iteration(),
        method: Method::Ls,
    })
}

/// Number of frozen positions with a non-negative extrinsic decision LLR.
pub fn metric_fs(state: &BpState, code: &PolarCode) -> Result<DetectionMetricValue> {
    need_iterations(state, 1)?;
    let alpha = state.alpha();
    let count = code.frozen_set().iter().filter(|&&i| alpha[i] >= 0.0).count();
    Ok(DetectionMetricValue {
        value: count as f64,
        effort: state.iteration(),
        method: Method::Fs,
    })
}

/// Agreement between `u_hat G` and `x_hat`.
pub fn metric_re(state: &BpState, code: &PolarCode) -> Result<DetectionMetricValue> {
    need_iterations(state, 1)?;
    let mut buf = Vec::new();
    Ok(DetectionMetricValue {
        value: reencode_agreement(state, code, &mut buf) as f64,
        effort: state.iteration(),
        method: Method::Re,
    })
}

pub(crate) fn reencode_agreement(state: &BpState, code: &PolarCode, buf: &mut Vec<u8>) -> usize {
    buf.clear();
    buf.extend(
        state
            .alpha()
            .iter()
            .zip(code.frozen_mask())
            .map(|(&a, &frozen)| if frozen { 0 } else { hard(a) }),
    );
    polar_transform(buf);
    buf.iter().zip(state.beta()).filter(|(&x, &b)| x == hard(b)).count()
}

/// All three BP metrics of the current state in one pass; `LS` is `None`
/// before the second iteration.
pub fn bp_metrics(state: &BpState, code: &PolarCode, buf: &mut Vec<u8>) -> [Option<f64>; 3] {
    let ls = (state.iteration() >= 2).then(|| {
        state
            .alpha()
            .iter()
            .zip(state.alpha_prev())
            .filter(|(&a, &b)| (a >= 0.0) == (b >= 0.0))
            .count() as f64
    });
    let alpha = state.alpha();
    let fs = code.frozen_set().iter().filter(|&&i| alpha[i] >= 0.0).count() as f64;
    let re = reencode_agreement(state, code, buf) as f64;
    [ls, Some(fs), Some(re)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FastSscDetectorConfig {
    pub include_spc: bool,
    pub t_max: usize,
}

/// Score contributed by one leaf with input LLRs `llrs`.
///
/// RATE0 adds the mean LLR, REP the magnitude of the mean LLR, SPC the
/// smallest magnitude signed by the hard-decision parity (+ when even).
pub fn leaf_update(kind: NodeKind, llrs: &[f64]) -> f64 {
    let size = llrs.len() as f64;
    match kind {
        NodeKind::Rate0 => llrs.iter().sum::<f64>() / size,
        NodeKind::Rep => llrs.iter().sum::<f64>().abs() / size,
        NodeKind::Spc => {
            let parity = llrs.iter().fold(0u8, |p, &a| p ^ hard(a));
            let weakest = llrs.iter().fold(f64::INFINITY, |m, a| m.min(a.abs()));
            if parity == 0 {
                weakest
            } else {
                -weakest
            }
        }
        NodeKind::Rate1 | NodeKind::Branch => 0.0,
    }
}

/// Staged Fast-SSC detector. Holds decoder scratch; one per worker.
#[derive(Debug, Clone)]
pub struct FastSscDetector {
    decoder: FastSscDecoder,
}

impl FastSscDetector {
    pub fn new(tree: FastSscTree) -> Self {
        Self {
            decoder: FastSscDecoder::new(tree),
        }
    }

    pub fn tree(&self) -> &FastSscTree {
        self.decoder.tree()
    }

    /// `D_t` after each contributing leaf, `t = 1..=min(t_max, available)`.
    pub fn trace(&mut self, llrs: &[f64], include_spc: bool, t_max: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(t_max.min(llrs.len()));
        let mut metric = 0.0;
        self.decoder.traverse(llrs, &mut |leaf: &Leaf, alpha: &[f64]| {
            if out.len() >= t_max {
                return false;
            }
            if contributes(leaf.kind, include_spc) {
                metric += leaf_update(leaf.kind, alpha);
                out.push(metric);
            }
            true
        });
        out
    }

    pub fn detect(&mut self, llrs: &[f64], cfg: FastSscDetectorConfig) -> Result<DetectionMetricValue> {
        if cfg.t_max == 0 {
            return Err(Error::Config("t_max must be at least 1".into()));
        }
        let trace = self.trace(llrs, cfg.include_spc, cfg.t_max);
        Ok(DetectionMetricValue {
            value: trace.last().copied().unwrap_or(0.0),
            effort: trace.len(),
            method: Method::FastSsc,
        })
    }
}

/// One-shot staged Fast-SSC detection. If fewer than `t_max` contributing
/// leaves exist, the full-traversal metric is returned with the actual count
/// as effort.
pub fn fastssc_detect(tree: &FastSscTree, llrs: &[f64], cfg: FastSscDetectorConfig) -> Result<DetectionMetricValue> {
    FastSscDetector::new(tree.clone()).detect(llrs, cfg)
}

/// All `M` indices, most codeword-like first. Ties fall in the order of a
/// uniform permutation seeded by `tie_seed`.
pub fn rank_order(values: &[f64], tie_seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.shuffle(&mut seed::rng(tie_seed));
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

/// Indices of the `b` best blocks.
pub fn rank_candidates(metrics: &[DetectionMetricValue], b: usize, tie_seed: u64) -> Result<Vec<usize>> {
    let m = metrics.len();
    if b == 0 || b > m {
        return Err(Error::RetainedCount { b, m });
    }
    let first = metrics[0];
    if metrics.iter().any(|v| v.method != first.method || v.effort != first.effort) {
        return Err(Error::MixedMetrics);
    }
    let values: Vec<f64> = metrics.iter().map(|v| v.value).collect();
    let mut order = rank_order(&values, tie_seed);
    order.truncate(b);
    Ok(order)
}
