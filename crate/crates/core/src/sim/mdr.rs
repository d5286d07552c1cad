//! Two-stage blind detection trials.
//!
//! Each trial hides one polar-coded block among `M - 1` random filler blocks,
//! scores all `M` with the configured detectors, ranks them and records
//! where the coded block landed. A miss at `B` is a trial whose coded block
//! was decodable by CA-SCL (`L = 2`) yet ranked outside the best `B`. MDR is
//! reported over all trials.

use std::sync::atomic::{AtomicU64, Ordering};

use log::info;
use rand::Rng;
use rayon::prelude::*;

use super::random_message;
use crate::channel::{random_filler_block, transmit, ChannelParams};
use crate::decoders::{fastssc_build_tree, BpState, SclDecision, SclDecoder};
use crate::detection::{bp_metrics, rank_order, FastSscDetector, Method};
use crate::error::{Error, Result};
use crate::polar::PolarCode;
use crate::seed::{self, Stream};

/// One detection method swept over several effort levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorSpec {
    pub method: Method,
    /// BP iterations `I`, or contributing leaves `t` for Fast-SSC.
    pub efforts: Vec<usize>,
    /// Fast-SSC only: let SPC leaves update the metric.
    pub include_spc: bool,
}

impl DetectorSpec {
    pub fn new(method: Method, efforts: impl IntoIterator<Item = usize>) -> Self {
        Self {
            method,
            efforts: efforts.into_iter().collect(),
            include_spc: false,
        }
    }

    pub fn with_spc(mut self, include_spc: bool) -> Self {
        self.include_spc = include_spc;
        self
    }
}

/// A single MDR curve: method at one effort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Series {
    pub method: Method,
    pub effort: usize,
    pub include_spc: bool,
}

impl Series {
    /// Method column of the MDR CSV.
    pub fn label(&self) -> &'static str {
        match (self.method, self.include_spc) {
            (Method::FastSsc, false) => "fastssc-nospc",
            (m, _) => m.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    /// Blocks per trial, `M`.
    pub blocks: usize,
    pub detectors: Vec<DetectorSpec>,
    pub b_values: Vec<usize>,
    pub ebn0_db: f64,
    pub trials: u64,
    pub root_seed: u64,
    /// List size of the decoder deciding whether the coded block is decodable.
    pub oracle_list: usize,
    /// Run the CA-SCL second stage with this list size on every retained set.
    pub second_stage_list: Option<usize>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            blocks: 44,
            detectors: Vec::new(),
            b_values: (1..=44).collect(),
            ebn0_db: 4.286,
            trials: 10_000,
            root_seed: 1,
            oracle_list: 2,
            second_stage_list: None,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self, code: &PolarCode) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.blocks < 2 {
            return bad(format!("need at least 2 blocks per trial, got {}", self.blocks));
        }
        if self.trials == 0 {
            return bad("need at least one trial".into());
        }
        if self.b_values.is_empty() {
            return bad("no B values".into());
        }
        if let Some(&b) = self.b_values.iter().find(|&&b| b == 0 || b > self.blocks) {
            return Err(Error::RetainedCount { b, m: self.blocks });
        }
        if self.detectors.is_empty() {
            return bad("no detection method configured".into());
        }
        for d in &self.detectors {
            if d.efforts.is_empty() {
                return bad(format!("no effort levels for {}", d.method));
            }
            if let Some(&e) = d.efforts.iter().find(|&&e| e < d.method.min_effort()) {
                return match d.method {
                    Method::Ls => Err(Error::TooFewIterations { needed: 2, have: e }),
                    _ => bad(format!("effort {e} is below the minimum for {}", d.method)),
                };
            }
        }
        if code.crc_len() != 16 || code.k() == 0 {
            return bad("detection trials need a code with K >= 1 and a 16-bit CRC".into());
        }
        ChannelParams::new(self.ebn0_db, code.info_rate())?;
        Ok(())
    }

    /// All curves, detectors in order, efforts ascending and deduplicated.
    pub fn series(&self) -> Vec<Series> {
        let mut out = Vec::new();
        for d in &self.detectors {
            let mut efforts = d.efforts.clone();
            efforts.sort_unstable();
            efforts.dedup();
            for effort in efforts {
                let s = Series {
                    method: d.method,
                    effort,
                    include_spc: d.method == Method::FastSsc && d.include_spc,
                };
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out
    }
}

/// What happened in one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub true_block_position: usize,
    pub decodable: bool,
    /// 0-based rank of the coded block per series (0 = best).
    pub ranks: Vec<usize>,
    /// Per series and per B: did the second stage return the coded block's
    /// message? Empty when the second stage is disabled.
    pub second_stage_success: Vec<Vec<bool>>,
    /// Per series and per B: did a filler block win the second stage?
    pub second_stage_false_alarm: Vec<Vec<bool>>,
}

impl TrialOutcome {
    pub fn missed_at(&self, series: usize, b: usize) -> bool {
        self.decodable && self.ranks[series] >= b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdrRow {
    pub series: Series,
    pub b: usize,
    pub misses: u64,
    pub trials: u64,
    pub mdr: f64,
    pub second_stage_success: Option<u64>,
    pub second_stage_false_alarms: Option<u64>,
}

impl MdrRow {
    pub fn std_error(&self) -> f64 {
        (self.mdr * (1.0 - self.mdr) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdrTable {
    pub series: Vec<Series>,
    pub b_values: Vec<usize>,
    pub trials: u64,
    /// Trials whose coded block the oracle decoder recovered.
    pub decodable: u64,
    /// Series-major, B ascending within a series.
    pub rows: Vec<MdrRow>,
}

impl MdrTable {
    pub fn row(&self, series: &Series, b: usize) -> Option<&MdrRow> {
        self.rows.iter().find(|r| &r.series == series && r.b == b)
    }

    /// Looks up a row by method, effort and SPC flag.
    pub fn get(&self, method: Method, effort: usize, include_spc: bool, b: usize) -> Option<&MdrRow> {
        let s = Series {
            method,
            effort,
            include_spc: method == Method::FastSsc && include_spc,
        };
        self.row(&s, b)
    }

    pub fn mdr(&self, method: Method, effort: usize, include_spc: bool, b: usize) -> f64 {
        self.get(method, effort, include_spc, b)
            .unwrap_or_else(|| panic!("no MDR row for {method} effort {effort} B {b}"))
            .mdr
    }
}

/// Picks the winner among `retained` candidates: the CRC-passing decode with
/// the lowest path metric, earlier candidates winning ties.
fn select_winner(decisions: &[Option<SclDecision>], retained: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in retained {
        if let Some(d) = &decisions[j] {
            if best.is_none_or(|(_, m)| d.metric < m) {
                best = Some((j, d.metric));
            }
        }
    }
    best.map(|(j, _)| j)
}

/// Second stage: CA-SCL with list `list` on every candidate. Returns the
/// position of the CRC-passing candidate with the best path metric, or
/// `None` when no candidate passes.
pub fn second_stage(code: &PolarCode, candidates: &[Vec<f64>], list: usize) -> Result<Option<usize>> {
    if candidates.is_empty() {
        return Err(Error::Config("second stage needs at least one candidate".into()));
    }
    let mut dec = SclDecoder::new(code, list, true)?;
    let decisions: Vec<_> = candidates.iter().map(|c| dec.decode(c)).collect();
    let all: Vec<usize> = (0..candidates.len()).collect();
    Ok(select_winner(&decisions, &all))
}

struct TrialWorker<'a> {
    code: &'a PolarCode,
    cfg: &'a TrialConfig,
    series: &'a [Series],
    params: ChannelParams,
    bp: Option<BpState>,
    bp_max: usize,
    fast: Option<FastSscDetector>,
    oracle: SclDecoder,
    second: Option<SclDecoder>,
    reencode_buf: Vec<u8>,
}

impl<'a> TrialWorker<'a> {
    fn new(code: &'a PolarCode, cfg: &'a TrialConfig, series: &'a [Series], params: ChannelParams) -> Self {
        let bp_max = series.iter().filter(|s| s.method.is_bp()).map(|s| s.effort).max().unwrap_or(0);
        let has_fast = series.iter().any(|s| s.method == Method::FastSsc);
        Self {
            code,
            cfg,
            series,
            params,
            bp: (bp_max > 0).then(|| BpState::new(code, &vec![0.0; code.len()])),
            bp_max,
            fast: has_fast.then(|| FastSscDetector::new(fastssc_build_tree(code))),
            oracle: SclDecoder::new(code, cfg.oracle_list, true).expect("validated code"),
            second: cfg
                .second_stage_list
                .map(|l| SclDecoder::new(code, l, true).expect("validated code")),
            reencode_buf: Vec::with_capacity(code.len()),
        }
    }

    /// Metric values, `values[series][block]`.
    fn score(&mut self, blocks: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut values = vec![vec![0.0; blocks.len()]; self.series.len()];
        for (j, llrs) in blocks.iter().enumerate() {
            if let Some(state) = self.bp.as_mut() {
                state.reset(self.code, llrs);
                for _ in 0..self.bp_max {
                    state.iterate();
                    let it = state.iteration();
                    if !self.series.iter().any(|s| s.method.is_bp() && s.effort == it) {
                        continue;
                    }
                    let [ls, fs, re] = bp_metrics(state, self.code, &mut self.reencode_buf);
                    for (si, s) in self.series.iter().enumerate() {
                        if s.effort != it {
                            continue;
                        }
                        let v = match s.method {
                            Method::Ls => ls,
                            Method::Fs => fs,
                            Method::Re => re,
                            Method::FastSsc => continue,
                        };
                        values[si][j] = v.expect("LS effort validated >= 2");
                    }
                }
            }
            if let Some(det) = self.fast.as_mut() {
                for include_spc in [false, true] {
                    let wanted: Vec<usize> = (0..self.series.len())
                        .filter(|&si| {
                            let s = &self.series[si];
                            s.method == Method::FastSsc && s.include_spc == include_spc
                        })
                        .collect();
                    let Some(t_max) = wanted.iter().map(|&si| self.series[si].effort).max() else {
                        continue;
                    };
                    let trace = det.trace(llrs, include_spc, t_max);
                    for si in wanted {
                        let t = self.series[si].effort.min(trace.len());
                        values[si][j] = if t == 0 { 0.0 } else { trace[t - 1] };
                    }
                }
            }
        }
        values
    }

    fn run(&mut self, trial: u64) -> TrialOutcome {
        let cfg = self.cfg;
        let root = cfg.root_seed;
        let m = cfg.blocks;
        let len = self.code.len();
        let pos = seed::rng(seed::derive(root, Stream::Placement, trial)).random_range(0..m);
        let u = random_message(self.code, &mut seed::rng(seed::derive(root, Stream::Message, trial)));
        let x = self.code.encode(&u).expect("message respects frozen set");
        let blocks: Vec<Vec<f64>> = (0..m)
            .map(|j| {
                if j == pos {
                    transmit(&x, &self.params, seed::derive2(root, Stream::Noise, trial, j as u64))
                } else {
                    random_filler_block(len, &self.params, seed::derive2(root, Stream::Filler, trial, j as u64))
                }
            })
            .collect();
        let decodable = self.oracle.decode(&blocks[pos]).is_some_and(|d| d.u == u);
        let values = self.score(&blocks);
        let tie_seed = seed::derive(root, Stream::TieBreak, trial);
        let orders: Vec<Vec<usize>> = values.iter().map(|v| rank_order(v, tie_seed)).collect();
        let ranks = orders
            .iter()
            .map(|o| o.iter().position(|&j| j == pos).expect("order is a permutation"))
            .collect();

        let (mut success, mut false_alarm) = (Vec::new(), Vec::new());
        if let Some(dec) = self.second.as_mut() {
            let decisions: Vec<Option<SclDecision>> = blocks.iter().map(|b| dec.decode(b)).collect();
            for order in &orders {
                let (mut ok, mut fa) = (Vec::new(), Vec::new());
                for &b in &cfg.b_values {
                    let winner = select_winner(&decisions, &order[..b]);
                    ok.push(winner == Some(pos) && decisions[pos].as_ref().is_some_and(|d| d.u == u));
                    fa.push(winner.is_some_and(|w| w != pos));
                }
                success.push(ok);
                false_alarm.push(fa);
            }
        }
        TrialOutcome {
            true_block_position: pos,
            decodable,
            ranks,
            second_stage_success: success,
            second_stage_false_alarm: false_alarm,
        }
    }
}

/// Runs all trials and returns per-trial outcomes in trial order.
pub fn run_trials(cfg: &TrialConfig, code: &PolarCode) -> Result<(Vec<Series>, Vec<TrialOutcome>)> {
    cfg.validate(code)?;
    let series = cfg.series();
    let params = ChannelParams::new(cfg.ebn0_db, code.info_rate())?;
    let done = AtomicU64::new(0);
    let step = (cfg.trials / 10).max(1);
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map_init(
            || TrialWorker::new(code, cfg, &series, params),
            |w, t| {
                let out = w.run(t);
                let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                if n.is_multiple_of(step) {
                    info!("mdr: {n}/{} trials", cfg.trials);
                }
                out
            },
        )
        .collect();
    Ok((series, outcomes))
}

/// MDR for every configured series and B.
pub fn run_mdr(cfg: &TrialConfig, code: &PolarCode) -> Result<MdrTable> {
    let (series, outcomes) = run_trials(cfg, code)?;
    Ok(tabulate(cfg, series, &outcomes))
}

/// Counts misses per series and B from the outcomes of [`run_trials`].
pub fn tabulate(cfg: &TrialConfig, series: Vec<Series>, outcomes: &[TrialOutcome]) -> MdrTable {
    let decodable = outcomes.iter().filter(|o| o.decodable).count() as u64;
    let with_second = cfg.second_stage_list.is_some();
    let mut rows = Vec::with_capacity(series.len() * cfg.b_values.len());
    let mut b_values = cfg.b_values.clone();
    b_values.sort_unstable();
    b_values.dedup();
    for (si, s) in series.iter().enumerate() {
        for &b in &b_values {
            let bi = cfg.b_values.iter().position(|&v| v == b).expect("b from config");
            let misses = outcomes.iter().filter(|o| o.missed_at(si, b)).count() as u64;
            let count = |f: fn(&TrialOutcome) -> &Vec<Vec<bool>>| {
                with_second.then(|| outcomes.iter().filter(|o| f(o)[si][bi]).count() as u64)
            };
            rows.push(MdrRow {
                series: *s,
                b,
                misses,
                trials: cfg.trials,
                mdr: misses as f64 / cfg.trials as f64,
                second_stage_success: count(|o| &o.second_stage_success),
                second_stage_false_alarms: count(|o| &o.second_stage_false_alarm),
            });
        }
    }
    MdrTable {
        series,
        b_values,
        trials: cfg.trials,
        decodable,
        rows,
    }
}
