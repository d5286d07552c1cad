use log::info;

use super::{measure_bler, CurvePoint, DecoderSpec, StopRule};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::polar::PolarCode;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationConfig {
    /// Search interval in dB.
    pub lo_db: f64,
    pub hi_db: f64,
    /// Accept a point whose BLER is within this relative distance of target.
    pub rel_tol: f64,
    /// Stop once the bracket is narrower than this (dB).
    pub resolution_db: f64,
    pub stop: StopRule,
    pub root_seed: u64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            lo_db: 2.0,
            hi_db: 7.0,
            rel_tol: 0.1,
            resolution_db: 0.02,
            stop: StopRule::default(),
            root_seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub ebn0_db: f64,
    /// Measurement at `ebn0_db`.
    pub point: CurvePoint,
    /// Every evaluated point, in evaluation order.
    pub evaluations: Vec<CurvePoint>,
}

impl Calibration {
    /// Log-BLER interpolation between the closest evaluations on either
    /// side of `target`; finer than `ebn0_db`, which is a measured point.
    pub fn interpolated_db(&self, target: f64) -> f64 {
        let above = self.evaluations.iter().filter(|p| p.y > target).max_by(|a, b| a.x.total_cmp(&b.x));
        let below = self.evaluations.iter().filter(|p| p.y <= target).min_by(|a, b| a.x.total_cmp(&b.x));
        match (above, below) {
            (Some(lo), Some(hi)) if lo.x < hi.x => log_interp(lo, hi, target),
            _ => self.ebn0_db,
        }
    }
}

/// Finds the Eb/N0 at which `spec` reaches `target` BLER.
///
/// Bracketing search: each step splits the current bracket at the log-BLER
/// interpolation point, clamped to the middle half of the bracket, until a
/// measurement lands within `rel_tol` of the target or the bracket is
/// narrower than `resolution_db`. The same block seeds are reused at every
/// Eb/N0, which keeps the measured curve monotone in practice.
pub fn calibrate_operating_point(
    code: &PolarCode,
    spec: DecoderSpec,
    target: f64,
    cfg: &CalibrationConfig,
) -> Result<Calibration> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Config(format!("target BLER must lie in (0, 1), got {target}")));
    }
    if !(cfg.lo_db < cfg.hi_db) {
        return Err(Error::Config("calibration range must satisfy lo < hi".into()));
    }
    // enough blocks to see the target with min_errors errors
    let needed = (cfg.stop.min_errors as f64 / target).ceil() as u64;
    let stop = StopRule {
        max_blocks: cfg.stop.max_blocks.min(needed.max(cfg.stop.min_blocks) * 2),
        ..cfg.stop
    };
    let mut evaluations = Vec::new();
    let mut eval = |db: f64| -> Result<CurvePoint> {
        let p = measure_bler(code, spec, &ChannelParams::new(db, code.info_rate())?, stop, cfg.root_seed)?;
        info!("calibrate {spec}: Eb/N0={db:.4} dB BLER={:.4e} ({}/{})", p.y, p.count, p.n);
        evaluations.push(p);
        Ok(p)
    };
    let within = |p: &CurvePoint| (p.y - target).abs() <= cfg.rel_tol * target;

    let mut lo = eval(cfg.lo_db)?;
    let mut hi = eval(cfg.hi_db)?;
    if !(lo.y > target && hi.y < target) {
        return Err(Error::NotBracketed {
            target,
            lo: cfg.lo_db,
            hi: cfg.hi_db,
            bler_lo: lo.y,
            bler_hi: hi.y,
        });
    }
    let result = loop {
        if within(&lo) {
            break lo;
        }
        if within(&hi) {
            break hi;
        }
        let width = hi.x - lo.x;
        if width <= cfg.resolution_db {
            let db = log_interp(&lo, &hi, target);
            break eval(db)?;
        }
        let guess = log_interp(&lo, &hi, target).clamp(lo.x + 0.25 * width, hi.x - 0.25 * width);
        let mid = eval(guess)?;
        if mid.y > target {
            lo = mid;
        } else {
            hi = mid;
        }
    };
    Ok(Calibration {
        ebn0_db: result.x,
        point: result,
        evaluations,
    })
}

/// Eb/N0 where the straight line through `(x, log y)` of the two bracket
/// ends reaches `target`. Zero BLER is floored at half an error.
fn log_interp(lo: &CurvePoint, hi: &CurvePoint, target: f64) -> f64 {
    let floor = |p: &CurvePoint| p.y.max(0.5 / p.n.max(1) as f64).ln();
    let (ya, yb) = (floor(lo), floor(hi));
    if (ya - yb).abs() < 1e-12 {
        return 0.5 * (lo.x + hi.x);
    }
    let t = (ya - target.ln()) / (ya - yb);
    lo.x + t.clamp(0.0, 1.0) * (hi.x - lo.x)
}
