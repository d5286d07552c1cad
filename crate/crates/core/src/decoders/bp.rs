//! Flooding scaled-min-sum belief propagation on the polar factor graph.
//!
//! The graph has `n + 1` columns of `N` nodes. Column 0 is the `u` side,
//! column `n` the channel side; stage `s` joins columns `s` and `s + 1`
//! with butterflies of half-width `2^s`, mirroring [`crate::polar::polar_transform`].
//! `left` holds right-to-left messages, `right` left-to-right messages.

use crate::channel::hard;
use crate::polar::{polar_transform, PolarCode};

/// Check-node scaling factor.
pub const BP_SCALE: f64 = 0.9375;
/// Frozen-bit prior and message clamp.
pub const BP_SATURATION: f64 = 1e6;

const SIGN: u64 = 1 << 63;

/// Scaled min-sum check node, branch-free so the stage loops vectorise.
#[inline(always)]
fn check(a: f64, b: f64) -> f64 {
    let m = BP_SCALE * a.abs().min(b.abs());
    f64::from_bits(m.to_bits() ^ ((a.to_bits() ^ b.to_bits()) & SIGN))
}

#[inline(always)]
fn sat(v: f64) -> f64 {
    v.clamp(-BP_SATURATION, BP_SATURATION)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpState {
    log_len: u32,
    len: usize,
    left: Vec<f64>,
    right: Vec<f64>,
    iteration: usize,
    alpha: Vec<f64>,
    alpha_prev: Vec<f64>,
    beta: Vec<f64>,
}

impl BpState {
    /// Channel LLRs in the rightmost `left` column, `+SAT` priors on frozen
    /// indices in the leftmost `right` column, everything else zero.
    pub fn new(code: &PolarCode, llrs: &[f64]) -> Self {
        let len = code.len();
        let cols = code.log_len() as usize + 1;
        let mut state = Self {
            log_len: code.log_len(),
            len,
            left: vec![0.0; cols * len],
            right: vec![0.0; cols * len],
            iteration: 0,
            alpha: vec![0.0; len],
            alpha_prev: vec![0.0; len],
            beta: vec![0.0; len],
        };
        state.reset(code, llrs);
        state
    }

    /// Re-initialises in place for a new block of the same code.
    pub fn reset(&mut self, code: &PolarCode, llrs: &[f64]) {
        assert_eq!(llrs.len(), self.len, "LLR vector length");
        assert_eq!(code.len(), self.len, "code length");
        let n = self.log_len as usize;
        self.left.fill(0.0);
        self.right.fill(0.0);
        self.left[n * self.len..].copy_from_slice(llrs);
        for (r, &frozen) in self.right[..self.len].iter_mut().zip(code.frozen_mask()) {
            *r = if frozen { BP_SATURATION } else { 0.0 };
        }
        self.iteration = 0;
        self.alpha.fill(0.0);
        self.alpha_prev.fill(0.0);
        self.beta.fill(0.0);
    }

    /// One flooding iteration: a right-to-left sweep from the channel column
    /// to the `u` column, then a left-to-right sweep back.
    pub fn iterate(&mut self) {
        let len = self.len;
        let n = self.log_len as usize;
        for s in (0..n).rev() {
            let half = 1usize << s;
            let (lo, hi) = self.left.split_at_mut((s + 1) * len);
            let l_out = &mut lo[s * len..];
            let l_in = &hi[..len];
            let r_in = &self.right[s * len..(s + 1) * len];
            for ((lo_blk, li_blk), ri_blk) in l_out
                .chunks_exact_mut(2 * half)
                .zip(l_in.chunks_exact(2 * half))
                .zip(r_in.chunks_exact(2 * half))
            {
                let (out_a, out_b) = lo_blk.split_at_mut(half);
                let (in_a, in_b) = li_blk.split_at(half);
                let (r_a, r_b) = ri_blk.split_at(half);
                for j in 0..half {
                    out_a[j] = sat(check(in_a[j], in_b[j] + r_b[j]));
                    out_b[j] = sat(check(r_a[j], in_a[j]) + in_b[j]);
                }
            }
        }
        for s in 0..n {
            let half = 1usize << s;
            let (lo, hi) = self.right.split_at_mut((s + 1) * len);
            let r_in = &lo[s * len..];
            let r_out = &mut hi[..len];
            let l_in = &self.left[(s + 1) * len..(s + 2) * len];
            for ((ro_blk, ri_blk), li_blk) in r_out
                .chunks_exact_mut(2 * half)
                .zip(r_in.chunks_exact(2 * half))
                .zip(l_in.chunks_exact(2 * half))
            {
                let (out_a, out_b) = ro_blk.split_at_mut(half);
                let (r_a, r_b) = ri_blk.split_at(half);
                let (in_a, in_b) = li_blk.split_at(half);
                for j in 0..half {
                    out_a[j] = sat(check(r_a[j], in_b[j] + r_b[j]));
                    out_b[j] = sat(check(r_a[j], in_a[j]) + r_b[j]);
                }
            }
        }
        std::mem::swap(&mut self.alpha_prev, &mut self.alpha);
        self.alpha.copy_from_slice(&self.left[..len]);
        let channel = &self.left[n * len..];
        let extrinsic = &self.right[n * len..];
        for ((b, &c), &e) in self.beta.iter_mut().zip(channel).zip(extrinsic) {
            *b = c + e;
        }
        self.iteration += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Completed iterations `I`.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Decision LLRs for `u` after iteration `I`. Frozen positions carry the
    /// extrinsic message only; the `+SAT` prior is excluded.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Decision LLRs of iteration `I - 1`.
    pub fn alpha_prev(&self) -> &[f64] {
        &self.alpha_prev
    }

    /// Decision LLRs for `x`: channel plus left-to-right extrinsic.
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Right-to-left message column `c` (0 = `u` side).
    pub fn left_column(&self, c: usize) -> &[f64] {
        &self.left[c * self.len..(c + 1) * self.len]
    }

    /// Left-to-right message column `c`.
    pub fn right_column(&self, c: usize) -> &[f64] {
        &self.right[c * self.len..(c + 1) * self.len]
    }

    /// `u_hat` with frozen bits forced to zero.
    pub fn u_hat(&self, code: &PolarCode) -> Vec<u8> {
        self.alpha
            .iter()
            .zip(code.frozen_mask())
            .map(|(&a, &frozen)| if frozen { 0 } else { hard(a) })
            .collect()
    }

    /// `x_hat`: 0 iff `beta_i >= 0`.
    pub fn x_hat(&self) -> Vec<u8> {
        self.beta.iter().map(|&b| hard(b)).collect()
    }

    /// `u_hat G`.
    pub fn reencoded(&self, code: &PolarCode) -> Vec<u8> {
        let mut x = self.u_hat(code);
        polar_transform(&mut x);
        x
    }
}

#[derive(Debug, Clone)]
pub struct BpOutcome {
    pub u_hat: Vec<u8>,
    pub x_hat: Vec<u8>,
    pub state: BpState,
}

/// Runs `max_iters` flooding iterations and takes hard decisions.
pub fn bp_decode(code: &PolarCode, llrs: &[f64], max_iters: usize) -> BpOutcome {
    assert!(max_iters >= 1, "BP needs at least one iteration");
    let mut state = BpState::new(code, llrs);
    for _ in 0..max_iters {
        state.iterate();
    }
    BpOutcome {
        u_hat: state.u_hat(code),
        x_hat: state.x_hat(),
        state,
    }
}
