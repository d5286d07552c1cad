//! BPSK over AWGN with Eb/N0 normalised by the information rate `K/N`.
//!
//! Noise comes from a ChaCha8 stream ([`crate::seed::rng`]) and Gaussian
//! samples are drawn with the ziggurat method of `rand_distr::StandardNormal`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seed;

/// LLR magnitude emitted in noiseless mode.
pub const NOISELESS_LLR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    ebn0_db: f64,
    r_inf: f64,
    /// Noise variance per real dimension; zero means noiseless.
    sigma2: f64,
}

impl ChannelParams {
    /// `sigma2 = 1 / (2 r_inf 10^(ebn0_db / 10))`.
    pub fn new(ebn0_db: f64, r_inf: f64) -> Result<Self> {
        if !ebn0_db.is_finite() {
            return Err(Error::Channel(format!("Eb/N0 must be finite, got {ebn0_db}")));
        }
        if !(r_inf > 0.0 && r_inf <= 1.0) {
            return Err(Error::Channel(format!("information rate must lie in (0, 1], got {r_inf}")));
        }
        let sigma2 = 1.0 / (2.0 * r_inf * 10f64.powf(ebn0_db / 10.0));
        Ok(Self {
            ebn0_db,
            r_inf,
            sigma2,
        })
    }

    /// Infinite-SNR channel: no noise, LLRs of magnitude [`NOISELESS_LLR`].
    pub fn noiseless(r_inf: f64) -> Self {
        Self {
            ebn0_db: f64::INFINITY,
            r_inf,
            sigma2: 0.0,
        }
    }

    pub fn ebn0_db(&self) -> f64 {
        self.ebn0_db
    }

    pub fn r_inf(&self) -> f64 {
        self.r_inf
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn is_noiseless(&self) -> bool {
        self.sigma2 == 0.0
    }
}

/// Writes channel LLRs for codeword `x` into `out` drawing noise from `rng`.
pub fn transmit_into<R: Rng + ?Sized>(x: &[u8], params: &ChannelParams, rng: &mut R, out: &mut Vec<f64>) {
    out.clear();
    if params.is_noiseless() {
        out.extend(x.iter().map(|&b| if b == 0 { NOISELESS_LLR } else { -NOISELESS_LLR }));
        return;
    }
    let sigma = params.sigma2.sqrt();
    let scale = 2.0 / params.sigma2;
    out.extend(x.iter().map(|&b| {
        let s = 1.0 - 2.0 * b as f64;
        let n: f64 = rng.sample(StandardNormal);
        scale * (s + sigma * n)
    }));
}

/// BPSK-modulates `x`, adds AWGN and returns `LLR_i = 2 y_i / sigma2`.
pub fn transmit(x: &[u8], params: &ChannelParams, rng_seed: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    transmit_into(x, params, &mut seed::rng(rng_seed), &mut out);
    out
}

/// LLRs of `len` i.i.d. uniform bits sent through the same channel.
pub fn random_filler_block(len: usize, params: &ChannelParams, rng_seed: u64) -> Vec<f64> {
    let mut rng = seed::rng(rng_seed);
    let bits = random_bits(len, &mut rng);
    let mut out = Vec::with_capacity(len);
    transmit_into(&bits, params, &mut rng, &mut out);
    out
}

pub fn random_bits<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<u8> {
    (0..len).map(|_| rng.random::<bool>() as u8).collect()
}

/// Hard decision: 0 iff the LLR is non-negative.
#[inline]
pub fn hard(llr: f64) -> u8 {
    (llr < 0.0) as u8
}
