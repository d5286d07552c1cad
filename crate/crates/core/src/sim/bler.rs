use log::info;
use rayon::prelude::*;

use super::{random_message, CurvePoint, DecoderSpec, StopRule};
use crate::channel::{transmit_into, ChannelParams};
use crate::decoders::{fastssc_build_tree, BpState, FastSscDecoder, ScDecoder, SclDecoder};
use crate::error::Result;
use crate::polar::PolarCode;
use crate::seed::{self, Stream};

/// Blocks per work unit.
const CHUNK: u64 = 250;

/// A decoder instance with its scratch state; one per worker.
#[derive(Debug, Clone)]
pub enum BlockWorker {
    Sc(ScDecoder),
    FastSsc(FastSscDecoder),
    Bp { state: BpState, iterations: usize },
    Scl(SclDecoder),
}

impl BlockWorker {
    pub fn new(code: &PolarCode, spec: DecoderSpec) -> Result<Self> {
        Ok(match spec {
            DecoderSpec::Sc => BlockWorker::Sc(ScDecoder::new(code)),
            DecoderSpec::FastSsc => BlockWorker::FastSsc(FastSscDecoder::new(fastssc_build_tree(code))),
            DecoderSpec::Bp { iterations } => BlockWorker::Bp {
                state: BpState::new(code, &vec![0.0; code.len()]),
                iterations,
            },
            DecoderSpec::Scl { list, crc } => BlockWorker::Scl(SclDecoder::new(code, list, crc)?),
        })
    }

    /// True iff the decoder returns exactly `u`. A CRC-aided list decoder
    /// that finds no CRC-passing path counts as an error.
    pub fn decodes_to(&mut self, code: &PolarCode, llrs: &[f64], u: &[u8]) -> bool {
        match self {
            BlockWorker::Sc(d) => d.decode(llrs) == u,
            BlockWorker::FastSsc(d) => d.decode(llrs) == u,
            BlockWorker::Bp { state, iterations } => {
                state.reset(code, llrs);
                for _ in 0..*iterations {
                    state.iterate();
                }
                state.u_hat(code) == u
            }
            BlockWorker::Scl(d) => d.decode(llrs).is_some_and(|dec| dec.u == u),
        }
    }
}

fn simulate_chunk(code: &PolarCode, spec: DecoderSpec, params: &ChannelParams, root_seed: u64, chunk: u64) -> Vec<bool> {
    let mut worker = BlockWorker::new(code, spec).expect("decoder validated before the run");
    let mut llrs = Vec::with_capacity(code.len());
    (chunk * CHUNK..(chunk + 1) * CHUNK)
        .map(|block| {
            let u = random_message(code, &mut seed::rng(seed::derive(root_seed, Stream::Message, block)));
            let x = code.encode(&u).expect("message respects frozen set");
            transmit_into(&x, params, &mut seed::rng(seed::derive(root_seed, Stream::Noise, block)), &mut llrs);
            !worker.decodes_to(code, &llrs, &u)
        })
        .collect()
}

/// BLER at one channel point. Block `i` always carries the same message and
/// the same unit-variance noise draw for a given `root_seed`, whatever the
/// Eb/N0, so neighbouring points are positively correlated.
pub fn measure_bler(
    code: &PolarCode,
    spec: DecoderSpec,
    params: &ChannelParams,
    stop: StopRule,
    root_seed: u64,
) -> Result<CurvePoint> {
    BlockWorker::new(code, spec)?;
    let batch = (rayon::current_num_threads() as u64 * 2).max(2);
    let (mut blocks, mut errors) = (0u64, 0u64);
    let mut next_chunk = 0u64;
    'outer: loop {
        let results: Vec<Vec<bool>> = (next_chunk..next_chunk + batch)
            .into_par_iter()
            .map(|c| simulate_chunk(code, spec, params, root_seed, c))
            .collect();
        next_chunk += batch;
        for flags in results {
            for failed in flags {
                blocks += 1;
                errors += failed as u64;
                if stop.done(blocks, errors) {
                    break 'outer;
                }
            }
        }
    }
    Ok(CurvePoint::new(params.ebn0_db(), errors, blocks))
}

/// BLER curve over `ebn0_db`; `None` entries are noiseless points.
pub fn run_bler(
    code: &PolarCode,
    spec: DecoderSpec,
    ebn0_db: &[Option<f64>],
    stop: StopRule,
    root_seed: u64,
) -> Result<Vec<CurvePoint>> {
    let mut out = Vec::with_capacity(ebn0_db.len());
    for &point in ebn0_db {
        let params = match point {
            Some(db) => ChannelParams::new(db, code.info_rate())?,
            None => ChannelParams::noiseless(code.info_rate()),
        };
        let cp = measure_bler(code, spec, &params, stop, root_seed)?;
        info!("{spec} Eb/N0={} BLER={:.3e} ({}/{})", params.ebn0_db(), cp.y, cp.count, cp.n);
        out.push(cp);
    }
    Ok(out)
}
