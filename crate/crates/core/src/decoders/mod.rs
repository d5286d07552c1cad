//! Polar decoders: SC, Fast-SSC, flooding scaled-min-sum BP and
//! (CRC-aided) SCL. All LLRs follow the `log P(0)/P(1)` convention and a
//! zero LLR always decides bit 0.

pub mod bp;
pub mod fastssc;
mod kernel;
pub mod sc;
pub mod scl;

pub use bp::{bp_decode, BpOutcome, BpState, BP_SCALE, BP_SATURATION};
pub use fastssc::{fastssc_build_tree, fastssc_decode, FastSscDecoder, FastSscTree, Leaf, NodeKind};
pub use sc::{sc_decode, ScDecoder};
pub use scl::{scl_decode, SclDecision, SclDecoder};
