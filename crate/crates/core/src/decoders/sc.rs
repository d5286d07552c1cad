use super::kernel::{f_minsum, g_combine, levels};
use crate::channel::hard;
use crate::polar::PolarCode;

/// Successive-cancellation decoder with reusable scratch buffers.
///
/// LLRs of the node at depth `d` (size `2^d`) live in `alpha[2^d..2^(d+1)]`,
/// its partial sums in the same slice of `beta`.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    frozen: Vec<bool>,
    log_len: u32,
    alpha: Vec<f64>,
    beta: Vec<u8>,
    u: Vec<u8>,
}

impl ScDecoder {
    pub fn new(code: &PolarCode) -> Self {
        let len = code.len();
        Self {
            frozen: code.frozen_mask().to_vec(),
            log_len: code.log_len(),
            alpha: vec![0.0; 2 * len],
            beta: vec![0; 2 * len],
            u: vec![0; len],
        }
    }

    /// Returns `u_hat`; frozen bits are 0, information bits are 0 iff their
    /// decision LLR is non-negative.
    pub fn decode(&mut self, llrs: &[f64]) -> &[u8] {
        let len = self.frozen.len();
        assert_eq!(llrs.len(), len, "LLR vector length");
        self.alpha[len..].copy_from_slice(llrs);
        self.node(self.log_len, 0);
        &self.u
    }

    /// Re-encoded estimate `u_hat G` of the last decode.
    pub fn codeword(&self) -> &[u8] {
        let len = self.frozen.len();
        &self.beta[len..]
    }

    fn node(&mut self, depth: u32, start: usize) {
        if depth == 0 {
            let bit = if self.frozen[start] { 0 } else { hard(self.alpha[1]) };
            self.u[start] = bit;
            self.beta[1] = bit;
            return;
        }
        let m = 1usize << (depth - 1);
        {
            let (child, node) = levels(&mut self.alpha, m);
            let (a, b) = node.split_at(m);
            for j in 0..m {
                child[j] = f_minsum(a[j], b[j]);
            }
        }
        self.node(depth - 1, start);
        {
            let (cb, nb) = levels(&mut self.beta, m);
            nb[..m].copy_from_slice(cb);
            let (child, node) = levels(&mut self.alpha, m);
            let (a, b) = node.split_at(m);
            for j in 0..m {
                child[j] = g_combine(a[j], b[j], nb[j]);
            }
        }
        self.node(depth - 1, start + m);
        let (cb, nb) = levels(&mut self.beta, m);
        let (left, right) = nb.split_at_mut(m);
        for j in 0..m {
            left[j] ^= cb[j];
            right[j] = cb[j];
        }
    }
}

/// One-shot SC decode.
pub fn sc_decode(code: &PolarCode, llrs: &[f64]) -> Vec<u8> {
    ScDecoder::new(code).decode(llrs).to_vec()
}
