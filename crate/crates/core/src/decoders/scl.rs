//! Successive-cancellation list decoding with LLR-based path metrics,
//! optionally CRC-aided.

use super::kernel::{f_minsum, g_combine, levels};
use crate::channel::hard;
use crate::error::{Error, Result};
use crate::polar::{crc16_check, PolarCode};

#[derive(Debug, Clone)]
struct Path {
    alpha: Vec<f64>,
    beta: Vec<u8>,
    u: Vec<u8>,
    metric: f64,
}

/// A decoded path and its final metric (lower is better).
#[derive(Debug, Clone, PartialEq)]
pub struct SclDecision {
    pub u: Vec<u8>,
    pub metric: f64,
}

#[derive(Debug, Clone)]
pub struct SclDecoder {
    frozen: Vec<bool>,
    info_set: Vec<usize>,
    log_len: u32,
    list_size: usize,
    use_crc: bool,
    paths: Vec<Path>,
    spare: Vec<Path>,
    candidates: Vec<(f64, usize, u8)>,
}

impl SclDecoder {
    /// `use_crc` selects the best path whose information bits pass the
    /// CRC-16 check; the code must then carry a 16-bit CRC.
    pub fn new(code: &PolarCode, list_size: usize, use_crc: bool) -> Result<Self> {
        if list_size == 0 {
            return Err(Error::Config("list size must be at least 1".into()));
        }
        if use_crc && (code.crc_len() != 16 || code.k() == 0) {
            return Err(Error::Config(format!(
                "CRC-aided decoding needs K >= 1 and C = 16, code has K={}, C={}",
                code.k(),
                code.crc_len()
            )));
        }
        Ok(Self {
            frozen: code.frozen_mask().to_vec(),
            info_set: code.info_set().to_vec(),
            log_len: code.log_len(),
            list_size,
            use_crc,
            paths: Vec::with_capacity(list_size),
            spare: Vec::new(),
            candidates: Vec::with_capacity(2 * list_size),
        })
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    fn fresh_path(&mut self) -> Path {
        let len = self.frozen.len();
        self.spare.pop().unwrap_or_else(|| Path {
            alpha: vec![0.0; 2 * len],
            beta: vec![0; 2 * len],
            u: vec![0; len],
            metric: 0.0,
        })
    }

    /// Runs the list decoder and returns the surviving paths, best first
    /// (stable on equal metrics).
    pub fn decode_all(&mut self, llrs: &[f64]) -> Vec<SclDecision> {
        self.run(llrs);
        let mut order: Vec<usize> = (0..self.paths.len()).collect();
        order.sort_by(|&a, &b| self.paths[a].metric.total_cmp(&self.paths[b].metric));
        order
            .into_iter()
            .map(|i| SclDecision {
                u: self.paths[i].u.clone(),
                metric: self.paths[i].metric,
            })
            .collect()
    }

    /// Best path, or the best CRC-passing path when CRC-aided. `None` means
    /// no surviving path passed the CRC.
    pub fn decode(&mut self, llrs: &[f64]) -> Option<SclDecision> {
        self.run(llrs);
        let mut order: Vec<usize> = (0..self.paths.len()).collect();
        order.sort_by(|&a, &b| self.paths[a].metric.total_cmp(&self.paths[b].metric));
        let pick = if self.use_crc {
            let mut info = vec![0u8; self.info_set.len()];
            order.into_iter().find(|&i| {
                for (b, &pos) in info.iter_mut().zip(&self.info_set) {
                    *b = self.paths[i].u[pos];
                }
                crc16_check(&info).expect("info set holds at least 17 bits")
            })
        } else {
            order.first().copied()
        };
        pick.map(|i| SclDecision {
            u: self.paths[i].u.clone(),
            metric: self.paths[i].metric,
        })
    }

    fn run(&mut self, llrs: &[f64]) {
        let len = self.frozen.len();
        assert_eq!(llrs.len(), len, "LLR vector length");
        let old: Vec<Path> = self.paths.drain(..).collect();
        self.spare.extend(old);
        let mut root = self.fresh_path();
        root.alpha[len..].copy_from_slice(llrs);
        root.metric = 0.0;
        self.paths.push(root);
        self.node(self.log_len, 0);
    }

    fn node(&mut self, depth: u32, start: usize) {
        if depth == 0 {
            self.leaf(start);
            return;
        }
        let m = 1usize << (depth - 1);
        for p in &mut self.paths {
            let (child, node) = levels(&mut p.alpha, m);
            let (a, b) = node.split_at(m);
            for j in 0..m {
                child[j] = f_minsum(a[j], b[j]);
            }
        }
        self.node(depth - 1, start);
        for p in &mut self.paths {
            let (cb, nb) = levels(&mut p.beta, m);
            nb[..m].copy_from_slice(cb);
            let (child, node) = levels(&mut p.alpha, m);
            let (a, b) = node.split_at(m);
            for j in 0..m {
                child[j] = g_combine(a[j], b[j], nb[j]);
            }
        }
        self.node(depth - 1, start + m);
        for p in &mut self.paths {
            let (cb, nb) = levels(&mut p.beta, m);
            let (l, r) = nb.split_at_mut(m);
            for j in 0..m {
                l[j] ^= cb[j];
                r[j] = cb[j];
            }
        }
    }

    fn leaf(&mut self, i: usize) {
        if self.frozen[i] {
            for p in &mut self.paths {
                let a = p.alpha[1];
                if a < 0.0 {
                    p.metric += -a;
                }
                p.u[i] = 0;
                p.beta[1] = 0;
            }
            return;
        }
        self.candidates.clear();
        for (pi, p) in self.paths.iter().enumerate() {
            let a = p.alpha[1];
            let favoured = hard(a);
            for bit in 0..2u8 {
                let penalty = if bit == favoured { 0.0 } else { a.abs() };
                self.candidates.push((p.metric + penalty, pi, bit));
            }
        }
        // stable: earlier (path, bit) wins ties
        self.candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
        self.candidates.truncate(self.list_size);
        let mut keep = vec![[None; 2]; self.paths.len()];
        for &(metric, pi, bit) in &self.candidates {
            keep[pi][bit as usize] = Some(metric);
        }
        let old: Vec<Path> = self.paths.drain(..).collect();
        for (mut p, choice) in old.into_iter().zip(keep) {
            match choice {
                [None, None] => self.spare.push(p),
                [Some(m0), Some(m1)] => {
                    let mut q = self.fresh_path();
                    q.alpha.copy_from_slice(&p.alpha);
                    q.beta.copy_from_slice(&p.beta);
                    q.u.copy_from_slice(&p.u);
                    set_bit(&mut q, i, 0, m0);
                    self.paths.push(q);
                    set_bit(&mut p, i, 1, m1);
                    self.paths.push(p);
                }
                [Some(m), None] => {
                    set_bit(&mut p, i, 0, m);
                    self.paths.push(p);
                }
                [None, Some(m)] => {
                    set_bit(&mut p, i, 1, m);
                    self.paths.push(p);
                }
            }
        }
    }
}

fn set_bit(p: &mut Path, i: usize, bit: u8, metric: f64) {
    p.u[i] = bit;
    p.beta[1] = bit;
    p.metric = metric;
}

/// One-shot SCL decode returning `u_hat`, or `None` when CRC-aided decoding
/// finds no CRC-passing path.
pub fn scl_decode(code: &PolarCode, llrs: &[f64], list_size: usize, use_crc: bool) -> Result<Option<Vec<u8>>> {
    Ok(SclDecoder::new(code, list_size, use_crc)?.decode(llrs).map(|d| d.u))
}
