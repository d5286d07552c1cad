use crate::error::{Error, Result};

/// Default Bhattacharyya seed `z0`.
pub const DEFAULT_DESIGN_PARAM: f64 = 0.5;

/// A polar code of length `N = 2^n` carrying `K` payload bits and a `C`-bit
/// CRC in its information set.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCode {
    log_len: u32,
    len: usize,
    k: usize,
    crc_len: usize,
    info_set: Vec<usize>,
    frozen_set: Vec<usize>,
    frozen_mask: Vec<bool>,
    reliability_order: Vec<usize>,
}

/// Bhattacharyya parameters of the `len` synthesized channels, seeded with
/// `z0`. Index bits are consumed MSB first: a 0 bit applies `2z - z^2`, a 1
/// bit applies `z^2`.
pub fn bhattacharyya(len: usize, z0: f64) -> Vec<f64> {
    let mut z = vec![z0];
    while z.len() < len {
        let mut next = Vec::with_capacity(z.len() * 2);
        for &v in &z {
            next.push(2.0 * v - v * v);
            next.push(v * v);
        }
        z = next;
    }
    z
}

fn check_len(len: usize) -> Result<u32> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::BlockLength(len));
    }
    Ok(len.trailing_zeros())
}

impl PolarCode {
    /// Builds the code from the Bhattacharyya reliability ranking. The
    /// `k + crc_len` channels with the smallest parameter carry information;
    /// ties rank the lower index as less reliable.
    pub fn build(len: usize, k: usize, crc_len: usize, design_param: f64) -> Result<Self> {
        let log_len = check_len(len)?;
        let info = k + crc_len;
        if info > len {
            return Err(Error::TooManyInfoBits { info, len });
        }
        if !(design_param > 0.0 && design_param < 1.0) {
            return Err(Error::Config(format!(
                "design parameter must lie in (0, 1), got {design_param}"
            )));
        }
        let z = bhattacharyya(len, design_param);
        let mut order: Vec<usize> = (0..len).collect();
        // least reliable first: larger z first, lower index first on ties
        order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
        Ok(Self::assemble(log_len, len, k, crc_len, order))
    }

    /// Builds a code with an explicit information set. The reliability order
    /// lists frozen indices first, then `info_set` in the given order.
    pub fn with_info_set(len: usize, k: usize, crc_len: usize, info_set: &[usize]) -> Result<Self> {
        let log_len = check_len(len)?;
        if info_set.len() != k + crc_len {
            return Err(Error::InfoSet(format!(
                "expected {} indices, got {}",
                k + crc_len,
                info_set.len()
            )));
        }
        let mut mark = vec![false; len];
        for &i in info_set {
            if i >= len || mark[i] {
                return Err(Error::InfoSet(format!("index {i} out of range or repeated")));
            }
            mark[i] = true;
        }
        let order: Vec<usize> = (0..len)
            .filter(|&i| !mark[i])
            .chain(info_set.iter().copied())
            .collect();
        Ok(Self::assemble(log_len, len, k, crc_len, order))
    }

    fn assemble(log_len: u32, len: usize, k: usize, crc_len: usize, order: Vec<usize>) -> Self {
        let n_frozen = len - k - crc_len;
        let mut frozen_mask = vec![true; len];
        for &i in &order[n_frozen..] {
            frozen_mask[i] = false;
        }
        let info_set = (0..len).filter(|&i| !frozen_mask[i]).collect();
        let frozen_set = (0..len).filter(|&i| frozen_mask[i]).collect();
        Self {
            log_len,
            len,
            k,
            crc_len,
            info_set,
            frozen_set,
            frozen_mask,
            reliability_order: order,
        }
    }

    /// Block length `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    /// `n = log2 N`.
    pub fn log_len(&self) -> u32 {
        self.log_len
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn crc_len(&self) -> usize {
        self.crc_len
    }

    /// `K / N`, the rate used for Eb/N0 normalisation.
    pub fn info_rate(&self) -> f64 {
        self.k as f64 / self.len as f64
    }

    /// Information set in ascending index order.
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    /// Frozen set in ascending index order.
    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen_mask
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen_mask[i]
    }

    /// All indices, least reliable first.
    pub fn reliability_order(&self) -> &[usize] {
        &self.reliability_order
    }

    /// `x = uG`. Fails if `u` has the wrong length or a nonzero frozen bit.
    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>> {
        if u.len() != self.len {
            return Err(Error::Length {
                expected: self.len,
                got: u.len(),
            });
        }
        if let Some(&i) = self.frozen_set.iter().find(|&&i| u[i] != 0) {
            return Err(Error::NonzeroFrozen(i));
        }
        let mut x = u.to_vec();
        polar_transform(&mut x);
        Ok(x)
    }
}

/// In-place butterfly for `v <- v G`, `G = [[1,0],[1,1]]^{(x) n}` over GF(2).
/// `G` is its own inverse, so this also maps a codeword back to `u`.
pub fn polar_transform(v: &mut [u8]) {
    let len = v.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in v.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Row-by-row product with an explicitly built Kronecker power.
    fn kron_generator(len: usize) -> Vec<Vec<u8>> {
        let mut g = vec![vec![1u8]];
        while g.len() < len {
            let m = g.len();
            let mut next = vec![vec![0u8; 2 * m]; 2 * m];
            for r in 0..m {
                for c in 0..m {
                    next[r][c] = g[r][c];
                    next[r + m][c] = g[r][c];
                    next[r + m][c + m] = g[r][c];
                }
            }
            g = next;
        }
        g
    }

    fn matrix_encode(u: &[u8]) -> Vec<u8> {
        let g = kron_generator(u.len());
        (0..u.len())
            .map(|c| (0..u.len()).fold(0u8, |acc, r| acc ^ (u[r] & g[r][c])))
            .collect()
    }

    #[test]
    fn n2_info_set_is_index_one() {
        for z0 in [0.1, 0.5, 0.9] {
            let code = PolarCode::build(2, 1, 0, z0).unwrap();
            assert_eq!(code.info_set(), &[1]);
        }
    }

    #[test]
    fn n4_single_bit_sits_at_three() {
        let code = PolarCode::build(4, 1, 0, 0.5).unwrap();
        assert_eq!(code.info_set(), &[3]);
        let z = bhattacharyya(4, 0.5);
        // 0.5 -> (0.75, 0.25) -> (0.9375, 0.5625, 0.4375, 0.0625)
        assert_eq!(z, vec![0.9375, 0.5625, 0.4375, 0.0625]);
    }

    #[test]
    fn control_code_dimensions() {
        let code = PolarCode::build(256, 24, 16, DEFAULT_DESIGN_PARAM).unwrap();
        assert_eq!(code.info_set().len(), 40);
        assert_eq!(code.frozen_set().len(), 216);
        assert_eq!(code.log_len(), 8);
        let again = PolarCode::build(256, 24, 16, DEFAULT_DESIGN_PARAM).unwrap();
        assert_eq!(code, again);
        // A is the top of the reliability order
        let mut top: Vec<usize> = code.reliability_order()[216..].to_vec();
        top.sort_unstable();
        assert_eq!(top, code.info_set());
    }

    #[test]
    fn partitions_index_range() {
        let code = PolarCode::build(64, 10, 6, 0.3).unwrap();
        let mut all: Vec<usize> = code.info_set().iter().chain(code.frozen_set()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..64).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(PolarCode::build(12, 2, 0, 0.5), Err(Error::BlockLength(12))));
        assert!(matches!(
            PolarCode::build(8, 6, 4, 0.5),
            Err(Error::TooManyInfoBits { info: 10, len: 8 })
        ));
        assert!(PolarCode::with_info_set(8, 2, 0, &[1, 1]).is_err());
    }

    #[test]
    fn small_encode_examples() {
        let code = PolarCode::build(2, 1, 0, 0.5).unwrap();
        assert_eq!(code.encode(&[0, 1]).unwrap(), vec![1, 1]);
        let code = PolarCode::build(4, 1, 0, 0.5).unwrap();
        assert_eq!(code.encode(&[0, 0, 0, 1]).unwrap(), vec![1, 1, 1, 1]);
        assert!(matches!(code.encode(&[1, 0, 0, 1]), Err(Error::NonzeroFrozen(0))));
        assert!(code.encode(&[0, 1]).is_err());
    }

    #[test]
    fn butterfly_matches_matrix_exhaustively_up_to_8() {
        for len in [2usize, 4, 8] {
            for word in 0..(1u32 << len) {
                let u: Vec<u8> = (0..len).map(|i| ((word >> i) & 1) as u8).collect();
                let mut x = u.clone();
                polar_transform(&mut x);
                assert_eq!(x, matrix_encode(&u));
            }
        }
    }

    proptest! {
        #[test]
        fn butterfly_matches_matrix(log in 4u32..=5, seed in any::<u64>()) {
            let len = 1usize << log;
            let u: Vec<u8> = (0..len).map(|i| ((seed.rotate_left(i as u32) ^ (seed >> (i % 7))) & 1) as u8).collect();
            let mut x = u.clone();
            polar_transform(&mut x);
            prop_assert_eq!(x, matrix_encode(&u));
        }

        #[test]
        fn transform_is_linear_and_involutive(a in proptest::collection::vec(0u8..2, 32), b in proptest::collection::vec(0u8..2, 32)) {
            let mut xa = a.clone();
            let mut xb = b.clone();
            let mut xab: Vec<u8> = a.iter().zip(&b).map(|(p, q)| p ^ q).collect();
            polar_transform(&mut xa);
            polar_transform(&mut xb);
            polar_transform(&mut xab);
            let sum: Vec<u8> = xa.iter().zip(&xb).map(|(p, q)| p ^ q).collect();
            prop_assert_eq!(&xab, &sum);
            polar_transform(&mut xa);
            prop_assert_eq!(xa, a);
        }
    }
}
