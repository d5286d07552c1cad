//! Min-sum update rules shared by the successive-cancellation decoders.

/// `sign(a) sign(b) min(|a|, |b|)`.
#[inline(always)]
pub(crate) fn f_minsum(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

/// `b + (1 - 2u) a`.
#[inline(always)]
pub(crate) fn g_combine(a: f64, b: f64, u: u8) -> f64 {
    if u == 0 {
        b + a
    } else {
        b - a
    }
}

/// Splits the level-indexed buffer into (child region, node region) for a
/// node of size `2m`: child `[m, 2m)`, node `[2m, 4m)`.
#[inline(always)]
pub(crate) fn levels<T>(buf: &mut [T], m: usize) -> (&mut [T], &mut [T]) {
    let (lo, hi) = buf.split_at_mut(2 * m);
    (&mut lo[m..], &mut hi[..2 * m])
}
