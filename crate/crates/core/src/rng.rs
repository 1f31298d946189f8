//! Counter-based (stateless) random numbers.
//!
//! Every random quantity in the renderer is a pure function of integer keys,
//! so any parallel schedule produces the same bits as a serial run.

/// splitmix64 finalizer; full-avalanche mix of a 64-bit word.
pub fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}

/// Uniform f64 in [0, 1) from the top 53 bits of a hashed word.
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn chain(words: &[u64]) -> u64 {
    let mut h = 0x9e37_79b9_7f4a_7c15;
    for &w in words {
        h = mix64(h ^ w);
    }
    h
}

/// Sub-pixel jitter offsets in [0, 1)^2, keyed by
/// (seed, pass index, pixel column, pixel row, sample index).
pub fn jitter(seed: u64, pass_index: u32, px: usize, py: usize, sample: u32) -> (f64, f64) {
    let h = chain(&[
        seed,
        pass_index as u64,
        px as u64,
        py as u64,
        sample as u64,
    ]);
    (unit_f64(mix64(h ^ 1)), unit_f64(mix64(h ^ 2)))
}

/// Deterministic hash of (u, v, seed) into [-1, 1]^3, used for displacement noise.
pub fn hash_unit_box(u: f64, v: f64, seed: u64) -> (f64, f64, f64) {
    let h = chain(&[seed, u.to_bits(), v.to_bits()]);
    let c = |k: u64| 2.0 * unit_f64(mix64(h ^ k)) - 1.0;
    (c(1), c(2), c(3))
}
