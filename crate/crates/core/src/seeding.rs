//! Derivation of independent RNG streams from one base seed.
//!
//! Every replication (and every internal consumer such as the tie-break
//! shuffle or the graph generator) gets its own 64-bit seed derived from the
//! experiment's base seed and a stream index. The derivation is a fixed
//! splitmix64 composition, so adding replications never perturbs the streams
//! of earlier ones and results are independent of scheduling order.

/// splitmix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `index` under `base`: `splitmix64(base ^ splitmix64(index + 1))`.
pub fn derive(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index.wrapping_add(1)))
}
