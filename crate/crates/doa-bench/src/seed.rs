//! Deterministic per-trial seed derivation. Every trial owns an independent
//! ChaCha stream seeded from (master, axis index, trial index) so that sweeps
//! reproduce byte-identically regardless of execution order, and so that
//! methods compared "on the same seeds" really do see the same data.

/// SplitMix64 finalizer: a bijective 64-bit mix with good avalanche.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial_index` of axis point `axis_index`.
pub fn trial_seed(master_seed: u64, axis_index: usize, trial_index: usize) -> u64 {
    let mut s = splitmix64(master_seed);
    s = splitmix64(s ^ splitmix64(axis_index as u64));
    splitmix64(s ^ splitmix64(trial_index as u64))
}
