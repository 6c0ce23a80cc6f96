//! Seed splitting for reproducible parallel trials.
//!
//! `derive_seed(master, i)` is the SplitMix64 finalizer applied to
//! `master + (i + 1) * 0x9E3779B97F4A7C15`. Distinct indices give
//! decorrelated streams and the result does not depend on evaluation order.

pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed from `DZK_SEED`, if set and numeric.
pub fn env_seed() -> Option<u64> {
    std::env::var("DZK_SEED").ok().and_then(|s| s.trim().parse().ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_indices_distinct_seeds() {
        let s: std::collections::HashSet<u64> = (0..10_000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(s.len(), 10_000);
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
