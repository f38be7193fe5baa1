//! Central allocation of RNG stream tags.
//!
//! Every simulation entry point derives per-replication streams as
//! `seed.child(TAG, index)` (or `child2`). Tags are allocated here, in one
//! place, so two different drivers sharing a master seed can never collide
//! on the same stream.

/// One tag per independent limit-law draw.
pub(crate) const LIMIT_DRAW: u64 = 1;
/// Quantile estimation: child2(QUANTILE_REP, repeat, replication).
pub(crate) const QUANTILE_REP: u64 = 2;
/// Monte-Carlo test null replications.
pub(crate) const MC_NULL: u64 = 3;
/// Power harness: Gaussian-null critical-value simulation, child2 by (n, rep).
pub(crate) const POWER_CV: u64 = 4;
/// Power harness: one sub-seed per grid cell; replications are children of it.
pub(crate) const POWER_CELL: u64 = 5;
/// Catch-all for tests that need a stream unrelated to any driver.
#[cfg(test)]
pub(crate) const TEST_SCRATCH: u64 = 99;
