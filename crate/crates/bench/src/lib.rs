//! Shared inputs for the benchmarks.

use aperylike::SequenceId;

/// One order-2 and two order-3 sequences, including the Apéry numbers.
pub const SAMPLE_IDS: [SequenceId; 3] = [SequenceId::A, SequenceId::Gamma, SequenceId::S18];

/// Primes of increasing size for residue-table timings.
pub const SAMPLE_PRIMES: [u64; 4] = [101, 1009, 10_007, 100_003];
