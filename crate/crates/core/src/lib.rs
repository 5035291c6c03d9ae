//! Exact arithmetic for the sporadic Apéry-like sequences.
//!
//! The crate evaluates all fifteen sporadic sequences (by binomial sum and by
//! their three-term recurrences), checks Lucas, Dwork and multi-variable
//! Lucas congruences, verifies the individual residue patterns and
//! divisibility windows known for these sequences, and runs the prime
//! divisibility census.
//!
//! * [`exact`]: binomials with negative upper entry, Pochhammer symbols,
//!   base-p digits, Lucas-reduced binomials.
//! * [`sequences`]: the registry, sum and recurrence evaluators, families.
//! * [`modular`]: residue tables and the Lucas/Dwork/DLP/TLP checkers.
//! * [`congruences`]: one verifier per named congruence statement.
//! * [`survey`]: primes dividing no term, proportions and running curves.
//! * [`laurent`]: sparse Laurent polynomials and constant terms of powers.

pub mod congruences;
pub mod error;
pub mod exact;
pub mod laurent;
pub mod modular;
pub mod sequences;
pub mod survey;

pub use error::{Error, Result};
pub use exact::{ExactInt, PAdicDigits};
pub use laurent::LaurentPolynomial;
pub use modular::{LucasWitness, ModularEngine, ResidueSeq};
pub use sequences::{
    FamilySpec, Recurrence, SequenceDescriptor, SequenceId, SequenceRef, TermSource,
};
pub use survey::SurveyReport;

/// Schema version stamped on every serialized report.
pub const SCHEMA_VERSION: u32 = 1;
