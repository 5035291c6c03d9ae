//! Census of primes dividing no term of a sequence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::require_prime;
use crate::modular::residues_below_prime;
use crate::sequences::SequenceId;

/// `e^{-1/2}`, the limit of [`heuristic_proportion`].
pub const E_MINUS_HALF: f64 = 0.606_530_659_712_633_4;

/// Primes `<= bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
        i += 1;
    }
    (2..=n)
        .filter(|&k| !composite[k])
        .map(|k| k as u64)
        .collect()
}

fn scan_limit(id: SequenceId, p: u64) -> u64 {
    // A(n) = A(p-1-n) mod p halves the scan for the Apéry numbers.
    if id == SequenceId::Gamma {
        (p - 1) / 2
    } else {
        p - 1
    }
}

/// Smallest `n < p` with `p | C(n)`.
pub fn first_zero_index(id: SequenceId, p: u64) -> Result<Option<u64>> {
    require_prime(p)?;
    let table = residues_below_prime(&id.descriptor().recurrence, p);
    Ok(first_zero(&table, scan_limit(id, p)))
}

fn first_zero(table: &[u64], limit: u64) -> Option<u64> {
    table[..=limit as usize]
        .iter()
        .position(|&r| r == 0)
        .map(|n| n as u64)
}

/// Whether `p` divides some term; by the Lucas congruences `n < p` suffices.
pub fn divides_some_term(id: SequenceId, p: u64) -> Result<bool> {
    Ok(first_zero_index(id, p)?.is_some())
}

/// Verdict for one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRow {
    pub prime: u64,
    pub divides: bool,
    pub first_zero_index: Option<u64>,
}

/// `numerator / denominator` with a 4-decimal rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proportion {
    pub numerator: u64,
    pub denominator: u64,
    pub decimal: String,
}

impl Proportion {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        Self {
            numerator,
            denominator,
            decimal: round_half_even(numerator, denominator, 4),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// `n / d` rounded half-to-even at `digits` decimals.
pub fn round_half_even(n: u64, d: u64, digits: u32) -> String {
    assert!(d > 0, "zero denominator");
    let scale = 10u128.pow(digits);
    let scaled = n as u128 * scale;
    let (mut q, r) = (scaled / d as u128, scaled % d as u128);
    let twice = 2 * r;
    if twice > d as u128 || (twice == d as u128 && q % 2 == 1) {
        q += 1;
    }
    if digits == 0 {
        return q.to_string();
    }
    format!(
        "{}.{:0width$}",
        q / scale,
        q % scale,
        width = digits as usize
    )
}

/// Cumulative proportion after each prime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub prime: u64,
    pub non_dividing: u64,
    pub total: u64,
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub id: SequenceId,
    pub bound: u64,
    pub non_dividing_primes: Vec<u64>,
    pub proportion: Proportion,
    pub running_curve: Vec<CurvePoint>,
    pub rows: Vec<PrimeRow>,
}

impl SurveyReport {
    fn from_rows(id: SequenceId, bound: u64, rows: Vec<PrimeRow>) -> Self {
        let mut curve = Vec::with_capacity(rows.len());
        let mut count = 0u64;
        for (i, row) in rows.iter().enumerate() {
            if !row.divides {
                count += 1;
            }
            let total = i as u64 + 1;
            curve.push(CurvePoint {
                prime: row.prime,
                non_dividing: count,
                total,
                proportion: count as f64 / total as f64,
            });
        }
        let non_dividing_primes: Vec<u64> = rows
            .iter()
            .filter(|r| !r.divides)
            .map(|r| r.prime)
            .collect();
        Self {
            id,
            bound,
            proportion: Proportion::new(non_dividing_primes.len() as u64, rows.len() as u64),
            non_dividing_primes,
            running_curve: curve,
            rows,
        }
    }
}

fn check_bound(bound: u64) -> Result<()> {
    if bound < 2 {
        return Err(Error::OutOfRange(format!("survey bound {bound} < 2")));
    }
    Ok(())
}

fn row(id: SequenceId, p: u64) -> PrimeRow {
    let first = first_zero_index(id, p).expect("sieved prime");
    PrimeRow {
        prime: p,
        divides: first.is_some(),
        first_zero_index: first,
    }
}

/// Primes `<= bound` dividing no term of `id`.
pub fn primes_not_dividing(id: SequenceId, bound: u64) -> Result<Vec<u64>> {
    Ok(survey(id, bound)?.non_dividing_primes)
}

/// Survey on the global rayon pool.
pub fn survey(id: SequenceId, bound: u64) -> Result<SurveyReport> {
    check_bound(bound)?;
    let rows = primes_up_to(bound)
        .into_par_iter()
        .map(|p| row(id, p))
        .collect();
    Ok(SurveyReport::from_rows(id, bound, rows))
}

/// Survey on a dedicated pool of `workers` threads; output does not depend
/// on `workers`.
pub fn survey_with_workers(id: SequenceId, bound: u64, workers: usize) -> Result<SurveyReport> {
    check_bound(bound)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?;
    pool.install(|| survey(id, bound))
}

/// `(1 - 1/p)^((p+1)/2)`, the chance that `p` divides none of `(p+1)/2`
/// independent uniform residues.
pub fn heuristic_proportion(p: u64) -> Result<BigRational> {
    require_prime(p)?;
    let base = BigRational::new(BigInt::from(p - 1), BigInt::from(p));
    Ok(Pow::pow(base, p.div_ceil(2) as u32))
}

/// Floating value of [`heuristic_proportion`].
pub fn heuristic_f64(p: u64) -> Result<f64> {
    Ok(heuristic_proportion(p)?
        .to_f64()
        .unwrap_or_else(|| (1.0 - 1.0 / p as f64).powf(p.div_ceil(2) as f64)))
}
