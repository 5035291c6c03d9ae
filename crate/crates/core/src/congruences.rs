//! Verifiers for the individual congruence statements: fixed residue
//! patterns, the Gessel periodicity criterion, palindromes, half- and
//! third-index congruences, the eta zero-sum and the Cooper/Calkin
//! divisibility windows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{binomial, binomial_nonneg, is_prime, mul_mod, pow_mod, reduce, require_prime};
use crate::modular::ModularEngine;
use crate::sequences::{SequenceId, TermSource};

/// Expected residue as a function of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pattern {
    Constant {
        value: u64,
    },
    Parity {
        even: u64,
        odd: u64,
    },
    /// `base^n`; use `base = modulus - 1` for `(-1)^n`.
    Geometric {
        base: u64,
    },
}

/// A claimed residue pattern of one sequence, valid from `start` on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternClaim {
    pub id: SequenceId,
    pub modulus: u64,
    pub pattern: Pattern,
    pub start: u64,
}

impl PatternClaim {
    pub fn new(id: SequenceId, modulus: u64, pattern: Pattern, start: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::OutOfRange(format!("modulus {modulus} < 2")));
        }
        let in_range = match pattern {
            Pattern::Constant { value } => value < modulus,
            Pattern::Parity { even, odd } => even < modulus && odd < modulus,
            Pattern::Geometric { base } => base < modulus,
        };
        if !in_range {
            return Err(Error::OutOfRange(format!(
                "pattern values must lie in [0, {modulus})"
            )));
        }
        Ok(Self {
            id,
            modulus,
            pattern,
            start,
        })
    }

    pub fn expected(&self, n: u64) -> u64 {
        match self.pattern {
            Pattern::Constant { value } => value,
            Pattern::Parity { even, odd } => {
                if n.is_multiple_of(2) {
                    even
                } else {
                    odd
                }
            }
            Pattern::Geometric { base } => pow_mod(base, n, self.modulus),
        }
    }
}

/// First `n` in `[start, n_max]` where the residue departs from the pattern.
pub fn verify_pattern(
    engine: &ModularEngine,
    claim: &PatternClaim,
    n_max: u64,
) -> Result<Option<u64>> {
    if n_max < claim.start {
        return Err(Error::OutOfRange(format!(
            "n_max {n_max} < start {}",
            claim.start
        )));
    }
    let seq = engine.residue_seq(claim.id, n_max, claim.modulus);
    Ok((claim.start..=n_max).find(|&n| seq.residues[n as usize] != claim.expected(n)))
}

/// Named residue-pattern claims: the mod 8 alternations, the mod 3 and mod 5
/// laws, the mod 3 vanishing of s18, and the mod 2/3/5 periodicity bullets.
pub fn known_patterns() -> Vec<(String, PatternClaim)> {
    use SequenceId::*;
    let c1 = |id: SequenceId, m: u64| reduce(&id.term(1), m);
    let mk =
        |id, m, pattern, start| PatternClaim::new(id, m, pattern, start).expect("valid preset");
    let mut out = vec![
        (
            "gamma-mod8".to_string(),
            mk(Gamma, 8, Pattern::Parity { even: 1, odd: 5 }, 0),
        ),
        (
            "delta-mod8".to_string(),
            mk(Delta, 8, Pattern::Parity { even: 1, odd: 3 }, 0),
        ),
        (
            "s18-mod3".to_string(),
            mk(S18, 3, Pattern::Constant { value: 0 }, 1),
        ),
        (
            "b-mod5".to_string(),
            mk(B, 5, Pattern::Geometric { base: 3 }, 0),
        ),
        (
            "eta-mod5".to_string(),
            mk(Eta, 5, Pattern::Constant { value: 0 }, 1),
        ),
        (
            "a-mod3".to_string(),
            mk(A, 3, Pattern::Geometric { base: 2 }, 0),
        ),
        (
            "gamma-mod3".to_string(),
            mk(Gamma, 3, Pattern::Geometric { base: 2 }, 0),
        ),
    ];
    for id in SequenceId::ALL {
        out.push((
            format!("{id}-mod2"),
            mk(id, 2, Pattern::Constant { value: c1(id, 2) }, 1),
        ));
    }
    for id in [C, F, G, Delta, Alpha, Epsilon, Zeta, S18] {
        out.push((
            format!("{id}-mod3"),
            mk(id, 3, Pattern::Constant { value: c1(id, 3) }, 1),
        ));
    }
    out
}

pub fn known_pattern(name: &str) -> Option<PatternClaim> {
    known_patterns()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, c)| c)
}

/// Whether `C(n) = C(1)^n (mod p)` for every `n < p`. Failure rules out
/// eventual periodicity modulo `p` for a sequence with Lucas congruences.
pub fn gessel_criterion(engine: &ModularEngine, id: SequenceId, p: u64) -> Result<bool> {
    let table = engine.residue_table(id, p)?;
    let c1 = if p > 1 && table.len() > 1 {
        table[1]
    } else {
        reduce(&id.term(1), p)
    };
    Ok((0..p).all(|n| table[n as usize] == pow_mod(c1, n, p)))
}

/// Primes dividing both `C(2) - C(1)^2` and `C(3) - C(1)^3`.
pub fn nonperiodicity_primes(source: &dyn TermSource) -> Result<Vec<u64>> {
    let t = source.terms(3);
    let x = &t[2] - &t[1] * &t[1];
    let y = &t[3] - &t[1] * &t[1] * &t[1];
    let g = x.gcd(&y);
    if g.is_zero() {
        return Err(Error::OutOfRange(format!(
            "{}: both differences vanish, every prime qualifies",
            source.name()
        )));
    }
    let mut g = g
        .abs()
        .to_u64()
        .ok_or_else(|| Error::OutOfRange("gcd exceeds u64".into()))?;
    let mut primes = Vec::new();
    let mut d = 2u64;
    while d * d <= g {
        if g % d == 0 {
            primes.push(d);
            while g % d == 0 {
                g /= d;
            }
        }
        d += 1;
    }
    if g > 1 {
        primes.push(g);
    }
    Ok(primes)
}

/// Eventual period found within a bounded window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub preperiod: u64,
    pub period: u64,
}

/// Smallest period `<= max_period` (with its smallest preperiod) such that
/// residues mod `m` repeat on `[preperiod, n_max]`.
///
/// The repeating stretch must cover at least half the window and two full
/// periods; otherwise any late enough start would qualify. `None` is
/// evidence of non-periodicity within these bounds, not proof.
pub fn detect_period(
    engine: &ModularEngine,
    id: SequenceId,
    m: u64,
    n_max: u64,
    max_period: u64,
) -> Result<Option<Period>> {
    if m < 2 {
        return Err(Error::OutOfRange(format!("modulus {m} < 2")));
    }
    let r = engine.residue_seq(id, n_max, m).residues;
    Ok(find_period(&r, max_period))
}

pub(crate) fn find_period(r: &[u64], max_period: u64) -> Option<Period> {
    let len = r.len() as u64;
    for period in 1..=max_period {
        if 2 * period > len {
            break;
        }
        let mut preperiod = 0;
        for n in (0..len - period).rev() {
            if r[n as usize] != r[(n + period) as usize] {
                preperiod = n + 1;
                break;
            }
        }
        let stretch = len - preperiod;
        if stretch >= 2 * period && 2 * stretch >= len {
            return Some(Period { preperiod, period });
        }
    }
    None
}

/// First `n < p` (scanning at most `n_max_pairs` indices) with
/// `A(n) != A(p-1-n) (mod p)` for the Apéry numbers.
pub fn palindrome_check(engine: &ModularEngine, p: u64, n_max_pairs: u64) -> Result<Option<u64>> {
    let table = engine.residue_table(SequenceId::Gamma, p)?;
    let limit = p.min(n_max_pairs);
    Ok((0..limit).find(|&n| table[n as usize] != table[(p - 1 - n) as usize]))
}

/// Outcome of the half-index check for `A_b = sequence (b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfIndexVerdict {
    pub p: u64,
    /// `A_b(floor(p/2)) mod p`.
    pub residue: u64,
    /// `C(floor(p/2), floor(p/4))^2` for `p = 1 mod 4`, else 0.
    pub expected: u64,
    /// `(a, b)` with `p = a^2 + b^2`, `a` odd, for `p = 1 mod 4`.
    pub two_squares: Option<(u64, u64)>,
    /// `4a^2 - 2p mod p` when `two_squares` is present.
    pub two_squares_expected: Option<u64>,
    pub passed: bool,
}

fn two_squares(p: u64) -> Option<(u64, u64)> {
    let mut a = 1u64;
    while a * a < p {
        let rest = p - a * a;
        let b = (rest as f64).sqrt().round() as u64;
        for cand in b.saturating_sub(1)..=b + 1 {
            if cand * cand == rest {
                return Some((a, cand));
            }
        }
        a += 2;
    }
    None
}

pub fn half_index_congruence(engine: &ModularEngine, p: u64) -> Result<HalfIndexVerdict> {
    require_prime(p)?;
    if p == 2 {
        return Err(Error::OutOfRange(
            "half-index congruence needs an odd prime".into(),
        ));
    }
    let h = p / 2;
    let residue = engine.term_mod(SequenceId::B, h, p)?;
    let (expected, squares) = if p % 4 == 1 {
        let c = reduce(&BigInt::from(binomial_nonneg(h, p / 4)), p);
        (mul_mod(c, c, p), two_squares(p))
    } else {
        (0, None)
    };
    let sq_expected = squares.map(|(a, _)| {
        let v = 4 * (a as i128) * (a as i128) - 2 * p as i128;
        v.rem_euclid(p as i128) as u64
    });
    let passed = residue == expected && sq_expected.map_or(p % 4 != 1, |e| e == residue);
    Ok(HalfIndexVerdict {
        p,
        residue,
        expected,
        two_squares: squares,
        two_squares_expected: sq_expected,
        passed,
    })
}

/// Outcome of the third-index check for sequence (eta).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThirdIndexVerdict {
    pub p: u64,
    /// `A_eta(floor(p/3)) mod p`.
    pub residue: u64,
    pub expected: u64,
    /// Whether `p mod 15` lies in `{1, 2, 4, 8}`.
    pub nonzero_branch: bool,
    pub passed: bool,
}

pub fn third_index_congruence(engine: &ModularEngine, p: u64) -> Result<ThirdIndexVerdict> {
    require_prime(p)?;
    if p == 3 {
        return Err(Error::OutOfRange(
            "third-index congruence excludes p = 3".into(),
        ));
    }
    let t = p / 3;
    let residue = engine.term_mod(SequenceId::Eta, t, p)?;
    let nonzero_branch = matches!(p % 15, 1 | 2 | 4 | 8);
    let expected = if nonzero_branch {
        let c = reduce(&BigInt::from(binomial_nonneg(t, p / 15)), p);
        let cube = mul_mod(mul_mod(c, c, p), c, p);
        if (p / 5) % 2 == 1 {
            (p - cube) % p
        } else {
            cube
        }
    } else {
        0
    };
    Ok(ThirdIndexVerdict {
        p,
        residue,
        expected,
        nonzero_branch,
        passed: residue == expected,
    })
}

/// `sum_k (-1)^(ak) C(n,k)^a C(4n-5k, 3n-2p) mod p` for `2p/3 <= n < p`.
pub fn eta_zero_sum(p: u64, a: u32, n: u64) -> Result<u64> {
    require_prime(p)?;
    if !(1..=3).contains(&a) {
        return Err(Error::OutOfRange(format!("exponent a = {a} not in 1..=3")));
    }
    if 3 * n < 2 * p || n >= p {
        return Err(Error::OutOfRange(format!(
            "n = {n} outside [2p/3, p) for p = {p}"
        )));
    }
    let (ni, pi) = (n as i64, p as i64);
    let sum: BigInt = (0..=ni)
        .map(|k| {
            let t = num_traits::pow(binomial(ni, k), a as usize)
                * binomial(4 * ni - 5 * k, 3 * ni - 2 * pi);
            if (a as i64 * k) % 2 == 1 {
                -t
            } else {
                t
            }
        })
        .sum();
    Ok(reduce(&sum, p))
}

/// Admissible `n` for [`eta_zero_sum`].
pub fn eta_zero_range(p: u64) -> std::ops::Range<u64> {
    p.saturating_mul(2).div_ceil(3)..p
}

/// Divisibility of one sequence over a window of indices below `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowReport {
    pub id: SequenceId,
    /// Indices required to be divisible by `p`.
    pub indices: Vec<u64>,
    /// Indices in the window that are not divisible (empty on success).
    pub failures: Vec<u64>,
    /// First index just outside the window, if it exists.
    pub next_index: Option<u64>,
    /// Whether that index is also divisible; `Some(false)` means the window
    /// is sharp at `p`.
    pub next_divisible: Option<bool>,
}

/// Cooper/Calkin divisibility windows at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooperReport {
    pub p: u64,
    pub s7: WindowReport,
    pub s18: WindowReport,
    pub s10: WindowReport,
    pub passed: bool,
    /// Informational remarks about windows that are not sharp.
    pub notes: Vec<String>,
}

fn window(engine: &ModularEngine, id: SequenceId, p: u64, j_max: u64) -> Result<WindowReport> {
    let table = engine.residue_table(id, p)?;
    let indices: Vec<u64> = (1..=j_max.min(p)).map(|j| p - j).collect();
    let failures = indices
        .iter()
        .copied()
        .filter(|&n| table[n as usize] != 0)
        .collect();
    let next_index = p.checked_sub(j_max + 1);
    Ok(WindowReport {
        id,
        indices,
        failures,
        next_index,
        next_divisible: next_index.map(|n| table[n as usize] == 0),
    })
}

/// `s7(p-j) = 0` for `1 <= j <= (p+1)/3`, `s18(p-j) = 0` for
/// `1 <= j <= (p+2)/4`, and `s10(n) = 0` for `n < p < 4n/3 + 1`, all mod `p`.
pub fn cooper_divisibility(engine: &ModularEngine, p: u64) -> Result<CooperReport> {
    require_prime(p)?;
    let s7 = window(engine, SequenceId::S7, p, (p + 1) / 3)?;
    let s18 = window(engine, SequenceId::S18, p, (p + 2) / 4)?;
    // n < p < 4n/3 + 1  <=>  p - n <= (p + 2) / 4
    let s10 = window(engine, SequenceId::S10, p, (p + 2) / 4)?;
    let passed = [&s7, &s18, &s10].iter().all(|w| w.failures.is_empty());
    let notes = [&s7, &s18, &s10]
        .iter()
        .filter(|w| w.next_divisible == Some(true))
        .map(|w| {
            format!(
                "{}: divisibility at p = {p} extends to index {}",
                w.id,
                w.next_index.expect("next_divisible implies next_index")
            )
        })
        .collect();
    Ok(CooperReport {
        p,
        s7,
        s18,
        s10,
        passed,
        notes,
    })
}

/// Indices `n < p` with `p | C(n)` but `p` not dividing `C(p-1-n)`.
pub fn reflection_failures(engine: &ModularEngine, id: SequenceId, p: u64) -> Result<Vec<u64>> {
    let t = engine.residue_table(id, p)?;
    Ok((0..p)
        .filter(|&n| t[n as usize] == 0 && t[(p - 1 - n) as usize] != 0)
        .collect())
}

/// Primes in `range`.
pub fn primes_in(range: std::ops::RangeInclusive<u64>) -> impl Iterator<Item = u64> {
    range.filter(|&n| is_prime(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> ModularEngine {
        ModularEngine::new()
    }

    #[test]
    fn pattern_examples() {
        let e = engine();
        for name in ["gamma-mod8", "delta-mod8"] {
            assert_eq!(
                verify_pattern(&e, &known_pattern(name).unwrap(), 2000).unwrap(),
                None,
                "{name}"
            );
        }
        assert_eq!(
            verify_pattern(&e, &known_pattern("s18-mod3").unwrap(), 2000).unwrap(),
            None
        );
        assert_eq!(
            verify_pattern(&e, &known_pattern("b-mod5").unwrap(), 2000).unwrap(),
            None
        );
    }

    #[test]
    fn periodicity_bullets_hold() {
        let e = engine();
        for (name, claim) in known_patterns() {
            assert_eq!(verify_pattern(&e, &claim, 500).unwrap(), None, "{name}");
        }
    }

    #[test]
    fn wrong_pattern_is_caught() {
        let e = engine();
        let claim = PatternClaim::new(SequenceId::Gamma, 8, Pattern::Parity { even: 1, odd: 3 }, 0)
            .unwrap();
        assert_eq!(verify_pattern(&e, &claim, 100).unwrap(), Some(1));
        assert!(
            PatternClaim::new(SequenceId::Gamma, 8, Pattern::Constant { value: 8 }, 0).is_err()
        );
        assert!(verify_pattern(&e, &known_pattern("s18-mod3").unwrap(), 0).is_err());
    }

    #[test]
    fn gessel_examples() {
        let e = engine();
        assert!(!gessel_criterion(&e, SequenceId::Delta, 7).unwrap());
        assert!(gessel_criterion(&e, SequenceId::Gamma, 3).unwrap());
        assert!(gessel_criterion(&e, SequenceId::B, 5).unwrap());
    }

    #[test]
    fn nonperiodicity_examples() {
        assert_eq!(
            nonperiodicity_primes(&SequenceId::Delta).unwrap(),
            vec![2, 3]
        );
        assert_eq!(nonperiodicity_primes(&SequenceId::B).unwrap(), vec![2, 5]);
        assert_eq!(nonperiodicity_primes(&SequenceId::S7).unwrap(), vec![2]);
        let geometric = crate::sequences::Geometric(3);
        assert!(nonperiodicity_primes(&geometric).is_err());
    }

    #[test]
    fn period_examples() {
        let e = engine();
        assert_eq!(
            detect_period(&e, SequenceId::Gamma, 8, 2000, 16).unwrap(),
            Some(Period {
                preperiod: 0,
                period: 2
            })
        );
        assert_eq!(
            detect_period(&e, SequenceId::D, 4, 2000, 8).unwrap(),
            Some(Period {
                preperiod: 1,
                period: 1
            })
        );
        assert_eq!(e.term_mod(SequenceId::D, 2000, 4).unwrap(), 0);
        assert_eq!(
            detect_period(&e, SequenceId::Gamma, 16, 2000, 64).unwrap(),
            None
        );
    }

    #[test]
    fn find_period_requires_long_stretch() {
        let mut r = vec![0u64; 20];
        r[19] = 1;
        // a single late change is a tail, not a period
        assert_eq!(find_period(&r, 4), None);
        let alt: Vec<u64> = (0..20).map(|n| n % 3).collect();
        assert_eq!(
            find_period(&alt, 5),
            Some(Period {
                preperiod: 0,
                period: 3
            })
        );
    }

    #[test]
    fn palindrome_examples() {
        let e = engine();
        assert_eq!(palindrome_check(&e, 7, 7).unwrap(), None);
        assert_eq!(
            &e.residue_table(SequenceId::Gamma, 7).unwrap()[..],
            &[1, 5, 3, 3, 3, 5, 1]
        );
        assert_eq!(palindrome_check(&e, 2, 2).unwrap(), None);
        assert_eq!(palindrome_check(&e, 13, 13).unwrap(), None);
    }

    #[test]
    fn half_index_examples() {
        let e = engine();
        let v7 = half_index_congruence(&e, 7).unwrap();
        assert!(v7.passed && v7.expected == 0 && v7.residue == 0);
        let v13 = half_index_congruence(&e, 13).unwrap();
        assert_eq!(v13.two_squares, Some((3, 2)));
        assert_eq!(v13.two_squares_expected, Some(10));
        assert_eq!(v13.residue, 10);
        assert!(v13.passed);
        let v5 = half_index_congruence(&e, 5).unwrap();
        assert_eq!(v5.two_squares, Some((1, 2)));
        assert_eq!(v5.residue, 4);
        assert!(v5.passed);
        assert!(half_index_congruence(&e, 2).is_err());
    }

    #[test]
    fn third_index_examples() {
        let e = engine();
        let v7 = third_index_congruence(&e, 7).unwrap();
        assert!(!v7.nonzero_branch && v7.passed);
        let v2 = third_index_congruence(&e, 2).unwrap();
        assert!(v2.nonzero_branch && v2.passed);
        let v31 = third_index_congruence(&e, 31).unwrap();
        assert!(v31.nonzero_branch && v31.passed);
        let c = reduce(&binomial(10, 2), 31);
        assert_eq!(v31.expected, c * c % 31 * c % 31);
        assert!(third_index_congruence(&e, 3).is_err());
    }

    #[test]
    fn eta_zero_examples() {
        assert_eq!(eta_zero_sum(7, 3, 5).unwrap(), 0);
        assert_eq!(eta_zero_sum(7, 3, 6).unwrap(), 0);
        assert_eq!(eta_zero_sum(11, 2, 8).unwrap(), 0);
        assert!(eta_zero_sum(7, 3, 4).is_err());
        assert!(eta_zero_sum(7, 3, 7).is_err());
        assert!(eta_zero_sum(7, 4, 5).is_err());
        assert_eq!(eta_zero_range(7), 5..7);
    }

    #[test]
    fn eta_zero_needs_small_exponent() {
        // The vanishing is special to a <= 3; some a = 4 sum is nonzero.
        let nonzero = (2..=31u64).filter(|&p| is_prime(p)).any(|p| {
            eta_zero_range(p).any(|n| {
                let (ni, pi) = (n as i64, p as i64);
                let s: BigInt = (0..=ni)
                    .map(|k| {
                        num_traits::pow(binomial(ni, k), 4)
                            * binomial(4 * ni - 5 * k, 3 * ni - 2 * pi)
                    })
                    .sum();
                reduce(&s, p) != 0
            })
        });
        assert!(nonzero);
    }

    #[test]
    fn cooper_examples() {
        let e = engine();
        let r7 = cooper_divisibility(&e, 7).unwrap();
        assert!(r7.passed);
        assert_eq!(r7.s7.indices, vec![6, 5]);
        assert_eq!(r7.s18.indices, vec![6, 5]);
        let r3 = cooper_divisibility(&e, 3).unwrap();
        assert!(r3.passed);
        assert_eq!(r3.s18.next_divisible, Some(true));
        assert!(r3.notes.iter().any(|n| n.starts_with("s18")));
        let r13 = cooper_divisibility(&e, 13).unwrap();
        assert_eq!(r13.s10.indices, vec![12, 11, 10]);
        assert!(r13.passed);
    }

    #[test]
    fn reflection_scan_runs() {
        let e = engine();
        assert!(reflection_failures(&e, SequenceId::Gamma, 13)
            .unwrap()
            .is_empty());
    }
}
