//! Registry of the fifteen sporadic Apéry-like sequences, their binomial-sum
//! and recurrence evaluators, and the parameterized families built from the
//! same summands.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    binomial, binomial_row, central_binomials, exact_div, reduce, signed, LucasTable,
};

/// Stable identifiers of the sporadic sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SequenceId {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "g")]
    G,
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "zeta")]
    Zeta,
    #[serde(rename = "gamma")]
    Gamma,
    #[serde(rename = "s7")]
    S7,
    #[serde(rename = "s10")]
    S10,
    #[serde(rename = "s18")]
    S18,
}

impl SequenceId {
    /// All fifteen ids in table order.
    pub const ALL: [SequenceId; 15] = [
        SequenceId::A,
        SequenceId::B,
        SequenceId::C,
        SequenceId::D,
        SequenceId::F,
        SequenceId::G,
        SequenceId::Delta,
        SequenceId::Eta,
        SequenceId::Alpha,
        SequenceId::Epsilon,
        SequenceId::Zeta,
        SequenceId::Gamma,
        SequenceId::S7,
        SequenceId::S10,
        SequenceId::S18,
    ];

    /// The twelve sequences not known to be divisible by every prime.
    pub const NON_COOPER: [SequenceId; 12] = [
        SequenceId::A,
        SequenceId::B,
        SequenceId::C,
        SequenceId::D,
        SequenceId::F,
        SequenceId::G,
        SequenceId::Delta,
        SequenceId::Eta,
        SequenceId::Alpha,
        SequenceId::Epsilon,
        SequenceId::Zeta,
        SequenceId::Gamma,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SequenceId::A => "a",
            SequenceId::B => "b",
            SequenceId::C => "c",
            SequenceId::D => "d",
            SequenceId::F => "f",
            SequenceId::G => "g",
            SequenceId::Delta => "delta",
            SequenceId::Eta => "eta",
            SequenceId::Alpha => "alpha",
            SequenceId::Epsilon => "epsilon",
            SequenceId::Zeta => "zeta",
            SequenceId::Gamma => "gamma",
            SequenceId::S7 => "s7",
            SequenceId::S10 => "s10",
            SequenceId::S18 => "s18",
        }
    }

    pub fn descriptor(self) -> &'static SequenceDescriptor {
        REGISTRY
            .iter()
            .find(|d| d.id == self)
            .expect("every id is registered")
    }

    pub fn is_cooper(self) -> bool {
        matches!(self, SequenceId::S7 | SequenceId::S10 | SequenceId::S18)
    }
}

impl fmt::Display for SequenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SequenceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        SequenceId::ALL
            .into_iter()
            .find(|id| id.as_str() == key)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// Parameters of the two three-term recurrence shapes, with `u(-1) = 0`,
/// `u(0) = 1`:
///
/// * order 2: `(n+1)^2 u(n+1) = (a n^2 + a n + b) u(n) - c n^2 u(n-1)`
/// * order 3: `(n+1)^3 u(n+1) = (2n+1)(a n^2 + a n + b) u(n) - n (c n^2 + d) u(n-1)`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "order")]
pub enum Recurrence {
    #[serde(rename = "2")]
    Order2 { a: i64, b: i64, c: i64 },
    #[serde(rename = "3")]
    Order3 { a: i64, b: i64, c: i64, d: i64 },
}

impl Recurrence {
    pub fn order(&self) -> u8 {
        match self {
            Recurrence::Order2 { .. } => 2,
            Recurrence::Order3 { .. } => 3,
        }
    }

    /// Coefficients `(lead, current, previous)` of the step producing
    /// `u(n+1)` from `u(n)` and `u(n-1)`.
    pub fn step_coefficients(&self, n: u64) -> (i128, i128, i128) {
        let n = n as i128;
        match *self {
            Recurrence::Order2 { a, b, c } => {
                let (a, b, c) = (a as i128, b as i128, c as i128);
                ((n + 1) * (n + 1), a * n * n + a * n + b, c * n * n)
            }
            Recurrence::Order3 { a, b, c, d } => {
                let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
                (
                    (n + 1) * (n + 1) * (n + 1),
                    (2 * n + 1) * (a * n * n + a * n + b),
                    n * (c * n * n + d),
                )
            }
        }
    }

    /// Terms `u(0..=n_max)`; `Err(n)` names the first step whose division
    /// by `(n+1)^order` is not exact.
    pub fn terms(&self, n_max: u64) -> std::result::Result<Vec<BigInt>, u64> {
        let mut out = Vec::with_capacity(n_max as usize + 1);
        out.push(BigInt::one());
        let mut prev = BigInt::zero();
        for n in 0..n_max {
            let (lead, cur, back) = self.step_coefficients(n);
            let current = out.last().expect("nonempty");
            let numer = current * cur - &prev * back;
            let next = exact_div(&numer, &BigInt::from(lead)).ok_or(n + 1)?;
            prev = current.clone();
            out.push(next);
        }
        Ok(out)
    }
}

/// Identity, recurrence and labels of one registered sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceDescriptor {
    pub id: SequenceId,
    pub recurrence: Recurrence,
    /// Zagier's letter for the order-2 sequences.
    pub zagier: Option<char>,
    /// Level subscript of Cooper's sequences.
    pub level: Option<u32>,
    /// Human-readable binomial sum evaluated by [`term_by_sum`].
    pub formula: &'static str,
}

const fn o2(a: i64, b: i64, c: i64) -> Recurrence {
    Recurrence::Order2 { a, b, c }
}

const fn o3(a: i64, b: i64, c: i64, d: i64) -> Recurrence {
    Recurrence::Order3 { a, b, c, d }
}

pub static REGISTRY: [SequenceDescriptor; 15] = [
    SequenceDescriptor {
        id: SequenceId::A,
        recurrence: o2(7, 2, -8),
        zagier: Some('A'),
        level: None,
        formula: "sum_k C(n,k)^3",
    },
    SequenceDescriptor {
        id: SequenceId::B,
        recurrence: o2(11, 3, -1),
        zagier: Some('D'),
        level: None,
        formula: "sum_k C(n,k)^2 C(n+k,n)",
    },
    SequenceDescriptor {
        id: SequenceId::C,
        recurrence: o2(10, 3, 9),
        zagier: Some('C'),
        level: None,
        formula: "sum_k C(n,k)^2 C(2k,k)",
    },
    SequenceDescriptor {
        id: SequenceId::D,
        recurrence: o2(12, 4, 32),
        zagier: Some('E'),
        level: None,
        formula: "sum_k C(n,k) C(2k,k) C(2(n-k),n-k)",
    },
    SequenceDescriptor {
        id: SequenceId::F,
        recurrence: o2(9, 3, 27),
        zagier: Some('B'),
        level: None,
        formula: "sum_k (-1)^k 3^(n-3k) C(n,3k) (3k)!/k!^3",
    },
    SequenceDescriptor {
        id: SequenceId::G,
        recurrence: o2(17, 6, 72),
        zagier: Some('F'),
        level: None,
        formula: "sum_{k,l} (-1)^k 8^(n-k) C(n,k) C(k,l)^3",
    },
    SequenceDescriptor {
        id: SequenceId::Delta,
        recurrence: o3(7, 3, 81, 0),
        zagier: None,
        level: None,
        formula: "sum_k (-1)^k 3^(n-3k) C(n,3k) C(n+k,n) (3k)!/k!^3",
    },
    SequenceDescriptor {
        id: SequenceId::Eta,
        recurrence: o3(11, 5, 125, 0),
        zagier: None,
        level: None,
        formula: "sum_{k=0}^n (-1)^k C(n,k)^3 C(4n-5k,3n)",
    },
    SequenceDescriptor {
        id: SequenceId::Alpha,
        recurrence: o3(10, 4, 64, 0),
        zagier: None,
        level: None,
        formula: "sum_k C(n,k)^2 C(2k,k) C(2(n-k),n-k)",
    },
    SequenceDescriptor {
        id: SequenceId::Epsilon,
        recurrence: o3(12, 4, 16, 0),
        zagier: None,
        level: None,
        formula: "sum_k C(n,k)^2 C(2k,n)^2",
    },
    SequenceDescriptor {
        id: SequenceId::Zeta,
        recurrence: o3(9, 3, -27, 0),
        zagier: None,
        level: None,
        formula: "sum_{k,l} C(n,k)^2 C(n,l) C(k,l) C(k+l,n)",
    },
    SequenceDescriptor {
        id: SequenceId::Gamma,
        recurrence: o3(17, 5, 1, 0),
        zagier: None,
        level: None,
        formula: "sum_k C(n,k)^2 C(n+k,n)^2",
    },
    SequenceDescriptor {
        id: SequenceId::S7,
        recurrence: o3(13, 4, -27, 3),
        zagier: None,
        level: Some(7),
        formula: "sum_k C(n,k)^2 C(n+k,k) C(2k,n)",
    },
    SequenceDescriptor {
        id: SequenceId::S10,
        recurrence: o3(6, 2, -64, 4),
        zagier: None,
        level: Some(10),
        formula: "sum_k C(n,k)^4",
    },
    SequenceDescriptor {
        id: SequenceId::S18,
        recurrence: o3(14, 6, 192, -12),
        zagier: None,
        level: Some(18),
        formula: "sum_{k=0}^n (-1)^k C(n,k) C(2k,k) C(2(n-k),n-k) C(2n-3k,n)",
    },
];

fn pow_big(base: i64, exp: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// `(3k)!/k!^3` for `k = 0..=k_max`.
fn trinomials(k_max: u64) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(k_max as usize + 1);
    let mut acc = BigInt::one();
    out.push(acc.clone());
    for k in 0..k_max {
        acc *= (3 * k + 1) * (3 * k + 2) * (3 * k + 3);
        acc /= (k + 1) * (k + 1) * (k + 1);
        out.push(acc.clone());
    }
    out
}

fn sum_over<F>(range: std::ops::RangeInclusive<u64>, f: F) -> BigInt
where
    F: Fn(u64) -> BigInt,
{
    range.fold(BigInt::zero(), |acc, k| acc + f(k))
}

/// `sum_k (-1)^k 3^(n-3k) C(n,3k) (3k)!/k!^3`, optionally times `C(n+k,n)`.
fn cubic_trinomial_sum(n: u64, with_shift: bool) -> BigInt {
    let row = binomial_row(n);
    let tri = trinomials(n / 3);
    sum_over(0..=n / 3, |k| {
        let mut t = &row[(3 * k) as usize] * &tri[k as usize] * pow_big(3, n - 3 * k);
        if with_shift {
            t *= binomial((n + k) as i64, n as i64);
        }
        signed(t, k % 2 == 1)
    })
}

/// Term `n` of `id` from its binomial sum. The negative-entry forms are
/// used for `eta` and `s18`; see [`term_by_table_form`] for the bracketed
/// originals.
pub fn term_by_sum(id: SequenceId, n: u64) -> BigInt {
    let ni = n as i64;
    match id {
        SequenceId::A => binomial_row(n).iter().map(|c| c * c * c).sum(),
        SequenceId::B => {
            let row = binomial_row(n);
            sum_over(0..=n, |k| {
                let c = &row[k as usize];
                c * c * binomial(ni + k as i64, ni)
            })
        }
        SequenceId::C => {
            let row = binomial_row(n);
            let cen = central_binomials(n);
            sum_over(0..=n, |k| {
                let c = &row[k as usize];
                c * c * &cen[k as usize]
            })
        }
        SequenceId::D => {
            let row = binomial_row(n);
            let cen = central_binomials(n);
            sum_over(0..=n, |k| {
                &row[k as usize] * &cen[k as usize] * &cen[(n - k) as usize]
            })
        }
        SequenceId::F => cubic_trinomial_sum(n, false),
        SequenceId::G => {
            let row = binomial_row(n);
            sum_over(0..=n, |k| {
                let franel: BigInt = binomial_row(k).iter().map(|c| c * c * c).sum();
                signed(&row[k as usize] * franel * pow_big(8, n - k), k % 2 == 1)
            })
        }
        SequenceId::Delta => cubic_trinomial_sum(n, true),
        SequenceId::Eta => eta_family_exact(n, 3, true),
        SequenceId::Alpha => {
            let row = binomial_row(n);
            let cen = central_binomials(n);
            sum_over(0..=n, |k| {
                let c = &row[k as usize];
                c * c * &cen[k as usize] * &cen[(n - k) as usize]
            })
        }
        SequenceId::Epsilon => {
            let row = binomial_row(n);
            sum_over(0..=n, |k| {
                let c = &row[k as usize] * binomial(2 * k as i64, ni);
                &c * &c
            })
        }
        SequenceId::Zeta => zeta_sum(n),
        SequenceId::Gamma => {
            let row = binomial_row(n);
            sum_over(0..=n, |k| {
                let c = &row[k as usize] * binomial(ni + k as i64, ni);
                &c * &c
            })
        }
        SequenceId::S7 => {
            let row = binomial_row(n);
            sum_over(0..=n, |k| {
                let c = &row[k as usize];
                c * c * binomial(ni + k as i64, k as i64) * binomial(2 * k as i64, ni)
            })
        }
        SequenceId::S10 => binomial_row(n).iter().map(|c| c * c * c * c).sum(),
        SequenceId::S18 => {
            let row = binomial_row(n);
            let cen = central_binomials(n);
            sum_over(0..=n, |k| {
                let ki = k as i64;
                let t = &row[k as usize]
                    * &cen[k as usize]
                    * &cen[(n - k) as usize]
                    * binomial(2 * ni - 3 * ki, ni);
                signed(t, k % 2 == 1)
            })
        }
    }
}

/// `sum_{k,l} C(n,k)^2 C(n,l) C(k,l) C(k+l,n)`, inner index over `0..=k`.
fn zeta_sum(n: u64) -> BigInt {
    let row_n = binomial_row(n);
    // column[m] = C(m, n) for m = 0..=2n
    let mut column = vec![BigInt::zero(); (2 * n + 1) as usize];
    column[n as usize] = BigInt::one();
    for m in n..2 * n {
        column[(m + 1) as usize] = &column[m as usize] * (m + 1) / (m + 1 - n);
    }
    sum_over(0..=n, |k| {
        let row_k = binomial_row(k);
        let inner = sum_over(0..=k, |l| {
            &row_n[l as usize] * &row_k[l as usize] * &column[(k + l) as usize]
        });
        let c = &row_n[k as usize];
        c * c * inner
    })
}

/// Original bracketed sums: s18 with `C(2n-3k-1,n) + C(2n-3k,n)` over
/// `k <= n/3` (and `s18(0) = 1`), eta with `C(4n-5k-1,3n) + C(4n-5k,3n)` over
/// `k <= n/5`. Every other id returns [`term_by_sum`].
pub fn term_by_table_form(id: SequenceId, n: u64) -> BigInt {
    let ni = n as i64;
    match id {
        SequenceId::S18 => {
            if n == 0 {
                return BigInt::one();
            }
            let row = binomial_row(n);
            let cen = central_binomials(n);
            sum_over(0..=n / 3, |k| {
                let ki = k as i64;
                let bracket = binomial(2 * ni - 3 * ki - 1, ni) + binomial(2 * ni - 3 * ki, ni);
                let t = &row[k as usize] * &cen[k as usize] * &cen[(n - k) as usize] * bracket;
                signed(t, k % 2 == 1)
            })
        }
        SequenceId::Eta => {
            let row = binomial_row(n);
            sum_over(0..=n / 5, |k| {
                let ki = k as i64;
                let c = &row[k as usize];
                let bracket =
                    binomial(4 * ni - 5 * ki - 1, 3 * ni) + binomial(4 * ni - 5 * ki, 3 * ni);
                signed(c * c * c * bracket, k % 2 == 1)
            })
        }
        _ => term_by_sum(id, n),
    }
}

/// Term `n` of `id` by iterating its recurrence.
pub fn term_by_recurrence(id: SequenceId, n: u64) -> Result<BigInt> {
    Ok(recurrence_terms(id, n)?.pop().expect("nonempty"))
}

/// Terms `0..=n_max` of `id` by its recurrence.
pub fn recurrence_terms(id: SequenceId, n_max: u64) -> Result<Vec<BigInt>> {
    id.descriptor()
        .recurrence
        .terms(n_max)
        .map_err(|n| Error::NonIntegralStep {
            id: id.to_string(),
            n,
        })
}

/// Parameterized families sharing summands with the registered sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `sum_k C(n,k)^r C(n+k,k)^s`.
    AperyGeneralized { r: u32, s: u32 },
    /// `sum_{k=0}^n (-1)^(eps k) C(n,k)^a C(4n-5k,3n)`.
    EtaFamily { a: u32, eps: u8 },
    /// `sum_k C(n,k)^exponent` with an even exponent.
    PowerSum { exponent: u32 },
}

impl FamilySpec {
    pub fn apery_generalized(r: u32, s: u32) -> Result<Self> {
        if r == 0 || s == 0 {
            return Err(Error::InvalidFamily(format!("apery({r},{s})")));
        }
        Ok(FamilySpec::AperyGeneralized { r, s })
    }

    pub fn eta_family(a: u32, eps: u8) -> Result<Self> {
        if a == 0 || eps > 1 {
            return Err(Error::InvalidFamily(format!("eta({a},{eps})")));
        }
        Ok(FamilySpec::EtaFamily { a, eps })
    }

    pub fn power_sum(exponent: u32) -> Result<Self> {
        if exponent == 0 || exponent % 2 == 1 {
            return Err(Error::InvalidFamily(format!("powersum({exponent})")));
        }
        Ok(FamilySpec::PowerSum { exponent })
    }

    /// Exact term `n`.
    pub fn term(&self, n: u64) -> BigInt {
        match *self {
            FamilySpec::AperyGeneralized { r, s } => {
                let row = binomial_row(n);
                sum_over(0..=n, |k| {
                    num_traits::pow(row[k as usize].clone(), r as usize)
                        * num_traits::pow(binomial((n + k) as i64, k as i64), s as usize)
                })
            }
            FamilySpec::EtaFamily { a, eps } => eta_family_exact(n, a, eps == 1),
            FamilySpec::PowerSum { exponent } => binomial_row(n)
                .into_iter()
                .map(|c| num_traits::pow(c, exponent as usize))
                .sum(),
        }
    }

    /// Residues of terms `0..=n_max` modulo a prime, summed termwise with
    /// Lucas-reduced binomials.
    pub fn residues_mod_prime(&self, n_max: u64, table: &LucasTable) -> Vec<u64> {
        let p = table.prime();
        let pow = |v: u64, e: u32| crate::exact::pow_mod(v, e as u64, p);
        (0..=n_max)
            .map(|n| {
                let ni = n as i64;
                let mut acc = 0u64;
                for k in 0..=n {
                    let ki = k as i64;
                    let c = table.binomial(n, k);
                    if c == 0 {
                        continue;
                    }
                    let term = match *self {
                        FamilySpec::AperyGeneralized { r, s } => {
                            crate::exact::mul_mod(pow(c, r), pow(table.binomial(n + k, k), s), p)
                        }
                        FamilySpec::EtaFamily { a, eps } => {
                            let t = crate::exact::mul_mod(
                                pow(c, a),
                                table.binomial_signed(4 * ni - 5 * ki, 3 * ni),
                                p,
                            );
                            if eps == 1 && k % 2 == 1 && t != 0 {
                                p - t
                            } else {
                                t
                            }
                        }
                        FamilySpec::PowerSum { exponent } => pow(c, exponent),
                    };
                    acc = (acc + term) % p;
                }
                acc
            })
            .collect()
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::AperyGeneralized { r, s } => write!(f, "apery({r},{s})"),
            FamilySpec::EtaFamily { a, eps } => write!(f, "eta({a},{eps})"),
            FamilySpec::PowerSum { exponent } => write!(f, "powersum({exponent})"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// Parses `apery(r,s)`, `eta(a,eps)` and `powersum(e)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidFamily(s.to_string());
        let t = s.trim().replace(' ', "");
        let open = t.find('(').ok_or_else(bad)?;
        let args = t[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let nums: Vec<u32> = args
            .split(',')
            .map(|x| x.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (&t[..open], nums.as_slice()) {
            ("apery", [r, s]) => FamilySpec::apery_generalized(*r, *s),
            ("eta", [a, e]) => FamilySpec::eta_family(*a, u8::try_from(*e).map_err(|_| bad())?),
            ("powersum", [e]) => FamilySpec::power_sum(*e),
            _ => Err(bad()),
        }
    }
}

fn eta_family_exact(n: u64, a: u32, alternating: bool) -> BigInt {
    let ni = n as i64;
    let row = binomial_row(n);
    sum_over(0..=n, |k| {
        let ki = k as i64;
        let t = num_traits::pow(row[k as usize].clone(), a as usize)
            * binomial(4 * ni - 5 * ki, 3 * ni);
        signed(t, alternating && k % 2 == 1)
    })
}

/// Anything with integer terms indexed from 0.
pub trait TermSource: Send + Sync {
    fn name(&self) -> String;

    fn term(&self, n: u64) -> BigInt;

    fn terms(&self, n_max: u64) -> Vec<BigInt> {
        (0..=n_max).map(|n| self.term(n)).collect()
    }

    /// Residues of terms `0..=n_max` modulo `m`, normalized to `[0, m)`.
    fn residues(&self, n_max: u64, m: u64) -> Vec<u64> {
        self.terms(n_max).iter().map(|t| reduce(t, m)).collect()
    }
}

impl TermSource for SequenceId {
    fn name(&self) -> String {
        self.to_string()
    }

    fn term(&self, n: u64) -> BigInt {
        term_by_recurrence(*self, n).expect("registered recurrences are integral")
    }

    fn terms(&self, n_max: u64) -> Vec<BigInt> {
        recurrence_terms(*self, n_max).expect("registered recurrences are integral")
    }

    fn residues(&self, n_max: u64, m: u64) -> Vec<u64> {
        streaming_residues(*self, n_max, m)
    }
}

/// Exact recurrence run keeping only two terms, reducing each mod `m`.
pub fn streaming_residues(id: SequenceId, n_max: u64, m: u64) -> Vec<u64> {
    let rec = id.descriptor().recurrence;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    out.push(reduce(&cur, m));
    for n in 0..n_max {
        let (lead, c, back) = rec.step_coefficients(n);
        let next = (&cur * c - &prev * back) / lead;
        out.push(reduce(&next, m));
        prev = std::mem::replace(&mut cur, next);
    }
    out
}

impl TermSource for FamilySpec {
    fn name(&self) -> String {
        self.to_string()
    }

    fn term(&self, n: u64) -> BigInt {
        FamilySpec::term(self, n)
    }

    fn residues(&self, n_max: u64, m: u64) -> Vec<u64> {
        match LucasTable::new(m) {
            Ok(table) => self.residues_mod_prime(n_max, &table),
            Err(_) => self.terms(n_max).iter().map(|t| reduce(t, m)).collect(),
        }
    }
}

/// `base^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometric(pub i64);

impl TermSource for Geometric {
    fn name(&self) -> String {
        format!("{}^n", self.0)
    }

    fn term(&self, n: u64) -> BigInt {
        pow_big(self.0, n)
    }
}

/// A named closure `n -> term`.
pub struct FnSource<F> {
    name: String,
    f: F,
}

impl<F> FnSource<F>
where
    F: Fn(u64) -> BigInt + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self {
            name: name.into(),
            f,
        }
    }
}

impl<F> TermSource for FnSource<F>
where
    F: Fn(u64) -> BigInt + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn term(&self, n: u64) -> BigInt {
        (self.f)(n)
    }
}

/// Either a registered sequence or a family, as accepted on the command
/// line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SequenceRef {
    Registered(SequenceId),
    Family(FamilySpec),
}

impl FromStr for SequenceRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains('(') {
            FamilySpec::from_str(s).map(SequenceRef::Family)
        } else {
            SequenceId::from_str(s).map(SequenceRef::Registered)
        }
    }
}

impl fmt::Display for SequenceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceRef::Registered(id) => id.fmt(f),
            SequenceRef::Family(spec) => spec.fmt(f),
        }
    }
}

impl TermSource for SequenceRef {
    fn name(&self) -> String {
        self.to_string()
    }

    fn term(&self, n: u64) -> BigInt {
        match self {
            SequenceRef::Registered(id) => id.term(n),
            SequenceRef::Family(spec) => TermSource::term(spec, n),
        }
    }

    fn terms(&self, n_max: u64) -> Vec<BigInt> {
        match self {
            SequenceRef::Registered(id) => id.terms(n_max),
            SequenceRef::Family(spec) => spec.terms(n_max),
        }
    }

    fn residues(&self, n_max: u64, m: u64) -> Vec<u64> {
        match self {
            SequenceRef::Registered(id) => id.residues(n_max, m),
            SequenceRef::Family(spec) => spec.residues(n_max, m),
        }
    }
}

/// Memoized recurrence terms keyed by sequence. Entries only grow to the
/// largest `n_max` a caller has asked for.
#[derive(Debug, Default)]
pub struct TermCache {
    entries: RwLock<HashMap<SequenceId, Arc<Vec<BigInt>>>>,
}

impl TermCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Shared vector holding at least terms `0..=n_max`.
    pub fn terms(&self, id: SequenceId, n_max: u64) -> Result<Arc<Vec<BigInt>>> {
        if let Some(hit) = self.entries.read().expect("poisoned").get(&id) {
            if hit.len() as u64 > n_max {
                return Ok(Arc::clone(hit));
            }
        }
        let fresh = Arc::new(recurrence_terms(id, n_max)?);
        let mut guard = self.entries.write().expect("poisoned");
        let entry = guard.entry(id).or_insert_with(|| Arc::clone(&fresh));
        if (entry.len() as u64) <= n_max {
            *entry = Arc::clone(&fresh);
        }
        Ok(Arc::clone(entry))
    }

    pub fn term(&self, id: SequenceId, n: u64) -> Result<BigInt> {
        Ok(self.terms(id, n)?[n as usize].clone())
    }
}
