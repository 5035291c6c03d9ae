//! Exact integer primitives: generalized binomials, Pochhammer symbols,
//! base-p digits and Lucas-reduced binomials modulo a prime.
//!
//! Everything here is a pure function. Residues returned by the modular
//! helpers are always normalized to `[0, p)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value type of every sequence term.
pub type ExactInt = BigInt;

/// `C(x, m) = x (x-1) ... (x-m+1) / m!` for any integer `x`.
///
/// Returns 0 for `m < 0`, and 0 for `0 <= x < m`.
pub fn binomial(x: i64, m: i64) -> BigInt {
    if m < 0 {
        return BigInt::zero();
    }
    if x >= 0 {
        return BigInt::from(binomial_nonneg(x as u64, m as u64));
    }
    // C(x, m) = (-1)^m C(m - x - 1, m)
    let top = (m as i128) - (x as i128) - 1;
    let value = BigInt::from(binomial_nonneg(top as u64, m as u64));
    if m % 2 == 1 {
        -value
    } else {
        value
    }
}

/// Ordinary binomial coefficient for nonnegative arguments.
pub fn binomial_nonneg(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// The row `C(n, 0), ..., C(n, n)`.
pub fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut acc = BigUint::one();
    row.push(BigInt::from(acc.clone()));
    for i in 0..n {
        acc *= n - i;
        acc /= i + 1;
        row.push(BigInt::from(acc.clone()));
    }
    row
}

/// Central binomials `C(2k, k)` for `k = 0..=n`.
pub fn central_binomials(n: u64) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = BigUint::one();
    out.push(BigInt::from(acc.clone()));
    for k in 0..n {
        // C(2k+2, k+1) = C(2k, k) * 2(2k+1) / (k+1)
        acc *= 2 * (2 * k + 1);
        acc /= k + 1;
        out.push(BigInt::from(acc.clone()));
    }
    out
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    BigInt::from(acc)
}

/// Rising factorial `(x)_k = x (x+1) ... (x+k-1)`, with `(x)_0 = 1`.
pub fn pochhammer(x: i64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= x as i128 + i as i128;
    }
    acc
}

/// `a / b` when `b` divides `a`, otherwise `None`.
pub fn exact_div(a: &BigInt, b: &BigInt) -> Option<BigInt> {
    if b.is_zero() {
        return None;
    }
    let (q, r) = a.div_rem(b);
    r.is_zero().then_some(q)
}

/// Reduce an exact integer into `[0, m)`.
pub fn reduce(value: &BigInt, m: u64) -> u64 {
    let r = value.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

pub fn reduce_i64(value: i64, m: u64) -> u64 {
    (value as i128).rem_euclid(m as i128) as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverses of `1..p` modulo a prime `p`; index 0 holds 0.
pub fn inverse_table(p: u64) -> Vec<u64> {
    let mut inv = vec![0u64; p as usize];
    if p > 1 {
        inv[1] = 1;
    }
    for i in 2..p {
        let q = p / i;
        let r = (p % i) as usize;
        inv[i as usize] = mul_mod(p - q, inv[r], p);
    }
    inv
}

/// Little-endian base-`p` expansion of a nonnegative index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PAdicDigits {
    pub prime: u64,
    pub digits: Vec<u64>,
}

impl PAdicDigits {
    /// Reconstruct the index from its digits.
    pub fn value(&self) -> u128 {
        self.digits
            .iter()
            .rev()
            .fold(0u128, |acc, &d| acc * self.prime as u128 + d as u128)
    }

    /// Digit `i`, or 0 past the end.
    pub fn digit(&self, i: usize) -> u64 {
        self.digits.get(i).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

/// Expansion of `n` in base `p`. Rejects non-prime `p`.
pub fn to_digits(n: u64, p: u64) -> Result<PAdicDigits> {
    require_prime(p)?;
    Ok(PAdicDigits {
        prime: p,
        digits: digits_unchecked(n, p),
    })
}

pub(crate) fn digits_unchecked(mut n: u64, base: u64) -> Vec<u64> {
    if n == 0 {
        return vec![0];
    }
    let mut digits = Vec::new();
    while n > 0 {
        digits.push(n % base);
        n /= base;
    }
    digits
}

/// `C(n, k) mod p` as the product of digitwise binomials.
pub fn binomial_mod_lucas(n: u64, k: u64, p: u64) -> Result<u64> {
    require_prime(p)?;
    let nd = digits_unchecked(n, p);
    let kd = digits_unchecked(k, p);
    let len = nd.len().max(kd.len());
    let mut acc = 1u64;
    for i in 0..len {
        let a = nd.get(i).copied().unwrap_or(0);
        let b = kd.get(i).copied().unwrap_or(0);
        if b > a {
            return Ok(0);
        }
        let c = reduce(&BigInt::from(binomial_nonneg(a, b)), p);
        acc = mul_mod(acc, c, p);
    }
    Ok(acc % p)
}

/// Factorial tables modulo a prime for O(log_p n) binomials.
#[derive(Debug, Clone)]
pub struct LucasTable {
    p: u64,
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

impl LucasTable {
    pub fn new(p: u64) -> Result<Self> {
        require_prime(p)?;
        let size = p as usize;
        let mut fact = vec![1u64; size];
        for i in 1..size {
            fact[i] = mul_mod(fact[i - 1], i as u64, p);
        }
        let inv = inverse_table(p);
        let mut inv_fact = vec![1u64; size];
        for i in 1..size {
            inv_fact[i] = mul_mod(inv_fact[i - 1], inv[i], p);
        }
        Ok(Self { p, fact, inv_fact })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    fn digit_binomial(&self, a: u64, b: u64) -> u64 {
        if b > a {
            return 0;
        }
        let (a, b) = (a as usize, b as usize);
        mul_mod(
            mul_mod(self.fact[a], self.inv_fact[b], self.p),
            self.inv_fact[a - b],
            self.p,
        )
    }

    /// `C(n, k) mod p` for nonnegative arguments.
    pub fn binomial(&self, mut n: u64, mut k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let mut acc = 1u64;
        while k > 0 || n > 0 {
            let c = self.digit_binomial(n % self.p, k % self.p);
            if c == 0 {
                return 0;
            }
            acc = mul_mod(acc, c, self.p);
            n /= self.p;
            k /= self.p;
        }
        acc
    }

    /// `C(x, m) mod p` for any integer `x`, with the `m < 0` convention of
    /// [`binomial`].
    pub fn binomial_signed(&self, x: i64, m: i64) -> u64 {
        if m < 0 {
            return 0;
        }
        if x >= 0 {
            return self.binomial(x as u64, m as u64);
        }
        let top = (m - x - 1) as u64;
        let v = self.binomial(top, m as u64);
        if m % 2 == 1 && v != 0 {
            self.p - v
        } else {
            v
        }
    }
}

/// Sign helper: `(-1)^e` applied to `value`.
pub(crate) fn signed(value: BigInt, negative: bool) -> BigInt {
    if negative {
        -value
    } else {
        value
    }
}
