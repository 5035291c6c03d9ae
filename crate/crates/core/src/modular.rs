//! Residue computation and congruence checkers: Lucas evaluation, Lucas and
//! Dwork scans, and the double/triple Lucas property tests.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::{
    digits_unchecked, inverse_table, is_prime, mul_mod, pow_mod, reduce, require_prime,
};
use crate::sequences::{Recurrence, SequenceId, TermCache, TermSource};

/// Residues of one sequence modulo a fixed modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSeq {
    pub id: SequenceId,
    pub modulus: u64,
    pub residues: Vec<u64>,
}

/// Residues of `u(0..p)` for the recurrence, computed entirely mod `p`.
///
/// The divisor `(i+1)^order` is invertible because `i + 1 < p`.
pub fn residues_below_prime(rec: &Recurrence, p: u64) -> Vec<u64> {
    let inv = inverse_table(p);
    let order = rec.order() as u64;
    let mut out = Vec::with_capacity(p as usize);
    out.push(1 % p);
    let mut prev = 0u64;
    for i in 0..p.saturating_sub(1) {
        let (_, cur, back) = rec.step_coefficients(i);
        let cur = (cur.rem_euclid(p as i128)) as u64;
        let back = (back.rem_euclid(p as i128)) as u64;
        let current = *out.last().expect("nonempty");
        let numer = (mul_mod(current, cur, p) + p - mul_mod(prev, back, p)) % p;
        let lead_inv = pow_mod(inv[(i + 1) as usize], order, p);
        prev = current;
        out.push(mul_mod(numer, lead_inv, p));
    }
    out
}

type ResidueTable = Arc<[u64]>;

/// Holds immutable per-(sequence, prime) residue tables and exact terms.
#[derive(Debug, Default)]
pub struct ModularEngine {
    tables: RwLock<HashMap<(SequenceId, u64), ResidueTable>>,
    terms: TermCache,
}

impl ModularEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Residues of terms `0..p` of `id` modulo the prime `p`.
    pub fn residue_table(&self, id: SequenceId, p: u64) -> Result<Arc<[u64]>> {
        require_prime(p)?;
        if let Some(t) = self.tables.read().expect("poisoned").get(&(id, p)) {
            return Ok(Arc::clone(t));
        }
        let table: Arc<[u64]> = residues_below_prime(&id.descriptor().recurrence, p).into();
        let mut guard = self.tables.write().expect("poisoned");
        Ok(Arc::clone(guard.entry((id, p)).or_insert(table)))
    }

    pub fn exact_terms(&self, id: SequenceId, n_max: u64) -> Result<Arc<Vec<BigInt>>> {
        self.terms.terms(id, n_max)
    }

    /// Term `n` of `id` reduced mod `m`.
    pub fn term_mod(&self, id: SequenceId, n: u64, m: u64) -> Result<u64> {
        if m >= 2 && n < m && is_prime(m) {
            return Ok(self.residue_table(id, m)?[n as usize]);
        }
        let terms = self.exact_terms(id, n)?;
        Ok(reduce(&terms[n as usize], m))
    }

    /// Residues of terms `0..=n_max` mod `m` for a whole prefix.
    pub fn residue_seq(&self, id: SequenceId, n_max: u64, m: u64) -> ResidueSeq {
        let residues = if is_prime(m) && n_max < m {
            let table = self.residue_table(id, m).expect("m is prime");
            table[..=n_max as usize].to_vec()
        } else {
            id.residues(n_max, m)
        };
        ResidueSeq {
            id,
            modulus: m,
            residues,
        }
    }

    /// `prod_i C(n_i) mod p` over the base-p digits of `n`.
    pub fn lucas_eval(&self, id: SequenceId, n: u64, p: u64) -> Result<u64> {
        let table = self.residue_table(id, p)?;
        Ok(digits_unchecked(n, p)
            .into_iter()
            .fold(1 % p, |acc, d| mul_mod(acc, table[d as usize], p)))
    }
}

fn digit_product(residues: &[u64], n: u64, p: u64) -> u64 {
    digits_unchecked(n, p)
        .into_iter()
        .fold(1 % p, |acc, d| mul_mod(acc, residues[d as usize], p))
}

/// Smallest `n <= n_max` where `C(n) mod p` differs from the product of
/// `C(n_i)` over base-p digits, or `None`.
pub fn check_lucas(source: &dyn TermSource, p: u64, n_max: u64) -> Result<Option<u64>> {
    require_prime(p)?;
    let residues = source.residues(n_max.max(p - 1), p);
    Ok(first_lucas_failure(&residues, p, n_max))
}

fn first_lucas_failure(residues: &[u64], p: u64, n_max: u64) -> Option<u64> {
    (p..=n_max).find(|&n| residues[n as usize] != digit_product(residues, n, p))
}

/// First `(m, n)` in lexicographic order violating
/// `C(p^r m + n) C(n/p) = C(p^(r-1) m + n/p) C(n)  (mod p^r)`.
pub fn check_dwork(
    source: &dyn TermSource,
    p: u64,
    r: u32,
    m_max: u64,
    n_max: u64,
) -> Result<Option<(u64, u64)>> {
    require_prime(p)?;
    if r == 0 {
        return Err(crate::Error::OutOfRange(
            "Dwork exponent r must be >= 1".into(),
        ));
    }
    let q = p.pow(r);
    let q_low = p.pow(r - 1);
    let top = q * m_max + n_max;
    let res = source.residues(top, q);
    for m in 0..=m_max {
        for n in 0..=n_max {
            let lhs = mul_mod(res[(q * m + n) as usize], res[(n / p) as usize], q);
            let rhs = mul_mod(res[(q_low * m + n / p) as usize], res[n as usize], q);
            if lhs != rhs {
                return Ok(Some((m, n)));
            }
        }
    }
    Ok(None)
}

type Eval2 = dyn Fn(u64, u64) -> BigInt + Send + Sync;
type Eval3 = dyn Fn(u64, u64, u64) -> BigInt + Send + Sync;

/// A named function `L(n, k)` tested for the double Lucas property.
pub struct BivariateCandidate {
    pub name: String,
    evaluator: Box<Eval2>,
}

impl BivariateCandidate {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(u64, u64) -> BigInt + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            evaluator: Box::new(f),
        }
    }

    pub fn eval(&self, n: u64, k: u64) -> BigInt {
        (self.evaluator)(n, k)
    }
}

impl fmt::Debug for BivariateCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BivariateCandidate")
            .field("name", &self.name)
            .finish()
    }
}

/// A named function `M(n, k, j)` tested for the triple Lucas property.
pub struct TrivariateCandidate {
    pub name: String,
    evaluator: Box<Eval3>,
}

impl TrivariateCandidate {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(u64, u64, u64) -> BigInt + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            evaluator: Box::new(f),
        }
    }

    pub fn eval(&self, n: u64, k: u64, j: u64) -> BigInt {
        (self.evaluator)(n, k, j)
    }
}

impl fmt::Debug for TrivariateCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrivariateCandidate")
            .field("name", &self.name)
            .finish()
    }
}

/// Why a candidate fails a multi-variable Lucas test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LucasWitness {
    /// Nonzero value where the support condition requires zero.
    Vanishing { index: Vec<u64> },
    /// One-digit split `index = low + p * high` breaking the product law.
    Split { index: Vec<u64> },
    /// Random multi-digit sample breaking the full digit product.
    MultiDigit { index: Vec<u64> },
}

const SPOT_CHECKS: usize = 100;
const SPOT_SEED: u64 = 0x4170_6572_795f_4c50;

fn spot_rng(p: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SPOT_SEED ^ p)
}

fn spot_range(p: u64, bound: u64) -> u64 {
    bound.max(p * p * p).min(bound.max(p * p) * 4)
}

/// Double Lucas property test: `L(n, k) = 0` for `k > n <= bound`, and
/// `L(n0 + n' p, k0 + k' p) = L(n0, k0) L(n', k') (mod p)` for one-digit
/// splits with `n', k' <= bound / p`, followed by random multi-digit
/// samples. Split witnesses are the smallest `(n, k)` in lexicographic order.
pub fn check_dlp(cand: &BivariateCandidate, p: u64, bound: u64) -> Result<Option<LucasWitness>> {
    require_prime(p)?;
    for n in 0..=bound {
        for k in n + 1..=bound {
            if cand.eval(n, k) != BigInt::from(0) {
                return Ok(Some(LucasWitness::Vanishing { index: vec![n, k] }));
            }
        }
    }
    let high = bound / p;
    let side = (high.max(p - 1) + 1) as usize;
    let mut small = vec![0u64; side * side];
    for n in 0..side as u64 {
        for k in 0..side as u64 {
            small[n as usize * side + k as usize] = reduce(&cand.eval(n, k), p);
        }
    }
    let at = |n: u64, k: u64| small[n as usize * side + k as usize];
    let limit = p * (high + 1);
    for n in 0..limit {
        for k in 0..limit {
            let expected = mul_mod(at(n % p, k % p), at(n / p, k / p), p);
            if reduce(&cand.eval(n, k), p) != expected {
                return Ok(Some(LucasWitness::Split { index: vec![n, k] }));
            }
        }
    }
    let mut rng = spot_rng(p);
    let range = spot_range(p, bound);
    for _ in 0..SPOT_CHECKS {
        let n = rng.gen_range(0..=range);
        let k = rng.gen_range(0..=n);
        let nd = digits_unchecked(n, p);
        let kd = digits_unchecked(k, p);
        let expected = (0..nd.len().max(kd.len())).fold(1 % p, |acc, i| {
            let a = nd.get(i).copied().unwrap_or(0);
            let b = kd.get(i).copied().unwrap_or(0);
            mul_mod(acc, reduce(&cand.eval(a, b), p), p)
        });
        if reduce(&cand.eval(n, k), p) != expected {
            return Ok(Some(LucasWitness::MultiDigit { index: vec![n, k] }));
        }
    }
    Ok(None)
}

/// Triple Lucas property test, the three-index analogue of [`check_dlp`]
/// with the support condition `M(n, k, j) = 0` for `j > n`.
pub fn check_tlp(cand: &TrivariateCandidate, p: u64, bound: u64) -> Result<Option<LucasWitness>> {
    require_prime(p)?;
    for n in 0..=bound {
        for k in 0..=bound {
            for j in n + 1..=bound {
                if cand.eval(n, k, j) != BigInt::from(0) {
                    return Ok(Some(LucasWitness::Vanishing {
                        index: vec![n, k, j],
                    }));
                }
            }
        }
    }
    let high = bound / p;
    let side = (high.max(p - 1) + 1) as usize;
    let mut small = vec![0u64; side * side * side];
    let idx = |n: u64, k: u64, j: u64| (n as usize * side + k as usize) * side + j as usize;
    for n in 0..side as u64 {
        for k in 0..side as u64 {
            for j in 0..side as u64 {
                small[idx(n, k, j)] = reduce(&cand.eval(n, k, j), p);
            }
        }
    }
    let limit = p * (high + 1);
    for n in 0..limit {
        for k in 0..limit {
            for j in 0..limit {
                let expected = mul_mod(
                    small[idx(n % p, k % p, j % p)],
                    small[idx(n / p, k / p, j / p)],
                    p,
                );
                if reduce(&cand.eval(n, k, j), p) != expected {
                    return Ok(Some(LucasWitness::Split {
                        index: vec![n, k, j],
                    }));
                }
            }
        }
    }
    let mut rng = spot_rng(p);
    let range = spot_range(p, bound);
    for _ in 0..SPOT_CHECKS {
        let n = rng.gen_range(0..=range);
        let k = rng.gen_range(0..=range);
        let j = rng.gen_range(0..=n);
        let digits = [n, k, j].map(|x| digits_unchecked(x, p));
        let len = digits.iter().map(Vec::len).max().unwrap_or(1);
        let expected = (0..len).fold(1 % p, |acc, i| {
            let [a, b, c] = [0, 1, 2].map(|v| digits[v].get(i).copied().unwrap_or(0));
            mul_mod(acc, reduce(&cand.eval(a, b, c), p), p)
        });
        if reduce(&cand.eval(n, k, j), p) != expected {
            return Ok(Some(LucasWitness::MultiDigit {
                index: vec![n, k, j],
            }));
        }
    }
    Ok(None)
}

/// Lucas scan of `F(n) = sum_k L(n,k) G(k) H(n-k)` for `n <= bound`.
pub fn check_lp_convolution(
    l: &BivariateCandidate,
    g: &dyn TermSource,
    h: &dyn TermSource,
    p: u64,
    bound: u64,
) -> Result<Option<u64>> {
    require_prime(p)?;
    let top = bound.max(p - 1);
    let g_terms = g.terms(top);
    let h_terms = h.terms(top);
    let residues: Vec<u64> = (0..=top)
        .map(|n| {
            let f: BigInt = (0..=n)
                .map(|k| l.eval(n, k) * &g_terms[k as usize] * &h_terms[(n - k) as usize])
                .sum();
            reduce(&f, p)
        })
        .collect();
    Ok(first_lucas_failure(&residues, p, bound))
}

/// Standard multi-variable Lucas candidates.
pub mod candidates {
    use super::*;
    use crate::exact::{binomial_nonneg, factorial};

    fn b(n: u64, k: u64) -> BigInt {
        BigInt::from(binomial_nonneg(n, k))
    }

    /// `C(n, k)`.
    pub fn binomial_coefficient() -> BivariateCandidate {
        BivariateCandidate::new("C(n,k)", b)
    }

    /// `C(n,k)^r0 C(n+k,k)^r1 ... C(n+mk,k)^rm`.
    pub fn binomial_power_product(exponents: &[u32]) -> BivariateCandidate {
        let exps = exponents.to_vec();
        let name = exps
            .iter()
            .enumerate()
            .map(|(i, r)| match i {
                0 => format!("C(n,k)^{r}"),
                1 => format!("C(n+k,k)^{r}"),
                _ => format!("C(n+{i}k,k)^{r}"),
            })
            .collect::<Vec<_>>()
            .join(" ");
        BivariateCandidate::new(name, move |n, k| {
            exps.iter()
                .enumerate()
                .fold(BigInt::from(1), |acc, (i, &r)| {
                    acc * num_traits::pow(b(n + i as u64 * k, k), r as usize)
                })
        })
    }

    /// `C(n,k) C(2k,n)`.
    pub fn binomial_double() -> BivariateCandidate {
        BivariateCandidate::new("C(n,k) C(2k,n)", |n, k| b(n, k) * b(2 * k, n))
    }

    /// `3^(n-3k) C(n,3k) (3k)!/k!^3`, zero when `3k > n`.
    pub fn trinomial_power() -> BivariateCandidate {
        BivariateCandidate::new("3^(n-3k) C(n,3k) (3k)!/k!^3", |n, k| {
            if 3 * k > n {
                return BigInt::from(0);
            }
            let tri = factorial(3 * k) / num_traits::pow(factorial(k), 3);
            num_traits::pow(BigInt::from(3), (n - 3 * k) as usize) * b(n, 3 * k) * tri
        })
    }

    /// `C(n,j) C(k+j,n)`.
    pub fn binomial_shift_product() -> TrivariateCandidate {
        TrivariateCandidate::new("C(n,j) C(k+j,n)", |n, k, j| b(n, j) * b(k + j, n))
    }

    /// `C(n,k)^2 C(n+k,k)^2`, whose row sums are the Apéry numbers.
    pub fn apery_summand() -> BivariateCandidate {
        binomial_power_product(&[2, 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{binomial, binomial_row};
    use crate::sequences::{FamilySpec, FnSource, Geometric};

    #[test]
    fn term_mod_examples() {
        let e = ModularEngine::new();
        assert_eq!(e.term_mod(SequenceId::Gamma, 3, 8).unwrap(), 5);
        assert_eq!(e.term_mod(SequenceId::Gamma, 3, 5).unwrap(), 0);
        assert_eq!(e.term_mod(SequenceId::B, 2, 7).unwrap(), 5);
    }

    #[test]
    fn modular_recurrence_matches_exact() {
        let primes: Vec<u64> = (2..=101).filter(|&p| is_prime(p)).collect();
        for id in SequenceId::ALL {
            let exact = id.terms(100);
            for &p in &primes {
                let table = residues_below_prime(&id.descriptor().recurrence, p);
                assert_eq!(table.len() as u64, p);
                for n in 0..p {
                    assert_eq!(
                        table[n as usize],
                        reduce(&exact[n as usize], p),
                        "{id} n={n} p={p}"
                    );
                }
            }
        }
    }

    #[test]
    fn lucas_eval_examples() {
        let e = ModularEngine::new();
        assert_eq!(e.lucas_eval(SequenceId::Gamma, 8, 7).unwrap(), 4);
        assert_eq!(e.term_mod(SequenceId::Gamma, 8, 7).unwrap(), 4);
        assert_eq!(
            e.lucas_eval(SequenceId::Gamma, 343, 7).unwrap(),
            e.term_mod(SequenceId::Gamma, 1, 7).unwrap()
        );
        assert_eq!(e.lucas_eval(SequenceId::Delta, 10, 3).unwrap(), 0);
        assert_eq!(e.term_mod(SequenceId::Delta, 10, 3).unwrap(), 0);
        assert!(e.lucas_eval(SequenceId::Delta, 10, 4).is_err());
    }

    #[test]
    fn lucas_examples() {
        assert_eq!(check_lucas(&SequenceId::Gamma, 7, 500).unwrap(), None);
        assert_eq!(check_lucas(&SequenceId::S18, 5, 500).unwrap(), None);
        let eta2 = FamilySpec::eta_family(2, 1).unwrap();
        let found = [2u64, 3, 5, 7, 11, 13]
            .iter()
            .any(|&p| check_lucas(&eta2, p, 200).unwrap().is_some());
        assert!(found);
    }

    #[test]
    fn geometric_sequences_are_lucas() {
        for a in [2i64, 3, 8, -1] {
            for p in [2u64, 3, 5, 7, 11, 13] {
                assert_eq!(
                    check_lucas(&Geometric(a), p, 300).unwrap(),
                    None,
                    "{a}^n mod {p}"
                );
            }
        }
    }

    #[test]
    fn non_lucas_sequence_is_caught() {
        // n + 1 fails at n = p (digits [0, 1] give 1 * 2 = 2, but p + 1 = 1).
        let src = FnSource::new("n+1", |n| BigInt::from(n + 1));
        assert_eq!(check_lucas(&src, 5, 100).unwrap(), Some(5));
    }

    #[test]
    fn dwork_examples() {
        assert_eq!(check_dwork(&SequenceId::Gamma, 3, 2, 5, 20).unwrap(), None);
        assert_eq!(check_dwork(&SequenceId::Eta, 5, 2, 3, 30).unwrap(), None);
        for id in [SequenceId::A, SequenceId::Zeta, SequenceId::S18] {
            assert_eq!(check_dwork(&id, 5, 1, 10, 40).unwrap(), None);
        }
        assert!(check_dwork(&SequenceId::A, 5, 0, 1, 1).is_err());
    }

    #[test]
    fn dwork_r1_agrees_with_lucas_on_failures() {
        let eta2 = FamilySpec::eta_family(2, 0).unwrap();
        for p in [2u64, 3, 5, 7] {
            let lucas = check_lucas(&eta2, p, 150).unwrap();
            let dwork = check_dwork(&eta2, p, 1, 150 / p, p - 1).unwrap();
            assert_eq!(lucas.is_some(), dwork.is_some(), "p={p}");
        }
    }

    #[test]
    fn dlp_examples() {
        assert_eq!(
            check_dlp(&candidates::binomial_double(), 5, 100).unwrap(),
            None
        );
        assert_eq!(
            check_dlp(&candidates::trinomial_power(), 7, 100).unwrap(),
            None
        );
        assert_eq!(
            check_dlp(&candidates::binomial_power_product(&[1, 1]), 3, 100).unwrap(),
            None
        );
    }

    #[test]
    fn dlp_rejects_non_candidates() {
        // C(n+k, k) satisfies the product law but not the support condition.
        let shifted =
            BivariateCandidate::new("C(n+k,k)", |n, k| binomial((n + k) as i64, k as i64));
        assert_eq!(
            check_dlp(&shifted, 3, 20).unwrap(),
            Some(LucasWitness::Vanishing { index: vec![0, 1] })
        );
        let bad = BivariateCandidate::new("(n+1) C(n,k)", |n, k| {
            binomial(n as i64, k as i64) * (n + 1)
        });
        assert!(matches!(
            check_dlp(&bad, 3, 20).unwrap(),
            Some(LucasWitness::Split { .. })
        ));
    }

    #[test]
    fn tlp_examples() {
        let m = candidates::binomial_shift_product();
        assert_eq!(check_tlp(&m, 3, 60).unwrap(), None);
        assert_eq!(check_tlp(&m, 7, 60).unwrap(), None);
        for p in [2u64, 5] {
            for n in 0..10 {
                for k in 0..10 {
                    for j in n + 1..12 {
                        assert_eq!(m.eval(n, k, j), BigInt::from(0), "p={p}");
                    }
                }
            }
        }
        let bad = TrivariateCandidate::new("C(n,j) (k+1)", |n, k, j| {
            binomial(n as i64, j as i64) * (k + 1)
        });
        assert!(check_tlp(&bad, 3, 12).unwrap().is_some());
    }

    #[test]
    fn lp_convolution_examples() {
        let one = FnSource::new("1", |_| BigInt::from(1));
        let square = candidates::binomial_power_product(&[2]);
        assert_eq!(
            check_lp_convolution(&square, &one, &one, 5, 100).unwrap(),
            None
        );

        let signed_franel = FnSource::new("(-1)^k franel", |k| {
            let f: BigInt = binomial_row(k).iter().map(|c| c * c * c).sum();
            if k % 2 == 1 {
                -f
            } else {
                f
            }
        });
        let b = candidates::binomial_coefficient();
        assert_eq!(
            check_lp_convolution(&b, &signed_franel, &Geometric(8), 7, 100).unwrap(),
            None
        );

        assert_eq!(
            check_lp_convolution(&candidates::apery_summand(), &one, &one, 11, 100).unwrap(),
            None
        );
    }

    #[test]
    fn lp_convolution_reproduces_sequence_g() {
        let signed_franel = FnSource::new("(-1)^k franel", |k| {
            let f: BigInt = binomial_row(k).iter().map(|c| c * c * c).sum();
            if k % 2 == 1 {
                -f
            } else {
                f
            }
        });
        let g_terms = SequenceId::G.terms(30);
        for n in 0..=30u64 {
            let f: BigInt = (0..=n)
                .map(|k| {
                    binomial(n as i64, k as i64) * signed_franel.term(k) * Geometric(8).term(n - k)
                })
                .sum();
            assert_eq!(f, g_terms[n as usize]);
        }
    }

    #[test]
    fn tables_are_idempotent_under_concurrency() {
        let engine = ModularEngine::new();
        let serial = residues_below_prime(&SequenceId::Zeta.descriptor().recurrence, 997);
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| {
                    let t = engine.residue_table(SequenceId::Zeta, 997).unwrap();
                    assert_eq!(&t[..], &serial[..]);
                });
            }
        });
    }

    #[test]
    fn residue_seq_prefix() {
        let e = ModularEngine::new();
        let seq = e.residue_seq(SequenceId::Gamma, 6, 7);
        assert_eq!(seq.residues, vec![1, 5, 3, 3, 3, 5, 1]);
        let seq8 = e.residue_seq(SequenceId::Gamma, 5, 8);
        assert_eq!(seq8.residues, vec![1, 5, 1, 5, 1, 5]);
    }
}
