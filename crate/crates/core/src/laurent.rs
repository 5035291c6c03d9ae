//! Sparse multivariate Laurent polynomials with exact coefficients and
//! constant terms of their powers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names accepted by [`kernel`].
pub const KERNELS: &[&str] = &["apery3"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentPolynomial {
    variables: Vec<String>,
    #[serde(with = "term_list")]
    terms: BTreeMap<Vec<i32>, BigInt>,
}

/// Terms as `[exponents, "coefficient"]` pairs; coefficients stay exact.
mod term_list {
    use std::collections::BTreeMap;

    use num_bigint::BigInt;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        terms: &BTreeMap<Vec<i32>, BigInt>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let list: Vec<(&Vec<i32>, String)> =
            terms.iter().map(|(e, c)| (e, c.to_string())).collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<Vec<i32>, BigInt>, D::Error> {
        let list = Vec::<(Vec<i32>, String)>::deserialize(d)?;
        list.into_iter()
            .map(|(e, c)| {
                c.parse::<BigInt>()
                    .map(|c| (e, c))
                    .map_err(D::Error::custom)
            })
            .collect()
    }
}

impl LaurentPolynomial {
    pub fn zero(variables: &[&str]) -> Self {
        Self {
            variables: variables.iter().map(|v| v.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(variables: &[&str], c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(variables);
        let e = vec![0; variables.len()];
        p.add_term(e, c.into());
        p
    }

    pub fn monomial(variables: &[&str], exponents: &[i32], c: impl Into<BigInt>) -> Result<Self> {
        if exponents.len() != variables.len() {
            return Err(Error::OutOfRange(format!(
                "exponent vector of length {} for {} variables",
                exponents.len(),
                variables.len()
            )));
        }
        let mut p = Self::zero(variables);
        p.add_term(exponents.to_vec(), c.into());
        Ok(p)
    }

    /// Single variable `name` to the first power.
    pub fn variable(variables: &[&str], name: &str) -> Result<Self> {
        let i = variables
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| Error::OutOfRange(format!("unknown variable {name}")))?;
        let mut e = vec![0; variables.len()];
        e[i] = 1;
        Self::monomial(variables, &e, 1)
    }

    pub fn from_terms(
        variables: &[&str],
        terms: impl IntoIterator<Item = (Vec<i32>, BigInt)>,
    ) -> Result<Self> {
        let mut p = Self::zero(variables);
        for (e, c) in terms {
            if e.len() != variables.len() {
                return Err(Error::OutOfRange("exponent vector length mismatch".into()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<i32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[i32]) -> BigInt {
        self.terms.get(exponents).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&vec![0; self.variables.len()])
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.variables != other.variables {
            return Err(Error::VariableMismatch {
                left: self.variables.clone(),
                right: other.variables.clone(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let product = product_map(&self.terms, &other.terms, |_| true);
        Ok(Self {
            variables: self.variables.clone(),
            terms: product.into_iter().collect(),
        })
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(&self.var_refs(), 1);
        for _ in 0..n {
            acc = acc.multiply(self).expect("same variables");
        }
        acc
    }

    fn var_refs(&self) -> Vec<&str> {
        self.variables.iter().map(String::as_str).collect()
    }
}

fn product_map<'a, I, F>(
    left: I,
    right: &BTreeMap<Vec<i32>, BigInt>,
    keep: F,
) -> HashMap<Vec<i32>, BigInt>
where
    I: IntoIterator<Item = (&'a Vec<i32>, &'a BigInt)>,
    F: Fn(&[i32]) -> bool,
{
    let mut acc: HashMap<Vec<i32>, BigInt> = HashMap::new();
    for (ea, ca) in left {
        for (eb, cb) in right {
            let e: Vec<i32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
            if keep(&e) {
                *acc.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
    }
    acc.retain(|_, c| !c.is_zero());
    acc
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (v, k) in self.variables.iter().zip(e) {
                match k {
                    0 => {}
                    1 => write!(f, "*{v}")?,
                    _ => write!(f, "*{v}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

/// Constant term of `lambda^n`, dropping after each step every term that
/// can no longer return to exponent zero in the remaining factors.
pub fn ct_power(lambda: &LaurentPolynomial, n: u64) -> BigInt {
    let dims = lambda.variables.len();
    if lambda.terms.is_empty() {
        return if n == 0 {
            BigInt::one()
        } else {
            BigInt::zero()
        };
    }
    let mut lo = vec![i32::MAX; dims];
    let mut hi = vec![i32::MIN; dims];
    for e in lambda.terms.keys() {
        for v in 0..dims {
            lo[v] = lo[v].min(e[v]);
            hi[v] = hi[v].max(e[v]);
        }
    }
    let mut current: HashMap<Vec<i32>, BigInt> = HashMap::from([(vec![0; dims], BigInt::one())]);
    for step in 1..=n {
        let remaining = (n - step) as i64;
        let reachable = |e: &[i32]| {
            (0..dims).all(|v| {
                let x = e[v] as i64;
                x + remaining * lo[v] as i64 <= 0 && 0 <= x + remaining * hi[v] as i64
            })
        };
        current = product_map(current.iter(), &lambda.terms, reachable);
    }
    current.get(&vec![0; dims]).cloned().unwrap_or_default()
}

/// Constant term of `lambda^n` by plain repeated multiplication.
pub fn ct_power_unpruned(lambda: &LaurentPolynomial, n: u64) -> BigInt {
    lambda.pow(n as u32).constant_term()
}

/// `(x + y)(z + 1)(x + y + z)(y + z + 1) / (xyz)`, whose powers have the
/// Apéry numbers as constant terms.
pub fn apery_kernel() -> LaurentPolynomial {
    let vars = ["x", "y", "z"];
    let v = |name| LaurentPolynomial::variable(&vars, name).expect("known variable");
    let one = LaurentPolynomial::constant(&vars, 1);
    let sum = |ps: &[&LaurentPolynomial]| {
        ps.iter()
            .skip(1)
            .fold(ps[0].clone(), |acc, p| acc.add(p).expect("same variables"))
    };
    let (x, y, z) = (v("x"), v("y"), v("z"));
    let inv_xyz = LaurentPolynomial::monomial(&vars, &[-1, -1, -1], 1).expect("length 3");
    [
        sum(&[&x, &y]),
        sum(&[&z, &one]),
        sum(&[&x, &y, &z]),
        sum(&[&y, &z, &one]),
        inv_xyz,
    ]
    .iter()
    .fold(one.clone(), |acc, f| {
        acc.multiply(f).expect("same variables")
    })
}

/// Registered kernel by name.
pub fn kernel(name: &str) -> Result<LaurentPolynomial> {
    match name {
        "apery3" => Ok(apery_kernel()),
        other => Err(Error::UnknownKernel(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{SequenceId, TermSource};
    use proptest::prelude::*;

    const XY: [&str; 2] = ["x", "y"];

    fn p(terms: &[(&[i32], i64)]) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(
            &XY,
            terms.iter().map(|(e, c)| (e.to_vec(), BigInt::from(*c))),
        )
        .unwrap()
    }

    #[test]
    fn multiply_examples() {
        let a = p(&[(&[1, 0], 1), (&[0, 1], 1)]);
        let b = p(&[(&[1, 0], 1), (&[0, 1], -1)]);
        assert_eq!(a.multiply(&b).unwrap(), p(&[(&[2, 0], 1), (&[0, 2], -1)]));
        let one = LaurentPolynomial::constant(&XY, 1);
        assert_eq!(a.multiply(&one).unwrap(), a);
        let xinv = p(&[(&[-1, 0], 1)]);
        let x = p(&[(&[1, 0], 1)]);
        assert_eq!(xinv.multiply(&x).unwrap(), one);
    }

    #[test]
    fn mismatch_rejected() {
        let a = LaurentPolynomial::constant(&XY, 1);
        let b = LaurentPolynomial::constant(&["x", "z"], 1);
        assert!(matches!(
            a.multiply(&b),
            Err(Error::VariableMismatch { .. })
        ));
        assert!(LaurentPolynomial::monomial(&XY, &[1], 1).is_err());
        assert!(kernel("nope").is_err());
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let a = p(&[(&[1, 0], 2), (&[1, 0], -2), (&[0, 0], 0)]);
        assert!(a.is_empty());
        let b = p(&[(&[0, 1], 3)])
            .add(&p(&[(&[0, 1], -3), (&[1, 1], 1)]))
            .unwrap();
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn apery_kernel_examples() {
        let k = kernel("apery3").unwrap();
        assert_eq!(ct_power(&k, 0), BigInt::from(1));
        assert_eq!(ct_power(&k, 1), BigInt::from(5));
        assert_eq!(ct_power(&k, 2), BigInt::from(73));
    }

    #[test]
    fn constant_terms_are_apery_numbers() {
        let k = apery_kernel();
        for n in 0..=12 {
            assert_eq!(ct_power(&k, n), SequenceId::Gamma.term(n), "n = {n}");
        }
    }

    #[test]
    fn pruning_is_exact() {
        let k = apery_kernel();
        for n in 0..=6 {
            assert_eq!(ct_power(&k, n), ct_power_unpruned(&k, n), "n = {n}");
        }
    }

    fn sparse() -> impl Strategy<Value = LaurentPolynomial> {
        prop::collection::vec((prop::collection::vec(-3i32..=3, 3), -10i64..=10), 0..=20).prop_map(
            |ts| {
                LaurentPolynomial::from_terms(
                    &["x", "y", "z"],
                    ts.into_iter().map(|(e, c)| (e, BigInt::from(c))),
                )
                .unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn multiply_commutes(a in sparse(), b in sparse()) {
            prop_assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
        }

        #[test]
        fn multiply_associates(a in sparse(), b in sparse(), c in sparse()) {
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
