//! Exact arithmetic in Q/Z and finitely supported multiplicity functions on it.
//!
//! Every class in Q/Z is stored as its unique reduced representative in
//! `[0, 1)`. A [`MultFunc`] is a sparse map from Q/Z to the positive integers;
//! absent keys carry the value zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, lcm, totient};
use crate::error::{Error, Result};

/// An element of Q/Z, stored as `num/den` with `0 <= num < den` and
/// `gcd(num, den) = 1`. Zero is `0/1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct QZElem {
    num: u64,
    den: u64,
}

impl QZElem {
    pub const ZERO: QZElem = QZElem { num: 0, den: 1 };

    /// The class of `a/b` in Q/Z.
    pub fn new(a: i64, b: i64) -> Result<QZElem> {
        if b == 0 {
            return Err(Error::ZeroDenominator);
        }
        let (a, b) = if b < 0 {
            (-(a as i128), -(b as i128))
        } else {
            (a as i128, b as i128)
        };
        let r = a.rem_euclid(b);
        let g = num_integer::gcd(r, b);
        let (num, den) = (r / g, b / g);
        let den = u64::try_from(den).map_err(|_| Error::Overflow("qz_make"))?;
        Ok(QZElem {
            num: num as u64,
            den,
        })
    }

    /// `k/n` reduced; `n` must be positive.
    pub fn frac(k: u64, n: u64) -> QZElem {
        assert!(n > 0, "zero denominator");
        let r = k % n;
        let g = gcd(r, n);
        QZElem {
            num: r / g,
            den: n / g,
        }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    /// Order of the element in the group Q/Z.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn neg(&self) -> QZElem {
        if self.num == 0 {
            *self
        } else {
            QZElem {
                num: self.den - self.num,
                den: self.den,
            }
        }
    }

    pub fn add(&self, other: &QZElem) -> QZElem {
        let den = lcm(self.den, other.den);
        let a = self.num as u128 * (den / self.den) as u128;
        let b = other.num as u128 * (den / other.den) as u128;
        let s = ((a + b) % den as u128) as u64;
        QZElem::frac(s, den)
    }

    /// `n·x` in Q/Z.
    pub fn scale(&self, n: u64) -> QZElem {
        let k = (self.num as u128 * n as u128) % self.den as u128;
        QZElem::frac(k as u64, self.den)
    }

    /// The representative in `[0, 1)` as an exact rational.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// The class of a rational number.
    pub fn from_rational(r: &BigRational) -> Result<QZElem> {
        let den = r.denom().to_u64().ok_or(Error::Overflow("qz_from_rational"))?;
        let num = r.numer().mod_floor(r.denom()).to_u64().ok_or(Error::Overflow("qz_from_rational"))?;
        Ok(QZElem::frac(num, den))
    }

    /// Whether the element lies in `((1/e)Z)/Z`.
    pub fn in_subgroup(&self, e: u64) -> bool {
        e.is_multiple_of(self.den)
    }

    /// All elements of exact order `d`, ascending.
    pub fn of_order(d: u64) -> impl Iterator<Item = QZElem> {
        (0..d)
            .filter(move |&k| gcd(k, d) == 1)
            .map(move |k| QZElem { num: k, den: d })
    }
}

impl Default for QZElem {
    fn default() -> Self {
        QZElem::ZERO
    }
}

impl Ord for QZElem {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.num as u128 * other.den as u128;
        let r = other.num as u128 * self.den as u128;
        l.cmp(&r).then(self.den.cmp(&other.den))
    }
}

impl PartialOrd for QZElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for QZElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for QZElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Strict parser: only canonical strings ("0", "1/4", "3/4") are accepted.
impl FromStr for QZElem {
    type Err = Error;

    fn from_str(s: &str) -> Result<QZElem> {
        let bad = || Error::Parse(format!("not a reduced fraction in [0,1): {s:?}"));
        let s = s.trim();
        if s == "0" {
            return Ok(QZElem::ZERO);
        }
        let (a, b) = s.split_once('/').ok_or_else(bad)?;
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|c| c.is_ascii_digit());
        if !digits(a) || !digits(b) {
            return Err(bad());
        }
        let a: u64 = a.parse().map_err(|_| bad())?;
        let b: u64 = b.parse().map_err(|_| bad())?;
        if a == 0 || b == 0 || a >= b || gcd(a, b) != 1 {
            return Err(bad());
        }
        Ok(QZElem { num: a, den: b })
    }
}

impl Serialize for QZElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QZElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A finitely supported function Q/Z → N in canonical sparse form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultFunc {
    entries: BTreeMap<QZElem, u64>,
}

impl MultFunc {
    pub fn new() -> MultFunc {
        MultFunc::default()
    }

    /// Builds a function from `(point, value)` pairs, summing repeated points
    /// and dropping zeros.
    pub fn from_pairs<I: IntoIterator<Item = (QZElem, u64)>>(pairs: I) -> MultFunc {
        let mut f = MultFunc::new();
        for (x, v) in pairs {
            f.add_at(x, v);
        }
        f
    }

    /// The constant function `c` on all elements of order `d`.
    pub fn uniform_on_order(d: u64, c: u64) -> MultFunc {
        MultFunc::from_pairs(QZElem::of_order(d).map(|x| (x, c)))
    }

    pub fn get(&self, x: &QZElem) -> u64 {
        self.entries.get(x).copied().unwrap_or(0)
    }

    pub fn add_at(&mut self, x: QZElem, v: u64) {
        if v > 0 {
            *self.entries.entry(x).or_insert(0) += v;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&QZElem, &u64)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &QZElem> {
        self.entries.keys()
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> MultFunc {
        MultFunc {
            entries: self.entries.iter().map(|(x, &v)| (x.neg(), v)).collect(),
        }
    }

    pub fn add(&self, other: &MultFunc) -> MultFunc {
        let mut out = self.clone();
        for (x, &v) in other.iter() {
            out.add_at(*x, v);
        }
        out
    }

    /// Pointwise `c·f`.
    pub fn times(&self, c: u64) -> MultFunc {
        MultFunc::from_pairs(self.iter().map(|(x, &v)| (*x, v * c)))
    }

    /// `‖f‖ = Σ f(x)`.
    pub fn norm(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Value depends only on the order of the argument.
    pub fn is_complete(&self) -> bool {
        let mut by_order: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
        for (x, &v) in &self.entries {
            let slot = by_order.entry(x.order()).or_insert((v, 0));
            if slot.0 != v {
                return false;
            }
            slot.1 += 1;
        }
        by_order.iter().all(|(&d, &(_, count))| count == totient(d))
    }

    /// `f + f^refl` is complete.
    pub fn is_semicomplete(&self) -> bool {
        self.add(&self.reflect()).is_complete()
    }

    /// `g(x) = Σ_{n·y = x} f(y)`.
    pub fn pushforward(&self, n: u64) -> MultFunc {
        assert!(n >= 1, "pushforward degree must be positive");
        MultFunc::from_pairs(self.iter().map(|(x, &v)| (x.scale(n), v)))
    }

    /// For a complete function, the common value on each order present.
    pub fn order_values(&self) -> Result<BTreeMap<u64, u64>> {
        if !self.is_complete() {
            return Err(Error::NotComplete(self.to_string()));
        }
        Ok(self.iter().map(|(x, &v)| (x.order(), v)).collect())
    }

    /// lcm of the orders of all support elements (1 when empty).
    pub fn support_lcm(&self) -> u64 {
        self.support().fold(1, |acc, x| lcm(acc, x.order()))
    }

    /// `Σ f(x)·x` over representatives in `[0, 1)`.
    pub fn weighted_sum(&self) -> BigRational {
        self.iter()
            .map(|(x, &v)| x.to_rational() * BigInt::from(v))
            .fold(BigRational::from_integer(0.into()), |a, b| a + b)
    }

    /// Sum of exponents with multiplicity, as an element of Q/Z.
    pub fn exponent_sum(&self) -> QZElem {
        self.iter()
            .fold(QZElem::ZERO, |acc, (x, &v)| acc.add(&x.scale(v)))
    }
}

impl fmt::Display for MultFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}↦{v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for MultFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromIterator<(QZElem, u64)> for MultFunc {
    fn from_iter<I: IntoIterator<Item = (QZElem, u64)>>(iter: I) -> Self {
        MultFunc::from_pairs(iter)
    }
}

impl Serialize for MultFunc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len()))?;
        for (x, v) in &self.entries {
            map.serialize_entry(&x.to_string(), v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for MultFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct MultVisitor;

        impl<'de> Visitor<'de> for MultVisitor {
            type Value = MultFunc;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an object mapping reduced fractions to positive integers")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<MultFunc, A::Error> {
                let mut out = MultFunc::new();
                while let Some((k, v)) = access.next_entry::<String, u64>()? {
                    let x: QZElem = k.parse().map_err(de::Error::custom)?;
                    if v == 0 {
                        return Err(de::Error::custom(format!("value for {k} must be positive")));
                    }
                    if out.entries.contains_key(&x) {
                        return Err(de::Error::custom(format!("duplicate key {k}")));
                    }
                    out.entries.insert(x, v);
                }
                Ok(out)
            }
        }

        d.deserialize_map(MultVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> QZElem {
        QZElem::new(a, b).unwrap()
    }

    fn mf(pairs: &[(i64, i64, u64)]) -> MultFunc {
        pairs.iter().map(|&(a, b, v)| (q(a, b), v)).collect()
    }

    #[test]
    fn make_reduces() {
        assert_eq!(q(3, 4).to_string(), "3/4");
        assert_eq!(q(5, 4).to_string(), "1/4");
        assert_eq!(q(-1, 3).to_string(), "2/3");
        assert_eq!(q(2, -6).to_string(), "2/3");
        assert_eq!(QZElem::new(1, 0), Err(Error::ZeroDenominator));
    }

    #[test]
    fn orders() {
        assert_eq!(QZElem::ZERO.order(), 1);
        assert_eq!(q(1, 4).order(), 4);
        assert_eq!(q(2, 6).order(), 3);
    }

    #[test]
    fn reflect_examples() {
        assert_eq!(mf(&[(0, 1, 2)]).reflect(), mf(&[(0, 1, 2)]));
        assert_eq!(mf(&[(1, 4, 1)]).reflect(), mf(&[(3, 4, 1)]));
        assert_eq!(
            mf(&[(1, 3, 1), (2, 3, 2)]).reflect(),
            mf(&[(2, 3, 1), (1, 3, 2)])
        );
    }

    #[test]
    fn add_and_norm() {
        assert_eq!(mf(&[(0, 1, 1)]).add(&mf(&[(0, 1, 1)])), mf(&[(0, 1, 2)]));
        assert_eq!(
            mf(&[(1, 4, 1)]).add(&mf(&[(3, 4, 1)])),
            mf(&[(1, 4, 1), (3, 4, 1)])
        );
        assert_eq!(MultFunc::new().add(&mf(&[(1, 2, 3)])), mf(&[(1, 2, 3)]));
        assert_eq!(MultFunc::new().norm(), 0);
        assert_eq!(mf(&[(1, 4, 1), (3, 4, 1)]).norm(), 2);
        assert_eq!(mf(&[(0, 1, 2), (1, 2, 3)]).norm(), 5);
    }

    #[test]
    fn completeness() {
        assert!(mf(&[(1, 3, 1), (2, 3, 1)]).is_complete());
        assert!(!mf(&[(1, 3, 1), (2, 3, 2)]).is_complete());
        assert!(mf(&[(1, 4, 1), (3, 4, 1), (1, 2, 5)]).is_complete());
        assert!(!mf(&[(1, 3, 1)]).is_complete());
        assert!(MultFunc::new().is_complete());
    }

    #[test]
    fn semicompleteness() {
        assert!(mf(&[(1, 3, 1), (2, 3, 2)]).is_semicomplete());
        assert!(mf(&[(1, 4, 1)]).is_semicomplete());
        assert!(mf(&[(1, 4, 2), (1, 2, 1)]).is_semicomplete());
        assert!(!mf(&[(1, 5, 1)]).is_semicomplete());
    }

    #[test]
    fn pushforward_examples() {
        assert_eq!(mf(&[(1, 4, 1), (3, 4, 1)]).pushforward(2), mf(&[(1, 2, 2)]));
        let f = mf(&[(1, 3, 2), (1, 5, 1)]);
        assert_eq!(f.pushforward(1), f);
        assert_eq!(mf(&[(1, 3, 2)]).pushforward(3), mf(&[(0, 1, 2)]));
    }

    #[test]
    fn json_form() {
        let f = mf(&[(3, 4, 1), (0, 1, 2), (1, 4, 1)]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"0":2,"1/4":1,"3/4":1}"#);
        assert_eq!(serde_json::from_str::<MultFunc>(&s).unwrap(), f);
        for bad in [r#"{"2/4":1}"#, r#"{"5/4":1}"#, r#"{"0/1":1}"#, r#"{"1/4":0}"#, r#"{"-1/4":1}"#] {
            assert!(serde_json::from_str::<MultFunc>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ordering_is_numeric() {
        let mut xs = [q(3, 4), q(1, 3), q(0, 1), q(1, 2), q(1, 4)];
        xs.sort();
        let s: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["0", "1/4", "1/3", "1/2", "3/4"]);
    }

    fn arb_mult() -> impl Strategy<Value = MultFunc> {
        prop::collection::vec((1u64..=24, 0u64..24, 1u64..4), 0..6).prop_map(|v| {
            v.into_iter()
                .map(|(d, k, c)| (QZElem::frac(k, d), c))
                .collect()
        })
    }

    fn arb_complete() -> impl Strategy<Value = MultFunc> {
        prop::collection::vec((1u64..=24, 1u64..4), 0..4).prop_map(|v| {
            v.into_iter()
                .fold(MultFunc::new(), |acc, (d, c)| acc.add(&MultFunc::uniform_on_order(d, c)))
        })
    }

    proptest! {
        #[test]
        fn reflect_is_involution(f in arb_mult()) {
            prop_assert_eq!(f.reflect().reflect(), f.clone());
            prop_assert_eq!(f.reflect().norm(), f.norm());
        }

        #[test]
        fn pushforward_composes(f in arb_mult(), m in 1u64..7, n in 1u64..7) {
            prop_assert_eq!(f.pushforward(m).pushforward(n), f.pushforward(m * n));
            prop_assert_eq!(f.pushforward(n).norm(), f.norm());
        }

        #[test]
        fn complete_functions_behave(f in arb_complete(), n in 1u64..13) {
            prop_assert!(f.is_complete());
            prop_assert_eq!(f.reflect(), f.clone());
            prop_assert!(f.pushforward(n).is_complete());
        }

        #[test]
        fn norm_is_additive(f in arb_mult(), g in arb_mult()) {
            prop_assert_eq!(f.add(&g).norm(), f.norm() + g.norm());
        }
    }
}
