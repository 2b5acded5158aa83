//! Extended Lebesgue exponents in `[1, ∞]`, kernel orders, and the scaling
//! (homogeneity) relation between input and output exponents.
//!
//! Everything here is exact: finite exponents are arbitrary-precision
//! rationals and `∞` is its own symbol, never a sentinel value.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Which operator family a problem belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    /// `T_λ f(x_{m+1}) = ∫ f(Ax) / (|x_1|+…+|x_m|)^λ dx_1…dx_m`
    T,
    /// `J_{λ,D} f(x) = ∫ f(y) / |Dx − y|^λ dy`
    J,
}

impl Kind {
    /// Number of exponents in `p⃗` for a problem with `m` integration blocks.
    pub fn arity(self, m: usize) -> usize {
        match self {
            Kind::T => m + 1,
            Kind::J => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Finite(Rational),
    Infinity,
}

/// A Lebesgue exponent `p ∈ [1, ∞]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponent(Repr);

impl Exponent {
    pub fn finite(value: Rational) -> Result<Self> {
        if value < Rational::one() {
            return Err(Error::InvalidExponent(value.to_string()));
        }
        Ok(Exponent(Repr::Finite(value)))
    }

    pub fn infinity() -> Self {
        Exponent(Repr::Infinity)
    }

    pub fn one() -> Self {
        Exponent(Repr::Finite(Rational::one()))
    }

    /// Integer exponent; panics on `k < 1`.
    pub fn int(k: i64) -> Self {
        Self::finite(Rational::from_integer(BigInt::from(k))).expect("exponent must be >= 1")
    }

    /// `num/den`; panics when the value is below 1.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::finite(Rational::new(BigInt::from(num), BigInt::from(den)))
            .expect("exponent must be >= 1")
    }

    /// Builds the exponent whose reciprocal is `r`, for `0 <= r <= 1`.
    pub fn from_reciprocal(r: &Rational) -> Result<Self> {
        if r.is_negative() || *r > Rational::one() {
            return Err(Error::DomainError(format!(
                "reciprocal {r} does not correspond to an exponent in [1, ∞]"
            )));
        }
        if r.is_zero() {
            Ok(Self::infinity())
        } else {
            Ok(Exponent(Repr::Finite(r.recip())))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.0, Repr::Infinity)
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Finite(v) if v.is_one())
    }

    /// `1 < p < ∞`
    pub fn is_interior(&self) -> bool {
        matches!(&self.0, Repr::Finite(v) if *v > Rational::one())
    }

    /// `p > 1`, allowing `p = ∞`.
    pub fn exceeds_one(&self) -> bool {
        !self.is_one()
    }

    pub fn value(&self) -> Option<&Rational> {
        match &self.0 {
            Repr::Finite(v) => Some(v),
            Repr::Infinity => None,
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> Rational {
        match &self.0 {
            Repr::Finite(v) => v.recip(),
            Repr::Infinity => Rational::zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Finite(v) => v.to_f64().unwrap_or(f64::INFINITY),
            Repr::Infinity => f64::INFINITY,
        }
    }

    pub fn reciprocal_f64(&self) -> f64 {
        self.reciprocal().to_f64().unwrap_or(0.0)
    }
}

/// The conjugate exponent `p'` with `1/p + 1/p' = 1`.
pub fn conjugate(p: &Exponent) -> Exponent {
    Exponent::from_reciprocal(&(Rational::one() - p.reciprocal()))
        .expect("1 - 1/p lies in [0, 1]")
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Infinity, Repr::Infinity) => Ordering::Equal,
            (Repr::Infinity, _) => Ordering::Greater,
            (_, Repr::Infinity) => Ordering::Less,
            (Repr::Finite(a), Repr::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Infinity => f.write_str("inf"),
            Repr::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") {
            return Ok(Self::infinity());
        }
        let v = parse_rational(t).map_err(|_| Error::InvalidExponent(s.to_string()))?;
        Self::finite(v).map_err(|_| Error::InvalidExponent(s.to_string()))
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `"k"` or `"p/q"` (optionally signed) into an exact rational.
/// Decimal notation is rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::InvalidRational(s.to_string());
    let int = |x: &str| -> Result<BigInt> {
        let x = x.trim();
        let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        x.parse::<BigInt>().map_err(|_| bad())
    };
    match t.split_once('/') {
        Some((num, den)) => {
            let den = int(den)?;
            if den.is_zero() || den.is_negative() {
                return Err(bad());
            }
            Ok(Rational::new(int(num)?, den))
        }
        None => Ok(Rational::from_integer(int(t)?)),
    }
}

/// Renders a rational as `k` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// An ordered list of exponents `p⃗ = (p_1, …, p_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<Exponent>);

impl ExponentVector {
    pub fn new(entries: Vec<Exponent>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ShapeMismatch("exponent vector must be non-empty".into()));
        }
        Ok(ExponentVector(entries))
    }

    /// Builds a vector and checks it has `arity` entries.
    pub fn with_arity(entries: Vec<Exponent>, arity: usize) -> Result<Self> {
        if entries.len() != arity {
            return Err(Error::ShapeMismatch(format!(
                "expected {arity} exponents, got {}",
                entries.len()
            )));
        }
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based access matching `p_i`.
    pub fn get(&self, i: usize) -> &Exponent {
        &self.0[i - 1]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Exponent> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Exponent] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Exponent::to_f64).collect()
    }
}

impl FromIterator<Exponent> for ExponentVector {
    fn from_iter<I: IntoIterator<Item = Exponent>>(iter: I) -> Self {
        ExponentVector(iter.into_iter().collect())
    }
}

/// Kernel order `λ > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Order(Rational);

impl Order {
    pub fn new(value: Rational) -> Result<Self> {
        if !value.is_positive() {
            return Err(Error::DomainError(format!("order λ = {value} must be positive")));
        }
        Ok(Order(value))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(Rational::new(BigInt::from(num), BigInt::from(den))).expect("λ must be positive")
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Order::new(parse_rational(s)?)
    }
}

impl Serialize for Order {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `Σ 1/p_i` with `1/∞ = 0`.
pub fn reciprocal_sum(ps: &ExponentVector) -> Rational {
    ps.iter().map(Exponent::reciprocal).fold(Rational::zero(), |a, b| a + b)
}

/// `(mn − λ)/n`, the dimensional offset in the scaling relation.
pub fn scaling_offset(lambda: &Order, m: usize, n: usize) -> Rational {
    let mn = Rational::from_integer(BigInt::from(m * n));
    (mn - lambda.value()) / Rational::from_integer(BigInt::from(n))
}

/// True iff `Σ 1/p_i = 1/q + (mn − λ)/n` exactly.
pub fn check_homogeneity(
    ps: &ExponentVector,
    q: &Exponent,
    lambda: &Order,
    m: usize,
    n: usize,
    kind: Kind,
) -> bool {
    assert_eq!(ps.len(), kind.arity(m), "exponent count does not match problem arity");
    reciprocal_sum(ps) == q.reciprocal() + scaling_offset(lambda, m, n)
}

/// The output exponent forced by the scaling relation, when it lies in `[1, ∞]`.
pub fn homogeneous_q(ps: &ExponentVector, lambda: &Order, m: usize, n: usize) -> Option<Exponent> {
    let recip = reciprocal_sum(ps) - scaling_offset(lambda, m, n);
    Exponent::from_reciprocal(&recip).ok()
}
