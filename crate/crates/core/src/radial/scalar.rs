use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::padic::{rational_pow, Prime};

/// Exponents closer to zero than this are treated as zero when a float
/// series is classified.
pub const EXP_EPS: f64 = 1e-12;

/// Coefficient field for radial functions.
///
/// Two implementations exist: `f64` with real exponents, and `BigRational`
/// with integer exponents, where every shell value and every convergent
/// series is an exact rational.
pub trait ShellScalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Exp: Copy + Debug + PartialEq + PartialOrd + Send + Sync + 'static;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn over(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn sign(&self) -> Ordering;
    /// Whether `sum` is zero up to the roundoff expected from adding values
    /// of magnitude `scale`.
    fn cancels(sum: &Self, scale: &Self) -> bool;
    fn magnitude(&self) -> Self;

    /// `p^(e * g)`
    fn pow_p(p: Prime, e: Self::Exp, g: i64) -> Self;
    /// `1 - p^e`, accurate when `e` is close to zero.
    fn one_minus_pow_p(p: Prime, e: Self::Exp) -> Self;

    fn exp_from_int(v: i64) -> Self::Exp;
    fn exp_add(a: Self::Exp, b: Self::Exp) -> Self::Exp;
    fn exp_scale(a: Self::Exp, k: i64) -> Self::Exp;
    fn exp_sign(a: Self::Exp) -> Ordering;
    fn exp_cmp(a: Self::Exp, b: Self::Exp) -> Ordering;
    fn exp_to_f64(a: Self::Exp) -> f64;
    fn to_f64(&self) -> f64;
}

impl ShellScalar for f64 {
    type Exp = f64;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn sign(&self) -> Ordering {
        self.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }
    fn cancels(sum: &Self, scale: &Self) -> bool {
        sum.abs() <= 1e-14 * scale.abs()
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
    fn pow_p(p: Prime, e: f64, g: i64) -> Self {
        p.as_f64().powf(e * g as f64)
    }
    fn one_minus_pow_p(p: Prime, e: f64) -> Self {
        -(e * p.as_f64().ln()).exp_m1()
    }
    fn exp_from_int(v: i64) -> f64 {
        v as f64
    }
    fn exp_add(a: f64, b: f64) -> f64 {
        a + b
    }
    fn exp_scale(a: f64, k: i64) -> f64 {
        a * k as f64
    }
    fn exp_sign(a: f64) -> Ordering {
        if a.abs() <= EXP_EPS {
            Ordering::Equal
        } else if a > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn exp_cmp(a: f64, b: f64) -> Ordering {
        a.total_cmp(&b)
    }
    fn exp_to_f64(a: f64) -> f64 {
        a
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl ShellScalar for BigRational {
    type Exp = i64;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sign(&self) -> Ordering {
        if Zero::is_zero(self) {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn cancels(sum: &Self, _scale: &Self) -> bool {
        Zero::is_zero(sum)
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
    fn pow_p(p: Prime, e: i64, g: i64) -> Self {
        rational_pow(&BigRational::from_integer(p.as_bigint()), e * g)
    }
    fn one_minus_pow_p(p: Prime, e: i64) -> Self {
        <BigRational as One>::one() - Self::pow_p(p, e, 1)
    }
    fn exp_from_int(v: i64) -> i64 {
        v
    }
    fn exp_add(a: i64, b: i64) -> i64 {
        a + b
    }
    fn exp_scale(a: i64, k: i64) -> i64 {
        a * k
    }
    fn exp_sign(a: i64) -> Ordering {
        a.cmp(&0)
    }
    fn exp_cmp(a: i64, b: i64) -> Ordering {
        a.cmp(&b)
    }
    fn exp_to_f64(a: i64) -> f64 {
        a as f64
    }
    fn to_f64(&self) -> f64 {
        crate::padic::rational_to_f64(self)
    }
}

/// `v^k` in the scalar field.
pub(crate) fn int_pow<S: ShellScalar>(v: i64, k: u32) -> S {
    let base = S::from_int(v);
    let mut acc = S::one();
    for _ in 0..k {
        acc = acc.times(&base);
    }
    acc
}

/// Binomial coefficient as a scalar.
pub(crate) fn binomial<S: ShellScalar>(k: u32, j: u32) -> S {
    let mut acc: i64 = 1;
    for t in 0..j as i64 {
        acc = acc * (k as i64 - t) / (t + 1);
    }
    S::from_int(acc)
}
