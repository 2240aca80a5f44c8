//! Exact p-adic scalars, vectors and matrices over the rationals.
//!
//! Norms are never floats: a [`PNorm`] stores the integer exponent `e` of
//! `p^e`, so the ultrametric and multiplicative identities of the p-adic
//! absolute value hold as exact equalities.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime `p`, checked by trial division at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d.saturating_mul(d) <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn as_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^e` as an exact rational (negative exponents allowed).
    pub fn pow_rational(self, e: i64) -> BigRational {
        let base = BigRational::from_integer(self.as_bigint());
        rational_pow(&base, e)
    }

    /// `p^e` in floating point.
    pub fn powf(self, e: f64) -> f64 {
        self.as_f64().powf(e)
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `base^e` for a rational base and signed exponent.
pub(crate) fn rational_pow(base: &BigRational, e: i64) -> BigRational {
    let mag = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        mag.recip()
    } else {
        mag
    }
}

/// A p-adic absolute value: either `0` or exactly `p^e`.
///
/// Ordering follows the real value of the norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PNorm {
    Zero,
    Pow(i64),
}

impl PNorm {
    pub fn exponent(self) -> Option<i64> {
        match self {
            PNorm::Zero => None,
            PNorm::Pow(e) => Some(e),
        }
    }

    pub fn to_f64(self, p: Prime) -> f64 {
        match self {
            PNorm::Zero => 0.0,
            PNorm::Pow(e) => p.powf(e as f64),
        }
    }

    pub fn to_rational(self, p: Prime) -> BigRational {
        match self {
            PNorm::Zero => BigRational::zero(),
            PNorm::Pow(e) => p.pow_rational(e),
        }
    }

    pub fn mul(self, other: PNorm) -> PNorm {
        match (self, other) {
            (PNorm::Pow(a), PNorm::Pow(b)) => PNorm::Pow(a + b),
            _ => PNorm::Zero,
        }
    }

    /// Integer power; `0^k` is `0` for `k > 0` and `1` for `k = 0`.
    pub fn powi(self, k: i64) -> PNorm {
        match self {
            PNorm::Pow(e) => PNorm::Pow(e * k),
            PNorm::Zero if k == 0 => PNorm::Pow(0),
            PNorm::Zero => PNorm::Zero,
        }
    }
}

/// The p-adic valuation of an integer; `None` for zero.
pub fn int_valuation(x: &BigInt, p: Prime) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pb = p.as_bigint();
    let mut v = 0;
    let mut cur = x.abs();
    loop {
        let (q, r) = cur.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        cur = q;
        v += 1;
    }
    Some(v)
}

/// The exponent `a` in `x = p^a * m / n` with `p` dividing neither `m` nor `n`;
/// `None` stands for `+inf` (the valuation of zero).
pub fn valuation(x: &BigRational, p: Prime) -> Option<i64> {
    let num = int_valuation(x.numer(), p)?;
    let den = int_valuation(x.denom(), p).expect("denominator is nonzero");
    Some(num - den)
}

/// `|x|_p` for a rational `x`.
pub fn norm(x: &BigRational, p: Prime) -> PNorm {
    match valuation(x, p) {
        None => PNorm::Zero,
        Some(v) => PNorm::Pow(-v),
    }
}

/// A rational regarded as an element of `Q_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicScalar {
    value: BigRational,
    prime: Prime,
}

impl PAdicScalar {
    pub fn new(value: BigRational, prime: Prime) -> Self {
        PAdicScalar { value, prime }
    }

    pub fn from_i64(v: i64, prime: Prime) -> Self {
        PAdicScalar::new(BigRational::from_integer(v.into()), prime)
    }

    pub fn from_ratio(num: i64, den: i64, prime: Prime) -> Self {
        PAdicScalar::new(BigRational::new(num.into(), den.into()), prime)
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn valuation(&self) -> Option<i64> {
        valuation(&self.value, self.prime)
    }

    pub fn norm(&self) -> PNorm {
        norm(&self.value, self.prime)
    }

    pub fn add(&self, other: &PAdicScalar) -> Result<PAdicScalar> {
        same_prime(self.prime, other.prime)?;
        Ok(PAdicScalar::new(&self.value + &other.value, self.prime))
    }

    pub fn mul(&self, other: &PAdicScalar) -> Result<PAdicScalar> {
        same_prime(self.prime, other.prime)?;
        Ok(PAdicScalar::new(&self.value * &other.value, self.prime))
    }
}

fn same_prime(a: Prime, b: Prime) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::PrimeMismatch(a.get(), b.get()))
    }
}

/// A point of `Q_p^n` with rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicVector {
    components: Vec<BigRational>,
    prime: Prime,
}

impl PAdicVector {
    pub fn new(components: Vec<BigRational>, prime: Prime) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("vector dimension must be at least 1".into()));
        }
        Ok(PAdicVector { components, prime })
    }

    pub fn from_i64s(components: &[i64], prime: Prime) -> Result<Self> {
        PAdicVector::new(components.iter().map(|&c| BigRational::from_integer(c.into())).collect(), prime)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn components(&self) -> &[BigRational] {
        &self.components
    }

    pub fn component(&self, i: usize) -> PAdicScalar {
        PAdicScalar::new(self.components[i].clone(), self.prime)
    }

    /// `max_j |x_j|_p`.
    pub fn norm(&self) -> PNorm {
        self.components.iter().map(|c| norm(c, self.prime)).max().unwrap_or(PNorm::Zero)
    }

    /// The shell index `log_p |x|_p`, `None` at the origin.
    pub fn shell(&self) -> Option<i64> {
        self.norm().exponent()
    }

    pub fn add(&self, other: &PAdicVector) -> Result<PAdicVector> {
        same_prime(self.prime, other.prime)?;
        check_dim(self.dim(), other.dim())?;
        let components = self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect();
        Ok(PAdicVector { components, prime: self.prime })
    }

    pub fn sub(&self, other: &PAdicVector) -> Result<PAdicVector> {
        same_prime(self.prime, other.prime)?;
        check_dim(self.dim(), other.dim())?;
        let components = self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect();
        Ok(PAdicVector { components, prime: self.prime })
    }

    pub fn scale(&self, s: &BigRational) -> PAdicVector {
        PAdicVector { components: self.components.iter().map(|c| c * s).collect(), prime: self.prime }
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// A square matrix with rational entries acting on `Q_p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicMatrix {
    dim: usize,
    entries: Vec<BigRational>,
    prime: Prime,
}

impl PAdicMatrix {
    pub fn from_rows(rows: Vec<Vec<BigRational>>, prime: Prime) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be at least 1".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            check_dim(dim, row.len())?;
            entries.extend(row);
        }
        Ok(PAdicMatrix { dim, entries, prime })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>], prime: Prime) -> Result<Self> {
        PAdicMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect(),
            prime,
        )
    }

    pub fn identity(dim: usize, prime: Prime) -> Self {
        PAdicMatrix::scalar(dim, BigRational::one(), prime)
    }

    /// `s * I_n`.
    pub fn scalar(dim: usize, s: BigRational, prime: Prime) -> Self {
        let mut entries = vec![BigRational::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = s.clone();
        }
        PAdicMatrix { dim, entries, prime }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.dim + j]
    }

    /// `max_{i,j} |a_ij|_p`; the all-zero matrix is rejected.
    pub fn norm(&self) -> Result<PNorm> {
        let n = self.entries.iter().map(|a| norm(a, self.prime)).max().unwrap_or(PNorm::Zero);
        match n {
            PNorm::Zero => Err(Error::DegenerateMatrix),
            n => Ok(n),
        }
    }

    /// `k_A = log_p ||A||_p`.
    pub fn log_norm(&self) -> Result<i64> {
        Ok(self.norm()?.exponent().expect("nonzero norm"))
    }

    pub fn mul_vec(&self, x: &PAdicVector) -> Result<PAdicVector> {
        same_prime(self.prime, x.prime)?;
        check_dim(self.dim, x.dim())?;
        let components = (0..self.dim)
            .map(|i| (0..self.dim).fold(BigRational::zero(), |acc, j| acc + self.entry(i, j) * &x.components[j]))
            .collect();
        Ok(PAdicVector { components, prime: self.prime })
    }

    pub fn mul(&self, other: &PAdicMatrix) -> Result<PAdicMatrix> {
        same_prime(self.prime, other.prime)?;
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push((0..n).fold(BigRational::zero(), |acc, k| acc + self.entry(i, k) * other.entry(k, j)));
            }
        }
        Ok(PAdicMatrix { dim: n, entries, prime: self.prime })
    }

    /// Row-reduces `[A | I]`; returns the determinant and, when it is
    /// nonzero, the inverse.
    fn eliminate(&self) -> (BigRational, Option<PAdicMatrix>) {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut inv = PAdicMatrix::identity(n, self.prime).entries;
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return (BigRational::zero(), None);
            };
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let pv = a[col * n + col].clone();
            det *= &pv;
            let pinv = pv.recip();
            for j in 0..n {
                a[col * n + j] *= &pinv;
                inv[col * n + j] *= &pinv;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let factor = a[r * n + col].clone();
                for j in 0..n {
                    let t = &factor * &a[col * n + j];
                    a[r * n + j] -= t;
                    let t = &factor * &inv[col * n + j];
                    inv[r * n + j] -= t;
                }
            }
        }
        let inverse = PAdicMatrix { dim: n, entries: inv, prime: self.prime };
        (det, Some(inverse))
    }

    pub fn det(&self) -> BigRational {
        self.eliminate().0
    }

    pub fn inverse(&self) -> Result<PAdicMatrix> {
        self.eliminate().1.ok_or(Error::SingularMatrix)
    }

    /// Evaluates `||A||^{-n} <= |det A^{-1}|_p <= ||A^{-1}||^n`.
    pub fn det_bounds(&self) -> Result<DetBounds> {
        let (det, inverse) = self.eliminate();
        let inverse = inverse.ok_or(Error::SingularMatrix)?;
        let n = self.dim as i64;
        let lower = self.norm()?.powi(-n);
        let mid = norm(&det.recip(), self.prime);
        let upper = inverse.norm()?.powi(n);
        Ok(DetBounds { lower, mid, upper, holds: lower <= mid && mid <= upper })
    }

    /// Whether the matrix is a scalar multiple of the identity.
    pub fn as_scalar(&self) -> Option<BigRational> {
        let n = self.dim;
        let s = self.entry(0, 0).clone();
        for i in 0..n {
            for j in 0..n {
                let e = self.entry(i, j);
                let ok = if i == j { *e == s } else { e.is_zero() };
                if !ok {
                    return None;
                }
            }
        }
        Some(s)
    }
}

/// The three sides of the determinant estimate for an invertible matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetBounds {
    /// `||A||_p^{-n}`
    pub lower: PNorm,
    /// `|det A^{-1}|_p`
    pub mid: PNorm,
    /// `||A^{-1}||_p^n`
    pub upper: PNorm,
    pub holds: bool,
}

pub fn verify_det_bounds(a: &PAdicMatrix) -> Result<DetBounds> {
    a.det_bounds()
}

/// Compares two rationals by their p-adic norms.
pub fn cmp_norm(a: &BigRational, b: &BigRational, p: Prime) -> Ordering {
    norm(a, p).cmp(&norm(b, p))
}

/// Lossy conversion used only for reporting.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
