//! Radial functions on `Q_p^n`: finite sums of shell-restricted power-log
//! terms `c * |x|^beta * (log_p |x|)^k`.
//!
//! A radial function is constant on every sphere `S_g = {|x|_p = p^g}`, so
//! it is stored as a function of the shell index `g`. All integration goes
//! through exact shell series.

pub mod measure;
pub mod power;
pub mod sampling;
mod scalar;
pub mod series;

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub(crate) use scalar::{binomial, int_pow};
pub use scalar::{ShellScalar, EXP_EPS};

use crate::padic::Prime;

/// A shell index `g`, standing for the sphere `|x|_p = p^g`.
pub type ShellIndex = i64;

/// A set of consecutive shells; `None` ends are infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShellRange {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl ShellRange {
    pub const ALL: ShellRange = ShellRange { lo: None, hi: None };

    pub fn new(lo: Option<i64>, hi: Option<i64>) -> Self {
        ShellRange { lo, hi }
    }

    pub fn finite(lo: i64, hi: i64) -> Self {
        ShellRange { lo: Some(lo), hi: Some(hi) }
    }

    pub fn single(g: i64) -> Self {
        ShellRange::finite(g, g)
    }

    /// Shells `<= hi`, i.e. the ball `B_hi`.
    pub fn at_most(hi: i64) -> Self {
        ShellRange { lo: None, hi: Some(hi) }
    }

    pub fn at_least(lo: i64) -> Self {
        ShellRange { lo: Some(lo), hi: None }
    }

    pub fn is_empty(&self) -> bool {
        matches!((self.lo, self.hi), (Some(a), Some(b)) if a > b)
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_some() && self.hi.is_some()
    }

    pub fn contains(&self, g: i64) -> bool {
        self.lo.map_or(true, |a| g >= a) && self.hi.map_or(true, |b| g <= b)
    }

    pub fn intersect(&self, o: &ShellRange) -> ShellRange {
        let lo = match (self.lo, o.lo) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let hi = match (self.hi, o.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        ShellRange { lo, hi }
    }

    /// The range of `g + d` for `g` in `self`.
    pub fn shift(&self, d: i64) -> ShellRange {
        ShellRange { lo: self.lo.map(|a| a + d), hi: self.hi.map(|b| b + d) }
    }

    /// Number of shells, `None` if infinite.
    pub fn len(&self) -> Option<u64> {
        match (self.lo, self.hi) {
            (Some(a), Some(b)) if a > b => Some(0),
            (Some(a), Some(b)) => Some((b - a) as u64 + 1),
            _ => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        let lo = self.lo.expect("iterating an unbounded range");
        let hi = self.hi.expect("iterating an unbounded range");
        lo..=hi
    }

    /// `{g : m*g + c in self}`.
    pub fn preimage_affine(&self, m: i64, c: i64) -> ShellRange {
        if m == 0 {
            return if self.contains(c) { ShellRange::ALL } else { ShellRange::finite(1, 0) };
        }
        // m g + c >= a  and  m g + c <= b, solved for g
        if m > 0 {
            ShellRange {
                lo: self.lo.map(|a| ceil_div(a - c, m)),
                hi: self.hi.map(|b| Integer::div_floor(&(b - c), &m)),
            }
        } else {
            ShellRange {
                lo: self.hi.map(|b| ceil_div(c - b, -m)),
                hi: self.lo.map(|a| Integer::div_floor(&(c - a), &(-m))),
            }
        }
    }
}

fn ceil_div(a: i64, m: i64) -> i64 {
    -Integer::div_floor(&(-a), &m)
}

impl fmt::Display for ShellRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lo {
            Some(a) => write!(f, "[{a}, ")?,
            None => write!(f, "(-inf, ")?,
        }
        match self.hi {
            Some(b) => write!(f, "{b}]"),
            None => write!(f, "+inf)"),
        }
    }
}

/// One summand `coeff * |x|^exponent * (log_p |x|)^logpow` active on `range`.
///
/// On shell `g` the term is worth `coeff * p^(exponent * g) * g^logpow`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTerm<S: ShellScalar = f64> {
    pub coeff: S,
    pub exponent: S::Exp,
    pub logpow: u32,
    pub range: ShellRange,
}

impl<S: ShellScalar> RadialTerm<S> {
    pub fn new(coeff: S, exponent: S::Exp, logpow: u32, range: ShellRange) -> Self {
        RadialTerm { coeff, exponent, logpow, range }
    }

    /// Value on shell `g`, ignoring the range.
    pub fn raw_value(&self, p: Prime, g: i64) -> S {
        self.coeff.times(&S::pow_p(p, self.exponent, g)).times(&int_pow(g, self.logpow))
    }

    pub fn value(&self, p: Prime, g: i64) -> S {
        if self.range.contains(g) {
            self.raw_value(p, g)
        } else {
            S::zero()
        }
    }
}

/// A radial function in canonical form.
///
/// Terms sharing `(exponent, logpow)` have disjoint ranges, no term has a zero
/// coefficient, and terms are sorted by `(exponent, logpow, range.lo)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction<S: ShellScalar = f64> {
    prime: Prime,
    terms: Vec<RadialTerm<S>>,
}

/// Radial functions with rational coefficients and integer exponents.
pub type ExactRadialFunction = RadialFunction<BigRational>;

impl<S: ShellScalar> RadialFunction<S> {
    pub fn new(prime: Prime, terms: Vec<RadialTerm<S>>) -> Self {
        RadialFunction { prime, terms: canonicalize(terms) }
    }

    pub fn zero(prime: Prime) -> Self {
        RadialFunction { prime, terms: Vec::new() }
    }

    pub fn term(prime: Prime, coeff: S, exponent: S::Exp, logpow: u32, range: ShellRange) -> Self {
        RadialFunction::new(prime, vec![RadialTerm::new(coeff, exponent, logpow, range)])
    }

    pub fn constant(prime: Prime, c: S) -> Self {
        RadialFunction::term(prime, c, S::exp_from_int(0), 0, ShellRange::ALL)
    }

    /// The characteristic function of the shells in `range`.
    pub fn indicator(prime: Prime, range: ShellRange) -> Self {
        RadialFunction::term(prime, S::one(), S::exp_from_int(0), 0, range)
    }

    /// `chi_{B_g}`.
    pub fn ball_indicator(prime: Prime, g: i64) -> Self {
        RadialFunction::indicator(prime, ShellRange::at_most(g))
    }

    /// `|x|_p^beta` on all of `Q_p^n \ {0}`.
    pub fn power(prime: Prime, beta: S::Exp) -> Self {
        RadialFunction::term(prime, S::one(), beta, 0, ShellRange::ALL)
    }

    pub fn power_on(prime: Prime, beta: S::Exp, range: ShellRange) -> Self {
        RadialFunction::term(prime, S::one(), beta, 0, range)
    }

    /// `log_p |x|_p`.
    pub fn log(prime: Prime) -> Self {
        RadialFunction::term(prime, S::one(), S::exp_from_int(0), 1, ShellRange::ALL)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn terms(&self) -> &[RadialTerm<S>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_logpow(&self) -> u32 {
        self.terms.iter().map(|t| t.logpow).max().unwrap_or(0)
    }

    /// The value on shell `g`.
    pub fn value(&self, g: i64) -> S {
        self.terms
            .iter()
            .filter(|t| t.range.contains(g))
            .fold(S::zero(), |acc, t| acc.plus(&t.raw_value(self.prime, g)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.prime, other.prime, "adding radial functions over different primes");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        RadialFunction::new(self.prime, terms)
    }

    pub fn neg(&self) -> Self {
        self.scale(&S::one().negated())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return RadialFunction::zero(self.prime);
        }
        let terms = self.terms.iter().map(|t| RadialTerm { coeff: t.coeff.times(c), ..t.clone() }).collect();
        RadialFunction { prime: self.prime, terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.prime, other.prime, "multiplying radial functions over different primes");
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let range = a.range.intersect(&b.range);
                if range.is_empty() {
                    continue;
                }
                terms.push(RadialTerm {
                    coeff: a.coeff.times(&b.coeff),
                    exponent: S::exp_add(a.exponent, b.exponent),
                    logpow: a.logpow + b.logpow,
                    range,
                });
            }
        }
        RadialFunction::new(self.prime, terms)
    }

    /// `f * chi_range`.
    pub fn restrict(&self, range: ShellRange) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let r = t.range.intersect(&range);
                (!r.is_empty()).then(|| RadialTerm { range: r, ..t.clone() })
            })
            .collect();
        RadialFunction { prime: self.prime, terms }
    }

    /// `g -> f(m*g + c)` as a function of the shell index.
    pub fn compose_affine(&self, m: i64, c: i64) -> Self {
        let p = self.prime;
        let mut terms = Vec::new();
        for t in &self.terms {
            let range = t.range.preimage_affine(m, c);
            if range.is_empty() {
                continue;
            }
            let base = t.coeff.times(&S::pow_p(p, t.exponent, c));
            let exponent = S::exp_scale(t.exponent, m);
            // (m g + c)^k expanded in powers of g
            for j in 0..=t.logpow {
                let coeff = base.times(&binomial(t.logpow, j)).times(&int_pow(m, j)).times(&int_pow(c, t.logpow - j));
                if coeff.is_zero() {
                    continue;
                }
                terms.push(RadialTerm { coeff, exponent, logpow: j, range });
            }
        }
        RadialFunction::new(p, terms)
    }

    /// `x -> f(t x)` for any `|t|_p = p^d`.
    pub fn dilate(&self, d: i64) -> Self {
        self.compose_affine(1, d)
    }

    /// Finite range ends of all terms, as sorted cut points: a cut at `c`
    /// separates shell `c - 1` from shell `c`.
    pub fn cut_points(&self) -> Vec<i64> {
        let mut cuts: Vec<i64> =
            self.terms.iter().flat_map(|t| [t.range.lo, t.range.hi.map(|h| h + 1)]).flatten().collect();
        cuts.sort_unstable();
        cuts.dedup();
        cuts
    }

    /// The smallest range outside of which the function vanishes.
    pub fn support_hull(&self) -> Option<ShellRange> {
        let mut it = self.terms.iter();
        let first = it.next()?.range;
        Some(it.fold(first, |acc, t| ShellRange {
            lo: acc.lo.zip(t.range.lo).map(|(a, b)| a.min(b)),
            hi: acc.hi.zip(t.range.hi).map(|(a, b)| a.max(b)),
        }))
    }

    /// Terms active on every shell of `seg` (which must not straddle a cut).
    pub fn active_terms(&self, seg: &ShellRange) -> Vec<&RadialTerm<S>> {
        self.terms.iter().filter(|t| !t.range.intersect(seg).is_empty()).collect()
    }

    pub fn map_coeffs<T: ShellScalar>(
        &self,
        coeff: impl Fn(&S) -> T,
        exponent: impl Fn(S::Exp) -> T::Exp,
    ) -> RadialFunction<T> {
        RadialFunction::new(
            self.prime,
            self.terms
                .iter()
                .map(|t| RadialTerm::new(coeff(&t.coeff), exponent(t.exponent), t.logpow, t.range))
                .collect(),
        )
    }
}

impl ExactRadialFunction {
    /// The same function with float coefficients.
    pub fn to_float(&self) -> RadialFunction<f64> {
        self.map_coeffs(|c| c.to_f64(), |e| e as f64)
    }
}

/// Splits the shell line at `cuts` into maximal consecutive ranges.
pub fn segments_from_cuts(cuts: &[i64]) -> Vec<ShellRange> {
    if cuts.is_empty() {
        return vec![ShellRange::ALL];
    }
    let mut out = Vec::with_capacity(cuts.len() + 1);
    out.push(ShellRange::at_most(cuts[0] - 1));
    for w in cuts.windows(2) {
        out.push(ShellRange::finite(w[0], w[1] - 1));
    }
    out.push(ShellRange::at_least(*cuts.last().unwrap()));
    out
}

/// Merged cut points of several functions plus extra cuts.
pub fn joint_segments<S: ShellScalar>(fs: &[&RadialFunction<S>], extra: &[i64]) -> Vec<ShellRange> {
    let mut cuts: Vec<i64> = fs.iter().flat_map(|f| f.cut_points()).collect();
    cuts.extend_from_slice(extra);
    cuts.sort_unstable();
    cuts.dedup();
    segments_from_cuts(&cuts)
}

fn range_key(r: &ShellRange) -> (i64, i64) {
    (r.lo.unwrap_or(i64::MIN), r.hi.unwrap_or(i64::MAX))
}

fn canonicalize<S: ShellScalar>(mut terms: Vec<RadialTerm<S>>) -> Vec<RadialTerm<S>> {
    terms.retain(|t| !t.coeff.is_zero() && !t.range.is_empty());
    terms.sort_by(|a, b| {
        S::exp_cmp(a.exponent, b.exponent)
            .then(a.logpow.cmp(&b.logpow))
            .then(range_key(&a.range).cmp(&range_key(&b.range)))
    });
    let mut out = Vec::with_capacity(terms.len());
    let mut i = 0;
    while i < terms.len() {
        let mut j = i + 1;
        while j < terms.len()
            && S::exp_cmp(terms[j].exponent, terms[i].exponent) == Ordering::Equal
            && terms[j].logpow == terms[i].logpow
        {
            j += 1;
        }
        out.extend(merge_group(&terms[i..j]));
        i = j;
    }
    out
}

/// Sums the coefficients of one `(exponent, logpow)` group into disjoint ranges.
fn merge_group<S: ShellScalar>(group: &[RadialTerm<S>]) -> Vec<RadialTerm<S>> {
    if group.len() == 1 {
        return group.to_vec();
    }
    let exponent = group[0].exponent;
    let logpow = group[0].logpow;
    let cuts: Vec<i64> = {
        let mut c: Vec<i64> = group.iter().flat_map(|t| [t.range.lo, t.range.hi.map(|h| h + 1)]).flatten().collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let mut pieces: Vec<(ShellRange, S)> = Vec::new();
    for seg in segments_from_cuts(&cuts) {
        let mut sum = S::zero();
        let mut scale = S::zero();
        let mut any = false;
        for t in group {
            if !t.range.intersect(&seg).is_empty() {
                sum = sum.plus(&t.coeff);
                scale = scale.plus(&t.coeff.magnitude());
                any = true;
            }
        }
        if !any || S::cancels(&sum, &scale) {
            continue;
        }
        match pieces.last_mut() {
            Some((r, c)) if *c == sum && r.hi.map(|h| h + 1) == seg.lo => r.hi = seg.hi,
            _ => pieces.push((seg, sum)),
        }
    }
    pieces.into_iter().map(|(range, coeff)| RadialTerm { coeff, exponent, logpow, range }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    #[test]
    fn preimage_of_affine_maps() {
        let r = ShellRange::finite(0, 5);
        assert_eq!(r.preimage_affine(2, 1), ShellRange::finite(0, 2));
        assert_eq!(r.preimage_affine(-1, 0), ShellRange::finite(-5, 0));
        assert_eq!(r.preimage_affine(-2, 1), ShellRange::finite(-2, 0));
        assert_eq!(ShellRange::at_most(3).preimage_affine(-3, 0), ShellRange::at_least(-1));
        assert!(r.preimage_affine(0, 9).is_empty());
        for m in [-3i64, -2, -1, 1, 2, 3] {
            for c in -4..=4 {
                let pre = r.preimage_affine(m, c);
                for g in -20..=20 {
                    assert_eq!(pre.contains(g), r.contains(m * g + c), "m={m} c={c} g={g}");
                }
            }
        }
    }

    #[test]
    fn merging_keeps_values() {
        let p = p2();
        let f: RadialFunction = RadialFunction::new(
            p,
            vec![
                RadialTerm::new(1.0, 0.0, 0, ShellRange::finite(-3, 3)),
                RadialTerm::new(2.0, 0.0, 0, ShellRange::finite(0, 6)),
                RadialTerm::new(-1.0, 0.0, 0, ShellRange::finite(-3, -1)),
            ],
        );
        for g in -10..=10 {
            let expect = [(-3..=3, 1.0), (0..=6, 2.0), (-3..=-1, -1.0)]
                .iter()
                .filter(|(r, _)| r.contains(&g))
                .map(|(_, c)| c)
                .sum::<f64>();
            assert_eq!(f.value(g), expect);
        }
        assert_eq!(f.terms().len(), 2);
    }

    #[test]
    fn dilating_indicator_and_log() {
        let p = p2();
        let chi: RadialFunction = RadialFunction::ball_indicator(p, 0);
        assert_eq!(chi.dilate(1), RadialFunction::ball_indicator(p, -1));
        let log: RadialFunction = RadialFunction::log(p);
        let shifted = log.dilate(2);
        assert_eq!(shifted, log.add(&RadialFunction::constant(p, 2.0)));
    }

    #[test]
    fn product_of_ranges() {
        let p = p2();
        let a: RadialFunction = RadialFunction::power_on(p, 1.0, ShellRange::at_least(0));
        let b: RadialFunction = RadialFunction::power_on(p, -1.0, ShellRange::at_most(2));
        let c = a.mul(&b);
        assert_eq!(c, RadialFunction::indicator(p, ShellRange::finite(0, 2)));
    }
}
