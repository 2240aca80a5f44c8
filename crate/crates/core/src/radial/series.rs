//! Closed-form sums of radial functions over shells.

use std::cmp::Ordering;

use super::{binomial, int_pow, RadialFunction, RadialTerm, ShellRange, ShellScalar};
use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::padic::Prime;

/// Finite ranges longer than this are summed through tail differences.
const DIRECT_LIMIT: u64 = 1_000_000;

/// The value of a series of real terms.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesSum<S> {
    Finite(S),
    PosInfinite,
}

impl<S: ShellScalar> SeriesSum<S> {
    pub fn finite(self) -> Option<S> {
        match self {
            SeriesSum::Finite(v) => Some(v),
            SeriesSum::PosInfinite => None,
        }
    }

    pub fn to_extended(&self) -> ExtendedValue {
        match self {
            SeriesSum::Finite(v) => ExtendedValue::Finite(v.to_f64()),
            SeriesSum::PosInfinite => ExtendedValue::Infinite,
        }
    }
}

/// Which end of the shell line a term reaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tail {
    Upper,
    Lower,
}

/// Eulerian numbers `A(j, m)` for `m < j`.
fn eulerian_row(j: u32) -> Vec<i64> {
    let mut row = vec![1i64];
    for i in 2..=j as i64 {
        let mut next = vec![0i64; i as usize];
        for m in 0..i as usize {
            let left = if m < row.len() { (m as i64 + 1) * row[m] } else { 0 };
            let right = if m >= 1 && m - 1 < row.len() { (i - m as i64) * row[m - 1] } else { 0 };
            next[m] = left + right;
        }
        row = next;
    }
    row
}

/// `sum_{i >= 0} i^j r^i` for `r = p^e < 1`.
fn polylog_moment<S: ShellScalar>(p: Prime, e: S::Exp, j: u32) -> S {
    let r = S::pow_p(p, e, 1);
    let one_minus = S::one_minus_pow_p(p, e);
    if j == 0 {
        return S::one().over(&one_minus);
    }
    let mut poly = S::zero();
    let mut rm = S::one();
    for a in eulerian_row(j) {
        poly = poly.plus(&S::from_int(a).times(&rm));
        rm = rm.times(&r);
    }
    let mut denom = one_minus.clone();
    for _ in 0..j {
        denom = denom.times(&one_minus);
    }
    r.times(&poly).over(&denom)
}

/// `sum_{g >= lo} g^k p^(beta g)` for `beta < 0`.
fn upper_tail<S: ShellScalar>(p: Prime, beta: S::Exp, k: u32, lo: i64) -> S {
    let mut acc = S::zero();
    for j in 0..=k {
        let term = binomial::<S>(k, j).times(&int_pow(lo, k - j)).times(&polylog_moment::<S>(p, beta, j));
        acc = acc.plus(&term);
    }
    S::pow_p(p, beta, lo).times(&acc)
}

/// `sum_{g <= hi} g^k p^(beta g)` for `beta > 0`.
fn lower_tail<S: ShellScalar>(p: Prime, beta: S::Exp, k: u32, hi: i64) -> S {
    let neg = S::exp_scale(beta, -1);
    let mut acc = S::zero();
    for j in 0..=k {
        let mut term = binomial::<S>(k, j).times(&int_pow(hi, k - j)).times(&polylog_moment::<S>(p, neg, j));
        if j % 2 == 1 {
            term = term.negated();
        }
        acc = acc.plus(&term);
    }
    S::pow_p(p, beta, hi).times(&acc)
}

fn direct<S: ShellScalar>(t: &RadialTerm<S>, p: Prime, lo: i64, hi: i64) -> S {
    (lo..=hi).fold(S::zero(), |acc, g| acc.plus(&t.raw_value(p, g)))
}

/// `sum_{g in [lo, hi]} g^k p^(beta g)` times the coefficient.
fn finite_sum<S: ShellScalar>(t: &RadialTerm<S>, p: Prime, lo: i64, hi: i64) -> Result<S> {
    if lo > hi {
        return Ok(S::zero());
    }
    if ((hi - lo) as u64) < DIRECT_LIMIT {
        return Ok(direct(t, p, lo, hi));
    }
    let (b, k) = (t.exponent, t.logpow);
    let raw = match S::exp_sign(b) {
        Ordering::Less => upper_tail::<S>(p, b, k, lo).minus(&upper_tail::<S>(p, b, k, hi + 1)),
        Ordering::Greater => lower_tail::<S>(p, b, k, hi).minus(&lower_tail::<S>(p, b, k, lo - 1)),
        Ordering::Equal if k == 0 => S::from_int(hi - lo + 1),
        Ordering::Equal => return Err(Error::Unsupported(format!("sum of g^{k} over {} shells", hi - lo + 1))),
    };
    Ok(t.coeff.times(&raw))
}

/// Sum over one infinite end, or `None` if that end diverges.
fn tail_sum<S: ShellScalar>(t: &RadialTerm<S>, p: Prime, tail: Tail, edge: i64) -> Option<S> {
    match tail {
        Tail::Upper if S::exp_sign(t.exponent) == Ordering::Less => {
            Some(t.coeff.times(&upper_tail::<S>(p, t.exponent, t.logpow, edge)))
        }
        Tail::Lower if S::exp_sign(t.exponent) == Ordering::Greater => {
            Some(t.coeff.times(&lower_tail::<S>(p, t.exponent, t.logpow, edge)))
        }
        _ => None,
    }
}

/// Growth order of a term towards one end; larger means faster growth.
fn growth_key<S: ShellScalar>(t: &RadialTerm<S>, tail: Tail) -> (S::Exp, u32) {
    match tail {
        Tail::Upper => (t.exponent, t.logpow),
        Tail::Lower => (S::exp_scale(t.exponent, -1), t.logpow),
    }
}

/// Sign of a term far out towards `tail`.
fn tail_sign<S: ShellScalar>(t: &RadialTerm<S>, tail: Tail) -> Ordering {
    let s = t.coeff.sign();
    if tail == Tail::Lower && t.logpow % 2 == 1 {
        s.reverse()
    } else {
        s
    }
}

/// Sign of the dominant term among terms reaching `tail`, when that end diverges.
fn divergent_sign<S: ShellScalar>(terms: &[&RadialTerm<S>], tail: Tail) -> Option<Ordering> {
    let dominant = terms.iter().copied().max_by(|a, b| {
        let (ea, ka) = growth_key(a, tail);
        let (eb, kb) = growth_key(b, tail);
        S::exp_cmp(ea, eb).then(ka.cmp(&kb))
    })?;
    let (e, _) = growth_key(dominant, tail);
    // the end converges only if every term decays geometrically
    if S::exp_sign(e) == Ordering::Less {
        None
    } else {
        Some(tail_sign(dominant, tail))
    }
}

/// `sum_g f(g)` over all shells, in closed form.
///
/// A divergent sum is `PosInfinite` when the dominant term is positive at
/// every divergent end; otherwise it has no value and `NonIntegrable` is
/// returned.
pub fn shell_sum<S: ShellScalar>(f: &RadialFunction<S>) -> Result<SeriesSum<S>> {
    let p = f.prime();
    let terms = f.terms();
    let mut divergent = Vec::new();
    for tail in [Tail::Upper, Tail::Lower] {
        let reaching: Vec<&RadialTerm<S>> = terms
            .iter()
            .filter(|t| match tail {
                Tail::Upper => t.range.hi.is_none(),
                Tail::Lower => t.range.lo.is_none(),
            })
            .collect();
        if let Some(sign) = divergent_sign(&reaching, tail) {
            divergent.push(sign);
        }
    }
    if !divergent.is_empty() {
        return if divergent.iter().all(|s| *s == Ordering::Greater) {
            Ok(SeriesSum::PosInfinite)
        } else {
            Err(Error::NonIntegrable("shell series diverges with indefinite sign".into()))
        };
    }
    let mut total = S::zero();
    for t in terms {
        let part = match (t.range.lo, t.range.hi) {
            (Some(a), Some(b)) => finite_sum(t, p, a, b)?,
            (Some(a), None) => tail_sum(t, p, Tail::Upper, a).expect("checked convergent"),
            (None, Some(b)) => tail_sum(t, p, Tail::Lower, b).expect("checked convergent"),
            (None, None) => unreachable!("a full-line term cannot converge at both ends"),
        };
        total = total.plus(&part);
    }
    Ok(SeriesSum::Finite(total))
}

/// `sum_g f(g)` restricted to `range`.
pub fn shell_sum_over<S: ShellScalar>(f: &RadialFunction<S>, range: ShellRange) -> Result<SeriesSum<S>> {
    shell_sum(&f.restrict(range))
}
