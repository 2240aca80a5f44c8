//! Weighted Lebesgue, central Morrey and central BMO norms of radial functions.

use serde::{Deserialize, Serialize};

use super::Weight;
use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::radial::measure::ball_average;
use crate::radial::power::{growth_of, power_sum, End, Growth};
use crate::radial::{RadialFunction, ShellRange, EXP_EPS};
use std::cmp::Ordering;

/// Values within this relative distance of the maximum count as attaining it.
const WITNESS_REL: f64 = 1e-12;

/// Where a Lebesgue norm is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    All,
    /// The centered ball `B_g`.
    Ball(i64),
}

impl Region {
    fn shells(self) -> ShellRange {
        match self {
            Region::All => ShellRange::ALL,
            Region::Ball(g) => ShellRange::at_most(g),
        }
    }
}

/// A supremum norm with the shell index attaining it, if any.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: ExtendedValue,
    pub witness: Option<i64>,
}

impl NormResult {
    fn infinite() -> Self {
        NormResult { value: ExtendedValue::Infinite, witness: None }
    }
}

fn check_exponent(q: f64, what: &str) -> Result<()> {
    if q.is_finite() && q >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be a finite exponent >= 1, got {q}")))
    }
}

fn check_prime(f: &RadialFunction, w: &Weight) -> Result<()> {
    if f.prime() != w.prime() {
        return Err(Error::PrimeMismatch(f.prime().get(), w.prime().get()));
    }
    Ok(())
}

/// `(int_region |f|^q w)^{1/q}`.
pub fn lebesgue_norm(f: &RadialFunction, w: &Weight, q: f64, region: Region) -> Result<ExtendedValue> {
    check_exponent(q, "q")?;
    check_prime(f, w)?;
    let s = power_sum(f, q, &w.shell_masses(), region.shells())?;
    Ok(s.map(|v| v.powf(1.0 / q)))
}

/// Size of `sum_{j <= g} a_j` as `g -> +inf`, given the size of `a_j`.
fn partial_sum_growth(inc: Growth) -> Growth {
    if inc.rate < -EXP_EPS {
        Growth::FLAT
    } else if inc.rate > EXP_EPS {
        inc
    } else {
        Growth { rate: 0.0, logdeg: inc.logdeg + 1.0 }
    }
}

fn finite_window(window: ShellRange) -> Result<(i64, i64)> {
    match (window.lo, window.hi) {
        (Some(a), Some(b)) if a <= b => Ok((a, b)),
        (Some(_), Some(_)) => Err(Error::EmptyRange),
        _ => Err(Error::InvalidParameter("norm window must be finite".into())),
    }
}

/// Window extended to cover every breakpoint of the data with a margin.
fn evaluation_range(fs: &[&RadialFunction], window: (i64, i64)) -> (i64, i64) {
    let cuts: Vec<i64> = fs.iter().flat_map(|f| f.cut_points()).collect();
    let lo = cuts.iter().min().map_or(window.0, |c| window.0.min(c - 2));
    let hi = cuts.iter().max().map_or(window.1, |c| window.1.max(c + 2));
    (lo, hi)
}

fn witness(values: &[(i64, f64)]) -> (f64, Option<i64>) {
    let max = values.iter().map(|v| v.1).fold(0.0, f64::max);
    let w = values.iter().find(|v| v.1 >= max * (1.0 - WITNESS_REL)).map(|v| v.0);
    (max, w)
}

/// `sup_g w(B_g)^{-(1/q + lambda)} ||f||_{L^q_w(B_g)}`.
///
/// The sup is taken over `window` widened to the breakpoints of `f` and `w`;
/// beyond that the per-ball quantity is classified by its asymptotic growth
/// and the norm is `+inf` when it grows at either end. For `lambda < -1/q`
/// the space is trivial and every nonzero `f` has infinite norm.
pub fn morrey_norm(f: &RadialFunction, w: &Weight, q: f64, lambda: f64, window: ShellRange) -> Result<NormResult> {
    check_exponent(q, "q")?;
    check_prime(f, w)?;
    if f.is_zero() {
        return Ok(NormResult { value: ExtendedValue::ZERO, witness: None });
    }
    let masses = w.shell_masses();
    let (lo, hi) = evaluation_range(&[f, &masses], finite_window(window)?);
    let head = power_sum(f, q, &masses, ShellRange::at_most(lo))?;
    let ExtendedValue::Finite(mut inner) = head else {
        return Ok(NormResult::infinite());
    };
    let ExtendedValue::Finite(mut ball) = w.ball_mass(lo) else {
        return Err(Error::NotLocallyIntegrable("weight ball mass diverges".into()));
    };
    let expo = 1.0 / q + lambda;
    let mut values = Vec::with_capacity((hi - lo + 1) as usize);
    for g in lo..=hi {
        if g > lo {
            let m = masses.value(g);
            inner += f.value(g).abs().powf(q) * m;
            ball += m;
        }
        values.push((g, inner.powf(1.0 / q) * ball.powf(-expo)));
    }
    // asymptotics beyond the evaluated range
    let gm_up = growth_of(&masses, End::Upper).unwrap_or(Growth::FLAT);
    let upper_inner = match growth_of(f, End::Upper) {
        None => Growth::FLAT,
        Some(gf) => partial_sum_growth(gf.pow(q).times(gm_up)),
    };
    let upper = upper_inner.pow(1.0 / q).times(partial_sum_growth(gm_up).pow(-expo));
    if upper.trend() == Ordering::Greater {
        return Ok(NormResult::infinite());
    }
    if let Some(gf) = growth_of(f, End::Lower) {
        let gm = growth_of(&masses, End::Lower).unwrap_or(Growth::FLAT);
        let lower = gf.pow(q).times(gm).pow(1.0 / q).times(gm.pow(-expo));
        if lower.trend() == Ordering::Greater {
            return Ok(NormResult::infinite());
        }
    }
    let (max, wit) = witness(&values);
    Ok(NormResult { value: ExtendedValue::Finite(max), witness: wit })
}

/// Per-ball CMO quantity `(w(B_g)^-1 int_{B_g} |b - b_{B_g}|^r w)^{1/r}`.
pub fn cmo_at(b: &RadialFunction, w: &Weight, r: f64, g: i64) -> Result<ExtendedValue> {
    let avg = ball_average(b, w.dim(), g)?;
    let centered = b.sub(&RadialFunction::constant(b.prime(), avg));
    if centered.is_zero() {
        return Ok(ExtendedValue::ZERO);
    }
    let s = power_sum(&centered, r, &w.shell_masses(), ShellRange::at_most(g))?;
    let ExtendedValue::Finite(mass) = w.ball_mass(g) else {
        return Ok(ExtendedValue::ZERO);
    };
    Ok(s.map(|v| (v / mass).powf(1.0 / r)))
}

/// Distances beyond the window at which the supremum is also sampled.
const CMO_PROBES: [i64; 2] = [16, 32];

/// Whether the mean oscillation of `b` on `B_g` is unbounded as `g` tends to `end`.
///
/// A term reaching `end` that grows towards it, or a `log^k` with `k >= 2`,
/// makes it unbounded; decaying terms, constants and `log_p |x|` do not.
fn cmo_unbounded(b: &RadialFunction, end: End) -> bool {
    b.terms().iter().any(|t| {
        let reaches = match end {
            End::Upper => t.range.hi.is_none(),
            End::Lower => t.range.lo.is_none(),
        };
        let rate = match end {
            End::Upper => t.exponent,
            End::Lower => -t.exponent,
        };
        reaches && t.coeff != 0.0 && (rate > EXP_EPS || (rate.abs() <= EXP_EPS && t.logpow >= 2))
    })
}

/// `sup_g (w(B_g)^-1 int_{B_g} |b - b_{B_g}|^r w)^{1/r}` with unweighted averages.
///
/// Each ball is an exact shell sum. Unbounded oscillation at either end is
/// read off the terms of `b`; otherwise the supremum is taken over the window
/// and a few balls beyond it.
pub fn cmo_norm(b: &RadialFunction, w: &Weight, r: f64, window: ShellRange) -> Result<NormResult> {
    check_exponent(r, "r")?;
    check_prime(b, w)?;
    if cmo_unbounded(b, End::Upper) || cmo_unbounded(b, End::Lower) {
        return Ok(NormResult::infinite());
    }
    let (lo, hi) = evaluation_range(&[b], finite_window(window)?);
    let probes = CMO_PROBES.iter().flat_map(|d| [lo - d, hi + d]);
    let mut values = Vec::with_capacity((hi - lo + 1) as usize + 2 * CMO_PROBES.len());
    for g in (lo..=hi).chain(probes) {
        match cmo_at(b, w, r, g) {
            Ok(ExtendedValue::Finite(v)) => values.push((g, v)),
            Ok(ExtendedValue::Infinite) => return Ok(NormResult::infinite()),
            Err(Error::NotLocallyIntegrable(_)) | Err(Error::NonIntegrable(_)) => return Ok(NormResult::infinite()),
            Err(e) => return Err(e),
        }
    }
    values.sort_by_key(|v| v.0);
    let (max, wit) = witness(&values);
    Ok(NormResult { value: ExtendedValue::Finite(max), witness: wit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Prime;

    #[test]
    fn morrey_of_ball_indicator() {
        let p = Prime::new(2).unwrap();
        let w = Weight::unweighted(p, 1);
        let chi: RadialFunction = RadialFunction::ball_indicator(p, 0);
        let r = morrey_norm(&chi, &w, 2.0, -0.25, ShellRange::finite(-64, 64)).unwrap();
        assert!((r.value.to_f64() - 1.0).abs() < 1e-12);
        assert_eq!(r.witness, Some(0));
    }

    #[test]
    fn morrey_detects_growth() {
        let p = Prime::new(3).unwrap();
        let w = Weight::unweighted(p, 1);
        let f: RadialFunction = RadialFunction::power(p, 0.1);
        let r = morrey_norm(&f, &w, 2.0, -0.25, ShellRange::finite(-10, 10)).unwrap();
        assert!(r.value.is_divergent());
    }

    #[test]
    fn cmo_of_constants_vanishes() {
        let p = Prime::new(2).unwrap();
        let w = Weight::power(p, 1, 0.5).unwrap();
        let c: RadialFunction = RadialFunction::constant(p, 3.0);
        let r = cmo_norm(&c, &w, 2.0, ShellRange::finite(-5, 5)).unwrap();
        assert_eq!(r.value.to_f64(), 0.0);
    }

    #[test]
    fn lebesgue_homogeneity() {
        let p = Prime::new(5).unwrap();
        let w = Weight::power(p, 2, -1.0).unwrap();
        let f: RadialFunction = RadialFunction::power_on(p, -0.7, ShellRange::at_least(-2));
        let a = lebesgue_norm(&f, &w, 3.0, Region::All).unwrap().to_f64();
        let b = lebesgue_norm(&f.scale(&-2.5), &w, 3.0, Region::All).unwrap().to_f64();
        assert!((b - 2.5 * a).abs() < 1e-12 * b);
    }
}
