//! Sums of `|f(g)|^q w(g)` over shells, for real `q`.
//!
//! These are the building blocks of every weighted norm: with `w` the shell
//! masses of a weight, `power_sum(f, q, w, ALL)` is `||f||_{L^q(w)}^q`.

use std::cmp::Ordering;

use super::series::{shell_sum, SeriesSum};
use super::{joint_segments, RadialFunction, RadialTerm, ShellRange, EXP_EPS};
use crate::error::{Error, Result};
use crate::extended::ExtendedValue;

/// Numeric tails stop once this many consecutive shells add less than
/// `TAIL_REL` of the running sum.
const TAIL_RUN: usize = 64;
const TAIL_REL: f64 = 1e-17;
const TAIL_CAP: usize = 4_000_000;

/// An end of the shell line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    /// `g -> +inf`, large balls.
    Upper,
    /// `g -> -inf`, small balls.
    Lower,
}

/// Asymptotic size `p^(rate g) |g|^logdeg` of a positive sequence at one end,
/// with `rate` measured so that positive means growth towards that end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub rate: f64,
    pub logdeg: f64,
}

impl Growth {
    pub const FLAT: Growth = Growth { rate: 0.0, logdeg: 0.0 };

    pub fn times(self, o: Growth) -> Growth {
        Growth { rate: self.rate + o.rate, logdeg: self.logdeg + o.logdeg }
    }

    pub fn pow(self, q: f64) -> Growth {
        Growth { rate: self.rate * q, logdeg: self.logdeg * q }
    }

    /// Whether a sequence of this size is summable towards its end.
    pub fn summable(self) -> Option<bool> {
        if self.rate < -EXP_EPS {
            Some(true)
        } else if self.rate > EXP_EPS {
            Some(false)
        } else if self.logdeg >= -1.0 {
            Some(false)
        } else {
            // summable, but too slowly for a numeric tail
            None
        }
    }

    /// Whether the sequence tends to zero, stays bounded, or grows.
    pub fn trend(self) -> Ordering {
        if self.rate < -EXP_EPS {
            Ordering::Less
        } else if self.rate > EXP_EPS {
            Ordering::Greater
        } else {
            self.logdeg.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
        }
    }
}

/// The term of `f` that dominates at `end` among terms reaching it.
pub fn dominant_term(f: &RadialFunction, end: End) -> Option<&RadialTerm> {
    f.terms()
        .iter()
        .filter(|t| match end {
            End::Upper => t.range.hi.is_none(),
            End::Lower => t.range.lo.is_none(),
        })
        .max_by(|a, b| {
            let ka = oriented(a.exponent, end);
            let kb = oriented(b.exponent, end);
            ka.total_cmp(&kb).then(a.logpow.cmp(&b.logpow))
        })
}

fn oriented(e: f64, end: End) -> f64 {
    match end {
        End::Upper => e,
        End::Lower => -e,
    }
}

/// Asymptotic size of `|f|` at `end`; `None` if `f` vanishes near that end.
pub fn growth_of(f: &RadialFunction, end: End) -> Option<Growth> {
    dominant_term(f, end).map(|t| Growth { rate: oriented(t.exponent, end), logdeg: t.logpow as f64 })
}

/// `sum_{g in range} |f(g)|^q w(g)` with `w >= 0`.
///
/// `q` may be negative, in which case a zero of `f` where `w > 0` makes the
/// sum infinite.
pub fn power_sum(f: &RadialFunction, q: f64, w: &RadialFunction, range: ShellRange) -> Result<ExtendedValue> {
    if !q.is_finite() || q == 0.0 {
        return Err(Error::InvalidParameter(format!("power exponent {q}")));
    }
    let mut total = ExtendedValue::ZERO;
    for seg in joint_segments(&[f, w], &[]) {
        let seg = seg.intersect(&range);
        if seg.is_empty() {
            continue;
        }
        let part = segment_sum(f, q, w, seg)?;
        if part.is_divergent() {
            return Ok(ExtendedValue::Infinite);
        }
        total = total.add(part);
    }
    Ok(total)
}

fn segment_sum(f: &RadialFunction, q: f64, w: &RadialFunction, seg: ShellRange) -> Result<ExtendedValue> {
    let wt = w.active_terms(&seg);
    if wt.is_empty() {
        return Ok(ExtendedValue::ZERO);
    }
    let ft = f.active_terms(&seg);
    if ft.is_empty() {
        return Ok(if q > 0.0 { ExtendedValue::ZERO } else { ExtendedValue::Infinite });
    }
    let p = f.prime();
    if ft.len() == 1 && ft[0].logpow == 0 {
        let t = ft[0];
        let fq = RadialFunction::term(p, t.coeff.abs().powf(q), t.exponent * q, 0, seg);
        return match shell_sum(&fq.mul(&w.restrict(seg)))? {
            SeriesSum::Finite(v) => Ok(ExtendedValue::Finite(v.max(0.0))),
            SeriesSum::PosInfinite => Ok(ExtendedValue::Infinite),
        };
    }
    let fs = f.restrict(seg);
    let ws = w.restrict(seg);
    let term = |g: i64| -> Option<f64> {
        let wv = ws.value(g);
        if wv <= 0.0 {
            return Some(0.0);
        }
        let fv = fs.value(g).abs();
        if fv == 0.0 && q < 0.0 {
            return None;
        }
        Some(fv.powf(q) * wv)
    };
    let mut sum = 0.0;
    let walk = |start: i64, step: i64, stop: Option<i64>| -> Option<f64> {
        let mut g = start;
        let mut quiet = 0;
        let mut acc = 0.0;
        for _ in 0..TAIL_CAP {
            if stop.map_or(false, |s| (step > 0 && g > s) || (step < 0 && g < s)) {
                break;
            }
            let v = term(g)?;
            acc += v;
            if stop.is_none() {
                if v <= TAIL_REL * acc {
                    quiet += 1;
                    if quiet >= TAIL_RUN {
                        break;
                    }
                } else {
                    quiet = 0;
                }
            }
            g += step;
        }
        Some(acc)
    };
    match (seg.lo, seg.hi) {
        (Some(a), Some(b)) => match walk(a, 1, Some(b)) {
            Some(v) => sum += v,
            None => return Ok(ExtendedValue::Infinite),
        },
        (lo, hi) => {
            let (end, start, step) = match (lo, hi) {
                (Some(a), None) => (End::Upper, a, 1),
                (None, Some(b)) => (End::Lower, b, -1),
                _ => {
                    // split a full-line segment at zero
                    let up = segment_sum(f, q, w, ShellRange::at_least(0))?;
                    let down = segment_sum(f, q, w, ShellRange::at_most(-1))?;
                    return Ok(up.add(down));
                }
            };
            let gf = growth_of(&fs, end).expect("segment has active terms");
            let gw = growth_of(&ws, end).expect("segment has active weight");
            match gf.pow(q).times(gw).summable() {
                Some(true) => {}
                Some(false) => return Ok(ExtendedValue::Infinite),
                None => return Err(Error::Unsupported("sum decays only logarithmically; no numeric tail".into())),
            }
            match walk(start, step, None) {
                Some(v) => sum += v,
                None => return Ok(ExtendedValue::Infinite),
            }
        }
    }
    Ok(ExtendedValue::Finite(sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Prime;

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    #[test]
    fn closed_form_branch_matches_numeric_branch() {
        let p = p2();
        let f: RadialFunction = RadialFunction::power_on(p, -0.3, ShellRange::at_most(3));
        let w: RadialFunction = RadialFunction::power(p, 1.0);
        let exact = power_sum(&f, 2.0, &w, ShellRange::ALL).unwrap().to_f64();
        // adding a log term with zero weight forces the numeric path
        let g = f.add(&RadialFunction::term(p, 1e-300, 0.0, 1, ShellRange::at_most(3)));
        let numeric = power_sum(&g, 2.0, &w, ShellRange::ALL).unwrap().to_f64();
        assert!((exact - numeric).abs() < 1e-12 * exact);
    }

    #[test]
    fn negative_powers_of_zero_diverge() {
        let p = p2();
        let f: RadialFunction = RadialFunction::indicator(p, ShellRange::at_most(0));
        let w: RadialFunction = RadialFunction::indicator(p, ShellRange::finite(-1, 1));
        assert!(power_sum(&f, -1.0, &w, ShellRange::ALL).unwrap().is_divergent());
        assert_eq!(power_sum(&f, 2.0, &w, ShellRange::ALL).unwrap().to_f64(), 2.0);
    }

    #[test]
    fn log_tail_classification() {
        let p = p2();
        let log: RadialFunction = RadialFunction::log(p).restrict(ShellRange::at_least(1));
        let decay: RadialFunction = RadialFunction::power(p, -1.0);
        let s = power_sum(&log, 2.0, &decay, ShellRange::ALL).unwrap().to_f64();
        // sum_{g >= 1} g^2 2^-g = 6
        assert!((s - 6.0).abs() < 1e-12);
        let grow: RadialFunction = RadialFunction::power(p, 0.0);
        assert!(power_sum(&log, 2.0, &grow, ShellRange::ALL).unwrap().is_divergent());
    }
}
