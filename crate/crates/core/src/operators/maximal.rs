//! The Hardy-Littlewood maximal operator `M` and its centered variant `M^mod`
//! on radial functions.
//!
//! For `|x|_p = p^v` a ball `B_g(x)` with `g >= v` is the centered ball `B_g`,
//! and one with `g < v` sits inside the sphere `S_v`, where `|f|` is constant.
//! So with `avg(g)` the centered average of `|f|` over `B_g`,
//!
//! `M^mod f(v) = sup_{g >= v} avg(g)` and `M f(v) = max(|f(v)|, M^mod f(v))`.
//!
//! Averages are computed on an explicit shell range and continued in closed
//! form when a tail of `f` is zero or a single power.

use super::{Divergence, RadialOutput};
use crate::error::{Error, Result};
use crate::padic::Prime;
use crate::radial::measure::shell_masses;
use crate::radial::power::power_sum;
use crate::radial::{RadialFunction, RadialTerm, ShellRange, EXP_EPS};

/// Shells beyond the data's breakpoints evaluated when a tail has no closed form.
const OPEN_TAIL_MARGIN: i64 = 64;
/// Largest `|n g ln p|` reached by an explicit scan.
const SCAN_LOG_CAP: f64 = 600.0;

#[derive(Debug, Clone, Copy)]
enum Tail {
    Zero,
    Power { c: f64, beta: f64 },
    Other,
}

fn tail_kind(f: &RadialFunction, seg: ShellRange) -> Tail {
    match f.active_terms(&seg).as_slice() {
        [] => Tail::Zero,
        [t] if t.logpow == 0 => Tail::Power { c: t.coeff.abs(), beta: t.exponent },
        _ => Tail::Other,
    }
}

struct Setup {
    p: Prime,
    n: f64,
    ln_p: f64,
    /// `1 - p^-n`
    sphere: f64,
}

impl Setup {
    fn pow(&self, e: f64) -> f64 {
        self.p.powf(e)
    }

    fn term(&self, c: f64, e: f64, logpow: u32, range: ShellRange) -> Option<RadialTerm> {
        (c != 0.0 && !range.is_empty()).then(|| RadialTerm::new(c, e, logpow, range))
    }
}

/// `M f` and `M^mod f` on shells of dimension `n`, explicit at least on `window`.
pub fn maximal_pair(f: &RadialFunction, n: u32, window: ShellRange) -> Result<(RadialOutput, RadialOutput)> {
    let p = f.prime();
    if f.is_zero() {
        let z = RadialOutput::exact(RadialFunction::zero(p));
        return Ok((z.clone(), z));
    }
    let (Some(wlo), Some(whi)) = (window.lo, window.hi) else {
        return Err(Error::InvalidParameter("window must be finite".into()));
    };
    let s = Setup { p, n: n as f64, ln_p: p.as_f64().ln(), sphere: 1.0 - p.as_f64().powi(-(n as i32)) };
    let cuts = f.cut_points();
    let lo0 = cuts.first().map_or(wlo, |&c| wlo.min(c - 2));
    let hi0 = cuts.last().map_or(whi, |&c| whi.max(c + 2));
    let scan_cap = (SCAN_LOG_CAP / (s.n * s.ln_p)) as i64;

    let leb = shell_masses(&RadialFunction::constant(p, 1.0), n);
    let lower = tail_kind(f, ShellRange::at_most(lo0));
    let upper = tail_kind(f, ShellRange::at_least(hi0));
    let lx = match lower {
        Tail::Other => lo0 - OPEN_TAIL_MARGIN,
        _ => lo0,
    };
    let mut mass = match lower {
        Tail::Zero => 0.0,
        Tail::Power { c, beta } if beta > -s.n => lower_factor(&s, beta) * c * s.pow((beta + s.n) * lx as f64),
        _ => power_sum(f, 1.0, &leb, ShellRange::at_most(lx))?
            .finite()
            .ok_or_else(|| Error::NotLocallyIntegrable("|f| is not integrable near the origin".into()))?,
    };
    let ball = |g: i64| p.as_f64().powi((n as i64 * g) as i32);
    let mut avg = Vec::new();
    let absf = |g: i64| f.value(g).abs();
    for g in lx..=hi0 {
        if g > lx {
            mass += absf(g) * s.sphere * ball(g);
        }
        avg.push(mass / ball(g));
    }
    let mass_hi0 = mass;

    // Upper tail: closed form h(g) of avg(g) for g >= hi0, the last explicit
    // shell ux, and the supremum of avg beyond it.
    let mut ux = hi0;
    let mut upper_terms: Vec<RadialTerm> = Vec::new();
    let mut beyond = 0.0;
    let mut upper_exact = true;
    match upper {
        Tail::Zero => {
            let t = s.term(mass_hi0, -s.n, 0, ShellRange::at_least(ux + 1));
            beyond = mass_hi0 * s.pow(-s.n * (ux + 1) as f64);
            upper_terms.extend(t);
        }
        Tail::Power { beta, .. } if beta > EXP_EPS => {
            let d = RadialOutput::everywhere(p);
            return Ok((d.clone(), d));
        }
        Tail::Power { c, beta } => {
            let h = upper_closed_form(&s, c, beta, hi0, mass_hi0);
            let increasing = beta.abs() <= EXP_EPS && mass_hi0 - c * ball(hi0) < 0.0;
            if increasing {
                // avg rises to c without reaching it
                upper_terms.extend(s.term(c, 0.0, 0, ShellRange::at_least(ux + 1)));
                beyond = c;
            } else {
                let settled = |g: i64| h.value(g + 1) <= h.value(g) && h.value(g) >= c * s.pow(beta * g as f64);
                while !settled(ux) && ux - hi0 < scan_cap && (ux as f64) * s.n * s.ln_p < SCAN_LOG_CAP {
                    ux += 1;
                    avg.push(h.value(ux));
                }
                if settled(ux) {
                    upper_terms.extend(h.restrict(ShellRange::at_least(ux + 1)).terms().iter().cloned());
                    beyond = h.value(ux + 1);
                } else {
                    upper_exact = false;
                }
            }
        }
        Tail::Other => {
            for _ in 0..OPEN_TAIL_MARGIN {
                ux += 1;
                mass += absf(ux) * s.sphere * ball(ux);
                avg.push(mass / ball(ux));
            }
            upper_exact = false;
        }
    }

    // suffix maxima over the explicit shells
    let len = avg.len();
    let mut modv = vec![0.0; len];
    let mut run = beyond;
    for i in (0..len).rev() {
        run = run.max(avg[i]);
        modv[i] = run;
    }
    let s_lx = modv[0];

    let mut m_terms: Vec<RadialTerm> = Vec::new();
    let mut mod_terms: Vec<RadialTerm> = Vec::new();
    for (i, &v) in modv.iter().enumerate() {
        let g = lx + i as i64;
        let range = ShellRange::single(g);
        mod_terms.extend(s.term(v, 0.0, 0, range));
        m_terms.extend(s.term(v.max(absf(g)), 0.0, 0, range));
    }
    m_terms.extend(upper_terms.iter().cloned());
    mod_terms.extend(upper_terms);

    let mut lower_exact = true;
    let below = ShellRange::at_most(lx - 1);
    match lower {
        Tail::Zero => {
            m_terms.extend(s.term(s_lx, 0.0, 0, below));
            mod_terms.extend(s.term(s_lx, 0.0, 0, below));
        }
        Tail::Power { c, beta } => {
            let a = lower_factor(&s, beta) * c;
            if beta < -EXP_EPS {
                // avg = a p^{beta g} decreases in g and dominates |f|
                let t = ((s_lx / a).ln() / (beta * s.ln_p)).floor() as i64 + 1;
                let cut = t.min(lx);
                for terms in [&mut m_terms, &mut mod_terms] {
                    terms.extend(s.term(a, beta, 0, ShellRange::at_most(cut - 1)));
                    terms.extend(s.term(s_lx, 0.0, 0, ShellRange::finite(cut, lx - 1)));
                }
            } else {
                mod_terms.extend(s.term(s_lx, 0.0, 0, below));
                if beta > EXP_EPS {
                    let t = ((s_lx / c).ln() / (beta * s.ln_p)).floor() as i64;
                    let cut = t.min(lx - 1);
                    m_terms.extend(s.term(s_lx, 0.0, 0, ShellRange::at_most(cut)));
                    m_terms.extend(s.term(c, beta, 0, ShellRange::finite(cut + 1, lx - 1)));
                } else {
                    m_terms.extend(s.term(s_lx, 0.0, 0, below));
                }
            }
        }
        Tail::Other => lower_exact = false,
    }

    let valid = ShellRange::new((!lower_exact).then_some(lx), (!upper_exact).then_some(ux));
    let exact = lower_exact && upper_exact;
    let wrap = |terms: Vec<RadialTerm>| RadialOutput {
        function: RadialFunction::new(s.p, terms),
        valid,
        divergence: Divergence::None,
        exact,
    };
    Ok((wrap(m_terms), wrap(mod_terms)))
}

/// `(1 - p^-n) / (1 - p^-(beta + n))`: the average over `B_g` of `p^{beta j}`
/// divided by `p^{beta g}`.
fn lower_factor(s: &Setup, beta: f64) -> f64 {
    if beta.abs() <= EXP_EPS {
        1.0
    } else {
        s.sphere / -(-(beta + s.n) * s.ln_p).exp_m1()
    }
}

/// `avg(g)` for `g >= g0` when `|f| = c p^{beta g}` there and `mass` is the
/// integral of `|f|` over `B_{g0}`.
fn upper_closed_form(s: &Setup, c: f64, beta: f64, g0: i64, mass: f64) -> RadialFunction {
    let all = ShellRange::ALL;
    if (beta + s.n).abs() <= EXP_EPS {
        // mass grows by c (1 - p^-n) per shell
        let slope = c * s.sphere;
        return RadialFunction::new(
            s.p,
            vec![RadialTerm::new(slope, -s.n, 1, all), RadialTerm::new(mass - slope * g0 as f64, -s.n, 0, all)],
        );
    }
    let a = lower_factor(&s, beta) * c;
    let e = mass - a * s.pow((beta + s.n) * g0 as f64);
    RadialFunction::new(s.p, vec![RadialTerm::new(a, beta, 0, all), RadialTerm::new(e, -s.n, 0, all)])
}

/// Default explicit window for the maximal operators.
pub fn default_window() -> ShellRange {
    ShellRange::finite(-64, 64)
}

/// `M f` for radial `f` on `Q_p^n`.
pub fn maximal(f: &RadialFunction, n: u32) -> Result<RadialOutput> {
    Ok(maximal_pair(f, n, default_window())?.0)
}

/// `M^mod f` for radial `f` on `Q_p^n`.
pub fn maximal_mod(f: &RadialFunction, n: u32) -> Result<RadialOutput> {
    Ok(maximal_pair(f, n, default_window())?.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(f: &RadialFunction, n: u32, v: i64, centered_only: bool) -> f64 {
        let p = f.prime().as_f64();
        let nn = n as f64;
        let mut best: f64 = if centered_only { 0.0 } else { f.value(v).abs() };
        for g in v..=400 {
            let mut mass = 0.0;
            for j in g - 800..=g {
                mass += f.value(j).abs() * (1.0 - p.powf(-nn)) * p.powf(nn * j as f64);
            }
            best = best.max(mass / p.powf(nn * g as f64));
        }
        best
    }

    #[test]
    fn ball_indicator() {
        let p = Prime::new(2).unwrap();
        let chi = RadialFunction::ball_indicator(p, 0);
        let (m, mm) = maximal_pair(&chi, 1, default_window()).unwrap();
        assert!(m.exact && mm.exact);
        for v in -100..100 {
            let expect = if v <= 0 { 1.0 } else { 2f64.powi(-v as i32) };
            assert_eq!(m.function.value(v), expect, "{v}");
            assert_eq!(mm.function.value(v), expect, "{v}");
        }
    }

    #[test]
    fn constants_are_fixed() {
        let p = Prime::new(3).unwrap();
        let c = RadialFunction::constant(p, 2.5);
        let (m, mm) = maximal_pair(&c, 2, default_window()).unwrap();
        for v in [-500, -3, 0, 7, 500] {
            assert!((m.function.value(v) - 2.5).abs() < 1e-14);
            assert!((mm.function.value(v) - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn power_tails_match_brute_force() {
        let p = Prime::new(2).unwrap();
        let cases = [
            RadialFunction::power_on(p, -0.5, ShellRange::at_least(-3)),
            RadialFunction::power_on(p, 0.5, ShellRange::at_most(2)).add(&RadialFunction::power_on(
                p,
                -1.0,
                ShellRange::at_least(3),
            )),
            RadialFunction::power(p, -0.3).add(&RadialFunction::indicator(p, ShellRange::finite(-2, 4)).scale(&3.0)),
            RadialFunction::power_on(p, -2.0, ShellRange::at_least(1)),
        ];
        for f in &cases {
            let (m, mm) = maximal_pair(f, 1, default_window()).unwrap();
            assert!(m.exact, "{f:?}");
            for v in (-90..=90).step_by(7) {
                let (bm, bmm) = (brute(f, 1, v, false), brute(f, 1, v, true));
                assert!((m.function.value(v) - bm).abs() <= 1e-9 * bm, "{v}: {} {bm}", m.function.value(v));
                assert!((mm.function.value(v) - bmm).abs() <= 1e-9 * bmm, "{v}");
            }
        }
    }

    #[test]
    fn growing_tail_diverges() {
        let p = Prime::new(5).unwrap();
        let (m, _) = maximal_pair(&RadialFunction::power(p, 0.2), 1, default_window()).unwrap();
        assert_eq!(m.divergence, Divergence::Everywhere);
    }
}
