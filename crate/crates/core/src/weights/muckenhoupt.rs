//! Muckenhoupt `A_l` and reverse Hölder constants of radial weights.
//!
//! For a radial weight only centered balls matter: a ball `B` whose radius is
//! below `|c|_p` for its center `c` lies in the sphere of radius `|c|_p`, the
//! weight is constant on it and every quantity below equals 1 there.

use serde::Serialize;

use super::Weight;
use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::padic::Prime;
use crate::radial::measure::{ball_measure, shell_masses};
use crate::radial::power::power_sum;
use crate::radial::{RadialFunction, ShellRange};

/// Upper end of the critical index search.
pub const CRITICAL_INDEX_CAP: f64 = 64.0;

fn lebesgue_masses(p: Prime, n: u32) -> RadialFunction {
    shell_masses(&RadialFunction::constant(p, 1.0), n)
}

fn window_shells(window: ShellRange) -> Result<std::ops::RangeInclusive<i64>> {
    match (window.lo, window.hi) {
        (Some(a), Some(b)) if a <= b => Ok(a..=b),
        _ => Err(Error::InvalidParameter("window must be a nonempty finite range".into())),
    }
}

/// The profile of `w` moved from `B_g` to `B_0` and scaled to 1 on `S_0`.
/// Both quantities below are invariant under dilations and `w -> w / c`, and
/// working at `B_0` keeps large powers of `w` in range.
fn normalized(w: &Weight, g: i64) -> RadialFunction {
    let f = w.profile().dilate(g);
    let c = f.value(0);
    if c > 0.0 && c.is_finite() {
        f.scale(&(1.0 / c))
    } else {
        f
    }
}

/// `|B_0|^{-1} int_{B_0} f^s`.
fn power_average(w: &Weight, f: &RadialFunction, s: f64) -> Result<ExtendedValue> {
    let leb = lebesgue_masses(w.prime(), w.dim());
    let total = power_sum(f, s, &leb, ShellRange::at_most(0))?;
    let vol = ball_measure(w.prime(), w.dim(), 0);
    Ok(total.map(|v| v / vol))
}

fn average(w: &Weight, g: i64) -> ExtendedValue {
    w.ball_mass(g).map(|m| m / ball_measure(w.prime(), w.dim(), g))
}

/// The `A_l` quantity of the centered ball `B_g`.
pub fn ap_at(w: &Weight, l: f64, g: i64) -> Result<ExtendedValue> {
    let f = normalized(w, g);
    let dual = power_average(w, &f, -1.0 / (l - 1.0))?;
    Ok(power_average(w, &f, 1.0)?.mul(dual.map(|v| v.powf(l - 1.0))))
}

/// `sup_g (avg_{B_g} w)(avg_{B_g} w^{-1/(l-1)})^{l-1}` over the window.
pub fn ap_constant(w: &Weight, l: f64, window: ShellRange) -> Result<ExtendedValue> {
    if !(l > 1.0) || !l.is_finite() {
        return Err(Error::InvalidParameter(format!("A_l needs l > 1, got {l}")));
    }
    let mut sup = ExtendedValue::ZERO;
    for g in window_shells(window)? {
        sup = sup.max(ap_at(w, l, g)?);
        if sup.is_divergent() {
            break;
        }
    }
    Ok(sup)
}

/// `ap_constant` for `|x|^alpha`, which is `+inf` when the weight is not
/// locally integrable (`alpha <= -n`).
pub fn ap_constant_power(p: Prime, n: u32, alpha: f64, l: f64, window: ShellRange) -> Result<ExtendedValue> {
    if !(alpha > -(n as f64)) {
        window_shells(window)?;
        return Ok(ExtendedValue::Infinite);
    }
    ap_constant(&Weight::power(p, n, alpha)?, l, window)
}

/// Shells below the data's breakpoints scanned for the infimum.
const ESSINF_MARGIN: i64 = 64;

/// `sup_g (avg_{B_g} w) / essinf_{B_g} w`.
pub fn a1_constant(w: &Weight, window: ShellRange) -> Result<ExtendedValue> {
    let shells = window_shells(window)?;
    let prof = w.profile();
    let floor = prof.cut_points().into_iter().min().unwrap_or(0).min(*shells.start()) - ESSINF_MARGIN;
    let tail = match crate::radial::power::growth_of(prof, crate::radial::power::End::Lower) {
        Some(gr) if gr.trend() == std::cmp::Ordering::Less => 0.0,
        _ => f64::INFINITY,
    };
    let mut inf = (floor..*shells.start()).map(|j| prof.value(j)).fold(tail, f64::min);
    let mut sup = ExtendedValue::ZERO;
    for g in shells {
        inf = inf.min(prof.value(g));
        if inf <= 0.0 {
            return Ok(ExtendedValue::Infinite);
        }
        sup = sup.max(average(w, g).map(|a| a / inf));
    }
    Ok(sup)
}

/// `ap_constant`'s `l = 1` counterpart for `|x|^alpha`.
pub fn a1_constant_power(p: Prime, n: u32, alpha: f64, window: ShellRange) -> Result<ExtendedValue> {
    if !(alpha > -(n as f64)) {
        window_shells(window)?;
        return Ok(ExtendedValue::Infinite);
    }
    a1_constant(&Weight::power(p, n, alpha)?, window)
}

/// The reverse Hölder quantity of order `r` on `B_g`.
pub fn rh_at(w: &Weight, r: f64, g: i64) -> Result<ExtendedValue> {
    let f = normalized(w, g);
    let top = power_average(w, &f, r)?;
    let ExtendedValue::Finite(base) = power_average(w, &f, 1.0)? else {
        return Ok(ExtendedValue::Infinite);
    };
    Ok(top.map(|v| v.powf(1.0 / r) / base))
}

/// `sup_g (avg_{B_g} w^r)^{1/r} / avg_{B_g} w` over the window.
pub fn rh_constant(w: &Weight, r: f64, window: ShellRange) -> Result<ExtendedValue> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("reverse Hölder order must exceed 1, got {r}")));
    }
    let mut sup = ExtendedValue::ZERO;
    for g in window_shells(window)? {
        sup = sup.max(rh_at(w, r, g)?);
        if sup.is_divergent() {
            break;
        }
    }
    Ok(sup)
}

/// Supremum of the orders `r` with a finite reverse Hölder constant on the
/// window, by bisection to `tol`. Returns `+inf` when the constant is still
/// finite at `CRITICAL_INDEX_CAP`.
pub fn critical_index_estimate(w: &Weight, window: ShellRange, tol: f64) -> Result<f64> {
    let finite = |r: f64| rh_constant(w, r, window).map(|v| v.is_finite());
    if finite(CRITICAL_INDEX_CAP)? {
        return Ok(f64::INFINITY);
    }
    let (mut lo, mut hi) = (1.0, CRITICAL_INDEX_CAP);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if finite(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fitted constants for the weight comparison and averaging inequalities on
/// nested centered balls `B_{g-k} ⊂ B_g`.
#[derive(Debug, Clone, Serialize)]
pub struct PropositionReport {
    pub l: f64,
    pub r: f64,
    /// `A_l` finite implies `A_q` finite (and no larger) for the probed `q > l`.
    pub inclusion_holds: bool,
    /// Largest probed `eps` with `w` in `A_{l - eps}`.
    pub openness_eps: Option<f64>,
    /// Largest `c1` with `c1 (|E|/|B|)^l <= w(E)/w(B)`.
    pub c1: f64,
    /// Smallest `c2` with `w(E)/w(B) <= c2 (|E|/|B|)^{(r-1)/r}`.
    pub c2: f64,
    /// Smallest `c` with `avg_B χ_E <= c (w(B)^{-1} int_B χ_E w)^{1/l}`.
    pub averaging: f64,
}

impl PropositionReport {
    /// Whether every fitted constant is finite and positive.
    pub fn holds(&self) -> bool {
        self.inclusion_holds
            && self.c1 > 0.0
            && self.c1.is_finite()
            && self.c2.is_finite()
            && self.averaging.is_finite()
    }
}

/// Checks the structural `A_l` / `RH_r` properties of `w` on the window, with
/// `E = B_{g-k}` for each `k` in `depths`.
pub fn proposition_checks(w: &Weight, l: f64, r: f64, depths: &[i64], window: ShellRange) -> Result<PropositionReport> {
    let base = ap_constant(w, l, window)?;
    let mut inclusion_holds = true;
    if let ExtendedValue::Finite(a) = base {
        for q in [l + 0.5, l + 1.0, 2.0 * l] {
            match ap_constant(w, q, window)? {
                ExtendedValue::Finite(b) if b <= a * (1.0 + 1e-10) => {}
                _ => inclusion_holds = false,
            }
        }
    }
    let mut openness_eps = None;
    if base.is_finite() {
        let mut eps = 0.5 * (l - 1.0);
        for _ in 0..12 {
            if ap_constant(w, l - eps, window)?.is_finite() {
                openness_eps = Some(eps);
                break;
            }
            eps *= 0.5;
        }
    }
    let pn = (w.prime().as_f64()).powi(w.dim() as i32);
    let (mut c1, mut c2, mut averaging) = (f64::INFINITY, 0.0f64, 0.0f64);
    for g in window_shells(window)? {
        let ExtendedValue::Finite(outer) = w.ball_mass(g) else { continue };
        for &k in depths {
            if k <= 0 {
                return Err(Error::InvalidParameter(format!("depth {k} must be positive")));
            }
            let inner = w.ball_mass(g - k).to_f64();
            let ratio = inner / outer;
            let meas = pn.powi(-(k as i32));
            c1 = c1.min(ratio / meas.powf(l));
            c2 = c2.max(ratio / meas.powf((r - 1.0) / r));
            averaging = averaging.max(meas / ratio.powf(1.0 / l));
        }
    }
    Ok(PropositionReport { l, r, inclusion_holds, openness_eps, c1, c2, averaging })
}
