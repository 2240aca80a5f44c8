//! Radial weights and the weighted function spaces built on them.

pub mod muckenhoupt;
pub mod norms;

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::padic::Prime;
use crate::radial::measure::{ball_integral, shell_masses};
use crate::radial::power::{dominant_term, End};
use crate::radial::series::SeriesSum;
use crate::radial::{segments_from_cuts, RadialFunction};

/// Shells inspected on each side of the breakpoints when positivity is checked.
const POSITIVITY_MARGIN: i64 = 64;

/// A positive, locally integrable radial weight on `Q_p^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    profile: RadialFunction,
    power_tag: Option<f64>,
    dim: u32,
}

impl Weight {
    /// `|x|_p^alpha`; requires `alpha > -n`.
    pub fn power(p: Prime, n: u32, alpha: f64) -> Result<Self> {
        if !(alpha > -(n as f64)) {
            return Err(Error::NotLocallyIntegrable(format!("|x|^{alpha} needs alpha > -{n}")));
        }
        Ok(Weight { profile: RadialFunction::power(p, alpha), power_tag: Some(alpha), dim: n })
    }

    pub fn unweighted(p: Prime, n: u32) -> Self {
        Weight { profile: RadialFunction::constant(p, 1.0), power_tag: Some(0.0), dim: n }
    }

    /// A general radial weight, checked for positivity and local integrability.
    pub fn from_profile(profile: RadialFunction, n: u32) -> Result<Self> {
        check_positive(&profile)?;
        let w = Weight { profile, power_tag: None, dim: n };
        match ball_integral(&w.profile, n, 0)? {
            SeriesSum::Finite(_) => Ok(w),
            SeriesSum::PosInfinite => Err(Error::NotLocallyIntegrable("weight mass of B_0 diverges".into())),
        }
    }

    pub fn prime(&self) -> Prime {
        self.profile.prime()
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn profile(&self) -> &RadialFunction {
        &self.profile
    }

    pub fn power_tag(&self) -> Option<f64> {
        self.power_tag
    }

    /// The weight on shell `g`.
    pub fn value(&self, g: i64) -> f64 {
        self.profile.value(g)
    }

    /// `g -> w(S_g)`.
    pub fn shell_masses(&self) -> RadialFunction {
        shell_masses(&self.profile, self.dim)
    }

    /// `w(B_g)`.
    pub fn ball_mass(&self, g: i64) -> ExtendedValue {
        if let Some(alpha) = self.power_tag {
            let p = self.prime().as_f64();
            let n = self.dim as f64;
            let s = alpha + n;
            // p^{g s} (1 - p^-n) / (1 - p^-s)
            let v = p.powf(g as f64 * s) * (-(-n * p.ln()).exp_m1()) / (-(-s * p.ln()).exp_m1());
            return ExtendedValue::Finite(v);
        }
        match ball_integral(&self.profile, self.dim, g) {
            Ok(s) => s.to_extended(),
            Err(_) => ExtendedValue::Infinite,
        }
    }

    /// `w(B_g)` by summing shell masses over `[g - depth, g]`, without tails.
    pub fn ball_mass_truncated(&self, g: i64, depth: i64) -> f64 {
        let masses = self.shell_masses();
        (g - depth..=g).map(|j| masses.value(j)).sum()
    }
}

/// Positivity of a radial profile on every shell.
///
/// Finite segments are checked shell by shell (up to a cap, then at their
/// ends and margin), infinite segments on `POSITIVITY_MARGIN` shells from the
/// edge and through the sign of the dominant term.
pub(crate) fn check_positive(f: &RadialFunction) -> Result<()> {
    let bad = |g: i64| Err(Error::NonPositiveWeight(format!("value {} on shell {g}", f.value(g))));
    for seg in segments_from_cuts(&f.cut_points()) {
        let probe: Vec<i64> = match (seg.lo, seg.hi) {
            (Some(a), Some(b)) if b - a <= 4 * POSITIVITY_MARGIN => (a..=b).collect(),
            (Some(a), Some(b)) => (a..a + POSITIVITY_MARGIN).chain(b - POSITIVITY_MARGIN..=b).collect(),
            (Some(a), None) => (a..a + POSITIVITY_MARGIN).collect(),
            (None, Some(b)) => (b - POSITIVITY_MARGIN..=b).collect(),
            (None, None) => (-POSITIVITY_MARGIN..=POSITIVITY_MARGIN).collect(),
        };
        for g in probe {
            if !(f.value(g) > 0.0) {
                return bad(g);
            }
        }
        for (end, open) in [(End::Upper, seg.hi.is_none()), (End::Lower, seg.lo.is_none())] {
            if !open {
                continue;
            }
            let restricted = f.restrict(seg);
            let Some(t) = dominant_term(&restricted, end) else {
                return Err(Error::NonPositiveWeight("weight vanishes on a tail".into()));
            };
            let sign = if end == End::Lower && t.logpow % 2 == 1 { -t.coeff } else { t.coeff };
            if sign.partial_cmp(&0.0) != Some(Ordering::Greater) {
                return Err(Error::NonPositiveWeight(format!("negative tail towards {end:?}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::ShellRange;

    #[test]
    fn power_mass_closed_form_matches_series() {
        let p = Prime::new(3).unwrap();
        for (n, alpha) in [(1u32, -0.5), (2, 1.5), (3, -2.9)] {
            let w = Weight::power(p, n, alpha).unwrap();
            let general = Weight::from_profile(RadialFunction::power(p, alpha), n).unwrap();
            for g in -4..=4 {
                let a = w.ball_mass(g).to_f64();
                let b = general.ball_mass(g).to_f64();
                assert!((a - b).abs() <= 1e-12 * a, "{n} {alpha} {g}");
            }
        }
    }

    #[test]
    fn rejects_bad_weights() {
        let p = Prime::new(2).unwrap();
        assert!(Weight::power(p, 1, -1.0).is_err());
        let neg: RadialFunction = RadialFunction::log(p);
        assert!(Weight::from_profile(neg, 1).is_err());
        let gap: RadialFunction = RadialFunction::indicator(p, ShellRange::at_most(3));
        assert!(Weight::from_profile(gap, 1).is_err());
    }

    #[test]
    fn unit_weight_mass() {
        let p = Prime::new(5).unwrap();
        for n in 1..4 {
            assert!((Weight::unweighted(p, n).ball_mass(0).to_f64() - 1.0).abs() < 1e-15);
        }
    }
}
