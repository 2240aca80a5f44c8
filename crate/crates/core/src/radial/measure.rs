//! Haar measure of balls and spheres, and integrals of radial functions.

use super::series::{shell_sum, SeriesSum};
use super::{RadialFunction, RadialTerm, ShellRange, ShellScalar};
use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::padic::Prime;

/// `|B_g| = p^(n g)`.
pub fn ball_measure(p: Prime, n: u32, g: i64) -> f64 {
    p.as_f64().powf(n as f64 * g as f64)
}

/// `|S_g| = p^(n g) (1 - p^-n)`.
pub fn sphere_measure(p: Prime, n: u32, g: i64) -> f64 {
    ball_measure(p, n, g) * (1.0 - p.as_f64().powi(-(n as i32)))
}

/// `f(g) * |S_g|` as a radial function of `g`.
pub fn shell_masses<S: ShellScalar>(f: &RadialFunction<S>, n: u32) -> RadialFunction<S> {
    let p = f.prime();
    let factor = S::one_minus_pow_p(p, S::exp_from_int(-(n as i64)));
    let terms = f
        .terms()
        .iter()
        .map(|t| RadialTerm {
            coeff: t.coeff.times(&factor),
            exponent: S::exp_add(t.exponent, S::exp_from_int(n as i64)),
            logpow: t.logpow,
            range: t.range,
        })
        .collect();
    RadialFunction::new(p, terms)
}

/// `int_{Q_p^n} f(x) dx` for radial `f`.
pub fn integrate_radial<S: ShellScalar>(f: &RadialFunction<S>, n: u32) -> Result<SeriesSum<S>> {
    shell_sum(&shell_masses(f, n))
}

/// Float integral with divergence reported as `Infinite`.
pub fn integral(f: &RadialFunction, n: u32) -> Result<ExtendedValue> {
    Ok(integrate_radial(f, n)?.to_extended())
}

/// `int_{B_g} f(x) dx`.
pub fn ball_integral<S: ShellScalar>(f: &RadialFunction<S>, n: u32, g: i64) -> Result<SeriesSum<S>> {
    integrate_radial(&f.restrict(ShellRange::at_most(g)), n)
}

/// `|B_g|^-1 int_{B_g} f(x) dx`.
pub fn ball_average<S: ShellScalar>(f: &RadialFunction<S>, n: u32, g: i64) -> Result<S> {
    match ball_integral(f, n, g)? {
        SeriesSum::Finite(v) => {
            let vol = S::pow_p(f.prime(), S::exp_from_int(n as i64), g);
            Ok(v.over(&vol))
        }
        SeriesSum::PosInfinite => Err(Error::NotLocallyIntegrable(format!("ball average over B_{g} diverges"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn unit_ball_has_measure_one() {
        let p = Prime::new(5).unwrap();
        let chi: RadialFunction<BigRational> = RadialFunction::ball_indicator(p, 0);
        for n in 1..4 {
            let v = integrate_radial(&chi, n).unwrap().finite().unwrap();
            assert_eq!(v, BigRational::from_integer(1.into()));
        }
    }

    #[test]
    fn average_of_log() {
        // mean of log_p|x| over B_g is g - 1/(p^n - 1)
        let p = Prime::new(3).unwrap();
        let log: RadialFunction<BigRational> = RadialFunction::log(p);
        for n in 1..3u32 {
            for g in -2..3 {
                let avg = ball_average(&log, n, g).unwrap();
                let expect = BigRational::from_integer(g.into()) - BigRational::new(1.into(), (3i64.pow(n) - 1).into());
                assert_eq!(avg, expect);
            }
        }
    }

    #[test]
    fn power_integrability() {
        let p = Prime::new(2).unwrap();
        let near0: RadialFunction = RadialFunction::power_on(p, -0.5, ShellRange::at_most(0));
        assert!(integral(&near0, 1).unwrap().is_finite());
        let bad: RadialFunction = RadialFunction::power_on(p, -1.0, ShellRange::at_most(0));
        assert!(integral(&bad, 1).unwrap().is_divergent());
    }
}
