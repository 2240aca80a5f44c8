//! Uniform sampling on p-adic spheres and balls, and Monte Carlo integrals.
//!
//! A point is drawn through its first `DIGITS` p-adic digits per coordinate.
//! On a sphere the leading digit vector is redrawn until it is nonzero, which
//! is exactly the uniform distribution on `S_g` truncated to that precision.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::measure::{ball_measure, sphere_measure};
use super::ShellRange;
use crate::error::{Error, Result};
use crate::padic::{PAdicVector, Prime};

/// Digits drawn per coordinate.
pub const DIGITS: usize = 32;

/// The generator used for shell `g` under a user seed.
pub fn shell_rng(seed: u64, g: i64) -> ChaCha8Rng {
    // splitmix64 of the pair keeps streams for nearby shells unrelated
    let mut z = seed ^ (g as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

fn digits_to_rational(p: Prime, digits: &[u64], g: i64) -> BigRational {
    let pb = p.as_bigint();
    let mut int = BigInt::from(0);
    for d in digits.iter().rev() {
        int = int * &pb + BigInt::from(*d);
    }
    BigRational::from_integer(int) * p.pow_rational(-g)
}

/// A uniform point of the sphere `|x|_p = p^g` in `Q_p^n`.
pub fn sample_sphere<R: Rng>(p: Prime, n: usize, g: i64, rng: &mut R) -> PAdicVector {
    let pv = p.get();
    let mut lead = vec![0u64; n];
    loop {
        for d in lead.iter_mut() {
            *d = rng.random_range(0..pv);
        }
        if lead.iter().any(|d| *d != 0) {
            break;
        }
    }
    let comps = lead
        .iter()
        .map(|&d0| {
            let mut digits = Vec::with_capacity(DIGITS);
            digits.push(d0);
            digits.extend((1..DIGITS).map(|_| rng.random_range(0..pv)));
            digits_to_rational(p, &digits, g)
        })
        .collect();
    PAdicVector::new(comps, p).expect("nonempty coordinate list")
}

/// A uniform point of the ball `|x|_p <= p^g`.
pub fn sample_ball<R: Rng>(p: Prime, n: usize, g: i64, rng: &mut R) -> PAdicVector {
    let pv = p.get();
    let comps = (0..n)
        .map(|_| {
            let digits: Vec<u64> = (0..DIGITS).map(|_| rng.random_range(0..pv)).collect();
            digits_to_rational(p, &digits, g)
        })
        .collect();
    PAdicVector::new(comps, p).expect("nonempty coordinate list")
}

/// How sample points are spread over a range of shells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McStrategy {
    /// Equal sample counts per shell, each shell weighted by its measure.
    Stratified,
    /// Uniform points in the smallest ball containing the range.
    UniformBall,
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let v = if xs.len() > 1 { xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64 } else { 0.0 };
    (m, v)
}

/// `int f(x) dx` over the shells of `range` (finite), by sampling.
pub fn integrate_mc<F>(
    p: Prime,
    n: usize,
    range: ShellRange,
    samples: usize,
    seed: u64,
    strategy: McStrategy,
    f: F,
) -> Result<McEstimate>
where
    F: Fn(&PAdicVector) -> f64,
{
    let (Some(lo), Some(hi)) = (range.lo, range.hi) else {
        return Err(Error::InvalidParameter("Monte Carlo needs a finite shell range".into()));
    };
    if lo > hi {
        return Err(Error::EmptyRange);
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("zero samples".into()));
    }
    match strategy {
        McStrategy::Stratified => {
            let strata = (hi - lo + 1) as usize;
            let per = (samples / strata).max(2);
            let mut value = 0.0;
            let mut var = 0.0;
            for g in lo..=hi {
                let mut rng = shell_rng(seed, g);
                let xs: Vec<f64> = (0..per).map(|_| f(&sample_sphere(p, n, g, &mut rng))).collect();
                let (m, v) = mean_var(&xs);
                let mass = sphere_measure(p, n as u32, g);
                value += mass * m;
                var += mass * mass * v / per as f64;
            }
            Ok(McEstimate { value, std_error: var.sqrt(), samples: per * strata })
        }
        McStrategy::UniformBall => {
            let mut rng = shell_rng(seed, i64::MIN);
            let xs: Vec<f64> = (0..samples)
                .map(|_| {
                    let x = sample_ball(p, n, hi, &mut rng);
                    match x.shell() {
                        Some(g) if g >= lo => f(&x),
                        _ => 0.0,
                    }
                })
                .collect();
            let (m, v) = mean_var(&xs);
            let vol = ball_measure(p, n as u32, hi);
            Ok(McEstimate { value: vol * m, std_error: vol * (v / samples as f64).sqrt(), samples })
        }
    }
}
