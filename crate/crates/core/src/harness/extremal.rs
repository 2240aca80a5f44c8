//! Near-extremal inputs for the sharp constants.

use crate::error::{Error, Result};
use crate::radial::{RadialFunction, ShellRange};

use super::constants::resolve;
use super::{ConstantId, Scenario};

/// Inputs `f_i` and, for commutators, symbols `b_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremal {
    pub fs: Vec<RadialFunction>,
    pub bs: Vec<RadialFunction>,
}

/// The extremal family of `id` at index `r`.
///
/// `C1`: `|x|^{-(n+alpha_i)/q_i - p^-r}` on `|x| > p^{-nu-1}`.
/// `C3`, `C8`, `C9`: `|x|^{(alpha_i+n) lambda_i}` for every `r`, with
/// `b_i = log_p |x|` for the commutators.
pub fn extremal_family(id: ConstantId, s: &Scenario, r: u32) -> Result<Extremal> {
    let res = resolve(id, s)?;
    let p = s.prime;
    let n = s.dim as f64;
    let pr = &s.params;
    match id {
        ConstantId::C1 => {
            let eps = p.powf(-(r as f64));
            let support = ShellRange::at_least(-(res.nu as i64));
            let fs = pr
                .q_i
                .iter()
                .zip(&pr.alpha_i)
                .map(|(q, a)| RadialFunction::power_on(p, -(n + a) / q - eps, support))
                .collect();
            Ok(Extremal { fs, bs: Vec::new() })
        }
        ConstantId::C3 | ConstantId::C8 | ConstantId::C9 => {
            let fs = pr.alpha_i.iter().zip(&pr.lambda_i).map(|(a, l)| RadialFunction::power(p, (a + n) * l)).collect();
            let bs = if id == ConstantId::C3 { Vec::new() } else { vec![RadialFunction::log(p); res.m] };
            Ok(Extremal { fs, bs })
        }
        _ => Err(Error::Unsupported(format!("{id} has no extremal family"))),
    }
}
