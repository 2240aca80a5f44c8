//! Both sides of the boundedness inequalities, and sharpness ratios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::operators::{commutator_apply, hausdorff_apply, maximal_mod};
use crate::radial::RadialFunction;
use crate::weights::norms::{cmo_norm, lebesgue_norm, morrey_norm, Region};
use crate::weights::Weight;

use super::constants::{evaluate, resolve, Resolved};
use super::extremal::extremal_family;
use super::suites::envelope;
use super::{ConstantId, Scenario};

/// Outcome of one boundedness check `lhs <= K rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub id: ConstantId,
    pub constant: ExtendedValue,
    pub lhs: ExtendedValue,
    pub rhs: ExtendedValue,
    /// `rhs / lhs`; `+inf` when `lhs = 0` or `rhs = +inf`.
    pub slack: ExtendedValue,
    pub envelope: f64,
    pub holds: bool,
    /// Ball `B_g` attaining the worst ratio, for bounds stated ball by ball.
    pub ball: Option<i64>,
}

impl BoundRecord {
    fn new(id: ConstantId, constant: ExtendedValue, lhs: ExtendedValue, rhs: ExtendedValue, k: f64, tol: f64) -> Self {
        let slack = match (lhs, rhs) {
            (_, ExtendedValue::Infinite) => ExtendedValue::Infinite,
            (ExtendedValue::Infinite, _) => ExtendedValue::ZERO,
            (ExtendedValue::Finite(l), ExtendedValue::Finite(r)) if l == 0.0 => {
                if r == 0.0 {
                    ExtendedValue::Finite(1.0)
                } else {
                    ExtendedValue::Infinite
                }
            }
            (ExtendedValue::Finite(l), ExtendedValue::Finite(r)) => ExtendedValue::Finite(r / l),
        };
        let holds = match (lhs, rhs) {
            (_, ExtendedValue::Infinite) => true,
            (ExtendedValue::Infinite, _) => false,
            (ExtendedValue::Finite(l), ExtendedValue::Finite(r)) => l <= k * r * (1.0 + tol),
        };
        BoundRecord { id, constant, lhs, rhs, slack, envelope: k, holds, ball: None }
    }
}

/// Verdict of a ratio study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioVerdict {
    Converged,
    NotConverged,
    /// The constant is infinite and the ratios are reported as they are.
    Unbounded,
}

/// Norm ratios of the operator along an extremal family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub id: ConstantId,
    pub rs: Vec<u32>,
    pub ratios: Vec<ExtendedValue>,
    /// The factor divided out of the raw ratio `||H f|| / prod ||f_i||`:
    /// `1` for `C1`, `||g|| / prod ||f_i||` with `g = |x|^{(alpha+n) lambda}`
    /// for the Morrey eigenfunctions.
    pub normalization: Vec<f64>,
    pub target: ExtendedValue,
    pub verdict: RatioVerdict,
}

impl RatioReport {
    pub fn last_ratio(&self) -> Option<ExtendedValue> {
        self.ratios.last().copied()
    }
}

/// The operator (or commutator) applied to radial data; `None` when it
/// diverges on some shell.
fn radial_output(s: &Scenario, fs: &[RadialFunction], bs: Option<&[RadialFunction]>) -> Result<Option<RadialFunction>> {
    let window = Some(s.options.shell_window());
    let res = match bs {
        None => hausdorff_apply(&s.kernel, &s.families, fs, window)?,
        Some(b) => commutator_apply(&s.kernel, &s.families, b, fs, window)?,
    };
    let out = res.into_radial()?;
    if !out.divergence.is_none() {
        return Ok(None);
    }
    if !out.exact {
        return Err(Error::Unsupported("bound checks need an exactly synthesized operator output".into()));
    }
    Ok(Some(out.function))
}

fn symbols(s: &Scenario, m: usize) -> Vec<RadialFunction> {
    if s.symbols.is_empty() {
        vec![RadialFunction::log(s.prime); m]
    } else {
        s.symbols.clone()
    }
}

fn inputs(id: ConstantId, s: &Scenario) -> Result<Vec<RadialFunction>> {
    if !s.inputs.is_empty() {
        return Ok(s.inputs.clone());
    }
    match id {
        ConstantId::C1 | ConstantId::C3 | ConstantId::C8 | ConstantId::C9 => {
            Ok(extremal_family(id, s, *s.options.rs.last().unwrap_or(&8))?.fs)
        }
        _ => Err(Error::InvalidParameter(format!("scenario {} lists no inputs for {id}", s.id))),
    }
}

fn product(vals: impl IntoIterator<Item = ExtendedValue>) -> ExtendedValue {
    vals.into_iter().fold(ExtendedValue::Finite(1.0), ExtendedValue::mul)
}

fn lebesgue(f: &RadialFunction, w: &Weight, q: f64, region: Region) -> Result<ExtendedValue> {
    lebesgue_norm(f, w, q, region)
}

fn morrey(s: &Scenario, f: &RadialFunction, w: &Weight, q: f64, lambda: f64) -> Result<ExtendedValue> {
    Ok(morrey_norm(f, w, q, lambda, s.options.shell_window())?.value)
}

fn cmo(s: &Scenario, b: &RadialFunction, w: &Weight, r: f64) -> Result<ExtendedValue> {
    Ok(cmo_norm(b, w, r, s.options.shell_window())?.value)
}

fn power(r: &Resolved, alpha: f64) -> Result<Weight> {
    Weight::power(r.p, r.n, alpha)
}

/// `max_g lhs(g) / rhs(g)` over the window, for bounds stated on each ball `B_g`.
fn worst_ball(
    s: &Scenario,
    mut side: impl FnMut(i64) -> Result<(ExtendedValue, ExtendedValue)>,
) -> Result<(ExtendedValue, ExtendedValue, Option<i64>)> {
    let mut best: Option<(f64, ExtendedValue, ExtendedValue, i64)> = None;
    for g in s.options.shell_window().iter() {
        let (l, r) = side(g)?;
        let ratio = match (l, r) {
            (ExtendedValue::Finite(l), _) if l == 0.0 => 0.0,
            (_, ExtendedValue::Infinite) => 0.0,
            (ExtendedValue::Infinite, _) => f64::INFINITY,
            (ExtendedValue::Finite(l), ExtendedValue::Finite(r)) => l / r,
        };
        if best.as_ref().map_or(true, |b| ratio > b.0) {
            best = Some((ratio, l, r, g));
        }
    }
    let (_, l, r, g) = best.ok_or(Error::EmptyRange)?;
    Ok((l, r, Some(g)))
}

/// Left and right side of the theorem behind `id` on the inputs `fs`.
///
/// Bounds on a ball `B_g` are checked on every ball of the window and the worst
/// ball is reported. Where a theorem assumes `omega(B_g) <~ 1`, the right side
/// carries the factor `omega(B_g)^{1/q* - sum 1/q_i}` that assumption removes.
pub fn verify_bound(id: ConstantId, s: &Scenario, fs: &[RadialFunction]) -> Result<BoundRecord> {
    let r = resolve(id, s)?;
    if fs.len() != r.m {
        return Err(Error::InvalidParameter(format!("expected {} inputs, got {}", r.m, fs.len())));
    }
    let c = evaluate(id, s, &r)?;
    let k = envelope(id, s, &r)?;
    let pr = &s.params;
    let bs = symbols(s, r.m);
    let w = r.weight()?;
    let out = radial_output(s, fs, id.is_commutator().then_some(&bs[..]))?;
    let mut ball = None;
    let (lhs, rhs) = match id {
        ConstantId::C1 => {
            let lhs = match &out {
                Some(h) => lebesgue(h, &w, r.q, Region::All)?,
                None => ExtendedValue::Infinite,
            };
            let norms = (0..r.m)
                .map(|i| lebesgue(&fs[i], &power(&r, pr.alpha_i[i])?, pr.q_i[i], Region::All))
                .collect::<Result<Vec<_>>>()?;
            (lhs, c.mul(product(norms)))
        }
        ConstantId::C3 | ConstantId::C8 | ConstantId::C9 => {
            let lambda = r.lambda.unwrap_or(f64::NAN);
            let lhs = match &out {
                Some(h) => morrey(s, h, &w, r.q, lambda)?,
                None => ExtendedValue::Infinite,
            };
            let mut parts = Vec::new();
            for i in 0..r.m {
                let wi = power(&r, pr.alpha_i[i])?;
                parts.push(morrey(s, &fs[i], &wi, pr.q_i[i], pr.lambda_i[i])?);
                if id != ConstantId::C3 {
                    parts.push(cmo(s, &bs[i], &wi, pr.r_i[i])?);
                }
            }
            (lhs, c.mul(product(parts)))
        }
        ConstantId::C2 | ConstantId::C6 => {
            let (q_in, cmo_part) = if id == ConstantId::C2 {
                (pr.q_i.clone(), ExtendedValue::Finite(1.0))
            } else {
                let b = (0..r.m).map(|i| cmo(s, &bs[i], &w, pr.r_star_i[i])).collect::<Result<Vec<_>>>()?;
                (pr.q_star_i.clone(), product(b))
            };
            let norms = (0..r.m).map(|i| lebesgue(&fs[i], &w, q_in[i], Region::All)).collect::<Result<Vec<_>>>()?;
            let base = c.mul(cmo_part).mul(product(norms));
            let expo = 1.0 / r.q - q_in.iter().map(|q| 1.0 / q).sum::<f64>();
            let (l, rr, g) = worst_ball(s, |g| {
                let lhs = match &out {
                    Some(h) => lebesgue(h, &w, r.q, Region::Ball(g))?,
                    None => ExtendedValue::Infinite,
                };
                Ok((lhs, base.mul(w.ball_mass(g).map(|m| m.powf(expo)))))
            })?;
            ball = g;
            (l, rr)
        }
        ConstantId::C4 | ConstantId::C10 => {
            let lambda = r.lambda.unwrap_or(f64::NAN);
            let lhs = match &out {
                Some(h) => morrey(s, h, &w, r.q, lambda)?,
                None => ExtendedValue::Infinite,
            };
            let mut parts = Vec::new();
            for i in 0..r.m {
                if id == ConstantId::C4 {
                    parts.push(morrey(s, &fs[i], &w, pr.q_i[i], pr.lambda_i[i])?);
                } else {
                    parts.push(morrey(s, &fs[i], &w, pr.q_star_i[i], pr.lambda_i[i])?);
                    parts.push(cmo(s, &bs[i], &w, pr.r_star_i[i])?);
                }
            }
            (lhs, c.mul(product(parts)))
        }
        ConstantId::C5 => {
            let mut parts = Vec::new();
            for i in 0..r.m {
                let wi = power(&r, pr.alpha_i[i])?;
                parts.push(lebesgue(&fs[i], &wi, pr.q_i[i], Region::All)?);
                parts.push(cmo(s, &bs[i], &wi, pr.r_i[i])?);
            }
            let base = c.mul(product(parts));
            let n = r.n as f64;
            let rate: f64 = (0..r.m).map(|i| (n + pr.alpha_i[i]) / pr.r_i[i]).sum();
            let (l, rr, g) = worst_ball(s, |g| {
                let lhs = match &out {
                    Some(h) => lebesgue(h, &w, r.q, Region::Ball(g))?,
                    None => ExtendedValue::Infinite,
                };
                Ok((lhs, base.mul(ExtendedValue::Finite(r.p.powf(rate * g as f64)))))
            })?;
            ball = g;
            (l, rr)
        }
        ConstantId::C7 => {
            let lhs = match &out {
                Some(h) => {
                    let mm = maximal_mod(h, r.n)?;
                    if !mm.divergence.is_none() {
                        ExtendedValue::Infinite
                    } else if mm.valid != crate::radial::ShellRange::ALL {
                        return Err(Error::Unsupported("maximal function known only on a window".into()));
                    } else {
                        lebesgue(&mm.function, &w, r.q, Region::All)?
                    }
                }
                None => ExtendedValue::Infinite,
            };
            let zeta = pr.zeta.unwrap_or(f64::NAN);
            let unweighted = Weight::unweighted(r.p, r.n);
            let mut parts = Vec::new();
            for i in 0..r.m {
                parts.push(cmo(s, &bs[i], &unweighted, pr.r_star_i[i])?);
                parts.push(lebesgue(&fs[i], &power(&r, pr.alpha_i[i])?, zeta * pr.q_i[i], Region::All)?);
            }
            (lhs, c.mul(product(parts)))
        }
    };
    let mut rec = BoundRecord::new(id, c, lhs, rhs, k, s.options.tol);
    rec.ball = ball;
    Ok(rec)
}

/// `verify_bound` on the scenario's own inputs (or its extremal family).
pub fn verify_scenario(s: &Scenario) -> Result<BoundRecord> {
    let fs = inputs(s.target, s)?;
    verify_bound(s.target, s, &fs)
}

/// The maximal-function bound: `||M^mod(H_b f)||_{L^{q*}_omega}` against
/// `C7 prod ||b_i||_CMO prod ||f_i||_{L^{zeta q_i}_{omega_i}}`.
pub fn maximal_composite_check(s: &Scenario) -> Result<BoundRecord> {
    let fs = inputs(ConstantId::C7, s)?;
    verify_bound(ConstantId::C7, s, &fs)
}

/// Operator-norm ratios along the extremal family of `id` for each `r`.
pub fn ratio_study(id: ConstantId, s: &Scenario, rs: &[u32]) -> Result<RatioReport> {
    if !matches!(id, ConstantId::C1 | ConstantId::C3 | ConstantId::C8 | ConstantId::C9) {
        return Err(Error::Unsupported(format!("{id} has no ratio study")));
    }
    let r = resolve(id, s)?;
    let target = evaluate(id, s, &r)?;
    let w = r.weight()?;
    let pr = &s.params;
    let mut ratios = Vec::with_capacity(rs.len());
    let mut normalization = Vec::with_capacity(rs.len());
    for &rr in rs {
        let ex = extremal_family(id, s, rr)?;
        let bs = (!ex.bs.is_empty()).then_some(&ex.bs[..]);
        let out = radial_output(s, &ex.fs, bs)?;
        let (num, den, norm) = if id == ConstantId::C1 {
            let num = match &out {
                Some(h) => lebesgue(h, &w, r.q, Region::All)?,
                None => ExtendedValue::Infinite,
            };
            let den = (0..r.m)
                .map(|i| lebesgue(&ex.fs[i], &power(&r, pr.alpha_i[i])?, pr.q_i[i], Region::All))
                .collect::<Result<Vec<_>>>()?;
            (num, product(den), 1.0)
        } else {
            let lambda = r.lambda.unwrap_or(f64::NAN);
            let num = match &out {
                Some(h) => morrey(s, h, &w, r.q, lambda)?,
                None => ExtendedValue::Infinite,
            };
            let den = (0..r.m)
                .map(|i| morrey(s, &ex.fs[i], &power(&r, pr.alpha_i[i])?, pr.q_i[i], pr.lambda_i[i]))
                .collect::<Result<Vec<_>>>()?;
            let den = product(den);
            let g = RadialFunction::power(r.p, (r.alpha + r.n as f64) * lambda);
            let g_norm = morrey(s, &g, &w, r.q, lambda)?;
            let t = match (g_norm, den) {
                (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) if b > 0.0 => a / b,
                _ => f64::NAN,
            };
            (num, den, t)
        };
        let ratio = match (num, den) {
            (ExtendedValue::Infinite, _) => ExtendedValue::Infinite,
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) if b > 0.0 => ExtendedValue::Finite(a / b / norm),
            _ => return Err(Error::NonIntegrable("extremal input has no finite norm".into())),
        };
        ratios.push(ratio);
        normalization.push(norm);
    }
    let verdict = match (target, ratios.last()) {
        (ExtendedValue::Infinite, _) => RatioVerdict::Unbounded,
        (ExtendedValue::Finite(t), Some(ExtendedValue::Finite(last))) if (last / t - 1.0).abs() <= s.options.tol => {
            RatioVerdict::Converged
        }
        _ => RatioVerdict::NotConverged,
    };
    Ok(RatioReport { id, rs: rs.to_vec(), ratios, normalization, target, verdict })
}
