//! The constants `C1`..`C10` as shell series over the kernel's support.
//!
//! Every constant has the form `int Phi(y) |y|^-n prod_i F_i(y) dy`, where the
//! factor `F_i` depends on `y` only through the norm exponents of `A_i(y)`.
//! On shell `g` those exponents are affine in `g`, so each `F_i` is a radial
//! power-log function of `y` and the integral is a closed-form shell sum.

use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::family::{nu_of_families, Affine, MatrixFamily, NormProfile};
use crate::padic::Prime;
use crate::radial::series::{shell_sum, SeriesSum};
use crate::radial::{RadialFunction, ShellRange};
use crate::weights::muckenhoupt::critical_index_estimate;
use crate::weights::Weight;

use super::{ConstantId, Scenario};

/// Relative tolerance of the balance conditions.
const BALANCE_TOL: f64 = 1e-9;
/// Window used for the reverse Hölder index of `omega`.
const INDEX_WINDOW: i64 = 20;
const INDEX_TOL: f64 = 1e-6;

/// Parameters of a scenario after its hypotheses were checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub p: Prime,
    pub n: u32,
    pub m: usize,
    pub profiles: Vec<NormProfile>,
    pub nu: u32,
    /// Target exponent `q` (or `q*`).
    pub q: f64,
    /// Power of the target weight `omega = |x|^alpha`.
    pub alpha: f64,
    pub lambda: Option<f64>,
    pub r_omega: Option<f64>,
    pub delta: Option<f64>,
    /// `sup omega(B_g)` over the scenario window, where the theorem asks `omega(B_g) <~ 1`.
    pub omega_window_sup: Option<f64>,
}

impl Resolved {
    pub fn weight(&self) -> Result<Weight> {
        Weight::power(self.p, self.n, self.alpha)
    }
}

/// A constant's value together with the checked scenario data.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantValue {
    pub id: ConstantId,
    pub value: ExtendedValue,
    pub resolved: Resolved,
}

fn gate(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(what.to_string()))
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= BALANCE_TOL * a.abs().max(b.abs()).max(1.0)
}

fn list<'a>(v: &'a [f64], name: &str, m: usize) -> Result<&'a [f64]> {
    if v.len() != m {
        return Err(Error::InvalidParameter(format!("{name} needs {m} entries, got {}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be finite")));
    }
    Ok(v)
}

fn scalar(v: Option<f64>, name: &str) -> Result<f64> {
    match v {
        Some(x) if x.is_finite() => Ok(x),
        Some(_) => Err(Error::InvalidParameter(format!("{name} must be finite"))),
        None => Err(Error::InvalidParameter(format!("{name} is required"))),
    }
}

fn exponents(v: &[f64], name: &str) -> Result<()> {
    gate(v.iter().all(|&q| q >= 1.0), &format!("{name} >= 1"))
}

fn inv_sum(v: &[f64]) -> f64 {
    v.iter().map(|x| 1.0 / x).sum()
}

/// A value that may be given or derived; if given it must match.
fn derived(given: Option<f64>, value: f64, what: &str) -> Result<f64> {
    match given {
        Some(g) => {
            gate(close(g, value), what)?;
            Ok(g)
        }
        None => Ok(value),
    }
}

fn lambda_range(lambda_i: &[f64], q_i: &[f64], name: &str) -> Result<()> {
    let ok = lambda_i.iter().zip(q_i).all(|(&l, &q)| l > -1.0 / q && l < 0.0);
    gate(ok, &format!("lambda_i in (-1/{name}, 0)"))
}

/// `omega = |x|^alpha` in `A_zeta` (power weights: `-n < alpha < n(zeta-1)`,
/// or `-n < alpha <= 0` for `zeta = 1`).
fn in_a_zeta(alpha: f64, zeta: f64, n: f64) -> bool {
    if zeta == 1.0 {
        alpha > -n && alpha <= 0.0
    } else {
        zeta > 1.0 && alpha > -n && alpha < n * (zeta - 1.0)
    }
}

struct Base {
    p: Prime,
    n: u32,
    m: usize,
    profiles: Vec<NormProfile>,
    nu: u32,
}

fn base(s: &Scenario) -> Result<Base> {
    let n = s.dim;
    let mut profiles = Vec::with_capacity(s.m());
    for f in &s.families {
        match f.norm_profile(n)? {
            Some(pr) => profiles.push(pr),
            None => return Err(Error::Unsupported("constants need scalar-radial or constant matrix families".into())),
        }
    }
    let nu = nu_of_families(&s.families, s.prime, n as usize, ShellRange::finite(-1, 1), s.options.seed)?;
    Ok(Base { p: s.prime, n, m: s.m(), profiles, nu })
}

/// Critical index of `omega`, the default `delta` and the window supremum of `omega(B_g)`.
fn weight_indices(b: &Base, alpha: f64, delta: Option<f64>, window: i64) -> Result<(f64, f64, f64)> {
    let w = Weight::power(b.p, b.n, alpha)?;
    let r = critical_index_estimate(&w, ShellRange::finite(-INDEX_WINDOW, INDEX_WINDOW), INDEX_TOL)?;
    gate(r.is_finite(), "finite critical index r_omega")?;
    let delta = match delta {
        Some(d) => {
            gate(d > 1.0 && d < r, "delta in (1, r_omega)")?;
            d
        }
        None => 0.5 * (1.0 + r),
    };
    let sup = w.ball_mass(window).to_f64();
    gate(sup.is_finite(), "omega(B_g) bounded on the window")?;
    Ok((r, delta, sup))
}

/// Hypotheses shared by the commutator bounds `C5`, `C8` and `C9`.
fn commutator_exponents(s: &Scenario, b: &Base) -> Result<(f64, f64)> {
    let pr = &s.params;
    let q_i = list(&pr.q_i, "q_i", b.m)?;
    let r_i = list(&pr.r_i, "r_i", b.m)?;
    let a_i = list(&pr.alpha_i, "alpha_i", b.m)?;
    exponents(q_i, "q_i")?;
    gate(r_i.iter().all(|&r| r > 1.0), "r_i > 1")?;
    let n = b.n as f64;
    let ok = a_i.iter().zip(r_i).all(|(&a, &r)| a > -n && a < n * (r - 1.0));
    gate(ok, "alpha_i in (-n, n r_i/r_i')")?;
    let q = derived(pr.q, 1.0 / (inv_sum(q_i) + inv_sum(r_i)), "Hölder balance 1/q = sum 1/q_i + sum 1/r_i")?;
    exponents(&[q], "q")?;
    let wsum: f64 = a_i.iter().zip(q_i).zip(r_i).map(|((a, qq), r)| a / qq + a / r).sum();
    let alpha = derived(pr.alpha, q * wsum, "weight balance alpha/q = sum alpha_i/q_i + sum alpha_i/r_i")?;
    Ok((q, alpha))
}

fn morrey_balance(s: &Scenario, b: &Base, q: f64, q_i: &[f64], alpha: f64) -> Result<f64> {
    gate(q > 1.0, "Morrey target exponent q > 1")?;
    let l_i = list(&s.params.lambda_i, "lambda_i", b.m)?;
    lambda_range(l_i, q_i, "q_i")?;
    let a_i = list(&s.params.alpha_i, "alpha_i", b.m)?;
    let n = b.n as f64;
    let total: f64 = a_i.iter().zip(l_i).map(|(a, l)| (a + n) * l).sum();
    derived(s.params.lambda, total / (alpha + n), "Morrey balance (alpha+n) lambda = sum (alpha_i+n) lambda_i")
}

/// Checks the hypotheses of `id` on `s`.
pub fn resolve(id: ConstantId, s: &Scenario) -> Result<Resolved> {
    let b = base(s)?;
    let pr = &s.params;
    let n = b.n as f64;
    let mut lambda = None;
    let mut r_omega = None;
    let mut delta = None;
    let mut omega_sup = None;
    let (q, alpha) = match id {
        ConstantId::C1 | ConstantId::C3 => {
            let q_i = list(&pr.q_i, "q_i", b.m)?;
            let a_i = list(&pr.alpha_i, "alpha_i", b.m)?;
            exponents(q_i, "q_i")?;
            gate(a_i.iter().all(|&a| a > -n), "alpha_i > -n")?;
            let q = derived(pr.q, 1.0 / inv_sum(q_i), "Hölder balance 1/q = sum 1/q_i")?;
            let wsum: f64 = a_i.iter().zip(q_i).map(|(a, qq)| a / qq).sum();
            let alpha = derived(pr.alpha, q * wsum, "weight balance alpha/q = sum alpha_i/q_i")?;
            if id == ConstantId::C3 {
                lambda = Some(morrey_balance(s, &b, q, q_i, alpha)?);
            }
            (q, alpha)
        }
        ConstantId::C2 | ConstantId::C4 => {
            let q_i = list(&pr.q_i, "q_i", b.m)?;
            exponents(q_i, "q_i")?;
            let q_star = scalar(pr.q_star, "q_star")?;
            exponents(&[q_star], "q_star")?;
            let zeta = scalar(pr.zeta, "zeta")?;
            let alpha = scalar(pr.alpha, "alpha")?;
            gate(in_a_zeta(alpha, zeta, n), "omega in A_zeta")?;
            let q = derived(pr.q, 1.0 / inv_sum(q_i), "Hölder balance 1/q = sum 1/q_i")?;
            let (r, d, sup) = weight_indices(&b, alpha, pr.delta, s.options.window)?;
            gate(q > q_star * zeta * r / (r - 1.0), "q > q* zeta r_omega/(r_omega-1)")?;
            if id == ConstantId::C4 {
                let l_i = list(&pr.lambda_i, "lambda_i", b.m)?;
                lambda_range(l_i, q_i, "q_i")?;
                lambda = Some(derived(pr.lambda, l_i.iter().sum(), "lambda = sum lambda_i")?);
            }
            r_omega = Some(r);
            delta = Some(d);
            omega_sup = Some(sup);
            (q_star, alpha)
        }
        ConstantId::C5 | ConstantId::C8 | ConstantId::C9 => {
            let (q, alpha) = commutator_exponents(s, &b)?;
            if id != ConstantId::C5 {
                lambda = Some(morrey_balance(s, &b, q, &pr.q_i, alpha)?);
            }
            if id != ConstantId::C5 {
                let mut inside = ShellRange::ALL;
                for pf in &b.profiles {
                    let k = pf.log_norm;
                    inside = inside.intersect(&ShellRange::at_most(-1).preimage_affine(k.slope, k.offset));
                }
                gate(s.kernel.supported_in(inside), "support condition supp(Phi) ⊂ {||A_i(y)|| < 1}")?;
            }
            if id == ConstantId::C9 {
                let scalar = s.families.iter().all(|f| match f {
                    MatrixFamily::ScalarRadial { .. } => true,
                    MatrixFamily::Constant(a) => a.as_scalar().is_some(),
                    MatrixFamily::Pointwise(_) => false,
                });
                gate(scalar, "scalar families A_i(y) = s_i(y) I")?;
            }
            (q, alpha)
        }
        ConstantId::C6 | ConstantId::C10 => {
            let qs_i = list(&pr.q_star_i, "q_star_i", b.m)?;
            let rs_i = list(&pr.r_star_i, "r_star_i", b.m)?;
            exponents(qs_i, "q_star_i")?;
            exponents(rs_i, "r_star_i")?;
            let q_star = scalar(pr.q_star, "q_star")?;
            exponents(&[q_star], "q_star")?;
            let zeta = scalar(pr.zeta, "zeta")?;
            let alpha = scalar(pr.alpha, "alpha")?;
            gate(in_a_zeta(alpha, zeta, n), "omega in A_zeta")?;
            gate(rs_i.iter().all(|&r| zeta <= r), "zeta <= r_i*")?;
            let (r, d, sup) = weight_indices(&b, alpha, pr.delta, s.options.window)?;
            let rhs = (inv_sum(rs_i) + inv_sum(qs_i)) * zeta * r / (r - 1.0);
            gate(1.0 / q_star > rhs, "1/q* > (sum 1/r_i* + sum 1/q_i*) zeta r_omega/(r_omega-1)")?;
            if id == ConstantId::C10 {
                let l_i = list(&pr.lambda_i, "lambda_i", b.m)?;
                lambda_range(l_i, qs_i, "q_i*")?;
                lambda = Some(derived(pr.lambda, l_i.iter().sum(), "lambda = sum lambda_i")?);
            }
            r_omega = Some(r);
            delta = Some(d);
            omega_sup = Some(sup);
            (q_star, alpha)
        }
        ConstantId::C7 => {
            let q_i = list(&pr.q_i, "q_i", b.m)?;
            let rs_i = list(&pr.r_star_i, "r_star_i", b.m)?;
            let a_i = list(&pr.alpha_i, "alpha_i", b.m)?;
            exponents(q_i, "q_i")?;
            gate(rs_i.iter().all(|&r| r > 1.0), "r_i* > 1")?;
            let zeta = scalar(pr.zeta, "zeta")?;
            gate(zeta > 1.0, "zeta > 1")?;
            gate(a_i.iter().all(|&a| a > -n && a < n * (zeta - 1.0)), "alpha_i in (-n, n(zeta-1))")?;
            gate(close(inv_sum(q_i) + inv_sum(rs_i), 1.0), "sum 1/q_i + sum 1/r_i* = 1")?;
            let q_star = derived(pr.q_star, zeta / inv_sum(q_i), "sum 1/q_i = zeta/q*")?;
            exponents(&[q_star], "q_star")?;
            let wsum: f64 = a_i.iter().zip(q_i).map(|(a, qq)| a / qq).sum();
            let alpha = derived(pr.alpha, wsum * q_star / zeta, "sum alpha_i/q_i = zeta alpha/q*")?;
            gate(alpha > -n, "alpha > -n")?;
            (q_star, alpha)
        }
    };
    Ok(Resolved {
        p: b.p,
        n: b.n,
        m: b.m,
        profiles: b.profiles,
        nu: b.nu,
        q,
        alpha,
        lambda,
        r_omega,
        delta,
        omega_window_sup: omega_sup,
    })
}

/// Builders for shell-wise factors `y -> F(y)` as radial functions of `y`.
struct Factors {
    p: Prime,
    n: f64,
}

impl Factors {
    /// `p^(e * a(g))`.
    fn pw(&self, e: f64, a: Affine) -> RadialFunction {
        let c = self.p.powf(e * a.offset as f64);
        RadialFunction::term(self.p, c, e * a.slope as f64, 0, ShellRange::ALL)
    }

    fn one(&self) -> RadialFunction {
        RadialFunction::constant(self.p, 1.0)
    }

    fn chi(&self, r: ShellRange) -> RadialFunction {
        RadialFunction::indicator(self.p, r)
    }

    /// `|a(g)|`.
    fn abs(&self, a: Affine) -> RadialFunction {
        if a.slope == 0 {
            return RadialFunction::constant(self.p, a.offset.abs() as f64);
        }
        let lin = RadialFunction::term(self.p, a.slope as f64, 0.0, 1, ShellRange::ALL)
            .add(&RadialFunction::constant(self.p, a.offset as f64));
        lin.restrict(a.positive()).sub(&lin.restrict(a.nonpositive()))
    }

    /// `max(p^(e1 a1(g)), p^(e2 a2(g)))`, split where the exponents cross.
    fn max_pw(&self, e1: f64, a1: Affine, e2: f64, a2: Affine) -> RadialFunction {
        let slope = e1 * a1.slope as f64 - e2 * a2.slope as f64;
        let off = e1 * a1.offset as f64 - e2 * a2.offset as f64;
        let (first, second) = (self.pw(e1, a1), self.pw(e2, a2));
        if slope.abs() < 1e-12 {
            return if off >= 0.0 { first } else { second };
        }
        let t = -off / slope;
        let (r1, r2) = if slope > 0.0 {
            let c = (t - 1e-9).ceil() as i64;
            (ShellRange::at_least(c), ShellRange::at_most(c - 1))
        } else {
            let f = (t + 1e-9).floor() as i64;
            (ShellRange::at_most(f), ShellRange::at_least(f + 1))
        };
        first.restrict(r1).add(&second.restrict(r2))
    }

    /// `chi_{||A|| <= 1} ||A||^e1 + chi_{||A|| > 1} ||A||^e2`.
    fn split(&self, k: Affine, e1: f64, e2: f64) -> RadialFunction {
        self.pw(e1, k).mul(&self.chi(k.nonpositive())).add(&self.pw(e2, k).mul(&self.chi(k.positive())))
    }

    /// `2 ||A||^n / |det A|`.
    fn ratio_term(&self, pf: &NormProfile) -> RadialFunction {
        self.pw(self.n, pf.log_norm).mul(&self.pw(1.0, pf.log_det_inv)).scale(&2.0)
    }

    /// `(max{||A^-1||^a, ||A||^-a} |det A^-1|)^e`.
    fn max_det(&self, pf: &NormProfile, a: f64, e: f64) -> RadialFunction {
        self.max_pw(a * e, pf.log_inv_norm, -a * e, pf.log_norm).mul(&self.pw(e, pf.log_det_inv))
    }
}

fn factor(id: ConstantId, s: &Scenario, r: &Resolved, i: usize) -> RadialFunction {
    let f = Factors { p: r.p, n: r.n as f64 };
    let n = f.n;
    let pf = &r.profiles[i];
    let (k, ki, kd) = (pf.log_norm, pf.log_inv_norm, pf.log_det_inv);
    let pr = &s.params;
    let at = |v: &Vec<f64>| v.get(i).copied().unwrap_or(f64::NAN);
    match id {
        ConstantId::C1 => f.pw((at(&pr.alpha_i) + n) / at(&pr.q_i), ki),
        ConstantId::C3 => f.pw(-(at(&pr.alpha_i) + n) * at(&pr.lambda_i), ki),
        ConstantId::C2 | ConstantId::C4 => {
            let (q, zeta, delta) = (at(&pr.q_i), pr.zeta.unwrap_or(f64::NAN), r.delta.unwrap_or(f64::NAN));
            let head = f.pw(zeta / q, kd).mul(&f.pw(n * zeta / q, k));
            let tail = if id == ConstantId::C2 {
                f.split(k, -n * zeta / q, -n * (delta - 1.0) / (q * delta))
            } else {
                let l = at(&pr.lambda_i);
                f.split(k, n * zeta * l, n * l * (delta - 1.0) / delta)
            };
            head.mul(&tail)
        }
        ConstantId::C5 => {
            let (a, q, rr) = (at(&pr.alpha_i), at(&pr.q_i), at(&pr.r_i));
            let psi = f
                .one()
                .add(&f.max_det(pf, a, 1.0 / rr).mul(&f.pw((n + a) / rr, k)))
                .add(&f.abs(k))
                .add(&f.ratio_term(pf));
            psi.mul(&f.max_det(pf, a, 1.0 / q))
        }
        ConstantId::C6 | ConstantId::C10 => {
            let (q, rr, zeta, delta) =
                (at(&pr.q_star_i), at(&pr.r_star_i), pr.zeta.unwrap_or(f64::NAN), r.delta.unwrap_or(f64::NAN));
            let psi =
                f.one().add(&f.ratio_term(pf)).add(&f.pw(zeta / rr, kd).mul(&f.pw(n * zeta / rr, k))).add(&f.abs(k));
            let mu = f.pw(zeta / q, kd).mul(&f.pw(n * zeta / q, k));
            let tail = if id == ConstantId::C6 {
                f.split(k, -n * zeta / q, -n * (delta - 1.0) / (q * delta))
            } else {
                let l = at(&pr.lambda_i);
                f.split(k, n * zeta * l, n * l * (delta - 1.0) / delta)
            };
            psi.mul(&mu).mul(&tail)
        }
        ConstantId::C7 => {
            let (a, q, rr, zeta) = (at(&pr.alpha_i), at(&pr.q_i), at(&pr.r_star_i), pr.zeta.unwrap_or(f64::NAN));
            let gamma = f
                .one()
                .add(&f.abs(k))
                .add(&f.ratio_term(pf))
                .add(&f.pw(n / rr, k).mul(&f.pw(1.0 / rr, kd)))
                .mul(&f.pw(1.0 / q, kd).mul(&f.pw(n / q, k)));
            // the change of variables x -> ||A|| x in L^zeta_{omega_i} gives (alpha_i + n)
            gamma.mul(&f.pw(-(a + n) / (zeta * q), k))
        }
        ConstantId::C8 => f.pw(-(at(&pr.alpha_i) + n) * at(&pr.lambda_i), ki).mul(&f.abs(k)),
        // |s_i(y)| = ||A_i(y)|| for scalar families
        ConstantId::C9 => f.pw((at(&pr.alpha_i) + n) * at(&pr.lambda_i), k).mul(&f.abs(k)),
    }
}

/// The integrand `Phi(g) prod_i F_i(g)` on shells of `y`, before the sphere factor.
pub fn integrand(id: ConstantId, s: &Scenario, r: &Resolved) -> RadialFunction {
    (0..r.m).fold(s.kernel.phi().clone(), |acc, i| acc.mul(&factor(id, s, r, i)))
}

/// `C_id` for the scenario, after its hypothesis gate.
pub fn compute_constant(id: ConstantId, s: &Scenario) -> Result<ConstantValue> {
    let resolved = resolve(id, s)?;
    let value = evaluate(id, s, &resolved)?;
    Ok(ConstantValue { id, value, resolved })
}

pub(crate) fn evaluate(id: ConstantId, s: &Scenario, r: &Resolved) -> Result<ExtendedValue> {
    let sphere = 1.0 - r.p.powf(-(r.n as f64));
    match shell_sum(&integrand(id, s, r))? {
        SeriesSum::Finite(v) => Ok(ExtendedValue::Finite(sphere * v)),
        SeriesSum::PosInfinite => Ok(ExtendedValue::Infinite),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario::{RunOptions, SpaceParams};
    use crate::operators::KernelSpec;
    use crate::radial::RadialTerm;

    fn scenario(
        id: ConstantId,
        p: u64,
        n: u32,
        phi: &[(i64, f64)],
        fams: &[(i64, i64)],
        params: SpaceParams,
    ) -> Scenario {
        let p = Prime::new(p).unwrap();
        let terms = phi.iter().map(|&(g, c)| RadialTerm::new(c, 0.0, 0, ShellRange::single(g))).collect();
        Scenario {
            id: "t".into(),
            prime: p,
            dim: n,
            kernel: KernelSpec::new(RadialFunction::new(p, terms), n).unwrap(),
            families: fams.iter().map(|&(m, d)| MatrixFamily::scalar_radial(m, d)).collect(),
            params,
            symbols: Vec::new(),
            inputs: Vec::new(),
            target: id,
            options: RunOptions::default(),
        }
    }

    fn value(id: ConstantId, s: &Scenario) -> f64 {
        compute_constant(id, s).unwrap().value.to_f64()
    }

    #[test]
    fn c1_single_shell() {
        let pr = SpaceParams { q_i: vec![2.0], alpha_i: vec![0.0], ..Default::default() };
        let s = scenario(ConstantId::C1, 2, 1, &[(0, 1.0)], &[(1, 0)], pr);
        assert_eq!(value(ConstantId::C1, &s), 0.5);
    }

    #[test]
    fn c3_single_shell() {
        let pr = SpaceParams { q_i: vec![2.0], alpha_i: vec![0.0], lambda_i: vec![-0.25], ..Default::default() };
        let s = scenario(ConstantId::C3, 2, 1, &[(1, 1.0)], &[(1, 0)], pr);
        let want = 0.5 * 2f64.powf(-0.25);
        assert!((value(ConstantId::C3, &s) - want).abs() < 1e-15);
    }

    #[test]
    fn c1_matches_brute_sum() {
        let pr = SpaceParams { q_i: vec![2.0, 3.0], alpha_i: vec![0.5, -0.25], ..Default::default() };
        let phi = [(-2, 0.3), (0, 1.0), (3, 0.7)];
        let fams = [(1, 0), (2, -1)];
        let s = scenario(ConstantId::C1, 3, 2, &phi, &fams, pr.clone());
        let p = 3f64;
        let brute: f64 = phi
            .iter()
            .map(|&(g, c)| {
                let mut v = c * (1.0 - p.powi(-2));
                for (i, &(m, d)) in fams.iter().enumerate() {
                    let ki = -(m * g + d) as f64;
                    v *= p.powf(ki * (pr.alpha_i[i] + 2.0) / pr.q_i[i]);
                }
                v
            })
            .sum();
        let got = value(ConstantId::C1, &s);
        assert!((got / brute - 1.0).abs() < 1e-12, "{got} vs {brute}");
    }

    #[test]
    fn c8_equals_c9_on_scalar_families() {
        let pr = SpaceParams {
            q_i: vec![4.0],
            r_i: vec![2.0],
            alpha_i: vec![0.5],
            lambda_i: vec![-0.1],
            ..Default::default()
        };
        let s = scenario(ConstantId::C8, 2, 1, &[(-3, 1.0), (-2, 0.5)], &[(1, 0)], pr);
        let (c8, c9) = (value(ConstantId::C8, &s), value(ConstantId::C9, &s));
        assert!(c8 > 0.0 && (c8 - c9).abs() <= 1e-15 * c8);
    }

    #[test]
    fn gates_name_the_condition() {
        let pr = SpaceParams {
            q_i: vec![4.0],
            r_i: vec![2.0],
            alpha_i: vec![0.5],
            lambda_i: vec![-0.1],
            ..Default::default()
        };
        let s = scenario(ConstantId::C8, 2, 1, &[(0, 1.0)], &[(1, 0)], pr.clone());
        let e = compute_constant(ConstantId::C8, &s).unwrap_err().to_string();
        assert!(e.contains("support condition"), "{e}");
        let mut bad = pr.clone();
        bad.lambda_i = vec![-0.3];
        let s = scenario(ConstantId::C8, 2, 1, &[(-2, 1.0)], &[(1, 0)], bad);
        let e = compute_constant(ConstantId::C8, &s).unwrap_err().to_string();
        assert!(e.contains("lambda_i in (-1/q_i, 0)"), "{e}");
        let mut bad = pr;
        bad.q = Some(1.0);
        let s = scenario(ConstantId::C5, 2, 1, &[(0, 1.0)], &[(1, 0)], bad);
        let e = compute_constant(ConstantId::C5, &s).unwrap_err().to_string();
        assert!(e.contains("Hölder balance"), "{e}");
    }

    #[test]
    fn divergent_kernel_is_infinite() {
        let p = Prime::new(2).unwrap();
        let pr = SpaceParams { q_i: vec![2.0], alpha_i: vec![0.0], ..Default::default() };
        let mut s = scenario(ConstantId::C1, 2, 1, &[(0, 1.0)], &[(1, 0)], pr);
        s.kernel = KernelSpec::new(RadialFunction::indicator(p, ShellRange::at_most(0)), 1).unwrap();
        // ||A^-1||^{1/2} = 2^{-g/2} grows as g -> -inf
        assert_eq!(compute_constant(ConstantId::C1, &s).unwrap().value, ExtendedValue::Infinite);
    }

    #[test]
    fn weighted_constants_record_indices() {
        let pr =
            SpaceParams { q_i: vec![6.0], q_star: Some(1.0), zeta: Some(1.5), alpha: Some(-0.5), ..Default::default() };
        let s = scenario(ConstantId::C2, 2, 1, &[(0, 1.0), (1, 1.0)], &[(1, 0)], pr);
        let c = compute_constant(ConstantId::C2, &s).unwrap();
        let r = c.resolved.r_omega.unwrap();
        assert!((r - 2.0).abs() < 1e-4, "{r}");
        assert!((c.resolved.delta.unwrap() - 1.5).abs() < 1e-4);
        assert!(c.value.is_finite());
    }
}
