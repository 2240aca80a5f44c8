//! Multilinear Hausdorff operators, their commutators and the two maximal
//! operators, evaluated on radial data.
//!
//! For a scalar-radial family with `|s(y)|_p = p^(m g + d)` on `S_g` and `x` on
//! `S_v`, `|A(y) x|_p = p^(m g + d + v)`, and integrating `|y|^-n` over `S_g`
//! gives `1 - p^-n`. Hence
//!
//! `H(f)(v) = (1 - p^-n) sum_g Phi(g) prod_i f_i(m_i g + d_i + v)`.

pub mod maximal;
pub mod pointwise;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::MatrixFamily;
use crate::radial::series::{shell_sum, SeriesSum};
use crate::radial::{segments_from_cuts, RadialFunction, RadialTerm, ShellRange, ShellScalar};

pub use maximal::{maximal, maximal_mod};
pub use pointwise::PointwiseOperator;

/// Default half-width of the output window for per-shell synthesis.
pub const DEFAULT_OUTPUT_HALF_WIDTH: i64 = 48;

/// Shells probed on each side of the breakpoints for nonnegativity.
const SIGN_MARGIN: i64 = 64;

/// A nonnegative radial kernel `Phi` on `Q_p^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec<S: ShellScalar = f64> {
    phi: RadialFunction<S>,
    dim: u32,
}

impl<S: ShellScalar> KernelSpec<S> {
    pub fn new(phi: RadialFunction<S>, dim: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        check_nonnegative(&phi.map_coeffs(|c| c.to_f64(), S::exp_to_f64))?;
        Ok(KernelSpec { phi, dim })
    }

    pub fn phi(&self) -> &RadialFunction<S> {
        &self.phi
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Smallest shell range containing the support, if `Phi` is nonzero.
    pub fn support(&self) -> Option<ShellRange> {
        self.phi.support_hull()
    }

    pub fn has_finite_support(&self) -> bool {
        self.support().map_or(true, |r| r.is_finite())
    }

    /// Whether every shell where `Phi` is nonzero lies in `range`.
    pub fn supported_in(&self, range: ShellRange) -> bool {
        self.phi.terms().iter().all(|t| t.range.intersect(&range) == t.range)
    }
}

fn check_nonnegative(f: &RadialFunction) -> Result<()> {
    use crate::radial::power::{dominant_term, End};
    for seg in segments_from_cuts(&f.cut_points()) {
        let probe: Vec<i64> = match (seg.lo, seg.hi) {
            (Some(a), Some(b)) if b - a <= 4 * SIGN_MARGIN => (a..=b).collect(),
            (Some(a), Some(b)) => (a..a + SIGN_MARGIN).chain(b - SIGN_MARGIN..=b).collect(),
            (Some(a), None) => (a..a + SIGN_MARGIN).collect(),
            (None, Some(b)) => (b - SIGN_MARGIN..=b).collect(),
            (None, None) => (-SIGN_MARGIN..=SIGN_MARGIN).collect(),
        };
        if let Some(g) = probe.into_iter().find(|&g| f.value(g) < 0.0) {
            return Err(Error::NegativeKernel(format!("value {} on shell {g}", f.value(g))));
        }
        for (end, open) in [(End::Upper, seg.hi.is_none()), (End::Lower, seg.lo.is_none())] {
            if !open {
                continue;
            }
            if let Some(t) = dominant_term(&f.restrict(seg), end) {
                let sign = if end == End::Lower && t.logpow % 2 == 1 { -t.coeff } else { t.coeff };
                if sign < 0.0 {
                    return Err(Error::NegativeKernel(format!("negative tail towards {end:?}")));
                }
            }
        }
    }
    Ok(())
}

/// Where a radial result could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    None,
    /// The defining integral diverges on these shells.
    Shells(Vec<i64>),
    Everywhere,
}

impl Divergence {
    pub fn is_none(&self) -> bool {
        matches!(self, Divergence::None)
    }

    pub fn at(&self, g: i64) -> bool {
        match self {
            Divergence::None => false,
            Divergence::Shells(s) => s.contains(&g),
            Divergence::Everywhere => true,
        }
    }
}

/// A radial operator output.
///
/// `function` is correct on `valid` away from divergent shells, where it is
/// set to zero. `exact` means `valid` is the whole line and every value is a
/// closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOutput<S: ShellScalar = f64> {
    pub function: RadialFunction<S>,
    pub valid: ShellRange,
    pub divergence: Divergence,
    pub exact: bool,
}

impl<S: ShellScalar> RadialOutput<S> {
    fn exact(function: RadialFunction<S>) -> Self {
        RadialOutput { function, valid: ShellRange::ALL, divergence: Divergence::None, exact: true }
    }

    fn everywhere(p: crate::padic::Prime) -> Self {
        RadialOutput {
            function: RadialFunction::zero(p),
            valid: ShellRange::ALL,
            divergence: Divergence::Everywhere,
            exact: true,
        }
    }

    /// Value on shell `g`, `None` if divergent or outside the valid range.
    pub fn value(&self, g: i64) -> Option<S> {
        (self.valid.contains(g) && !self.divergence.at(g)).then(|| self.function.value(g))
    }
}

/// Result of applying an operator.
#[derive(Debug, Clone)]
pub enum OperatorResult {
    Radial(RadialOutput),
    /// Non-radial families: evaluated pointwise by Monte Carlo.
    Pointwise(PointwiseOperator),
}

impl OperatorResult {
    pub fn radial(&self) -> Option<&RadialOutput> {
        match self {
            OperatorResult::Radial(r) => Some(r),
            OperatorResult::Pointwise(_) => None,
        }
    }

    pub fn into_radial(self) -> Result<RadialOutput> {
        match self {
            OperatorResult::Radial(r) => Ok(r),
            OperatorResult::Pointwise(_) => Err(Error::Unsupported("result is only available pointwise".into())),
        }
    }
}

fn check_arity(families: &[MatrixFamily], fs: usize, bs: Option<usize>) -> Result<()> {
    if families.is_empty() {
        return Err(Error::InvalidParameter("at least one factor is required".into()));
    }
    for k in std::iter::once(fs).chain(bs) {
        if k != families.len() {
            return Err(Error::DimensionMismatch { expected: families.len(), actual: k });
        }
    }
    Ok(())
}

fn check_primes<S: ShellScalar>(kernel: &KernelSpec<S>, fs: &[&RadialFunction<S>]) -> Result<()> {
    let p = kernel.phi.prime();
    match fs.iter().find(|f| f.prime() != p) {
        Some(f) => Err(Error::PrimeMismatch(p.get(), f.prime().get())),
        None => Ok(()),
    }
}

fn scalar_slopes(families: &[MatrixFamily]) -> Option<Vec<(i64, i64)>> {
    families
        .iter()
        .map(|f| match f {
            MatrixFamily::ScalarRadial { slope, offset } => Some((*slope, *offset)),
            _ => None,
        })
        .collect()
}

/// One factor of the integrand: `f_i(k + v)` or, with a symbol,
/// `b_i(v) f_i(k + v) - (b_i f_i)(k + v)`.
#[derive(Debug, Clone)]
struct Slot<S: ShellScalar> {
    f: RadialFunction<S>,
    b: Option<(RadialFunction<S>, RadialFunction<S>)>,
}

impl<S: ShellScalar> Slot<S> {
    fn new(f: &RadialFunction<S>, b: Option<&RadialFunction<S>>) -> Self {
        Slot { f: f.clone(), b: b.map(|b| (b.clone(), b.mul(f))) }
    }

    /// The factor as a function of `v` for a fixed shift `k`.
    fn in_v(&self, k: i64) -> RadialFunction<S> {
        match &self.b {
            None => self.f.dilate(k),
            Some((b, bf)) => b.mul(&self.f.dilate(k)).sub(&bf.dilate(k)),
        }
    }

    /// The factor as a function of the kernel shell `g` for fixed `v`,
    /// with `k = m g + d`.
    fn in_g(&self, m: i64, d: i64, v: i64) -> RadialFunction<S> {
        match &self.b {
            None => self.f.compose_affine(m, d + v),
            Some((b, bf)) => self.f.compose_affine(m, d + v).scale(&b.value(v)).sub(&bf.compose_affine(m, d + v)),
        }
    }

    fn full_range(&self) -> bool {
        let full = |f: &RadialFunction<S>| f.terms().iter().all(|t| t.range == ShellRange::ALL);
        full(&self.f) && self.b.as_ref().map_or(true, |(b, _)| full(b))
    }
}

/// `(1 - p^-n) sum_{g in supp Phi} Phi(g) prod_i slot_i(m_i g + d_i)` for
/// finitely supported `Phi`; an exact finite combination.
fn synthesize_finite<S: ShellScalar>(
    kernel: &KernelSpec<S>,
    slopes: &[(i64, i64)],
    slots: &[Slot<S>],
) -> RadialFunction<S> {
    let p = kernel.phi.prime();
    let sphere = S::one_minus_pow_p(p, S::exp_from_int(-(kernel.dim as i64)));
    let mut out = RadialFunction::zero(p);
    let Some(support) = kernel.support() else {
        return out;
    };
    for g in support.iter() {
        let w = kernel.phi.value(g);
        if w.is_zero() {
            continue;
        }
        let mut prod = RadialFunction::constant(p, w.times(&sphere));
        for (slot, &(m, d)) in slots.iter().zip(slopes) {
            prod = prod.mul(&slot.in_v(m * g + d));
            if prod.is_zero() {
                break;
            }
        }
        out = out.add(&prod);
    }
    out
}

/// Separable expansion `sum_j L_j(v) R_j(g)` of a slot whose data is
/// unrestricted, with each `L_j` a unit monomial `p^(beta v) v^a`.
fn separate(slot: &Slot<f64>, m: i64, d: i64) -> Vec<(RadialTerm, RadialFunction)> {
    let p = slot.f.prime();
    let shifted = |f: &RadialFunction, sign: f64| -> Vec<(RadialTerm, RadialFunction)> {
        let mut out = Vec::new();
        for t in f.terms() {
            for j in 0..=t.logpow {
                let left = RadialTerm::new(1.0, t.exponent, t.logpow - j, ShellRange::ALL);
                let c = sign * t.coeff * binom(t.logpow, j);
                let right = RadialFunction::term(p, c, t.exponent, j, ShellRange::ALL).compose_affine(m, d);
                out.push((left, right));
            }
        }
        out
    };
    match &slot.b {
        None => shifted(&slot.f, 1.0),
        Some((b, bf)) => {
            let mut out = Vec::new();
            for (l, r) in shifted(&slot.f, 1.0) {
                for tb in b.terms() {
                    let left = RadialTerm::new(1.0, tb.exponent + l.exponent, tb.logpow + l.logpow, ShellRange::ALL);
                    out.push((left, r.scale(&tb.coeff)));
                }
            }
            out.extend(shifted(bf, -1.0));
            out
        }
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn same_monomial(a: &RadialTerm, b: &RadialTerm) -> bool {
    a.logpow == b.logpow && (a.exponent - b.exponent).abs() <= crate::radial::EXP_EPS
}

/// Full-line data with an infinitely supported kernel: each monomial in `v`
/// gets the coefficient `(1 - p^-n) sum_g Phi(g) R(g)`.
fn synthesize_separable(kernel: &KernelSpec, slopes: &[(i64, i64)], slots: &[Slot<f64>]) -> Result<RadialOutput> {
    let p = kernel.phi.prime();
    let mut acc: Vec<(RadialTerm, RadialFunction)> =
        vec![(RadialTerm::new(1.0, 0.0, 0, ShellRange::ALL), RadialFunction::constant(p, 1.0))];
    for (slot, &(m, d)) in slots.iter().zip(slopes) {
        let parts = separate(slot, m, d);
        let mut next: Vec<(RadialTerm, RadialFunction)> = Vec::new();
        for (la, ra) in &acc {
            for (lb, rb) in &parts {
                let left = RadialTerm::new(1.0, la.exponent + lb.exponent, la.logpow + lb.logpow, ShellRange::ALL);
                let right = ra.mul(rb);
                match next.iter_mut().find(|(l, _)| same_monomial(l, &left)) {
                    Some((_, r)) => *r = r.add(&right),
                    None => next.push((left, right)),
                }
            }
        }
        acc = next;
    }
    let sphere = -(-(kernel.dim as f64) * p.as_f64().ln()).exp_m1();
    let mut terms = Vec::new();
    for (left, right) in acc {
        let integrand = kernel.phi.mul(&right);
        if integrand.is_zero() {
            continue;
        }
        match shell_sum(&integrand) {
            Ok(SeriesSum::Finite(c)) => {
                terms.push(RadialTerm::new(c * sphere, left.exponent, left.logpow, ShellRange::ALL))
            }
            Ok(SeriesSum::PosInfinite) | Err(Error::NonIntegrable(_)) => return Ok(RadialOutput::everywhere(p)),
            Err(e) => return Err(e),
        }
    }
    Ok(RadialOutput::exact(RadialFunction::new(p, terms)))
}

/// Shell-by-shell evaluation on `window`, each shell an exact series.
fn synthesize_window(
    kernel: &KernelSpec,
    slopes: &[(i64, i64)],
    slots: &[Slot<f64>],
    window: ShellRange,
) -> Result<RadialOutput> {
    let p = kernel.phi.prime();
    let (Some(lo), Some(hi)) = (window.lo, window.hi) else {
        return Err(Error::InvalidParameter("output window must be finite".into()));
    };
    let sphere = -(-(kernel.dim as f64) * p.as_f64().ln()).exp_m1();
    let mut terms = Vec::new();
    let mut divergent = Vec::new();
    for v in lo..=hi {
        let mut integrand = kernel.phi.clone();
        for (slot, &(m, d)) in slots.iter().zip(slopes) {
            if integrand.is_zero() {
                break;
            }
            integrand = integrand.mul(&slot.in_g(m, d, v));
        }
        match shell_sum(&integrand) {
            Ok(SeriesSum::Finite(c)) => {
                if c != 0.0 {
                    terms.push(RadialTerm::new(c * sphere, 0.0, 0, ShellRange::single(v)));
                }
            }
            Ok(SeriesSum::PosInfinite) | Err(Error::NonIntegrable(_)) => divergent.push(v),
            Err(e) => return Err(e),
        }
    }
    let divergence = if divergent.is_empty() { Divergence::None } else { Divergence::Shells(divergent) };
    Ok(RadialOutput { function: RadialFunction::new(p, terms), valid: window, divergence, exact: false })
}

fn default_window() -> ShellRange {
    ShellRange::finite(-DEFAULT_OUTPUT_HALF_WIDTH, DEFAULT_OUTPUT_HALF_WIDTH)
}

fn apply(
    kernel: &KernelSpec,
    families: &[MatrixFamily],
    fs: &[RadialFunction],
    bs: Option<&[RadialFunction]>,
    window: Option<ShellRange>,
) -> Result<OperatorResult> {
    check_arity(families, fs.len(), bs.map(<[_]>::len))?;
    let all: Vec<&RadialFunction> = fs.iter().chain(bs.into_iter().flatten()).collect();
    check_primes(kernel, &all)?;
    let Some(slopes) = scalar_slopes(families) else {
        return Ok(OperatorResult::Pointwise(PointwiseOperator::new(
            kernel.clone(),
            families.to_vec(),
            fs.to_vec(),
            bs.map(<[_]>::to_vec),
        )?));
    };
    let slots: Vec<Slot<f64>> = match bs {
        None => fs.iter().map(|f| Slot::new(f, None)).collect(),
        Some(bs) => fs.iter().zip(bs).map(|(f, b)| Slot::new(f, Some(b))).collect(),
    };
    let out = if kernel.has_finite_support() {
        RadialOutput::exact(synthesize_finite(kernel, &slopes, &slots))
    } else if slots.iter().all(Slot::full_range) {
        synthesize_separable(kernel, &slopes, &slots)?
    } else {
        synthesize_window(kernel, &slopes, &slots, window.unwrap_or_else(default_window))?
    };
    Ok(OperatorResult::Radial(out))
}

/// `H(f)(x) = int Phi(y) |y|^-n prod_i f_i(A_i(y) x) dy`.
///
/// Scalar-radial families give a radial result: exact everywhere when `Phi`
/// has finite support or all data are unrestricted power-log sums, otherwise
/// evaluated shell by shell on `window` (default `[-48, 48]`). Other families
/// give a Monte Carlo evaluator.
pub fn hausdorff_apply(
    kernel: &KernelSpec,
    families: &[MatrixFamily],
    fs: &[RadialFunction],
    window: Option<ShellRange>,
) -> Result<OperatorResult> {
    apply(kernel, families, fs, None, window)
}

/// The commutator: `H` with `prod_i (b_i(x) - b_i(A_i(y) x))` inserted.
pub fn commutator_apply(
    kernel: &KernelSpec,
    families: &[MatrixFamily],
    bs: &[RadialFunction],
    fs: &[RadialFunction],
    window: Option<ShellRange>,
) -> Result<OperatorResult> {
    apply(kernel, families, fs, Some(bs), window)
}

/// `hausdorff_apply` for a finitely supported kernel and scalar-radial
/// families, in any shell arithmetic (exact for rational data).
pub fn hausdorff_apply_finite<S: ShellScalar>(
    kernel: &KernelSpec<S>,
    families: &[MatrixFamily],
    fs: &[RadialFunction<S>],
) -> Result<RadialFunction<S>> {
    finite_generic(kernel, families, fs, None)
}

/// `commutator_apply` counterpart of `hausdorff_apply_finite`.
pub fn commutator_apply_finite<S: ShellScalar>(
    kernel: &KernelSpec<S>,
    families: &[MatrixFamily],
    bs: &[RadialFunction<S>],
    fs: &[RadialFunction<S>],
) -> Result<RadialFunction<S>> {
    finite_generic(kernel, families, fs, Some(bs))
}

fn finite_generic<S: ShellScalar>(
    kernel: &KernelSpec<S>,
    families: &[MatrixFamily],
    fs: &[RadialFunction<S>],
    bs: Option<&[RadialFunction<S>]>,
) -> Result<RadialFunction<S>> {
    check_arity(families, fs.len(), bs.map(<[_]>::len))?;
    let all: Vec<&RadialFunction<S>> = fs.iter().chain(bs.into_iter().flatten()).collect();
    check_primes(kernel, &all)?;
    if !kernel.has_finite_support() {
        return Err(Error::Unsupported("kernel must have finite support".into()));
    }
    let slopes = scalar_slopes(families)
        .ok_or_else(|| Error::Unsupported("exact evaluation needs scalar-radial families".into()))?;
    let slots: Vec<Slot<S>> = match bs {
        None => fs.iter().map(|f| Slot::new(f, None)).collect(),
        Some(bs) => fs.iter().zip(bs).map(|(f, b)| Slot::new(f, Some(b))).collect(),
    };
    Ok(synthesize_finite(kernel, &slopes, &slots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Prime;
    use crate::radial::ExactRadialFunction;
    use num_rational::BigRational;

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    fn radial(res: OperatorResult) -> RadialOutput {
        res.into_radial().unwrap()
    }

    #[test]
    fn single_shell_kernel() {
        let p = p2();
        let k = KernelSpec::new(RadialFunction::indicator(p, ShellRange::single(0)), 1).unwrap();
        let f = RadialFunction::ball_indicator(p, 0);
        let h = radial(hausdorff_apply(&k, &[MatrixFamily::scalar_radial(1, 0)], &[f.clone()], None).unwrap());
        assert!(h.exact);
        for v in -5..5 {
            assert_eq!(h.function.value(v), if v <= 0 { 0.5 } else { 0.0 });
        }
        let k = KernelSpec::new(RadialFunction::indicator(p, ShellRange::single(-1)), 1).unwrap();
        let h = radial(hausdorff_apply(&k, &[MatrixFamily::scalar_radial(1, 0)], &[f], None).unwrap());
        assert_eq!(h.function.value(1), 0.5);
    }

    #[test]
    fn commutator_of_log_symbol() {
        let p = p2();
        let k = KernelSpec::new(RadialFunction::indicator(p, ShellRange::single(1)), 1).unwrap();
        let out = commutator_apply(
            &k,
            &[MatrixFamily::scalar_radial(1, 0)],
            &[RadialFunction::log(p)],
            &[RadialFunction::constant(p, 1.0)],
            None,
        )
        .unwrap();
        let h = radial(out);
        for v in -6..6 {
            assert!((h.function.value(v) + 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn commutator_kills_constant_symbols() {
        let p = Prime::new(3).unwrap();
        let k = KernelSpec::new(RadialFunction::power_on(p, -0.5, ShellRange::finite(-3, 4)), 2).unwrap();
        let fam = [MatrixFamily::scalar_radial(1, 1), MatrixFamily::scalar_radial(-2, 0)];
        let fs = [RadialFunction::power(p, 0.3), RadialFunction::ball_indicator(p, 2)];
        let bs = [RadialFunction::constant(p, 2.0), RadialFunction::constant(p, -1.0)];
        let h = radial(commutator_apply(&k, &fam, &bs, &fs, None).unwrap());
        for v in -10..10 {
            assert!(h.function.value(v).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_path_matches_window_path() {
        let p = Prime::new(3).unwrap();
        let phi = RadialFunction::power_on(p, -1.0, ShellRange::at_least(0));
        let k = KernelSpec::new(phi, 1).unwrap();
        let fam = [MatrixFamily::scalar_radial(1, 0)];
        let f = RadialFunction::power(p, -0.4);
        let b = RadialFunction::log(p);
        let sep = radial(commutator_apply(&k, &fam, &[b.clone()], &[f.clone()], None).unwrap());
        assert!(sep.exact);
        let slots = [Slot::new(&f, Some(&b))];
        let win = synthesize_window(&k, &[(1, 0)], &slots, ShellRange::finite(-5, 5)).unwrap();
        for v in -5..=5 {
            let (a, c) = (sep.function.value(v), win.function.value(v));
            assert!((a - c).abs() <= 1e-12 * a.abs().max(1.0), "{v}: {a} {c}");
        }
    }

    #[test]
    fn divergent_kernel_is_flagged() {
        let p = p2();
        let k = KernelSpec::new(RadialFunction::power_on(p, 1.0, ShellRange::at_least(0)), 1).unwrap();
        let h = radial(
            hausdorff_apply(&k, &[MatrixFamily::scalar_radial(0, 0)], &[RadialFunction::power(p, 1.0)], None).unwrap(),
        );
        assert_eq!(h.divergence, Divergence::Everywhere);
    }

    #[test]
    fn negative_kernels_are_rejected() {
        let p = p2();
        assert!(KernelSpec::new(RadialFunction::<f64>::log(p), 1).is_err());
        assert!(KernelSpec::new(RadialFunction::constant(p, -1.0).restrict(ShellRange::single(3)), 1).is_err());
    }

    #[test]
    fn exact_arithmetic_path() {
        let p = p2();
        let half = BigRational::new(1.into(), 2.into());
        let phi: ExactRadialFunction = RadialFunction::indicator(p, ShellRange::finite(-1, 1));
        let k = KernelSpec::new(phi, 1).unwrap();
        let f: ExactRadialFunction = RadialFunction::power(p, -1);
        let h = hausdorff_apply_finite(&k, &[MatrixFamily::scalar_radial(1, 0)], &[f]).unwrap();
        // (1/2) sum_{g=-1..1} 2^{-(g+v)} = (1/2)(2 + 1 + 1/2) 2^{-v}
        let expect = half.clone() * BigRational::new(7.into(), 2.into());
        assert_eq!(h.value(0), expect);
        assert_eq!(h.value(1), expect * half);
    }
}
