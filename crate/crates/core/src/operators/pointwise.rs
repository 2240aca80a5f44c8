//! Monte Carlo evaluation of Hausdorff operators for families known only
//! pointwise.

use std::cell::RefCell;

use super::{KernelSpec, DEFAULT_OUTPUT_HALF_WIDTH};
use crate::error::{Error, Result};
use crate::family::MatrixFamily;
use crate::padic::PAdicVector;
use crate::radial::sampling::{integrate_mc, sample_sphere, shell_rng, McEstimate, McStrategy};
use crate::radial::{RadialFunction, ShellRange};
use crate::weights::Weight;

/// `x -> H(f)(x)` (or the commutator) evaluated by sampling `y`.
#[derive(Debug, Clone)]
pub struct PointwiseOperator {
    kernel: KernelSpec,
    families: Vec<MatrixFamily>,
    fs: Vec<RadialFunction>,
    bs: Option<Vec<RadialFunction>>,
    y_range: ShellRange,
}

impl PointwiseOperator {
    /// `y` is sampled on the kernel's support, truncated to
    /// `[-48, 48]` when the support is unbounded.
    pub fn new(
        kernel: KernelSpec,
        families: Vec<MatrixFamily>,
        fs: Vec<RadialFunction>,
        bs: Option<Vec<RadialFunction>>,
    ) -> Result<Self> {
        if families.len() != fs.len() || bs.as_ref().is_some_and(|b| b.len() != fs.len()) {
            return Err(Error::DimensionMismatch { expected: families.len(), actual: fs.len() });
        }
        let window = ShellRange::finite(-DEFAULT_OUTPUT_HALF_WIDTH, DEFAULT_OUTPUT_HALF_WIDTH);
        let y_range = match kernel.support() {
            Some(r) if r.is_finite() => r,
            Some(r) => r.intersect(&window),
            None => ShellRange::finite(0, -1),
        };
        Ok(PointwiseOperator { kernel, families, fs, bs, y_range })
    }

    pub fn y_range(&self) -> ShellRange {
        self.y_range
    }

    /// `Phi(y) |y|^-n prod_i f_i(A_i(y) x)`, with the commutator factors if any.
    pub fn integrand(&self, x: &PAdicVector, y: &PAdicVector) -> Result<f64> {
        let p = self.kernel.phi().prime();
        let n = self.kernel.dim() as usize;
        if x.dim() != n || y.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: x.dim().min(y.dim()) });
        }
        let vx = x.shell().ok_or_else(|| Error::InvalidParameter("x must be nonzero".into()))?;
        let Some(g) = y.shell() else { return Ok(0.0) };
        let phi = self.kernel.phi().value(g);
        if phi == 0.0 {
            return Ok(0.0);
        }
        let mut val = phi * p.powf(-(n as f64) * g as f64);
        for (i, fam) in self.families.iter().enumerate() {
            let ax = fam.matrix_at(y)?.mul_vec(x)?;
            let sh = ax.shell().ok_or(Error::SingularMatrix)?;
            let mut factor = self.fs[i].value(sh);
            if let Some(bs) = &self.bs {
                factor *= bs[i].value(vx) - bs[i].value(sh);
            }
            val *= factor;
            if val == 0.0 {
                break;
            }
        }
        Ok(val)
    }

    /// Monte Carlo estimate of the operator at `x`.
    pub fn estimate(&self, x: &PAdicVector, samples: usize, seed: u64, strategy: McStrategy) -> Result<McEstimate> {
        if self.y_range.is_empty() {
            return Ok(McEstimate { value: 0.0, std_error: 0.0, samples: 0 });
        }
        let p = self.kernel.phi().prime();
        let failure = RefCell::new(None);
        let est = integrate_mc(p, self.kernel.dim() as usize, self.y_range, samples, seed, strategy, |y| {
            self.integrand(x, y).unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e);
                0.0
            })
        })?;
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(est),
        }
    }

    /// Nested Monte Carlo estimate of `int_{x in x_range} |H f(x)|^q w(x) dx`:
    /// `outer` points per shell of `x_range`, each evaluated with `inner`
    /// samples of `y`. Biased by the inner error for `q != 1`.
    pub fn lq_power_mc(
        &self,
        w: &Weight,
        q: f64,
        x_range: ShellRange,
        outer: usize,
        inner: usize,
        seed: u64,
    ) -> Result<McEstimate> {
        let (Some(lo), Some(hi)) = (x_range.lo, x_range.hi) else {
            return Err(Error::InvalidParameter("x range must be finite".into()));
        };
        let p = self.kernel.phi().prime();
        let n = self.kernel.dim();
        let mut value = 0.0;
        let mut var = 0.0;
        for v in lo..=hi {
            let mut rng = shell_rng(seed ^ 0x9e37_79b9, v);
            let mass = w.shell_masses().value(v);
            let xs: Vec<f64> = (0..outer.max(2))
                .map(|k| {
                    let x = sample_sphere(p, n as usize, v, &mut rng);
                    self.estimate(&x, inner, seed.wrapping_add(k as u64), McStrategy::Stratified)
                        .map(|e| e.value.abs().powf(q))
                })
                .collect::<Result<_>>()?;
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            let s2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
            value += mass * m;
            var += mass * mass * s2 / xs.len() as f64;
        }
        Ok(McEstimate { value, std_error: var.sqrt(), samples: outer.max(2) * (hi - lo + 1).max(0) as usize })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{hausdorff_apply, OperatorResult};
    use crate::padic::{PAdicMatrix, Prime};

    #[test]
    fn pointwise_scalar_family_matches_exact() {
        let p = Prime::new(3).unwrap();
        let k = KernelSpec::new(RadialFunction::power_on(p, 0.5, ShellRange::finite(-2, 2)), 1).unwrap();
        let f = RadialFunction::power_on(p, -0.3, ShellRange::at_most(3));
        let exact = hausdorff_apply(&k, &[MatrixFamily::scalar_radial(1, 1)], &[f.clone()], None)
            .unwrap()
            .into_radial()
            .unwrap();
        let fam = MatrixFamily::scalar_radial_pointwise(1, 1, p, 1);
        let OperatorResult::Pointwise(op) = hausdorff_apply(&k, &[fam], &[f], None).unwrap() else {
            panic!("expected pointwise route");
        };
        let x = PAdicVector::from_i64s(&[9], p).unwrap();
        let est = op.estimate(&x, 2000, 7, McStrategy::Stratified).unwrap();
        let v = exact.function.value(-2);
        assert!((est.value - v).abs() < 1e-12 * v.abs().max(1.0), "{} {v}", est.value);
    }

    #[test]
    fn constant_matrix_is_a_dilation() {
        let p = Prime::new(2).unwrap();
        let k = KernelSpec::new(RadialFunction::indicator(p, ShellRange::single(0)), 2).unwrap();
        let a = PAdicMatrix::from_i64_rows(&[vec![2, 0], vec![0, 2]], p).unwrap();
        let fam = MatrixFamily::constant(a).unwrap();
        let f = RadialFunction::ball_indicator(p, 0);
        let OperatorResult::Pointwise(op) = hausdorff_apply(&k, &[fam], &[f], None).unwrap() else {
            panic!("expected pointwise route");
        };
        // |2x|_2 = |x|_2 / 2, so f(2x) = 1 iff |x| <= 2
        let inside = PAdicVector::from_i64s(&[1, 0], p).unwrap().scale(&p.pow_rational(-1));
        let est = op.estimate(&inside, 200, 1, McStrategy::Stratified).unwrap();
        assert!((est.value - 0.75).abs() < 1e-12);
    }
}
