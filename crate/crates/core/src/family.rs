//! Matrix families `y -> A(y)` acting inside the Hausdorff integrand.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::padic::{valuation, PAdicMatrix, PAdicVector, Prime};
use crate::radial::sampling::{sample_sphere, shell_rng};
use crate::radial::ShellRange;

/// An integer-valued affine function `g -> slope * g + offset` of the shell index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Affine {
    pub slope: i64,
    pub offset: i64,
}

impl Affine {
    pub const fn new(slope: i64, offset: i64) -> Self {
        Affine { slope, offset }
    }

    pub const fn constant(c: i64) -> Self {
        Affine { slope: 0, offset: c }
    }

    pub fn at(&self, g: i64) -> i64 {
        self.slope * g + self.offset
    }

    pub fn scale(&self, k: i64) -> Self {
        Affine { slope: self.slope * k, offset: self.offset * k }
    }

    /// Shells where the value is `<= 0`.
    pub fn nonpositive(&self) -> ShellRange {
        ShellRange::at_most(0).preimage_affine(self.slope, self.offset)
    }

    /// Shells where the value is `> 0`.
    pub fn positive(&self) -> ShellRange {
        ShellRange::at_least(1).preimage_affine(self.slope, self.offset)
    }
}

/// Shell-wise norm data of a family, as exponents of `p`.
///
/// For `y` on shell `g`: `||A(y)|| = p^log_norm(g)`, `||A(y)^-1|| = p^log_inv_norm(g)`
/// and `|det A(y)^-1| = p^log_det_inv(g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormProfile {
    pub log_norm: Affine,
    pub log_inv_norm: Affine,
    pub log_det_inv: Affine,
}

type Evaluator = dyn Fn(&PAdicVector) -> Result<PAdicMatrix> + Send + Sync;

/// A matrix family given only through evaluation at points.
#[derive(Clone)]
pub struct PointwiseFamily {
    label: String,
    eval: Arc<Evaluator>,
}

impl PointwiseFamily {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&PAdicVector) -> Result<PAdicMatrix> + Send + Sync + 'static,
    {
        PointwiseFamily { label: label.into(), eval: Arc::new(eval) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, y: &PAdicVector) -> Result<PAdicMatrix> {
        (self.eval)(y)
    }
}

impl fmt::Debug for PointwiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointwiseFamily({})", self.label)
    }
}

/// The matrices `A_i(y)` of a Hausdorff operator.
#[derive(Debug, Clone)]
pub enum MatrixFamily {
    /// `A(y) = s(y) I` with `|s(y)|_p = p^(slope * g + offset)` for `y` in `S_g`.
    ScalarRadial { slope: i64, offset: i64 },
    /// The same invertible matrix for every `y`.
    Constant(PAdicMatrix),
    /// An arbitrary family known only pointwise.
    Pointwise(PointwiseFamily),
}

impl MatrixFamily {
    pub fn scalar_radial(slope: i64, offset: i64) -> Self {
        MatrixFamily::ScalarRadial { slope, offset }
    }

    pub fn constant(a: PAdicMatrix) -> Result<Self> {
        a.inverse()?;
        Ok(MatrixFamily::Constant(a))
    }

    /// The scalar-radial family `s(y) = p^-(slope g + offset)`, seen only
    /// through pointwise evaluation.
    pub fn scalar_radial_pointwise(slope: i64, offset: i64, p: Prime, dim: usize) -> Self {
        let fam = PointwiseFamily::new(format!("scalar({slope},{offset})"), move |y| {
            let g = y.shell().ok_or(Error::SingularMatrix)?;
            let s = p.pow_rational(-(slope * g + offset));
            Ok(PAdicMatrix::scalar(dim, s, p))
        });
        MatrixFamily::Pointwise(fam)
    }

    pub fn is_scalar_radial(&self) -> bool {
        matches!(self, MatrixFamily::ScalarRadial { .. })
    }

    /// Shell-wise norm exponents; `None` for pointwise families.
    pub fn norm_profile(&self, n: u32) -> Result<Option<NormProfile>> {
        match self {
            MatrixFamily::ScalarRadial { slope, offset } => {
                let k = Affine::new(*slope, *offset);
                Ok(Some(NormProfile { log_norm: k, log_inv_norm: k.scale(-1), log_det_inv: k.scale(-(n as i64)) }))
            }
            MatrixFamily::Constant(a) => {
                if a.dim() != n as usize {
                    return Err(Error::DimensionMismatch { expected: n as usize, actual: a.dim() });
                }
                let inv = a.inverse()?;
                let det = a.det();
                let v = valuation(&det, a.prime()).ok_or(Error::SingularMatrix)?;
                Ok(Some(NormProfile {
                    log_norm: Affine::constant(a.log_norm()?),
                    log_inv_norm: Affine::constant(inv.log_norm()?),
                    // |det^-1| = p^{v(det)}
                    log_det_inv: Affine::constant(v),
                }))
            }
            MatrixFamily::Pointwise(_) => Ok(None),
        }
    }

    /// `A(y)` at a point.
    pub fn matrix_at(&self, y: &PAdicVector) -> Result<PAdicMatrix> {
        match self {
            MatrixFamily::ScalarRadial { slope, offset } => {
                let p = y.prime();
                let g = y.shell().ok_or(Error::SingularMatrix)?;
                let s: BigRational = p.pow_rational(-(slope * g + offset));
                Ok(PAdicMatrix::scalar(y.dim(), s, p))
            }
            MatrixFamily::Constant(a) => Ok(a.clone()),
            MatrixFamily::Pointwise(f) => f.eval(y),
        }
    }
}

/// Points drawn per probe shell when a pointwise family is inspected.
const NU_SAMPLES: usize = 16;

fn sampled_max_log_condition(fam: &PointwiseFamily, p: Prime, n: usize, range: ShellRange, seed: u64) -> Result<i64> {
    let mut best = i64::MIN;
    for g in range.iter() {
        let mut rng: ChaCha8Rng = shell_rng(seed, g);
        for _ in 0..NU_SAMPLES {
            let y = sample_sphere(p, n, g, &mut rng);
            let a = fam.eval(&y)?;
            let c = a.log_norm()? + a.inverse()?.log_norm()?;
            best = best.max(c);
        }
    }
    Ok(best)
}

/// The smallest `nu >= 0` with `||A(y)|| ||A(y)^-1|| <= p^nu` for `y` on the
/// probed shells.
///
/// Exact for scalar-radial and constant families. Pointwise families are
/// sampled; if doubling the probe range raises the bound, no finite `nu` is
/// reported.
pub fn nu_of_family(fam: &MatrixFamily, p: Prime, n: usize, probe: ShellRange, seed: u64) -> Result<u32> {
    match fam {
        MatrixFamily::ScalarRadial { .. } => Ok(0),
        MatrixFamily::Constant(a) => {
            let c = a.log_norm()? + a.inverse()?.log_norm()?;
            Ok(c.max(0) as u32)
        }
        MatrixFamily::Pointwise(f) => {
            let (Some(lo), Some(hi)) = (probe.lo, probe.hi) else {
                return Err(Error::InvalidParameter("probe range must be finite".into()));
            };
            if lo > hi {
                return Err(Error::EmptyRange);
            }
            let inner = sampled_max_log_condition(f, p, n, probe, seed)?;
            let w = hi - lo + 1;
            let outer = sampled_max_log_condition(f, p, n, ShellRange::finite(lo - w, hi + w), seed)?;
            if outer > inner {
                return Err(Error::NoFiniteNu);
            }
            Ok(inner.max(0) as u32)
        }
    }
}

/// `nu` for a list of families: the largest individual value.
pub fn nu_of_families(fams: &[MatrixFamily], p: Prime, n: usize, probe: ShellRange, seed: u64) -> Result<u32> {
    fams.iter().try_fold(0, |acc, f| Ok(acc.max(nu_of_family(f, p, n, probe, seed)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    #[test]
    fn nu_values() {
        let p = p2();
        let probe = ShellRange::finite(-3, 3);
        assert_eq!(nu_of_family(&MatrixFamily::scalar_radial(2, -1), p, 2, probe, 0).unwrap(), 0);
        let upper = PAdicMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]], p).unwrap();
        assert_eq!(nu_of_family(&MatrixFamily::Constant(upper), p, 2, probe, 0).unwrap(), 0);
        let a = PAdicMatrix::from_i64_rows(&[vec![2, 1], vec![1, 1]], p).unwrap();
        assert_eq!(nu_of_family(&MatrixFamily::Constant(a), p, 2, probe, 0).unwrap(), 0);
        let d = PAdicMatrix::from_i64_rows(&[vec![1, 0], vec![0, 2]], p).unwrap();
        assert_eq!(nu_of_family(&MatrixFamily::Constant(d), p, 2, probe, 0).unwrap(), 1);
    }

    #[test]
    fn pointwise_scalar_family_has_nu_zero() {
        let p = p2();
        let fam = MatrixFamily::scalar_radial_pointwise(1, 0, p, 2);
        assert_eq!(nu_of_family(&fam, p, 2, ShellRange::finite(-2, 2), 3).unwrap(), 0);
    }

    #[test]
    fn unbounded_condition_is_detected() {
        let p = p2();
        // diag(1, p^g) on shell g: condition number p^|g|
        let fam = MatrixFamily::Pointwise(PointwiseFamily::new("diag", move |y: &PAdicVector| {
            let g = y.shell().unwrap();
            let rows = vec![
                vec![BigRational::from_integer(1.into()), BigRational::from_integer(0.into())],
                vec![BigRational::from_integer(0.into()), p.pow_rational(g)],
            ];
            PAdicMatrix::from_rows(rows, p)
        }));
        assert_eq!(nu_of_family(&fam, p, 2, ShellRange::finite(-2, 2), 1), Err(Error::NoFiniteNu));
    }

    #[test]
    fn profiles_match_matrices() {
        let p = Prime::new(3).unwrap();
        let fam = MatrixFamily::scalar_radial(2, 1);
        let prof = fam.norm_profile(2).unwrap().unwrap();
        let mut rng = shell_rng(5, 0);
        for g in -3..=3 {
            let y = sample_sphere(p, 2, g, &mut rng);
            let a = fam.matrix_at(&y).unwrap();
            assert_eq!(a.log_norm().unwrap(), prof.log_norm.at(g));
            assert_eq!(a.inverse().unwrap().log_norm().unwrap(), prof.log_inv_norm.at(g));
            let det_inv = a.inverse().unwrap().det();
            assert_eq!(-valuation(&det_inv, p).unwrap(), prof.log_det_inv.at(g));
        }
    }
}
