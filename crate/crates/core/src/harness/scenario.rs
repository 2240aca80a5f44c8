//! Scenarios: one operator, its function spaces and the constant under test.
//!
//! Scenarios are read from JSON. Radial functions are written as term lists
//! `[{"coeff": c, "exponent": e, "logpow": k, "lo": a, "hi": b}]`, matrix
//! families as `{"scalar_radial": {"slope": m, "offset": d}}` or
//! `{"constant": [["1", "1/2"], ["0", "3"]]}`.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::ConstantId;
use crate::error::{Error, Result};
use crate::family::MatrixFamily;
use crate::operators::KernelSpec;
use crate::padic::{PAdicMatrix, Prime};
use crate::radial::{RadialFunction, RadialTerm, ShellRange};

/// Seed used when a scenario file names none.
pub const DEFAULT_SEED: u64 = 20_240_501;
/// Half-width of the default shell window.
pub const DEFAULT_WINDOW: i64 = 48;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Exponents and indices of the function spaces.
///
/// Unused fields stay empty; each constant reads only what its theorem needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpaceParams {
    pub q: Option<f64>,
    pub q_i: Vec<f64>,
    pub alpha: Option<f64>,
    pub alpha_i: Vec<f64>,
    pub lambda: Option<f64>,
    pub lambda_i: Vec<f64>,
    pub r_i: Vec<f64>,
    pub r_star_i: Vec<f64>,
    pub q_star_i: Vec<f64>,
    pub q_star: Option<f64>,
    pub zeta: Option<f64>,
    pub delta: Option<f64>,
}

/// What a scenario run does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Evaluate the constant only.
    Constant,
    /// Compare both sides of the boundedness inequality.
    #[default]
    Bound,
    /// Norm ratios along the extremal family.
    Ratio,
}

/// Run options carried by a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunOptions {
    pub check: Check,
    pub window: i64,
    pub tol: f64,
    pub seed: u64,
    pub rs: Vec<u32>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            check: Check::Bound,
            window: DEFAULT_WINDOW,
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            rs: (1..=8).collect(),
        }
    }
}

impl RunOptions {
    pub fn shell_window(&self) -> ShellRange {
        ShellRange::finite(-self.window, self.window)
    }
}

/// A fully built scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub prime: Prime,
    pub dim: u32,
    pub kernel: KernelSpec,
    pub families: Vec<MatrixFamily>,
    pub params: SpaceParams,
    /// Symbols `b_i` of the commutator; empty for plain operators.
    pub symbols: Vec<RadialFunction>,
    /// Inputs `f_i`; empty means the extremal family is used.
    pub inputs: Vec<RadialFunction>,
    pub target: ConstantId,
    pub options: RunOptions,
}

impl Scenario {
    pub fn m(&self) -> usize {
        self.families.len()
    }

    /// Parses and validates a scenario; the target's hypotheses are checked.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("scenario: {e}")))?;
        let s = file.build()?;
        s.check()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        Scenario::from_json(&text).map_err(|e| match e {
            Error::InvalidParameter(m) => Error::InvalidParameter(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Runs the hypothesis gate of the target constant.
    pub fn check(&self) -> Result<()> {
        super::constants::resolve(self.target, self).map(|_| ())
    }

    pub fn to_file(&self) -> Result<ScenarioFile> {
        let families = self
            .families
            .iter()
            .map(|f| match f {
                MatrixFamily::ScalarRadial { slope, offset } => {
                    Ok(FamilySpec::ScalarRadial { slope: *slope, offset: *offset })
                }
                MatrixFamily::Constant(a) => {
                    let rows =
                        (0..a.dim()).map(|i| (0..a.dim()).map(|j| a.entry(i, j).to_string()).collect()).collect();
                    Ok(FamilySpec::Constant(rows))
                }
                MatrixFamily::Pointwise(_) => Err(Error::Unsupported("pointwise families cannot be serialized".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScenarioFile {
            id: self.id.clone(),
            prime: self.prime.get(),
            dim: self.dim,
            target: self.target,
            kernel: terms_of(self.kernel.phi()),
            families,
            params: self.params.clone(),
            symbols: self.symbols.iter().map(terms_of).collect(),
            inputs: self.inputs.iter().map(terms_of).collect(),
            options: self.options.clone(),
        })
    }
}

/// One term of a serialized radial function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: f64,
    #[serde(default)]
    pub exponent: f64,
    #[serde(default)]
    pub logpow: u32,
    #[serde(default)]
    pub lo: Option<i64>,
    #[serde(default)]
    pub hi: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    ScalarRadial {
        slope: i64,
        offset: i64,
    },
    /// Rows of rational entries such as `"3/4"`.
    Constant(Vec<Vec<String>>),
}

/// The on-disk form of a [`Scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub id: String,
    pub prime: u64,
    pub dim: u32,
    pub target: ConstantId,
    pub kernel: Vec<TermSpec>,
    pub families: Vec<FamilySpec>,
    #[serde(default)]
    pub params: SpaceParams,
    #[serde(default)]
    pub symbols: Vec<Vec<TermSpec>>,
    #[serde(default)]
    pub inputs: Vec<Vec<TermSpec>>,
    #[serde(default)]
    pub options: RunOptions,
}

fn radial_of(p: Prime, terms: &[TermSpec]) -> Result<RadialFunction> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if !t.coeff.is_finite() || !t.exponent.is_finite() {
            return Err(Error::InvalidParameter("radial term with non-finite coefficient or exponent".into()));
        }
        out.push(RadialTerm::new(t.coeff, t.exponent, t.logpow, ShellRange::new(t.lo, t.hi)));
    }
    Ok(RadialFunction::new(p, out))
}

fn terms_of(f: &RadialFunction) -> Vec<TermSpec> {
    f.terms()
        .iter()
        .map(|t| TermSpec { coeff: t.coeff, exponent: t.exponent, logpow: t.logpow, lo: t.range.lo, hi: t.range.hi })
        .collect()
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("matrix entry {s:?} is not a rational"));
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl ScenarioFile {
    pub fn build(&self) -> Result<Scenario> {
        let p = Prime::new(self.prime)?;
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dim must be positive".into()));
        }
        if self.families.is_empty() {
            return Err(Error::InvalidParameter("at least one matrix family is required".into()));
        }
        let families = self
            .families
            .iter()
            .map(|f| match f {
                FamilySpec::ScalarRadial { slope, offset } => Ok(MatrixFamily::scalar_radial(*slope, *offset)),
                FamilySpec::Constant(rows) => {
                    let rows = rows
                        .iter()
                        .map(|r| r.iter().map(|e| parse_rational(e)).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()?;
                    let a = PAdicMatrix::from_rows(rows, p)?;
                    if a.dim() != self.dim as usize {
                        return Err(Error::DimensionMismatch { expected: self.dim as usize, actual: a.dim() });
                    }
                    MatrixFamily::constant(a)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let kernel = KernelSpec::new(radial_of(p, &self.kernel)?, self.dim)?;
        let symbols = self.symbols.iter().map(|t| radial_of(p, t)).collect::<Result<Vec<_>>>()?;
        let inputs = self.inputs.iter().map(|t| radial_of(p, t)).collect::<Result<Vec<_>>>()?;
        let m = families.len();
        if !symbols.is_empty() && symbols.len() != m {
            return Err(Error::InvalidParameter(format!("expected {m} symbols, got {}", symbols.len())));
        }
        if !inputs.is_empty() && inputs.len() != m {
            return Err(Error::InvalidParameter(format!("expected {m} inputs, got {}", inputs.len())));
        }
        if self.options.window <= 0 || !(self.options.tol > 0.0) {
            return Err(Error::InvalidParameter("window and tol must be positive".into()));
        }
        Ok(Scenario {
            id: self.id.clone(),
            prime: p,
            dim: self.dim,
            kernel,
            families,
            params: self.params.clone(),
            symbols,
            inputs,
            target: self.target,
            options: self.options.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C1: &str = r#"{
        "id": "c1-single", "prime": 2, "dim": 1, "target": "C1",
        "kernel": [{"coeff": 1.0, "lo": 0, "hi": 0}],
        "families": [{"scalar_radial": {"slope": 1, "offset": 0}}],
        "params": {"q": 2, "q_i": [2], "alpha": 0, "alpha_i": [0]}
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let s = Scenario::from_json(C1).unwrap();
        assert_eq!(s.m(), 1);
        assert_eq!(s.options, RunOptions::default());
        let file = s.to_file().unwrap();
        let again = serde_json::to_string(&file).unwrap();
        let back: ScenarioFile = serde_json::from_str(&again).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn unknown_and_missing_keys_are_rejected() {
        let extra = C1.replacen("\"dim\": 1", "\"dim\": 1, \"bogus\": 3", 1);
        assert!(Scenario::from_json(&extra).unwrap_err().to_string().contains("bogus"));
        let missing = C1.replacen("\"prime\": 2,", "", 1);
        assert!(Scenario::from_json(&missing).unwrap_err().to_string().contains("prime"));
    }

    #[test]
    fn constant_matrices_parse() {
        let text = C1.replace("\"dim\": 1", "\"dim\": 2").replace(
            "{\"scalar_radial\": {\"slope\": 1, \"offset\": 0}}",
            "{\"constant\": [[\"1\", \"1/2\"], [\"0\", \"3\"]]}",
        );
        let s = Scenario::from_json(&text).unwrap();
        assert!(matches!(s.families[0], MatrixFamily::Constant(_)));
        let singular = text.replace("\"3\"", "\"0\"");
        assert_eq!(Scenario::from_json(&singular).unwrap_err(), Error::SingularMatrix);
    }
}
