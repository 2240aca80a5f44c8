//! Operator-norm constants, extremal inputs and bound verification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub mod constants;
pub mod extremal;
pub mod scenario;
pub mod suites;
pub mod verify;

pub use constants::{compute_constant, ConstantValue, Resolved};
pub use extremal::{extremal_family, Extremal};
pub use scenario::{Check, RunOptions, Scenario, ScenarioFile, SpaceParams};
pub use suites::{bundled_suite, envelope, suite_names, Suite};
pub use verify::{
    maximal_composite_check, ratio_study, verify_bound, verify_scenario, BoundRecord, RatioReport, RatioVerdict,
};

/// The constants of the boundedness theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstantId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    C10,
}

impl ConstantId {
    pub const ALL: [ConstantId; 10] = [
        ConstantId::C1,
        ConstantId::C2,
        ConstantId::C3,
        ConstantId::C4,
        ConstantId::C5,
        ConstantId::C6,
        ConstantId::C7,
        ConstantId::C8,
        ConstantId::C9,
        ConstantId::C10,
    ];

    /// Whether the bound involves commutator symbols.
    pub fn is_commutator(self) -> bool {
        matches!(
            self,
            ConstantId::C5 | ConstantId::C6 | ConstantId::C7 | ConstantId::C8 | ConstantId::C9 | ConstantId::C10
        )
    }

    /// Whether the theorem bounds Morrey norms.
    pub fn is_morrey(self) -> bool {
        matches!(self, ConstantId::C3 | ConstantId::C4 | ConstantId::C8 | ConstantId::C9 | ConstantId::C10)
    }
}

impl fmt::Display for ConstantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ConstantId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        ConstantId::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown constant {s:?}")))
    }
}
