use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use padic_hausdorff::harness::suites::ClassCheck;
use padic_hausdorff::harness::{BoundRecord, RatioReport, RatioVerdict};
use padic_hausdorff::{Error, ExtendedValue};

pub const CSV_HEADER: [&str; 6] = ["scenario_id", "constant_id", "target", "ratio_at_max_r", "slack", "verdict"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Divergent,
    Skipped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Divergent => "divergent",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub scenario_id: String,
    pub constant_id: String,
    pub check: String,
    pub target: ExtendedValue,
    pub ratio_at_max_r: ExtendedValue,
    pub slack: ExtendedValue,
    pub constant: Option<ExtendedValue>,
    pub lhs: Option<ExtendedValue>,
    pub rhs: Option<ExtendedValue>,
    pub rs: Vec<u32>,
    pub ratios: Vec<ExtendedValue>,
    /// Outcome of the hypothesis gate, or the reason the row was skipped.
    pub hypotheses: String,
    pub verdict: Verdict,
    pub runtime_s: f64,
}

impl Row {
    fn base(scenario_id: &str, constant_id: String, check: &str) -> Row {
        Row {
            scenario_id: scenario_id.to_string(),
            constant_id,
            check: check.to_string(),
            target: ExtendedValue::ZERO,
            ratio_at_max_r: ExtendedValue::ZERO,
            slack: ExtendedValue::ZERO,
            constant: None,
            lhs: None,
            rhs: None,
            rs: Vec::new(),
            ratios: Vec::new(),
            hypotheses: "ok".into(),
            verdict: Verdict::Skipped,
            runtime_s: 0.0,
        }
    }

    pub fn constant(scenario_id: &str, id: &str, value: ExtendedValue) -> Row {
        let mut row = Row::base(scenario_id, id.to_string(), "constant");
        row.target = value;
        row.ratio_at_max_r = value;
        row.slack = ExtendedValue::Finite(1.0);
        row.constant = Some(value);
        row.verdict = if value.is_finite() { Verdict::Pass } else { Verdict::Divergent };
        row
    }

    /// The observed ratio is `constant / slack`, which is `||H f|| / prod ||f_i||`
    /// whenever the right side is the constant times the input norms.
    pub fn bound(scenario_id: &str, rec: &BoundRecord) -> Row {
        let mut row = Row::base(scenario_id, rec.id.to_string(), "bound");
        row.target = rec.constant;
        row.ratio_at_max_r = match (rec.constant, rec.slack) {
            (ExtendedValue::Infinite, _) | (_, ExtendedValue::Finite(0.0)) => ExtendedValue::Infinite,
            (ExtendedValue::Finite(_), ExtendedValue::Infinite) => ExtendedValue::ZERO,
            (ExtendedValue::Finite(c), ExtendedValue::Finite(s)) => ExtendedValue::Finite(c / s),
        };
        row.slack = rec.slack;
        row.constant = Some(rec.constant);
        row.lhs = Some(rec.lhs);
        row.rhs = Some(rec.rhs);
        row.verdict = if rec.constant.is_divergent() {
            Verdict::Divergent
        } else if rec.holds {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        row
    }

    pub fn ratio(scenario_id: &str, rep: &RatioReport) -> Row {
        let mut row = Row::base(scenario_id, rep.id.to_string(), "ratio");
        let last = rep.last_ratio().unwrap_or(ExtendedValue::ZERO);
        row.target = rep.target;
        row.ratio_at_max_r = last;
        row.slack = divide(rep.target, last);
        row.constant = Some(rep.target);
        row.rs = rep.rs.clone();
        row.ratios = rep.ratios.clone();
        row.verdict = match rep.verdict {
            RatioVerdict::Converged => Verdict::Pass,
            RatioVerdict::NotConverged => Verdict::Fail,
            RatioVerdict::Unbounded => Verdict::Divergent,
        };
        row
    }

    /// Power-weight membership: target and ratio columns hold the class
    /// constant on the narrow and the wide window.
    pub fn class(scenario_id: &str, l: f64, c: &ClassCheck) -> Row {
        let name = if l == 1.0 { "A1".to_string() } else { format!("A{l}") };
        let mut row = Row::base(scenario_id, name, "class");
        row.target = c.narrow;
        row.ratio_at_max_r = c.wide;
        row.slack = divide(c.wide, c.narrow);
        row.hypotheses = format!("expected {}", if c.expected { "member" } else { "non-member" });
        let ok = if c.expected { c.observed } else { c.blows_up };
        row.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        row
    }

    pub fn skipped(scenario_id: &str, id: &str, check: &str, why: &Error) -> Row {
        let mut row = Row::base(scenario_id, id.to_string(), check);
        row.hypotheses = why.to_string();
        row
    }
}

fn divide(a: ExtendedValue, b: ExtendedValue) -> ExtendedValue {
    match (a, b) {
        (ExtendedValue::Infinite, _) => ExtendedValue::Infinite,
        (_, ExtendedValue::Infinite) => ExtendedValue::ZERO,
        (ExtendedValue::Finite(x), ExtendedValue::Finite(y)) if y == 0.0 => {
            if x == 0.0 {
                ExtendedValue::Finite(1.0)
            } else {
                ExtendedValue::Infinite
            }
        }
        (ExtendedValue::Finite(x), ExtendedValue::Finite(y)) => ExtendedValue::Finite(x / y),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| a.scenario_id.cmp(&b.scenario_id).then_with(|| a.constant_id.cmp(&b.constant_id)));
    }

    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == Verdict::Fail)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.rows.iter().filter(|r| r.verdict == v).count()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.scenario_id.as_str(),
                r.constant_id.as_str(),
                &num(r.target),
                &num(r.ratio_at_max_r),
                &num(r.slack),
                r.verdict.as_str(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Fifteen significant digits, never in exponent notation; `+inf` is `inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() && x > 0.0 {
        return "inf".into();
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("round trip");
    format!("{rounded}")
}

pub fn num(v: ExtendedValue) -> String {
    fmt_f64(v.to_f64())
}

/// Writes through a sibling temporary file so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
