use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use padic_hausdorff::harness::suites::PowerWeightCase;
use padic_hausdorff::harness::{bundled_suite, compute_constant, ratio_study, verify_scenario, Check, Suite};
use padic_hausdorff::operators::maximal::maximal_pair;
use padic_hausdorff::weights::muckenhoupt::{
    a1_constant_power, ap_constant_power, critical_index_estimate, proposition_checks, rh_constant,
};
use padic_hausdorff::{
    commutator_apply, hausdorff_apply, operators::Divergence, ConstantId, Error, ExtendedValue, Prime, RadialFunction,
    RadialOutput, Scenario, ShellRange, Weight,
};

mod report;

use report::{fmt_f64, num, write_atomic, Report, Row, Verdict};

#[derive(Parser)]
#[command(name = "padic-hausdorff", version, about = "p-adic Hausdorff operator constants and bound checks")]
struct Cli {
    /// Half-width of the shell window (overrides the scenario)
    #[arg(long, global = true)]
    window: Option<i64>,
    /// Relative tolerance for bound and ratio checks (overrides the scenario)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Root seed for sampled quantities (overrides the scenario)
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an operator-norm constant
    Constant {
        file: PathBuf,
        /// Constant to evaluate; defaults to the scenario target
        #[arg(long)]
        id: Option<ConstantId>,
    },
    /// Run the checks of a scenario file, a directory of them, or a suite
    Verify {
        path: Option<PathBuf>,
        /// Bundled suite name, or a directory under PADIC_SUITE_DIR
        #[arg(long, conflicts_with = "path")]
        suite: Option<String>,
        #[arg(long, env = "PADIC_SUITE_DIR")]
        suite_dir: Option<PathBuf>,
        /// Directory receiving report.csv and report.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot-ready CSV: ratio traces, or a radial function shell by shell
    Plotdata {
        file: PathBuf,
        #[arg(long)]
        id: Option<ConstantId>,
        /// Dump a radial function instead of the ratio study
        #[arg(long, value_enum)]
        radial: Option<Dump>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A_l, A_1 and reverse Hölder constants of a power weight |x|^alpha
    Weights {
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        dim: u32,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        l: f64,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dump {
    /// The first input `f_1`
    Input,
    /// The operator (or commutator) applied to the inputs
    Operator,
    Maximal,
    MaximalMod,
}

enum Failure {
    Verification,
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Constant { file, id } => cmd_constant(&cli, file, *id),
        Command::Verify { path, suite, suite_dir, out } => {
            cmd_verify(&cli, path.as_deref(), suite.as_deref(), suite_dir.as_deref(), out.as_deref())
        }
        Command::Plotdata { file, id, radial, out } => cmd_plotdata(&cli, file, *id, *radial, out.as_deref()),
        Command::Weights { prime, dim, alpha, l, r, out } => {
            cmd_weights(&cli, *prime, *dim, *alpha, *l, *r, out.as_deref())
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load(cli: &Cli, path: &Path) -> Result<Scenario, Failure> {
    let mut s = Scenario::load(path)?;
    apply_overrides(cli, &mut s);
    Ok(s)
}

fn apply_overrides(cli: &Cli, s: &mut Scenario) {
    if let Some(w) = cli.window {
        s.options.window = w;
    }
    if let Some(t) = cli.tol {
        s.options.tol = t;
    }
    if let Some(seed) = cli.seed {
        s.options.seed = seed;
    }
}

fn cmd_constant(cli: &Cli, file: &Path, id: Option<ConstantId>) -> Result<(), Failure> {
    let s = load(cli, file)?;
    let id = id.unwrap_or(s.target);
    let c = compute_constant(id, &s)?;
    match cli.format {
        Format::Csv => match c.value {
            ExtendedValue::Finite(v) => println!("{id} {} (converged)", fmt_f64(v)),
            ExtendedValue::Infinite => println!("{id} +inf (divergent)"),
        },
        Format::Json => {
            let row = Row::constant(&s.id, &id.to_string(), c.value);
            print!("{}", serde_json::to_string_pretty(&row).expect("row serializes") + "\n");
        }
    }
    if c.value.is_divergent() {
        return Err(Failure::Verification);
    }
    Ok(())
}

fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Failure::Invalid(format!("{}: {e}", dir.display())))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn run_scenario(s: &Scenario) -> Result<Row, Failure> {
    let start = Instant::now();
    let id = s.target;
    let (check, res) = match s.options.check {
        Check::Constant => {
            ("constant", compute_constant(id, s).map(|c| Row::constant(&s.id, &id.to_string(), c.value)))
        }
        Check::Bound => ("bound", verify_scenario(s).map(|rec| Row::bound(&s.id, &rec))),
        Check::Ratio => ("ratio", ratio_study(id, s, &s.options.rs).map(|rep| Row::ratio(&s.id, &rep))),
    };
    let mut row = match res {
        Ok(row) => row,
        Err(e @ Error::Unsupported(_)) => Row::skipped(&s.id, &id.to_string(), check, &e),
        Err(e) => return Err(Failure::Invalid(format!("{}: {e}", s.id))),
    };
    row.runtime_s = start.elapsed().as_secs_f64();
    Ok(row)
}

fn run_class(case: &PowerWeightCase, wide: i64) -> Result<Row, Failure> {
    let start = Instant::now();
    let c = case.check(wide / 2, wide)?;
    let mut row = Row::class(&case.id, case.l, &c);
    row.runtime_s = start.elapsed().as_secs_f64();
    Ok(row)
}

fn cmd_verify(
    cli: &Cli,
    path: Option<&Path>,
    suite: Option<&str>,
    suite_dir: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let mut report = Report::default();
    let mut scenarios = Vec::new();
    let dir_suite = suite.zip(suite_dir).map(|(name, dir)| dir.join(name)).filter(|d| d.is_dir());
    let from_files = match (path, suite) {
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(_)) => dir_suite,
        (None, None) => return Err(Failure::Invalid("give a scenario file, a directory or --suite".into())),
    };
    match from_files {
        Some(p) if p.is_dir() => {
            for f in scenario_files(&p)? {
                scenarios.push(load(cli, &f)?);
            }
        }
        Some(p) => scenarios.push(load(cli, &p)?),
        None => match bundled_suite(suite.expect("suite name"))? {
            Suite::Scenarios(list) => {
                for mut s in list {
                    apply_overrides(cli, &mut s);
                    scenarios.push(s);
                }
            }
            Suite::PowerWeights(cases) => {
                let wide = cli.window.unwrap_or(40);
                for case in &cases {
                    report.rows.push(run_class(case, wide)?);
                }
            }
        },
    }
    for s in &scenarios {
        report.rows.push(run_scenario(s)?);
    }
    report.sort();

    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_atomic(&dir.join("report.csv"), &report.to_csv())?;
        write_atomic(&dir.join("report.json"), &report.to_json())?;
    }
    match cli.format {
        Format::Csv => print!("{}", report.to_csv()),
        Format::Json => print!("{}", report.to_json()),
    }
    eprintln!(
        "{} rows: {} pass, {} fail, {} divergent, {} skipped",
        report.rows.len(),
        report.count(Verdict::Pass),
        report.count(Verdict::Fail),
        report.count(Verdict::Divergent),
        report.count(Verdict::Skipped),
    );
    if report.failed() {
        return Err(Failure::Verification);
    }
    Ok(())
}

fn inputs(s: &Scenario, id: ConstantId) -> Result<Vec<RadialFunction>, Failure> {
    if !s.inputs.is_empty() {
        return Ok(s.inputs.clone());
    }
    let r = *s.options.rs.last().unwrap_or(&8);
    Ok(padic_hausdorff::harness::extremal_family(id, s, r)?.fs)
}

fn cmd_plotdata(
    cli: &Cli,
    file: &Path,
    id: Option<ConstantId>,
    radial: Option<Dump>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let s = load(cli, file)?;
    let id = id.unwrap_or(s.target);
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure::Invalid(e.to_string());
    match radial {
        None => {
            let rep = ratio_study(id, &s, &s.options.rs)?;
            w.write_record(["r", "ratio", "target"]).map_err(csv_err)?;
            for (r, ratio) in rep.rs.iter().zip(&rep.ratios) {
                w.write_record([r.to_string(), num(*ratio), num(rep.target)]).map_err(csv_err)?;
            }
        }
        Some(dump) => {
            let window = s.options.shell_window();
            let fs = inputs(&s, id)?;
            let output = match dump {
                Dump::Input => RadialOutput {
                    function: fs[0].clone(),
                    valid: ShellRange::ALL,
                    divergence: Divergence::None,
                    exact: true,
                },
                Dump::Operator if id.is_commutator() => {
                    let bs = if s.symbols.is_empty() {
                        vec![RadialFunction::log(s.prime); s.m()]
                    } else {
                        s.symbols.clone()
                    };
                    commutator_apply(&s.kernel, &s.families, &bs, &fs, Some(window))?.into_radial()?
                }
                Dump::Operator => hausdorff_apply(&s.kernel, &s.families, &fs, Some(window))?.into_radial()?,
                Dump::Maximal => maximal_pair(&fs[0], s.dim, window)?.0,
                Dump::MaximalMod => maximal_pair(&fs[0], s.dim, window)?.1,
            };
            w.write_record(["gamma", "value"]).map_err(csv_err)?;
            for g in window.iter() {
                if !output.valid.contains(g) {
                    continue;
                }
                let v = match output.value(g) {
                    Some(v) => fmt_f64(v),
                    None => "inf".into(),
                };
                w.write_record([g.to_string(), v]).map_err(csv_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Failure::Invalid(e.to_string()))?;
    emit(out, &String::from_utf8(bytes).expect("utf-8"))
}

#[derive(Serialize)]
struct WeightReport {
    prime: u64,
    dim: u32,
    alpha: f64,
    l: f64,
    r: f64,
    window: i64,
    a1: ExtendedValue,
    a_l: ExtendedValue,
    rh_r: ExtendedValue,
    critical_rh_index: f64,
    expected_a1: bool,
    expected_a_l: bool,
    inclusion_holds: Option<bool>,
    openness_eps: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
    averaging: Option<f64>,
}

fn cmd_weights(cli: &Cli, prime: u64, dim: u32, alpha: f64, l: f64, r: f64, out: Option<&Path>) -> Result<(), Failure> {
    let p = Prime::new(prime)?;
    let half = cli.window.unwrap_or(40);
    let window = ShellRange::finite(-half, half);
    let w = Weight::power(p, dim, alpha)?;
    let case = |l: f64| PowerWeightCase { id: String::new(), p, n: dim, alpha, l };
    let props = if l > 1.0 && r > 1.0 { Some(proposition_checks(&w, l, r, &[1, 2, 4], window)?) } else { None };
    let rep = WeightReport {
        prime,
        dim,
        alpha,
        l,
        r,
        window: half,
        a1: a1_constant_power(p, dim, alpha, window)?,
        a_l: ap_constant_power(p, dim, alpha, l, window)?,
        rh_r: rh_constant(&w, r, window)?,
        critical_rh_index: critical_index_estimate(&w, window, cli.tol.unwrap_or(1e-6))?,
        expected_a1: case(1.0).expected(),
        expected_a_l: case(l).expected(),
        inclusion_holds: props.as_ref().map(|p| p.inclusion_holds),
        openness_eps: props.as_ref().and_then(|p| p.openness_eps),
        c1: props.as_ref().map(|p| p.c1),
        c2: props.as_ref().map(|p| p.c2),
        averaging: props.as_ref().map(|p| p.averaging),
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&rep).expect("report serializes") + "\n",
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            let rows = [
                ("a1", num(rep.a1)),
                ("a_l", num(rep.a_l)),
                ("rh_r", num(rep.rh_r)),
                ("critical_rh_index", fmt_f64(rep.critical_rh_index)),
                ("expected_a1", rep.expected_a1.to_string()),
                ("expected_a_l", rep.expected_a_l.to_string()),
                ("inclusion_holds", rep.inclusion_holds.map(|b| b.to_string()).unwrap_or_default()),
                ("openness_eps", opt(rep.openness_eps)),
                ("c1", opt(rep.c1)),
                ("c2", opt(rep.c2)),
                ("averaging", opt(rep.averaging)),
            ];
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["quantity", "value"]).map_err(|e| Failure::Invalid(e.to_string()))?;
            for (k, v) in rows {
                w.write_record([k, v.as_str()]).map_err(|e| Failure::Invalid(e.to_string()))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Failure::Invalid(e.to_string()))?).expect("utf-8")
        }
    };
    emit(out, &text)
}
