//! Command-line front end. The binary only forwards its arguments to [`run`].

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::dynamics::{
    detect_periodicity, example3_system, monitor_thm5, simulate_linear, simulate_nonlinear,
    simulate_nonlinear_pair, Example3, Example3Spec, LinearTimeVaryingSystem, NonlinearSystem,
};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::minors::{multiplicative_compound, DEFAULT_ENUMERATION_LIMIT};
use crate::report::{Report, Status};
use crate::sign_regularity::{classify_with_limit, MinorTolerance};
use crate::spectral::{
    compound_spectrum_error, eigen, verify_compound_perron, verify_cor2, verify_cor3, verify_ssr_spectrum,
    verify_thm2, verify_thm3, VerifyOptions,
};
use crate::vdp::{check_cyclic_vdp, check_odd_vdp, check_order_k_vdp, check_tall_vdp, DEFAULT_SAMPLES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_SIZE: i32 = 3;
pub const EXIT_HYPOTHESIS: i32 = 4;
pub const EXIT_VIOLATION: i32 = 5;
pub const EXIT_DOMAIN: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "signreg", version, about = "Sign-regular matrices and totally positive discrete-time systems")]
pub struct Cli {
    /// RNG seed for sampled checks.
    #[arg(long, global = true, env = "SIGNREG_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Tolerance override, repeatable: minor, minor_abs, zero, residual, check, periodicity.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Thm2,
    Cor2,
    Ssr,
    Thm3,
    Cor3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    OrderK,
    Cyclic,
    Odd,
    Tall,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sign-regularity classes and spectrum of a matrix.
    Analyze {
        matrix: PathBuf,
        /// Largest dimension for which all minors are enumerated.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        size_limit: usize,
    },
    /// Check the spectral consequences of sign regularity.
    Verify {
        matrix: PathBuf,
        #[arg(long, value_enum)]
        theorem: Theorem,
        /// Order k (thm2) or middle index i (cor2).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Search for violations of a variation-diminishing property.
    Vdp {
        matrix: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Simulate a discrete-time system and test for periodicity.
    Simulate {
        /// `example3`, `example3_frozen`, or a JSON system file.
        #[arg(long, default_value = "example3")]
        system: String,
        /// Initial state, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
        /// Second initial state; annotates the difference of the solutions.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xbar0: Option<Vec<f64>>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Period tested for; defaults to the system's own period.
        #[arg(long)]
        period: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// Comparison window; defaults to twice the period.
        #[arg(long)]
        window: Option<usize>,
        /// Also write the trajectory CSV here.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Multiplicative compound of a matrix and its Perron vector.
    Compound {
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

/// Text written and the process exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::Parse { .. } => EXIT_INVALID,
        Error::SizeLimit { .. } => EXIT_SIZE,
        Error::HypothesisNotMet(_) | Error::SingularMatrix { .. } => EXIT_HYPOTHESIS,
        Error::DomainEscape { .. } => EXIT_DOMAIN,
        Error::NumericalFailure(_) | Error::HorizonExhausted { .. } => EXIT_NUMERICAL,
    }
}

fn report_code(status: Status) -> i32 {
    match status {
        Status::Pass | Status::Skipped => EXIT_OK,
        Status::Fail => EXIT_VIOLATION,
        Status::Unreliable => EXIT_NUMERICAL,
    }
}

/// Effective tolerances after applying `--tol` overrides.
#[derive(Clone, Debug, PartialEq)]
struct Tolerances {
    minor: MinorTolerance,
    zero: f64,
    residual: Option<f64>,
    check: f64,
    periodicity: f64,
}

impl Tolerances {
    fn parse(overrides: &[String]) -> Result<Self> {
        let defaults = VerifyOptions::default();
        let mut t = Tolerances {
            minor: defaults.minor_tol,
            zero: defaults.zero_tol,
            residual: defaults.residual_tol,
            check: defaults.tol,
            periodicity: 1e-6,
        };
        for item in overrides {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("tolerance `{item}` is not NAME=VALUE")))?;
            let v: f64 = value
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| Error::InvalidArgument(format!("tolerance `{item}` needs a non-negative number")))?;
            match name.trim() {
                "minor" => t.minor = MinorTolerance::Relative(v),
                "minor_abs" => t.minor = MinorTolerance::Absolute(v),
                "zero" => t.zero = v,
                "residual" => t.residual = Some(v),
                "check" => t.check = v,
                "periodicity" => t.periodicity = v,
                other => return Err(Error::InvalidArgument(format!("unknown tolerance `{other}`"))),
            }
        }
        Ok(t)
    }

    fn to_map(&self) -> BTreeMap<&'static str, Value> {
        let mut m = BTreeMap::new();
        let (mode, value) = match self.minor {
            MinorTolerance::Absolute(v) => ("absolute", v),
            MinorTolerance::Relative(v) => ("relative", v),
        };
        m.insert("minor", json!({"mode": mode, "value": value}));
        m.insert("zero", json!(self.zero));
        m.insert("residual", json!(self.residual));
        m.insert("check", json!(self.check));
        m.insert("periodicity", json!(self.periodicity));
        m
    }

    fn verify_options(&self, samples: usize, seed: u64) -> VerifyOptions {
        VerifyOptions {
            samples,
            tol: self.check,
            zero_tol: self.zero,
            seed,
            residual_tol: self.residual,
            minor_tol: self.minor,
        }
    }
}

/// A computed result before formatting.
struct Produced {
    result: Value,
    anchors: Vec<String>,
    code: i32,
    csv: Option<String>,
}

impl Produced {
    fn plain(result: Value) -> Self {
        Produced { result, anchors: Vec::new(), code: EXIT_OK, csv: None }
    }

    fn from_report(report: &Report) -> Self {
        Produced {
            result: serde_json::to_value(report).expect("report serializes"),
            anchors: report.checks.iter().map(|c| c.anchor.clone()).collect(),
            code: report_code(report.status()),
            csv: None,
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Analyze { .. } => "analyze",
        Command::Verify { .. } => "verify",
        Command::Vdp { .. } => "vdp",
        Command::Simulate { .. } => "simulate",
        Command::Compound { .. } => "compound",
    }
}

/// Runs a parsed command and renders its output.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let mut tols = Tolerances::parse(&cli.tol)?;
    if let Command::Simulate { eps: Some(eps), .. } = &cli.command {
        tols.periodicity = *eps;
    }
    let produced = match &cli.command {
        Command::Analyze { matrix, size_limit } => analyze(&DenseMatrix::read_file(matrix)?, *size_limit, &tols)?,
        Command::Verify { matrix, theorem, k, samples } => {
            let a = DenseMatrix::read_file(matrix)?;
            verify(&a, *theorem, *k, &tols.verify_options(*samples, cli.seed))?
        }
        Command::Vdp { matrix, mode, k, samples } => {
            vdp(&DenseMatrix::read_file(matrix)?, *mode, *k, *samples, cli.seed)?
        }
        Command::Simulate { system, x0, xbar0, steps, period, window, trajectory, .. } => {
            let sim = SimulateArgs {
                x0: x0.as_deref(),
                xbar0: xbar0.as_deref(),
                steps: *steps,
                period: *period,
                eps: tols.periodicity,
                window: *window,
            };
            let produced = simulate(system, &sim)?;
            if let (Some(path), Some(csv)) = (trajectory, &produced.csv) {
                write_atomic(path, csv.as_bytes())?;
            }
            produced
        }
        Command::Compound { matrix, k } => {
            let a = DenseMatrix::read_file(matrix)?;
            compound(&a, *k, &tols.verify_options(VerifyOptions::default().samples, cli.seed))?
        }
    };

    let envelope = json!({
        "tool": "signreg",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command_name(&cli.command),
        "seed": cli.seed,
        "tolerances": tols.to_map(),
        "anchors": produced.anchors,
        "result": produced.result,
    });
    let output = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&envelope).expect("json");
            s.push('\n');
            s
        }
        Format::Text => render_text(&envelope),
        Format::Csv => match produced.csv {
            Some(csv) => csv,
            None => return Err(Error::InvalidArgument("csv output is only available for simulate".into())),
        },
    };
    Ok(Outcome { output, code: produced.code })
}

fn analyze(a: &DenseMatrix, size_limit: usize, tols: &Tolerances) -> Result<Produced> {
    let classes = classify_with_limit(a, tols.minor, size_limit)?;
    let spectrum = if a.is_square() {
        match eigen(a, tols.residual) {
            Ok(s) => json!({
                "eigenvalues": s.eigenvalues,
                "moduli": s.moduli(),
                "kinds": s.kinds,
                "eigenvectors": s.eigenvectors,
                "real_basis": s.real_basis,
                "residuals": s.residuals,
                "eigvec_condition": s.eigvec_condition,
                "unreliable": s.unreliable(),
            }),
            Err(e @ Error::SingularMatrix { .. }) => json!({"skipped": e.to_string()}),
            Err(e) => return Err(e),
        }
    } else {
        json!({"skipped": "matrix is not square"})
    };
    Ok(Produced::plain(json!({
        "rows": a.rows(),
        "cols": a.cols(),
        "classification": classes,
        "spectrum": spectrum,
    })))
}

fn verify(a: &DenseMatrix, theorem: Theorem, k: Option<usize>, opts: &VerifyOptions) -> Result<Produced> {
    let need_k = || k.ok_or_else(|| Error::InvalidArgument("--k is required for this theorem".into()));
    let report = match theorem {
        Theorem::Thm2 => verify_thm2(a, need_k()?, opts)?,
        Theorem::Cor2 => verify_cor2(a, need_k()?, opts)?,
        Theorem::Ssr => verify_ssr_spectrum(a, opts)?,
        Theorem::Thm3 => verify_thm3(a, opts)?,
        Theorem::Cor3 => verify_cor3(a, opts)?,
    };
    Ok(Produced::from_report(&report))
}

const VDP_ANCHORS: [(Mode, &str); 4] = [
    (Mode::OrderK, "s^-(x) <= k-1 implies s^+(Ax) <= k-1 for all x if and only if A is SSR_k"),
    (Mode::Cyclic, "s_c^+(Ax) <= s_c^-(x) for all non-zero x if and only if A is SSR for every odd order"),
    (Mode::Odd, "s_o^+(Ax) <= s_o^-(x) for all non-zero x if and only if A is SSR for every even order"),
    (Mode::Tall, "s^+(Ux) <= m-1 for all non-zero x if and only if all minors U(alpha|1..m) share a strict sign"),
];

fn vdp(a: &DenseMatrix, mode: Mode, k: Option<usize>, samples: usize, seed: u64) -> Result<Produced> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result = match mode {
        Mode::OrderK => {
            let k = k.ok_or_else(|| Error::InvalidArgument("--k is required for order-k mode".into()))?;
            check_order_k_vdp(a, k, samples, &mut rng)?
        }
        Mode::Cyclic => check_cyclic_vdp(a, samples, &mut rng)?,
        Mode::Odd => check_odd_vdp(a, samples, &mut rng)?,
        Mode::Tall => check_tall_vdp(a, samples, &mut rng)?,
    };
    // a violation only falsifies something when the minor criterion holds
    let code = if result.minor_condition && !result.pass { EXIT_VIOLATION } else { EXIT_OK };
    let anchor = VDP_ANCHORS.iter().find(|(m, _)| *m == mode).map(|(_, s)| s.to_string());
    Ok(Produced {
        result: serde_json::to_value(&result).expect("vdp result serializes"),
        anchors: anchor.into_iter().collect(),
        code,
        csv: None,
    })
}

fn compound(a: &DenseMatrix, k: usize, opts: &VerifyOptions) -> Result<Produced> {
    let c = multiplicative_compound(a, k)?;
    let rows: Vec<&[f64]> = (0..c.rows()).map(|r| c.row(r)).collect();
    let mut result = json!({"k": k, "compound": rows});
    let mut produced = Produced::plain(Value::Null);
    if a.is_square() {
        result["kronecker_error"] = json!(compound_spectrum_error(a, k)?);
        match verify_compound_perron(a, k, opts) {
            Ok(report) => {
                produced = Produced::from_report(&report);
                result["perron"] = produced.result.take();
            }
            Err(e @ Error::HypothesisNotMet(_)) => result["perron"] = json!({"skipped": e.to_string()}),
            Err(e) => return Err(e),
        }
    }
    produced.result = result;
    Ok(produced)
}

struct SimulateArgs<'a> {
    x0: Option<&'a [f64]>,
    xbar0: Option<&'a [f64]>,
    steps: usize,
    period: Option<usize>,
    eps: f64,
    window: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SystemFile {
    Builtin {
        builtin: String,
        #[serde(default)]
        coefficients: Option<Example3Spec>,
        #[serde(default)]
        freeze_at: Option<usize>,
    },
    Periodic {
        periodic: Vec<PathBuf>,
    },
}

enum System {
    Nonlinear(Example3),
    Linear(LinearTimeVaryingSystem),
}

fn builtin(name: &str, coefficients: Option<Example3Spec>, freeze_at: Option<usize>) -> Result<System> {
    let sys = example3_system(coefficients.unwrap_or_default())?;
    match name {
        "example3" => Ok(System::Nonlinear(sys)),
        "example3_frozen" => Ok(System::Nonlinear(sys.frozen(freeze_at.unwrap_or(0)))),
        other => Err(Error::InvalidArgument(format!("unknown builtin system `{other}`"))),
    }
}

fn load_system(name: &str) -> Result<System> {
    if name == "example3" || name == "example3_frozen" {
        return builtin(name, None, None);
    }
    let path = Path::new(name);
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read system file {name}: {e}")))?;
    let file: SystemFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: format!("system file: {e}"),
    })?;
    match file {
        SystemFile::Builtin { builtin: b, coefficients, freeze_at } => builtin(&b, coefficients, freeze_at),
        SystemFile::Periodic { periodic } => {
            let base = path.parent().unwrap_or(Path::new("."));
            let mats = periodic
                .iter()
                .map(|p| DenseMatrix::read_file(&base.join(p)))
                .collect::<Result<Vec<_>>>()?;
            Ok(System::Linear(LinearTimeVaryingSystem::periodic(mats)?))
        }
    }
}

fn simulate(system: &str, args: &SimulateArgs) -> Result<Produced> {
    let sys = load_system(system)?;
    let (record, own_period, extra) = match &sys {
        System::Nonlinear(s) => {
            let x0 = args.x0.unwrap_or(&[5.0, 6.0]);
            let record = match args.xbar0 {
                Some(y0) => simulate_nonlinear_pair(s, x0, y0, args.steps)?,
                None => simulate_nonlinear(s, x0, args.steps)?,
            };
            (record, s.period(), json!({"domain": s.domain()}))
        }
        System::Linear(s) => {
            let x0 = args
                .x0
                .ok_or_else(|| Error::InvalidArgument("--x0 is required for a linear system".into()))?;
            let run = simulate_linear(s, x0, args.steps)?;
            let variation = match monitor_thm5(&run) {
                Ok(r) => serde_json::to_value(r).expect("report"),
                Err(e) => json!({"skipped": e.to_string()}),
            };
            let extra = json!({"hypotheses": run.hypotheses, "variation": variation});
            (run.record, s.period(), extra)
        }
    };
    let period = args.period.or(own_period).unwrap_or(1);
    let window = args.window.unwrap_or(2 * period);
    let p = detect_periodicity(&record, period, args.eps, window)?;
    let final_state = record.states.last().cloned();
    Ok(Produced {
        result: json!({
            "converged": p.converged,
            "onset": p.onset,
            "residual": p.residual,
            "periodicity": p,
            "steps": record.steps(),
            "final_state": final_state,
            "system": extra,
        }),
        anchors: vec!["every solution of a T-periodic system with TP averaged Jacobians converges to a T-periodic solution".into()],
        code: EXIT_OK,
        csv: Some(record.to_csv()),
    })
}

fn render_text(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, x, out);
                }
            }
            Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            other => {
                out.push_str(prefix);
                out.push_str(" = ");
                out.push_str(&other.to_string());
                out.push('\n');
            }
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let io = |e: std::io::Error| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

/// Parses `args` (including the program name), runs the command, writes the
/// output and returns the exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => write_atomic(path, outcome.output.as_bytes()),
                None => std::io::stdout()
                    .write_all(outcome.output.as_bytes())
                    .map_err(|e| Error::InvalidArgument(format!("cannot write output: {e}"))),
            };
            match written {
                Ok(()) => outcome.code,
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code(&e)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("signreg").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn tolerance_overrides() {
        let t = Tolerances::parse(&["minor=1e-10".into(), "zero=0.5".into()]).unwrap();
        assert_eq!(t.minor, MinorTolerance::Relative(1e-10));
        assert_eq!(t.zero, 0.5);
        assert!(Tolerances::parse(&["bogus=1".into()]).is_err());
        assert!(Tolerances::parse(&["minor".into()]).is_err());
        assert!(Tolerances::parse(&["zero=-1".into()]).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Parse { line: 3, message: String::new() }), EXIT_INVALID);
        assert_eq!(exit_code(&Error::SizeLimit { size: 30, limit: 20 }), EXIT_SIZE);
        assert_eq!(exit_code(&Error::HypothesisNotMet(String::new())), EXIT_HYPOTHESIS);
        assert_eq!(exit_code(&Error::DomainEscape { step: 2, message: String::new() }), EXIT_DOMAIN);
        assert_eq!(report_code(Status::Unreliable), EXIT_NUMERICAL);
    }

    #[test]
    fn simulate_example3() {
        let out = execute(&parse(&["simulate", "--steps", "200"])).unwrap();
        assert_eq!(out.code, 0);
        let v: Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v["result"]["converged"], true);
        assert_eq!(v["result"]["periodicity"]["period"], 4);
        assert_eq!(v["seed"], 0);
    }

    #[test]
    fn simulate_short_horizon() {
        let err = execute(&parse(&["simulate", "--steps", "3", "--period", "4"])).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_INVALID);
    }

    #[test]
    fn simulate_fixed_point() {
        let out = execute(&parse(&["simulate", "--system", "example3_frozen", "--x0", "0,0", "--steps", "20"])).unwrap();
        let v: Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v["result"]["residual"], 0.0);
    }

    #[test]
    fn csv_only_for_simulate() {
        let out = execute(&parse(&["--format", "csv", "simulate", "--steps", "20"])).unwrap();
        assert!(out.output.starts_with("i,x1,x2\n"));
        assert_eq!(out.output.lines().count(), 22);
    }

    #[test]
    fn text_rendering_flattens() {
        let s = render_text(&json!({"a": {"b": 1, "c": [1, 2]}, "d": [{"e": true}]}));
        assert_eq!(s, "a.b = 1\na.c = [1,2]\nd[0].e = true\n");
    }
}
