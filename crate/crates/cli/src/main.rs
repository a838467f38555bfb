//! Command-line driver for the bound pipeline and its verification suites.
//!
//! JSON is the canonical output; `--format text` renders the same object for
//! reading. Exit codes: 0 success, 1 verification failure, 2 input error.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use semistable::bounds::{advice, default_prime_sample, j_bound, BoundReport, ReductionData, ReportOptions};
use semistable::classical::{brute_force_spectrum, GroupFamily, SpectrumMethod, DEFAULT_SAMPLE_COUNT, DEFAULT_SPECTRUM_BUDGET};
use semistable::group::{close_group, MatrixGroup, DEFAULT_CLOSURE_CAP};
use semistable::matrix::Mat;
use semistable::pairing::{perfectize, GramForm};
use semistable::snf::snf;
use semistable::verify::run_suites;
use semistable::FactoredInt;

#[derive(Parser)]
#[command(name = "semistable", version, about = "Exact bounds on the obstruction to semistable reduction", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; JSON is the source of truth.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Input path; `-` or omitted reads standard input where input is needed.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the full bound report from reduction data.
    Bounds {
        /// Number of primes sampled for the admissible-order refinement.
        #[arg(long, default_value_t = 50)]
        prime_sample: usize,
        /// Upper bound for the safe-prime listing.
        #[arg(long, default_value_t = 100)]
        prime_bound: u64,
    },
    /// Evaluate J(n), the bound on finite subgroups of the rational
    /// general linear group, in factored form.
    Jn { n: u32 },
    /// Emit only the advice findings for reduction data.
    Advice {
        #[arg(long, default_value_t = 50)]
        prime_sample: usize,
    },
    /// Smith normal form of an integer matrix.
    Snf,
    /// Build a perfect invariant form from a non-degenerate one.
    Perfectize {
        /// ell-adic precision used when an equivariant splitting is needed.
        #[arg(long, default_value_t = 8)]
        precision: u32,
    },
    /// Element-order spectrum of the rank-2m symplectic group over F_ell.
    SpOrders {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ell: u64,
        /// Force exhaustive enumeration (error if over budget).
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        /// Sample count for sampled mode.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exhaustive enumeration budget.
        #[arg(long, default_value_t = DEFAULT_SPECTRUM_BUDGET)]
        budget: u64,
    },
    /// Run the oracle verification suites; exits 1 on any mismatch.
    Verify {
        /// Smaller corpora for a fast signal.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Serialize)]
struct ErrorObject {
    error: ErrorBody,
}

#[derive(Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
}

fn fail_input(message: String) -> ExitCode {
    let obj = ErrorObject { error: ErrorBody { kind: "input_error", message } };
    println!("{}", serde_json::to_string(&obj).expect("error object serializes"));
    ExitCode::from(2)
}

fn read_input(path: &Option<PathBuf>) -> Result<String, String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))
        }
        _ => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| format!("cannot read stdin: {e}"))?;
            Ok(buf)
        }
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("malformed {what}: {e}"))
}

#[derive(Deserialize)]
struct PerfectizeInput {
    form: GramForm,
    #[serde(default)]
    generators: Vec<Mat>,
    #[serde(default)]
    cap: Option<usize>,
}

#[derive(Serialize)]
struct PerfectizeOutput {
    form: GramForm,
    basis_change: Mat,
    precision: Option<u32>,
}

#[derive(Serialize)]
struct SnfOutput {
    u: Mat,
    d: Mat,
    v: Mat,
}

#[derive(Serialize)]
struct JnOutput {
    n: u32,
    j: FactoredInt,
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce(&T) -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(value).expect("output serializes")),
        Format::Text => print!("{}", text(value)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(message) => fail_input(message),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.command {
        Command::Bounds { prime_sample, prime_bound } => {
            let text = read_input(&cli.input)?;
            let data: ReductionData = parse_json(&text, "reduction data")?;
            let options =
                ReportOptions { prime_sample_count: *prime_sample, safe_prime_bound: *prime_bound };
            let report = BoundReport::compute(&data, &options).map_err(|e| e.to_string())?;
            emit(cli.format, &report, BoundReport::render_text);
            Ok(ExitCode::SUCCESS)
        }
        Command::Jn { n } => {
            let out = JnOutput { n: *n, j: j_bound(*n) };
            emit(cli.format, &out, |o| {
                format!("J({}) = {} = {}\n", o.n, o.j.factored_string(), o.j.to_bigint())
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Advice { prime_sample } => {
            let text = read_input(&cli.input)?;
            let data: ReductionData = parse_json(&text, "reduction data")?;
            let primes = default_prime_sample(*prime_sample);
            let findings = advice(&data, &primes).map_err(|e| e.to_string())?;
            emit(cli.format, &findings, |fs| {
                fs.iter()
                    .map(|f| format!("[{}] ({}): {}\n", f.code, f.applies_when, f.statement))
                    .collect()
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Snf => {
            let text = read_input(&cli.input)?;
            let a: Mat = parse_json(&text, "matrix")?;
            if !a.is_integral() {
                return Err("snf expects an integer matrix".into());
            }
            let s = snf(&a).map_err(|e| e.to_string())?;
            let out = SnfOutput { u: s.u, d: s.d, v: s.v };
            emit(cli.format, &out, |o| {
                format!(
                    "U = {:?}\nD = {:?}\nV = {:?}\n",
                    o.u, o.d, o.v
                )
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Perfectize { precision } => {
            let text = read_input(&cli.input)?;
            let input: PerfectizeInput = parse_json(&text, "perfectize input")?;
            let ring = input.form.ring;
            let rank = input.form.rank();
            let group = if input.generators.is_empty() {
                MatrixGroup::trivial(ring, rank)
            } else {
                close_group(ring, &input.generators, input.cap.unwrap_or(DEFAULT_CLOSURE_CAP))
                    .map_err(|e| e.to_string())?
            };
            let out = perfectize(&input.form, &group, *precision).map_err(|e| e.to_string())?;
            let out = PerfectizeOutput {
                form: out.form,
                basis_change: out.basis_change,
                precision: out.precision,
            };
            emit(cli.format, &out, |o| {
                format!(
                    "ring: {}\ngram = {:?}\nbasis change = {:?}\nprecision: {}\n",
                    o.form.ring,
                    o.form.gram,
                    o.basis_change,
                    o.precision.map_or("exact".into(), |k| k.to_string())
                )
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::SpOrders { m, ell, exhaustive, samples, seed, budget } => {
            let method = if *exhaustive {
                SpectrumMethod::Exhaustive
            } else {
                match samples {
                    Some(count) => SpectrumMethod::Sampled { count: *count, seed: *seed },
                    None => {
                        // Pick whichever mode the budget allows.
                        let order = semistable::classical::sp_group_order(*m, *ell)
                            .map_err(|e| e.to_string())?;
                        if order.to_u64().map(|o| o <= *budget).unwrap_or(false) {
                            SpectrumMethod::Exhaustive
                        } else {
                            SpectrumMethod::Sampled { count: DEFAULT_SAMPLE_COUNT, seed: *seed }
                        }
                    }
                }
            };
            let spectrum = brute_force_spectrum(GroupFamily::Sp, 2 * m, *ell, method, *budget)
                .map_err(|e| e.to_string())?;
            emit(cli.format, &spectrum, |s| {
                let orders: Vec<String> = s.orders.iter().map(|o| o.to_string()).collect();
                format!(
                    "{} of order {}: element orders {{{}}} ({:?})\n",
                    s.describe(),
                    s.group_order.to_bigint(),
                    orders.join(", "),
                    s.method
                )
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { quick } => {
            let outcomes = run_suites(*quick);
            let all_passed = outcomes.iter().all(|o| o.passed);
            match cli.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct SuiteJson<'a> {
                        name: &'a str,
                        passed: bool,
                        details: &'a str,
                    }
                    #[derive(Serialize)]
                    struct VerifyJson<'a> {
                        passed: bool,
                        suites: Vec<SuiteJson<'a>>,
                    }
                    let out = VerifyJson {
                        passed: all_passed,
                        suites: outcomes
                            .iter()
                            .map(|o| SuiteJson { name: &o.name, passed: o.passed, details: &o.details })
                            .collect(),
                    };
                    println!("{}", serde_json::to_string(&out).expect("serializes"));
                }
                Format::Text => {
                    for o in &outcomes {
                        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.details);
                    }
                    println!("verify: {}", if all_passed { "all suites passed" } else { "FAILURES" });
                }
            }
            Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
