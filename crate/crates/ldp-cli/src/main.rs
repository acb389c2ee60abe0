//! `ldp`: solve and stress-test least-distance programs from the command
//! line.
//!
//! Exit codes: 0 for clean verdicts (Solved or Infeasible, a passing
//! verify, a campaign with no anomalies, all regressions green), 1 when an
//! answer or campaign failed its checks, 2 for usage, IO, and parse errors.

use clap::{Args, Parser, Subcommand};
use ldp::solver::{ldp_solve, LdpVerdict};
use ldp::verify::verify_feasible;
use ldp::{ToleranceConfig, Vector};
use ldp_cli::campaign::{self, CampaignConfig};
use ldp_cli::casefile::{self, format_value, CaseFile};
use ldp_cli::corpus::{
    build_fixed, case_file_name, CorpusParams, DimRanges, FixedShape, GenKind, MixWeights,
};
use ldp_cli::regress;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "ldp",
    version,
    about = "Solve min ||x|| subject to Gx >= h, with every answer verified"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a case file and print the verified outcome
    Solve {
        /// Case file to solve
        path: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Check a candidate point against a case file's constraints
    Verify {
        /// Case file holding the constraints
        path: PathBuf,
        /// Candidate vector, comma- or space-separated values
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// File containing the candidate vector
        #[arg(long, conflicts_with = "x")]
        x_file: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Generate seeded case files
    Gen(GenArgs),
    /// Run a randomized solve-and-verify campaign, dumping anomalies
    Fuzz(FuzzArgs),
    /// Run the embedded regression checks
    Regress {
        #[command(flatten)]
        tol: TolArgs,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Constraint rows before any transform
    #[arg(long)]
    m: usize,
    /// Unknowns
    #[arg(long)]
    n: usize,
    /// Emitted rows for transformed cases (defaults to m)
    #[arg(long)]
    l: Option<usize>,
    /// consistent | transformed | interior | infeasible
    #[arg(long, default_value = "consistent", value_parser = GenKind::from_str)]
    kind: GenKind,
    /// All-zero columns to inject into G
    #[arg(long, default_value_t = 0)]
    zero_cols: usize,
    /// Entry scale for G
    #[arg(long, default_value_t = 100.0)]
    scale_g: f64,
    /// Entry scale for the witness point
    #[arg(long, default_value_t = 1000.0)]
    scale_x0: f64,
    /// Upper bound for per-row interior margins
    #[arg(long, visible_alias = "margin", default_value_t = 1000.0)]
    margin_scale: f64,
    /// Multiple of ||h||_inf used to shift infeasible cases
    #[arg(long, visible_alias = "shift", default_value_t = 10.0)]
    shift_scale: f64,
    /// Master seed; case i uses a seed derived from (seed, i)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of case files to write
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Output directory
    #[arg(long, default_value = "cases")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct FuzzArgs {
    /// Number of cases to run
    #[arg(long, default_value_t = 1000)]
    cases: u64,
    /// Master seed for the campaign
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Kind mix as consistent,transformed,interior,infeasible weights
    #[arg(long, default_value = "40,20,20,20", value_parser = MixWeights::from_str)]
    mix: MixWeights,
    /// Dimension ranges as M_LO-M_HI,N_LO-N_HI
    #[arg(long, default_value = "1-12,1-6", value_parser = DimRanges::from_str)]
    dims: DimRanges,
    /// Entry scale for G
    #[arg(long, default_value_t = 100.0)]
    scale_g: f64,
    /// Entry scale for witness points
    #[arg(long, default_value_t = 1000.0)]
    scale_x0: f64,
    /// Upper bound for per-row interior margins
    #[arg(long, default_value_t = 1000.0)]
    margin_scale: f64,
    /// Multiple of ||h||_inf used to shift infeasible cases
    #[arg(long, default_value_t = 10.0)]
    shift_scale: f64,
    /// Worker threads; the report is identical for any value
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Directory for anomaly dumps and the report
    #[arg(long, default_value = "fuzz-out")]
    dump_dir: PathBuf,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
struct TolArgs {
    /// Scaled feasibility tolerance (default 1e-8)
    #[arg(long)]
    tau_feas: Option<f64>,
    /// Dual tolerance in the active-set loop (default 1e-11)
    #[arg(long)]
    tau_w: Option<f64>,
    /// Pivot magnitude guard for reconstruction (default 1e-10)
    #[arg(long)]
    tau_div: Option<f64>,
    /// KKT certificate tolerance (default 1e-7)
    #[arg(long)]
    tau_kkt: Option<f64>,
    /// Active-set iteration cap (default: three times the column count)
    #[arg(long)]
    max_iterations: Option<usize>,
}

impl TolArgs {
    fn build(&self) -> Result<ToleranceConfig, String> {
        let mut tol = ToleranceConfig::default();
        if let Some(v) = self.tau_feas {
            tol.tau_feas = v;
        }
        if let Some(v) = self.tau_w {
            tol.tau_w = v;
        }
        if let Some(v) = self.tau_div {
            tol.tau_div = v;
        }
        if let Some(v) = self.tau_kkt {
            tol.tau_kkt = v;
        }
        if let Some(v) = self.max_iterations {
            tol.max_iterations = Some(v);
        }
        tol.validate().map_err(|e| e.0)?;
        Ok(tol)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Solve { path, tol } => with_tol(tol, |t| cmd_solve(path, t)),
        Command::Verify {
            path,
            x,
            x_file,
            tol,
        } => with_tol(tol, |t| {
            cmd_verify(path, x.as_deref(), x_file.as_deref(), t)
        }),
        Command::Gen(args) => cmd_gen(args),
        Command::Fuzz(args) => with_tol(&args.tol, |t| cmd_fuzz(args, t)),
        Command::Regress { tol } => with_tol(tol, cmd_regress),
    };
    ExitCode::from(code)
}

fn with_tol(args: &TolArgs, run: impl FnOnce(&ToleranceConfig) -> u8) -> u8 {
    match args.build() {
        Ok(tol) => run(&tol),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn read_case(path: &Path) -> Result<CaseFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    casefile::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn join_values(xs: &[f64]) -> String {
    xs.iter()
        .map(|v| format_value(*v))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_solve(path: &Path, tol: &ToleranceConfig) -> u8 {
    let case = match read_case(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let outcome = ldp_solve(&case.problem, tol);
    match &outcome.verdict {
        LdpVerdict::Solved {
            x,
            certificate,
            report,
        } => {
            println!("status Solved");
            println!("x {}", join_values(x.as_slice()));
            println!("norm {}", format_value(x.norm2()));
            println!("max_violation {}", format_value(report.max_violation));
            println!("worst_row {}", report.worst_row + 1);
            println!(
                "stationarity_residual {}",
                format_value(certificate.stationarity_residual)
            );
            println!(
                "complementarity_residual {}",
                format_value(certificate.complementarity_residual)
            );
            println!("lambda_min {}", format_value(certificate.lambda_min));
            println!("iterations {}", outcome.internals.nnls.iterations);
            0
        }
        LdpVerdict::Infeasible => {
            println!("status Infeasible");
            println!("rnorm {}", format_value(outcome.internals.nnls.rnorm));
            0
        }
        LdpVerdict::VerificationFailed {
            report,
            certificate,
        } => {
            println!("status VerificationFailed");
            println!("candidate_x {}", join_values(report.candidate_x.as_slice()));
            println!("max_violation {}", format_value(report.max_violation));
            println!("worst_row {}", report.worst_row + 1);
            if let Some(cert) = certificate {
                println!(
                    "stationarity_residual {}",
                    format_value(cert.stationarity_residual)
                );
                println!(
                    "complementarity_residual {}",
                    format_value(cert.complementarity_residual)
                );
                println!("lambda_min {}", format_value(cert.lambda_min));
            }
            1
        }
        LdpVerdict::IterationLimit => {
            println!("status IterationLimit");
            println!("iterations {}", outcome.internals.nnls.iterations);
            1
        }
    }
}

fn parse_vector(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for token in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        out.push(casefile::parse_value(token)?);
    }
    if out.is_empty() {
        return Err("no values found in candidate".to_string());
    }
    Ok(out)
}

fn cmd_verify(path: &Path, x: Option<&str>, x_file: Option<&Path>, tol: &ToleranceConfig) -> u8 {
    let case = match read_case(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let candidate = if let Some(text) = x {
        parse_vector(text)
    } else if let Some(file) = x_file {
        std::fs::read_to_string(file)
            .map_err(|e| format!("{}: {e}", file.display()))
            .and_then(|text| parse_vector(&text))
    } else if let Some(witness) = &case.witness {
        Ok(witness.as_slice().to_vec())
    } else {
        Err("no candidate: pass --x or --x-file, or use a case file with a witness".to_string())
    };
    let candidate = match candidate {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if candidate.len() != case.problem.n() {
        eprintln!(
            "error: candidate has {} components but the problem has n = {}",
            candidate.len(),
            case.problem.n()
        );
        return 2;
    }
    let x = Vector::new(candidate).expect("parse_value admits only finite values");
    let report = verify_feasible(&case.problem, &x, tol);
    for i in 0..case.problem.m() {
        println!(
            "row {} violation {} scale {}",
            i + 1,
            format_value(report.violations[i]),
            format_value(report.scales[i])
        );
    }
    println!("max_violation {}", format_value(report.max_violation));
    println!("worst_row {}", report.worst_row + 1);
    println!("{}", if report.passed { "PASS" } else { "FAIL" });
    if report.passed {
        0
    } else {
        1
    }
}

fn cmd_gen(args: &GenArgs) -> u8 {
    let shape = FixedShape {
        kind: args.kind,
        m: args.m,
        n: args.n,
        l: args.l,
        zero_cols: args.zero_cols,
    };
    let params = CorpusParams {
        scale_g: args.scale_g,
        scale_x0: args.scale_x0,
        margin_scale: args.margin_scale,
        shift_scale: args.shift_scale,
        ..CorpusParams::default()
    };
    if let Err(e) = std::fs::create_dir_all(&args.out_dir) {
        eprintln!("error: {}: {e}", args.out_dir.display());
        return 2;
    }
    for index in 0..args.count {
        let record = match build_fixed(&params, shape, args.seed, index) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: case {index}: {e}");
                return 2;
            }
        };
        let metadata = vec![
            ("kind".to_string(), args.kind.label().to_string()),
            ("master".to_string(), format!("{:#018x}", args.seed)),
            ("index".to_string(), index.to_string()),
        ];
        let text = casefile::serialize(&record.problem, record.witness.as_ref(), &metadata);
        let path = args.out_dir.join(case_file_name(args.seed, index));
        if let Err(e) = std::fs::write(&path, text) {
            eprintln!("error: {}: {e}", path.display());
            return 2;
        }
        println!("{}", path.display());
    }
    0
}

fn cmd_fuzz(args: &FuzzArgs, tol: &ToleranceConfig) -> u8 {
    let cfg = CampaignConfig {
        cases: args.cases,
        master_seed: args.seed,
        params: CorpusParams {
            mix: args.mix,
            dims: args.dims,
            scale_g: args.scale_g,
            scale_x0: args.scale_x0,
            margin_scale: args.margin_scale,
            shift_scale: args.shift_scale,
        },
        threads: args.threads.max(1),
        dump_dir: args.dump_dir.clone(),
        tol: tol.clone(),
    };
    match campaign::run_campaign(&cfg) {
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
        Ok(report) => {
            print!("{}", campaign::render_human(&report));
            println!();
            print!("{}", campaign::render_machine(&report));
            if campaign::is_clean(&report) {
                0
            } else {
                1
            }
        }
    }
}

fn cmd_regress(tol: &ToleranceConfig) -> u8 {
    let outcome = regress::run_regression(tol);
    print!("{}", outcome.render());
    if outcome.all_passed() {
        0
    } else {
        1
    }
}
