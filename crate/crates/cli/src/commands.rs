//! Subcommands. Each returns its process exit code:
//! 0 success, 1 check or convergence failure, 2 usage/parse/precondition
//! error, 3 empty solution set (oracle only).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use icpkit::oracle::enumerate_solutions;
use icpkit::{
    generate_planted, projection_iterate, DeltaFunction, DiagonalScaling, GeneratorSpec, MapFamily, MatrixFamily,
    SolveStatus, SolverConfig, ToleranceConfig, Vector,
};
use serde::Serialize;

use crate::instance_file::InstanceFile;
use crate::verify::{verify_all, VerifyInput, VerifyOptions, VerifyOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "icpkit",
    version,
    about = "Residual verification, projection solver and oracle for implicit complementarity problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check all residual formulations on instance files or generated instances.
    Verify(VerifyArgs),
    /// Run the projection fixed-point solver on an instance file.
    Solve(SolveArgs),
    /// Enumerate all solutions of an affine instance by brute force.
    Oracle(OracleArgs),
    /// Generate an instance with a planted solution.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    DiagDominant,
    SymmetricPd,
    Dense,
}

impl From<FamilyArg> for MatrixFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::DiagDominant => MatrixFamily::DiagDominant,
            FamilyArg::SymmetricPd => MatrixFamily::SymmetricPd,
            FamilyArg::Dense => MatrixFamily::Dense,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapArg {
    Zero,
    Affine,
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// Problem dimension.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FamilyArg::DiagDominant)]
    pub family: FamilyArg,
    #[arg(long = "map", value_enum, default_value_t = MapArg::Affine)]
    pub map: MapArg,
    /// Bound on ‖C‖∞ for affine maps, in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Fraction of components with H_i = 0 at the planted solution.
    #[arg(long, default_value_t = 0.5)]
    pub active_fraction: f64,
}

impl SpecArgs {
    pub fn spec(&self, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            n: self.n,
            seed,
            matrix_family: self.family.into(),
            map_family: match self.map {
                MapArg::Zero => MapFamily::Zero,
                MapArg::Affine => MapFamily::ContractiveAffine { gamma: self.gamma },
            },
            active_fraction: self.active_fraction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Instance files to verify.
    pub paths: Vec<PathBuf>,
    /// Verify generated instances instead (seeds `--seed .. --seed + --count`).
    #[arg(long)]
    pub gen: bool,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Feasibility, complementarity and residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Comma-separated delta functions (identity, cubic, tanh, asinh).
    #[arg(long, value_delimiter = ',', default_value = "identity,cubic,tanh,asinh")]
    pub deltas: Vec<String>,
    /// Random positive scaling pairs per instance.
    #[arg(long, default_value_t = 3)]
    pub scalings: usize,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub out: OutFormat,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Largest dimension for which oracle solutions are included.
    #[arg(long, default_value_t = 12)]
    pub oracle_max_n: usize,
    /// Include the projection solver's limit point from the origin.
    #[arg(long)]
    pub solve: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    pub path: PathBuf,
    /// `jacobi` (diag(1/A_ii), identity if not positive), `identity`, or comma-separated entries.
    #[arg(long, default_value = "jacobi")]
    pub omega: String,
    #[arg(long, default_value_t = 1.0)]
    pub relaxation: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// `zero`, `planted`, or comma-separated entries.
    #[arg(long, default_value = "zero")]
    pub start: String,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = icpkit::oracle::N_MAX)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cli.command {
        Command::Verify(args) => cmd_verify(&args, out, err),
        Command::Solve(args) => cmd_solve(&args, out, err),
        Command::Oracle(args) => cmd_oracle(&args, out, err),
        Command::Gen(args) => cmd_gen(&args, out, err),
    }
}

macro_rules! usage {
    ($err:expr, $($fmt:tt)*) => {{
        let _ = writeln!($err, "error: {}", format!($($fmt)*));
        return EXIT_USAGE;
    }};
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}")))
        .collect()
}

fn load_input(path: &Path) -> Result<VerifyInput, String> {
    let file = InstanceFile::load(path).map_err(|e| e.to_string())?;
    let instance = file.to_instance().map_err(|e| e.to_string())?;
    let planted = file.planted_vector().map_err(|e| e.to_string())?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(VerifyInput { id, instance, planted })
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let tol = match ToleranceConfig::uniform(args.tol) {
        Ok(t) => t,
        Err(e) => usage!(err, "{e}"),
    };
    let mut deltas = Vec::new();
    for name in &args.deltas {
        match DeltaFunction::by_name(name) {
            Some(d) => deltas.push(d),
            None => usage!(err, "unknown delta function `{name}`"),
        }
    }

    let mut inputs = Vec::new();
    if args.gen {
        for k in 0..args.count {
            let seed = args.spec.seed.wrapping_add(k);
            match generate_planted(&args.spec.spec(seed)) {
                Ok(p) => inputs.push(VerifyInput {
                    id: format!("gen-{seed}"),
                    instance: p.instance,
                    planted: Some(p.planted),
                }),
                Err(e) => usage!(err, "{e}"),
            }
        }
    }
    for path in &args.paths {
        match load_input(path) {
            Ok(input) => inputs.push(input),
            Err(e) => usage!(err, "{}: {e}", path.display()),
        }
    }
    if inputs.is_empty() {
        usage!(err, "no instances given (pass files or --gen)");
    }

    let opts = VerifyOptions {
        tol,
        deltas,
        scalings: args.scalings,
        oracle_max_n: args.oracle_max_n,
        solve: args.solve,
        ..VerifyOptions::default()
    };
    let outcome = match verify_all(&inputs, &opts) {
        Ok(o) => o,
        Err(e) => usage!(err, "{e}"),
    };

    let written = match &args.output {
        Some(path) => fs::File::create(path)
            .map_err(|e| e.to_string())
            .and_then(|mut f| write_table(&outcome, args.out, &mut f)),
        None => write_table(&outcome, args.out, out),
    };
    if let Err(e) = written {
        usage!(err, "{e}");
    }

    for failure in &outcome.failures {
        let row = &outcome.rows[failure.row];
        let _ = writeln!(
            err,
            "FAIL {} {} {}: {}",
            row.instance_id, row.formulation, failure.point, failure.reason
        );
    }
    if outcome.passed() {
        EXIT_OK
    } else {
        let _ = writeln!(
            err,
            "{} failing check(s) in {} rows",
            outcome.failures.len(),
            outcome.rows.len()
        );
        EXIT_FAILED
    }
}

pub fn write_table(outcome: &VerifyOutcome, format: OutFormat, w: &mut dyn Write) -> Result<(), String> {
    match format {
        OutFormat::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            for row in &outcome.rows {
                csv.serialize(row).map_err(|e| e.to_string())?;
            }
            if outcome.rows.is_empty() {
                csv.write_record(crate::verify::CSV_HEADER.split(','))
                    .map_err(|e| e.to_string())?;
            }
            csv.flush().map_err(|e| e.to_string())
        }
        OutFormat::Json => {
            serde_json::to_writer_pretty(&mut *w, &outcome.rows).map_err(|e| e.to_string())?;
            writeln!(w).map_err(|e| e.to_string())
        }
    }
}

#[derive(Debug, Serialize)]
struct SolveOutput<'a> {
    status: &'static str,
    iterations: usize,
    final_residual: f64,
    final_point: &'a [f64],
    residual_history: &'a [f64],
}

fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxItersReached => "max_iters_reached",
        SolveStatus::Diverged => "diverged",
    }
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let input = match load_input(&args.path) {
        Ok(i) => i,
        Err(e) => usage!(err, "{}: {e}", args.path.display()),
    };
    let inst = &input.instance;
    let n = inst.dim();

    let omega = match args.omega.as_str() {
        "jacobi" => Ok(icpkit::solver::default_omega(inst)),
        "identity" => Ok(DiagonalScaling::identity(n)),
        list => parse_list(list).and_then(|v| DiagonalScaling::new(v).map_err(|e| e.to_string())),
    };
    let omega = match omega {
        Ok(o) => o,
        Err(e) => usage!(err, "--omega: {e}"),
    };
    let start = match args.start.as_str() {
        "zero" => Ok(Vector::zeros(n)),
        "planted" => input
            .planted
            .clone()
            .ok_or_else(|| "instance has no planted vector".to_string()),
        list => parse_list(list).and_then(|v| Vector::new(v).map_err(|e| e.to_string())),
    };
    let start = match start {
        Ok(s) => s,
        Err(e) => usage!(err, "--start: {e}"),
    };
    let report = SolverConfig::new(omega, args.relaxation, args.max_iters, args.tol)
        .and_then(|cfg| projection_iterate(inst, &start, &cfg));
    let report = match report {
        Ok(r) => r,
        Err(e) => usage!(err, "{e}"),
    };

    let shown = SolveOutput {
        status: status_name(report.status),
        iterations: report.iterations,
        final_residual: report.final_residual(),
        final_point: &report.final_point,
        residual_history: &report.residual_history,
    };
    let _ = serde_json::to_writer_pretty(&mut *out, &shown);
    let _ = writeln!(out);
    if report.converged() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

#[derive(Debug, Serialize)]
struct OracleOutput {
    n: usize,
    index_sets: usize,
    singular_subsystems: usize,
    solutions: Vec<Vec<f64>>,
    degenerate: Vec<bool>,
}

pub fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let input = match load_input(&args.path) {
        Ok(i) => i,
        Err(e) => usage!(err, "{}: {e}", args.path.display()),
    };
    let res = match enumerate_solutions(&input.instance, args.n_max) {
        Ok(r) => r,
        Err(e) => usage!(err, "{e}"),
    };
    let shown = OracleOutput {
        n: input.instance.dim(),
        index_sets: res.index_sets,
        singular_subsystems: res.singular_subsystems,
        solutions: res.solutions.iter().map(|s| s.to_vec()).collect(),
        degenerate: res.degenerate.clone(),
    };
    let _ = serde_json::to_writer_pretty(&mut *out, &shown);
    let _ = writeln!(out);
    if res.is_empty() {
        EXIT_EMPTY
    } else {
        EXIT_OK
    }
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let planted = match generate_planted(&args.spec.spec(args.spec.seed)) {
        Ok(p) => p,
        Err(e) => usage!(err, "{e}"),
    };
    let file = match InstanceFile::from_planted(&planted) {
        Ok(f) => f,
        Err(e) => usage!(err, "{e}"),
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = file.save(path) {
                usage!(err, "{e}");
            }
        }
        None => {
            let _ = out.write_all(file.to_json().as_bytes());
        }
    }
    EXIT_OK
}
