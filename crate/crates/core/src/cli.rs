//! Command-line front end. [`dispatch`] parses the arguments, runs one
//! command and returns the process exit code: 0 on success, 1 when a sweep
//! finds a violation or a verification fails, 2 on usage or domain errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{self, BoundId, MubBoundParams, Povm};
use crate::error::{Error, Result};
use crate::harness::{self, SweepConfig, Winner};
use crate::io::{self, fmt_f64, json_f64, StateFile};
use crate::measures::{self, NumericCgOptions};
use crate::mub::{self, construct_mub, MubSet};
use crate::states;

#[derive(Parser, Debug)]
#[command(name = "mubcoh", version, about = "Mutually unbiased bases, coherence and uncertainty bounds")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct or verify sets of mutually unbiased bases
    Mub {
        #[command(subcommand)]
        action: MubCommand,
    },
    /// Coherence of a state with respect to each basis of a set
    Coherence(CoherenceArgs),
    /// Evaluate bound right-hand sides
    Bounds {
        #[command(subcommand)]
        action: BoundsCommand,
    },
    /// Monte-Carlo inequality sweep driven by a JSON config
    Sweep(SweepArgs),
    /// Crossover intervals between the two pure-state coherence bounds
    Table1(Table1Args),
    /// Pointwise comparison of competing lower bounds
    Compare(CompareArgs),
}

#[derive(Subcommand, Debug)]
enum MubCommand {
    /// Build the complete MUB set for a prime or odd prime-power dimension
    Gen(GenArgs),
    /// Check orthonormality and unbiasedness of a MUB file
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// Right-hand side of one bound
    Eval(EvalArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Machine-readable output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write machine-readable output here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    d: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Measure {
    C1,
    CgPure,
    CgBounds,
    CgNumeric,
}

#[derive(Args, Debug)]
struct CoherenceArgs {
    /// MUB file whose bases are used
    #[arg(long, conflicts_with = "mub_d", required_unless_present = "mub_d")]
    basis_file: Option<PathBuf>,
    /// Use the constructed MUB set of this dimension
    #[arg(long)]
    mub_d: Option<usize>,
    /// Only this basis of the set
    #[arg(long)]
    basis: Option<usize>,
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    state_file: Option<PathBuf>,
    /// Sample a random state instead of reading one
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 0, requires = "random")]
    seed: u64,
    /// Rank of the random state; 1 samples a pure state
    #[arg(long, default_value_t = 1, requires = "random")]
    rank: usize,
    #[arg(long, value_enum)]
    measure: Measure,
    /// Random restarts of the numerical optimizer
    #[arg(long, default_value_t = 32)]
    starts: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    bound: BoundId,
    #[arg(long)]
    d: usize,
    #[arg(long = "M")]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    purity: f64,
    #[arg(long, default_value_t = 0.0)]
    entropy: f64,
    /// Outcome index per basis for `mim6` (comma separated, default all 0)
    #[arg(long, value_delimiter = ',')]
    indices: Option<Vec<usize>>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args, Debug)]
struct Table1Args {
    #[arg(long)]
    dmax: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    d: usize,
    /// Values of M: `a-b`, `a..b` (both inclusive) or a comma list;
    /// defaults to 2 through d+1
    #[arg(long)]
    mrange: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

/// Exit code for a check that ran but did not pass.
pub const EXIT_FAILED_CHECK: i32 = 1;
/// Exit code for usage, parse and domain errors.
pub const EXIT_ERROR: i32 = 2;

/// Parses `argv` (program name first) and runs the command.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn run(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Mub {
            action: MubCommand::Gen(args),
        } => mub_gen(args, stdout),
        Command::Mub {
            action: MubCommand::Verify(args),
        } => mub_verify(args, stdout),
        Command::Coherence(args) => coherence(args, stdout),
        Command::Bounds {
            action: BoundsCommand::Eval(args),
        } => bounds_eval(args, stdout),
        Command::Sweep(args) => sweep(args, stdout, stderr),
        Command::Table1(args) => table1(args, stdout),
        Command::Compare(args) => compare(args, stdout),
    }
}

/// `x` with 12 significant digits.
pub fn fmt_human(x: f64) -> String {
    if !x.is_finite() {
        return fmt_f64(x);
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

/// Writes a left-aligned table.
fn write_table(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (k, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if k + 1 == cells.len() {
                s.push_str(cell);
            } else {
                let _ = write!(s, "{cell:<w$}  ");
            }
        }
        s
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for row in rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

/// Emits machine output if requested, otherwise the human table.
fn emit(
    output: &OutputArgs,
    default_format: Format,
    stdout: &mut dyn Write,
    machine: impl FnOnce(Format) -> Result<String>,
    human: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    let format = match (output.format, &output.out) {
        (Some(f), _) => Some(f),
        (None, Some(_)) => Some(default_format),
        (None, None) => None,
    };
    match (format, &output.out) {
        (Some(f), Some(path)) => {
            let text = machine(f)?;
            std::fs::write(path, text)?;
            human(stdout)
        }
        (Some(f), None) => Ok(stdout.write_all(machine(f)?.as_bytes())?),
        (None, _) => human(stdout),
    }
}

fn unsupported_format(command: &str, f: Format) -> Error {
    Error::InvalidParameter(format!(
        "{command} does not support --format {}",
        f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    ))
}

fn mub_gen(args: GenArgs, stdout: &mut dyn Write) -> Result<i32> {
    if let Some(Format::Csv) = args.output.format {
        return Err(unsupported_format("mub gen", Format::Csv));
    }
    let set = construct_mub(args.d)?;
    let report = set.verify(0.0)?;
    emit(
        &args.output,
        Format::Json,
        stdout,
        |_| Ok(mub::serialize_mub(&set)),
        |out| {
            write_table(
                out,
                &["d", "bases", "label", "orthonormality", "unbiasedness"],
                &[vec![
                    set.dim().to_string(),
                    set.len().to_string(),
                    set.label().to_string(),
                    fmt_human(report.max_orthonormality_deviation),
                    fmt_human(report.max_unbiasedness_deviation),
                ]],
            )
        },
    )?;
    Ok(0)
}

fn mub_verify(args: VerifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    if args.tol.is_nan() || args.tol < 0.0 {
        return Err(Error::InvalidParameter(format!("bad tolerance {}", args.tol)));
    }
    let set = mub::parse_mub_file_unverified(&std::fs::read(&args.file)?)?;
    let report = set.verify(args.tol)?;
    write_table(
        stdout,
        &["d", "bases", "orthonormality", "unbiasedness", "tol", "result"],
        &[vec![
            set.dim().to_string(),
            set.len().to_string(),
            fmt_human(report.max_orthonormality_deviation),
            fmt_human(report.max_unbiasedness_deviation),
            fmt_human(args.tol),
            if report.passed { "pass" } else { "FAIL" }.to_string(),
        ]],
    )?;
    Ok(if report.passed { 0 } else { EXIT_FAILED_CHECK })
}

fn load_set(basis_file: Option<&Path>, mub_d: Option<usize>) -> Result<MubSet> {
    match (basis_file, mub_d) {
        (Some(path), _) => mub::parse_mub_file(&std::fs::read(path)?),
        (None, Some(d)) => construct_mub(d),
        (None, None) => Err(Error::InvalidParameter(
            "one of --basis-file or --mub-d is required".into(),
        )),
    }
}

fn coherence(args: CoherenceArgs, stdout: &mut dyn Write) -> Result<i32> {
    let set = load_set(args.basis_file.as_deref(), args.mub_d)?;
    let d = set.dim();
    let state = match &args.state_file {
        Some(path) => io::parse_state(&std::fs::read(path)?)?,
        None if args.rank == 1 => StateFile::Pure(states::sample_pure(d, args.seed)?),
        None => StateFile::Density(states::sample_density(d, args.rank, args.seed)?),
    };
    if state.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: state.dim(),
        });
    }
    let indices: Vec<usize> = match args.basis {
        Some(b) if b < set.len() => vec![b],
        Some(b) => {
            return Err(Error::InvalidParameter(format!(
                "basis {b} out of range ({} bases)",
                set.len()
            )))
        }
        None => (0..set.len()).collect(),
    };
    if args.measure == Measure::CgNumeric && args.starts == 0 {
        return Err(Error::InvalidParameter("--starts must be at least 1".into()));
    }

    let (columns, name): (&[&str], &str) = match args.measure {
        Measure::C1 => (&["basis", "value"], "c1"),
        Measure::CgPure => (&["basis", "value"], "cg-pure"),
        Measure::CgBounds => (&["basis", "lower", "upper"], "cg-bounds"),
        Measure::CgNumeric => (
            &["basis", "value", "fidelity", "converged", "iterations"],
            "cg-numeric",
        ),
    };
    let rho = state.density();
    // Each row: basis index then numeric/boolean fields.
    let mut rows: Vec<(usize, Vec<Field>)> = Vec::with_capacity(indices.len());
    for &k in &indices {
        let basis = &set.bases()[k];
        let fields = match args.measure {
            Measure::C1 => vec![Field::Num(measures::rel_entropy_coherence(basis, &rho)?)],
            Measure::CgPure => match &state {
                StateFile::Pure(psi) => {
                    vec![Field::Num(measures::geometric_coherence_pure(basis, psi)?)]
                }
                StateFile::Density(_) => {
                    return Err(Error::InvalidState(
                        "cg-pure needs a pure state; use cg-bounds or cg-numeric".into(),
                    ))
                }
            },
            Measure::CgBounds => {
                let g = measures::geometric_coherence_bounds(basis, &rho)?;
                vec![Field::Num(g.lower), Field::Num(g.upper)]
            }
            Measure::CgNumeric => {
                let opts = NumericCgOptions {
                    starts: args.starts,
                    seed: args.seed,
                    ..Default::default()
                };
                let r = measures::geometric_coherence_numeric(basis, &rho, &opts)?;
                vec![
                    Field::Num(r.value),
                    Field::Num(r.fidelity),
                    Field::Bool(r.converged),
                    Field::Int(r.iterations as u64),
                ]
            }
        };
        rows.push((k, fields));
    }

    emit(
        &args.output,
        Format::Csv,
        stdout,
        |f| {
            Ok(match f {
                Format::Csv => {
                    let mut s = columns.join(",");
                    s.push('\n');
                    for (k, fields) in &rows {
                        let _ = write!(s, "{k}");
                        for v in fields {
                            let _ = write!(s, ",{}", v.machine_csv());
                        }
                        s.push('\n');
                    }
                    s
                }
                Format::Json => {
                    let mut s = format!(
                        "{{\n  \"measure\": \"{name}\",\n  \"d\": {d},\n  \"label\": {},\n  \"results\": [\n",
                        serde_json::to_string(set.label()).expect("strings serialize")
                    );
                    for (i, (k, fields)) in rows.iter().enumerate() {
                        let _ = write!(s, "    {{\"basis\": {k}");
                        for (c, v) in columns[1..].iter().zip(fields) {
                            let _ = write!(s, ", \"{c}\": {}", v.machine_json());
                        }
                        s.push_str(if i + 1 < rows.len() { "},\n" } else { "}\n" });
                    }
                    s.push_str("  ]\n}\n");
                    s
                }
            })
        },
        |out| {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|(k, fields)| {
                    std::iter::once(k.to_string())
                        .chain(fields.iter().map(Field::human))
                        .collect()
                })
                .collect();
            write_table(out, columns, &table)
        },
    )?;
    Ok(0)
}

enum Field {
    Num(f64),
    Bool(bool),
    Int(u64),
}

impl Field {
    fn human(&self) -> String {
        match self {
            Field::Num(x) => fmt_human(*x),
            Field::Bool(b) => b.to_string(),
            Field::Int(n) => n.to_string(),
        }
    }

    fn machine_csv(&self) -> String {
        match self {
            Field::Num(x) => fmt_f64(*x),
            other => other.human(),
        }
    }

    fn machine_json(&self) -> String {
        match self {
            Field::Num(x) => json_f64(*x),
            other => other.human(),
        }
    }
}

fn bounds_eval(args: EvalArgs, stdout: &mut dyn Write) -> Result<i32> {
    let params = MubBoundParams::new(args.d, args.m, args.purity, args.entropy)?;
    if args.indices.is_some() && args.bound != BoundId::Mim6 {
        return Err(Error::InvalidParameter("--indices only applies to mim6".into()));
    }
    let rhs = if args.bound == BoundId::Mim6 {
        let set = construct_mub(args.d)?;
        if args.m > set.len() {
            return Err(Error::InvalidParameter(format!(
                "M = {} exceeds the {} bases available for d = {}",
                args.m,
                set.len(),
                args.d
            )));
        }
        let povms = set.bases()[..args.m]
            .iter()
            .map(Povm::projective)
            .collect::<Result<Vec<_>>>()?;
        let indices = args.indices.clone().unwrap_or_else(|| vec![0; args.m]);
        bounds::mim6_rhs(&povms, &indices)?
    } else {
        bounds::eval_rhs(args.bound, &params)?
    };
    let kind = match args.bound.kind() {
        bounds::BoundKind::Lower => "lower",
        bounds::BoundKind::Upper => "upper",
    };
    emit(
        &args.output,
        Format::Csv,
        stdout,
        |f| {
            Ok(match f {
                Format::Csv => format!(
                    "bound_id,kind,d,M,purity,entropy,rhs\n{},{kind},{},{},{},{},{}\n",
                    args.bound,
                    args.d,
                    args.m,
                    fmt_f64(args.purity),
                    fmt_f64(args.entropy),
                    fmt_f64(rhs)
                ),
                Format::Json => format!(
                    "{{\"bound_id\": \"{}\", \"kind\": \"{kind}\", \"d\": {}, \"M\": {}, \"purity\": {}, \"entropy\": {}, \"rhs\": {}}}\n",
                    args.bound,
                    args.d,
                    args.m,
                    json_f64(args.purity),
                    json_f64(args.entropy),
                    json_f64(rhs)
                ),
            })
        },
        |out| Ok(writeln!(out, "{}", fmt_human(rhs))?),
    )?;
    Ok(0)
}

fn sweep(args: SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let mut config = SweepConfig::load(&args.config)?;
    let base = args.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    for p in [
        &mut config.output.csv,
        &mut config.output.summary,
        &mut config.output.counterexamples,
    ]
    .into_iter()
    .flatten()
    {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    if config.output.counterexamples.is_none() {
        config.output.counterexamples = Some(base.join("counterexamples.json"));
    }
    let result = harness::run_sweep(&config)?;

    let rows: Vec<Vec<String>> = result
        .summary
        .iter()
        .map(|(id, s)| {
            vec![
                id.to_string(),
                s.count.to_string(),
                fmt_human(s.min_slack),
                fmt_human(s.mean_slack),
                s.violations.to_string(),
                s.inconclusive.to_string(),
            ]
        })
        .collect();
    write_table(
        stdout,
        &["bound", "rows", "min_slack", "mean_slack", "violations", "inconclusive"],
        &rows,
    )?;
    if result.violations() > 0 {
        let path = config.output.counterexamples.as_ref().expect("set above");
        writeln!(
            stderr,
            "{} violation(s); counterexamples written to {}",
            result.violations(),
            path.display()
        )?;
        return Ok(EXIT_FAILED_CHECK);
    }
    Ok(0)
}

fn table1(args: Table1Args, stdout: &mut dyn Write) -> Result<i32> {
    let rows = harness::table1_intervals(args.dmax)?;
    emit(
        &args.output,
        Format::Csv,
        stdout,
        |f| {
            let mut s = String::new();
            match f {
                Format::Csv => {
                    s.push_str("M1,d_low,d_high\n");
                    for r in &rows {
                        let _ = writeln!(s, "{},{},{}", r.m1, r.d_low, r.d_high);
                    }
                }
                Format::Json => {
                    s.push_str("[\n");
                    for (k, r) in rows.iter().enumerate() {
                        let _ = writeln!(
                            s,
                            "  {{\"M1\": {}, \"d_low\": {}, \"d_high\": {}}}{}",
                            r.m1,
                            r.d_low,
                            r.d_high,
                            if k + 1 < rows.len() { "," } else { "" }
                        );
                    }
                    s.push_str("]\n");
                }
            }
            Ok(s)
        },
        |out| {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r.m1.to_string(), r.d_low.to_string(), r.d_high.to_string()])
                .collect();
            write_table(out, &["M1", "d_low", "d_high"], &table)
        },
    )?;
    Ok(0)
}

fn parse_mrange(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParameter(format!("cannot parse M range {spec:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let values: Vec<usize> = if let Some((a, b)) = spec.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        (a..=b).collect()
    } else if let Some((a, b)) = spec.split_once('-') {
        (num(a)?..=num(b)?).collect()
    } else {
        spec.split(',').map(num).collect::<Result<_>>()?
    };
    if values.is_empty() || values.contains(&0) {
        return Err(bad());
    }
    Ok(values)
}

fn winner_name(w: Winner, first: &str, second: &str) -> String {
    match w {
        Winner::First => first.to_string(),
        Winner::Second => second.to_string(),
        Winner::Tie => "tie".to_string(),
    }
}

fn compare(args: CompareArgs, stdout: &mut dyn Write) -> Result<i32> {
    let ms = match &args.mrange {
        Some(spec) => parse_mrange(spec)?,
        None => (2..=args.d + 1).collect(),
    };
    let rows = harness::compare_bounds(args.d, &ms)?;
    const HEADER: [&str; 10] = [
        "M",
        "prop1_pure",
        "pati_mub",
        "winner",
        "prop2_pure",
        "prop2_lp_pure",
        "winner",
        "prop3",
        "rmub12",
        "winner",
    ];
    let cells = |r: &harness::ComparisonRow, num: &dyn Fn(f64) -> String| {
        vec![
            r.m.to_string(),
            num(r.coherence.first),
            num(r.coherence.second),
            winner_name(r.coherence.winner, "prop1_pure", "pati_mub"),
            num(r.geometric.first),
            num(r.geometric.second),
            winner_name(r.geometric.winner, "prop2_pure", "prop2_lp_pure"),
            num(r.min_entropy.first),
            num(r.min_entropy.second),
            winner_name(r.min_entropy.winner, "prop3", "rmub12"),
        ]
    };
    emit(
        &args.output,
        Format::Csv,
        stdout,
        |f| {
            let mut s = String::new();
            match f {
                Format::Csv => {
                    s.push_str("d,M,prop1_pure,pati_mub,coherence_winner,prop2_pure,prop2_lp_pure,geometric_winner,prop3,rmub12,min_entropy_winner\n");
                    for r in &rows {
                        let _ = writeln!(s, "{},{}", args.d, cells(r, &fmt_f64).join(","));
                    }
                }
                Format::Json => {
                    s.push_str("[\n");
                    for (k, r) in rows.iter().enumerate() {
                        let c = cells(r, &json_f64);
                        let _ = writeln!(
                            s,
                            "  {{\"d\": {}, \"M\": {}, \"prop1_pure\": {}, \"pati_mub\": {}, \"coherence_winner\": \"{}\", \"prop2_pure\": {}, \"prop2_lp_pure\": {}, \"geometric_winner\": \"{}\", \"prop3\": {}, \"rmub12\": {}, \"min_entropy_winner\": \"{}\"}}{}",
                            args.d, c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7], c[8], c[9],
                            if k + 1 < rows.len() { "," } else { "" }
                        );
                    }
                    s.push_str("]\n");
                }
            }
            Ok(s)
        },
        |out| {
            let table: Vec<Vec<String>> = rows.iter().map(|r| cells(r, &fmt_human)).collect();
            write_table(out, &HEADER, &table)
        },
    )?;
    Ok(0)
}
