//! Command-line front end: satisfiability, implication and equivalence
//! checks, random formulas, benchmarks and a small QDIMACS solver.

mod bench;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hyperqsat::engine::{
    check_equiv, check_sat, find_nonimplication, BackendPolicy, Budget, CheckResult,
};
use hyperqsat::formula::{parse, Formula, Quantifier};
use hyperqsat::qbf::{parse_qdimacs, QbfInstance};
use hyperqsat::random::{gen_random, PrefixShape, RandomSpec};
use hyperqsat::solve::default_solver_template;
use hyperqsat::solve::qsearch::{format_certificate, solve_qdimacs, QsearchOutcome};

pub use bench::{run_bench, BenchRecord};

pub const EXIT_SAT: u8 = 10;
pub const EXIT_UNSAT: u8 = 20;
pub const EXIT_UNKNOWN: u8 = 30;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_INTERNAL: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "hyperqsat", version, about = "HyperLTL satisfiability via QBF")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Search for a set of traces satisfying a formula.
    Sat {
        file: PathBuf,
        #[command(flatten)]
        check: CheckOpts,
    },
    /// Search for a trace set satisfying FILE1 but violating FILE2.
    Implies {
        file1: PathBuf,
        file2: PathBuf,
        #[command(flatten)]
        check: CheckOpts,
    },
    /// Search for non-implications in both directions.
    Equiv {
        file1: PathBuf,
        file2: PathBuf,
        #[command(flatten)]
        check: CheckOpts,
    },
    /// Print seeded random formulas, one per line.
    Random {
        #[command(flatten)]
        spec: RandomOpts,
        /// Write one file per formula into this directory instead.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the checker on every .hltl file of a directory, or on generated
    /// formulas when no directory is given.
    Bench {
        dir: Option<PathBuf>,
        #[command(flatten)]
        spec: RandomOpts,
        #[arg(long, default_value = "bench.csv")]
        csv: PathBuf,
        #[command(flatten)]
        check: CheckOpts,
    },
    /// Decide a QDIMACS file (exit 10 true, 20 false) and print the outer
    /// existential block as `V` lines.
    QbfSolve {
        file: PathBuf,
        /// Seconds.
        #[arg(long, default_value_t = 120.0)]
        timeout: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Builtin,
    Extern,
    Auto,
}

#[derive(Args, Debug, Clone)]
pub struct CheckOpts {
    #[arg(long, default_value_t = 8)]
    pub max_m: usize,
    #[arg(long, default_value_t = 8)]
    pub max_k: usize,
    /// Seconds per run.
    #[arg(long, default_value_t = 120.0)]
    pub timeout: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    pub backend: BackendArg,
    /// QBF solver command; `{file}` is replaced by the QDIMACS path.
    #[arg(long)]
    pub solver_cmd: Option<String>,
    /// Write the QDIMACS instance of the last (m, k) tried.
    #[arg(long)]
    pub emit_qdimacs: Option<PathBuf>,
    /// Write the model here as well.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RandomOpts {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub size: usize,
    #[arg(long, default_value_t = 2)]
    pub aps: usize,
    /// Quantifier alternations of a prefix with one variable per group.
    #[arg(long, default_value_t = 1)]
    pub alternations: usize,
    #[arg(long, default_value = "forall", value_parser = parse_quantifier)]
    pub start: Quantifier,
    /// Explicit groups such as `E2A2`; overrides --alternations/--start.
    #[arg(long, value_parser = |s: &str| parse_prefix(s).map(PrefixArg))]
    pub prefix: Option<PrefixArg>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

impl RandomOpts {
    /// Generator settings for the `i`-th formula; consecutive formulas use consecutive seeds.
    pub fn spec(&self, i: usize) -> anyhow::Result<RandomSpec> {
        if self.size == 0 || self.aps == 0 {
            bail!("--size and --aps must be positive");
        }
        let prefix = match &self.prefix {
            Some(PrefixArg(groups)) => PrefixShape::Groups(groups.clone()),
            None => PrefixShape::Alternating {
                alternations: self.alternations,
                start: self.start,
            },
        };
        Ok(RandomSpec {
            seed: self.seed.wrapping_add(i as u64),
            size: self.size,
            n_aps: self.aps,
            prefix,
        })
    }
}

/// Quantifier groups given on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixArg(pub Vec<(Quantifier, usize)>);

fn parse_quantifier(s: &str) -> Result<Quantifier, String> {
    match s {
        "forall" | "A" => Ok(Quantifier::Forall),
        "exists" | "E" => Ok(Quantifier::Exists),
        _ => Err(format!("expected `forall` or `exists`, got `{s}`")),
    }
}

/// `E2A2` → [(∃, 2), (∀, 2)]; a missing count means 1.
pub fn parse_prefix(s: &str) -> Result<Vec<(Quantifier, usize)>, String> {
    let mut groups = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        let q = match c {
            'E' | 'e' => Quantifier::Exists,
            'A' | 'a' => Quantifier::Forall,
            _ => return Err(format!("unexpected `{c}` in prefix `{s}`")),
        };
        let mut digits = String::new();
        while let Some(d) = chars.next_if(char::is_ascii_digit) {
            digits.push(d);
        }
        let n = if digits.is_empty() {
            1
        } else {
            digits.parse().map_err(|_| format!("bad count in `{s}`"))?
        };
        if n == 0 {
            return Err(format!("empty group in `{s}`"));
        }
        groups.push((q, n));
    }
    if groups.is_empty() {
        return Err("empty prefix".into());
    }
    Ok(groups)
}

/// A failed command: bad input (exit 1) or an internal error (exit 2).
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        Failure::Input(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Internal(e.into())
    }
}

/// Runs a command, writing its report to `out`; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> u8 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            EXIT_INTERNAL
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<u8, Failure> {
    match &cli.command {
        Command::Sat { file, check } => cmd_sat(file, check, out),
        Command::Implies {
            file1,
            file2,
            check,
        } => cmd_implies(file1, file2, check, out),
        Command::Equiv {
            file1,
            file2,
            check,
        } => cmd_equiv(file1, file2, check, out),
        Command::Random { spec, out_dir } => cmd_random(spec, out_dir.as_deref(), out),
        Command::Bench {
            dir,
            spec,
            csv,
            check,
        } => {
            let budget = budget(check)?;
            let records = run_bench(dir.as_deref(), spec, &budget, csv)?;
            writeln!(out, "{}", bench::summary(&records))?;
            Ok(0)
        }
        Command::QbfSolve { file, timeout } => cmd_qbf_solve(file, *timeout, out),
    }
}

pub fn read_formula(path: &Path) -> anyhow::Result<Formula> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse(&text).with_context(|| format!("{}", path.display()))
}

fn seconds(s: f64) -> anyhow::Result<Duration> {
    if !(s > 0.0 && s.is_finite()) {
        bail!("timeout must be a positive number of seconds");
    }
    Ok(Duration::from_secs_f64(s))
}

pub fn budget(opts: &CheckOpts) -> anyhow::Result<Budget> {
    if opts.max_m == 0 || opts.max_k == 0 {
        bail!("--max-m and --max-k must be positive");
    }
    let command = opts.solver_cmd.clone().or_else(default_solver_template);
    if let Some(cmd) = &command {
        if !cmd.contains("{file}") {
            bail!("solver command must contain the {{file}} placeholder");
        }
    }
    let backend =
        match opts.backend {
            BackendArg::Builtin => BackendPolicy::Builtin,
            BackendArg::Extern => BackendPolicy::External(command.ok_or_else(|| {
                anyhow!("the extern backend needs --solver-cmd or HYPERQSAT_SOLVER")
            })?),
            BackendArg::Auto => BackendPolicy::Auto(command),
        };
    Ok(Budget::new(
        opts.max_m,
        opts.max_k,
        seconds(opts.timeout)?,
        backend,
    ))
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn unknown_line(r: &CheckResult) -> String {
    match r {
        CheckResult::Unknown { reason, .. } => format!("unknown ({reason})"),
        CheckResult::Sat { .. } => unreachable!("caller handles witnesses"),
    }
}

fn last_bounds(r: &CheckResult) -> Option<(usize, usize)> {
    match r {
        CheckResult::Sat { m, k, .. } => Some((*m, *k)),
        CheckResult::Unknown { last, .. } => *last,
    }
}

/// Handles --emit-qdimacs and --model-out for a finished run of `f`.
fn write_artifacts(f: &Formula, r: &CheckResult, opts: &CheckOpts) -> Result<(), Failure> {
    if let (Some(path), Some((m, k))) = (&opts.emit_qdimacs, last_bounds(r)) {
        let inst = QbfInstance::build(f, m, k).map_err(|e| Failure::Internal(e.into()))?;
        write_atomic(path, inst.to_qdimacs().as_bytes())?;
    }
    if let (Some(path), Some(model)) = (&opts.model_out, r.model()) {
        write_atomic(path, model.to_string().as_bytes())?;
    }
    Ok(())
}

fn report_witness(r: &CheckResult, headline: &str, out: &mut dyn Write) -> std::io::Result<()> {
    if let CheckResult::Sat {
        model,
        m,
        k,
        backend,
    } = r
    {
        writeln!(out, "{headline}")?;
        write!(out, "{model}")?;
        log::info!("witness at m={m}, k={k} via {backend}");
    }
    Ok(())
}

fn engine_failure(e: hyperqsat::engine::EngineError) -> Failure {
    match e {
        hyperqsat::engine::EngineError::Formula(e) => Failure::Input(e.into()),
        e => Failure::Internal(e.into()),
    }
}

pub fn cmd_sat(file: &Path, opts: &CheckOpts, out: &mut dyn Write) -> Result<u8, Failure> {
    let f = read_formula(file)?;
    let b = budget(opts)?;
    let r = check_sat(&f, &b).map_err(engine_failure)?;
    write_artifacts(&f, &r, opts)?;
    if r.is_sat() {
        report_witness(&r, "sat", out)?;
        Ok(EXIT_SAT)
    } else {
        writeln!(out, "{}", unknown_line(&r))?;
        Ok(EXIT_UNKNOWN)
    }
}

pub fn cmd_implies(
    file1: &Path,
    file2: &Path,
    opts: &CheckOpts,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    let f = read_formula(file1)?;
    let g = read_formula(file2)?;
    let b = budget(opts)?;
    let r = find_nonimplication(&f, &g, &b).map_err(engine_failure)?;
    write_artifacts(&hyperqsat::formula::nonimplication(&f, &g), &r, opts)?;
    if r.is_sat() {
        report_witness(&r, "non-implication witnessed", out)?;
        Ok(EXIT_SAT)
    } else {
        writeln!(out, "{}", unknown_line(&r))?;
        Ok(EXIT_UNKNOWN)
    }
}

pub fn cmd_equiv(
    file1: &Path,
    file2: &Path,
    opts: &CheckOpts,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    let f = read_formula(file1)?;
    let g = read_formula(file2)?;
    let b = budget(opts)?;
    let (fg, gf) = check_equiv(&f, &g, &b).map_err(engine_failure)?;
    let name = |p: &Path| p.display().to_string();
    for (r, a, c) in [(&fg, file1, file2), (&gf, file2, file1)] {
        let head = format!("{} -/-> {}:", name(a), name(c));
        if r.is_sat() {
            report_witness(r, &format!("{head} non-implication witnessed"), out)?;
        } else {
            writeln!(out, "{head} {}", unknown_line(r))?;
        }
    }
    if fg.is_sat() || gf.is_sat() {
        writeln!(out, "not equivalent")?;
        Ok(EXIT_SAT)
    } else {
        writeln!(out, "no verdict")?;
        Ok(EXIT_UNKNOWN)
    }
}

pub fn cmd_random(
    opts: &RandomOpts,
    out_dir: Option<&Path>,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    for i in 0..opts.count {
        let spec = opts.spec(i)?;
        let f = gen_random(&spec);
        match out_dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(format!("rand_{}.hltl", spec.seed));
                write_atomic(&path, format!("{f}\n").as_bytes())?;
            }
            None => writeln!(out, "{f}")?,
        }
    }
    Ok(0)
}

pub fn cmd_qbf_solve(file: &Path, timeout: f64, out: &mut dyn Write) -> Result<u8, Failure> {
    let text =
        fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    let q = parse_qdimacs(&text).with_context(|| format!("{}", file.display()))?;
    let deadline = Instant::now() + seconds(timeout)?;
    match solve_qdimacs(&q, Some(deadline)) {
        QsearchOutcome::Sat(cert) => {
            writeln!(out, "s cnf 1")?;
            write!(out, "{}", format_certificate(&cert))?;
            Ok(EXIT_SAT)
        }
        QsearchOutcome::Unsat => {
            writeln!(out, "s cnf 0")?;
            Ok(EXIT_UNSAT)
        }
        QsearchOutcome::TimedOut => {
            writeln!(out, "s cnf -1")?;
            Ok(0)
        }
    }
}
