use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use aplcm_core::report::{self, Format, OutputRecord, RowWriter};
use aplcm_core::verifier::IntRange;
use aplcm_core::{
    bounds, lcm_engine, BoundParams, Error, Family, LemmaId, Progression, SweepConfig,
};
use clap::{Args, Parser, Subcommand};

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "aplcm", version, about = "Exact LCMs of arithmetic progressions and their lower bounds")]
struct Cli {
    /// Output encoding: JSON lines or CSV.
    #[arg(long, global = true, default_value = "json")]
    format: Format,

    /// Worker threads for `sweep`.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Stream per-cell rows during `sweep`.
    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print u_n, L_n and the k_n-anchored quantities for one prefix.
    Compute(ComputeArgs),
    /// Check one lower bound at one prefix.
    Check(CheckArgs),
    /// Run bound families and lemma checks over a grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long)]
    u0: u64,
    #[arg(long)]
    r: u64,
    #[arg(long)]
    n: u64,
    /// Also report L_{n,k}, C_{n,k} and A_{n,k}.
    #[arg(long)]
    k: Option<u64>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    u0: u64,
    #[arg(long)]
    r: u64,
    #[arg(long)]
    n: u64,
    /// nair, hy, hk, new, or t14 (new with l = 3).
    #[arg(long)]
    family: String,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    l: Option<u64>,
    #[arg(long)]
    alpha: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON file with SweepConfig fields; replaces the grid flags.
    #[arg(long, conflicts_with_all = ["u0", "r", "n", "n_window", "a", "l", "alpha", "alpha_max", "families", "checks"])]
    config: Option<PathBuf>,
    /// Inclusive range `lo..hi` or a single value.
    #[arg(long)]
    u0: Option<IntRange>,
    #[arg(long)]
    r: Option<IntRange>,
    #[arg(long, conflicts_with = "n_window")]
    n: Option<IntRange>,
    /// Visit n from each cell's own threshold up to threshold + W.
    #[arg(long)]
    n_window: Option<u64>,
    #[arg(long)]
    a: Option<IntRange>,
    #[arg(long)]
    l: Option<IntRange>,
    #[arg(long, conflicts_with = "alpha_max")]
    alpha: Option<IntRange>,
    /// Shorthand for `--alpha <min a>..M`.
    #[arg(long)]
    alpha_max: Option<u64>,
    /// Comma-separated bound families: nair, hy, hk, new.
    #[arg(long, value_delimiter = ',')]
    families: Vec<String>,
    /// Comma-separated checks: l21, l22, l23, div-fact, div-cof, ineq23, ineq25, or all.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    /// Write bound rows here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write lemma verdict rows to this file.
    #[arg(long)]
    verdicts: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::Usage(err.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::Io(err)
    }
}

fn stdout_writer(format: Format) -> RowWriter<Box<dyn Write>> {
    RowWriter::new(format, Box::new(BufWriter::new(io::stdout().lock())))
}

fn file_writer(format: Format, path: &PathBuf) -> Result<RowWriter<Box<dyn Write>>, Failure> {
    let file = File::create(path)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", path.display())))?;
    Ok(RowWriter::new(format, Box::new(BufWriter::new(file))))
}

fn compute(cli: &Cli, args: &ComputeArgs) -> Result<u8, Failure> {
    let prog = Progression::new(args.u0, args.r)?;
    if let Some(k) = args.k {
        if k > args.n {
            return Err(Error::WindowOutOfRange { n: args.n, k }.into());
        }
    }
    let l_n = lcm_engine::lcm_prefix(&prog, args.n);
    let mut row = OutputRecord::new();
    row.push("u0", args.u0)
        .push("r", args.r)
        .push("n", args.n)
        .push("u_n", &prog.term(args.n))
        .push("L_n", &l_n);
    if args.n >= 1 {
        let rec = lcm_engine::record_with_prefix(&prog, args.n, l_n)?;
        report::record_fields(&mut row, &rec);
    }
    if let Some(k) = args.k {
        let win = prog.window(args.n, k)?;
        row.push("k", k)
            .push("L_n_k", &lcm_engine::lcm_suffix(&prog, args.n, k)?)
            .push("C_n_k", report::Value::Exact(win.c().to_string()))
            .push("A_n_k", &lcm_engine::cofactor(&prog, args.n, k)?);
    }
    let mut out = stdout_writer(cli.format);
    out.write(&row)?;
    out.flush()?;
    Ok(0)
}

fn check(cli: &Cli, args: &CheckArgs) -> Result<u8, Failure> {
    let prog = Progression::new(args.u0, args.r)?;
    let params = if args.family.eq_ignore_ascii_case("t14") {
        if args.l.is_some_and(|l| l != 3) {
            return Err(Failure::Usage("family t14 fixes l = 3".into()));
        }
        BoundParams::t14(
            args.a.ok_or_else(|| Failure::Usage("family t14 requires --a".into()))?,
            args.alpha.ok_or_else(|| Failure::Usage("family t14 requires --alpha".into()))?,
        )?
    } else {
        BoundParams::for_family(args.family.parse::<Family>()?, args.a, args.l, args.alpha)?
    };
    let l_n = lcm_engine::lcm_prefix(&prog, args.n);
    let rep = bounds::check(&params, &prog, args.n, &l_n);
    let mut out = stdout_writer(cli.format);
    out.write(&report::bound_row(&rep))?;
    out.flush()?;
    Ok(if rep.failed() { EXIT_FAILED } else { 0 })
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig, Failure> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        return serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("malformed config {}: {e}", path.display())));
    }
    let require = |v: Option<IntRange>, flag: &str| {
        v.ok_or_else(|| Failure::Usage(format!("sweep requires --{flag} or --config")))
    };
    let a_range = args.a.unwrap_or(IntRange::single(2));
    let alpha_range = match (args.alpha, args.alpha_max) {
        (Some(range), _) => range,
        (None, Some(max)) => IntRange::new(a_range.lo, max),
        (None, None) => IntRange::single(2),
    };
    let families = args
        .families
        .iter()
        .map(|s| s.parse::<Family>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut checks = Vec::new();
    for name in &args.checks {
        if name == "all" {
            checks.extend(LemmaId::ALL);
        } else {
            checks.push(name.parse::<LemmaId>()?);
        }
    }
    checks.sort();
    checks.dedup();
    if args.n.is_none() && args.n_window.is_none() {
        return Err(Failure::Usage("sweep requires --n or --n-window".into()));
    }
    Ok(SweepConfig {
        u0_range: require(args.u0, "u0")?,
        r_range: require(args.r, "r")?,
        n_range: args.n,
        n_window: args.n_window,
        a_range,
        l_range: args.l.unwrap_or(IntRange::single(2)),
        alpha_range,
        families,
        checks,
    })
}

fn sweep(cli: &Cli, args: &SweepArgs) -> Result<u8, Failure> {
    let config = sweep_config(args)?;
    if cli.jobs == 0 {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let outcome = match aplcm_core::sweep_with_jobs(&config, cli.jobs) {
        Ok(outcome) => outcome,
        Err(err @ Error::Integrality(_)) => {
            eprintln!("counterexample: {err}");
            return Ok(EXIT_FAILED);
        }
        Err(err) => return Err(err.into()),
    };

    let rows_to = match (&args.output, cli.verbose) {
        (Some(path), _) => Some(file_writer(cli.format, path)?),
        (None, true) => Some(stdout_writer(cli.format)),
        (None, false) => None,
    };
    let rows_on_stdout = args.output.is_none() && rows_to.is_some();
    if let Some(mut rows) = rows_to {
        for rep in &outcome.reports {
            rows.write(&report::bound_row(rep))?;
        }
        rows.flush()?;
    }
    if let Some(path) = &args.verdicts {
        let mut rows = file_writer(cli.format, path)?;
        for v in &outcome.verdicts {
            rows.write(&report::verdict_row(v))?;
        }
        rows.flush()?;
    }
    for v in outcome.failures() {
        eprintln!("failed {}: {}", v.lemma, v.witness.as_deref().unwrap_or(""));
    }
    for rep in outcome.reports.iter().filter(|r| r.failed()) {
        eprintln!(
            "failed {} at u0={} r={} n={}: L_n={} < bound={}",
            rep.params.family(),
            rep.prog.u0(),
            rep.prog.r(),
            rep.n,
            rep.l_n,
            rep.bound.as_ref().map(ToString::to_string).unwrap_or_default()
        );
    }

    if rows_on_stdout && cli.format == Format::Csv {
        // Separate the summary block from the row table.
        println!();
    }
    let mut summary = stdout_writer(cli.format);
    summary.write(&report::summary_row(&outcome))?;
    summary.flush()?;
    Ok(if outcome.failed == 0 { 0 } else { EXIT_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute(args) => compute(&cli, args),
        Command::Check(args) => check(&cli, args),
        Command::Sweep(args) => sweep(&cli, args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(err)) if err.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}
