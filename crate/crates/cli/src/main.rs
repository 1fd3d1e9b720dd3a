mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "gtcode", version, about = "Disjunct codes for multiplexed TDC readout")]
struct Cli {
    /// Read options from a key=value file; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Delimiter for table outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Csv,
}

impl Format {
    fn sep(self) -> char {
        match self {
            Format::Tsv => '\t',
            Format::Csv => ',',
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build a code and write it as GTMX.
    Construct(ConstructArgs),
    /// Check an external code against its declared parameters and certify it.
    Import(ImportArgs),
    /// Certify or falsify d-disjunctness or d-separability.
    Verify(VerifyArgs),
    /// Evaluate upper and lower bounds on the number of rows.
    Bounds(BoundsArgs),
    /// Decode a TDC timestamp stream or a single test vector.
    Decode(DecodeArgs),
    /// Simulate scintillation events through a sensor and decoder.
    Simulate(SimulateArgs),
    /// Missed firings over a grid of dead times and TDC intervals.
    Sweep(SweepArgs),
    /// TDC counts of the cross-strip design against the catalog codes.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true))]
struct ConstructArgs {
    /// Recipe such as "(13,4,10)_13^Iq,s(8)".
    #[arg(long, group = "source")]
    recipe: Option<String>,
    /// per_pixel, cross_strip or binary_counting; needs --grid.
    #[arg(long, group = "source")]
    reference: Option<String>,
    /// Random greedy search; needs --t, --w and --d.
    #[arg(long, group = "source")]
    greedy: bool,
    /// Chinese remainder sieve over the tabulated prime powers for this d.
    #[arg(long, group = "source", value_name = "D")]
    sieve: Option<u32>,
    /// Chinese remainder sieve over these pairwise coprime moduli.
    #[arg(long, group = "source", value_delimiter = ',')]
    moduli: Option<Vec<u64>>,
    /// Number of columns wanted.
    #[arg(long)]
    n: Option<usize>,
    /// Grid side for reference designs.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    /// Column weight, or a sweep such as 5..9 or 5,7,9.
    #[arg(long)]
    w: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    /// Candidate draws for greedy search and extension.
    #[arg(long, default_value_t = 10_000_000)]
    max_draws: u64,
    /// Register an inner code for recipes, as NAME=FILE.
    #[arg(long, value_name = "NAME=FILE")]
    inner: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ImportArgs {
    /// GTMX file or a plain list of columns, one per line.
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    weight: Option<usize>,
    /// Minimum Hamming distance between columns.
    #[arg(long)]
    distance: Option<usize>,
    /// Maximum overlap between columns.
    #[arg(long)]
    overlap: Option<usize>,
    /// Descriptor stored with the code (default: the file stem).
    #[arg(long)]
    desc: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Cert,
    Exact,
    Random,
    Separable,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Exact mode: check this many random target columns instead of all.
    #[arg(long)]
    targets: Option<usize>,
    #[arg(long, default_value_t = gtcode::verify::DEFAULT_TRIALS)]
    trials: u64,
    /// Search nodes (exact) or supports (separable) before giving up.
    #[arg(long, default_value_t = gtcode::verify::DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Layout {
    Long,
    Wide,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, default_value_t = 3600)]
    n: u64,
    /// A range such as 2..6 or a list such as 2,4.
    #[arg(long, default_value = "2..6")]
    d: String,
    /// Row letters such as a,c,t, or "computed" (default: every row).
    #[arg(long)]
    rows: Option<String>,
    #[arg(long, value_enum, default_value_t = Layout::Long)]
    layout: Layout,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true))]
struct DecodeArgs {
    #[arg(long)]
    code: PathBuf,
    /// CSV with header tdc_id,time_ps.
    #[arg(long, group = "input")]
    tdc: Option<PathBuf>,
    /// One test vector: the rows that fired, comma separated.
    #[arg(long, group = "input", value_delimiter = ',', num_args = 0..)]
    vector: Option<Vec<u32>>,
    #[arg(long, default_value_t = 40)]
    interval_ps: u64,
    /// Merge windows separated by at most this many empty windows.
    #[arg(long)]
    burst_gap: Option<u64>,
    /// Use the lookup decoder (1-separable codes only).
    #[arg(long)]
    lookup: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ScintArgs {
    /// Photons per MeV.
    #[arg(long, default_value_t = 26_000.0)]
    yield_per_mev: f64,
    #[arg(long, default_value_t = 0.511)]
    energy_mev: f64,
    #[arg(long, default_value_t = 40.0)]
    decay_ns: f64,
    #[arg(long, default_value_t = 1000)]
    events: usize,
    #[arg(long, default_value_t = 10_000)]
    event_gap_ns: u64,
    #[arg(long, default_value_t = 0.70)]
    fill_factor: f64,
    #[arg(long, default_value_t = 0.50)]
    quantum_eff: f64,
    /// Grid side; the code needs at least side² columns.
    #[arg(long, default_value_t = 120)]
    grid: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    code: PathBuf,
    #[command(flatten)]
    scint: ScintArgs,
    #[arg(long, default_value_t = 20.0)]
    dead_ns: f64,
    #[arg(long, default_value_t = 40)]
    tdc_ps: u64,
    /// Replace generated photons with a CSV (event_id,time_ps[,pixel_id]).
    #[arg(long)]
    photons: Option<PathBuf>,
    /// Also write the generated photons as CSV.
    #[arg(long)]
    export_photons: Option<PathBuf>,
    /// Decode uniform random supports of these sizes instead of events.
    #[arg(long, value_delimiter = ',')]
    support_sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Directory of GTMX codes; each becomes one column of the table.
    #[arg(long)]
    codes: PathBuf,
    #[command(flatten)]
    scint: ScintArgs,
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    dead_ns: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
    tdc_ps: Vec<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Grid sides (default: every side in the catalog).
    #[arg(long, value_delimiter = ',')]
    sides: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Ran to completion but found a violation.
pub(crate) struct Violation;

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os().collect()))
}

fn run(args: Vec<OsString>) -> u8 {
    let mut cmd = Cli::command().mut_subcommands(|s| s.args_override_self(true));
    if args.len() <= 1 {
        eprint!("{}", cmd.render_help());
        return 1;
    }
    let args = match config::expand(args, &cmd) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    let matches = match cmd.try_get_matches_from_mut(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let header = config::Header::from_matches(cmd.find_subcommand(name).expect("parsed subcommand"), sub);
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return 1;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return 1;
        }
    }
    match commands::dispatch(cli.cmd, cli.format.sep(), header) {
        Ok(None) => 0,
        Ok(Some(Violation)) => 2,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
