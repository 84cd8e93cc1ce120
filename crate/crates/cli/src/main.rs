mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Query biological relation tables and run experiment analytics.
#[derive(Debug, Parser)]
#[command(name = "biorel", version, about)]
struct Cli {
    /// Configuration file of key=value lines
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Cache and backend directory
    #[arg(long, global = true, value_name = "DIR")]
    data_dir: Option<String>,
    /// memory, kv or sql
    #[arg(long, global = true)]
    backend: Option<String>,
    /// Base URL of the table repository (http, https or file)
    #[arg(long, global = true, value_name = "URL")]
    repo_url: Option<String>,
    /// auto, prompt or never
    #[arg(long, global = true, value_name = "POLICY")]
    fetch_policy: Option<String>,
    /// Open the backend without writing to it
    #[arg(long, global = true)]
    read_only: bool,
    /// More log output on stderr (-v, -vv)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List catalog relations: name/arity, organism, cell
    Tables {
        /// "", org or org/db
        selector: Option<String>,
    },
    /// Print matching rows as TSV; "?" leaves a column free
    Query {
        name: String,
        #[arg(allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// Make sure the selected tables are cached and loaded
    Fetch { selector: Option<String> },
    /// Row and distinct value counts per relation
    Stats { selector: Option<String> },
    /// Build canonical tables from upstream dumps laid out as <org>/<db>/
    Build {
        dumps: PathBuf,
        /// Output directory; defaults to the data directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Recorded build date, YYYY-MM-DD; defaults to today
        #[arg(long)]
        build_date: Option<String>,
    },
    /// Time a workload on a generated map in each backend
    Bench {
        #[arg(long, default_value_t = 100_000)]
        rows: usize,
        /// load, full_scan, keyed_lookup or reverse_lookup
        #[arg(long, default_value = "keyed_lookup")]
        workload: String,
        #[arg(long, default_value_t = 1000)]
        ops: usize,
        /// Comma separated backends
        #[arg(long, default_value = "memory,kv,sql")]
        backends: String,
    },
    /// STRING graph of an experiment's hits within a gene family
    FamilyGraph {
        csv: PathBuf,
        /// File of symbols, or a GO term such as GO:0006914
        family: String,
        #[command(flatten)]
        flags: AnalysisFlags,
    },
    /// GO over-representation of the hits, with a graph per significant term
    GoOver {
        csv: PathBuf,
        /// Write the report here instead of standard output
        #[arg(long, value_name = "FILE")]
        tsv: Option<PathBuf>,
        #[command(flatten)]
        flags: AnalysisFlags,
    },
    /// Show effective settings and the layer each comes from
    Config,
}

#[derive(Debug, Args, Default)]
struct AnalysisFlags {
    /// hs or mouse
    #[arg(long)]
    organism: Option<String>,
    /// protein or symbol
    #[arg(long)]
    id_kind: Option<String>,
    #[arg(long)]
    id_column: Option<String>,
    #[arg(long)]
    fc_column: Option<String>,
    #[arg(long)]
    pvalue_column: Option<String>,
    #[arg(long)]
    max_pvalue: Option<String>,
    #[arg(long)]
    min_abs_lfc: Option<String>,
    /// both, up or down
    #[arg(long)]
    direction: Option<String>,
    /// STRING weight threshold, 0..=1000
    #[arg(long)]
    min_weight: Option<String>,
    /// Keep family genes that are not hits
    #[arg(long)]
    include_absent: bool,
    /// Significance level on adjusted p-values
    #[arg(long)]
    alpha: Option<String>,
    /// bh, bonferroni or none
    #[arg(long)]
    adjustment: Option<String>,
    /// svg or dot
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    node_size: Option<String>,
    /// Leave out nodes without edges
    #[arg(long)]
    no_isolated: bool,
    #[arg(long)]
    color_up: Option<String>,
    #[arg(long)]
    color_down: Option<String>,
    /// Directory for graph files
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

impl AnalysisFlags {
    fn settings(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("organism", self.organism.clone()),
            ("id_kind", self.id_kind.clone()),
            ("id_column", self.id_column.clone()),
            ("fc_column", self.fc_column.clone()),
            ("pvalue_column", self.pvalue_column.clone()),
            ("max_pvalue", self.max_pvalue.clone()),
            ("min_abs_log2fc", self.min_abs_lfc.clone()),
            ("direction", self.direction.clone()),
            ("min_weight", self.min_weight.clone()),
            ("include_absent", self.include_absent.then(|| "true".into())),
            ("alpha", self.alpha.clone()),
            ("adjustment", self.adjustment.clone()),
            ("format", self.format.clone()),
            ("node_size", self.node_size.clone()),
            ("include_isolated", self.no_isolated.then(|| "false".into())),
            ("color_up", self.color_up.clone()),
            ("color_down", self.color_down.clone()),
        ]
    }
}

/// Exit status classes.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Usage(String),
    /// Exit 1.
    Operational(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("biorel: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Operational(msg)) => {
            eprintln!("biorel: {msg}");
            ExitCode::from(1)
        }
    }
}
