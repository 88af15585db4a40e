//! `weakties` — tie-strength percolation and push/republish diffusion
//! experiments on undirected social graphs.
//!
//! Every subcommand takes a graph source (an edge-list file via `--input`,
//! or a synthetic generator via `--generator` plus its parameters), runs one
//! experiment, and writes CSV files plus a run manifest into `--out-dir`.
//! A flat key=value config file can supply any flag; explicit flags win.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use weakties::runner::{parse_config, parse_config_file, run_experiment};

#[derive(Parser)]
#[command(name = "weakties", version, about = "Tie-strength structure and diffusion experiments on social graphs")]
struct Cli {
    /// Flat key=value config file; explicit flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Base RNG seed for the whole experiment.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for replications (default: all cores).
    #[arg(long, global = true)]
    threads: Option<u64>,

    /// Output directory for CSV files and the run manifest.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct InputArgs {
    /// Edge-list file: one `u v` pair per line.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Comment prefix for the edge-list parser.
    #[arg(long, value_name = "PREFIX")]
    comment_prefix: Option<String>,

    /// Token delimiter for the edge-list parser (default: whitespace).
    #[arg(long, value_name = "CHAR")]
    delimiter: Option<char>,

    /// Synthetic input: `scale-free` or `community`.
    #[arg(long, value_name = "KIND")]
    generator: Option<String>,

    /// Node count (scale-free generator).
    #[arg(short = 'n', long)]
    n: Option<u64>,

    /// Edges attached per new node (scale-free generator).
    #[arg(short = 'm', long)]
    m: Option<u64>,

    /// Number of communities (community generator).
    #[arg(long)]
    communities: Option<u64>,

    /// Nodes per community (community generator).
    #[arg(long)]
    community_size: Option<u64>,

    /// Intra-community edge probability (community generator).
    #[arg(long)]
    p_in: Option<f64>,

    /// Number of inter-community edges (community generator).
    #[arg(long)]
    k_out: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Load a graph and report its canonical size and component structure.
    LoadStats {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Export the per-edge neighborhood-overlap strength table.
    Strength {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Export the cumulative distribution of tie strengths.
    Cdf {
        #[command(flatten)]
        input: InputArgs,
        /// Threshold grid step (must divide 1).
        #[arg(long)]
        grid_step: Option<f64>,
    },
    /// Rank correlation between neighbor degree and tie strength.
    Correlate {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Strength-ordered edge removal sweep.
    Percolate {
        #[command(flatten)]
        input: InputArgs,
        /// Removal order: weak | strong.
        #[arg(long)]
        order: Option<String>,
        /// Removal fraction grid step (must divide 1).
        #[arg(long)]
        grid_step: Option<f64>,
        /// Giant-cluster fraction treated as collapsed.
        #[arg(long)]
        collapse_threshold: Option<f64>,
    },
    /// Push/republish cascades on the intact graph.
    Diffuse {
        #[command(flatten)]
        input: InputArgs,
        /// Navigating factor(s), comma-separated.
        #[arg(long)]
        alpha: Option<String>,
        /// Information strength(s) in [0,1], comma-separated.
        #[arg(long)]
        beta: Option<String>,
        /// Replications per (alpha, beta) cell.
        #[arg(long)]
        runs: Option<u64>,
        /// Event budget: `auto` (= node count) or an integer.
        #[arg(long)]
        tmax: Option<String>,
        /// Zero-strength substitute used before exponentiation.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Also write one CSV per replication.
        #[arg(long, action = ArgAction::SetTrue)]
        per_run: bool,
        /// Reuse the same replication streams (and seed nodes) across alpha values.
        #[arg(long, action = ArgAction::SetTrue)]
        paired_seeds: bool,
    },
    /// Remove a fraction of edges by strength order, then diffuse.
    RemoveDiffuse {
        #[command(flatten)]
        input: InputArgs,
        /// Removal order: weak | strong.
        #[arg(long)]
        order: Option<String>,
        /// Removal fractions as start:stop:step.
        #[arg(long)]
        fr_grid: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Replications per removal fraction.
        #[arg(long)]
        runs: Option<u64>,
        /// Event budget: `auto` (= node count) or an integer.
        #[arg(long)]
        tmax: Option<String>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Generate a synthetic graph and write it as an edge list.
    Gen {
        #[command(flatten)]
        input: InputArgs,
        /// Edge-list file to write (relative paths land in --out-dir).
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

impl Command {
    fn kind_name(&self) -> &'static str {
        match self {
            Command::LoadStats { .. } => "load-stats",
            Command::Strength { .. } => "strength",
            Command::Cdf { .. } => "cdf",
            Command::Correlate { .. } => "correlate",
            Command::Percolate { .. } => "percolate",
            Command::Diffuse { .. } => "diffuse",
            Command::RemoveDiffuse { .. } => "remove-diffuse",
            Command::Gen { .. } => "gen",
        }
    }
}

/// Collects only the flags the user actually set, as key=value pairs, so the
/// config layer can apply file values underneath and defaults at the bottom.
struct Flags(Vec<(String, String)>);

impl Flags {
    fn new() -> Self {
        Flags(Vec::new())
    }

    fn push<T: ToString>(&mut self, key: &str, value: &Option<T>) {
        if let Some(v) = value {
            self.0.push((key.to_string(), v.to_string()));
        }
    }

    fn push_bool(&mut self, key: &str, value: bool) {
        if value {
            self.0.push((key.to_string(), "true".to_string()));
        }
    }

    fn push_input(&mut self, input: &InputArgs) {
        self.push("input", &input.input.as_ref().map(|p| p.display().to_string()));
        self.push("comment-prefix", &input.comment_prefix);
        self.push("delimiter", &input.delimiter);
        self.push("generator", &input.generator);
        self.push("n", &input.n);
        self.push("m", &input.m);
        self.push("communities", &input.communities);
        self.push("community-size", &input.community_size);
        self.push("p-in", &input.p_in);
        self.push("k-out", &input.k_out);
    }
}

fn collect_flags(cli: &Cli) -> Vec<(String, String)> {
    let mut flags = Flags::new();
    flags.push("seed", &cli.seed);
    flags.push("threads", &cli.threads);
    flags.push(
        "out-dir",
        &cli.out_dir.as_ref().map(|p| p.display().to_string()),
    );
    match &cli.command {
        Command::LoadStats { input }
        | Command::Strength { input }
        | Command::Correlate { input } => flags.push_input(input),
        Command::Cdf { input, grid_step } => {
            flags.push_input(input);
            flags.push("grid-step", grid_step);
        }
        Command::Percolate {
            input,
            order,
            grid_step,
            collapse_threshold,
        } => {
            flags.push_input(input);
            flags.push("order", order);
            flags.push("grid-step", grid_step);
            flags.push("collapse-threshold", collapse_threshold);
        }
        Command::Diffuse {
            input,
            alpha,
            beta,
            runs,
            tmax,
            epsilon,
            per_run,
            paired_seeds,
        } => {
            flags.push_input(input);
            flags.push("alpha", alpha);
            flags.push("beta", beta);
            flags.push("runs", runs);
            flags.push("tmax", tmax);
            flags.push("epsilon", epsilon);
            flags.push_bool("per-run", *per_run);
            flags.push_bool("paired-seeds", *paired_seeds);
        }
        Command::RemoveDiffuse {
            input,
            order,
            fr_grid,
            alpha,
            beta,
            runs,
            tmax,
            epsilon,
        } => {
            flags.push_input(input);
            flags.push("order", order);
            flags.push("fr-grid", fr_grid);
            flags.push("alpha", alpha);
            flags.push("beta", beta);
            flags.push("runs", runs);
            flags.push("tmax", tmax);
            flags.push("epsilon", epsilon);
        }
        Command::Gen { input, output } => {
            flags.push_input(input);
            flags.push("output", &output.as_ref().map(|p| p.display().to_string()));
        }
    }
    flags.0
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    let file_entries = match &cli.config {
        None => Vec::new(),
        Some(path) => match parse_config_file(path) {
            Ok(entries) => entries,
            Err(err) => {
                eprintln!("error: {err}");
                return ExitCode::from(1);
            }
        },
    };

    let flags = collect_flags(&cli);
    let cfg = match parse_config(cli.command.kind_name(), &file_entries, &flags) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    };

    match run_experiment(&cfg) {
        Ok(output) => {
            for line in &output.summary {
                println!("{line}");
            }
            for (name, _) in &output.manifest.outputs {
                println!("wrote {}", output.out_dir.join(name).display());
            }
            println!(
                "wrote {}",
                output.out_dir.join(weakties::runner::MANIFEST_FILE).display()
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_usage() { 1 } else { 2 })
        }
    }
}
