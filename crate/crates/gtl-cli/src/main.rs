use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use gtl::experiments::{
    self, ExperimentConfig, ExperimentKind, ExperimentReport, GraphMode, OutputFormat,
};
use gtl::graphon::GraphonSpec;

/// Regularized sampling, graphon networks and their GNN discretizations.
///
/// Every subcommand expands into one JSON experiment config; flags given on
/// the command line override the same fields of `--config`.
#[derive(Parser, Debug)]
#[command(name = "gtl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON experiment config to start from
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Seed of the test signal and first seed of random trials
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "GTL_THREADS")]
    threads: Option<usize>,

    /// Output file, or a directory that receives <subcommand>.<format>
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// csv or json
    #[arg(long, global = true)]
    format: Option<OutputFormat>,

    /// Record wall-clock times in the output (breaks byte-reproducibility)
    #[arg(long, global = true)]
    timings: bool,

    /// Print the expanded config and exit
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive N, r, sigma and the vertex count from a target accuracy
    Plan {
        #[arg(long)]
        epsilon: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Run the invariant suite
    Verify {
        /// Run only the named acceptance checks
        #[arg(long = "check", value_name = "NAME")]
        checks: Vec<String>,
    },
    /// Reconstruction error over a range of N
    SweepSampling {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Graphon network against the signal on a grid
    WnnEval {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        graph: GraphArgs,
        /// Number of evaluation points
        #[arg(long)]
        grid: Option<usize>,
    },
    /// GNN errors on deterministic or random graphs
    GnnEval {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        graph: GraphArgs,
        /// Graph sizes, comma separated
        #[arg(long = "n", value_delimiter = ',')]
        vertices: Option<Vec<usize>>,
        /// det or ran
        #[arg(long)]
        mode: Option<GraphMode>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// One weight vector evaluated on graphs of two sizes
    Transfer {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        /// Graph sizes used to fit the C/n rate, comma separated
        #[arg(long, value_delimiter = ',')]
        fit: Option<Vec<usize>>,
        /// Also evaluate on this adjacency matrix (.csv or binary)
        #[arg(long, value_name = "PATH")]
        adjacency: Option<PathBuf>,
    },
    /// Seeded random graphs against the deterministic graph
    RandomTrials {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long = "n")]
        vertices: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Constant in the reported probability expression
        #[arg(long = "c")]
        probability_constant: Option<f64>,
    },
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    /// Bandwidth: the signal lives on modes -m..m-1
    #[arg(long = "m")]
    m_frak: Option<usize>,
    /// Half sample count N
    #[arg(long = "N", conflicts_with = "half_counts")]
    half_count: Option<usize>,
    /// Several values of N, comma separated
    #[arg(long = "Ns", value_delimiter = ',')]
    half_counts: Option<Vec<usize>>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Override of the radius constant 3 pi
    #[arg(long)]
    c1: Option<f64>,
    /// Override of the width constant sqrt(6) pi
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    channels: Option<usize>,
    /// Relative tolerance of the adaptive quadrature
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct GraphArgs {
    /// ring, constant:P, tent:ETA0, sbm or sbm:P_IN,P_OUT[,SPLIT]
    #[arg(long)]
    graphon: Option<GraphonSpec>,
    /// Band half width of the ring certificate
    #[arg(long)]
    kappa: Option<f64>,
}

impl ModelArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        set(&mut c.m_frak, self.m_frak);
        if let Some(n) = self.half_count {
            c.half_counts = Some(vec![n]);
        }
        if let Some(ns) = &self.half_counts {
            c.half_counts = Some(ns.clone());
        }
        set(&mut c.alpha, self.alpha);
        set(&mut c.beta, self.beta);
        c.c1 = self.c1.or(c.c1);
        c.c2 = self.c2.or(c.c2);
        set(&mut c.channels, self.channels);
        set(&mut c.tolerances.rel_tol, self.rel_tol);
    }
}

impl GraphArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        set(&mut c.graphon, self.graphon);
        set(&mut c.kappa, self.kappa);
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Plan { .. } => ExperimentKind::Plan,
            Command::Verify { .. } => ExperimentKind::Verify,
            Command::SweepSampling { .. } => ExperimentKind::SweepSampling,
            Command::WnnEval { .. } => ExperimentKind::WnnEval,
            Command::GnnEval { .. } => ExperimentKind::GnnEval,
            Command::Transfer { .. } => ExperimentKind::Transfer,
            Command::RandomTrials { .. } => ExperimentKind::RandomTrials,
        }
    }

    fn apply(&self, c: &mut ExperimentConfig) {
        match self {
            Command::Plan { epsilon, model } => {
                c.epsilon = epsilon.or(c.epsilon);
                model.apply(c);
            }
            Command::Verify { checks } => {
                if !checks.is_empty() {
                    c.checks = checks.clone();
                }
            }
            Command::SweepSampling { model } => model.apply(c),
            Command::WnnEval { model, graph, grid } => {
                model.apply(c);
                graph.apply(c);
                set(&mut c.grid, *grid);
            }
            Command::GnnEval {
                model,
                graph,
                vertices,
                mode,
                trials,
            } => {
                model.apply(c);
                graph.apply(c);
                if vertices.is_some() {
                    c.vertices = vertices.clone();
                }
                set(&mut c.mode, *mode);
                set(&mut c.trials, *trials);
            }
            Command::Transfer {
                model,
                graph,
                n1,
                n2,
                fit,
                adjacency,
            } => {
                model.apply(c);
                graph.apply(c);
                if n1.is_some() || n2.is_some() {
                    let current = c.vertices();
                    let first = n1.or(current.first().copied()).unwrap_or(1024);
                    let second = n2.or(current.get(1).copied()).unwrap_or(4096);
                    c.vertices = Some(vec![first, second]);
                }
                if fit.is_some() {
                    c.fit_vertices = fit.clone();
                }
                if adjacency.is_some() {
                    c.adjacency = adjacency.clone();
                }
            }
            Command::RandomTrials {
                model,
                graph,
                vertices,
                trials,
                probability_constant,
            } => {
                model.apply(c);
                graph.apply(c);
                if let Some(n) = vertices {
                    c.vertices = Some(vec![*n]);
                }
                set(&mut c.trials, *trials);
                set(&mut c.probability_constant, *probability_constant);
            }
        }
    }
}

fn build_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let kind = cli.command.kind();
    let mut c = match &cli.global.config {
        Some(path) => {
            let c = ExperimentConfig::load(path)?;
            if c.kind != kind {
                bail!(
                    "config {} is a `{}` experiment, not `{kind}`",
                    path.display(),
                    c.kind
                );
            }
            c
        }
        None => ExperimentConfig::new(kind),
    };
    cli.command.apply(&mut c);
    let g = &cli.global;
    set(&mut c.seed, g.seed);
    c.threads = g.threads.or(c.threads);
    if g.out.is_some() {
        c.output.path = g.out.clone();
    }
    set(&mut c.output.format, g.format);
    c.timings |= g.timings;
    Ok(c)
}

fn emit(report: &ExperimentReport) -> anyhow::Result<()> {
    if report.config.output.path.is_some() {
        for p in report.save(&report.config.output)? {
            eprintln!("wrote {}", p.display());
        }
        return Ok(());
    }
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match report.config.output.format {
        OutputFormat::Csv => report.write_csv(&mut lock)?,
        OutputFormat::Json => report.write_json(&mut lock)?,
    }
    lock.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if cli.global.print_config {
        println!("{}", config.to_json());
        return ExitCode::SUCCESS;
    }
    let report = match experiments::run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if experiments::is_usage_error(&e) {
                2
            } else {
                1
            };
            return ExitCode::from(code);
        }
    };
    if let Err(e) = emit(&report).context("writing report") {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    for s in &report.summary {
        eprintln!("{} = {} ({:?})", s.name, s.value, s.provenance);
    }
    for n in &report.notes {
        eprintln!("note: {n}");
    }
    for v in &report.verdicts {
        eprintln!("{}", v.line());
    }
    if !report.passed() {
        let names: Vec<&str> = report.failures().map(|v| v.name.as_str()).collect();
        eprintln!("failed: {}", names.join(", "));
    }
    ExitCode::from(report.exit_code() as u8)
}
