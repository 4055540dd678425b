use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rwre_cli::{parse_law, render, replay, run, write_atomic, CliError, Experiment, Format, RunConfig, RunRecord, SweepParameter};
use rwre_core::env::EnvironmentLaw;
use rwre_core::io::read_edge_list;
use rwre_core::network::BallNorm;

#[derive(Parser)]
#[command(name = "rwre", version, about = "Random walks in random environments and resistor networks")]
struct Cli {
    /// Run the experiment described in this TOML or JSON file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config's.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Euclidean,
    Manhattan,
}

#[derive(Args)]
struct LawArg {
    /// `det:P`, `finite:P@W,...`, `uniform:LO,HI[,DELTA]` or a JSON object.
    #[arg(long, value_parser = law_parser)]
    law: EnvironmentLaw,
}

fn law_parser(s: &str) -> Result<EnvironmentLaw, String> {
    parse_law(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Recurrence class, speed and critical exponent of a law.
    Classify(LawArg),
    /// Walk endpoints; annealed unless --env-seed fixes the environment.
    Simulate {
        #[command(flatten)]
        law: LawArg,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        walks: u64,
        #[arg(long)]
        env_seed: Option<u64>,
        /// Also record the path and local time of the first walk.
        #[arg(long)]
        trajectory: bool,
    },
    /// Left excursions from site 1 in one sampled environment.
    Excursion {
        #[command(flatten)]
        law: LawArg,
        #[arg(long)]
        count: u64,
        #[arg(long)]
        radius: Option<u64>,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Rescaled endpoints of a recurrent walk over many environments.
    Sinai {
        #[command(flatten)]
        law: LawArg,
        #[arg(long)]
        horizon: u64,
        #[arg(long)]
        envs: u64,
        #[arg(long)]
        walks: u64,
    },
    /// Voltages, resistance and escape probability of an edge-list network.
    Network {
        /// CSV with columns u,v,conductance.
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        source: usize,
        #[arg(long)]
        sink: usize,
        #[arg(long, default_value_t = 0)]
        mc_trials: u64,
    },
    /// Escape probability from the centre of lattice balls.
    Polya {
        #[arg(long)]
        dimension: usize,
        #[arg(long, value_delimiter = ',')]
        radii: Vec<u32>,
        #[arg(long, value_enum, default_value_t = Norm::Euclidean)]
        norm: Norm,
    },
    /// Graphene puddle network experiments.
    Graphene {
        #[command(subcommand)]
        command: GrapheneCommand,
    },
    /// Hit-before-return probabilities: exact, Monte Carlo and closed formula.
    Eq23 {
        #[command(flatten)]
        law: LawArg,
        #[arg(long, value_delimiter = ',', default_value = "3,5,8")]
        ks: Vec<i64>,
        #[arg(long, default_value_t = 20)]
        envs: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Rerun a stored record and check the results are identical.
    Replay { record: PathBuf },
}

#[derive(Subcommand)]
enum GrapheneCommand {
    /// Finite-size scaling of the mean conductance.
    Scaling {
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long)]
        realizations: u64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p: f64,
    },
    /// Mean conductance over a grid of gamma or p.
    Sweep {
        #[arg(long, value_enum)]
        over: Over,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        grid: Option<Vec<f64>>,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        realizations: u64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Over {
    Gamma,
    P,
}

fn experiment(cmd: Command) -> Result<Experiment, CliError> {
    Ok(match cmd {
        Command::Classify(l) => Experiment::Classify { law: l.law },
        Command::Simulate { law, steps, walks, env_seed, trajectory } => {
            Experiment::Simulate { law: law.law, n_steps: steps, n_walks: walks, env_seed, trajectory }
        }
        Command::Excursion { law, count, radius, cap } => {
            Experiment::Excursion { law: law.law, n_excursions: count, radius, cap }
        }
        Command::Sinai { law, horizon, envs, walks } => {
            Experiment::Sinai { law: law.law, n: horizon, n_env: envs, n_walks_per_env: walks }
        }
        Command::Network { edges, nodes, source, sink, mc_trials } => {
            let file = std::fs::File::open(&edges).map_err(|e| CliError::Config(format!("{}: {e}", edges.display())))?;
            let net = read_edge_list(file, nodes).map_err(|e| CliError::Config(e.to_string()))?;
            Experiment::Network {
                n_nodes: net.n_nodes(),
                edges: net.edges().iter().map(|e| (e.u, e.v, e.conductance)).collect(),
                source,
                sink,
                mc_trials,
            }
        }
        Command::Polya { dimension, radii, norm } => Experiment::Polya {
            dimension,
            radii,
            norm: match norm {
                Norm::Euclidean => BallNorm::Euclidean,
                Norm::Manhattan => BallNorm::Manhattan,
            },
        },
        Command::Graphene { command } => match command {
            GrapheneCommand::Scaling { sizes, realizations, c, gamma, p } => {
                Experiment::GrapheneScaling { sizes, n_realizations: realizations, c, gamma, p }
            }
            GrapheneCommand::Sweep { over, grid, size, realizations, c, gamma } => Experiment::GrapheneSweep {
                parameter: match over {
                    Over::Gamma => SweepParameter::Gamma,
                    Over::P => SweepParameter::P,
                },
                grid,
                size,
                n_realizations: realizations,
                c,
                gamma,
            },
        },
        Command::Eq23 { law, ks, envs, trials } => {
            Experiment::Eq23Harness { law: law.law, ks, n_envs: envs, n_trials: trials }
        }
        Command::Replay { .. } => unreachable!("handled before"),
    })
}

fn emit(cli: &Cli, record: &RunRecord) -> Result<(), CliError> {
    match &cli.out {
        Some(out) => {
            let files = render(record, out, cli.format);
            for (path, _) in &files {
                if path.exists() && !cli.force {
                    return Err(CliError::Config(format!("{} exists; pass --force to overwrite", path.display())));
                }
            }
            for (path, body) in files {
                write_atomic(&path, &body, cli.force)?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => match cli.format {
            Format::Json => print!("{}", record.to_json()),
            Format::Csv => {
                print!("{}", record.metrics_csv());
                for (name, t) in &record.tables {
                    println!("\n# {name}");
                    print!("{}", record.table_csv(t));
                }
            }
        },
    }
    Ok(())
}

fn main_inner(mut cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let command = cli.command.take();
    let record = match command {
        Some(Command::Replay { record }) => {
            let text = std::fs::read_to_string(&record).map_err(|e| CliError::Config(format!("{}: {e}", record.display())))?;
            let stored = RunRecord::from_json(&text)?;
            let fresh = replay(&stored)?;
            eprintln!("replay of {} matches", record.display());
            fresh
        }
        other => {
            let config = match (&cli.config, other) {
                (Some(path), None) => {
                    let mut c = RunConfig::load(path)?;
                    if let Some(s) = cli.seed {
                        c.seed = s;
                    }
                    c
                }
                (None, Some(cmd)) => {
                    let seed = cli.seed.ok_or_else(|| CliError::Config("--seed is required".into()))?;
                    RunConfig { seed, experiment: experiment(cmd)? }
                }
                (Some(_), Some(_)) => return Err(CliError::Config("give either --config or a subcommand".into())),
                (None, None) => return Err(CliError::Config("nothing to run; see --help".into())),
            };
            run(&config)?
        }
    };
    if let Some(t) = record.wall_time {
        eprintln!("wall time {t:.3} s");
    }
    emit(&cli, &record)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rwre: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
