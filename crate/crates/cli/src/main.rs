use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use peakcorr::harness::{
    compare_methods, default_comparison_configs, emit_outputs, read_file, run_experiment, sweep_grover_iterations,
    to_json, trajectory_estimates, write_file, ExperimentConfig, ExperimentMethod, Format, Output,
};
use peakcorr::{export_qasm, Error, NoiseParams, Result};

/// Peaked-state ITCF experiments on a statevector simulator.
#[derive(Parser, Debug)]
#[command(name = "peakcorr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single experiment and print or write its report.
    Run {
        #[command(flatten)]
        common: Common,
        /// Also write per-trajectory metrics to `trajectories.json` (needs --noise and --out).
        #[arg(long)]
        dump_trajectories: bool,
    },
    /// Sweep Grover iteration counts.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// First iteration count.
        #[arg(long, default_value_t = 1)]
        t_min: u32,
        /// Last iteration count (inclusive).
        #[arg(long, default_value_t = 10)]
        t_max: u32,
    },
    /// Side-by-side metrics for several configs (haar, grover, shallow by default).
    Compare {
        /// Config files; repeat the flag once per method.
        #[arg(long = "config", value_name = "FILE")]
        configs: Vec<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Lower the configured circuit and write it as OpenQASM 2.0.
    ExportQasm {
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        #[arg(long)]
        method: Option<ExperimentMethod>,
        /// Output directory; prints to stdout when omitted.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Dump the shot histogram of the configured state.
    Sample(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Method, overriding the config.
    #[arg(long)]
    method: Option<ExperimentMethod>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    /// Shot count; 0 selects exact estimation.
    #[arg(long)]
    shots: Option<u64>,
    /// Depolarizing noise as `p1,p2[,trajectories]`.
    #[arg(long, value_name = "P1,P2,TRAJ")]
    noise: Option<NoiseParams>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output directory; prints to stdout when omitted.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(shots) = self.shots {
            cfg.shots = shots;
        }
        if let Some(noise) = self.noise {
            cfg.noise = Some(noise);
        }
    }
}

fn load(path: Option<&Path>, method: Option<ExperimentMethod>) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::from_json(&read_file(p)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(m) = method {
        cfg.method = m;
    }
    Ok(cfg)
}

fn load_common(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = load(c.config.as_deref(), c.method)?;
    c.overrides.apply(&mut cfg);
    Ok(cfg)
}

fn deliver(output: Output<'_>, args: &OutputArgs, stem: &str) -> Result<()> {
    match &args.out {
        Some(dir) => {
            let path = dir.join(format!("{stem}.{}", args.format.extension()));
            emit_outputs(output, args.format, &path)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{}", output.render(args.format)?),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            common,
            dump_trajectories,
        } => {
            let cfg = load_common(&common)?;
            let report = run_experiment(&cfg)?;
            deliver(Output::Report(&report), &common.output, "report")?;
            if dump_trajectories {
                let dir = common.output.out.as_ref().ok_or_else(|| Error::Config {
                    field: "out".into(),
                    message: "--dump-trajectories needs an output directory".into(),
                })?;
                let path = dir.join("trajectories.json");
                write_file(&path, &to_json(&trajectory_estimates(&cfg)?))?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Sweep { common, t_min, t_max } => {
            if t_min > t_max {
                return Err(Error::Config {
                    field: "t_min".into(),
                    message: format!("{t_min} exceeds t_max {t_max}"),
                });
            }
            let cfg = load_common(&common)?;
            let sweep = sweep_grover_iterations(&cfg, &(t_min..=t_max).collect::<Vec<_>>())?;
            deliver(Output::Sweep(&sweep), &common.output, "sweep")
        }
        Command::Compare {
            configs,
            overrides,
            output,
        } => {
            let mut cfgs = if configs.is_empty() {
                default_comparison_configs()
            } else {
                configs
                    .iter()
                    .map(|p| load(Some(p), None))
                    .collect::<Result<Vec<_>>>()?
            };
            for cfg in &mut cfgs {
                overrides.apply(cfg);
            }
            let cmp = compare_methods(&cfgs)?;
            deliver(Output::Comparison(&cmp), &output, "comparison")
        }
        Command::ExportQasm { config, method, out } => {
            let resolved = load(config.as_deref(), method)?.resolve()?;
            let circuit = resolved.circuit().ok_or_else(|| Error::Config {
                field: "method".into(),
                message: "haar states have no circuit to export".into(),
            })?;
            let text = export_qasm(circuit)?;
            match out {
                Some(dir) => {
                    let path = dir.join("circuit.qasm");
                    write_file(&path, &text)?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Sample(common) => {
            let cfg = load_common(&common)?;
            if cfg.shots == 0 {
                return Err(Error::Config {
                    field: "shots".into(),
                    message: "sampling needs at least one shot".into(),
                });
            }
            let hist = cfg.resolve()?.sample(cfg.shots)?;
            deliver(Output::Histogram(&hist), &common.output, "histogram")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
