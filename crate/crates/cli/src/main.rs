use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use g2flow::reference::{discrepancy_ledger, render_report, FRAMES};
use g2flow::{verify, FlowKind};
use g2flow_cli::{
    exit, reduce_json, run_experiment, sweep_experiments, CliError, CliResult, ExperimentConfig,
    Overrides,
};

#[derive(Parser)]
#[command(
    name = "g2flow",
    version,
    about = "Reduced G2-structure flows on Lie frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every published formula against the engine; exits 4 on FAIL.
    Verify {
        /// Restrict to these frames (repeatable).
        #[arg(long = "frame", value_parser = clap::builder::PossibleValuesParser::new(FRAMES))]
        frames: Vec<String>,
    },
    /// Print the reduced ODE system as JSON.
    Reduce(ConfigArgs),
    /// Integrate one experiment; writes trajectory.csv and summary.json.
    Run(ConfigArgs),
    /// Write report.md: constants, verification table and discrepancy ledger.
    Report {
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run one experiment per initial point, concurrently.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Initial points separated by ';'. A ccy point is its scale `a`;
        /// a heisenberg point is `f0,a0,b0,c0`.
        #[arg(long, required = true)]
        points: String,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config (JSON). Defaults apply to missing fields.
    config: Option<PathBuf>,
    #[arg(long)]
    flow: Option<FlowKind>,
    /// Scale of the ccy initial data.
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// End of the time span.
    #[arg(long, allow_negative_numbers = true)]
    t1: Option<f64>,
    #[arg(long)]
    rtol: Option<f64>,
    /// Transversal curvature bound in the Λ diagnostic.
    #[arg(long = "K")]
    k: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> CliResult<ExperimentConfig> {
        let o = Overrides {
            flow: self.flow,
            a: self.a,
            t1: self.t1,
            rtol: self.rtol,
            k: self.k,
            out: self.out.clone(),
        };
        ExperimentConfig::resolve(self.config.as_deref(), &o)
    }
}

fn parse_points(s: &str) -> CliResult<Vec<Vec<f64>>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Config(format!("bad sweep value {v:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Verify { frames } => {
            let names: Vec<&str> = frames.iter().map(String::as_str).collect();
            let report = verify(&names)?;
            print!("{}", report.table());
            Ok(if report.has_failures() {
                exit::VERIFY_FAIL
            } else {
                exit::OK
            })
        }
        Command::Reduce(args) => {
            let cfg = args.resolve()?;
            let json = reduce_json(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&json).expect("json"));
            Ok(exit::OK)
        }
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let s = run_experiment(&cfg)?;
            println!(
                "{}: {:?}, singularity type {}",
                cfg.output_dir.display(),
                s.termination,
                s.singularity_type.as_deref().unwrap_or("n/a")
            );
            Ok(exit::OK)
        }
        Command::Report { out } => {
            let report = verify(&[])?;
            let md = render_report(&report, &discrepancy_ledger(&report))?;
            std::fs::create_dir_all(&out).map_err(|e| CliError::Io {
                path: out.clone(),
                source: e,
            })?;
            let path = out.join("report.md");
            std::fs::write(&path, md).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
            println!("{}", path.display());
            Ok(exit::OK)
        }
        Command::Sweep { config, points } => {
            let cfg = config.resolve()?;
            let items = sweep_experiments(&cfg, &parse_points(&points)?)?;
            let mut failed = 0;
            for it in &items {
                match &it.result {
                    Ok(s) => println!("{}: {:?}", it.dir.display(), s.termination),
                    Err(e) => {
                        failed += 1;
                        eprintln!("{}: {e}", it.dir.display());
                    }
                }
            }
            // every point failing is reported with the first failure's code
            if failed == items.len() {
                if let Some(Err(e)) = items.into_iter().next().map(|i| i.result) {
                    return Err(e);
                }
            }
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("g2flow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
