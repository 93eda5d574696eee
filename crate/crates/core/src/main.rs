use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use diffneuro::cli::{self, SweepSpec};
use diffneuro::{Bits, Error};

#[derive(Parser)]
#[command(
    name = "diffneuro",
    version,
    about = "Diffusion-to-neuron link simulator"
)]
struct Args {
    /// TOML configuration file (defaults are used when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set cnd.M=8`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Override sim.seed.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=diffneuro::config::MAX_SEED))]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one bit string and export every intermediate signal.
    Trace {
        #[arg(long)]
        bits: String,
        #[arg(long, default_value = "trace_out")]
        out: PathBuf,
    },
    /// Monte-Carlo BER over a parameter grid.
    Sweep {
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[arg(long, requires = "values2")]
        param2: Option<String>,
        #[arg(long, requires = "param2")]
        values2: Option<String>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value = "sweep_out")]
        out: PathBuf,
    },
    /// Single BER estimate, printed as JSON.
    Ber {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
}

fn run(args: Args) -> Result<(), Error> {
    let cfg = cli::load_config(args.config.as_deref(), &args.set, args.seed)?;
    match args.cmd {
        Cmd::Trace { bits, out } => {
            let bits: Bits = bits.parse()?;
            let summary = cli::cmd_trace(&cfg, &bits, &out)?;
            println!("decoded {}", summary.decoded);
            println!("spikes {}", summary.spikes.len());
            println!("max_amplitude_uA_per_cm2 {}", summary.max_amplitude);
        }
        Cmd::Sweep {
            param,
            values,
            param2,
            values2,
            trials,
            out,
        } => {
            let values = cli::parse_values(&values)?;
            let spec = match (param2, values2) {
                (Some(p2), Some(v2)) => {
                    SweepSpec::two(&param, &values, &p2, &cli::parse_values(&v2)?)
                }
                _ => SweepSpec::one(&param, &values),
            };
            std::fs::create_dir_all(&out)?;
            let file = std::fs::File::create(out.join("sweep.csv"))?;
            cli::sweep_to(
                &cfg,
                &spec,
                trials,
                std::io::BufWriter::new(file),
                |done, total| {
                    eprintln!("[{done}/{total}]");
                },
            )?;
        }
        Cmd::Ber { trials } => {
            let est = cli::cmd_ber(&cfg, trials)?;
            println!("{}", cli::ber_json(&est));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
