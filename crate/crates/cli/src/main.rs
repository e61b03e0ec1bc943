use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pairedconv::conv_schemes::SchemeId;
use pairedconv::image_pipeline::{DisplayPolicy, Selection, WidthPolicy};
use pairedconv::qsim::SuperpositionMode;
use pairedconv_cli::{
    cmd_bench, cmd_dpt, cmd_edge, cmd_measure_signal, cmd_measure_sim, cmd_verify, format_bench,
    list_schemes, parse_sizes, CliError, EdgeOptions, MeasureOptions, SignalMeasureOptions,
    DEFAULT_SEED,
};

#[derive(Parser)]
#[command(
    name = "pairedconv",
    version,
    about = "Paired-transform convolution and edge detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Affine,
    Abs,
}

impl From<Norm> for DisplayPolicy {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Affine => DisplayPolicy::Affine,
            Norm::Abs => DisplayPolicy::Abs,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Image: draw channels with probability proportional to c_k^2.
    Weighted,
    /// Image: draw uniformly among the nonzero channels.
    Uniform,
    /// Signal: per-position normalized windows.
    Standard,
    /// Signal: one global normalization.
    Psi,
}

#[derive(Subcommand)]
enum Command {
    /// Integer and orthonormal paired transform of a vector (stdin or --input).
    Dpt {
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(long)]
        csv: bool,
    },
    /// Per-channel images of a PGM under one scheme.
    Edge {
        #[arg(required_unless_present = "list_schemes")]
        image: Option<PathBuf>,
        #[arg(long, default_value = "s8-c")]
        scheme: SchemeId,
        /// Comma-separated channel indices (default: all nonzero channels).
        #[arg(long, value_delimiter = ',')]
        channels: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "affine")]
        norm: Norm,
        /// Zero-pad rows to a power-of-two width.
        #[arg(long)]
        pad: bool,
        #[arg(short, long, default_value = ".")]
        out_dir: PathBuf,
        /// Print the scheme catalog and exit.
        #[arg(long)]
        list_schemes: bool,
    },
    /// Simulated one-shot measured image, or a shot histogram for a 1-D signal.
    MeasureSim {
        #[arg(required_unless_present = "signal")]
        image: Option<PathBuf>,
        /// Whitespace-separated 1-D signal; switches to histogram output.
        #[arg(long, conflicts_with = "image")]
        signal: Option<PathBuf>,
        #[arg(long, default_value = "s8-c")]
        scheme: SchemeId,
        /// weighted|uniform for images, standard|psi for signals.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, value_enum, default_value = "affine")]
        norm: Norm,
        #[arg(long)]
        pad: bool,
        #[arg(short, long, default_value = ".")]
        out_dir: PathBuf,
        /// Histogram CSV path (signal mode); printed to stdout if omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Oracle, identity, and circuit checks; exits 4 on any failure.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Fast vs matrix timing and addition counts.
    Bench {
        /// `4..1024` or a comma list.
        #[arg(long, default_value = "4..1024")]
        sizes: String,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn width_policy(pad: bool) -> WidthPolicy {
    if pad {
        WidthPolicy::Pad
    } else {
        WidthPolicy::Reject
    }
}

fn read_input(path: Option<PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(&p).map_err(|source| CliError::Io { path: p, source }),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|source| CliError::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
            Ok(s)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Dpt { input, csv } => {
            print!("{}", cmd_dpt(&read_input(input)?, csv)?);
        }
        Command::Edge {
            image,
            scheme,
            channels,
            norm,
            pad,
            out_dir,
            list_schemes: list,
        } => {
            if list {
                print!("{}", list_schemes());
                return Ok(());
            }
            let out = cmd_edge(&EdgeOptions {
                input: image.expect("required by clap"),
                scheme,
                channels,
                display: norm.into(),
                width: width_policy(pad),
                out_dir,
            })?;
            for (_, path) in &out.channel_files {
                println!("{}", path.display());
            }
            println!("{}", out.manifest.display());
        }
        Command::MeasureSim {
            image,
            signal,
            scheme,
            mode,
            seed,
            shots,
            norm,
            pad,
            out_dir,
            csv,
        } => {
            if let Some(input) = signal {
                let mode = match mode {
                    None | Some(Mode::Psi) => SuperpositionMode::Psi,
                    Some(Mode::Standard) => SuperpositionMode::Standard,
                    Some(_) => {
                        return Err(CliError::Parse(
                            "signal mode takes --mode standard or psi".into(),
                        ))
                    }
                };
                let hist = cmd_measure_signal(&SignalMeasureOptions {
                    input,
                    scheme,
                    mode,
                    shots,
                    seed,
                    pad,
                    out: csv.clone(),
                })?;
                if csv.is_none() {
                    print!("{}", hist.to_csv());
                }
            } else {
                let selection = match mode {
                    None | Some(Mode::Weighted) => Selection::Weighted,
                    Some(Mode::Uniform) => Selection::Uniform,
                    Some(_) => {
                        return Err(CliError::Parse(
                            "image mode takes --mode weighted or uniform".into(),
                        ))
                    }
                };
                let path = cmd_measure_sim(&MeasureOptions {
                    input: image.expect("required by clap"),
                    scheme,
                    selection,
                    seed,
                    display: norm.into(),
                    width: width_policy(pad),
                    out_dir,
                })?;
                println!("{}", path.display());
            }
        }
        Command::Verify { seed } => {
            let schemes: Vec<_> = SchemeId::ALL.iter().map(|id| id.scheme().clone()).collect();
            let report = cmd_verify(&schemes, seed);
            for line in &report.lines {
                println!("{line}");
            }
            if !report.passed() {
                return Err(CliError::Verification);
            }
        }
        Command::Bench { sizes, reps, seed } => {
            let rows = cmd_bench(&parse_sizes(&sizes)?, reps, seed)?;
            print!("{}", format_bench(&rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
