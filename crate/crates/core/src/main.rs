use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use leo_outage::cli::{apply_overrides, parse_config, preset, presets, run_experiment, write_rows, ExperimentSpec};
use leo_outage::{ConfigError, Error};

#[derive(Parser)]
#[command(name = "leo-outage", version, about = "Outage probability sweeps for LEO satellite IoT uplinks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file or a named preset and write CSV.
    Run {
        /// Experiment file. With --preset it overrides preset fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        realizations: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the preset catalog.
    ListPresets,
    /// Parse and check an experiment file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Config(String),
    Numeric(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(e) => Failure::Config(e.to_string()),
            Error::Numeric(e) => Failure::Numeric(e.to_string()),
            e @ Error::Io { .. } => Failure::Io(e.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))
}

fn run(
    config: Option<PathBuf>,
    preset_name: Option<String>,
    seed: Option<u64>,
    realizations: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let text = config.as_deref().map(read).transpose()?;
    let jobs: Vec<(PathBuf, ExperimentSpec)> = match (&preset_name, &text) {
        (Some(name), _) => {
            let p = preset(name)?;
            let mut jobs = Vec::new();
            for (label, spec) in &p.variants {
                let mut spec = match &text {
                    Some(t) => apply_overrides(t, spec.clone())?,
                    None => spec.clone(),
                };
                if let Some(o) = &out {
                    spec.output_path = o.clone();
                }
                jobs.push((p.variant_path(&spec.output_path, label), spec));
            }
            jobs
        }
        (None, Some(t)) => {
            let mut spec = parse_config(t)?;
            if let Some(o) = &out {
                spec.output_path = o.clone();
            }
            vec![(spec.output_path.clone(), spec)]
        }
        (None, None) => return Err(Failure::Config("run needs --config or --preset".into())),
    };

    let mut written = Vec::new();
    for (path, mut spec) in jobs {
        if let Some(s) = seed {
            spec.seed = s;
        }
        if let Some(l) = realizations {
            spec.realizations = l;
        }
        let result = run_experiment(&spec).and_then(|rows| write_rows(&path, &rows));
        if let Err(e) = result {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e.into());
        }
        println!("wrote {}", path.display());
        written.push(path);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, preset, seed, realizations, out } => run(config, preset, seed, realizations, out),
        Command::ListPresets => {
            for p in presets() {
                let labels: Vec<&str> = p.variants.iter().map(|(l, _)| l.as_str()).collect();
                println!("{:<18} {} [{}]", p.name, p.description, labels.join(", "));
            }
            Ok(())
        }
        Command::Validate { config } => read(&config).and_then(|t| {
            let spec = parse_config(&t)?;
            println!("ok: {} values of {}", spec.sweep_values.len(), spec.sweep_param);
            Ok(())
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numeric failure: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
