use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use threatskew::runner::{self, ExperimentConfig, ExperimentReport, RunnerError};
use threatskew::Label;

#[derive(Parser)]
#[command(
    name = "threatskew",
    version,
    about = "Phoneme-count classifiers and FP-skew analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse corpus and inventory and print entry counts per language.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the full experiment and write its reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the FP% hypothesis tests from a records.tsv.
    Stats {
        #[arg(long)]
        records: PathBuf,
        /// Config supplying variables, groups and threat directions.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Re-render a report.json.
    Report {
        #[arg(long)]
        json: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Md,
    Json,
    Tsv,
}

fn read(path: &PathBuf) -> Result<String, RunnerError> {
    std::fs::read_to_string(path).map_err(|source| RunnerError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn output(text: &str, out: Option<&PathBuf>) -> Result<(), RunnerError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| RunnerError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), RunnerError> {
    match cli.command {
        Command::Validate { config } => {
            let config = ExperimentConfig::from_json_file(&config)?;
            let (corpus, counts) = runner::validate(&config)?;
            for (language, n) in &counts {
                let tokens = corpus.inventory(language).map_or(0, |i| i.len());
                println!("{language}\t{n} entries\t{tokens} tokens");
            }
            println!("total\t{} entries", corpus.entries.len());
        }
        Command::Run { config, seed, out } => {
            let mut config = ExperimentConfig::from_json_file(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(out) = out {
                config.output_dir = out;
            }
            let report = runner::run_experiment(&config)?;
            for f in &report.failures {
                eprintln!("group {} / {} failed: {}", f.language, f.variable, f.reason);
            }
            let written = runner::emit_report(&report, &config.report_formats, &config.output_dir)?;
            for path in written {
                println!("{}", path.display());
            }
        }
        Command::Stats { records, config } => {
            let config = match config {
                Some(path) => ExperimentConfig::from_json_file(&path)?,
                None => ExperimentConfig::default(),
            };
            let threat = |v| {
                if config.variables.is_empty() {
                    Label::High
                } else {
                    config.threat_of(v)
                }
            };
            let records = runner::read_records_tsv(&records, threat)?;
            let variables: Vec<_> = config.variables.iter().map(|v| v.name).collect();
            let h1 =
                runner::hypothesis_h1(&records, &variables, &config.combat_set, &config.size_set);
            let h2 = runner::hypothesis_h2(&records, &config.combat_set, &config.size_set);
            let summary = serde_json::json!({
                "records": records.len(),
                "aggregates": runner::aggregate(&records),
                "h1": h1,
                "h2": h2,
            });
            println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
        }
        Command::Report { json, format, out } => {
            let text = read(&json)?;
            let report = ExperimentReport::from_json(&text).map_err(|e| RunnerError::Parse {
                path: json.display().to_string(),
                message: e.to_string(),
            })?;
            let rendered = match format {
                Format::Md => runner::render_markdown(&report),
                Format::Json => report.to_json(),
                Format::Tsv => runner::records_tsv(&report.records),
            };
            output(&rendered, out.as_ref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
