use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use argforge::acquire::{GitFetcher, RepoSpec};
use argforge::config::PipelineConfig;
use argforge::metrics::{parse_results, render_report, tabulate, ReportColumn};
use argforge::pipeline::{run_stages, transform_source, PipelineRun, StageReport, StopAfter, TOOL_VERSION};
use argforge::property::Property;
use argforge::resolve::Allowlist;
use argforge::syntax::pretty_print;
use argforge::transform::{Provenance, TransformConfig};

#[derive(Debug, Parser)]
#[command(name = "argforge", version, about = "Build verification benchmarks from Java-like sources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every stage and write benchmarks under the output root.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Use local mirrors only.
        #[arg(long)]
        offline: bool,
        /// Override the configured output root.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stop after the filter and list accepted files.
    FilterOnly {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        offline: bool,
    },
    /// Transform a single source file and print the result.
    TransformOnly {
        #[arg(long)]
        input: PathBuf,
        /// Allowlist file; the built-in library list when absent.
        #[arg(long)]
        allowlist: Option<PathBuf>,
        /// Repository recorded in the provenance header, `owner/name[@rev]`.
        #[arg(long, default_value = "local/local")]
        origin: String,
        #[arg(long, default_value_t = 16)]
        array_length_bound: u32,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score verifier results.
    Report {
        /// `benchmark,property,expected,actual` files, one column group each.
        #[arg(long, required = true, num_args = 1..)]
        results: Vec<PathBuf>,
        /// Restrict to one property.
        #[arg(long)]
        property: Option<Property>,
        /// Also write the metrics as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// A problem with the invocation itself; the only kind of failure that
/// changes the exit code.
struct ConfigFailure(String);

impl<E: std::fmt::Display> From<E> for ConfigFailure {
    fn from(e: E) -> ConfigFailure {
        ConfigFailure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, offline, out } => cmd_run(&config, offline, out),
        Command::FilterOnly { config, offline } => cmd_filter(&config, offline),
        Command::TransformOnly {
            input,
            allowlist,
            origin,
            array_length_bound,
            out,
        } => cmd_transform(&input, allowlist.as_deref(), &origin, array_length_bound, out.as_deref()),
        Command::Report { results, property, csv } => cmd_report(&results, property, csv.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(ConfigFailure(msg)) => {
            eprintln!("argforge: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &Path, offline: bool) -> Result<PipelineConfig, ConfigFailure> {
    let mut config = PipelineConfig::load(path)?;
    config.offline_mode |= offline;
    Ok(config)
}

fn print_reports(run: &PipelineRun) {
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("{:<10} {:>8} {:>8} {:>8}  reasons", "stage", "seen", "accepted", "rejected");
    for StageReport {
        stage,
        inputs_seen,
        accepted,
        rejected,
        reasons,
    } in &run.reports
    {
        let reasons: Vec<String> = reasons.iter().map(|(k, v)| format!("{k}={v}")).collect();
        eprintln!("{stage:<10} {inputs_seen:>8} {accepted:>8} {rejected:>8}  {}", reasons.join(" "));
    }
}

fn cmd_run(path: &Path, offline: bool, out: Option<PathBuf>) -> Result<(), ConfigFailure> {
    let mut config = load_config(path, offline)?;
    if let Some(out) = out {
        config.output_root = out;
    }
    let run = run_stages(&config, &GitFetcher, StopAfter::Package)?;
    print_reports(&run);
    let m = &run.manifest;
    println!(
        "{} benchmarks, {} property runs, average {} LOC, written to {}",
        m.benchmarks,
        m.total_property_runs,
        m.average_loc_display(),
        config.output_root.display()
    );
    Ok(())
}

fn cmd_filter(path: &Path, offline: bool) -> Result<(), ConfigFailure> {
    let config = load_config(path, offline)?;
    let run = run_stages(&config, &GitFetcher, StopAfter::Filter)?;
    print_reports(&run);
    for f in &run.accepted_files {
        println!("{}\t{}", f.repo, f.relative_path);
    }
    Ok(())
}

fn parse_origin(origin: &str) -> Result<RepoSpec, ConfigFailure> {
    let (repo, rev) = origin.split_once('@').unwrap_or((origin, ""));
    match repo.split_once('/') {
        Some((owner, name)) if !owner.is_empty() && !name.is_empty() && !name.contains('/') => {
            Ok(RepoSpec::new(owner, name, rev))
        }
        _ => Err(ConfigFailure(format!("--origin `{origin}` is not of the form owner/name[@rev]"))),
    }
}

fn cmd_transform(
    input: &Path,
    allowlist: Option<&Path>,
    origin: &str,
    bound: u32,
    out: Option<&Path>,
) -> Result<(), ConfigFailure> {
    if bound < 1 {
        return Err(ConfigFailure("--array-length-bound must be at least 1".into()));
    }
    let repo = parse_origin(origin)?;
    let allowlist = match allowlist {
        Some(p) => Allowlist::parse(&fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?)?,
        None => Allowlist::jdk_default(),
    };
    let source = fs::read_to_string(input).map_err(|e| format!("{}: {e}", input.display()))?;
    let file_name = input.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let mut prov = Provenance {
        repo,
        original_path: file_name,
        original_class: String::new(),
        tool_version: TOOL_VERSION.to_string(),
    };
    if let Ok(unit) = argforge::syntax::parse_source(&source) {
        prov.original_class = unit.class.name;
    }
    let config = TransformConfig {
        array_length_bound: bound,
    };
    match transform_source(&source, &allowlist, &prov, &config) {
        Err((code, msg)) => eprintln!("rejected {code}: {msg}"),
        Ok(outcome) => match (outcome.status.code(), &outcome.unit) {
            (None, Some(unit)) => {
                let text = pretty_print(unit);
                match out {
                    Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?,
                    None => print!("{text}"),
                }
                for r in &outcome.removals {
                    eprintln!("removed {:?} {} at {}", r.reason, r.subject, r.span);
                }
            }
            (code, _) => eprintln!("rejected {}", code.unwrap_or("TRANSFORM_EMPTY")),
        },
    }
    Ok(())
}

fn cmd_report(results: &[PathBuf], property: Option<Property>, csv: Option<&Path>) -> Result<(), ConfigFailure> {
    let mut columns = Vec::new();
    for path in results {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let (records, diags) = parse_results(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        for d in diags {
            eprintln!("warning: {}:{}: {}", path.display(), d.line, d.message);
        }
        let prefix = if results.len() > 1 {
            let stem = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            format!("{stem}:")
        } else {
            String::new()
        };
        let selected: Vec<Property> = match property {
            Some(p) => vec![p],
            None => Property::ALL.to_vec(),
        };
        for p in &selected {
            columns.push(ReportColumn::from_counts(&format!("{prefix}{p}"), &tabulate(&records, Some(*p))));
        }
        if property.is_none() {
            columns.push(ReportColumn::from_counts(&format!("{prefix}Cumulative"), &tabulate(&records, None)));
        }
    }
    let report = render_report(&columns);
    print!("{report}");
    if let Some(p) = csv {
        fs::write(p, &report.csv).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(())
}
