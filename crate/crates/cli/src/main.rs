use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use specprod_cli::{emit_report, plot_svg, run_study, ExperimentConfig, OutputFormat, ReportDocument, RunError, Study};

/// Numerical experiments on L² norms of products of spherical harmonics.
#[derive(Parser)]
#[command(name = "specprod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a study and write its report.
    Run {
        study: Study,
        /// Configuration file of `key = value` lines.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<OutputFormat>,
        /// Also write an SVG plot.
        #[arg(long)]
        plot: bool,
    },
    /// List the studies.
    List,
    /// Print a study's default configuration.
    ShowConfig { study: Study },
}

fn io_error(context: String) -> impl FnOnce(std::io::Error) -> RunError {
    move |source| RunError::Io { context, source }
}

fn load_config(study: Study, path: Option<&Path>) -> Result<ExperimentConfig, RunError> {
    match path {
        None => Ok(ExperimentConfig::defaults(study)),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(io_error(format!("reading {}", p.display())))?;
            Ok(ExperimentConfig::parse(&text, Some(study))?)
        }
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    std::fs::write(path, bytes).map_err(io_error(format!("writing {}", path.display())))
}

fn summarize(doc: &ReportDocument) {
    println!("samples: {}", doc.grid.samples.len());
    for f in &doc.fits {
        let expected = f.expected.map_or(String::new(), |e| format!(" (growth exponent {e})"));
        println!("fit {}: exponent {:.4}, r² {:.5}{expected}", f.label, f.fit.exponent, f.fit.r_squared);
        if let Some(c) = f.fit.loglog_coefficient {
            println!("  log log coefficient {c:.4}");
        }
    }
    for c in &doc.constants {
        println!("{}: {:.6}", c.label, c.value);
    }
    for c in &doc.checks {
        println!("check {} {}: {}", if c.passed { "ok" } else { "FAILED" }, c.name, c.detail);
    }
}

fn run(
    study: Study,
    config: Option<&Path>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    plot: bool,
) -> Result<ExitCode, RunError> {
    let mut cfg = load_config(study, config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.out_dir = o.to_string_lossy().into_owned();
    }
    if let Some(f) = format {
        cfg.format = f;
    }
    cfg.plot |= plot;
    println!("study: {}", cfg.study);
    println!("seed: {}", cfg.seed);
    let doc = run_study(&cfg)?;
    let dir = PathBuf::from(&cfg.out_dir);
    std::fs::create_dir_all(&dir).map_err(io_error(format!("creating {}", dir.display())))?;
    let report = dir.join(format!("{}.{}", study.tag(), cfg.format));
    write(&report, &emit_report(&doc, cfg.format))?;
    println!("wrote {}", report.display());
    if cfg.plot {
        match plot_svg(&doc) {
            Ok(svg) => {
                let path = dir.join(format!("{}.svg", study.tag()));
                write(&path, &svg)?;
                println!("wrote {}", path.display());
            }
            Err(e) => eprintln!("plot skipped: {e}"),
        }
    }
    summarize(&doc);
    let failed: Vec<_> = doc.failed_checks().collect();
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for c in failed {
            eprintln!("error: invariant {} failed: {}", c.name, c.detail);
        }
        Ok(ExitCode::from(3))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { study, config, seed, out, format, plot } => run(study, config.as_deref(), seed, out, format, plot),
        Command::List => {
            for s in Study::ALL {
                println!("{:<24} {}", s.tag(), s.summary());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ShowConfig { study } => {
            print!("{}", ExperimentConfig::defaults(study).to_text());
            Ok(ExitCode::SUCCESS)
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(e.exit_code() as u8)
    })
}
