//! `idlab`: scenario-driven front end for the identical-particle lattice
//! laboratory.
//!
//! Exit codes: 0 success, 1 check or analysis failure, 2 usage/parse error.

mod analyses;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use idlab_core::consistency::{registry, scan_candidates, ScanConfig};
use idlab_core::verification::{run_selected, Tolerances, CRITERIA};

use analyses::Context;
use output::{fmt_f, write_atomic};
use scenario::load_scenario;

#[derive(Parser)]
#[command(
    name = "idlab",
    version,
    about = "Identical-particle laboratory on a 1-D lattice"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write one delimited table per analysis.
    Run {
        /// Scenario file (TOML; see the scenarios/ directory for examples)
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory for the result tables
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in verification suite and report per-criterion results.
    Verify {
        /// Override a tolerance, e.g. --tol composition=1e-8 (repeatable)
        #[arg(long = "tol", value_name = "KEY=VALUE")]
        tolerances: Vec<String>,
        /// Comma-separated subset of criteria to run (default: all)
        #[arg(long, value_name = "NAMES")]
        only: Option<String>,
    },
    /// Scan the candidate synthesis rules over random scenarios.
    Scan {
        /// Number of random composition scenarios
        #[arg(long, default_value_t = 50)]
        seeds: usize,
        /// Base RNG seed
        #[arg(long, default_value_t = 20250811)]
        seed: u64,
        /// Optional output directory for the scan table
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    /// Bad invocation or unusable input file: exit 2.
    Usage(String),
    /// The run itself failed: exit 1.
    Run(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Usage(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Run(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { scenario, out } => cmd_run(scenario, out),
        Command::Verify { tolerances, only } => cmd_verify(tolerances, only),
        Command::Scan { seeds, seed, out } => cmd_scan(seeds, seed, out),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => err.report(),
    }
}

fn cmd_run(scenario_path: PathBuf, out: PathBuf) -> Result<ExitCode, CliError> {
    let sc = load_scenario(&scenario_path).map_err(|e| CliError::Usage(e.to_string()))?;
    let ctx =
        Context::prepare(&sc).map_err(|e| CliError::Run(format!("preparing scenario: {e}")))?;

    let mut common = vec![
        (
            "tool".to_string(),
            format!("idlab {}", env!("CARGO_PKG_VERSION")),
        ),
        ("scenario_sha256".to_string(), sc.source_hash.clone()),
        ("seed".to_string(), sc.seed.to_string()),
        ("statistics".to_string(), sc.statistics.to_string()),
        ("sites".to_string(), sc.lattice.sites.to_string()),
        ("hopping".to_string(), fmt_f(sc.lattice.hopping)),
        ("dt".to_string(), fmt_f(sc.lattice.dt)),
        ("interaction".to_string(), fmt_f(sc.interaction)),
        ("epsilon".to_string(), fmt_f(sc.epsilon)),
    ];
    common.push((
        "schedule".to_string(),
        sc.schedule
            .iter()
            .map(|t| fmt_f(*t))
            .collect::<Vec<_>>()
            .join(" "),
    ));

    for analysis in &sc.analyses {
        let table = analyses::run_analysis(*analysis, &sc, &ctx)
            .map_err(|e| CliError::Run(format!("analysis '{}': {e}", analysis.name())))?;
        let rendered = table.render(&common);
        let file_name = format!("{}.csv", table.name);
        let path = write_atomic(&out, &file_name, &rendered)
            .map_err(|e| CliError::Run(format!("writing {file_name}: {e}")))?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(tolerance_args: Vec<String>, only: Option<String>) -> Result<ExitCode, CliError> {
    let mut tolerances = Tolerances::default();
    for arg in &tolerance_args {
        let (key, value) = arg
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--tol expects KEY=VALUE, got '{arg}'")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::Usage(format!("--tol {key}: '{value}' is not a number")))?;
        tolerances
            .set(key, value)
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }

    let selected: Vec<&str> = match &only {
        None => CRITERIA.to_vec(),
        Some(list) => {
            let names: Vec<&str> = list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            if names.is_empty() {
                return Err(CliError::Usage(
                    "--only given but no criteria named; choose from: ".to_string()
                        + &CRITERIA.join(", "),
                ));
            }
            names
        }
    };

    let reports =
        run_selected(&selected, &tolerances).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut failures = 0;
    for report in &reports {
        println!("{}", report.line());
        if !report.pass {
            failures += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        reports.len() - failures,
        reports.len()
    );
    if failures > 0 {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_scan(seeds: usize, seed: u64, out: Option<PathBuf>) -> Result<ExitCode, CliError> {
    if seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let config = ScanConfig {
        scenarios: seeds,
        seed,
        ..ScanConfig::default()
    };
    let outcomes =
        scan_candidates(&registry(), &config).map_err(|e| CliError::Run(e.to_string()))?;

    println!(
        "{:<14} {:>12} {:>9} {:>12} {:>9}  survives",
        "candidate", "isolation", "", "composition", ""
    );
    for o in &outcomes {
        println!(
            "{:<14} {:>12.3e} {:>9} {:>12.3e} {:>9}  {}",
            o.profile.candidate.name(),
            o.isolation.max_violation,
            if o.isolation.pass { "pass" } else { "fail" },
            o.composition.max_violation,
            if o.composition.pass { "pass" } else { "fail" },
            o.survives
        );
    }
    let survivors: Vec<String> = outcomes
        .iter()
        .filter(|o| o.survives)
        .map(|o| o.profile.candidate.name())
        .collect();
    println!("survivors: {}", survivors.join(", "));

    if let Some(dir) = out {
        let mut table = output::Table::new(
            "candidate_scan",
            &[
                "candidate",
                "isolation_violation",
                "isolation_pass",
                "composition_violation",
                "composition_pass",
                "survives",
            ],
        );
        table.meta("scenarios", config.scenarios.to_string());
        table.meta("seed", config.seed.to_string());
        table.meta("tolerance isolation", fmt_f(config.isolation_tol));
        table.meta("tolerance composition", fmt_f(config.composition_tol));
        table.meta("survivors", survivors.join("+"));
        for o in &outcomes {
            table.row(vec![
                o.profile.candidate.name(),
                fmt_f(o.isolation.max_violation),
                o.isolation.pass.to_string(),
                fmt_f(o.composition.max_violation),
                o.composition.pass.to_string(),
                o.survives.to_string(),
            ]);
        }
        let rendered = table.render(&[]);
        let file_name = format!("{}.csv", table.name);
        let path = write_atomic(&dir, &file_name, &rendered)
            .map_err(|e| CliError::Run(format!("writing {file_name}: {e}")))?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
