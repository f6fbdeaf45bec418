//! `natdensity`: density tables, splices, oscillation witnesses and
//! transfer-function samples from the command line.
//!
//! Tables go to `--out` when given, otherwise to standard output. The
//! human-readable summary goes to standard output in the first case and to
//! standard error in the second, so piped output stays machine-readable.
//!
//! Exit status: 0 when every check passes, 1 when a checked bound fails,
//! 2 for usage, parse and precondition errors.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use natdensity::expr::{
    parse_checkpoint_schedule, parse_epsilon_schedule, parse_map_expr, parse_set_expr,
};
use natdensity::intertwiner::{build_plan, compute_thresholds, intertwine, verify_bound};
use natdensity::output::{render_rows, Format, Table};
use natdensity::refuter::FRAMING_NOTE;
use natdensity::transfer::{fhat_estimate, transfer_check};
use natdensity::{
    estimate_densities, CheckpointSchedule, EpsilonSchedule, Error, FHatTable, RefutationInstance,
};

#[derive(Parser, Debug)]
#[command(
    name = "natdensity",
    version,
    about = "Asymptotic density of sets of positive integers"
)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Largest n examined.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(100..))]
    horizon: u64,
    /// Tolerance schedule ε_k = a·r^k, written geo(a,r).
    #[arg(long, global = true, default_value = "geo(1/2,1/2)")]
    eps: String,
    /// Number of thresholds in a splice plan.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..))]
    depth: u64,
    /// Checkpoints where A(n)/n is read: geo(theta,n0) or list(n1,n2,...).
    #[arg(long, global = true, default_value = "geo(1.1,10)")]
    checkpoints: String,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate A(n)/n at the checkpoints and report the exact density when known.
    Density { set: String },
    /// Splice two sets of equal density and check |C(n)/n − γ| < 5ε_{k−1} per window.
    Intertwine { a: String, b: String },
    /// Build a set C whose image f(C) has no density, given d(A) = d(B) but d(f(A)) < d(f(B)).
    Refute { map: String, a: String, b: String },
    /// Sample f̂(r/s) on the union of the first r residue classes mod s.
    Transfer {
        map: String,
        s: u64,
        r: u64,
        /// Tabulate every reduced fraction with denominator at most s.
        #[arg(long)]
        table: bool,
    },
}

/// What a subcommand produced: the rendered table, a summary, and whether
/// every checked bound held.
struct Outcome {
    table: String,
    summary: Vec<String>,
    passed: bool,
}

struct Settings {
    horizon: u64,
    eps: EpsilonSchedule,
    depth: usize,
    checkpoints: CheckpointSchedule,
    format: Format,
}

fn settings(config: &RunConfig) -> Result<Settings, Error> {
    Ok(Settings {
        horizon: config.horizon,
        eps: parse_epsilon_schedule(&config.eps)?,
        depth: config.depth as usize,
        checkpoints: parse_checkpoint_schedule(&config.checkpoints)?,
        format: config.format.into(),
    })
}

fn cmd_density(expr: &str, cfg: &Settings) -> Result<Outcome, Error> {
    let set = parse_set_expr(expr)?;
    let report = estimate_densities(&set, &cfg.checkpoints, cfg.horizon)?;
    let mut summary = vec![format!("set: {}", report.label)];
    let mut passed = true;
    match &report.exact_density {
        Some(d) => {
            let constant = set.modulus().map(|m| m.constant()).unwrap_or_default();
            let kind = if report.certified {
                "certified"
            } else {
                "heuristic"
            };
            summary.push(format!(
                "exact density: {d} ({kind} modulus, |A(n) − d·n| < {constant})"
            ));
            let d = natdensity::rational::to_f64(d);
            // Rows carry c/n; a row outside it means the modulus is wrong.
            let bad = report
                .checkpoints
                .iter()
                .filter(|c| c.error_bound.is_some_and(|b| (c.ratio - d).abs() > b))
                .count();
            if report.certified && bad > 0 {
                summary.push(format!("modulus violated at {bad} checkpoints"));
                passed = false;
            }
        }
        None => summary.push("exact density: unknown".into()),
    }
    summary.push(format!(
        "tail n ≥ {}: ratio in [{:.6}, {:.6}]; A({})/{} = {:.6}",
        cfg.horizon / 2,
        report.empirical_lower,
        report.empirical_upper,
        cfg.horizon,
        cfg.horizon,
        report.last_ratio()
    ));
    Ok(Outcome {
        table: report.render(cfg.format)?,
        summary,
        passed,
    })
}

fn cmd_intertwine(a: &str, b: &str, cfg: &Settings) -> Result<Outcome, Error> {
    let (a, b) = (parse_set_expr(a)?, parse_set_expr(b)?);
    let gamma = a
        .exact_density()
        .cloned()
        .ok_or_else(|| Error::MissingDensity(a.label().to_string()))?;
    let m = compute_thresholds(&a, &b, &gamma, &cfg.eps, cfg.depth)?;
    let plan = build_plan(&m, &cfg.eps)?;
    let c = intertwine(&a, &b, &plan);
    let report = verify_bound(&c, &plan, &cfg.checkpoints, cfg.horizon)?;
    let summary = vec![
        format!("gamma: {gamma}"),
        format!("epsilon: {}", cfg.eps.describe()),
        format!("M_k: {}", join(m.as_slice())),
        format!("N_k: {}", join(plan.thresholds())),
        format!(
            "windows checked: {}, violations: {}{}",
            report.windows.len(),
            report.violations(),
            if report.certified {
                ""
            } else {
                " (heuristic moduli)"
            }
        ),
    ];
    Ok(Outcome {
        table: report.render(cfg.format)?,
        summary,
        passed: report.passed(),
    })
}

fn cmd_refute(map: &str, a: &str, b: &str, cfg: &Settings) -> Result<Outcome, Error> {
    let f = parse_map_expr(map)?;
    let instance =
        RefutationInstance::new(f, parse_set_expr(a)?, parse_set_expr(b)?, cfg.eps.clone())?;
    let m = instance.compute_joint_thresholds(cfg.depth)?;
    let plan = instance.build_paired_plan(&m)?;
    let witness = instance.build_witness(&plan);
    let report = instance.evaluate_oscillation(&plan, &witness, &cfg.checkpoints, cfg.horizon)?;
    let summary = vec![
        format!("map: {}", instance.map()),
        format!(
            "gamma: {}, alpha: {}, beta: {}",
            report.gamma, report.alpha, report.beta
        ),
        format!("L_k: {}", join(&report.l)),
        format!("N_k: {}", join(&report.n)),
        format!(
            "lower passes: {}, upper passes: {}, witness density violations: {}",
            report.lower_passes(),
            report.upper_passes(),
            report.witness_density.violations()
        ),
        format!(
            "empirical gap: {:.6} (target ≥ {:.6})",
            report.gap, report.target_gap
        ),
        format!("note: {FRAMING_NOTE}"),
    ];
    Ok(Outcome {
        table: report.render(cfg.format)?,
        summary,
        passed: report.passed(),
    })
}

fn cmd_transfer(map: &str, s: u64, r: u64, table: bool, cfg: &Settings) -> Result<Outcome, Error> {
    if s < 1 || r < 1 || r > s {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ r ≤ s, got r = {r}, s = {s}"
        )));
    }
    let f = parse_map_expr(map)?;
    let check = transfer_check(&f, s, r, cfg.horizon)?;
    let row = fhat_estimate(&f, r, s, cfg.horizon)?;
    let mut summary = vec![
        format!("map: {f}"),
        format!("lambda: {}", check.lambda),
        format!(
            "f({r}/{s}) density: {:.6}, expected λ·r/s = {:.6} ± {:.2e}{}",
            check.estimate,
            check.expected,
            check.tolerance,
            if check.certified {
                ""
            } else {
                " (uncertified)"
            }
        ),
        format!(
            "partition additivity: {}",
            if check.additivity { "holds" } else { "FAILS" }
        ),
        format!("verdict at {r}/{s}: {}", row.verdict),
    ];
    let rendered = if table {
        let t = FHatTable::build(&f, s, cfg.horizon)?;
        summary.push(format!(
            "table: {} rows, all identity: {}, monotone within error: {}",
            t.rows.len(),
            t.all_identity(),
            t.is_monotone_within_error()
        ));
        t.render(cfg.format)?
    } else {
        render_rows(FHatTable::COLUMNS, &[row], cfg.format)?
    };
    // A non-identity verdict is a finding about f, not a failed check.
    Ok(Outcome {
        table: rendered,
        summary,
        passed: check.additivity,
    })
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let cfg = settings(&cli.config)?;
    match &cli.command {
        Command::Density { set } => cmd_density(set, &cfg),
        Command::Intertwine { a, b } => cmd_intertwine(a, b, &cfg),
        Command::Refute { map, a, b } => cmd_refute(map, a, b, &cfg),
        Command::Transfer { map, s, r, table } => cmd_transfer(map, *s, *r, *table, &cfg),
    }
}

fn emit(outcome: &Outcome, out: Option<&PathBuf>) -> io::Result<()> {
    let summary = outcome.summary.join("\n") + "\n";
    match out {
        Some(path) => {
            fs::write(path, &outcome.table)?;
            io::stdout().write_all(summary.as_bytes())
        }
        None => {
            io::stdout().write_all(outcome.table.as_bytes())?;
            io::stderr().write_all(summary.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&outcome, cli.config.out.as_ref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("FAIL: a checked bound did not hold");
        ExitCode::from(1)
    }
}
