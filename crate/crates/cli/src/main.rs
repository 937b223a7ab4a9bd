//! `starload` command-line frontend.
//!
//! Exit status: 0 success, 1 configuration or usage error, 2 a protocol's
//! modeling assumption is violated, 3 a verification check failed.
//! Results go to stdout (or `--out`), diagnostics to stderr.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use starload::closedform::Schedule;
use starload::config::ScenarioConfig;
use starload::model::{validate, AssumptionViolation, ProcessingMode, Protocol, StarNetwork};
use starload::presets::Preset;
use starload::replay::{replay, verify_schedule, ReplayError};
use starload::report::{
    emit_gantt, emit_report, emit_table, status_counts, Cell, OutputFormat, Table,
    DEFAULT_PRECISION,
};
use starload::searchopt::{minimize_makespan, MAX_CHILDREN};
use starload::speedup::{default_f_grid, dlt_speedup, parse_f_grid, sweep_f};
use starload::{build_scenario, solve, SolveError};

/// Largest gap allowed between the numeric search and the closed form.
const SEARCH_TOLERANCE: f64 = 1e-3;
/// How far below the closed form the search may land before it counts as
/// beating it (grid rounding).
const UNDERSHOOT_TOLERANCE: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "starload",
    version,
    about = "Divisible-load scheduling on star networks: local, cloud and combined processing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal load fractions and finish time.
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Also print the ratios k1 and q_i behind the fractions.
        #[arg(long)]
        trace: bool,
    },
    /// Parallel-facility speedup S_DLT.
    Speedup {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Overall (Amdahl) speedup across parallel fractions f.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Grid of parallel fractions, start:stop:step [default: 0:1:0.1].
        #[arg(long, value_name = "START:STOP:STEP")]
        f_grid: Option<String>,
    },
    /// Gantt CSV of a replayed split (closed-form fractions unless --alphas).
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Load fractions a0,a1,...,am (root first), summing to 1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alphas: Option<Vec<f64>>,
    },
    /// Cross-check the closed form against replay and numeric search.
    Verify {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Lattice spacing of the numeric search.
        #[arg(long, default_value_t = 1e-3)]
        grid_step: f64,
    },
    /// Compare computed values against the published result tables.
    Reproduce {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Report modeling-assumption violations (all protocols unless --protocol).
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Scenario config file (JSON).
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in network: het-printed, het-reconstructed (alias het), homo.
    #[arg(long, value_name = "NAME")]
    preset: Option<Preset>,
    /// local, cloud or combined [default: config value, else local].
    #[arg(long)]
    mode: Option<ProcessingMode>,
    /// sequential, staggered or simultaneous [default: config value, else sequential].
    #[arg(long)]
    protocol: Option<Protocol>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// csv or markdown.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Write results here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Decimal places in numeric output.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
}

/// A failed invocation: exit status plus diagnostic.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: 1,
            message: message.to_string(),
        }
    }

    fn assumptions(protocol: Protocol, violations: &[AssumptionViolation]) -> Self {
        let mut message = format!("{protocol} distribution is infeasible for this network:");
        for v in violations {
            let _ = write!(message, "\n  {v}");
        }
        Self { code: 2, message }
    }

    fn verification(message: impl ToString) -> Self {
        Self {
            code: 3,
            message: message.to_string(),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(err: SolveError) -> Self {
        match err {
            SolveError::Infeasible {
                protocol,
                violations,
            } => Self::assumptions(protocol, &violations),
            other => Self::verification(other),
        }
    }
}

struct Scenario {
    net: StarNetwork,
    mode: ProcessingMode,
    /// Explicit protocol from the flag or the config.
    protocol: Option<Protocol>,
}

impl Scenario {
    fn protocol(&self) -> Protocol {
        self.protocol.unwrap_or(Protocol::Sequential)
    }
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<Scenario, Failure> {
        if let Some(path) = &self.config {
            let config = ScenarioConfig::load(path).map_err(Failure::usage)?;
            let mode = self.mode.or(config.mode).unwrap_or(ProcessingMode::Local);
            let net = config.scenario(Some(mode)).map_err(Failure::usage)?;
            return Ok(Scenario {
                net,
                mode,
                protocol: self.protocol.or(config.protocol),
            });
        }
        let Some(preset) = self.preset else {
            return Err(Failure::usage("one of --config or --preset is required"));
        };
        let mode = self.mode.unwrap_or(ProcessingMode::Local);
        Ok(Scenario {
            net: build_scenario(&preset.network(), &preset.cloud(), mode),
            mode,
            protocol: self.protocol,
        })
    }
}

fn ensure_feasible(net: &StarNetwork, protocol: Protocol) -> Result<(), Failure> {
    let violations = validate(net, protocol);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::assumptions(protocol, &violations))
    }
}

fn solve_output(net: &StarNetwork, schedule: &Schedule, trace: bool, out: &OutputArgs) -> String {
    let p = out.precision;
    let mut rows: Vec<Vec<Cell>> = schedule
        .alphas
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            vec![
                Cell::from(format!("alpha{i}")),
                Cell::from(net.label(i)),
                Cell::Number(a),
            ]
        })
        .collect();
    rows.push(vec![
        Cell::from("finish_time"),
        Cell::from(""),
        Cell::Number(schedule.finish_time),
    ]);
    if trace {
        if let Some(t) = &schedule.trace {
            rows.push(vec![Cell::from("k1"), Cell::from(""), Cell::Number(t.k1)]);
            for (j, &q) in t.q.iter().enumerate() {
                rows.push(vec![
                    Cell::from(format!("q{}", j + 2)),
                    Cell::from(""),
                    Cell::Number(q),
                ]);
            }
            rows.push(vec![
                Cell::from("definition"),
                Cell::from(""),
                Cell::from(t.definition),
            ]);
        }
    }
    let table = Table {
        header: vec!["quantity".into(), "node".into(), "value".into()],
        rows,
    };
    emit_table(&table, out.format, p)
}

fn run(command: &Command) -> Result<(String, &OutputArgs), Failure> {
    match command {
        Command::Solve {
            scenario,
            output,
            trace,
        } => {
            let sc = scenario.resolve()?;
            let protocol = sc.protocol();
            ensure_feasible(&sc.net, protocol)?;
            let schedule = solve(&sc.net, protocol)?;
            Ok((solve_output(&sc.net, &schedule, *trace, output), output))
        }
        Command::Speedup { scenario, output } => {
            let sc = scenario.resolve()?;
            let protocol = sc.protocol();
            ensure_feasible(&sc.net, protocol)?;
            let s = dlt_speedup(&sc.net, protocol).map_err(Failure::usage)?;
            let table = Table {
                header: vec!["protocol".into(), "mode".into(), "s_dlt".into()],
                rows: vec![vec![
                    Cell::from(protocol.name()),
                    Cell::from(sc.mode.name()),
                    Cell::Number(s),
                ]],
            };
            Ok((emit_table(&table, output.format, output.precision), output))
        }
        Command::Sweep {
            scenario,
            output,
            f_grid,
        } => {
            let sc = scenario.resolve()?;
            let protocol = sc.protocol();
            ensure_feasible(&sc.net, protocol)?;
            let grid = match f_grid {
                Some(spec) => parse_f_grid(spec).map_err(Failure::usage)?,
                None => default_f_grid(),
            };
            let curve = sweep_f(&sc.net, protocol, &grid)
                .map_err(Failure::usage)?
                .with_mode(sc.mode);
            Ok((
                emit_table(&Table::from(&curve), output.format, output.precision),
                output,
            ))
        }
        Command::Simulate {
            scenario,
            output,
            alphas,
        } => {
            let sc = scenario.resolve()?;
            let protocol = sc.protocol();
            let alphas = match alphas {
                Some(a) => a.clone(),
                None => {
                    ensure_feasible(&sc.net, protocol)?;
                    solve(&sc.net, protocol)?.alphas
                }
            };
            let timeline = replay(&sc.net, protocol, &alphas).map_err(|e| match e {
                ReplayError::Starvation { .. } => Failure {
                    code: 2,
                    message: e.to_string(),
                },
                other => Failure::usage(other),
            })?;
            Ok((emit_gantt(&timeline, output.precision), output))
        }
        Command::Verify {
            scenario,
            output,
            grid_step,
        } => {
            let sc = scenario.resolve()?;
            let protocol = sc.protocol();
            ensure_feasible(&sc.net, protocol)?;
            Ok((verify(&sc.net, protocol, *grid_step, output)?, output))
        }
        Command::Reproduce { output } => {
            let cells = starload::report::reproduce().map_err(Failure::verification)?;
            for (status, count) in status_counts(&cells) {
                eprintln!("{}: {count}", status.name());
            }
            Ok((emit_report(&cells, output.format, output.precision), output))
        }
        Command::Validate { scenario, output } => {
            let sc = scenario.resolve()?;
            let protocols = match sc.protocol {
                Some(p) => vec![p],
                None => Protocol::ALL.to_vec(),
            };
            let mut rows = Vec::new();
            let mut failed = Vec::new();
            for protocol in protocols {
                let violations = validate(&sc.net, protocol);
                for v in &violations {
                    rows.push(vec![
                        Cell::from(protocol.name()),
                        Cell::from(v.child.to_string().as_str()),
                        Cell::from(v.label.as_str()),
                        Cell::from(v.rule.to_string().as_str()),
                        Cell::Number(v.compute_time),
                        Cell::Number(v.transfer_time),
                    ]);
                }
                if !violations.is_empty() {
                    failed.push(Failure::assumptions(protocol, &violations).message);
                }
            }
            let table = Table {
                header: ["protocol", "child", "label", "rule", "omega_t_cp", "z_t_cm"]
                    .map(String::from)
                    .to_vec(),
                rows,
            };
            let text = emit_table(&table, output.format, output.precision);
            if failed.is_empty() {
                Ok((text, output))
            } else {
                // the table still goes out; the status reports the violation
                write_output(&text, output)?;
                Err(Failure {
                    code: 2,
                    message: failed.join("\n"),
                })
            }
        }
    }
}

fn verify(
    net: &StarNetwork,
    protocol: Protocol,
    grid_step: f64,
    output: &OutputArgs,
) -> Result<String, Failure> {
    let p = output.precision;
    let schedule = solve(net, protocol)?;
    let t = schedule.finish_time;
    let mut rows = Vec::new();
    let mut failures = Vec::new();

    let report = verify_schedule(net, protocol, &schedule);
    if !report.passed {
        failures.push(report.to_string());
    }
    rows.push(vec![
        Cell::from("replay"),
        Cell::from(if report.passed { "pass" } else { "fail" }),
        Cell::Number(t),
        report.makespan.map_or(Cell::from("-"), Cell::Number),
        Cell::Text(format!("{:.3e}", report.makespan_gap)),
    ]);

    if net.child_count() > MAX_CHILDREN {
        eprintln!(
            "search skipped: {} children exceeds the search limit of {MAX_CHILDREN}",
            net.child_count()
        );
        rows.push(vec![
            Cell::from("search"),
            Cell::from("skipped"),
            Cell::Number(t),
            Cell::from("-"),
            Cell::from("-"),
        ]);
    } else {
        let r = minimize_makespan(net, protocol, grid_step).map_err(Failure::usage)?;
        let gap = r.best_makespan - t;
        let passed = (-UNDERSHOOT_TOLERANCE..=SEARCH_TOLERANCE).contains(&gap);
        if !passed {
            failures.push(format!(
                "search makespan {} differs from closed-form finish time {t} by {gap:e}",
                r.best_makespan
            ));
        }
        rows.push(vec![
            Cell::from("search"),
            Cell::from(if passed { "pass" } else { "fail" }),
            Cell::Number(t),
            Cell::Number(r.best_makespan),
            Cell::Text(format!("{gap:.3e}")),
        ]);
    }

    let table = Table {
        header: ["check", "status", "finish_time", "observed", "gap"]
            .map(String::from)
            .to_vec(),
        rows,
    };
    let text = emit_table(&table, output.format, p);
    if failures.is_empty() {
        Ok(text)
    } else {
        write_output(&text, output)?;
        Err(Failure::verification(failures.join("\n")))
    }
}

fn write_output(text: &str, output: &OutputArgs) -> Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = run(&cli.command).and_then(|(text, output)| write_output(&text, output));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
