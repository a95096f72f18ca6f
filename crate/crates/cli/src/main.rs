use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use volkov_core::run::{self, Overrides, RunReport};
use volkov_core::scenario::{self, Scenario};
use volkov_core::Error;

#[derive(Parser)]
#[command(name = "volkov", version, about = "Volkov-state wavepackets with a designed peak velocity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve the correlation and print the derived velocities.
    Design(Input),
    /// Light-front density on the scenario grid.
    Density(Input),
    /// Peak and expectation-value trajectories.
    Trajectories(Input),
    /// How long the peak stays inside the envelope.
    Lifetime(Input),
    /// Partial wavepackets and mass-shell slices.
    Figure1(Common),
    /// Density, trajectories and lifetimes for v_a = -0.3, 0 and 19.5.
    Figure2(Common),
    /// One carrier cycle of the figure-eight motion and a transverse cut.
    Figure3(Common),
    /// Momentum-density maps and expectation velocities.
    Figure4(Common),
    /// Quick consistency checks.
    Selftest,
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for grid evaluation.
    #[arg(long, env = "VOLKOV_WORKERS")]
    workers: Option<usize>,
    /// Use N nodes in both η and p₁ and skip escalation.
    #[arg(long, value_name = "N")]
    quadrature: Option<usize>,
    /// Density grid as "x3min:x3max:steps,xminusmin:xminusmax:steps".
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Args)]
struct Input {
    /// Scenario file (TOML).
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in scenario, e.g. fig2a.
    #[arg(long)]
    preset: Option<String>,
    #[command(flatten)]
    common: Common,
}

enum Failure {
    Validation(Vec<Error>),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 4,
        Error::Invalid { .. } => 2,
        _ => 3,
    }
}

fn overrides(c: &Common) -> Result<Overrides, Failure> {
    let grid = match &c.grid {
        Some(g) => Some(scenario::parse_grid_flag(g).map_err(|e| Failure::Validation(vec![e]))?),
        None => None,
    };
    Ok(Overrides {
        quadrature: c.quadrature,
        grid,
    })
}

fn load(input: &Input, o: &Overrides) -> Result<Scenario, Failure> {
    let mut file = match (&input.scenario, &input.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            scenario::parse(&text).map_err(|e| Failure::Validation(vec![e]))?
        }
        (None, Some(name)) => scenario::preset_file(name).map_err(|e| Failure::Validation(vec![e]))?,
        (None, None) => unreachable!("clap requires one of --scenario and --preset"),
    };
    o.apply(&mut file);
    scenario::validate(file).map_err(Failure::Validation)
}

fn out_dir(c: &Common, s: Option<&Scenario>) -> PathBuf {
    c.out
        .clone()
        .or_else(|| s.and_then(|s| s.file.output.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn install_pool(workers: Option<usize>) {
    let n = workers
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

fn scenario_run(input: &Input, f: impl Fn(&Scenario, &Path) -> volkov_core::Result<RunReport>) -> Result<RunReport, Failure> {
    let o = overrides(&input.common)?;
    let s = load(input, &o)?;
    install_pool(input.common.workers.or(s.file.output.workers));
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    Ok(f(&s, &out_dir(&input.common, Some(&s)))?)
}

fn figure_run(c: &Common, f: impl Fn(&Path, &Overrides) -> volkov_core::Result<RunReport>) -> Result<RunReport, Failure> {
    let o = overrides(c)?;
    install_pool(c.workers);
    Ok(f(&out_dir(c, None), &o)?)
}

fn dispatch(cmd: &Command) -> Result<RunReport, Failure> {
    match cmd {
        Command::Design(i) => scenario_run(i, run::run_design),
        Command::Density(i) => scenario_run(i, |s, d| Ok(run::run_density(s, d)?.report)),
        Command::Trajectories(i) => scenario_run(i, |s, d| Ok(run::run_trajectories(s, d)?.1)),
        Command::Lifetime(i) => scenario_run(i, |s, d| Ok(run::run_lifetime(s, d)?.1)),
        Command::Figure1(c) => figure_run(c, run::run_figure1),
        Command::Figure2(c) => figure_run(c, run::run_figure2),
        Command::Figure3(c) => figure_run(c, run::run_figure3),
        Command::Figure4(c) => figure_run(c, run::run_figure4),
        Command::Selftest => {
            let checks = run::selftest();
            let mut report = RunReport::default();
            let mut failed = 0;
            for (label, ok) in checks {
                report.lines.push(format!("{} {label}", if ok { "ok  " } else { "FAIL" }));
                failed += usize::from(!ok);
            }
            if failed > 0 {
                for l in &report.lines {
                    println!("{l}");
                }
                return Err(Failure::Run(Error::Invalid {
                    path: "selftest".into(),
                    message: format!("{failed} check(s) failed"),
                }));
            }
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(report) => {
            for l in &report.lines {
                println!("{l}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Validation(errors)) => {
            for e in &errors {
                eprintln!("error: {e}");
            }
            let code = if errors.iter().all(Error::is_numerical_guard) { 3 } else { 2 };
            ExitCode::from(code)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
