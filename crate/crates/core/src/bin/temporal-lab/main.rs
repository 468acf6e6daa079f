use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use temporal_lab::bounds::{
    chsh_value, hv_correlator_feasible, hv_table_feasible, tsirelson_feasible, FeasibilityVerdict,
};
use temporal_lab::hardy::{hardy_check, hardy_max_spatial, hardy_max_temporal, DEFAULT_TOL};
use temporal_lab::instrument::round_trip;
use temporal_lab::io::{
    parse_correlators, parse_scenario, parse_table, to_json, write_region_csv, InstrumentJson,
    ScenarioJson, TableJson,
};
use temporal_lab::operator::Outcome;
use temporal_lab::presets::{preset, Preset, PRESET_NAMES};
use temporal_lab::scenario::{
    correlators, full_table, CorrelatorMatrix, ProbabilityTable, TemporalScenario,
};
use temporal_lab::signaling::{
    channel_capacity, region_sample, signaling_from_table, splus_max_search, InducedChannel,
};
use temporal_lab::Error;

const SEED_VAR: &str = "TEMPORAL_LAB_SEED";

const FORMATS: &str = "\
Formats:
  scenario     {\"dim\": d, \"psi\": [[re,im],...], \"alice\": [matrix,...], \"bob\": [matrix,...], \"dynamics\": matrix|null}
  matrix       row-major nested arrays of [re,im] pairs
  correlators  array of rows, C[k][l]
  table        {\"m\": m, \"n\": n, \"values\": values[r][s][k][l]}, outcome index 0 = -1, 1 = +1

Settings are numbered from 0 in all output. Floats are printed with 9 significant digits.
TEMPORAL_LAB_SEED, when set, overrides --seed.

Exit status: 0 success, 1 infeasible verdict from `membership`, 2 invalid input.";

/// Sequential projective measurements on one quantum system: correlations,
/// signaling, Hardy's paradox and realizability checks.
#[derive(Parser)]
#[command(name = "temporal-lab", version, after_long_help = FORMATS)]
struct Cli {
    /// Seed for stochastic searches and sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Joint probabilities, correlators, CHSH value and signaling of a scenario.
    #[command(group(ArgGroup::new("input").required(true).args(["scenario", "preset"])))]
    Probe {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
    },
    /// Maximize the Hardy probability, or check a given scenario.
    Hardy {
        #[arg(long, value_enum, default_value_t = Mode::Temporal)]
        mode: Mode,
        /// Hilbert space dimension of temporal searches.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Check this scenario instead of searching.
        #[arg(long, conflicts_with = "preset")]
        scenario: Option<PathBuf>,
        /// Check this preset instead of searching.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Hidden-variable or quantum realizability of correlators or a table.
    #[command(group(ArgGroup::new("input").required(true).args(["correlators", "table", "preset"])))]
    Membership {
        #[arg(long)]
        correlators: Option<PathBuf>,
        /// A probability table; only the classical test applies.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, value_enum)]
        test: Test,
    },
    /// Signaling region samples (CSV), channel capacity or the S+ maximum.
    #[command(group(ArgGroup::new("task").required(true).args(["region", "capacity", "search"])))]
    Signal {
        /// Number of (E1, E2) samples.
        #[arg(long)]
        region: Option<usize>,
        /// Capacity of the channel from Alice's setting to Bob's outcome.
        #[arg(long)]
        capacity: bool,
        /// Multi-start maximization of S+.
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Scenario for --capacity (default: the signal-protocol preset).
        #[arg(long, conflicts_with = "preset")]
        scenario: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Bob's setting defining the channel.
        #[arg(long, default_value_t = 0)]
        bob_setting: usize,
    },
    /// Generalized-measurement model reproducing a table.
    #[command(group(ArgGroup::new("input").required(true).args(["table", "preset"])))]
    Kraus {
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
    },
    /// Print a built-in scenario or table.
    #[command(group(ArgGroup::new("what").required(true).args(["name", "list"])))]
    Preset {
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Temporal,
    Spatial,
}

#[derive(Clone, Copy, ValueEnum)]
enum Test {
    Quantum,
    Classical,
}

enum Failure {
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type RunResult = std::result::Result<Output, Failure>;

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: temporal_lab::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn seed(cli_seed: Option<u64>) -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Input(format!("{SEED_VAR}={v:?} is not a 64-bit unsigned integer"))
        }),
        Err(_) => cli_seed
            .ok_or_else(|| Failure::Input(format!("this command needs --seed or {SEED_VAR}"))),
    }
}

fn load_scenario(
    path: Option<&PathBuf>,
    name: Option<&String>,
) -> Result<TemporalScenario, Failure> {
    match (path, name) {
        (Some(p), _) => with_path(p, parse_scenario(&read(p)?)),
        (None, Some(n)) => match preset(n)? {
            Preset::Scenario(sc) => Ok(sc),
            Preset::Table(_) => Err(Failure::Input(format!(
                "preset {n} is a table, not a scenario"
            ))),
        },
        (None, None) => Err(Failure::Input("no scenario given".into())),
    }
}

fn load_table(path: Option<&PathBuf>, name: Option<&String>) -> Result<ProbabilityTable, Failure> {
    match (path, name) {
        (Some(p), _) => with_path(p, parse_table(&read(p)?)),
        (None, Some(n)) => Ok(preset(n)?.table()?),
        (None, None) => Err(Failure::Input("no table given".into())),
    }
}

#[derive(Serialize)]
struct SignalingResidual {
    r: i8,
    k: usize,
    deviation: f64,
}

fn probe(sc: &TemporalScenario) -> RunResult {
    let table = full_table(sc)?;
    let c = correlators(sc);
    let chsh = if (c.m(), c.n()) == (2, 2) {
        Some(chsh_value(&c)?)
    } else {
        None
    };
    let s_plus = if sc.m() == 2 {
        Some(
            (0..sc.n())
                .map(|l| signaling_from_table(&table, Outcome::Plus, l))
                .collect::<temporal_lab::Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let residuals: Vec<SignalingResidual> = table
        .backward_signaling_residuals()
        .into_iter()
        .map(|(r, k, deviation)| SignalingResidual {
            r: r.sign() as i8,
            k,
            deviation,
        })
        .collect();
    Ok(Output::ok(to_json(&json!({
        "dim": sc.dim(),
        "m": sc.m(),
        "n": sc.n(),
        "table": TableJson::from(&table),
        "correlators": c.rows(),
        "chsh_value": chsh,
        "s_plus": s_plus,
        "backward_signaling": residuals,
        "backward_signaling_max": table.backward_signaling(),
    }))))
}

fn hardy(
    mode: Mode,
    dim: usize,
    restarts: usize,
    scenario: Option<&PathBuf>,
    name: Option<&String>,
    seed_arg: Option<u64>,
) -> RunResult {
    if scenario.is_some() || name.is_some() {
        let sc = load_scenario(scenario, name)?;
        let report = hardy_check(&sc, DEFAULT_TOL)?;
        return Ok(Output::ok(to_json(
            &json!({ "mode": "check", "value": report.paradox_value, "report": report }),
        )));
    }
    let seed = seed(seed_arg)?;
    if restarts == 0 {
        return Err(Failure::Input("--restarts must be positive".into()));
    }
    let (label, value, report, sc) = match mode {
        Mode::Temporal => {
            if dim < 2 {
                return Err(Failure::Input(format!(
                    "--dim must be at least 2, got {dim}"
                )));
            }
            let opt = hardy_max_temporal(dim, restarts, seed);
            ("temporal", opt.value, opt.report, opt.scenario)
        }
        Mode::Spatial => {
            if dim != 2 {
                return Err(Failure::Input(
                    "spatial search is over two qubits; use --dim 2".into(),
                ));
            }
            let opt = hardy_max_spatial(restarts, seed);
            ("spatial", opt.value, opt.report, opt.scenario.to_temporal())
        }
    };
    Ok(Output::ok(to_json(&json!({
        "mode": label,
        "dim": dim,
        "seed": seed,
        "restarts": restarts,
        "value": value,
        "report": report,
        "scenario": ScenarioJson::from(&sc),
    }))))
}

fn verdict_output(test: &str, v: &FeasibilityVerdict, extra: Option<f64>) -> Output {
    let text = to_json(&json!({ "test": test, "chsh_value": extra, "verdict": v }));
    Output {
        text,
        code: if v.feasible { 0 } else { 1 },
    }
}

fn membership(
    correlators_path: Option<&PathBuf>,
    table: Option<&PathBuf>,
    name: Option<&String>,
    test: Test,
) -> RunResult {
    let label = match test {
        Test::Quantum => "quantum",
        Test::Classical => "classical",
    };
    let chsh = |c: &CorrelatorMatrix| chsh_value(c).ok();
    let from_preset = name.map(|n| preset(n)).transpose()?;
    let c = match (correlators_path, &from_preset) {
        (Some(p), _) => Some(with_path(p, parse_correlators(&read(p)?))?),
        (None, Some(Preset::Scenario(sc))) => Some(correlators(sc)),
        _ => None,
    };
    if let Some(c) = c {
        let v = match test {
            Test::Quantum => tsirelson_feasible(&c)?,
            Test::Classical => hv_correlator_feasible(&c)?,
        };
        return Ok(verdict_output(label, &v, chsh(&c)));
    }
    let t = match (table, from_preset) {
        (Some(p), _) => with_path(p, parse_table(&read(p)?))?,
        (None, Some(Preset::Table(t))) => t,
        _ => return Err(Failure::Input("no input given".into())),
    };
    match test {
        Test::Classical => Ok(verdict_output(
            label,
            &hv_table_feasible(&t)?,
            chsh(&t.correlators()),
        )),
        Test::Quantum => Err(Failure::Input(
            "the quantum test applies to correlators; pass --correlators or a scenario preset"
                .into(),
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn signal(
    region: Option<usize>,
    capacity: bool,
    dim: usize,
    restarts: usize,
    scenario: Option<&PathBuf>,
    name: Option<&String>,
    bob_setting: usize,
    seed_arg: Option<u64>,
) -> RunResult {
    if let Some(samples) = region {
        if dim < 2 {
            return Err(Failure::Input(format!(
                "--dim must be at least 2, got {dim}"
            )));
        }
        let points = region_sample(dim, samples, seed(seed_arg)?);
        let mut buf = Vec::new();
        write_region_csv(&points, &mut buf)?;
        return Ok(Output::ok(String::from_utf8(buf).expect("CSV is UTF-8")));
    }
    if capacity {
        let default = "signal-protocol".to_string();
        let sc = load_scenario(scenario, Some(name.unwrap_or(&default)))?;
        let table = full_table(&sc)?;
        if table.m() != 2 {
            return Err(Failure::Input(format!(
                "capacity needs two Alice settings, found {}",
                table.m()
            )));
        }
        if bob_setting >= table.n() {
            return Err(Failure::Input(format!(
                "--bob-setting {bob_setting} out of range for {} settings",
                table.n()
            )));
        }
        let ch = InducedChannel::new(
            table.bob_marginal(Outcome::Plus, 0, bob_setting),
            table.bob_marginal(Outcome::Plus, 1, bob_setting),
        )?;
        let cap = channel_capacity(&ch);
        return Ok(Output::ok(to_json(&json!({
            "capacity_bits": cap.capacity_bits,
            "input_distribution": cap.input_distribution,
            "channel": ch.rows(),
            "bob_setting": bob_setting,
        }))));
    }
    if dim < 2 {
        return Err(Failure::Input(format!(
            "--dim must be at least 2, got {dim}"
        )));
    }
    let seed = seed(seed_arg)?;
    let opt = splus_max_search(dim, restarts.max(1), seed);
    Ok(Output::ok(to_json(&json!({
        "dim": dim,
        "seed": seed,
        "s_plus": opt.value,
        "scenario": ScenarioJson::from(&opt.scenario.temporal()),
    }))))
}

fn kraus(table: Option<&PathBuf>, name: Option<&String>) -> RunResult {
    let t = load_table(table, name)?;
    let (inst, residual) = round_trip(&t)?;
    Ok(Output::ok(to_json(&json!({
        "round_trip_residual": residual,
        "completeness_residual": inst.completeness_residual(),
        "povm_residual": inst.povm_residual(),
        "instrument": InstrumentJson::from(&inst),
    }))))
}

fn show_preset(name: Option<&String>, list: bool) -> RunResult {
    if list {
        return Ok(Output::ok(
            PRESET_NAMES.iter().map(|n| format!("{n}\n")).collect(),
        ));
    }
    let name = name.ok_or_else(|| Failure::Input("no preset name".into()))?;
    Ok(Output::ok(match preset(name)? {
        Preset::Scenario(sc) => to_json(&ScenarioJson::from(&sc)),
        Preset::Table(t) => to_json(&TableJson::from(&t)),
    }))
}

fn run(cli: &Cli) -> RunResult {
    match &cli.command {
        Command::Probe { scenario, preset } => {
            probe(&load_scenario(scenario.as_ref(), preset.as_ref())?)
        }
        Command::Hardy {
            mode,
            dim,
            restarts,
            scenario,
            preset,
        } => hardy(
            *mode,
            *dim,
            *restarts,
            scenario.as_ref(),
            preset.as_ref(),
            cli.seed,
        ),
        Command::Membership {
            correlators,
            table,
            preset,
            test,
        } => membership(correlators.as_ref(), table.as_ref(), preset.as_ref(), *test),
        Command::Signal {
            region,
            capacity,
            search: _,
            dim,
            restarts,
            scenario,
            preset,
            bob_setting,
        } => signal(
            *region,
            *capacity,
            *dim,
            *restarts,
            scenario.as_ref(),
            preset.as_ref(),
            *bob_setting,
            cli.seed,
        ),
        Command::Kraus { table, preset } => kraus(table.as_ref(), preset.as_ref()),
        Command::Preset { name, list } => show_preset(name.as_ref(), *list),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.output {
                Some(path) => {
                    fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display()))
                }
                None => std::io::stdout()
                    .write_all(out.text.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(out.code)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
