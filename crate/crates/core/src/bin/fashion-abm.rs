use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fashion_abm::engine::run_sweep;
use fashion_abm::output::{emit_outputs, write_sweep_summary};
use fashion_abm::population::PopulationSource;
use fashion_abm::{oracle, presets, run, Error, GridAxis, ScenarioConfig, SweepKey};

/// Seeded agent-based simulator of fast-fashion purchasing.
#[derive(Debug, Parser)]
#[command(name = "fashion-abm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write its outputs.
    Run(RunArgs),
    /// List or print the built-in scenarios.
    Preset(PresetArgs),
    /// Run a scenario grid over several seeds and summarise it.
    Sweep(SweepArgs),
    /// Compare the engine with the reference implementation.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override engine.seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct PresetArgs {
    #[arg(long)]
    list: bool,
    /// Print a preset as a complete config file.
    #[arg(long, value_name = "NAME")]
    show: Option<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Extra axis, e.g. `delta=0.1,0.3,0.5`. Repeatable.
    #[arg(long = "param", value_name = "KEY=V1,V2,...", value_parser = parse_axis)]
    params: Vec<GridAxis>,
    /// Number of seeds, counting up from engine.seed (or --seed).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    seeds: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 12)]
    agents: usize,
    #[arg(long, default_value_t = 3)]
    ticks: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn parse_axis(text: &str) -> Result<GridAxis, String> {
    let (key, values) = text
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=V1,V2,... but got `{text}`"))?;
    let key: SweepKey = key.trim().parse()?;
    let values = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GridAxis::new(key, values))
}

fn load(path: &Path) -> Result<ScenarioConfig, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut scenario = fashion_abm::parse_config(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })?;
    // population CSVs are relative to the config file
    if let PopulationSource::Csv(csv) = &mut scenario.population.source {
        if csv.is_relative() {
            if let Some(dir) = path.parent() {
                *csv = dir.join(&*csv);
            }
        }
    }
    Ok(scenario)
}

fn cell_dir_name(label: &str) -> String {
    label.replace(';', "_").replace('=', "-")
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let mut scenario = load(&args.config)?;
    if let Some(seed) = args.seed {
        scenario.engine.seed = seed;
    }
    scenario.validate()?;
    let cells = scenario.cells();
    let multi = cells.len() > 1;
    for cell in cells {
        let label = cell.label();
        let out = run(&cell.scenario)?;
        let dir = if multi { args.out.join(cell_dir_name(&label)) } else { args.out.clone() };
        let title = format!("{label}, seed {}", cell.scenario.engine.seed);
        let files = emit_outputs(&out, &scenario.outputs, &dir, &title)?;
        println!("{label}: {} files in {}", files.len(), dir.display());
    }
    Ok(())
}

fn cmd_preset(args: PresetArgs) -> Result<(), Error> {
    if let Some(name) = args.show {
        let scenario = presets::preset(&name).ok_or_else(|| Error::Config {
            key: "preset".into(),
            message: format!("unknown preset `{name}`"),
        })?;
        print!("{}", fashion_abm::to_config_text(&scenario));
    } else {
        for name in presets::PRESET_NAMES {
            println!("{name}  {}", presets::describe(name).unwrap_or(""));
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Error> {
    let scenario = load(&args.config)?;
    let base = args.seed.unwrap_or(scenario.engine.seed);
    let seeds: Vec<u64> = (0..args.seeds).map(|i| base.wrapping_add(i)).collect();
    let cells = run_sweep(&scenario, &args.params, &seeds)?;
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let path = args.out.join("sweep_summary.csv");
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    if let Err(e) = write_sweep_summary(&cells, file) {
        let _ = fs::remove_file(&path);
        return Err(e);
    }
    println!("{} cells x {} seeds -> {}", cells.len(), seeds.len(), path.display());
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<bool, Error> {
    let scenario = oracle::check_scenario(args.agents, args.ticks, args.seed);
    match oracle::compare_with_engine(&scenario)? {
        None => {
            println!(
                "ok: {} agents, {} ticks, seed {}: engine and reference are bit-identical",
                args.agents, args.ticks, args.seed
            );
            Ok(true)
        }
        Some((tick, agent)) => {
            eprintln!("mismatch: first divergence at tick {tick}, agent {agent}");
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Preset(a) => cmd_preset(a).map(|_| true),
        Command::Sweep(a) => cmd_sweep(a).map(|_| true),
        Command::OracleCheck(a) => cmd_oracle(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
