mod args;
mod commands;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use upfrac_core::{Error, ErrorClass};

use args::{Cli, Command};
use commands::{pretty, Outcome};

const SCHEMA_VERSION: u32 = 1;

/// Applies the keys of the `--config` object on top of the parsed flags.
fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&serde_json::Map<String, Value>>) -> Result<T, Error> {
    let mut v = serde_json::to_value(flags).expect("arguments serialize");
    if let Some(cfg) = config {
        let obj = v.as_object_mut().expect("arguments are an object");
        for (k, val) in cfg {
            obj.insert(k.clone(), val.clone());
        }
    }
    serde_json::from_value(v).map_err(|e| Error::Input(format!("config: {e}")))
}

fn read_config(path: &Path, command: &str) -> Result<(serde_json::Map<String, Value>, Option<u64>), Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Input(format!("config: {e}")))?;
    let Value::Object(mut map) = value else {
        return Err(Error::Input("config must be a JSON object".into()));
    };
    if let Some(sub) = map.remove("subcommand") {
        if sub.as_str() != Some(command) {
            return Err(Error::Input(format!("config is for subcommand {sub}, not '{command}'")));
        }
    }
    let seed = match map.remove("seed") {
        None => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| Error::Input("seed must be a non-negative integer".into()))?),
    };
    Ok((map, seed))
}

fn run(cli: &Cli) -> Result<(Value, Outcome), Error> {
    let name = cli.command.name();
    let (config, seed) = match &cli.config {
        Some(path) => {
            let (map, seed) = read_config(path, name)?;
            (Some(map), seed)
        }
        None => (None, None),
    };
    let seed = seed.unwrap_or(cli.seed);
    let cfg = config.as_ref();
    let (params, outcome) = match &cli.command {
        Command::Density(a) => {
            let a = merge(a, cfg)?;
            (serde_json::to_value(&a), commands::density(&a)?)
        }
        Command::Nup(a) => {
            let a = merge(a, cfg)?;
            (serde_json::to_value(&a), commands::nup(&a)?)
        }
        Command::Phase(a) => {
            let a = merge(a, cfg)?;
            (serde_json::to_value(&a), commands::phase(&a)?)
        }
        Command::Fraclap(a) => {
            let a = merge(a, cfg)?;
            (serde_json::to_value(&a), commands::fraclap(&a)?)
        }
        Command::DecayAudit(a) => {
            let a = merge(a, cfg)?;
            (serde_json::to_value(&a), commands::decay(&a)?)
        }
    };
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": name,
        "seed": seed,
        "params": params.expect("arguments serialize"),
        "result": outcome.result,
        "artifacts": outcome.artifacts.iter().map(|a| a.0.clone()).collect::<Vec<_>>(),
    });
    Ok((summary, outcome))
}

fn write_outputs(dir: &Path, summary: &Value, outcome: &Outcome) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::Input(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("summary.json"), pretty(summary)).map_err(io)?;
    for (name, body) in &outcome.artifacts {
        std::fs::write(dir.join(name), body).map_err(io)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(summary, outcome)| {
        if let Some(dir) = &cli.out {
            write_outputs(dir, &summary, &outcome)?;
        }
        Ok(summary)
    });
    match result {
        Ok(summary) => {
            print!("{}", pretty(&summary));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            match e.class() {
                ErrorClass::Precondition => ExitCode::from(2),
                ErrorClass::Accuracy => ExitCode::from(3),
            }
        }
    }
}
