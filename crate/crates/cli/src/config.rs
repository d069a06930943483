//! TOML config files merged under explicit command-line flags.
//!
//! The file is a flat table whose keys are the long option names of the
//! invoked subcommand (kebab or snake case); values fill in wherever the
//! command line left the default. Explicit flags always win. Unknown keys
//! are rejected.

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches};
use std::path::Path;

use crate::Cli;

pub fn apply_config(path: &Path, matches: &ArgMatches) -> Result<Cli, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let table: toml::Table =
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;

    let (sub_name, sub_matches) = matches
        .subcommand()
        .ok_or_else(|| "config requires a subcommand".to_string())?;
    let cmd = Cli::command();
    let sub_cmd = cmd
        .find_subcommand(sub_name)
        .ok_or_else(|| format!("unknown subcommand {sub_name}"))?;

    // long flag -> arg id, for the subcommand plus global args
    let mut known: Vec<(String, String, bool)> = Vec::new(); // (long, id, is_flag)
    for arg in sub_cmd.get_arguments().chain(cmd.get_arguments()) {
        if let Some(long) = arg.get_long() {
            if long == "config" || long == "help" || long == "version" {
                continue;
            }
            let is_flag = matches!(arg.get_action(), clap::ArgAction::SetTrue);
            known.push((long.to_string(), arg.get_id().to_string(), is_flag));
        }
    }

    let mut extra: Vec<String> = Vec::new();
    for (key, value) in &table {
        let norm = key.replace('_', "-");
        let Some((long, id, is_flag)) = known.iter().find(|(l, _, _)| *l == norm) else {
            return Err(format!(
                "config {}: unknown field '{key}' for subcommand {sub_name}",
                path.display()
            ));
        };
        // explicit command-line flags win
        let source = sub_matches
            .try_get_one::<String>(id)
            .map(|_| sub_matches.value_source(id))
            .unwrap_or_else(|_| sub_matches.value_source(id))
            .or_else(|| matches.value_source(id));
        if source == Some(ValueSource::CommandLine) {
            continue;
        }
        if *is_flag {
            match value {
                toml::Value::Boolean(true) => extra.push(format!("--{long}")),
                toml::Value::Boolean(false) => {}
                other => {
                    return Err(format!(
                        "config {}: field '{key}' must be a boolean, got {other}",
                        path.display()
                    ))
                }
            }
        } else {
            let rendered = match value {
                toml::Value::String(s) => s.clone(),
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::Float(f) => f.to_string(),
                toml::Value::Boolean(b) => b.to_string(),
                toml::Value::Array(items) => items
                    .iter()
                    .map(|v| match v {
                        toml::Value::String(s) => Ok(s.clone()),
                        toml::Value::Integer(i) => Ok(i.to_string()),
                        toml::Value::Float(f) => Ok(f.to_string()),
                        other => Err(format!(
                            "config {}: unsupported array element {other} in '{key}'",
                            path.display()
                        )),
                    })
                    .collect::<Result<Vec<_>, _>>()?
                    .join(","),
                other => {
                    return Err(format!(
                        "config {}: unsupported value {other} for '{key}'",
                        path.display()
                    ))
                }
            };
            extra.push(format!("--{long}"));
            extra.push(rendered);
        }
    }

    // re-parse with the config-derived arguments appended
    let mut argv: Vec<String> = std::env::args().collect();
    argv.extend(extra);
    let new_matches = Cli::command()
        .try_get_matches_from(&argv)
        .map_err(|e| format!("config {}: {e}", path.display()))?;
    Cli::from_arg_matches(&new_matches).map_err(|e| e.to_string())
}
