//! Resolution of model and automaton sources: a JSON file path, or a built-in name.
//!
//! Built-in models: `fig1`, `case1`, `case2` (6×6), `case2:<n>`, `random:<seed>`.
//! Built-in automata: the names in [`BUILTIN_NAMES`] and `random:<seed>`.

use std::fs;
use std::path::Path;

use ltlrl::automata::{builtin_automaton, load_automaton, AutomatonDocument, Ldgba, BUILTIN_NAMES};
use ltlrl::mdp::{build_grid_env, load_plmdp, GridSpec, PlMdp, PlMdpDocument};
use ltlrl::models;
use serde::de::DeserializeOwned;

use crate::error::{io_err, CliError, Result};

pub const MODEL_BUILTINS: [&str; 5] = ["fig1", "case1", "case2", "case2:<n>", "random:<seed>"];

/// Side length of the `case2` built-in.
pub const CASE2_DEFAULT_SIZE: usize = 6;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn suffix<T: std::str::FromStr>(source: &str, prefix: &str) -> Option<T> {
    source.strip_prefix(prefix)?.parse().ok()
}

fn model_builtin(source: &str) -> Option<PlMdp> {
    match source {
        "fig1" => Some(models::example_mdp()),
        "case1" => Some(models::case1_grid()),
        "case2" => Some(models::case2_grid(CASE2_DEFAULT_SIZE)),
        _ => {
            if let Some(n) = suffix::<usize>(source, "case2:") {
                (n >= 5).then(|| models::case2_grid(n))
            } else {
                suffix::<u64>(source, "random:").map(models::random_grid)
            }
        }
    }
}

/// A file holding an object with a `width` key is read as a grid, any other
/// file as an explicit PL-MDP document.
pub fn load_model(source: &str) -> Result<PlMdp> {
    let path = Path::new(source);
    if path.is_file() {
        let value: serde_json::Value = read_json(path)?;
        let parse = |e| CliError::Parse {
            path: path.to_path_buf(),
            source: e,
        };
        let m = if value.get("width").is_some() {
            build_grid_env(&serde_json::from_value::<GridSpec>(value).map_err(parse)?)?
        } else {
            load_plmdp(&serde_json::from_value::<PlMdpDocument>(value).map_err(parse)?)?
        };
        return Ok(m);
    }
    model_builtin(source).ok_or_else(|| CliError::Source(source.to_string()))
}

pub fn load_automaton_source(source: &str) -> Result<Ldgba> {
    let path = Path::new(source);
    if path.is_file() {
        let doc: AutomatonDocument = read_json(path)?;
        return Ok(load_automaton(&doc)?);
    }
    if BUILTIN_NAMES.contains(&source) {
        return Ok(builtin_automaton(source)?);
    }
    suffix::<u64>(source, "random:")
        .map(models::random_ldgba)
        .ok_or_else(|| CliError::Source(source.to_string()))
}

/// Whether `source` names an existing file or a built-in, without loading it.
pub fn model_source_exists(source: &str) -> bool {
    Path::new(source).is_file()
        || matches!(source, "fig1" | "case1" | "case2")
        || suffix::<usize>(source, "case2:").is_some_and(|n| n >= 5)
        || suffix::<u64>(source, "random:").is_some()
}

pub fn automaton_source_exists(source: &str) -> bool {
    Path::new(source).is_file()
        || BUILTIN_NAMES.contains(&source)
        || suffix::<u64>(source, "random:").is_some()
}
