//! Flat key/value configuration files.
//!
//! Every key names a long flag of the chosen subcommand (`m = 50` means
//! `--m 50`, `min_gain_ratio = 0.1` means `--min-gain-ratio 0.1`). A
//! boolean `true` turns a switch on. Flags given on the command line win
//! over the file.

use std::ffi::OsString;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Turn a TOML document into flag tokens.
pub fn config_tokens(path: &Path, text: &str) -> CliResult<Vec<OsString>> {
    let bad = |message: String| CliError::Config {
        path: path.to_path_buf(),
        message,
    };
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| bad(e.to_string()))?;
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" {
            return Err(bad("config files cannot include other config files".into()));
        }
        let text = match value {
            toml::Value::String(s) => s,
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(f) => f.to_string(),
            toml::Value::Boolean(true) => {
                out.push(flag.into());
                continue;
            }
            toml::Value::Boolean(false) => continue,
            other => return Err(bad(format!("`{key}` must be a scalar, found {}", other.type_str()))),
        };
        out.push(flag.into());
        out.push(text.into());
    }
    Ok(out)
}

/// Location of the `--config` value in raw arguments, if any.
fn find_config(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
        if s == "--" {
            break;
        }
    }
    None
}

/// Number of leading tokens naming the program and subcommand path.
fn command_prefix_len(args: &[OsString]) -> usize {
    match args.get(1).map(|a| a.to_string_lossy()) {
        Some(c) if c == "demo" => 3.min(args.len()),
        Some(c) if !c.starts_with('-') => 2,
        _ => 1,
    }
}

/// Splice config-file flags in front of the command-line flags.
pub fn expand_config(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = find_config(&args) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let tokens = config_tokens(path, &text)?;
    let split = command_prefix_len(&args);
    let mut out = args[..split].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&args[split..]);
    Ok(out)
}
