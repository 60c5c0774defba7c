//! `key = value` config files merged into the argument list.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses `key = value` lines. Blank lines and `#` comments are skipped; keys
/// may use `_` or `-`.
pub fn parse(text: &str, source: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{source}:{}: expected `key = value`", i + 1);
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            bail!("{source}:{}: empty key", i + 1);
        }
        if key == "config" {
            bail!("{source}:{}: config files cannot include other config files", i + 1);
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

fn flag_name(arg: &OsString) -> Option<String> {
    let s = arg.to_str()?;
    let name = s.strip_prefix("--")?;
    Some(name.split('=').next().unwrap_or(name).to_string())
}

/// Finds `--config FILE` or `--config=FILE` in `argv`.
fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(arg) = it.next() {
        if arg == "--config" {
            return it.next().cloned();
        }
        if let Some(path) = arg.to_str().and_then(|s| s.strip_prefix("--config=")) {
            return Some(path.into());
        }
    }
    None
}

/// Inserts flags from the `--config` file (if any) right after the subcommand
/// name, skipping keys that are also given on the command line so explicit
/// flags win. `true`/`false` values toggle switch flags.
pub fn merge(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
    let pairs = parse(&text, &path.display().to_string())?;
    let explicit: Vec<String> = argv.iter().filter_map(flag_name).collect();
    let mut injected = Vec::new();
    for (key, value) in pairs {
        if explicit.contains(&key) {
            continue;
        }
        match value.as_str() {
            "true" => injected.push(OsString::from(format!("--{key}"))),
            "false" => {}
            _ => {
                injected.push(OsString::from(format!("--{key}")));
                injected.push(OsString::from(value));
            }
        }
    }
    // argv[0] is the program and argv[1] the subcommand
    let split = argv.len().min(2);
    let mut merged = argv[..split].to_vec();
    merged.extend(injected);
    merged.extend_from_slice(&argv[split..]);
    Ok(merged)
}
