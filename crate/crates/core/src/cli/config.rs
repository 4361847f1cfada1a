//! `key = value` config files, spliced into the argument list as flags.

use std::fs;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`, got `{raw}`", n + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", n + 1));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

fn as_flags(pairs: &[(String, String)]) -> Vec<String> {
    let mut flags = Vec::new();
    for (key, value) in pairs {
        match value.as_str() {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => {
                flags.push(format!("--{key}"));
                flags.push(value.clone());
            }
        }
    }
    flags
}

/// Removes `--config FILE` from `args` and inserts the file's settings right
/// after the subcommand, ahead of the explicit flags, which therefore win.
pub fn expand_config(mut args: Vec<String>, commands: &[&str]) -> Result<Vec<String>, String> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err("--config needs a file path".into());
            }
            path = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(p) = args[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            args.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let flags = as_flags(&parse_config(&text)?);
    let at = args
        .iter()
        .position(|a| commands.contains(&a.as_str()))
        .ok_or_else(|| "--config given without a command".to_string())?;
    args.splice(at + 1..at + 1, flags);
    Ok(args)
}
