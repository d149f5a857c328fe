//! `key = value` config files.
//!
//! Each key is a long flag name (`seed`, `metrics`, `cluster-resamples`, ...;
//! underscores are accepted). Values from the file are spliced into the
//! argument list ahead of the user's own flags, so flags given on the command
//! line win. Keys that belong to other subcommands are ignored, so one file
//! can serve every subcommand.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, Command};

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split_once('#').map_or(raw, |(l, _)| l).trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let v = v.trim();
        let v = v
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .unwrap_or(v);
        out.push((k.trim().replace('_', "-"), v.to_owned()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            return None;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn flag_kind(cmd: &Command, key: &str) -> Option<bool> {
    cmd.get_arguments()
        .find(|a| a.get_long() == Some(key))
        .map(|a| matches!(a.get_action(), ArgAction::SetTrue))
}

fn to_args(cmd: &Command, key: &str, value: &str) -> Result<Vec<OsString>, String> {
    match flag_kind(cmd, key) {
        Some(true) => match value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" | "on" => Ok(vec![format!("--{key}").into()]),
            "false" | "no" | "0" | "off" => Ok(Vec::new()),
            other => Err(format!("config key '{key}': expected a boolean, got '{other}'")),
        },
        Some(false) => Ok(vec![format!("--{key}").into(), value.into()]),
        None => Ok(Vec::new()),
    }
}

/// Splices config-file values into `args` (program name first).
pub fn expand_args(args: Vec<OsString>, root: &Command) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let entries = parse_config(&text)?;

    let sub_pos = args
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| root.find_subcommand(&*a.to_string_lossy()).is_some())
        .map(|(i, _)| i);
    let sub = sub_pos.and_then(|i| root.find_subcommand(&*args[i].to_string_lossy()));

    let known: BTreeSet<String> = root
        .get_arguments()
        .chain(root.get_subcommands().flat_map(Command::get_arguments))
        .filter_map(|a| a.get_long().map(str::to_owned))
        .collect();

    let mut global = Vec::new();
    let mut local = Vec::new();
    for (key, value) in &entries {
        if key == "config" {
            continue;
        }
        if !known.contains(key) {
            return Err(format!("unknown config key '{key}'"));
        }
        if flag_kind(root, key).is_some() {
            global.extend(to_args(root, key, value)?);
        } else if let Some(sub) = sub {
            local.extend(to_args(sub, key, value)?);
        }
    }

    let mut out = Vec::with_capacity(args.len() + global.len() + local.len());
    out.push(args[0].clone());
    out.extend(global);
    match sub_pos {
        Some(i) => {
            out.extend_from_slice(&args[1..=i]);
            out.extend(local);
            out.extend_from_slice(&args[i + 1..]);
        }
        None => out.extend_from_slice(&args[1..]),
    }
    Ok(out)
}
