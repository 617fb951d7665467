//! `key = value` configuration files.
//!
//! A file is turned into `--key value` arguments placed in front of the
//! command-line flags; since every flag may repeat and the last occurrence
//! wins, explicit flags override file values.

use std::path::Path;

use crate::error::{HlabError, Result};
use crate::io::read_text;

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// skipped, keys use either `-` or `_`.
pub fn parse_config(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| HlabError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("expected key = value, got '{line}'"),
        })?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(HlabError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: "empty key".into(),
            });
        }
        let value = v.trim().trim_matches('"').to_string();
        out.push((key, value));
    }
    Ok(out)
}

/// Flag arguments for the pairs; `true`/`false` values become a bare flag
/// or nothing.
pub fn config_args(pairs: &[(String, String)]) -> Vec<String> {
    let mut args = Vec::new();
    for (k, v) in pairs {
        match v.as_str() {
            "true" => args.push(format!("--{k}")),
            "false" => {}
            _ => {
                args.push(format!("--{k}"));
                args.push(v.clone());
            }
        }
    }
    args
}

/// Rewrites `argv` so that the pairs of a `--config FILE` (anywhere after
/// the subcommand) come right after the subcommand name.
pub fn expand_config(argv: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config: Option<String> = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().ok_or_else(|| HlabError::Usage("--config needs a file".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(file) = config else {
        return Ok(rest);
    };
    let path = Path::new(&file);
    let pairs = parse_config(&read_text(path)?, path)?;
    // position of the subcommand: first non-flag after the program name,
    // skipping values of global options
    let mut idx = 1;
    while idx < rest.len() && rest[idx].starts_with('-') {
        idx += if rest[idx] == "--format" { 2 } else { 1 };
    }
    let insert_at = (idx + 1).min(rest.len());
    let mut out: Vec<String> = rest[..insert_at].to_vec();
    out.extend(config_args(&pairs));
    out.extend_from_slice(&rest[insert_at..]);
    Ok(out)
}
