//! Plain-text `key = value` run configuration.
//!
//! Each entry stands for the long flag of the same name (`_` and `-` are
//! interchangeable). File entries are placed ahead of the command-line
//! flags, and since a repeated flag keeps its last value, flags win.

use std::ffi::OsString;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Parses the file body into `(key, value)` pairs. `#` starts a comment.
pub fn parse(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::invalid(format!("config line {}: expected `key = value`", n + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(CliError::invalid(format!("config line {}: bad key `{key}`", n + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Flag tokens for the entries: `true` and `false` toggle switches, lists
/// separated by commas stay one value.
pub fn to_args(entries: &[(String, String)]) -> Vec<OsString> {
    let mut args = Vec::new();
    for (key, value) in entries {
        match value.as_str() {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                args.push(format!("--{key}").into());
                args.push(value.into());
            }
        }
    }
    args
}

fn load(path: &Path) -> CliResult<Vec<OsString>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(to_args(&parse(&text)?))
}

/// Removes `--config FILE` from `argv` and splices the file's flags in
/// right after the subcommand name.
pub fn expand(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config = None;
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            let path = it
                .next()
                .ok_or_else(|| CliError::invalid("--config needs a file argument"))?;
            config = Some(path);
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(p.into());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let extra = load(Path::new(&path))?;
    // program name, then the first bare word is the subcommand
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 2)
        .unwrap_or(rest.len());
    let mut out = rest[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&rest[at..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries() {
        let e = parse("# run\nquantiles = 20\nk_max=5 # inline\n\ninteger = true\nplots = false\n").unwrap();
        assert_eq!(e.len(), 4);
        assert_eq!(e[1], ("k-max".to_string(), "5".to_string()));
        let args: Vec<String> = to_args(&e).into_iter().map(|a| a.into_string().unwrap()).collect();
        assert_eq!(args, ["--quantiles", "20", "--k-max", "5", "--integer"]);
        assert!(parse("nonsense").is_err());
        assert!(parse("= 3").is_err());
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "quantiles = 20\n").unwrap();
        let argv: Vec<OsString> = ["qgsynth", "synth", "--config", path.to_str().unwrap(), "--quantiles", "7"]
            .iter()
            .map(OsString::from)
            .collect();
        let out: Vec<String> = expand(argv).unwrap().into_iter().map(|a| a.into_string().unwrap()).collect();
        assert_eq!(out, ["qgsynth", "synth", "--quantiles", "20", "--quantiles", "7"]);
    }
}
