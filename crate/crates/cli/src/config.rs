//! `--config FILE`: lines of `key = value` (with `#` comments) become
//! `--key value` arguments. Keys also given on the command line are dropped,
//! so explicit flags override the file.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use treeprofiles::Error;

pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, Error> {
    let Some(pos) = args.iter().position(|a| a == "--config") else {
        return Ok(args);
    };
    let Some(path) = args.get(pos + 1) else {
        return Ok(args);
    };
    let path = Path::new(path);
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let given: Vec<&OsString> = args.iter().filter(|a| a.to_string_lossy().starts_with("--")).collect();
    let mut injected = Vec::new();
    for (flag, value) in parse(&text)? {
        if given.iter().any(|g| g.to_string_lossy() == flag) {
            continue;
        }
        injected.push(flag);
        injected.extend(value);
    }
    // program name and subcommand stay in front
    let split = 2.min(args.len());
    let mut out: Vec<OsString> = args[..split].to_vec();
    out.extend(injected.into_iter().map(OsString::from));
    out.extend(args[split..].iter().cloned());
    Ok(out)
}

/// `(--flag, value)` pairs; boolean keys carry no value.
fn parse(text: &str) -> Result<Vec<(String, Option<String>)>, Error> {
    let mut out = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!("config line {}: expected key = value", number + 1))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        if key == "config" {
            return Err(Error::InvalidArgument("config files cannot include others".into()));
        }
        match value {
            "true" => out.push((format!("--{key}"), None)),
            "false" => {}
            _ => out.push((format!("--{key}"), Some(value.to_string()))),
        }
    }
    Ok(out)
}
