//! `--config` files and the `#` header written at the top of every output.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{ArgMatches, Command};

/// Options that never appear in an output header.
const UNLOGGED: [&str; 3] = ["config", "out", "workers"];

/// Reads `key=value` lines. Blank lines and `#` comments are skipped.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value, found {line:?}", path.display(), i + 1);
        };
        let k = k.trim();
        if k.is_empty() {
            bail!("{}:{}: empty key", path.display(), i + 1);
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Splices the options from any `--config FILE` into the argument list,
/// directly after the subcommand, so flags given on the command line come
/// later and take precedence. Keys must name an option of the subcommand.
pub fn expand(args: Vec<OsString>, cmd: &Command) -> Result<Vec<OsString>> {
    let is_sub = |a: &OsString| cmd.find_subcommand(a.to_string_lossy().as_ref()).is_some();
    let Some(sub_pos) = args.iter().skip(1).position(is_sub).map(|p| p + 1) else {
        return Ok(args);
    };
    let mut rest = Vec::new();
    let mut config = None;
    let mut it = args[sub_pos + 1..].iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            config = Some(it.next().context("--config needs a file")?.clone());
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(OsString::from(p));
        } else {
            rest.push(a.clone());
        }
    }
    let Some(path) = config else {
        return Ok(args);
    };
    let sub_name = args[sub_pos].to_string_lossy().to_string();
    let sub = cmd.find_subcommand(&sub_name).with_context(|| format!("unknown subcommand {sub_name:?}"))?;
    let mut out: Vec<OsString> = args[..=sub_pos].to_vec();
    for (k, v) in read_config(Path::new(&path))? {
        let arg = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(k.as_str()) && k != "config")
            .with_context(|| format!("{}: unknown key {k:?} for {sub_name}", Path::new(&path).display()))?;
        if arg.get_num_args().is_some_and(|n| n.max_values() == 0) {
            match v.as_str() {
                "true" | "1" | "yes" => out.push(format!("--{k}").into()),
                "false" | "0" | "no" => {}
                _ => bail!("{}: {k} expects true or false, found {v:?}", Path::new(&path).display()),
            }
        } else {
            out.push(format!("--{k}").into());
            out.push(v.into());
        }
    }
    out.extend(rest);
    Ok(out)
}

/// The resolved configuration of one run, written as `# key=value` lines.
#[derive(Clone, Debug)]
pub struct Header {
    lines: Vec<(String, String)>,
}

impl Header {
    /// Every argument of subcommand `sub`, defaults included.
    pub fn from_matches(sub: &Command, m: &ArgMatches) -> Self {
        let mut lines = vec![("command".to_string(), sub.get_name().to_string())];
        let is_arg = |id: &str| sub.get_arguments().any(|a| a.get_id() == id);
        let mut ids: Vec<&str> =
            m.ids().map(|id| id.as_str()).filter(|id| is_arg(id) && !UNLOGGED.contains(id)).collect();
        ids.sort_unstable();
        for id in ids {
            if let Ok(Some(vals)) = m.try_get_raw(id) {
                let v: Vec<String> = vals.map(|v| v.to_string_lossy().into_owned()).collect();
                lines.push((id.to_string(), v.join(",")));
            }
        }
        Header { lines }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.lines.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => {
                self.lines.push((key.to_string(), value));
                self.lines[1..].sort();
            }
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("# gtcode {}\n", env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.lines {
            s.push_str(&format!("# {k}={v}\n"));
        }
        s
    }
}
