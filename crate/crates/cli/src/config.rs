//! Optional flat TOML configuration. Keys match the long flag names and a
//! flag given on the command line always wins.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use multistage_mi::imputer::Method;

use crate::CommonArgs;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub m: Option<usize>,
    pub m1: Option<usize>,
    pub m2: Option<usize>,
    pub iterations: Option<usize>,
    pub method: Option<String>,
    pub threads: Option<usize>,
    pub scenarios: Option<Vec<u8>>,
    pub missingness: Option<Vec<String>>,
    pub strategies: Option<Vec<String>>,
    #[serde(alias = "R")]
    pub reps: Option<usize>,
    pub n: Option<usize>,
    pub output: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub outcome: Option<String>,
    pub predictors: Option<Vec<String>>,
    pub export: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("config {}", path.display()))
    }
}

/// Shared settings after merging flags over the file.
#[derive(Debug, Clone)]
pub struct Common {
    pub seed: Option<u64>,
    pub m: Option<usize>,
    pub m1: Option<usize>,
    pub m2: Option<usize>,
    pub iterations: Option<usize>,
    pub method: Method,
    pub threads: Option<usize>,
}

pub fn merge_common(args: &CommonArgs, file: &FileConfig) -> Result<Common> {
    let method = match args.method.as_ref().or(file.method.as_ref()) {
        Some(m) => m.parse::<Method>().context("--method")?,
        None => Method::Norm,
    };
    let threads = args.threads.or(file.threads);
    if threads == Some(0) {
        anyhow::bail!("--threads must be at least 1");
    }
    Ok(Common {
        seed: args.seed.or(file.seed),
        m: args.m.or(file.m),
        m1: args.m1.or(file.m1),
        m2: args.m2.or(file.m2),
        iterations: args.iterations.or(file.iterations),
        method,
        threads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: FileConfig = toml::from_str("seed = 3\nm = 7\nmethod = \"pmm\"\nR = 20").unwrap();
        assert_eq!(file.reps, Some(20));
        let args = CommonArgs { m: Some(9), ..CommonArgs::default() };
        let c = merge_common(&args, &file).unwrap();
        assert_eq!((c.seed, c.m, c.method), (Some(3), Some(9), Method::Pmm));
    }

    #[test]
    fn unknown_keys_are_reported_with_their_line() {
        let err = toml::from_str::<FileConfig>("seed = 1\nrepz = 5\n").unwrap_err().to_string();
        assert!(err.contains("repz") && err.contains("line 2"), "{err}");
    }
}
