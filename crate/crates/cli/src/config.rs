use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use zaremba_core::ensemble::EPS0_MAX;
use zaremba_core::Alphabet;

use crate::CliError;

/// Every tunable. All of them may also come from `--config FILE`; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Alphabet, e.g. `1,2` or `1..10`.
    #[arg(long, global = true)]
    pub alphabet: Option<String>,
    /// Horizon N (accepts `100000`, `1e5`, `10^5`).
    #[arg(long = "N", global = true, value_parser = parse_count)]
    pub n: Option<u64>,
    /// Comma-separated increasing horizons.
    #[arg(long = "N-list", global = true, value_delimiter = ',', value_parser = parse_count)]
    pub n_list: Option<Vec<u64>>,
    #[arg(long, global = true)]
    pub eps0: Option<f64>,
    #[arg(long, global = true)]
    pub nu: Option<f64>,
    /// Desk-scale stand-in for Q0.
    #[arg(long = "q0-override", global = true)]
    pub q0_override: Option<u64>,
    /// Discretisation density T.
    #[arg(short = 'T', global = true)]
    pub t: Option<u64>,
    /// Quadrature nodes per period of the fastest term.
    #[arg(long, global = true)]
    pub grid: Option<f64>,
    /// Cylinder depth for the dimension bracket.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Norm window ratio C: members have norm in (N/C, N].
    #[arg(long = "window-ratio", global = true)]
    pub window_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub m1: Option<f64>,
    #[arg(long, global = true)]
    pub m3: Option<f64>,
    /// Window slack C' for the factorization report.
    #[arg(long, global = true)]
    pub slack: Option<f64>,
    /// gamma = 1 - delta for the region geometry (default from the bracket).
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Side length of the (q, K) partition grid.
    #[arg(long = "partition-size", global = true)]
    pub partition_size: Option<usize>,
    /// Cross-check the census against the quadratic oracle.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Keep and write one witness word per denominator.
    #[arg(long, global = true)]
    pub witnesses: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write output files into this directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the JSON report on stdout (the default).
    #[arg(long, global = true)]
    pub json: bool,
    /// Print the CSV table on stdout instead of JSON.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// `123`, `1e5`, `10^6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim().replace('_', "");
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let value = if let Some((b, e)) = s.split_once('^') {
        let b: u64 = b.parse().map_err(|_| format!("bad number {s}"))?;
        let e: u32 = e.parse().map_err(|_| format!("bad exponent in {s}"))?;
        b.checked_pow(e).ok_or(format!("{s} overflows"))?
    } else {
        let f: f64 = s.parse().map_err(|_| format!("bad number {s}"))?;
        if !(f >= 0.0 && f.fract() == 0.0 && f < 1.8e19) {
            return Err(format!("{s} is not a nonnegative integer"));
        }
        f as u64
    };
    Ok(value)
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::Validation(format!("config: cannot read {key} = {value}"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, v)),
    }
}

fn fill<T: std::str::FromStr>(slot: &mut Option<T>, key: &str, v: &str) -> Result<(), CliError> {
    if slot.is_none() {
        *slot = Some(v.parse().map_err(|_| bad(key, v))?);
    }
    Ok(())
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("config line {}: expected key = value", i + 1))
        })?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

impl Opts {
    /// Fills every unset option from the config file.
    pub fn merge_file(&mut self, map: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (k, v) in map {
            let v = v.as_str();
            match k.as_str() {
                "alphabet" => fill(&mut self.alphabet, k, v)?,
                "N" => {
                    if self.n.is_none() {
                        self.n = Some(parse_count(v).map_err(|_| bad(k, v))?);
                    }
                }
                "N_list" => {
                    if self.n_list.is_none() {
                        let list = v
                            .split(',')
                            .map(parse_count)
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| bad(k, v))?;
                        self.n_list = Some(list);
                    }
                }
                "eps0" => fill(&mut self.eps0, k, v)?,
                "nu" => fill(&mut self.nu, k, v)?,
                "q0_override" => fill(&mut self.q0_override, k, v)?,
                "T" => fill(&mut self.t, k, v)?,
                "grid" => fill(&mut self.grid, k, v)?,
                "depth" => fill(&mut self.depth, k, v)?,
                "window_ratio" => fill(&mut self.window_ratio, k, v)?,
                "m1" => fill(&mut self.m1, k, v)?,
                "m3" => fill(&mut self.m3, k, v)?,
                "slack" => fill(&mut self.slack, k, v)?,
                "gamma" => fill(&mut self.gamma, k, v)?,
                "partition_size" => fill(&mut self.partition_size, k, v)?,
                "seed" => fill(&mut self.seed, k, v)?,
                "workers" => fill(&mut self.workers, k, v)?,
                "out" => fill(&mut self.out, k, v)?,
                "oracle" => self.oracle |= parse_bool(k, v)?,
                "witnesses" => self.witnesses |= parse_bool(k, v)?,
                _ => return Err(CliError::Validation(format!("config: unknown key {k}"))),
            }
        }
        Ok(())
    }
}

/// The fully resolved run configuration, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub alphabet: Option<Alphabet>,
    pub horizons: Vec<u64>,
    pub eps0: f64,
    pub nu: f64,
    pub q0_override: u64,
    pub density: Option<u64>,
    pub grid: f64,
    pub depth: Option<usize>,
    pub window_ratio: f64,
    pub m1: Option<f64>,
    pub m3: Option<f64>,
    pub slack: f64,
    pub gamma: Option<f64>,
    pub partition_size: usize,
    pub oracle: bool,
    pub witnesses: bool,
    pub seed: u64,
}

pub const DEFAULT_EPS0: f64 = 1e-4;
pub const DEFAULT_NU: f64 = 1.5;
pub const DEFAULT_Q0: u64 = 10;
pub const DEFAULT_GRID: f64 = 8.0;
pub const DEFAULT_WINDOW_RATIO: f64 = 2.0;
pub const DEFAULT_SLACK: f64 = 8.0;
pub const DEFAULT_PARTITION: usize = 512;
pub const DEFAULT_SEED: u64 = 2024;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl RunConfig {
    pub fn resolve(command: &'static str, o: &Opts) -> Result<Self, CliError> {
        let alphabet = o
            .alphabet
            .as_deref()
            .map(|s| {
                s.parse::<Alphabet>()
                    .map_err(|e| invalid(format!("alphabet: {e}")))
            })
            .transpose()?;
        let horizons = match (&o.n, &o.n_list) {
            (Some(_), Some(_)) => return Err(invalid("give either --N or --N-list, not both")),
            (Some(n), None) => vec![*n],
            (None, Some(l)) => l.clone(),
            (None, None) => Vec::new(),
        };
        if horizons.contains(&0) {
            return Err(invalid("N must be positive"));
        }
        if horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("N-list must be strictly increasing"));
        }
        let c = RunConfig {
            command,
            alphabet,
            horizons,
            eps0: o.eps0.unwrap_or(DEFAULT_EPS0),
            nu: o.nu.unwrap_or(DEFAULT_NU),
            q0_override: o.q0_override.unwrap_or(DEFAULT_Q0),
            density: o.t,
            grid: o.grid.unwrap_or(DEFAULT_GRID),
            depth: o.depth,
            window_ratio: o.window_ratio.unwrap_or(DEFAULT_WINDOW_RATIO),
            m1: o.m1,
            m3: o.m3,
            slack: o.slack.unwrap_or(DEFAULT_SLACK),
            gamma: o.gamma,
            partition_size: o.partition_size.unwrap_or(DEFAULT_PARTITION),
            oracle: o.oracle,
            witnesses: o.witnesses,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.eps0 > 0.0 && self.eps0 < 1.0) {
            return Err(invalid(format!("eps0 = {} not in (0, 1)", self.eps0)));
        }
        if !(1.0..=2.0).contains(&self.nu) {
            return Err(invalid(format!("nu = {} not in [1, 2]", self.nu)));
        }
        if self.q0_override == 0 {
            return Err(invalid("q0-override must be positive"));
        }
        if self.density == Some(0) {
            return Err(invalid("T must be at least 1"));
        }
        if !(self.grid > 0.0) {
            return Err(invalid("grid must be positive"));
        }
        if self.depth == Some(0) {
            return Err(invalid("depth must be at least 1"));
        }
        if !(self.window_ratio > 1.0 && self.window_ratio <= 10.0) {
            return Err(invalid("window-ratio must be in (1, 10]"));
        }
        if !(self.slack >= 1.0) {
            return Err(invalid("slack must be at least 1"));
        }
        if let Some(g) = self.gamma {
            if !(0.0..1.0).contains(&g) {
                return Err(invalid("gamma must be in [0, 1)"));
            }
        }
        if self.partition_size < 2 {
            return Err(invalid("partition-size must be at least 2"));
        }
        Ok(())
    }

    pub fn alphabet(&self) -> Result<&Alphabet, CliError> {
        self.alphabet
            .as_ref()
            .ok_or_else(|| invalid("--alphabet is required"))
    }

    pub fn nontrivial_alphabet(&self) -> Result<&Alphabet, CliError> {
        let a = self.alphabet()?;
        if a.len() < 2 {
            return Err(invalid(format!("alphabet {a} needs at least two letters")));
        }
        Ok(a)
    }

    pub fn horizons(&self) -> Result<&[u64], CliError> {
        if self.horizons.is_empty() {
            return Err(invalid("--N or --N-list is required"));
        }
        Ok(&self.horizons)
    }

    pub fn single_horizon(&self) -> Result<u64, CliError> {
        match self.horizons()? {
            [n] => Ok(*n),
            _ => Err(invalid("this command takes a single --N")),
        }
    }

    /// eps0 for quantities that need it strictly below 1/2500.
    pub fn strict_eps0(&self) -> Result<f64, CliError> {
        if self.eps0 < EPS0_MAX {
            Ok(self.eps0)
        } else {
            Err(invalid(format!(
                "eps0 = {} must be below 1/2500 here",
                self.eps0
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("1000"), Ok(1000));
        assert_eq!(parse_count("1e5"), Ok(100_000));
        assert_eq!(parse_count("10^6"), Ok(1_000_000));
        assert_eq!(parse_count("1_000"), Ok(1000));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let mut o = Opts {
            n: Some(50),
            ..Opts::default()
        };
        let map = BTreeMap::from([
            ("N".to_string(), "10".to_string()),
            ("alphabet".to_string(), "1,2".to_string()),
            ("oracle".to_string(), "true".to_string()),
        ]);
        o.merge_file(&map).unwrap();
        assert_eq!(o.n, Some(50));
        assert_eq!(o.alphabet.as_deref(), Some("1,2"));
        assert!(o.oracle);
        let bad = BTreeMap::from([("colour".to_string(), "red".to_string())]);
        assert!(Opts::default().merge_file(&bad).is_err());
    }

    #[test]
    fn resolution_checks() {
        let o = Opts {
            n_list: Some(vec![10, 5]),
            ..Opts::default()
        };
        assert!(RunConfig::resolve("census", &o).is_err());
        let o = Opts {
            nu: Some(3.0),
            ..Opts::default()
        };
        assert!(RunConfig::resolve("thresholds", &o).is_err());
        let c = RunConfig::resolve("thresholds", &Opts::default()).unwrap();
        assert_eq!(c.q0_override, DEFAULT_Q0);
    }
}
