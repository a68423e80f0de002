//! Run configuration: flat `key=value` files, command-line overrides and the
//! reproducibility headers written into every output file.
//!
//! A config file holds one or more whitespace-separated `key=value` pairs per
//! line; `#` starts a comment. Keys may use `-` or `_`. Output files written
//! by `coopgrow` start with a `# coopgrow ...` line followed by `# key=value`
//! lines holding the full resolved config; such a file (or an edge list) is
//! itself accepted as a config, which reproduces it exactly.
//!
//! | key            | default                                  |
//! |----------------|------------------------------------------|
//! | `mechanism`    | `ba` (`ba` or `random`)                  |
//! | `L`            | 4                                        |
//! | `beta`         | 1                                        |
//! | `n`            | 0.001                                    |
//! | `r`            | unset (`run`: 4; `fixation`: auto)        |
//! | `pc_growth`    | 0 (`run` only)                           |
//! | `r_min`        | 1.2                                      |
//! | `r_max`        | 6                                        |
//! | `r_steps`      | 25                                       |
//! | `r_grid`       | unset; explicit list overrides the range |
//! | `ni`           | 1000                                     |
//! | `nmax`         | 3000                                     |
//! | `realizations` | 30                                       |
//! | `M`            | 50                                       |
//! | `ni_list`      | 8,16,32,64,128,256,512,1000,2000,4000    |
//! | `n_target`     | 5000                                     |
//! | `nodes`        | 10000 (`netgen` size)                    |
//! | `window`       | 50                                       |
//! | `threshold`    | 0.5                                      |
//! | `seed`         | 1                                        |
//! | `workers`      | `$COOPGROW_WORKERS`, else all cores      |
//! | `out_dir`      | `out`                                    |

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::experiments::linear_grid;
use crate::network::GrowthMechanism;
use crate::output::fmt_sig;
use crate::simulation::SimParams;

pub const WORKERS_ENV: &str = "COOPGROW_WORKERS";
/// `r` used by `run` when none is configured.
pub const DEFAULT_RUN_R: f64 = 4.0;

/// Raw `key -> value` pairs with normalised keys.
pub type RawConfig = BTreeMap<String, String>;

const KEYS: &[&str] = &[
    "mechanism",
    "L",
    "beta",
    "n",
    "r",
    "pc_growth",
    "r_min",
    "r_max",
    "r_steps",
    "r_grid",
    "ni",
    "nmax",
    "realizations",
    "M",
    "ni_list",
    "n_target",
    "nodes",
    "window",
    "threshold",
    "seed",
    "workers",
    "out_dir",
];

fn normalize_key(key: &str) -> Result<String> {
    let k = key.trim().replace('-', "_");
    let canonical = match k.as_str() {
        "l" | "links" => "L",
        "m" => "M",
        other => other,
    };
    KEYS.iter()
        .find(|&&known| known == canonical)
        .map(|k| k.to_string())
        .ok_or_else(|| Error::Config {
            key: key.trim().to_string(),
            message: "unknown key".into(),
        })
}

fn parse_pairs(line: &str, into: &mut RawConfig, only: Option<&[&str]>) -> Result<()> {
    for token in line.split_whitespace() {
        let (key, value) = token.split_once('=').ok_or_else(|| Error::Config {
            key: token.to_string(),
            message: "expected key=value".into(),
        })?;
        if let Some(allowed) = only {
            if !allowed.contains(&key) {
                continue;
            }
        }
        into.insert(normalize_key(key)?, value.to_string());
    }
    Ok(())
}

/// Parses config text. Plain files use `#` comments; files starting with a
/// `coopgrow` output header or an edge-list header are read from their
/// header lines.
pub fn parse_config_text(text: &str) -> Result<RawConfig> {
    let mut raw = RawConfig::new();
    let first = text.lines().next().unwrap_or("");
    if first.starts_with("# coopgrow") {
        for line in text.lines().skip(1) {
            let Some(body) = line.strip_prefix("# ") else {
                break;
            };
            let body = body.trim();
            if body.starts_with("meta ") || body.starts_with("result ") {
                continue;
            }
            parse_pairs(body, &mut raw, None)?;
        }
    } else if let Some(body) = first.strip_prefix("# nodes=").map(|_| &first[2..]) {
        parse_pairs(body, &mut raw, Some(&["nodes", "mechanism", "L", "seed"]))?;
    } else {
        for line in text.lines() {
            let body = line.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                parse_pairs(body, &mut raw, None)?;
            }
        }
    }
    Ok(raw)
}

pub fn parse_config_file(path: &std::path::Path) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        key: "config".into(),
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config_text(&text)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mechanism: GrowthMechanism,
    pub links: usize,
    pub beta: f64,
    pub n: f64,
    pub r: Option<f64>,
    pub pc_growth: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub r_steps: usize,
    pub r_grid: Option<Vec<f64>>,
    pub ni: usize,
    pub nmax: usize,
    pub realizations: usize,
    pub m: usize,
    pub ni_list: Vec<usize>,
    pub n_target: usize,
    pub nodes: usize,
    pub window: usize,
    pub threshold: f64,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let workers = std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&w: &usize| w > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        RunConfig {
            mechanism: GrowthMechanism::PreferentialAttachment,
            links: 4,
            beta: 1.0,
            n: 0.001,
            r: None,
            pc_growth: 0.0,
            r_min: 1.2,
            r_max: 6.0,
            r_steps: 25,
            r_grid: None,
            ni: 1000,
            nmax: 3000,
            realizations: 30,
            m: 50,
            ni_list: vec![8, 16, 32, 64, 128, 256, 512, 1000, 2000, 4000],
            n_target: 5000,
            nodes: 10_000,
            window: 50,
            threshold: 0.5,
            seed: 1,
            workers,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.trim().parse::<T>().map_err(|e| Error::Config {
        key: key.to_string(),
        message: format!("invalid value `{raw}`: {e}"),
    })
}

fn list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<T> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| value(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config {
            key: key.to_string(),
            message: "list must not be empty".into(),
        });
    }
    Ok(items)
}

fn cfg_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Resolves defaults, then `file`, then `flags` (later wins), and
    /// validates the result.
    pub fn resolve(file: &RawConfig, flags: &RawConfig) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (key, raw) in file.iter().chain(flags.iter()) {
            cfg.set(key, raw)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let key = normalize_key(key)?;
        let k = key.as_str();
        match k {
            "mechanism" => {
                self.mechanism = raw.parse().map_err(|e: Error| cfg_err(k, e.to_string()))?
            }
            "L" => self.links = value(k, raw)?,
            "beta" => self.beta = value(k, raw)?,
            "n" => self.n = value(k, raw)?,
            "r" => self.r = Some(value(k, raw)?),
            "pc_growth" => self.pc_growth = value(k, raw)?,
            "r_min" => self.r_min = value(k, raw)?,
            "r_max" => self.r_max = value(k, raw)?,
            "r_steps" => self.r_steps = value(k, raw)?,
            "r_grid" => self.r_grid = Some(list(k, raw)?),
            "ni" => self.ni = value(k, raw)?,
            "nmax" => self.nmax = value(k, raw)?,
            "realizations" => self.realizations = value(k, raw)?,
            "M" => self.m = value(k, raw)?,
            "ni_list" => self.ni_list = list(k, raw)?,
            "n_target" => self.n_target = value(k, raw)?,
            "nodes" => self.nodes = value(k, raw)?,
            "window" => self.window = value(k, raw)?,
            "threshold" => self.threshold = value(k, raw)?,
            "seed" => self.seed = value(k, raw)?,
            "workers" => self.workers = value(k, raw)?,
            "out_dir" => self.out_dir = PathBuf::from(raw.trim()),
            _ => unreachable!("normalize_key only returns known keys"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.links == 0 {
            return Err(cfg_err("L", "must be >= 1"));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(cfg_err("beta", "must be finite and >= 0"));
        }
        if !(self.n.is_finite() && self.n > 0.0) {
            return Err(cfg_err("n", "must be > 0"));
        }
        if let Some(r) = self.r {
            if !(r.is_finite() && r > 1.0) {
                return Err(cfg_err("r", "must be > 1"));
            }
        }
        if !(0.0..=1.0).contains(&self.pc_growth) {
            return Err(cfg_err("pc_growth", "must lie in [0, 1]"));
        }
        let grid = self.r_grid().map_err(|e| {
            let key = if self.r_grid.is_some() {
                "r_grid"
            } else {
                "r_steps"
            };
            cfg_err(key, e.to_string())
        })?;
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(cfg_err("r_grid", "must be strictly increasing"));
        }
        if grid.iter().any(|&r| r.is_nan() || r <= 1.0) {
            return Err(cfg_err("r_grid", "every r must be > 1"));
        }
        if self.ni < self.links {
            return Err(cfg_err("ni", "must be >= L"));
        }
        if self.nmax < self.ni {
            return Err(cfg_err("nmax", "must be >= ni"));
        }
        if self.realizations == 0 {
            return Err(cfg_err("realizations", "must be >= 1"));
        }
        if self.m == 0 {
            return Err(cfg_err("M", "must be >= 1"));
        }
        if self.ni_list.is_empty() {
            return Err(cfg_err("ni_list", "must not be empty"));
        }
        if self.ni_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(cfg_err("ni_list", "must be strictly increasing"));
        }
        if self.ni_list[0] < self.links {
            return Err(cfg_err("ni_list", "every Ni must be >= L"));
        }
        if *self.ni_list.last().unwrap() > self.n_target {
            return Err(cfg_err("n_target", "must be >= every Ni in ni_list"));
        }
        if self.nodes < self.links {
            return Err(cfg_err("nodes", "must be >= L"));
        }
        if self.window == 0 {
            return Err(cfg_err("window", "must be >= 1"));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(cfg_err("threshold", "must lie in (0, 1)"));
        }
        if self.workers == 0 {
            return Err(cfg_err("workers", "must be >= 1"));
        }
        Ok(())
    }

    /// Explicit `r_grid`, or `r_steps` points from `r_min` to `r_max`.
    pub fn r_grid(&self) -> Result<Vec<f64>> {
        match &self.r_grid {
            Some(g) if g.is_empty() => Err(Error::InvalidParameter("r grid is empty".into())),
            Some(g) => Ok(g.clone()),
            None => linear_grid(self.r_min, self.r_max, self.r_steps),
        }
    }

    pub fn sim_params(&self, r: f64) -> SimParams {
        SimParams {
            r,
            beta: self.beta,
            n: self.n,
            links: self.links,
            mechanism: self.mechanism,
            pc_growth: self.pc_growth,
            seed: self.seed,
        }
    }

    /// Header lines for an output of `command`: identification, every
    /// content-affecting key, and model metadata. `workers` and `out_dir`
    /// are left out because they never change file contents.
    pub fn header_lines(&self, command: &str) -> Vec<String> {
        let mut h = vec![format!(
            "coopgrow command={command} version={}",
            env!("CARGO_PKG_VERSION")
        )];
        let mut kv = |k: &str, v: String| h.push(format!("{k}={v}"));
        kv("mechanism", self.mechanism.name().to_string());
        kv("L", self.links.to_string());
        kv("beta", self.beta.to_string());
        kv("n", self.n.to_string());
        if let Some(r) = self.r {
            kv("r", r.to_string());
        }
        kv("pc_growth", self.pc_growth.to_string());
        match &self.r_grid {
            Some(g) => kv("r_grid", join(g)),
            None => {
                kv("r_min", self.r_min.to_string());
                kv("r_max", self.r_max.to_string());
                kv("r_steps", self.r_steps.to_string());
            }
        }
        kv("ni", self.ni.to_string());
        kv("nmax", self.nmax.to_string());
        kv("realizations", self.realizations.to_string());
        kv("M", self.m.to_string());
        kv("ni_list", join(&self.ni_list));
        kv("n_target", self.n_target.to_string());
        kv("nodes", self.nodes.to_string());
        kv("window", self.window.to_string());
        kv("threshold", self.threshold.to_string());
        kv("seed", self.seed.to_string());
        h.push(format!(
            "meta seed_network=clique N0={} growth_rounding=floor-with-carry a_dt={} payoff_units=c=1,b=r",
            self.links,
            fmt_sig(self.n.ln_1p())
        ));
        h
    }
}
