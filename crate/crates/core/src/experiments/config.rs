//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # chaos scan
//! experiment = scan
//! dist = uniform:0,1
//! sizes = 16,32,64
//! t_grid = 0:1:5
//! n_samples = 2000
//! seed = 7
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};
use crate::lattice::Vertex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Scan,
    Transition,
    Valleys,
    VarScaling,
    Oracle,
    Lemmas,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Scan => "scan",
            ExperimentKind::Transition => "transition",
            ExperimentKind::Valleys => "valleys",
            ExperimentKind::VarScaling => "var-scaling",
            ExperimentKind::Oracle => "oracle",
            ExperimentKind::Lemmas => "lemmas",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "scan" => ExperimentKind::Scan,
            "transition" => ExperimentKind::Transition,
            "valleys" => ExperimentKind::Valleys,
            "var-scaling" | "var_scaling" => ExperimentKind::VarScaling,
            "oracle" => ExperimentKind::Oracle,
            "lemmas" => ExperimentKind::Lemmas,
            other => return Err(Error::Config(format!("unknown experiment `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub d: usize,
    /// Explicit target; when unset, targets are `size * e_1` for each size.
    pub v: Option<Vertex>,
    pub dist: WeightDistribution,
    pub t_grid: Vec<f64>,
    pub sizes: Vec<i64>,
    pub n_samples: usize,
    pub k: usize,
    pub seed: u64,
    pub padding: Option<i64>,
    pub out: Option<PathBuf>,
    pub eps: Option<f64>,
    pub gamma: Option<f64>,
    pub workers: usize,
    pub plot: bool,
    pub coinfluence: bool,
    pub alphas: Vec<f64>,
    /// Stand-ins for the unknown constants of the valley schedule.
    pub proxy_c: f64,
    pub proxy_c_prime: f64,
}

impl ExperimentConfig {
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let (t_grid, sizes, n_samples) = match experiment {
            ExperimentKind::Scan => (linspace(0.0, 1.0, 5), vec![16, 32, 64], 500),
            ExperimentKind::Transition => (vec![0.0], vec![32, 64], 500),
            ExperimentKind::Valleys => (vec![0.3], vec![16, 32, 64, 128], 200),
            ExperimentKind::VarScaling => (vec![0.0], vec![16, 32, 64], 500),
            ExperimentKind::Oracle => (vec![0.0, 0.25, 0.5, 0.9], vec![], 100_000),
            ExperimentKind::Lemmas => (vec![0.1, 0.3, 0.5, 0.7, 0.9], vec![4], 1000),
        };
        ExperimentConfig {
            experiment,
            d: 2,
            v: None,
            dist: WeightDistribution::uniform(0.0, 1.0).expect("valid preset"),
            t_grid,
            sizes,
            n_samples,
            k: 4,
            seed: 1,
            padding: None,
            out: None,
            eps: None,
            gamma: None,
            workers: 0,
            plot: false,
            coinfluence: false,
            alphas: vec![0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
            proxy_c: 1.0,
            proxy_c_prime: 1.0,
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. The `experiment`
    /// key is required unless `default_kind` is given.
    pub fn parse(text: &str, default_kind: Option<ExperimentKind>) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut kind = default_kind;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if key == "experiment" {
                let parsed: ExperimentKind = value.parse()?;
                if let Some(k) = default_kind {
                    if k != parsed {
                        return Err(Error::Config(format!("config is for `{parsed}` but `{k}` was requested")));
                    }
                }
                kind = Some(parsed);
            } else {
                pairs.push((key, value));
            }
        }
        let kind = kind.ok_or_else(|| Error::Config("missing `experiment` key".into()))?;
        let mut cfg = Self::defaults(kind);
        for (key, value) in pairs {
            cfg.set(&key, &value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path, default_kind: Option<ExperimentKind>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, default_kind)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("cannot parse `{value}` as {what} for `{key}`"));
        match key {
            "d" => self.d = value.parse().map_err(|_| bad("an integer"))?,
            "v" => self.v = Some(Vertex(parse_list(value).map_err(|_| bad("a comma-separated vertex"))?)),
            "dist" => self.dist = value.parse()?,
            "t_grid" | "t-grid" => self.t_grid = parse_grid(value)?,
            "sizes" => self.sizes = parse_list(value).map_err(|_| bad("a comma-separated list"))?,
            "n_samples" | "samples" => self.n_samples = value.parse().map_err(|_| bad("an integer"))?,
            "k" => self.k = value.parse().map_err(|_| bad("an integer"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("an unsigned integer"))?,
            "padding" => self.padding = Some(value.parse().map_err(|_| bad("an integer"))?),
            "out" => self.out = Some(PathBuf::from(value)),
            "eps" => self.eps = Some(value.parse().map_err(|_| bad("a number"))?),
            "gamma" => self.gamma = Some(value.parse().map_err(|_| bad("a number"))?),
            "workers" => self.workers = value.parse().map_err(|_| bad("an integer"))?,
            "plot" => self.plot = parse_bool(value).ok_or_else(|| bad("a boolean"))?,
            "coinfluence" => self.coinfluence = parse_bool(value).ok_or_else(|| bad("a boolean"))?,
            "alphas" => self.alphas = parse_list(value).map_err(|_| bad("a comma-separated list"))?,
            "proxy_c" => self.proxy_c = value.parse().map_err(|_| bad("a number"))?,
            "proxy_c_prime" => self.proxy_c_prime = value.parse().map_err(|_| bad("a number"))?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Config(format!("d must be at least 2, got {}", self.d)));
        }
        if let Some(v) = &self.v {
            if v.dim() != self.d {
                return Err(Error::Config(format!("v = {v} does not have d = {} coordinates", self.d)));
            }
        }
        if let Some(&t) = self.t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::InvalidTime(t));
        }
        if self.sizes.iter().any(|&s| s <= 0) || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("sizes must be positive and increasing, got {:?}", self.sizes)));
        }
        if self.n_samples < 2 {
            return Err(Error::TooFewSamples(self.n_samples));
        }
        Ok(())
    }

    /// Targets to simulate: the explicit `v`, or `size * e_1` for each size.
    pub fn targets(&self) -> Vec<Vertex> {
        match &self.v {
            Some(v) => vec![v.clone()],
            None => self.sizes.iter().map(|&n| Vertex::on_axis(self.d, n)).collect(),
        }
    }

    /// `# key=value` lines heading every CSV output.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let v = match &self.v {
            Some(v) => v.to_string(),
            None => self.sizes.iter().map(|s| Vertex::on_axis(self.d, *s).to_string()).collect::<Vec<_>>().join(";"),
        };
        let padding = self.padding.map_or_else(|| "default".to_string(), |p| p.to_string());
        vec![
            ("experiment".into(), self.experiment.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("d".into(), self.d.to_string()),
            ("v".into(), v),
            ("padding".into(), padding),
            ("dist".into(), self.dist.to_string()),
            ("n_samples".into(), self.n_samples.to_string()),
        ]
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, T::Err> {
    s.split(',').map(|x| x.trim()).filter(|x| !x.is_empty()).map(str::parse).collect()
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `a:b:n` for `n` evenly spaced points, or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse time grid `{s}`"));
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(bad());
        };
        linspace(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?)
    } else {
        parse_list(s).map_err(|_| bad())?
    };
    if grid.is_empty() {
        return Err(Error::EmptyTimeGrid);
    }
    if let Some(&t) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidTime(t));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "# chaos\nexperiment = scan\ndist = exp:rate=2\nsizes = 8, 16\nt_grid = 0:1:3  # three points\nn_samples = 10\nseed = 5\nv = 3,4\n";
        let cfg = ExperimentConfig::parse(text, None).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Scan);
        assert_eq!(cfg.t_grid, vec![0.0, 0.5, 1.0]);
        assert_eq!(cfg.sizes, vec![8, 16]);
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.targets(), vec![Vertex(vec![3, 4])]);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::parse("experiment = nope", None).is_err());
        assert!(ExperimentConfig::parse("d = 2", None).is_err());
        assert!(ExperimentConfig::parse("experiment = scan\nsizes = 32,16", None).is_err());
        assert!(ExperimentConfig::parse("experiment = scan\nt_grid = 0,1.5", None).is_err());
        assert!(ExperimentConfig::parse("experiment = scan\nbogus = 1", None).is_err());
        assert!(ExperimentConfig::parse("experiment = scan", Some(ExperimentKind::Valleys)).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.1,0.2").unwrap(), vec![0.1, 0.2]);
        assert_eq!(parse_grid("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_grid("0:1").is_err());
    }
}
