//! Simulation configuration: one `key = value` per line, `#` starts a comment.
//!
//! ```text
//! # code
//! profile = code.profile        # or: lift = 83 and target_girth = 12
//! nu = 0.75                     # or: placement = code.placement
//! placement_seed = 1
//! # channel and grid
//! channel = awgn                # awgn | bec
//! snr_convention = ebn0         # ebn0 | esn0
//! grid = 1.0, 1.5, 2.0          # SNR in dB, or erasure probabilities
//! # run
//! i_max = 10
//! outer_n = 83                  # optional outer model, all three or none
//! outer_k = 40
//! outer_t = 20
//! min_block_errors = 100
//! max_trials = 10000000
//! seed = 1
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::SnrConvention;
use crate::component::ComponentCode;
use crate::concat::OuterCodeModel;
use crate::decoder::DEFAULT_I_MAX;
use crate::error::{Error, Result};
use crate::graph::{place_gc_nodes, GcPlacement, GldpcCode, TannerGraph};
use crate::qc::{search_shifts, QcProfile, SearchStrategy};

pub const DEFAULT_MIN_BLOCK_ERRORS: u64 = 100;
pub const DEFAULT_MAX_TRIALS: u64 = 10_000_000;

const KNOWN_KEYS: &[&str] = &[
    "profile",
    "lift",
    "target_girth",
    "base_rows",
    "base_cols",
    "placement",
    "nu",
    "placement_seed",
    "component",
    "channel",
    "snr_convention",
    "grid",
    "i_max",
    "outer_n",
    "outer_k",
    "outer_t",
    "min_block_errors",
    "max_trials",
    "seed",
];

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSource {
    File(PathBuf),
    Search {
        lift: usize,
        target_girth: usize,
        base_rows: usize,
        base_cols: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlacementSource {
    File(PathBuf),
    Random { nu: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Awgn,
    Bec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub profile: ProfileSource,
    pub placement: PlacementSource,
    /// Generator file; the (6,3) shortened Hamming code when absent.
    pub component: Option<PathBuf>,
    pub channel: ChannelKind,
    pub snr_convention: SnrConvention,
    pub grid: Vec<f64>,
    pub i_max: usize,
    pub outer: Option<OuterCodeModel>,
    pub min_block_errors: u64,
    pub max_trials: u64,
    pub seed: u64,
    /// Parsed key-value pairs, as written.
    pub entries: BTreeMap<String, String>,
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(i + 1, "expected `key = value`"))?;
        let key = k.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::parse(i + 1, format!("unknown key {key:?}")));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::parse(i + 1, format!("duplicate key {key:?}")));
        }
    }
    Ok(map)
}

fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    map.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| Error::Config(format!("invalid value {v:?} for {key}")))
        })
        .transpose()
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl SimConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let map = parse_pairs(text)?;
        let profile = match (map.get("profile"), get::<usize>(&map, "lift")?) {
            (Some(p), None) => ProfileSource::File(resolve(base_dir, p)),
            (None, Some(lift)) => ProfileSource::Search {
                lift,
                target_girth: get(&map, "target_girth")?.unwrap_or(12),
                base_rows: get(&map, "base_rows")?.unwrap_or(2),
                base_cols: get(&map, "base_cols")?.unwrap_or(6),
            },
            _ => return Err(Error::Config("give exactly one of `profile` or `lift`".into())),
        };
        let placement = match (map.get("placement"), get::<f64>(&map, "nu")?) {
            (Some(p), None) => PlacementSource::File(resolve(base_dir, p)),
            (None, Some(nu)) => PlacementSource::Random {
                nu,
                seed: get(&map, "placement_seed")?.unwrap_or(0),
            },
            _ => return Err(Error::Config("give exactly one of `placement` or `nu`".into())),
        };
        let channel = match map.get("channel").map(|s| s.to_ascii_lowercase()).as_deref() {
            Some("awgn") | None => ChannelKind::Awgn,
            Some("bec") => ChannelKind::Bec,
            Some(other) => return Err(Error::Config(format!("unknown channel {other:?}"))),
        };
        let grid = map
            .get("grid")
            .ok_or_else(|| Error::Config("missing `grid`".into()))?
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad grid value {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let outer = match (
            get::<usize>(&map, "outer_n")?,
            get::<usize>(&map, "outer_k")?,
            get::<usize>(&map, "outer_t")?,
        ) {
            (Some(n), Some(k), Some(t)) => Some(OuterCodeModel::new(n, k, t)?),
            (None, None, None) => None,
            _ => return Err(Error::Config("outer_n, outer_k and outer_t go together".into())),
        };
        let cfg = SimConfig {
            profile,
            placement,
            component: map.get("component").map(|p| resolve(base_dir, p)),
            channel,
            snr_convention: get(&map, "snr_convention")?.unwrap_or(SnrConvention::EbN0),
            grid,
            i_max: get(&map, "i_max")?.unwrap_or(DEFAULT_I_MAX),
            outer,
            min_block_errors: get(&map, "min_block_errors")?.unwrap_or(DEFAULT_MIN_BLOCK_ERRORS),
            max_trials: get(&map, "max_trials")?.unwrap_or(DEFAULT_MAX_TRIALS),
            seed: get(&map, "seed")?.unwrap_or(0),
            entries: map,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("grid must be a nonempty list of numbers".into()));
        }
        if self.min_block_errors < 1 || self.max_trials < 1 {
            return Err(Error::Config("min_block_errors and max_trials must be at least 1".into()));
        }
        if self.channel == ChannelKind::Bec && self.grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::Config("erasure probabilities must lie in [0, 1]".into()));
        }
        if let PlacementSource::Random { nu, .. } = self.placement {
            if !(0.0..=1.0).contains(&nu) {
                return Err(Error::Config(format!("nu = {nu} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn load_profile(&self) -> Result<QcProfile> {
        match &self.profile {
            ProfileSource::File(p) => QcProfile::load(p),
            ProfileSource::Search {
                lift,
                target_girth,
                base_rows,
                base_cols,
            } => Ok(search_shifts(*lift, *base_rows, *base_cols, *target_girth, SearchStrategy::PowerSweep)?.profile),
        }
    }

    pub fn load_component(&self) -> Result<ComponentCode> {
        match &self.component {
            Some(p) => ComponentCode::load(p),
            None => Ok(ComponentCode::hamming_6_3()),
        }
    }

    /// Builds the code described by the config.
    pub fn build_code(&self) -> Result<GldpcCode> {
        let profile = self.load_profile()?;
        let graph = TannerGraph::from_parity(&profile.expand());
        let placement = match &self.placement {
            PlacementSource::File(p) => GcPlacement::load(p, graph.n_checks())?,
            PlacementSource::Random { nu, seed } => place_gc_nodes(&graph, *nu, *seed)?,
        };
        GldpcCode::new(graph, placement, self.load_component()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "
        # comment line
        lift = 83
        nu = 0.75   # trailing comment
        placement_seed = 4
        channel = awgn
        grid = 1.0, 1.5,2
        outer_n = 83
        outer_k = 40
        outer_t = 20
        seed = 9
    ";

    #[test]
    fn parses_with_defaults() {
        let c = SimConfig::parse(EXAMPLE, Path::new("/cfg")).unwrap();
        assert_eq!(
            c.profile,
            ProfileSource::Search {
                lift: 83,
                target_girth: 12,
                base_rows: 2,
                base_cols: 6
            }
        );
        assert_eq!(c.placement, PlacementSource::Random { nu: 0.75, seed: 4 });
        assert_eq!(c.grid, vec![1.0, 1.5, 2.0]);
        assert_eq!(c.i_max, 10);
        assert_eq!(c.min_block_errors, 100);
        assert_eq!(c.max_trials, 10_000_000);
        assert_eq!(c.outer, Some(OuterCodeModel { n_out: 83, k_out: 40, t: 20 }));
        assert_eq!(c.snr_convention, SnrConvention::EbN0);
        assert_eq!(c.entries["nu"], "0.75");
    }

    #[test]
    fn relative_paths_follow_config_dir() {
        let c = SimConfig::parse("profile = a.txt\nplacement = /abs/p.txt\ngrid = 1", Path::new("/cfg")).unwrap();
        assert_eq!(c.profile, ProfileSource::File("/cfg/a.txt".into()));
        assert_eq!(c.placement, PlacementSource::File("/abs/p.txt".into()));
    }

    #[test]
    fn rejects_bad_input() {
        let base = Path::new(".");
        for text in [
            "lift = 83\nnu = 0.5",
            "lift = 83\nnu = 0.5\ngrid =",
            "lift = 83\nprofile = x\nnu = 0.5\ngrid = 1",
            "lift = 83\nnu = 0.5\ngrid = 1\nbogus = 2",
            "lift = 83\nnu = 0.5\ngrid = 1\ngrid = 2",
            "lift = 83\nnu = 0.5\ngrid = 1\nouter_n = 83",
            "lift = 83\nnu = 0.5\ngrid = 1\nmin_block_errors = 0",
            "lift = 83\nnu = 0.5\ngrid = 1.5\nchannel = bec",
            "lift = 83\nnu = 0.5\ngrid = 1\nchannel = rayleigh",
            "lift = 83 nu = 0.5",
        ] {
            assert!(SimConfig::parse(text, base).is_err(), "{text:?}");
        }
    }
}
