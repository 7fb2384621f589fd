//! Experiment configuration as flat `key = value` text.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated. Optional keys take `none` to clear them.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use skyway_core::synth::RoadNetworkParams;
use skyway_core::{EnergyModelParams, DEFAULT_SATURATION_CAP_MIN};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("{key}: cannot parse {value:?}")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub node_counts: Vec<usize>,
    pub k_values: Vec<usize>,
    /// Replaces every station's pad count when set.
    pub pads_per_station: Option<u32>,
    pub runs_fraction: f64,
    pub master_seed: u64,
    pub energy: EnergyModelParams,
    pub baseline_rate_per_hour: f64,
    pub baseline_occupancy_min: f64,
    pub saturation_cap_min: f64,
    /// Share of stations given a morning and evening peak.
    pub hub_fraction: f64,
    pub hub_rate_per_hour: f64,
    /// Leg limit for the exhaustive baseline; `None` means unlimited.
    pub max_hops: Option<usize>,
    pub weight_kg: f64,
    /// Fixed departure minute; drawn per run when `None`.
    pub start_min: Option<f64>,
    /// Attempts at finding a feasible pair before a run is skipped.
    pub max_redraws: usize,
    pub nodes_file: Option<PathBuf>,
    pub edges_file: Option<PathBuf>,
    pub drones_file: Option<PathBuf>,
    pub profiles_file: Option<PathBuf>,
    /// Used when no network files are given.
    pub synth: RoadNetworkParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            node_counts: vec![10, 20, 30, 40],
            k_values: vec![3, 4, 5],
            pads_per_station: Some(3),
            runs_fraction: 0.5,
            master_seed: 20_220_101,
            energy: EnergyModelParams::default(),
            baseline_rate_per_hour: 4.0,
            baseline_occupancy_min: 30.0,
            saturation_cap_min: DEFAULT_SATURATION_CAP_MIN,
            hub_fraction: 0.3,
            hub_rate_per_hour: 5.5,
            max_hops: None,
            weight_kg: 1.0,
            start_min: None,
            max_redraws: 20,
            nodes_file: None,
            edges_file: None,
            drones_file: None,
            profiles_file: None,
            synth: RoadNetworkParams::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue { key: key.to_string(), value: value.to_string() })
}

fn parse_opt<T: FromStr>(key: &str, value: &str) -> Result<Option<T>, ConfigError> {
    if value.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>, ConfigError> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

struct Opt<'a, T>(&'a Option<T>);

impl<T: fmt::Display> fmt::Display for Opt<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => v.fmt(f),
            None => f.write_str("none"),
        }
    }
}

fn join(values: &[usize]) -> String {
    values.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    pub const KEYS: [&'static str; 26] = [
        "node_counts",
        "k_values",
        "pads_per_station",
        "runs_fraction",
        "master_seed",
        "speed_payload_factor",
        "range_payload_factor",
        "reserve_fraction",
        "baseline_rate_per_hour",
        "baseline_occupancy_min",
        "saturation_cap_min",
        "hub_fraction",
        "hub_rate_per_hour",
        "max_hops",
        "weight_kg",
        "start_min",
        "max_redraws",
        "nodes_file",
        "edges_file",
        "drones_file",
        "profiles_file",
        "synth_rows",
        "synth_cols",
        "synth_spacing_m",
        "synth_extra_edge_prob",
        "synth_jitter",
    ];

    /// Defaults overlaid with the assignments in `text`.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply(text)?;
        Ok(cfg)
    }

    pub fn apply(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Assigns one field by its key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "node_counts" => self.node_counts = parse_list(key, value)?,
            "k_values" => self.k_values = parse_list(key, value)?,
            "pads_per_station" => self.pads_per_station = parse_opt(key, value)?,
            "runs_fraction" => self.runs_fraction = parse(key, value)?,
            "master_seed" => self.master_seed = parse(key, value)?,
            "speed_payload_factor" => self.energy.speed_payload_factor = parse(key, value)?,
            "range_payload_factor" => self.energy.range_payload_factor = parse(key, value)?,
            "reserve_fraction" => self.energy.reserve_fraction = parse(key, value)?,
            "baseline_rate_per_hour" => self.baseline_rate_per_hour = parse(key, value)?,
            "baseline_occupancy_min" => self.baseline_occupancy_min = parse(key, value)?,
            "saturation_cap_min" => self.saturation_cap_min = parse(key, value)?,
            "hub_fraction" => self.hub_fraction = parse(key, value)?,
            "hub_rate_per_hour" => self.hub_rate_per_hour = parse(key, value)?,
            "max_hops" => self.max_hops = parse_opt(key, value)?,
            "weight_kg" => self.weight_kg = parse(key, value)?,
            "start_min" => self.start_min = parse_opt(key, value)?,
            "max_redraws" => self.max_redraws = parse(key, value)?,
            "nodes_file" => self.nodes_file = parse_opt(key, value)?,
            "edges_file" => self.edges_file = parse_opt(key, value)?,
            "drones_file" => self.drones_file = parse_opt(key, value)?,
            "profiles_file" => self.profiles_file = parse_opt(key, value)?,
            "synth_rows" => self.synth.rows = parse(key, value)?,
            "synth_cols" => self.synth.cols = parse(key, value)?,
            "synth_spacing_m" => self.synth.spacing_m = parse(key, value)?,
            "synth_extra_edge_prob" => self.synth.extra_edge_prob = parse(key, value)?,
            "synth_jitter" => self.synth.jitter = parse(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Checks ranges that do not depend on the network.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.node_counts.is_empty() || self.node_counts.contains(&0) {
            return bad("node_counts must be non-empty and positive".into());
        }
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return bad("k_values must be non-empty and positive".into());
        }
        if !(self.runs_fraction > 0.0 && self.runs_fraction <= 1.0) {
            return bad(format!("runs_fraction {} must lie in (0, 1]", self.runs_fraction));
        }
        if self.pads_per_station == Some(0) {
            return bad("pads_per_station must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.hub_fraction) {
            return bad(format!("hub_fraction {} must lie in [0, 1]", self.hub_fraction));
        }
        if !(self.weight_kg >= 0.0 && self.weight_kg.is_finite()) {
            return bad(format!("weight_kg {} is invalid", self.weight_kg));
        }
        if self.start_min.is_some_and(|m| !m.is_finite()) {
            return bad("start_min must be finite".into());
        }
        if self.nodes_file.is_some() != self.edges_file.is_some() {
            return bad("nodes_file and edges_file go together".into());
        }
        if self.synth.rows == 0 || self.synth.cols == 0 {
            return bad("synthetic grid needs at least one row and column".into());
        }
        if !(0.0..=1.0).contains(&self.synth.extra_edge_prob) {
            return bad("synth_extra_edge_prob must lie in [0, 1]".into());
        }
        self.energy.validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Every key with its current value, in a form `parse` accepts.
    pub fn to_text(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("node_counts", join(&self.node_counts));
        put("k_values", join(&self.k_values));
        put("pads_per_station", Opt(&self.pads_per_station).to_string());
        put("runs_fraction", self.runs_fraction.to_string());
        put("master_seed", self.master_seed.to_string());
        put("speed_payload_factor", self.energy.speed_payload_factor.to_string());
        put("range_payload_factor", self.energy.range_payload_factor.to_string());
        put("reserve_fraction", self.energy.reserve_fraction.to_string());
        put("baseline_rate_per_hour", self.baseline_rate_per_hour.to_string());
        put("baseline_occupancy_min", self.baseline_occupancy_min.to_string());
        put("saturation_cap_min", self.saturation_cap_min.to_string());
        put("hub_fraction", self.hub_fraction.to_string());
        put("hub_rate_per_hour", self.hub_rate_per_hour.to_string());
        put("max_hops", Opt(&self.max_hops).to_string());
        put("weight_kg", self.weight_kg.to_string());
        put("start_min", Opt(&self.start_min).to_string());
        put("max_redraws", self.max_redraws.to_string());
        put("nodes_file", Opt(&path(&self.nodes_file)).to_string());
        put("edges_file", Opt(&path(&self.edges_file)).to_string());
        put("drones_file", Opt(&path(&self.drones_file)).to_string());
        put("profiles_file", Opt(&path(&self.profiles_file)).to_string());
        put("synth_rows", self.synth.rows.to_string());
        put("synth_cols", self.synth.cols.to_string());
        put("synth_spacing_m", self.synth.spacing_m.to_string());
        put("synth_extra_edge_prob", self.synth.extra_edge_prob.to_string());
        put("synth_jitter", self.synth.jitter.to_string());
        out
    }
}
