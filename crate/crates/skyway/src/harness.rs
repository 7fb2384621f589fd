//! Seeded experiment runner comparing the exhaustive baseline with top-k
//! composition over subnetworks of growing size.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use skyway_core::synth;
use skyway_core::{
    base_comps, block_nested_loop, exhaustive_composition, top_k_composition, CompositionError, CompositionPlan,
    DeliveryQuery, DroneSpec, NetworkError, NodeId, QualityDirectionConfig, SkywayNetwork, StationLoadProfile,
    StationProfiles, MINUTES_PER_DAY,
};

use crate::config::{ConfigError, ExperimentConfig};
use crate::io::{self, IoError};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Composition(#[from] CompositionError),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// Composition method; exhaustive sorts first, then top-k by k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Exhaustive,
    TopK(usize),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Exhaustive => f.write_str("exhaustive"),
            Method::TopK(k) => write!(f, "top-{k}"),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("unknown method `{0}`")]
pub struct UnknownMethod(String);

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "exhaustive" {
            return Ok(Method::Exhaustive);
        }
        s.strip_prefix("top-")
            .and_then(|k| k.parse().ok())
            .filter(|&k| k > 0)
            .map(Method::TopK)
            .ok_or_else(|| UnknownMethod(s.to_string()))
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One method on one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub method: Method,
    pub node_count: usize,
    pub run: usize,
    /// Wall-clock milliseconds around the composition call.
    pub execution_time: f64,
    /// Stochastic delivery time of the recommended plan, minutes.
    pub delivery_time: f64,
    pub distance: f64,
    /// Seed the run's query was drawn from.
    pub seed: u64,
    pub source: u64,
    pub destination: u64,
    pub start_min: f64,
    /// Worker threads active while timing.
    pub parallelism: usize,
}

/// Everything an experiment consumes besides its configuration.
#[derive(Clone, Debug)]
pub struct ExperimentInputs {
    pub network: SkywayNetwork,
    pub fleet: Vec<DroneSpec>,
    pub profiles: StationProfiles,
}

impl ExperimentInputs {
    /// Files named in the configuration where given, synthetic stand-ins
    /// otherwise.
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self, HarnessError> {
        let network = match (&cfg.nodes_file, &cfg.edges_file) {
            (Some(n), Some(e)) => io::load_network(n, e)?,
            _ => synth::road_network(&cfg.synth, cfg.master_seed),
        };
        let fleet = match &cfg.drones_file {
            Some(path) => io::load_fleet(path)?,
            None => vec![DroneSpec::dji_m200_v2()],
        };
        let profiles = match &cfg.profiles_file {
            Some(path) => io::load_profiles(path, baseline_profile(cfg)?, cfg.saturation_cap_min)?,
            None => default_profiles(cfg, &network)?,
        };
        Ok(Self { network, fleet, profiles })
    }
}

pub fn baseline_profile(cfg: &ExperimentConfig) -> Result<StationLoadProfile, HarnessError> {
    StationLoadProfile::constant(NodeId(0), cfg.baseline_rate_per_hour, cfg.baseline_occupancy_min, cfg.master_seed)
        .map_err(|e| ConfigError::Invalid(e.to_string()).into())
}

/// Baseline load everywhere plus seeded hub stations.
pub fn default_profiles(cfg: &ExperimentConfig, network: &SkywayNetwork) -> Result<StationProfiles, HarnessError> {
    let baseline = baseline_profile(cfg)?;
    StationProfiles::new(baseline.clone(), cfg.saturation_cap_min).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(synth::hub_profiles(
        network,
        &baseline,
        cfg.hub_fraction,
        cfg.hub_rate_per_hour,
        cfg.saturation_cap_min,
        mix(cfg.master_seed, 0x6875_6273, 0),
    ))
}

/// Stateless seed derivation (splitmix64 finaliser over the inputs).
pub fn mix(master: u64, a: u64, b: u64) -> u64 {
    let mut z = master ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn runs_for(node_count: usize, fraction: f64) -> usize {
    (node_count as f64 * fraction).ceil() as usize
}

/// Draws a source, destination and start minute, retrying until the pair is
/// distinct and servable by `drone`.
fn draw_query(
    net: &SkywayNetwork,
    cfg: &ExperimentConfig,
    drone: &DroneSpec,
    rng: &mut ChaCha8Rng,
) -> Result<Option<DeliveryQuery>, HarnessError> {
    let ids: Vec<NodeId> = net.nodes().iter().map(|n| n.id).collect();
    for _ in 0..cfg.max_redraws.max(1) {
        let source = ids[rng.gen_range(0..ids.len())];
        let destination = ids[rng.gen_range(0..ids.len())];
        let start = cfg.start_min.unwrap_or_else(|| rng.gen_range(0.0..MINUTES_PER_DAY));
        if source == destination {
            continue;
        }
        let query = DeliveryQuery::new(source, destination, start, cfg.weight_kg);
        match base_comps(net, &query, 1, drone, &cfg.energy) {
            Ok(_) => return Ok(Some(query)),
            Err(CompositionError::Unreachable(..)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(None)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

/// Runs every method on the same seeded queries. Records come out ordered by
/// (node_count, run, method) and are identical across calls apart from
/// `execution_time`.
pub fn run_experiment(cfg: &ExperimentConfig, inputs: &ExperimentInputs) -> Result<Vec<MetricsRecord>, HarnessError> {
    cfg.validate()?;
    let network = match cfg.pads_per_station {
        Some(pads) => inputs.network.with_pads(pads)?,
        None => inputs.network.clone(),
    };
    let largest = network.components().iter().map(Vec::len).max().unwrap_or(0);
    if let Some(&n) = cfg.node_counts.iter().find(|&&n| n > largest) {
        return Err(ConfigError::Invalid(format!("node count {n} exceeds the largest component ({largest} nodes)")).into());
    }
    let qcfg = QualityDirectionConfig::default();
    let drone = block_nested_loop(&inputs.fleet, cfg.weight_kg, &qcfg).map_err(CompositionError::from)?;

    let mut methods = vec![Method::Exhaustive];
    methods.extend(cfg.k_values.iter().map(|&k| Method::TopK(k)));
    methods.sort();
    methods.dedup();

    let mut records = Vec::new();
    for &n in &cfg.node_counts {
        let sub = network.extract_subnetwork(n, mix(cfg.master_seed, n as u64, 0))?;
        for run in 0..runs_for(n, cfg.runs_fraction) {
            let seed = mix(cfg.master_seed, n as u64, run as u64 + 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let Some(query) = draw_query(&sub, cfg, drone, &mut rng)? else {
                log::warn!("node_count {n} run {run}: no feasible pair after {} draws, skipped", cfg.max_redraws);
                continue;
            };
            for &method in &methods {
                let (plan, ms) = match method {
                    Method::Exhaustive => timed(|| {
                        exhaustive_composition(&sub, &inputs.fleet, &query, &inputs.profiles, &qcfg, &cfg.energy, cfg.max_hops)
                    }),
                    Method::TopK(k) => timed(|| {
                        top_k_composition(&sub, &inputs.fleet, &query, k, &inputs.profiles, &qcfg, &cfg.energy)
                            .map(|plans| plans.into_iter().next().expect("non-empty on success"))
                    }),
                };
                let plan: CompositionPlan = plan?;
                records.push(MetricsRecord {
                    method,
                    node_count: n,
                    run,
                    execution_time: ms,
                    delivery_time: plan.delivery_time(),
                    distance: plan.distance_km,
                    seed,
                    source: query.source.0,
                    destination: query.destination.0,
                    start_min: query.start_time,
                    parallelism: 1,
                });
            }
        }
    }
    records.sort_by_key(|r| (r.node_count, r.run, r.method));
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_labels() {
        for m in [Method::Exhaustive, Method::TopK(3), Method::TopK(12)] {
            assert_eq!(m.to_string().parse::<Method>(), Ok(m));
        }
        assert!("top-0".parse::<Method>().is_err());
        assert!("best".parse::<Method>().is_err());
        let mut ms = vec![Method::TopK(10), Method::TopK(3), Method::Exhaustive];
        ms.sort();
        assert_eq!(ms, [Method::Exhaustive, Method::TopK(3), Method::TopK(10)]);
    }

    #[test]
    fn run_counts_round_up() {
        assert_eq!(runs_for(10, 0.5), 5);
        assert_eq!(runs_for(15, 0.5), 8);
        assert_eq!(runs_for(1, 0.01), 1);
    }

    #[test]
    fn seeds_differ_by_input() {
        assert_ne!(mix(1, 10, 0), mix(1, 10, 1));
        assert_ne!(mix(1, 10, 1), mix(1, 11, 1));
        assert_ne!(mix(1, 10, 1), mix(2, 10, 1));
    }
}
