//! Station congestion: probability that every pad is taken on arrival, the
//! expected wait when that happens, and the recharge time to be spent.
//!
//! Each station is an M/M/c queue with `c` pads. Arrivals are Poisson with a
//! time-of-day rate; pad holding times of other drones are exponential. The
//! analytic estimate evaluates the rate at the arrival instant and applies
//! Erlang-C. [`simulate_station`] runs the same queue as a seeded
//! discrete-event simulation and serves as its oracle.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::math;
use crate::network::NodeId;

pub const MINUTES_PER_DAY: f64 = 1440.0;

/// Wait reported for a station whose offered load reaches its pad count.
pub const DEFAULT_SATURATION_CAP_MIN: f64 = 240.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateBreakpoint {
    /// Minute of day at which this rate takes effect.
    pub start_min: f64,
    pub rate_per_hour: f64,
}

/// Piecewise-constant arrival rate of other drones at one station.
#[derive(Clone, Debug, PartialEq)]
pub struct StationLoadProfile {
    pub node: NodeId,
    schedule: Vec<RateBreakpoint>,
    /// Mean pad-holding time of other drones, minutes.
    pub mean_occupancy: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CongestionError {
    #[error("rate schedule is empty")]
    EmptySchedule,
    #[error("rate schedule must start at minute 0, got {0}")]
    ScheduleStart(f64),
    #[error("breakpoint {0} is not strictly after its predecessor or lies outside [0, 1440)")]
    BadBreakpoint(f64),
    #[error("arrival rate {0} per hour is invalid")]
    BadRate(f64),
    #[error("mean occupancy {0} min must be finite and positive")]
    BadOccupancy(f64),
    #[error("a station needs at least one pad")]
    NoPads,
    #[error("recharge time {0} min is negative")]
    NegativeRecharge(f64),
    #[error("saturation cap {0} min must be finite and non-negative")]
    BadCap(f64),
}

impl StationLoadProfile {
    pub fn new(node: NodeId, schedule: Vec<RateBreakpoint>, mean_occupancy: f64, seed: u64) -> Result<Self, CongestionError> {
        let first = schedule.first().ok_or(CongestionError::EmptySchedule)?;
        if first.start_min != 0.0 {
            return Err(CongestionError::ScheduleStart(first.start_min));
        }
        let mut prev = f64::NEG_INFINITY;
        for bp in &schedule {
            if !(bp.start_min > prev && bp.start_min < MINUTES_PER_DAY) {
                return Err(CongestionError::BadBreakpoint(bp.start_min));
            }
            if !(bp.rate_per_hour.is_finite() && bp.rate_per_hour >= 0.0) {
                return Err(CongestionError::BadRate(bp.rate_per_hour));
            }
            prev = bp.start_min;
        }
        if !(mean_occupancy.is_finite() && mean_occupancy > 0.0) {
            return Err(CongestionError::BadOccupancy(mean_occupancy));
        }
        Ok(Self { node, schedule, mean_occupancy, seed })
    }

    /// Same rate all day.
    pub fn constant(node: NodeId, rate_per_hour: f64, mean_occupancy: f64, seed: u64) -> Result<Self, CongestionError> {
        Self::new(node, vec![RateBreakpoint { start_min: 0.0, rate_per_hour }], mean_occupancy, seed)
    }

    pub fn schedule(&self) -> &[RateBreakpoint] {
        &self.schedule
    }

    /// Arrival rate (per hour) in force at `minute`, reduced modulo a day.
    pub fn rate_at(&self, minute: f64) -> f64 {
        let t = math::wrap(minute, MINUTES_PER_DAY);
        let pos = self.schedule.partition_point(|bp| bp.start_min <= t);
        self.schedule[pos.saturating_sub(1)].rate_per_hour
    }

    pub fn peak_rate(&self) -> f64 {
        self.schedule.iter().map(|bp| bp.rate_per_hour).fold(0.0, f64::max)
    }

    /// The same schedule attached to another node.
    pub fn for_node(&self, node: NodeId) -> Self {
        Self { node, ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CongestionEstimate {
    /// Probability that all pads are busy on arrival.
    pub pr: f64,
    /// Expected queueing delay given that the drone has to wait, minutes.
    pub wait: f64,
    /// Recharge time the drone itself needs, minutes.
    pub recharge: f64,
}

impl CongestionEstimate {
    /// Contribution of this station to the stochastic delivery time.
    pub fn expected_delay(&self) -> f64 {
        self.pr * (self.recharge + self.wait)
    }
}

/// Erlang-C waiting probability for `servers` servers at offered load
/// `offered` (erlangs). Requires `offered < servers`.
pub fn erlang_c(servers: u32, offered: f64) -> f64 {
    debug_assert!(servers >= 1 && offered >= 0.0 && offered < servers as f64);
    // Erlang-B by the stable recursion, then convert
    let mut b = 1.0;
    for k in 1..=servers {
        b = offered * b / (k as f64 + offered * b);
    }
    let rho = offered / servers as f64;
    b / (1.0 - rho * (1.0 - b))
}

/// Analytic congestion estimate for one station at one arrival time.
pub fn probability_wait_recharge(
    profile: &StationLoadProfile,
    pads: u32,
    arrival_time: f64,
    recharge_needed: f64,
    saturation_cap: f64,
) -> Result<CongestionEstimate, CongestionError> {
    if pads == 0 {
        return Err(CongestionError::NoPads);
    }
    if recharge_needed.is_nan() || recharge_needed < 0.0 {
        return Err(CongestionError::NegativeRecharge(recharge_needed));
    }
    let rate_per_min = profile.rate_at(arrival_time) / 60.0;
    let offered = rate_per_min * profile.mean_occupancy;
    let (pr, wait) = if offered == 0.0 {
        (0.0, 0.0)
    } else if offered >= pads as f64 {
        (1.0, saturation_cap)
    } else {
        let pr = erlang_c(pads, offered);
        if pr == 0.0 {
            (0.0, 0.0)
        } else {
            (pr, profile.mean_occupancy / (pads as f64 - offered))
        }
    };
    Ok(CongestionEstimate { pr, wait, recharge: recharge_needed })
}

/// Per-station profiles with a fallback for stations not listed.
#[derive(Clone, Debug, PartialEq)]
pub struct StationProfiles {
    baseline: StationLoadProfile,
    overrides: BTreeMap<NodeId, StationLoadProfile>,
    saturation_cap: f64,
}

impl StationProfiles {
    pub fn new(baseline: StationLoadProfile, saturation_cap: f64) -> Result<Self, CongestionError> {
        if !(saturation_cap.is_finite() && saturation_cap >= 0.0) {
            return Err(CongestionError::BadCap(saturation_cap));
        }
        Ok(Self { baseline, overrides: BTreeMap::new(), saturation_cap })
    }

    /// No traffic anywhere: every estimate is zero.
    pub fn idle() -> Self {
        let baseline = StationLoadProfile::constant(NodeId(0), 0.0, 1.0, 0).expect("valid idle profile");
        Self { baseline, overrides: BTreeMap::new(), saturation_cap: DEFAULT_SATURATION_CAP_MIN }
    }

    /// Replaces any profile previously registered for the same node.
    pub fn insert(&mut self, profile: StationLoadProfile) {
        self.overrides.insert(profile.node, profile);
    }

    pub fn with(mut self, profile: StationLoadProfile) -> Self {
        self.insert(profile);
        self
    }

    pub fn baseline(&self) -> &StationLoadProfile {
        &self.baseline
    }

    pub fn overrides(&self) -> impl Iterator<Item = &StationLoadProfile> {
        self.overrides.values()
    }

    pub fn saturation_cap(&self) -> f64 {
        self.saturation_cap
    }

    pub fn profile_for(&self, node: NodeId) -> &StationLoadProfile {
        self.overrides.get(&node).unwrap_or(&self.baseline)
    }

    pub fn estimate(&self, node: NodeId, pads: u32, arrival_time: f64, recharge_needed: f64) -> Result<CongestionEstimate, CongestionError> {
        probability_wait_recharge(self.profile_for(node), pads, arrival_time, recharge_needed, self.saturation_cap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulatedLoad {
    /// Fraction of measured arrivals that found every pad busy.
    pub pr: f64,
    /// Mean wait of the arrivals that had to wait, minutes.
    pub wait: f64,
    pub waited: u64,
    pub measured: u64,
}

fn exponential(rng: &mut ChaCha8Rng, mean: f64) -> f64 {
    let u: f64 = rng.gen();
    -mean * math::ln(1.0 - u)
}

/// Seeded first-come-first-served simulation of the station queue.
///
/// Arrivals before `warmup` minutes drive the queue but are not measured;
/// the next `samples` arrivals are. Time-varying rates are realised by
/// thinning a Poisson stream at the peak rate. The random stream comes from
/// the profile seed, so equal inputs give equal outputs.
pub fn simulate_station(profile: &StationLoadProfile, pads: u32, warmup: f64, samples: u64) -> Result<SimulatedLoad, CongestionError> {
    if pads == 0 {
        return Err(CongestionError::NoPads);
    }
    let peak = profile.peak_rate() / 60.0;
    if peak == 0.0 || samples == 0 {
        return Ok(SimulatedLoad { pr: 0.0, wait: 0.0, waited: 0, measured: 0 });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    // time at which each pad next becomes free
    let mut free_at = vec![0.0_f64; pads as usize];
    let mut clock = 0.0;
    let mut measured = 0u64;
    let mut waited = 0u64;
    let mut total_wait = 0.0;

    while measured < samples {
        clock += exponential(&mut rng, 1.0 / peak);
        let accept: f64 = rng.gen();
        if accept * peak >= profile.rate_at(clock) / 60.0 {
            continue;
        }
        let (pad, &earliest) = free_at
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("at least one pad");
        let start = f64::max(clock, earliest);
        free_at[pad] = start + exponential(&mut rng, profile.mean_occupancy);

        if clock >= warmup {
            measured += 1;
            if earliest > clock {
                waited += 1;
                total_wait += earliest - clock;
            }
        }
    }

    let pr = waited as f64 / measured as f64;
    let wait = if waited == 0 { 0.0 } else { total_wait / waited as f64 };
    Ok(SimulatedLoad { pr, wait, waited, measured })
}
