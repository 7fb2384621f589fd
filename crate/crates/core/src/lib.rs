//! Drone service composition over skyway networks.
//!
//! The crate is `no_std` (it needs `alloc`) and carries only the algorithmic
//! pieces: the network graph, drone selection, the per-segment service model,
//! station congestion estimates and the two-phase top-k composition engine
//! together with its exhaustive baseline. File formats, the experiment runner
//! and the command line live in the `skyway` crate.
//!
//! ```
//! use skyway_core::prelude::*;
//!
//! let net = SkywayNetwork::new(
//!     vec![NodeRecord::new(NodeId(0), 0.0, 0.0, 3), NodeRecord::new(NodeId(1), 5000.0, 0.0, 3)],
//!     vec![Segment::new(SegmentId(0), NodeId(0), NodeId(1), 5000.0)],
//! )
//! .unwrap();
//! let fleet = vec![DroneSpec::dji_m200_v2()];
//! let query = DeliveryQuery::new(NodeId(0), NodeId(1), 480.0, 1.0);
//! let profiles = StationProfiles::idle();
//! let plans = top_k_composition(
//!     &net,
//!     &fleet,
//!     &query,
//!     3,
//!     &profiles,
//!     &QualityDirectionConfig::default(),
//!     &EnergyModelParams::default(),
//! )
//! .unwrap();
//! assert_eq!(plans[0].nodes, vec![NodeId(0), NodeId(1)]);
//! ```
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod composition;
pub mod congestion;
pub mod fleet;
pub mod network;
pub mod servicemodel;
pub mod synth;

mod math;

pub use composition::{
    base_comps, count_feasible_paths, exhaustive_composition, extend_with_congestion,
    rank_comps, top_k_composition, CompositionError, CompositionPlan, DeliveryQuery, Leg,
    StationVisit,
};
pub use congestion::{
    erlang_c, probability_wait_recharge, simulate_station, CongestionError,
    CongestionEstimate, RateBreakpoint, SimulatedLoad, StationLoadProfile, StationProfiles,
    DEFAULT_SATURATION_CAP_MIN, MINUTES_PER_DAY,
};
pub use fleet::{
    block_nested_loop, count_diff, dominates, filter_by_payload, skyline, DroneSpec,
    FleetError, QualityDirectionConfig, QualityField,
};
pub use network::{NetworkError, NodeId, NodeRecord, Segment, SegmentId, SkywayNetwork};
pub use servicemodel::{
    energy_consumption, partial_recharge_time, service_time, DroneState, EnergyModelParams,
    RechargeOutcome, ServiceError,
};

pub mod prelude {
    pub use crate::composition::{
        exhaustive_composition, top_k_composition, CompositionPlan, DeliveryQuery,
    };
    pub use crate::congestion::{StationLoadProfile, StationProfiles};
    pub use crate::fleet::{DroneSpec, QualityDirectionConfig};
    pub use crate::network::{NodeId, NodeRecord, Segment, SegmentId, SkywayNetwork};
    pub use crate::servicemodel::EnergyModelParams;
}
