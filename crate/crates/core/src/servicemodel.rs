//! Flight time, battery use and partial recharging for one drone service.
//!
//! Payload degrades speed and range linearly:
//!
//! ```text
//! effective_speed = max_speed    * (1 - speed_payload_factor * payload / capacity)
//! effective_range = flight_range * (1 - range_payload_factor * payload / capacity)
//! ```
//!
//! Charging is linear in time, so topping up a fraction `f` of the battery
//! takes `f * full_recharge_duration` minutes.

use crate::fleet::DroneSpec;
use crate::network::Segment;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyModelParams {
    pub speed_payload_factor: f64,
    pub range_payload_factor: f64,
    /// Battery fraction kept in hand on arrival at every station.
    pub reserve_fraction: f64,
}

impl Default for EnergyModelParams {
    fn default() -> Self {
        Self { speed_payload_factor: 0.2, range_payload_factor: 0.3, reserve_fraction: 0.1 }
    }
}

impl EnergyModelParams {
    pub fn new(speed_payload_factor: f64, range_payload_factor: f64, reserve_fraction: f64) -> Result<Self, ServiceError> {
        let params = Self { speed_payload_factor, range_payload_factor, reserve_fraction };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        let unit = |v: f64| (0.0..1.0).contains(&v);
        if !unit(self.speed_payload_factor) {
            return Err(ServiceError::BadParameter("speed_payload_factor", self.speed_payload_factor));
        }
        if !unit(self.range_payload_factor) {
            return Err(ServiceError::BadParameter("range_payload_factor", self.range_payload_factor));
        }
        if !(0.0..=0.5).contains(&self.reserve_fraction) {
            return Err(ServiceError::BadParameter("reserve_fraction", self.reserve_fraction));
        }
        Ok(())
    }

    /// Largest battery fraction a single leg may consume.
    pub fn max_leg_energy(&self) -> f64 {
        1.0 - self.reserve_fraction
    }
}

/// Battery and load carried through a composition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DroneState {
    pub battery_fraction: f64,
    pub payload: f64,
}

impl DroneState {
    pub fn full(payload: f64) -> Self {
        Self { battery_fraction: 1.0, payload }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RechargeOutcome {
    /// minutes on the pad
    pub duration: f64,
    pub battery_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ServiceError {
    #[error("payload {payload} kg exceeds capacity {capacity} kg")]
    PayloadExceedsCapacity { payload: f64, capacity: f64 },
    #[error("payload {0} kg is negative")]
    NegativePayload(f64),
    #[error("leg needs {need} of the battery but only {available} may be spent")]
    SegmentInfeasible { need: f64, available: f64 },
    #[error("energy model parameter {0} = {1} out of range")]
    BadParameter(&'static str, f64),
}

fn load_ratio(drone: &DroneSpec, payload: f64) -> Result<f64, ServiceError> {
    if payload < 0.0 {
        return Err(ServiceError::NegativePayload(payload));
    }
    if payload > drone.payload_capacity {
        return Err(ServiceError::PayloadExceedsCapacity { payload, capacity: drone.payload_capacity });
    }
    Ok(payload / drone.payload_capacity)
}

/// Minutes to fly `seg` at the payload-degraded speed.
pub fn service_time(seg: &Segment, drone: &DroneSpec, payload: f64, params: &EnergyModelParams) -> Result<f64, ServiceError> {
    let ratio = load_ratio(drone, payload)?;
    let speed = drone.max_speed * (1.0 - params.speed_payload_factor * ratio);
    Ok(seg.length_km() / speed * 60.0)
}

/// Battery fraction used flying `seg`. Values above one are legitimate and
/// mean the segment cannot be flown on a single charge.
pub fn energy_consumption(seg: &Segment, drone: &DroneSpec, payload: f64, params: &EnergyModelParams) -> Result<f64, ServiceError> {
    let ratio = load_ratio(drone, payload)?;
    let range = drone.flight_range * (1.0 - params.range_payload_factor * ratio);
    Ok(seg.length_km() / range)
}

/// Charges just enough for the next leg plus the reserve.
pub fn partial_recharge_time(
    drone: &DroneSpec,
    state: &DroneState,
    next_leg_energy: f64,
    params: &EnergyModelParams,
) -> Result<RechargeOutcome, ServiceError> {
    if next_leg_energy > params.max_leg_energy() {
        return Err(ServiceError::SegmentInfeasible {
            need: next_leg_energy,
            available: params.max_leg_energy(),
        });
    }
    let target = f64::min(1.0, next_leg_energy + params.reserve_fraction);
    if state.battery_fraction >= target {
        return Ok(RechargeOutcome { duration: 0.0, battery_fraction: state.battery_fraction });
    }
    Ok(RechargeOutcome {
        duration: (target - state.battery_fraction) * drone.full_recharge_duration,
        battery_fraction: target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{NodeId, SegmentId};

    fn seg_km(km: f64) -> Segment {
        Segment::new(SegmentId(0), NodeId(0), NodeId(1), km * 1000.0)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn unloaded_service_time() {
        let d = DroneSpec::dji_m200_v2();
        let p = EnergyModelParams::default();
        assert!(close(service_time(&seg_km(81.0), &d, 0.0, &p).unwrap(), 60.0));
    }

    #[test]
    fn fully_loaded_service_time() {
        let d = DroneSpec::dji_m200_v2();
        let p = EnergyModelParams::default();
        let expected = 10.0 / (81.0 * 0.8) * 60.0;
        assert!(close(service_time(&seg_km(10.0), &d, 1.45, &p).unwrap(), expected));
        assert!(matches!(
            service_time(&seg_km(10.0), &d, 1.5, &p),
            Err(ServiceError::PayloadExceedsCapacity { .. })
        ));
    }

    #[test]
    fn energy_endpoints() {
        let d = DroneSpec::dji_m200_v2();
        let p = EnergyModelParams::default();
        assert!(close(energy_consumption(&seg_km(d.flight_range), &d, 0.0, &p).unwrap(), 1.0));
        let zero = Segment { length_m: 0.0, ..seg_km(1.0) };
        assert_eq!(energy_consumption(&zero, &d, 0.5, &p).unwrap(), 0.0);
    }

    #[test]
    fn recharge_policy() {
        let d = DroneSpec::dji_m200_v2();
        let p = EnergyModelParams::default();

        let full = DroneState::full(1.0);
        assert_eq!(
            partial_recharge_time(&d, &full, 0.5, &p).unwrap(),
            RechargeOutcome { duration: 0.0, battery_fraction: 1.0 }
        );

        let low = DroneState { battery_fraction: 0.2, payload: 1.0 };
        let out = partial_recharge_time(&d, &low, 0.6, &p).unwrap();
        assert!(close(out.duration, 0.5 * 134.4));
        assert!(close(out.battery_fraction, 0.7));

        let high = DroneState { battery_fraction: 0.8, payload: 1.0 };
        assert_eq!(partial_recharge_time(&d, &high, 0.3, &p).unwrap().duration, 0.0);

        assert!(matches!(
            partial_recharge_time(&d, &low, 0.95, &p),
            Err(ServiceError::SegmentInfeasible { .. })
        ));
    }

    #[test]
    fn parameter_validation() {
        EnergyModelParams::new(0.0, 0.0, 0.5).unwrap();
        assert!(EnergyModelParams::new(1.0, 0.3, 0.1).is_err());
        assert!(EnergyModelParams::new(0.2, -0.1, 0.1).is_err());
        assert!(EnergyModelParams::new(0.2, 0.3, 0.6).is_err());
    }
}
