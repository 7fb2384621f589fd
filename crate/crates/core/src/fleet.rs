//! Drone QoS records and skyline selection of the delivery drone.
//!
//! Selection runs in three steps: drop drones that cannot lift the package,
//! compute the skyline (Pareto set) of the rest with a block-nested-loop
//! window, then pick the skyline member that is best on a single preferred
//! quality field.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

#[derive(Clone, Debug, PartialEq)]
pub struct DroneSpec {
    pub model: String,
    /// kg
    pub payload_capacity: f64,
    /// minutes
    pub max_flight_time: f64,
    /// km
    pub flight_range: f64,
    /// km/h
    pub max_speed: f64,
    /// minutes for a 0% to 100% charge
    pub full_recharge_duration: f64,
    /// Wh
    pub battery_capacity: f64,
}

/// Slack allowed between the quoted range and speed times endurance.
const RANGE_SLACK: f64 = 1.05;

impl DroneSpec {
    pub fn new(
        model: impl Into<String>,
        payload_capacity: f64,
        max_flight_time: f64,
        flight_range: f64,
        max_speed: f64,
        full_recharge_duration: f64,
        battery_capacity: f64,
    ) -> Result<Self, FleetError> {
        let spec = Self {
            model: model.into(),
            payload_capacity,
            max_flight_time,
            flight_range,
            max_speed,
            full_recharge_duration,
            battery_capacity,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// DJI Matrice 200 V2 as used for the reference experiments.
    ///
    /// Battery capacity is the vendor figure for a pair of TB55 packs.
    pub fn dji_m200_v2() -> Self {
        Self {
            model: String::from("DJI M200 V2"),
            payload_capacity: 1.45,
            max_flight_time: 24.0,
            flight_range: 32.4,
            max_speed: 81.0,
            full_recharge_duration: 134.4,
            battery_capacity: 349.3,
        }
    }

    pub fn validate(&self) -> Result<(), FleetError> {
        for field in QualityField::ALL {
            let v = self.quality(field);
            if !(v.is_finite() && v > 0.0) {
                return Err(FleetError::InvalidQuality { model: self.model.clone(), field, value: v });
            }
        }
        let reachable = self.max_speed * self.max_flight_time / 60.0 * RANGE_SLACK;
        if self.flight_range > reachable {
            return Err(FleetError::InconsistentRange {
                model: self.model.clone(),
                range: self.flight_range,
                reachable,
            });
        }
        Ok(())
    }

    pub fn quality(&self, field: QualityField) -> f64 {
        match field {
            QualityField::PayloadCapacity => self.payload_capacity,
            QualityField::MaxFlightTime => self.max_flight_time,
            QualityField::FlightRange => self.flight_range,
            QualityField::MaxSpeed => self.max_speed,
            QualityField::FullRechargeDuration => self.full_recharge_duration,
            QualityField::BatteryCapacity => self.battery_capacity,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QualityField {
    PayloadCapacity,
    MaxFlightTime,
    FlightRange,
    MaxSpeed,
    FullRechargeDuration,
    BatteryCapacity,
}

impl QualityField {
    pub const ALL: [QualityField; 6] = [
        QualityField::PayloadCapacity,
        QualityField::MaxFlightTime,
        QualityField::FlightRange,
        QualityField::MaxSpeed,
        QualityField::FullRechargeDuration,
        QualityField::BatteryCapacity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QualityField::PayloadCapacity => "payload_capacity",
            QualityField::MaxFlightTime => "max_flight_time",
            QualityField::FlightRange => "flight_range",
            QualityField::MaxSpeed => "max_speed",
            QualityField::FullRechargeDuration => "full_recharge_duration",
            QualityField::BatteryCapacity => "battery_capacity",
        }
    }
}

impl fmt::Display for QualityField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QualityField {
    type Err = FleetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QualityField::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| FleetError::UnknownField(String::from(s)))
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FleetError {
    #[error("unknown quality field `{0}`")]
    UnknownField(String),
    #[error("quality field {0} is listed as both cost and benefit")]
    ConflictingDirection(QualityField),
    #[error("selection field {0} has no direction")]
    UndirectedSelection(QualityField),
    #[error("drone `{model}`: {field} = {value} must be finite and positive")]
    InvalidQuality { model: String, field: QualityField, value: f64 },
    #[error("drone `{model}`: range {range} km exceeds speed x endurance ({reachable} km)")]
    InconsistentRange { model: String, range: f64, reachable: f64 },
    #[error("no drone can carry {0} kg")]
    NoCapableDrone(f64),
    #[error("empty fleet")]
    EmptyFleet,
}

/// Which quality fields are costs, which are benefits, and which one decides
/// among skyline members.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityDirectionConfig {
    to_min: Vec<QualityField>,
    to_max: Vec<QualityField>,
    to_sel: QualityField,
}

impl QualityDirectionConfig {
    pub fn new(
        to_min: Vec<QualityField>,
        to_max: Vec<QualityField>,
        to_sel: QualityField,
    ) -> Result<Self, FleetError> {
        let mut to_min = to_min;
        let mut to_max = to_max;
        to_min.sort_unstable();
        to_min.dedup();
        to_max.sort_unstable();
        to_max.dedup();
        if let Some(f) = to_min.iter().find(|f| to_max.contains(f)) {
            return Err(FleetError::ConflictingDirection(*f));
        }
        if !to_min.contains(&to_sel) && !to_max.contains(&to_sel) {
            return Err(FleetError::UndirectedSelection(to_sel));
        }
        Ok(Self { to_min, to_max, to_sel })
    }

    pub fn from_names(to_min: &[&str], to_max: &[&str], to_sel: &str) -> Result<Self, FleetError> {
        let parse = |names: &[&str]| names.iter().map(|n| n.parse()).collect::<Result<Vec<_>, _>>();
        Self::new(parse(to_min)?, parse(to_max)?, to_sel.parse()?)
    }

    pub fn to_min(&self) -> &[QualityField] {
        &self.to_min
    }

    pub fn to_max(&self) -> &[QualityField] {
        &self.to_max
    }

    pub fn to_sel(&self) -> QualityField {
        self.to_sel
    }
}

impl Default for QualityDirectionConfig {
    /// Recharge time is the only cost; everything else is a benefit and the
    /// flight range picks the winner.
    fn default() -> Self {
        Self::new(
            alloc::vec![QualityField::FullRechargeDuration],
            alloc::vec![
                QualityField::PayloadCapacity,
                QualityField::FlightRange,
                QualityField::MaxSpeed,
                QualityField::MaxFlightTime,
                QualityField::BatteryCapacity,
            ],
            QualityField::FlightRange,
        )
        .expect("default direction config is consistent")
    }
}

/// Counts the fields on which `a` is better and worse than `b`. Ties count
/// toward neither.
pub fn count_diff(a: &DroneSpec, b: &DroneSpec, cfg: &QualityDirectionConfig) -> (usize, usize) {
    let mut better = 0;
    let mut worse = 0;
    for &f in &cfg.to_min {
        better += (a.quality(f) < b.quality(f)) as usize;
        worse += (a.quality(f) > b.quality(f)) as usize;
    }
    for &f in &cfg.to_max {
        better += (a.quality(f) > b.quality(f)) as usize;
        worse += (a.quality(f) < b.quality(f)) as usize;
    }
    (better, worse)
}

/// True when `a` is at least as good as `b` everywhere and strictly better
/// somewhere.
pub fn dominates(a: &DroneSpec, b: &DroneSpec, cfg: &QualityDirectionConfig) -> bool {
    let (better, worse) = count_diff(b, a, cfg);
    worse > 0 && better == 0
}

/// Drones able to lift `weight`, in input order.
pub fn filter_by_payload(fleet: &[DroneSpec], weight: f64) -> Result<Vec<&DroneSpec>, FleetError> {
    let capable: Vec<&DroneSpec> = fleet.iter().filter(|d| d.payload_capacity >= weight).collect();
    if capable.is_empty() {
        return Err(FleetError::NoCapableDrone(weight));
    }
    Ok(capable)
}

/// Non-dominated payload-feasible drones, computed with a block-nested-loop
/// window. Members keep their relative input order.
pub fn skyline<'a>(
    fleet: &'a [DroneSpec],
    weight: f64,
    cfg: &QualityDirectionConfig,
) -> Result<Vec<&'a DroneSpec>, FleetError> {
    if fleet.is_empty() {
        return Err(FleetError::EmptyFleet);
    }
    let mut window: Vec<&DroneSpec> = Vec::new();
    'candidates: for drone in filter_by_payload(fleet, weight)? {
        let mut evicted = Vec::new();
        for (i, held) in window.iter().enumerate() {
            let (better, worse) = count_diff(drone, held, cfg);
            if worse > 0 && better == 0 {
                continue 'candidates;
            }
            if better > 0 && worse == 0 {
                evicted.push(i);
            }
        }
        for i in evicted.into_iter().rev() {
            window.remove(i);
        }
        window.push(drone);
    }
    Ok(window)
}

/// Picks the delivery drone: the skyline member that is best on the
/// selection field, ties going to the smallest model label.
pub fn block_nested_loop<'a>(
    fleet: &'a [DroneSpec],
    weight: f64,
    cfg: &QualityDirectionConfig,
) -> Result<&'a DroneSpec, FleetError> {
    let sky = skyline(fleet, weight, cfg)?;
    let maximize = cfg.to_max.contains(&cfg.to_sel);
    let best = sky
        .into_iter()
        .min_by(|a, b| selection_order(a, b, cfg.to_sel, maximize))
        .expect("skyline of a feasible fleet is non-empty");
    Ok(best)
}

fn selection_order(a: &DroneSpec, b: &DroneSpec, field: QualityField, maximize: bool) -> Ordering {
    let by_field = a.quality(field).total_cmp(&b.quality(field));
    let by_field = if maximize { by_field.reverse() } else { by_field };
    by_field.then_with(|| a.model.cmp(&b.model)).then_with(|| {
        // identical label and selection value: fall back to the full record
        QualityField::ALL
            .iter()
            .map(|&f| a.quality(f).total_cmp(&b.quality(f)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}
