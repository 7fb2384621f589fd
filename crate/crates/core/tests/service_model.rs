use proptest::prelude::*;
use skyway_core::synth::{self, RandomGraphParams};
use skyway_core::{
    base_comps, energy_consumption, extend_with_congestion, partial_recharge_time, service_time, DeliveryQuery,
    DroneSpec, DroneState, EnergyModelParams, NodeId, Segment, SegmentId, StationLoadProfile, StationProfiles,
};

fn seg(m: f64) -> Segment {
    Segment::new(SegmentId(0), NodeId(0), NodeId(1), m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn doubling_length_doubles_time(len in 1.0f64..50_000.0, load in 0.0f64..=1.0) {
        let d = DroneSpec::dji_m200_v2();
        let p = EnergyModelParams::default();
        let w = load * d.payload_capacity;
        let one = service_time(&seg(len), &d, w, &p).unwrap();
        let two = service_time(&seg(2.0 * len), &d, w, &p).unwrap();
        prop_assert!((two - 2.0 * one).abs() <= 1e-12 * two);
        prop_assert!(one > 0.0);
    }

    #[test]
    fn energy_increases_with_length_and_payload(len in 1.0f64..50_000.0, dl in 1.0f64..5_000.0, load in 0.0f64..0.9, dw in 0.01f64..0.1) {
        let d = DroneSpec::dji_m200_v2();
        let p = EnergyModelParams::default();
        let w = load * d.payload_capacity;
        let w2 = (load + dw) * d.payload_capacity;
        let base = energy_consumption(&seg(len), &d, w, &p).unwrap();
        prop_assert!(energy_consumption(&seg(len + dl), &d, w, &p).unwrap() > base);
        prop_assert!(energy_consumption(&seg(len), &d, w2, &p).unwrap() > base);
        prop_assert!(service_time(&seg(len + dl), &d, w, &p).unwrap() > service_time(&seg(len), &d, w, &p).unwrap());
    }

    #[test]
    fn recharge_duration_is_bounded(battery in 0.0f64..=1.0, need in 0.0f64..=0.9) {
        let d = DroneSpec::dji_m200_v2();
        let p = EnergyModelParams::default();
        let out = partial_recharge_time(&d, &DroneState { battery_fraction: battery, payload: 0.0 }, need, &p).unwrap();
        prop_assert!(out.duration >= 0.0 && out.duration <= d.full_recharge_duration);
        prop_assert!(out.battery_fraction >= battery);
    }
}

/// Final battery equals the start minus what was flown plus what was charged.
#[test]
fn battery_is_conserved_over_plans() {
    let params = EnergyModelParams::default();
    let drone = DroneSpec::dji_m200_v2();
    let profiles = StationProfiles::new(StationLoadProfile::constant(NodeId(0), 4.0, 30.0, 1).unwrap(), 240.0).unwrap();
    let mut checked = 0;
    for seed in 0..40 {
        let net = synth::random_connected_graph(&RandomGraphParams { side_m: 60_000.0, ..Default::default() }, seed);
        let last = net.nodes().last().unwrap().id;
        let q = DeliveryQuery::new(net.nodes()[0].id, last, 300.0, 1.0);
        let Ok(plans) = base_comps(&net, &q, 4, &drone, &params) else { continue };
        for plan in plans {
            let ext = extend_with_congestion(&net, &plan, &q, &profiles, &params).unwrap();
            let consumed: f64 = ext.legs.iter().map(|l| l.energy).sum();
            let charged: f64 = ext
                .stations
                .as_ref()
                .unwrap()
                .iter()
                .map(|v| v.battery_on_departure - v.battery_on_arrival)
                .sum();
            // replay the bookkeeping leg by leg
            let mut battery = 1.0;
            for (j, leg) in ext.legs.iter().enumerate() {
                battery -= leg.energy;
                if let Some(v) = ext.stations.as_ref().unwrap().get(j) {
                    assert!((v.battery_on_arrival - battery).abs() < 1e-12);
                    battery = v.battery_on_departure;
                }
            }
            assert!((battery - (1.0 - consumed + charged)).abs() < 1e-9);
            assert!(battery >= params.reserve_fraction - 1e-12);
            checked += 1;
        }
    }
    assert!(checked > 50, "only {checked} plans checked");
}
