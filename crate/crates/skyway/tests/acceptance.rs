//! End-to-end acceptance checks. Runs as a plain binary so the verdict
//! lines are always printed; exits non-zero if any check fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skyway::harness::{default_profiles, run_experiment, ExperimentInputs, Method, MetricsRecord};
use skyway::report::emit_report;
use skyway::ExperimentConfig;
use skyway_core::synth::{self, RandomGraphParams};
use skyway_core::{
    base_comps, block_nested_loop, count_diff, count_feasible_paths, exhaustive_composition,
    probability_wait_recharge, simulate_station, top_k_composition, CompositionError, DeliveryQuery, DroneSpec,
    EnergyModelParams, NodeId, QualityDirectionConfig, SkywayNetwork, StationLoadProfile, StationProfiles,
};

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct Case {
    net: SkywayNetwork,
    query: DeliveryQuery,
    profiles: StationProfiles,
}

/// 100 seeded graphs with 8 to 12 nodes and a servable random query each.
fn corpus() -> Vec<Case> {
    let drone = DroneSpec::dji_m200_v2();
    let params = EnergyModelParams::default();
    let mut cases = Vec::new();
    let mut seed = 0u64;
    while cases.len() < 100 {
        let net = synth::random_connected_graph(&RandomGraphParams::default(), seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        seed += 1;
        let ids: Vec<NodeId> = net.nodes().iter().map(|n| n.id).collect();
        let (s, d) = (ids[rng.gen_range(0..ids.len())], ids[rng.gen_range(0..ids.len())]);
        if s == d {
            continue;
        }
        let query = DeliveryQuery::new(s, d, rng.gen_range(0.0..1440.0), 1.0);
        if base_comps(&net, &query, 1, &drone, &params).is_err() {
            continue;
        }
        let cfg = ExperimentConfig { master_seed: seed, ..ExperimentConfig::default() };
        let profiles = default_profiles(&cfg, &net).expect("default load is valid");
        cases.push(Case { net, query, profiles });
    }
    cases
}

fn oracle_equivalence(cases: &[Case]) -> Verdict {
    let started = Instant::now();
    let fleet = [DroneSpec::dji_m200_v2()];
    let (cfg, params) = (QualityDirectionConfig::default(), EnergyModelParams::default());
    let mut matched = 0;
    for c in cases {
        let n = count_feasible_paths(&c.net, &c.query, &fleet[0], &params, None).map_err(|e| e.to_string())?;
        let top = top_k_composition(&c.net, &fleet, &c.query, n, &c.profiles, &cfg, &params).map_err(|e| e.to_string())?;
        let ex = exhaustive_composition(&c.net, &fleet, &c.query, &c.profiles, &cfg, &params, None).map_err(|e| e.to_string())?;
        if top[0].nodes == ex.nodes {
            matched += 1;
        }
    }
    let elapsed = started.elapsed();
    check(
        matched == cases.len() && elapsed < Duration::from_secs(60),
        format!("{matched}/{} winners identical, {:.2} s", cases.len(), elapsed.as_secs_f64()),
    )
}

fn exhaustive_dominance(cases: &[Case]) -> Verdict {
    let fleet = [DroneSpec::dji_m200_v2()];
    let (cfg, params) = (QualityDirectionConfig::default(), EnergyModelParams::default());
    let mut gaps = Vec::new();
    let mut violations = 0;
    for c in cases {
        let top = top_k_composition(&c.net, &fleet, &c.query, 3, &c.profiles, &cfg, &params).map_err(|e| e.to_string())?;
        let ex = exhaustive_composition(&c.net, &fleet, &c.query, &c.profiles, &cfg, &params, None).map_err(|e| e.to_string())?;
        let (t3, te) = (top[0].delivery_time(), ex.delivery_time());
        if te > t3 {
            violations += 1;
        }
        gaps.push((t3 - te) / te);
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let positive = gaps.iter().filter(|&&g| g > 0.0).count();
    check(
        violations == 0 && (0.0..=0.15).contains(&mean),
        format!("{violations} violations, mean gap {:.3}% ({positive} runs with a gap)", mean * 100.0),
    )
}

fn mean_of(records: &[MetricsRecord], n: usize, m: Method, f: fn(&MetricsRecord) -> f64) -> f64 {
    let v: Vec<f64> = records.iter().filter(|r| r.node_count == n && r.method == m).map(f).collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn execution_time_trend(records: &[MetricsRecord], elapsed: Duration) -> Verdict {
    let time = |n, m| mean_of(records, n, m, |r| r.execution_time);
    let ex_ratio = time(40, Method::Exhaustive) / time(10, Method::Exhaustive);
    let top_ratio = time(40, Method::TopK(5)) / time(10, Method::TopK(5));
    let at40: Vec<f64> = (3..=5).map(|k| time(40, Method::TopK(k))).collect();
    let spread = at40.iter().cloned().fold(f64::MIN, f64::max) / at40.iter().cloned().fold(f64::MAX, f64::min);
    check(
        ex_ratio >= 10.0 * top_ratio && spread <= 2.0 && elapsed < Duration::from_secs(300),
        format!(
            "exhaustive 40/10 = {ex_ratio:.1}x, top-5 40/10 = {top_ratio:.1}x, top-k spread at 40 = {spread:.2}x, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn distance_trend(records: &[MetricsRecord]) -> Verdict {
    let dist = |m| mean_of(records, 40, m, |r| r.distance);
    let ex = dist(Method::Exhaustive);
    let worst = (3..=5).map(|k| dist(Method::TopK(k))).fold(f64::MIN, f64::max);
    check(worst <= ex * 1.05, format!("mean km at 40 nodes: exhaustive {ex:.3}, worst top-k {worst:.3}"))
}

fn zero_load_reduction() -> Verdict {
    let fleet = [DroneSpec::dji_m200_v2()];
    let (cfg, params) = (QualityDirectionConfig::default(), EnergyModelParams::default());
    let zero = StationProfiles::new(StationLoadProfile::constant(NodeId(0), 0.0, 30.0, 0).unwrap(), 240.0).unwrap();
    let road = synth::road_network(&Default::default(), 9);
    let (mut queries, mut plans, mut mismatches) = (0, 0, 0);
    let mut seed = 0u64;
    while queries < 50 {
        seed += 1;
        let net = road.extract_subnetwork(10 + (seed as usize % 4) * 10, seed).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ids: Vec<NodeId> = net.nodes().iter().map(|n| n.id).collect();
        let q = DeliveryQuery::new(ids[rng.gen_range(0..ids.len())], ids[rng.gen_range(0..ids.len())], rng.gen_range(0.0..1440.0), 1.0);
        if q.source == q.destination {
            continue;
        }
        let phase1 = match base_comps(&net, &q, 5, &fleet[0], &params) {
            Ok(p) => p,
            Err(CompositionError::Unreachable(..)) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let phase2 = top_k_composition(&net, &fleet, &q, 5, &zero, &cfg, &params).map_err(|e| e.to_string())?;
        queries += 1;
        for (a, b) in phase1.iter().zip(&phase2) {
            plans += 1;
            if a.nodes != b.nodes || b.delivery_time().to_bits() != b.base_time.to_bits() {
                mismatches += 1;
            }
        }
        if phase1.len() != phase2.len() {
            mismatches += 1;
        }
    }
    check(mismatches == 0, format!("{queries} queries, {plans} plans, {mismatches} mismatches"))
}

fn congestion_validation() -> Verdict {
    let rates = [2.0, 4.0, 6.0];
    let occupancies = [10.0, 15.0, 20.0];
    let pads = [3u32, 4, 5];
    let pr = |rate: f64, occ: f64, c: u32| {
        let p = StationLoadProfile::constant(NodeId(0), rate, occ, 1000 + c as u64).unwrap();
        probability_wait_recharge(&p, c, 0.0, 0.0, 240.0).unwrap().pr
    };
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    for (i, &rate) in rates.iter().enumerate() {
        for &occ in &occupancies {
            for (j, &c) in pads.iter().enumerate() {
                let p = StationLoadProfile::constant(NodeId(0), rate, occ, 1000 + c as u64).unwrap();
                let sim = simulate_station(&p, c, 2_000.0, 100_000).map_err(|e| e.to_string())?;
                let analytic = pr(rate, occ, c);
                worst = worst.max((sim.pr - analytic).abs());
                if i > 0 && analytic < pr(rates[i - 1], occ, c) {
                    monotone = false;
                }
                if j > 0 && analytic > pr(rate, occ, pads[j - 1]) {
                    monotone = false;
                }
            }
        }
    }
    check(worst <= 0.02 && monotone, format!("27 points, max |sim - analytic| = {worst:.4}, monotone = {monotone}"))
}

fn brute_winner<'a>(fleet: &'a [DroneSpec], w: f64, cfg: &QualityDirectionConfig) -> Option<&'a DroneSpec> {
    let capable: Vec<&DroneSpec> = fleet.iter().filter(|d| d.payload_capacity >= w).collect();
    let dominated = |d: &DroneSpec| {
        capable.iter().any(|o| {
            let (better, worse) = count_diff(o, d, cfg);
            better > 0 && worse == 0
        })
    };
    let sel = cfg.to_sel();
    capable
        .iter()
        .copied()
        .filter(|d| !dominated(d))
        .min_by(|a, b| b.quality(sel).total_cmp(&a.quality(sel)).then_with(|| a.model.cmp(&b.model)))
}

fn skyline_correctness() -> Verdict {
    let cfg = QualityDirectionConfig::default();
    let mut matched = 0;
    for seed in 0..50 {
        let fleet = synth::random_fleet(200, &mut ChaCha8Rng::seed_from_u64(seed));
        let w = 0.5 + (seed as f64) * 0.15;
        if block_nested_loop(&fleet, w, &cfg).ok() == brute_winner(&fleet, w, &cfg) {
            matched += 1;
        }
    }
    let table = [DroneSpec::dji_m200_v2()];
    let rejected = [1.450001, 1.5, 2.0, 5.0].iter().all(|&w| block_nested_loop(&table, w, &cfg).is_err());
    let accepted = block_nested_loop(&table, 1.45, &cfg).is_ok();
    check(
        matched == 50 && rejected && accepted,
        format!("{matched}/50 fleets match, DJI M200 V2 rejected above 1.45 kg: {rejected}"),
    )
}

fn fixture() -> Verdict {
    let net = synth::twelve_station_example();
    let q = DeliveryQuery::new(NodeId(1), NodeId(12), 480.0, 0.0);
    let plans = base_comps(&net, &q, 3, &synth::minute_drone(), &EnergyModelParams::default()).map_err(|e| e.to_string())?;
    let head: Vec<u64> = plans[0].nodes.iter().map(|n| n.0).collect();
    check(
        head == [1, 2, 5, 9, 12] && plans[0].base_time == 95.0,
        format!("rank 1 = {head:?}, S = {}", plans[0].base_time),
    )
}

fn without_timing(path: &std::path::Path) -> std::io::Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let col = header.iter().position(|h| *h == "execution_time");
    Ok(text
        .lines()
        .map(|l| l.split(',').enumerate().filter(|(i, _)| Some(*i) != col).map(|(_, f)| f).collect::<Vec<_>>().join(","))
        .collect())
}

fn determinism(first: &[MetricsRecord]) -> Verdict {
    let cfg = ExperimentConfig::default();
    let inputs = ExperimentInputs::from_config(&cfg).map_err(|e| e.to_string())?;
    let second = run_experiment(&cfg, &inputs).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, _) = emit_report(first, &dir.path().join("a")).map_err(|e| e.to_string())?;
    let (b, _) = emit_report(&second, &dir.path().join("b")).map_err(|e| e.to_string())?;
    let (a, b) = (without_timing(&a).map_err(|e| e.to_string())?, without_timing(&b).map_err(|e| e.to_string())?);
    check(a == b && !a.is_empty(), format!("{} rows compared, identical: {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let cases = corpus();
    let cfg = ExperimentConfig::default();
    let started = Instant::now();
    let experiment = ExperimentInputs::from_config(&cfg).and_then(|inputs| run_experiment(&cfg, &inputs));
    let elapsed = started.elapsed();

    let from_experiment = |f: &dyn Fn(&[MetricsRecord]) -> Verdict| match &experiment {
        Ok(records) => f(records),
        Err(e) => Err(e.to_string()),
    };
    let results = [
        ("oracle equivalence", oracle_equivalence(&cases)),
        ("exhaustive dominance", exhaustive_dominance(&cases)),
        ("execution-time trend", from_experiment(&|r| execution_time_trend(r, elapsed))),
        ("distance trend", from_experiment(&distance_trend)),
        ("zero-load reduction", zero_load_reduction()),
        ("congestion model validation", congestion_validation()),
        ("skyline correctness", skyline_correctness()),
        ("twelve-station fixture", fixture()),
        ("determinism", from_experiment(&determinism)),
    ];

    let mut failed = 0;
    for (i, (name, verdict)) in results.iter().enumerate() {
        match verdict {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
