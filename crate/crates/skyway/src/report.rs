//! CSV metrics, per-group summaries and the JSON plan report.
//!
//! Floats are written in shortest round-trip form, so `read_metrics`
//! recovers the exact values that were written.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use skyway_core::{CompositionPlan, DeliveryQuery};

use crate::harness::{Method, MetricsRecord};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("no records to report")]
    Empty,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

/// Mean and sample standard deviation of each metric for one method at one
/// network size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub node_count: usize,
    pub method: Method,
    pub runs: usize,
    pub execution_time_mean: f64,
    pub execution_time_std: f64,
    pub delivery_time_mean: f64,
    pub delivery_time_std: f64,
    pub distance_mean: f64,
    pub distance_std: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Rows ordered by (node_count, method).
pub fn summarize(records: &[MetricsRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(usize, Method), Vec<&MetricsRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.node_count, r.method)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((node_count, method), rs)| {
            let col = |f: fn(&MetricsRecord) -> f64| mean_std(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
            let (et, ets) = col(|r| r.execution_time);
            let (dt, dts) = col(|r| r.delivery_time);
            let (d, ds) = col(|r| r.distance);
            SummaryRow {
                node_count,
                method,
                runs: rs.len(),
                execution_time_mean: et,
                execution_time_std: ets,
                delivery_time_mean: dt,
                delivery_time_std: dts,
                distance_mean: d,
                distance_std: ds,
            }
        })
        .collect()
}

fn write_rows<T: Serialize, W: Write>(rows: &[T], writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: serde::de::DeserializeOwned, R: Read>(reader: R) -> Result<Vec<T>, csv::Error> {
    csv::Reader::from_reader(reader).deserialize().collect()
}

pub fn write_metrics<W: Write>(records: &[MetricsRecord], writer: W) -> Result<(), csv::Error> {
    write_rows(records, writer)
}

pub fn read_metrics<R: Read>(reader: R) -> Result<Vec<MetricsRecord>, csv::Error> {
    read_rows(reader)
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], writer: W) -> Result<(), csv::Error> {
    write_rows(rows, writer)
}

pub fn read_summary<R: Read>(reader: R) -> Result<Vec<SummaryRow>, csv::Error> {
    read_rows(reader)
}

/// Writes `metrics.csv` and `summary.csv` into `out_dir`, creating it if
/// needed, and returns their paths.
pub fn emit_report(records: &[MetricsRecord], out_dir: &Path) -> Result<(PathBuf, PathBuf), ReportError> {
    if records.is_empty() {
        return Err(ReportError::Empty);
    }
    fs::create_dir_all(out_dir).map_err(|source| ReportError::Io { path: out_dir.to_path_buf(), source })?;
    let metrics = out_dir.join("metrics.csv");
    let summary = out_dir.join("summary.csv");
    let create = |p: &Path| File::create(p).map_err(|source| ReportError::Io { path: p.to_path_buf(), source });
    write_metrics(records, create(&metrics)?).map_err(|source| ReportError::Csv { path: metrics.clone(), source })?;
    write_summary(&summarize(records), create(&summary)?)
        .map_err(|source| ReportError::Csv { path: summary.clone(), source })?;
    Ok((metrics, summary))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegReport {
    pub from: u64,
    pub to: u64,
    pub segment: u64,
    pub length_km: f64,
    pub service_time_min: f64,
    pub energy_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationReport {
    pub node: u64,
    pub arrival_min: f64,
    pub pr: f64,
    pub wait_min: f64,
    pub recharge_min: f64,
    pub battery_on_arrival: f64,
    pub battery_on_departure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub rank: usize,
    pub nodes: Vec<u64>,
    pub service_time_min: f64,
    pub delivery_time_min: f64,
    pub deterministic_delivery_time_min: Option<f64>,
    pub distance_km: f64,
    pub total_recharge_min: Option<f64>,
    pub total_wait_min: Option<f64>,
    pub legs: Vec<LegReport>,
    pub stations: Vec<StationReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionReport {
    pub method: String,
    pub source: u64,
    pub destination: u64,
    pub start_min: f64,
    pub weight_kg: f64,
    pub drone: String,
    pub plans: Vec<PlanReport>,
}

impl PlanReport {
    pub fn new(rank: usize, plan: &CompositionPlan) -> Self {
        Self {
            rank,
            nodes: plan.nodes.iter().map(|n| n.0).collect(),
            service_time_min: plan.base_time,
            delivery_time_min: plan.delivery_time(),
            deterministic_delivery_time_min: plan.deterministic_delivery_time(),
            distance_km: plan.distance_km,
            total_recharge_min: plan.total_recharge(),
            total_wait_min: plan.total_wait(),
            legs: plan
                .legs
                .iter()
                .map(|l| LegReport {
                    from: l.from.0,
                    to: l.to.0,
                    segment: l.segment.id.0,
                    length_km: l.segment.length_km(),
                    service_time_min: l.service_time,
                    energy_fraction: l.energy,
                })
                .collect(),
            stations: plan
                .stations
                .iter()
                .flatten()
                .map(|v| StationReport {
                    node: v.node.0,
                    arrival_min: v.arrival_time,
                    pr: v.estimate.pr,
                    wait_min: v.estimate.wait,
                    recharge_min: v.estimate.recharge,
                    battery_on_arrival: v.battery_on_arrival,
                    battery_on_departure: v.battery_on_departure,
                })
                .collect(),
        }
    }
}

impl CompositionReport {
    pub fn new(method: Method, query: &DeliveryQuery, plans: &[CompositionPlan]) -> Self {
        Self {
            method: method.to_string(),
            source: query.source.0,
            destination: query.destination.0,
            start_min: query.start_time,
            weight_kg: query.weight,
            drone: plans.first().map(|p| p.drone.model.clone()).unwrap_or_default(),
            plans: plans.iter().enumerate().map(|(i, p)| PlanReport::new(i + 1, p)).collect(),
        }
    }
}
