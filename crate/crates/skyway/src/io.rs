//! CSV formats for networks, fleets and station load profiles.
//!
//! All files carry a header row. Errors name the file and the 1-based line.
//!
//! | file     | columns                                                                        |
//! |----------|--------------------------------------------------------------------------------|
//! | nodes    | `node_id,x,y[,pads]` (planar metres; `pads` defaults to 3)                     |
//! | edges    | `u,v,length_m` (segment ids follow row order, starting at 0)                   |
//! | drones   | `model,payload_kg,flight_time_min,range_km,speed_kmh,recharge_min,battery_wh`  |
//! | profiles | `node_id,breakpoint_min,rate_per_hour,mean_occupancy_min,seed`                 |
//!
//! A profile is the set of rows sharing a `node_id`; `*` as the id replaces
//! the baseline used for stations without rows of their own.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use skyway_core::{
    CongestionError, DroneSpec, FleetError, NetworkError, NodeId, NodeRecord, RateBreakpoint, Segment,
    SegmentId, SkywayNetwork, StationLoadProfile, StationProfiles,
};
use skyway_core::network::DEFAULT_PADS;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Open { path: PathBuf, source: std::io::Error },
    #[error("{path}: line {line}: {source}")]
    Parse { path: PathBuf, line: u64, source: csv::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: csv::Error },
    #[error("{path}: line {line}: {source}")]
    Drone { path: PathBuf, line: u64, source: FleetError },
    #[error("{path}: profile for node {node}: {source}")]
    Profile { path: PathBuf, node: String, source: CongestionError },
    #[error("{path}: line {line}: bad node id {value:?}")]
    ProfileNode { path: PathBuf, line: u64, value: String },
    #[error("{path}: no rows")]
    Empty { path: PathBuf },
    #[error("network: {0}")]
    Network(#[from] NetworkError),
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRow {
    node_id: u64,
    x: f64,
    y: f64,
    #[serde(default)]
    pads: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRow {
    u: u64,
    v: u64,
    length_m: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct DroneRow {
    model: String,
    payload_kg: f64,
    flight_time_min: f64,
    range_km: f64,
    speed_kmh: f64,
    recharge_min: f64,
    battery_wh: f64,
}

#[derive(Debug, Deserialize)]
struct ProfileRow {
    node_id: String,
    breakpoint_min: f64,
    rate_per_hour: f64,
    mean_occupancy_min: f64,
    seed: u64,
}

fn open(path: &Path) -> Result<File, IoError> {
    File::open(path).map_err(|source| IoError::Open { path: path.to_path_buf(), source })
}

fn create(path: &Path) -> Result<File, IoError> {
    File::create(path).map_err(|source| IoError::Open { path: path.to_path_buf(), source })
}

/// Deserialises every row, pairing it with its line number.
fn rows<T: serde::de::DeserializeOwned, R: Read>(reader: R, path: &Path) -> Result<Vec<(u64, T)>, IoError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|source| IoError::Parse { path: path.to_path_buf(), line: 1, source })?
        .clone();
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|source| {
            let line = source.position().map_or(0, |p| p.line());
            IoError::Parse { path: path.to_path_buf(), line, source }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .deserialize(Some(&headers))
            .map_err(|source| IoError::Parse { path: path.to_path_buf(), line, source })?;
        out.push((line, row));
    }
    Ok(out)
}

/// Builds a network from node and edge CSV readers. The paths only label
/// error messages.
pub fn read_network<N: Read, E: Read>(
    nodes: N,
    nodes_path: &Path,
    edges: E,
    edges_path: &Path,
) -> Result<SkywayNetwork, IoError> {
    let nodes: Vec<NodeRecord> = rows::<NodeRow, _>(nodes, nodes_path)?
        .into_iter()
        .map(|(_, r)| NodeRecord::new(NodeId(r.node_id), r.x, r.y, r.pads.unwrap_or(DEFAULT_PADS)))
        .collect();
    let segments: Vec<Segment> = rows::<EdgeRow, _>(edges, edges_path)?
        .into_iter()
        .enumerate()
        .map(|(i, (_, r))| Segment::new(SegmentId(i as u64), NodeId(r.u), NodeId(r.v), r.length_m))
        .collect();
    Ok(SkywayNetwork::new(nodes, segments)?)
}

pub fn load_network(nodes: &Path, edges: &Path) -> Result<SkywayNetwork, IoError> {
    read_network(open(nodes)?, nodes, open(edges)?, edges)
}

/// Writes both files with full-precision floats; segment ids are implied by
/// row order, so they are renumbered on reload.
pub fn write_network<N: Write, E: Write>(net: &SkywayNetwork, nodes: N, edges: E) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(nodes);
    for n in net.nodes() {
        w.serialize(NodeRow { node_id: n.id.0, x: n.x, y: n.y, pads: Some(n.pads) })?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_writer(edges);
    for s in net.segments() {
        w.serialize(EdgeRow { u: s.a.0, v: s.b.0, length_m: s.length_m })?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_network(net: &SkywayNetwork, nodes: &Path, edges: &Path) -> Result<(), IoError> {
    let (n, e) = (create(nodes)?, create(edges)?);
    write_network(net, n, e).map_err(|source| IoError::Write { path: nodes.to_path_buf(), source })
}

pub fn read_fleet<R: Read>(reader: R, path: &Path) -> Result<Vec<DroneSpec>, IoError> {
    let fleet = rows::<DroneRow, _>(reader, path)?
        .into_iter()
        .map(|(line, r)| {
            DroneSpec::new(r.model, r.payload_kg, r.flight_time_min, r.range_km, r.speed_kmh, r.recharge_min, r.battery_wh)
                .map_err(|source| IoError::Drone { path: path.to_path_buf(), line, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if fleet.is_empty() {
        return Err(IoError::Empty { path: path.to_path_buf() });
    }
    Ok(fleet)
}

pub fn load_fleet(path: &Path) -> Result<Vec<DroneSpec>, IoError> {
    read_fleet(open(path)?, path)
}

pub fn write_fleet<W: Write>(fleet: &[DroneSpec], writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for d in fleet {
        w.serialize(DroneRow {
            model: d.model.clone(),
            payload_kg: d.payload_capacity,
            flight_time_min: d.max_flight_time,
            range_km: d.flight_range,
            speed_kmh: d.max_speed,
            recharge_min: d.full_recharge_duration,
            battery_wh: d.battery_capacity,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads per-station profiles. Rows are grouped by node id and their
/// breakpoints sorted; occupancy and seed come from the first row of each
/// group.
pub fn read_profiles<R: Read>(
    reader: R,
    path: &Path,
    baseline: StationLoadProfile,
    saturation_cap: f64,
) -> Result<StationProfiles, IoError> {
    let mut groups: BTreeMap<Option<u64>, Vec<ProfileRow>> = BTreeMap::new();
    for (line, row) in rows::<ProfileRow, _>(reader, path)? {
        let key = match row.node_id.as_str() {
            "*" => None,
            s => Some(s.parse::<u64>().map_err(|_| IoError::ProfileNode {
                path: path.to_path_buf(),
                line,
                value: s.to_string(),
            })?),
        };
        groups.entry(key).or_default().push(row);
    }

    let build = |key: Option<u64>, mut rows: Vec<ProfileRow>| {
        rows.sort_by(|a, b| a.breakpoint_min.total_cmp(&b.breakpoint_min));
        let schedule = rows
            .iter()
            .map(|r| RateBreakpoint { start_min: r.breakpoint_min, rate_per_hour: r.rate_per_hour })
            .collect();
        StationLoadProfile::new(NodeId(key.unwrap_or(0)), schedule, rows[0].mean_occupancy_min, rows[0].seed).map_err(
            |source| IoError::Profile {
                path: path.to_path_buf(),
                node: key.map_or_else(|| "*".to_string(), |k| k.to_string()),
                source,
            },
        )
    };

    let baseline = match groups.remove(&None) {
        Some(rows) => build(None, rows)?,
        None => baseline,
    };
    let mut profiles = StationProfiles::new(baseline, saturation_cap).map_err(|source| IoError::Profile {
        path: path.to_path_buf(),
        node: "*".to_string(),
        source,
    })?;
    for (key, rows) in groups {
        profiles.insert(build(key, rows)?);
    }
    Ok(profiles)
}

pub fn load_profiles(path: &Path, baseline: StationLoadProfile, saturation_cap: f64) -> Result<StationProfiles, IoError> {
    read_profiles(open(path)?, path, baseline, saturation_cap)
}
