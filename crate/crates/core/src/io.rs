//! CSV import and export for environments, paths, networks and sweeps.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{EnvError, Environment1D, SiteWindow};
use crate::graphene::ConductivityCurve;
use crate::network::{ConductanceNetwork, NetworkError, PolyaPoint};
use crate::walk::{LocalTimeTable, Trajectory};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed table: {0}")]
    Format(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Serialize, Deserialize)]
struct SiteRow {
    site: i64,
    p: f64,
}

#[derive(Serialize)]
struct PathRow {
    time: u64,
    position: i64,
}

#[derive(Serialize, Deserialize)]
struct CountRow {
    site: i64,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct EdgeRow {
    u: usize,
    v: usize,
    conductance: f64,
}

#[derive(Serialize)]
struct VoltageRow {
    node: usize,
    voltage: f64,
}

#[derive(Serialize)]
struct PolyaRow {
    r: u32,
    #[serde(rename = "R_eff")]
    r_eff: f64,
    p_esc: f64,
}

#[derive(Serialize)]
struct CurveRow {
    parameter: f64,
    mean: f64,
    stderr: f64,
    n: u64,
}

fn write_rows<W: Write, T: Serialize>(w: W, rows: impl IntoIterator<Item = T>) -> Result<(), IoError> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(r: R) -> Result<Vec<T>, IoError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(r);
    Ok(rdr.deserialize().collect::<Result<Vec<T>, _>>()?)
}

/// `site,p`.
pub fn write_environment<W: Write>(env: &Environment1D, w: W) -> Result<(), IoError> {
    write_rows(w, env.window().sites().zip(env.values()).map(|(site, &p)| SiteRow { site, p }))
}

/// Reads `site,p` rows covering a contiguous window that contains 0.
pub fn read_environment<R: Read>(r: R) -> Result<Environment1D, IoError> {
    let mut rows: Vec<SiteRow> = read_rows(r)?;
    rows.sort_by_key(|row| row.site);
    let (Some(first), Some(last)) = (rows.first(), rows.last()) else {
        return Err(IoError::Format("no sites".into()));
    };
    let window = SiteWindow::new(first.site, last.site)?;
    if rows.len() != window.len() || rows.windows(2).any(|w| w[1].site != w[0].site + 1) {
        return Err(IoError::Format("sites must be contiguous and distinct".into()));
    }
    Ok(Environment1D::from_values(window, rows.iter().map(|row| row.p).collect())?)
}

/// `time,position`.
pub fn write_trajectory<W: Write>(traj: &Trajectory, w: W) -> Result<(), IoError> {
    write_rows(
        w,
        traj.positions.iter().enumerate().map(|(t, &position)| PathRow { time: t as u64, position }),
    )
}

/// `site,count`.
pub fn write_local_time<W: Write>(table: &LocalTimeTable, w: W) -> Result<(), IoError> {
    write_rows(w, table.counts.iter().map(|(&site, &count)| CountRow { site, count }))
}

/// `u,v,conductance`.
pub fn write_edge_list<W: Write>(net: &ConductanceNetwork, w: W) -> Result<(), IoError> {
    write_rows(w, net.edges().iter().map(|e| EdgeRow { u: e.u, v: e.v, conductance: e.conductance }))
}

/// Node count is one more than the largest index unless `n_nodes` says otherwise.
pub fn read_edge_list<R: Read>(r: R, n_nodes: Option<usize>) -> Result<ConductanceNetwork, IoError> {
    let rows: Vec<EdgeRow> = read_rows(r)?;
    let n = n_nodes.unwrap_or_else(|| rows.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0));
    Ok(ConductanceNetwork::new(n, rows.into_iter().map(|e| (e.u, e.v, e.conductance)).collect())?)
}

/// `node,voltage`.
pub fn write_voltages<W: Write>(voltages: &[f64], w: W) -> Result<(), IoError> {
    write_rows(w, voltages.iter().enumerate().map(|(node, &voltage)| VoltageRow { node, voltage }))
}

/// `r,R_eff,p_esc`.
pub fn write_polya_series<W: Write>(points: &[PolyaPoint], w: W) -> Result<(), IoError> {
    write_rows(w, points.iter().map(|p| PolyaRow { r: p.radius, r_eff: p.r_eff, p_esc: p.p_esc }))
}

/// `parameter,mean,stderr,n`.
pub fn write_curve<W: Write>(curve: &ConductivityCurve, w: W) -> Result<(), IoError> {
    write_rows(
        w,
        curve.points.iter().map(|p| CurveRow {
            parameter: p.parameter,
            mean: p.conductance.mean,
            stderr: p.conductance.std_error,
            n: p.conductance.n,
        }),
    )
}
