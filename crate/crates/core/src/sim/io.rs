//! Comma-separated text for truth logs and scans.
//!
//! Truth rows are `scan,id,x,y,vx,vy`; observation rows are `scan,source,x,y`
//! with `source = -1` for clutter. Scans are numbered from 1.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::measure::{Measurement, ScanData};
use super::truth::{TruthLog, TruthState};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct TruthRow {
    scan: usize,
    id: u32,
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
}

#[derive(Serialize, Deserialize)]
struct ScanRow {
    scan: usize,
    source: i64,
    x: f64,
    y: f64,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

pub fn write_truth<W: Write>(truth: &TruthLog, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (k, scan) in truth.scans.iter().enumerate() {
        for o in scan {
            let [x, y, vx, vy] = o.state;
            w.serialize(TruthRow { scan: k + 1, id: o.id, x, y, vx, vy }).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

/// `duration` fixes the number of scans, since trailing scans may be empty.
pub fn read_truth<R: Read>(input: R, duration: usize) -> Result<TruthLog> {
    let mut scans = vec![Vec::new(); duration];
    for row in csv::Reader::from_reader(input).deserialize() {
        let r: TruthRow = row.map_err(io_err)?;
        if r.scan == 0 || r.scan > duration {
            return Err(Error::Config(format!("scan {} outside 1..={duration}", r.scan)));
        }
        scans[r.scan - 1].push(TruthState { id: r.id, state: [r.x, r.y, r.vx, r.vy] });
    }
    Ok(TruthLog { scans })
}

pub fn write_scans<W: Write>(scans: &[ScanData], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (k, scan) in scans.iter().enumerate() {
        for m in &scan.measurements {
            let source = m.source.map_or(-1, i64::from);
            w.serialize(ScanRow { scan: k + 1, source, x: m.position[0], y: m.position[1] }).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

pub fn read_scans<R: Read>(input: R, duration: usize) -> Result<Vec<ScanData>> {
    let mut scans = vec![ScanData::default(); duration];
    for row in csv::Reader::from_reader(input).deserialize() {
        let r: ScanRow = row.map_err(io_err)?;
        if r.scan == 0 || r.scan > duration {
            return Err(Error::Config(format!("scan {} outside 1..={duration}", r.scan)));
        }
        let source = if r.source < 0 { None } else { Some(r.source as u32) };
        scans[r.scan - 1].measurements.push(Measurement { position: [r.x, r.y], source });
    }
    Ok(scans)
}
