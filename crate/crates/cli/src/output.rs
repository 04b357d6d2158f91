//! Records CSV, binary snapshots and the summary file.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use chns_core::diagnostics::EnergyRecord;
use chns_core::solver::{Observer, SimState};
use chns_core::ChnsError;
use serde::Serialize;

use crate::error::CliError;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"CHNS0001";
pub const HEADER_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldTag {
    Phi = 0,
    Mu = 1,
    Pressure = 2,
    Ux = 3,
    Uy = 4,
}

impl FieldTag {
    pub const ALL: [FieldTag; 5] = [
        FieldTag::Phi,
        FieldTag::Mu,
        FieldTag::Pressure,
        FieldTag::Ux,
        FieldTag::Uy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FieldTag::Phi => "phi",
            FieldTag::Mu => "mu",
            FieldTag::Pressure => "p",
            FieldTag::Ux => "ux",
            FieldTag::Uy => "uy",
        }
    }

    pub fn from_u64(v: u64) -> Option<Self> {
        Self::ALL.into_iter().find(|t| *t as u64 == v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    /// Number of stored rows (`ny + 1` for `uy`).
    pub ny: usize,
    pub tag: FieldTag,
    pub t: f64,
    pub values: Vec<f64>,
}

pub fn encode_snapshot(s: &Snapshot) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * s.values.len());
    buf.extend_from_slice(SNAPSHOT_MAGIC);
    buf.extend_from_slice(&(s.nx as u64).to_le_bytes());
    buf.extend_from_slice(&(s.ny as u64).to_le_bytes());
    buf.extend_from_slice(&(s.tag as u64).to_le_bytes());
    buf.extend_from_slice(&s.t.to_le_bytes());
    buf.resize(HEADER_LEN, 0);
    for v in &s.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot, String> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != SNAPSHOT_MAGIC {
        return Err("not a snapshot file".into());
    }
    let word = |k: usize| u64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    let (nx, ny) = (word(1) as usize, word(2) as usize);
    let tag = FieldTag::from_u64(word(3)).ok_or("unknown field tag")?;
    let t = f64::from_bits(word(4));
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * nx * ny {
        return Err(format!("expected {} values, found {} bytes", nx * ny, body.len()));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(Snapshot { nx, ny, tag, t, values })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, CliError> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| CliError::io(path, e))?;
    decode_snapshot(&bytes).map_err(|m| CliError::Parse(format!("{}: {m}", path.display())))
}

pub fn state_snapshots(state: &SimState) -> Vec<Snapshot> {
    let g = state.phi.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mk = |tag, rows, values: &[f64]| Snapshot {
        nx,
        ny: rows,
        tag,
        t: state.t,
        values: values.to_vec(),
    };
    vec![
        mk(FieldTag::Phi, ny, state.phi.values()),
        mk(FieldTag::Mu, ny, state.mu.values()),
        mk(FieldTag::Pressure, ny, state.p.values()),
        mk(FieldTag::Ux, ny, state.u.ux()),
        mk(FieldTag::Uy, ny + 1, state.u.uy()),
    ]
}

/// Writes every field of `state` as `<dir>/<field>_<label>.bin`.
pub fn write_state(dir: &Path, label: &str, state: &SimState) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for s in state_snapshots(state) {
        let path = dir.join(format!("{}_{label}.bin", s.tag.name()));
        std::fs::write(&path, encode_snapshot(&s)).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

/// Streams records to CSV (flushed per row) and writes periodic snapshots.
pub struct RunWriter {
    csv: BufWriter<File>,
    csv_path: PathBuf,
    snap_dir: PathBuf,
    snapshot_every: usize,
    failure: Option<CliError>,
}

impl RunWriter {
    pub fn create(dir: &Path, snapshot_every: usize) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let csv_path = dir.join("records.csv");
        let file = File::create(&csv_path).map_err(|e| CliError::io(&csv_path, e))?;
        let mut csv = BufWriter::new(file);
        writeln!(csv, "{}", EnergyRecord::CSV_HEADER)
            .and_then(|_| csv.flush())
            .map_err(|e| CliError::io(&csv_path, e))?;
        Ok(Self {
            csv,
            csv_path,
            snap_dir: dir.join("snapshots"),
            snapshot_every,
            failure: None,
        })
    }

    /// The I/O error that stopped the run, if any.
    pub fn take_failure(&mut self) -> Option<CliError> {
        self.failure.take()
    }

    fn write(&mut self, state: &SimState, record: &EnergyRecord) -> Result<(), CliError> {
        writeln!(self.csv, "{}", record.csv_row())
            .and_then(|_| self.csv.flush())
            .map_err(|e| CliError::io(&self.csv_path, e))?;
        if self.snapshot_every > 0 && state.step.is_multiple_of(self.snapshot_every as u64) {
            write_state(&self.snap_dir, &format!("{:08}", state.step), state)?;
        }
        Ok(())
    }
}

impl Observer for RunWriter {
    fn on_record(&mut self, state: &SimState, record: &EnergyRecord) -> chns_core::Result<()> {
        self.write(state, record).map_err(|e| {
            let msg = e.to_string();
            self.failure = Some(e);
            ChnsError::InvalidParameter(msg)
        })
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Re-reads a records CSV and returns the rows that break additivity.
pub fn validate_records(path: &Path) -> Result<(usize, Vec<usize>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != EnergyRecord::CSV_HEADER {
        return Err(CliError::Parse(format!("{}: unexpected header", path.display())));
    }
    let mut bad = Vec::new();
    let mut n = 0;
    for (k, line) in lines.enumerate() {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Parse(format!("{} row {}: {e}", path.display(), k + 1)))?;
        if cols.len() != 13 {
            return Err(CliError::Parse(format!(
                "{} row {}: expected 13 columns",
                path.display(),
                k + 1
            )));
        }
        let (kin, int, bulk, total) = (cols[1], cols[2], cols[3], cols[4]);
        let sum = kin + int + bulk;
        if (total - sum).abs() > 1e-12 * sum.abs().max(1.0) {
            bad.push(k + 1);
        }
        n += 1;
    }
    Ok((n, bad))
}
