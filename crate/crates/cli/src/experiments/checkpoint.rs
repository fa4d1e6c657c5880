//! Line-delimited grid checkpoints.
//!
//! Line 1 is a header object carrying the full spec:
//! `{"spec": <GridSpec>}`. Every following line is one record per
//! completed `(cell, method)`:
//!
//! ```text
//! {"spec_hash":…,"a_index":…,"b_index":…,"method":"…","successes":…,"reps_done":…,"sum_miscls":…}
//! ```
//!
//! `spec_hash` is the FNV-1a 64-bit hash of the spec's canonical text; a
//! record whose hash does not match the header is rejected, which is what
//! makes an edited checkpoint fail loudly instead of resuming wrongly.
//! Floats round-trip exactly through the JSON encoding.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::spec::{GridSpec, Method, MethodTally};
use crate::HarnessError;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    spec: GridSpec,
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    spec_hash: u64,
    a_index: usize,
    b_index: usize,
    method: Method,
    successes: u32,
    reps_done: u32,
    sum_miscls: f64,
}

/// Serialized writer used by the engine's coordinating thread.
pub struct Writer {
    path: PathBuf,
    out: BufWriter<File>,
}

impl Writer {
    /// Creates a fresh checkpoint with a header line. Refuses to clobber
    /// an existing file: an interrupted run must be resumed, not rerun.
    pub fn create(path: &Path, spec: &GridSpec) -> Result<Self, HarnessError> {
        if path.exists() {
            return Err(HarnessError::Other(format!(
                "checkpoint {} already exists; resume it instead",
                path.display()
            )));
        }
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
            }
        }
        let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
        let mut writer = Writer {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        };
        let header = serde_json::to_string(&Header { spec: spec.clone() })
            .map_err(|e| HarnessError::Other(e.to_string()))?;
        writer.write_line(&header)?;
        Ok(writer)
    }

    /// Opens an existing checkpoint for appending records.
    pub fn append(path: &Path) -> Result<Self, HarnessError> {
        let file = OpenOptions::new()
            .append(true)
            .open(path)
            .map_err(|e| HarnessError::io(path, e))?;
        Ok(Writer {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    /// Appends one record per method and flushes, so the file is valid
    /// after every completed cell.
    pub fn record_cell(
        &mut self,
        spec: &GridSpec,
        cell_index: usize,
        tallies: &[MethodTally],
    ) -> Result<(), HarnessError> {
        let (a_index, b_index) = spec.cell_coords(cell_index);
        let hash = spec.spec_hash();
        for (method, tally) in spec.methods.iter().zip(tallies) {
            let record = Record {
                spec_hash: hash,
                a_index,
                b_index,
                method: *method,
                successes: tally.successes,
                reps_done: tally.reps_done,
                sum_miscls: tally.sum_miscls,
            };
            let line =
                serde_json::to_string(&record).map_err(|e| HarnessError::Other(e.to_string()))?;
            self.write_line(&line)?;
        }
        self.out
            .flush()
            .map_err(|e| HarnessError::io(&self.path, e))
    }

    fn write_line(&mut self, line: &str) -> Result<(), HarnessError> {
        self.out
            .write_all(line.as_bytes())
            .and_then(|_| self.out.write_all(b"\n"))
            .map_err(|e| HarnessError::io(&self.path, e))
    }
}

/// Fully parsed checkpoint: the spec and every completed cell.
pub struct Loaded {
    pub spec: GridSpec,
    pub cells: Vec<(usize, Vec<MethodTally>)>,
}

/// Reads and validates a checkpoint file.
pub fn read(path: &Path) -> Result<Loaded, HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let (_, header_line) = lines.next().ok_or(HarnessError::CorruptCheckpoint {
        line: 1,
        message: "empty file".into(),
    })?;
    let header_line = header_line.map_err(|e| HarnessError::io(path, e))?;
    let header: Header =
        serde_json::from_str(&header_line).map_err(|e| HarnessError::CorruptCheckpoint {
            line: 1,
            message: format!("bad header: {e}"),
        })?;
    header.spec.validate()?;
    let spec = header.spec;
    let expected_hash = spec.spec_hash();

    // (cell, method slot) -> tally, detecting duplicates
    let mut table: BTreeMap<(usize, usize), MethodTally> = BTreeMap::new();
    for (index, line) in lines {
        let line_no = index + 1;
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&line).map_err(|e| HarnessError::CorruptCheckpoint {
                line: line_no,
                message: e.to_string(),
            })?;
        if record.spec_hash != expected_hash {
            return Err(HarnessError::SpecHashMismatch {
                expected: expected_hash,
                found: record.spec_hash,
            });
        }
        if record.a_index >= spec.a_grid.len() || record.b_index >= spec.b_grid.len() {
            return Err(HarnessError::CorruptCheckpoint {
                line: line_no,
                message: "cell index out of range".into(),
            });
        }
        if record.reps_done != spec.reps || record.successes > record.reps_done {
            return Err(HarnessError::CorruptCheckpoint {
                line: line_no,
                message: "tally inconsistent with spec".into(),
            });
        }
        let slot = spec
            .methods
            .iter()
            .position(|m| *m == record.method)
            .ok_or(HarnessError::CorruptCheckpoint {
                line: line_no,
                message: format!("method {} not in spec", record.method.name()),
            })?;
        let cell = spec.cell_index(record.a_index, record.b_index);
        let tally = MethodTally {
            successes: record.successes,
            reps_done: record.reps_done,
            sum_miscls: record.sum_miscls,
        };
        if table.insert((cell, slot), tally).is_some() {
            return Err(HarnessError::CorruptCheckpoint {
                line: line_no,
                message: "duplicate (cell, method) record".into(),
            });
        }
    }

    // keep only cells with a record for every method
    let method_count = spec.methods.len();
    let mut cells = Vec::new();
    let mut cell_ids: Vec<usize> = table.keys().map(|&(c, _)| c).collect();
    cell_ids.dedup();
    for cell in cell_ids {
        let tallies: Vec<MethodTally> = (0..method_count)
            .filter_map(|slot| table.get(&(cell, slot)).copied())
            .collect();
        if tallies.len() == method_count {
            cells.push((cell, tallies));
        }
    }
    Ok(Loaded { spec, cells })
}
