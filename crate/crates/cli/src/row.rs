//! Result rows and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use dqsim_core::{Error, Result};

/// One experiment's measurements. Columns serialize in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub protocol: String,
    pub gamma: Option<usize>,
    pub n: Option<usize>,
    pub edges: Option<usize>,
    pub t: Option<f64>,
    pub epsilon: Option<f64>,
    pub steps_or_queries: Option<u64>,
    pub qcomm_qubits: Option<u64>,
    pub ccomm_bits: Option<u64>,
    pub rounds: Option<u64>,
    pub predicted_cost: Option<f64>,
    pub error_vs_exact: Option<f64>,
    pub wall_ms: u64,
    pub seed: u64,
    /// `ok`, or the error that stopped the row.
    pub status: String,
}

impl ResultRow {
    pub fn failed(protocol: &str, seed: u64, err: &Error) -> Self {
        Self {
            protocol: protocol.into(),
            seed,
            status: format!("error: {err}"),
            ..Self::default()
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub const COLUMNS: [&str; 15] = [
    "protocol",
    "gamma",
    "n",
    "edges",
    "t",
    "epsilon",
    "steps_or_queries",
    "qcomm_qubits",
    "ccomm_bits",
    "rounds",
    "predicted_cost",
    "error_vs_exact",
    "wall_ms",
    "seed",
    "status",
];

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Writes the header, then every row.
pub fn write_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Numerical(e.to_string()))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_error)?.iter().map(String::from).collect();
    if header != COLUMNS {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}
