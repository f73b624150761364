//! Binary state dumps: 16-byte header then little-endian `(re, im)` pairs.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::linalg::C64;

use super::StateVector;

pub const MAGIC: &[u8; 4] = b"DQSV";
pub const VERSION: u32 = 1;

pub fn write_state<W: Write>(mut w: W, state: &StateVector) -> Result<()> {
    let mut header = [0u8; 16];
    header[..4].copy_from_slice(MAGIC);
    header[4..8].copy_from_slice(&VERSION.to_le_bytes());
    header[8..12].copy_from_slice(&(state.num_qubits() as u32).to_le_bytes());
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(state.dim() * 16);
    for a in state.amplitudes() {
        buf.extend_from_slice(&a.re.to_le_bytes());
        buf.extend_from_slice(&a.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Returns the qubit count and amplitudes of a dump.
pub fn read_state<R: Read>(mut r: R) -> Result<(usize, Vec<C64>)> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[..4] != MAGIC {
        return Err(Error::Shape("not a DQSV state dump".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Shape(format!("unsupported dump version {version}")));
    }
    let n = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    crate::caps::check_qubits("state dump", n)?;
    let mut body = vec![0u8; (1usize << n) * 16];
    r.read_exact(&mut body)?;
    let amps = body
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok((n, amps))
}
