use std::io::{self, Read, Write};

use super::{FieldError, GridSpec, ScalarField};

pub const FIELD_MAGIC: [u8; 4] = *b"ACSF";

#[derive(Debug, thiserror::Error)]
pub enum FieldFormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad magic bytes {0:?}")]
    BadMagic([u8; 4]),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Writes the 16-byte header (`ACSF`, `n`, eight reserved zero bytes) followed by little-endian `f64` values.
pub fn write_binary<W: Write>(u: &ScalarField, mut w: W) -> io::Result<()> {
    let n = u32::try_from(u.grid().n())
        .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "grid too large"))?;
    w.write_all(&FIELD_MAGIC)?;
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&[0u8; 8])?;
    let mut buf = Vec::with_capacity(8 * u.values().len());
    for v in u.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()
}

/// Reads a field written by [`write_binary`]; the side length is not stored and must be supplied.
pub fn read_binary<R: Read>(mut r: R, length: f64) -> Result<ScalarField, FieldFormatError> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    let magic: [u8; 4] = header[0..4].try_into().expect("slice of length 4");
    if magic != FIELD_MAGIC {
        return Err(FieldFormatError::BadMagic(magic));
    }
    let n = u32::from_le_bytes(header[4..8].try_into().expect("slice of length 4")) as usize;
    let grid = GridSpec::new(n, length)?;
    let mut bytes = vec![0u8; 8 * grid.len()];
    r.read_exact(&mut bytes)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of length 8")))
        .collect();
    Ok(ScalarField::from_values(grid, values)?)
}

/// One CSV row per grid row, shortest round-trip decimal formatting.
pub fn write_csv<W: Write>(u: &ScalarField, mut w: W) -> io::Result<()> {
    let n = u.grid().n();
    for row in u.values().chunks_exact(n) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}
