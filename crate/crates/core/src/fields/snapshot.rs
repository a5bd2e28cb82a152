//! Field snapshot files.
//!
//! Layout: one ASCII header line `STRATA1 nx ny nz parity time tau\n`
//! followed by `nx·ny·nz` little-endian `f64` samples in `[x][y][z]` order
//! (z fastest).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid, Parity};

pub const MAGIC: &str = "STRATA1";

/// A field with its time stamp and aspect ratio.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub field: Field,
    pub time: f64,
    pub tau: f64,
}

pub fn write_snapshot<W: Write>(mut out: W, field: &Field, time: f64, tau: f64) -> Result<()> {
    let g = field.grid();
    writeln!(
        out,
        "{MAGIC} {} {} {} {} {time} {tau}",
        g.nx(),
        g.ny(),
        g.nz(),
        field.parity()
    )?;
    let mut bytes = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&bytes)?;
    Ok(())
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Snapshot(msg.into())
}

pub fn read_snapshot<R: BufRead>(mut input: R) -> Result<Snapshot> {
    let mut header = String::new();
    input.read_line(&mut header)?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 7 || parts[0] != MAGIC {
        return Err(bad(format!("malformed header `{}`", header.trim_end())));
    }
    let dim = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("bad dimension `{s}`")));
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number `{s}`")));
    let grid = Grid::new(dim(parts[1])?, dim(parts[2])?, dim(parts[3])?)?;
    let parity: Parity = parts[4].parse()?;
    let time = num(parts[5])?;
    let tau = num(parts[6])?;

    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * grid.len() {
        return Err(bad(format!(
            "expected {} samples, found {} bytes",
            grid.len(),
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
        .collect();
    Ok(Snapshot {
        field: Field::new(&grid, values, parity)?,
        time,
        tau,
    })
}

pub fn save(path: impl AsRef<Path>, field: &Field, time: f64, tau: f64) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_snapshot(&mut out, field, time, tau)?;
    out.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Snapshot> {
    read_snapshot(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid::new(4, 6, 8).unwrap();
        let f = Field::from_fn(&g, Parity::Odd, |x, y, z| (x * 1.1).sin() * y.cos() * z);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.125, 0.05).unwrap();
        let s = read_snapshot(&buf[..]).unwrap();
        assert_eq!(s.field.values(), f.values());
        assert_eq!(s.field.parity(), Parity::Odd);
        assert_eq!((s.time, s.tau), (0.125, 0.05));
        assert!(buf.starts_with(b"STRATA1 4 6 8 odd 0.125 0.05\n"));
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let g = Grid::new(4, 4, 4).unwrap();
        let f = Field::zeros(&g, Parity::Even);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.0, 1.0).unwrap();
        buf.truncate(buf.len() - 8);
        assert!(matches!(read_snapshot(&buf[..]), Err(Error::Snapshot(_))));
        assert!(read_snapshot(&b"STRATA2 4 4 4 even 0 1\n"[..]).is_err());
    }
}
