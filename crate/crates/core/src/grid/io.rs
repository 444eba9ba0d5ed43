//! Flat binary and CSV persistence of grid fields.
//!
//! Binary layout: 32-byte header (8-byte magic, `N` as u64, `L` as f64, flags as u64) then
//! `N*N` little-endian f64 values in row-major order. Flag bit 0 marks Dirichlet; bits 1 and 2
//! mark odd parity along axis 0 and axis 1.

use std::io::{Read, Write};

use super::{BoxSpec, Boundary, GridField, Parity};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const GRID_MAGIC: [u8; 8] = *b"PAMGRID1";

fn flags<T: Real>(field: &GridField<T>) -> u64 {
    let mut flags = 0;
    if field.spec().boundary() == Boundary::Dirichlet {
        flags |= 1;
    }
    for (axis, p) in field.parity().iter().enumerate() {
        if *p == Parity::Odd {
            flags |= 2 << axis;
        }
    }
    flags
}

pub fn write_grid_binary<T: Real>(field: &GridField<T>, mut out: impl Write) -> Result<()> {
    let spec = field.spec();
    out.write_all(&GRID_MAGIC)?;
    out.write_all(&(spec.points() as u64).to_le_bytes())?;
    out.write_all(&spec.side().to_le_bytes())?;
    out.write_all(&flags(field).to_le_bytes())?;
    let mut bytes = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        bytes.extend_from_slice(&v.widen().to_le_bytes());
    }
    out.write_all(&bytes)?;
    Ok(())
}

pub fn read_grid_binary(mut input: impl Read) -> Result<GridField<f64>> {
    let mut header = [0u8; 32];
    input.read_exact(&mut header)?;
    if header[..8] != GRID_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let word = |k: usize| <[u8; 8]>::try_from(&header[8 * k..8 * k + 8]).expect("8 bytes");
    let points = usize::try_from(u64::from_le_bytes(word(1))).map_err(|_| Error::Format("N too large".into()))?;
    let side = f64::from_le_bytes(word(2));
    let flags = u64::from_le_bytes(word(3));
    let boundary = if flags & 1 == 1 { Boundary::Dirichlet } else { Boundary::Neumann };
    let parity = [0, 1].map(|axis| if flags & (2 << axis) != 0 { Parity::Odd } else { Parity::Even });
    let spec = BoxSpec::new(side, points, boundary)?;
    let mut bytes = vec![0u8; 8 * spec.len()];
    input.read_exact(&mut bytes)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    GridField::with_parity(spec, parity, values)
}

/// CSV with header `i,j,x1,x2,value`; values printed with 17 significant digits.
pub fn write_grid_csv<T: Real>(field: &GridField<T>, mut out: impl Write) -> Result<()> {
    let spec = field.spec();
    let n = spec.points();
    writeln!(out, "i,j,x1,x2,value")?;
    for i in 0..n {
        for j in 0..n {
            writeln!(
                out,
                "{i},{j},{:.16e},{:.16e},{:.16e}",
                spec.coordinate(i),
                spec.coordinate(j),
                field.at(i, j).widen()
            )?;
        }
    }
    Ok(())
}
