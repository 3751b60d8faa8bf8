//! Binary field snapshots.
//!
//! Layout (all little-endian):
//!
//! ```text
//! magic   8 bytes  b"HZLBFLD1"
//! n       u32
//! G       u32
//! L       f64
//! domain  u8       0 = space, 1 = frequency
//! values  G^n × (re f64, im f64), axis 0 fastest
//! ```

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{Domain, Grid, SampledField};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"HZLBFLD1";

pub fn write_snapshot<W: Write>(field: &SampledField, mut out: W) -> Result<()> {
    let grid = field.grid();
    out.write_all(MAGIC)?;
    out.write_all(&(grid.n() as u32).to_le_bytes())?;
    out.write_all(&(grid.points() as u32).to_le_bytes())?;
    out.write_all(&grid.period().to_le_bytes())?;
    out.write_all(&[match field.domain() {
        Domain::Space => 0,
        Domain::Frequency => 1,
    }])?;
    let mut buf = Vec::with_capacity(16 * field.values().len());
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<SampledField> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a field snapshot".into()));
    }
    let mut u = [0u8; 4];
    input.read_exact(&mut u)?;
    let n = u32::from_le_bytes(u) as usize;
    input.read_exact(&mut u)?;
    let g = u32::from_le_bytes(u) as usize;
    let mut f = [0u8; 8];
    input.read_exact(&mut f)?;
    let period = f64::from_le_bytes(f);
    let mut d = [0u8; 1];
    input.read_exact(&mut d)?;
    let domain = match d[0] {
        0 => Domain::Space,
        1 => Domain::Frequency,
        other => return Err(Error::Format(format!("unknown domain flag {other}"))),
    };
    let grid = Grid::new(n, period, g)?;
    let mut raw = vec![0u8; 16 * grid.len()];
    input.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    SampledField::from_values(grid, values, domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_field, spectral_transform, Direction};

    #[test]
    fn roundtrip_bytes() {
        let f = make_field(2, 4.0, 8, |x| Complex64::new(x[0], -x[1] * 0.5)).unwrap();
        let spec = spectral_transform(&f, Direction::Forward).unwrap();
        for field in [f, spec] {
            let mut buf = Vec::new();
            write_snapshot(&field, &mut buf).unwrap();
            assert_eq!(buf.len(), 8 + 4 + 4 + 8 + 1 + 16 * 64);
            let back = read_snapshot(buf.as_slice()).unwrap();
            assert_eq!(back, field);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_snapshot(&b"NOTAFILE0000"[..]).is_err());
        let f = make_field(1, 8.0, 8, |_| Complex64::new(1.0, 0.0)).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&f, &mut buf).unwrap();
        buf.truncate(buf.len() - 1);
        assert!(read_snapshot(buf.as_slice()).is_err());
    }
}
