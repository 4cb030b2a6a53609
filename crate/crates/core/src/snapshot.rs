//! Field snapshot persistence. Binary layout, little-endian throughout:
//!
//! ```text
//! offset  size  content
//! 0       4     magic bytes "GZK1"
//! 4       8     nx (u64)
//! 12      8     ny (u64)
//! 20      8     Lx (f64)
//! 28      8     Ly (f64)
//! 36      8     time stamp (f64)
//! 44      1     representation flag: 0 physical, 1 spectral
//! 45      ...   nx*ny complex samples, row-major in x (x slow, y fast),
//!               each as two f64: (re, im)
//! ```

use crate::error::{GzkError, Result};
use crate::field::{Field, Representation};
use crate::grid::make_grid;
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rustfft::num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"GZK1";

pub fn write_snapshot(mut w: impl Write, f: &Field, time: f64) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_u64::<LittleEndian>(g.nx() as u64)?;
    w.write_u64::<LittleEndian>(g.ny() as u64)?;
    w.write_f64::<LittleEndian>(g.lx())?;
    w.write_f64::<LittleEndian>(g.ly())?;
    w.write_f64::<LittleEndian>(time)?;
    w.write_u8(match f.representation() {
        Representation::Physical => 0,
        Representation::Spectral => 1,
    })?;
    for z in f.data() {
        w.write_f64::<LittleEndian>(z.re)?;
        w.write_f64::<LittleEndian>(z.im)?;
    }
    Ok(())
}

pub fn read_snapshot(mut r: impl Read) -> Result<(Field, f64)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(GzkError::Snapshot(format!(
            "bad magic {magic:02x?}, expected {MAGIC:02x?}"
        )));
    }
    let nx = r.read_u64::<LittleEndian>()? as usize;
    let ny = r.read_u64::<LittleEndian>()? as usize;
    if nx > 1 << 20 || ny > 1 << 20 {
        return Err(GzkError::Snapshot(format!(
            "implausible dimensions {nx} x {ny}"
        )));
    }
    let lx = r.read_f64::<LittleEndian>()?;
    let ly = r.read_f64::<LittleEndian>()?;
    let time = r.read_f64::<LittleEndian>()?;
    let repr = match r.read_u8()? {
        0 => Representation::Physical,
        1 => Representation::Spectral,
        other => {
            return Err(GzkError::Snapshot(format!(
                "unknown representation flag {other}"
            )))
        }
    };
    let grid = make_grid(nx, ny, lx, ly).map_err(|e| GzkError::Snapshot(e.to_string()))?;
    let mut data = Vec::with_capacity(nx * ny);
    for _ in 0..nx * ny {
        let re = r.read_f64::<LittleEndian>()?;
        let im = r.read_f64::<LittleEndian>()?;
        data.push(Complex64::new(re, im));
    }
    Ok((Field::from_data(&grid, repr, data)?, time))
}

pub fn save_snapshot(path: impl AsRef<Path>, f: &Field, time: f64) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_snapshot(std::io::BufWriter::new(file), f, time)
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<(Field, f64)> {
    let file = std::fs::File::open(path)?;
    read_snapshot(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::band_limited_field;
    use std::f64::consts::PI;

    #[test]
    fn round_trip_both_representations() {
        let g = make_grid(32, 16, 2.0 * PI, 4.0 * PI).unwrap();
        let f = band_limited_field(&g, 5, 4).unwrap();
        for field in [f.to_physical().unwrap(), f.spectral().unwrap()] {
            let mut buf = Vec::new();
            write_snapshot(&mut buf, &field, 1.25).unwrap();
            let (back, t) = read_snapshot(buf.as_slice()).unwrap();
            assert_eq!(t, 1.25);
            assert_eq!(back.representation(), field.representation());
            assert_eq!(back.grid(), field.grid());
            assert_eq!(back.data(), field.data());
        }
    }

    #[test]
    fn rejects_corrupt_headers() {
        let g = make_grid(16, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let f = band_limited_field(&g, 1, 3).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.0).unwrap();
        // wrong magic
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_snapshot(bad.as_slice()),
            Err(GzkError::Snapshot(_))
        ));
        // implausible dimension
        let mut bad = buf.clone();
        bad[4..12].copy_from_slice(&(u64::MAX).to_le_bytes());
        assert!(read_snapshot(bad.as_slice()).is_err());
        // bad representation flag
        let mut bad = buf.clone();
        bad[44] = 7;
        assert!(read_snapshot(bad.as_slice()).is_err());
        // truncated payload
        let bad = &buf[..buf.len() - 8];
        assert!(read_snapshot(bad).is_err());
    }
}
