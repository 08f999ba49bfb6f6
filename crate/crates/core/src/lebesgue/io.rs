//! Serialization of [`GridFunction`]s.
//!
//! Binary layout (all little-endian):
//!
//! | bytes | content                                  |
//! |-------|------------------------------------------|
//! | 4     | magic `LPGF`                             |
//! | 1     | format version (1)                       |
//! | 1     | dimension (1 or 2)                       |
//! | 1     | 1 if complex, else 0                     |
//! | 1     | reserved, zero                           |
//! | 4     | points per axis, `u32`                   |
//! | 8*dim | axis lengths, `f64`                      |
//! | ...   | values; complex values as `(re, im)` pairs |
//!
//! The text format is a `key = value` header (`dimension`, `points`,
//! `lengths`, `complex`), a line `values`, then one value per line
//! (`re im` for complex data).

use std::io::{BufRead, Read, Write};

use super::{Grid, GridFunction, Scalar};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"LPGF";
const VERSION: u8 = 1;

pub fn write_binary<T: Scalar, W: Write>(f: &GridFunction<T>, mut out: W) -> Result<()> {
    let g = f.grid();
    out.write_all(MAGIC)?;
    out.write_all(&[VERSION, g.dim() as u8, T::IS_COMPLEX as u8, 0])?;
    out.write_all(&(g.points() as u32).to_le_bytes())?;
    for l in g.lengths() {
        out.write_all(&l.to_le_bytes())?;
    }
    for v in f.values() {
        out.write_all(&v.re().to_le_bytes())?;
        if T::IS_COMPLEX {
            out.write_all(&v.im().to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_binary<T: Scalar, R: Read>(mut input: R) -> Result<GridFunction<T>> {
    let mut head = [0u8; 12];
    input.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(Error::Parse("missing grid function magic bytes".into()));
    }
    if head[4] != VERSION {
        return Err(Error::Parse(format!("unsupported format version {}", head[4])));
    }
    let dim = head[5] as usize;
    let complex = head[6] != 0;
    if complex != T::IS_COMPLEX {
        return Err(Error::Parse(format!(
            "stored data is {}, requested {}",
            if complex { "complex" } else { "real" },
            if T::IS_COMPLEX { "complex" } else { "real" }
        )));
    }
    let points = u32::from_le_bytes(head[8..12].try_into().expect("4 bytes")) as usize;
    let lengths = (0..dim.min(2)).map(|_| read_f64(&mut input)).collect::<Result<Vec<_>>>()?;
    let grid = Grid::new(dim, points, &lengths)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = read_f64(&mut input)?;
        let im = if complex { read_f64(&mut input)? } else { 0.0 };
        values.push(T::from_parts(re, im));
    }
    GridFunction::new(grid, values)
}

pub fn write_text<T: Scalar, W: Write>(f: &GridFunction<T>, mut out: W) -> Result<()> {
    let g = f.grid();
    writeln!(out, "dimension = {}", g.dim())?;
    writeln!(out, "points = {}", g.points())?;
    let lengths: Vec<String> = g.lengths().iter().map(|l| format!("{l:e}")).collect();
    writeln!(out, "lengths = {}", lengths.join(" "))?;
    writeln!(out, "complex = {}", T::IS_COMPLEX)?;
    writeln!(out, "values")?;
    for v in f.values() {
        if T::IS_COMPLEX {
            writeln!(out, "{:e} {:e}", v.re(), v.im())?;
        } else {
            writeln!(out, "{:e}", v.re())?;
        }
    }
    Ok(())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

pub fn read_text<T: Scalar, R: BufRead>(input: R) -> Result<GridFunction<T>> {
    let mut lines = input.lines();
    let (mut dim, mut points, mut lengths, mut complex) = (None, None, None, None);
    loop {
        let line = lines.next().ok_or_else(|| Error::Parse("missing values section".into()))??;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "values" {
            break;
        }
        let (key, val) = line.split_once('=').ok_or_else(|| Error::Parse(format!("malformed header line {line:?}")))?;
        let val = val.trim();
        match key.trim() {
            "dimension" => dim = Some(parse_f64(val)? as usize),
            "points" => points = Some(parse_f64(val)? as usize),
            "lengths" => lengths = Some(val.split_whitespace().map(parse_f64).collect::<Result<Vec<_>>>()?),
            "complex" => {
                complex = Some(val.parse::<bool>().map_err(|_| Error::Parse(format!("bad complex flag {val:?}")))?)
            }
            other => return Err(Error::Parse(format!("unknown header key {other:?}"))),
        }
    }
    let missing = |k: &str| Error::Parse(format!("header lacks {k}"));
    let grid = Grid::new(
        dim.ok_or_else(|| missing("dimension"))?,
        points.ok_or_else(|| missing("points"))?,
        &lengths.ok_or_else(|| missing("lengths"))?,
    )?;
    if complex.unwrap_or(false) != T::IS_COMPLEX {
        return Err(Error::Parse("real/complex flag does not match requested type".into()));
    }
    let mut values = Vec::with_capacity(grid.len());
    for line in lines {
        let line = line?;
        let mut parts = line.split_whitespace();
        let Some(re) = parts.next() else { continue };
        let im = if T::IS_COMPLEX {
            parse_f64(parts.next().ok_or_else(|| Error::Parse("missing imaginary part".into()))?)?
        } else {
            0.0
        };
        values.push(T::from_parts(parse_f64(re)?, im));
    }
    GridFunction::new(grid, values)
}
