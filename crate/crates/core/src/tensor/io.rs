//! Binary matrix format.
//!
//! Little-endian layout:
//!
//! ```text
//! magic  b"DMAT"
//! u32    version (1)
//! u8     kind (0 = general, 1 = density operator, 2 = projector)
//! u32    number of factors
//! per factor: u32 label length, UTF-8 label bytes, u64 dimension
//! u64    rows, u64 cols
//! rows * cols complex entries, row-major, each as f64 real then f64 imaginary
//! ```
//!
//! For density operators and projectors the matrix side equals the product of factor dimensions.

use super::FactorSpace;
use crate::error::{Error, Result};
use faer::{c64, Mat};

const MAGIC: &[u8; 4] = b"DMAT";
const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    General,
    Density,
    Projector,
}

#[derive(Clone, Debug)]
pub struct StoredMatrix {
    pub kind: MatrixKind,
    pub space: FactorSpace,
    pub matrix: Mat<c64>,
}

pub fn write_matrix(kind: MatrixKind, space: &FactorSpace, matrix: &Mat<c64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + 16 * matrix.nrows() * matrix.ncols());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(match kind {
        MatrixKind::General => 0,
        MatrixKind::Density => 1,
        MatrixKind::Projector => 2,
    });
    out.extend_from_slice(&(space.labels().len() as u32).to_le_bytes());
    for (l, d) in space.labels().iter().zip(space.dims()) {
        out.extend_from_slice(&(l.len() as u32).to_le_bytes());
        out.extend_from_slice(l.as_bytes());
        out.extend_from_slice(&(*d as u64).to_le_bytes());
    }
    out.extend_from_slice(&(matrix.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(matrix.ncols() as u64).to_le_bytes());
    for i in 0..matrix.nrows() {
        for j in 0..matrix.ncols() {
            out.extend_from_slice(&matrix[(i, j)].re.to_le_bytes());
            out.extend_from_slice(&matrix[(i, j)].im.to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| Error::Format(format!("truncated input at byte {}", self.pos)))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }
}

pub fn read_matrix(data: &[u8]) -> Result<StoredMatrix> {
    let mut c = Cursor { data, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let kind = match c.take(1)?[0] {
        0 => MatrixKind::General,
        1 => MatrixKind::Density,
        2 => MatrixKind::Projector,
        k => return Err(Error::Format(format!("unknown kind {k}"))),
    };
    let nf = c.u32()? as usize;
    // Each factor needs at least 12 bytes.
    if nf > c.remaining() / 12 {
        return Err(Error::Format("factor count exceeds input size".into()));
    }
    let mut factors = Vec::with_capacity(nf);
    for _ in 0..nf {
        let len = c.u32()? as usize;
        let label = std::str::from_utf8(c.take(len)?).map_err(|_| Error::Format("label is not UTF-8".into()))?.to_string();
        let dim = usize::try_from(c.u64()?).map_err(|_| Error::Format("dimension overflow".into()))?;
        factors.push((label, dim));
    }
    let space = FactorSpace::new(factors)?;
    let rows = usize::try_from(c.u64()?).map_err(|_| Error::Format("row count overflow".into()))?;
    let cols = usize::try_from(c.u64()?).map_err(|_| Error::Format("column count overflow".into()))?;
    let entries = rows.checked_mul(cols).ok_or_else(|| Error::Format("size overflow".into()))?;
    if entries.checked_mul(16) != Some(c.remaining()) {
        return Err(Error::Format("payload size does not match header".into()));
    }
    if kind != MatrixKind::General && (rows != space.dim() || cols != space.dim()) {
        return Err(Error::Dimension("matrix side differs from the factor space".into()));
    }
    let mut values = Vec::with_capacity(entries);
    for _ in 0..entries {
        let re = c.f64()?;
        let im = c.f64()?;
        values.push(c64::new(re, im));
    }
    let matrix = Mat::from_fn(rows, cols, |i, j| values[i * cols + j]);
    Ok(StoredMatrix { kind, space, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let space = FactorSpace::new([("left", 2), ("right", 3)]).unwrap();
        let m = Mat::from_fn(6, 6, |i, j| c64::new(i as f64 * 0.1 + 1e-300, -(j as f64) / 3.0));
        let bytes = write_matrix(MatrixKind::Density, &space, &m);
        let back = read_matrix(&bytes).unwrap();
        assert_eq!(back.kind, MatrixKind::Density);
        assert_eq!(back.space, space);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(back.matrix[(i, j)].re.to_bits(), m[(i, j)].re.to_bits());
                assert_eq!(back.matrix[(i, j)].im.to_bits(), m[(i, j)].im.to_bits());
            }
        }
        assert_eq!(write_matrix(back.kind, &back.space, &back.matrix), bytes);
    }

    #[test]
    fn rejects_malformed_input() {
        let space = FactorSpace::new([("a", 2)]).unwrap();
        let bytes = write_matrix(MatrixKind::Projector, &space, &Mat::identity(2, 2));
        assert!(read_matrix(&bytes[..bytes.len() - 1]).is_err());
        assert!(read_matrix(b"XMAT").is_err());
        let mut wrong = bytes.clone();
        wrong[8] = 9;
        assert!(read_matrix(&wrong).is_err());
        let general = write_matrix(MatrixKind::Projector, &space, &Mat::identity(3, 3));
        assert!(read_matrix(&general).is_err());
    }
}
