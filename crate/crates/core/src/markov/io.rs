//! Binary container for a decomposition.
//!
//! Little-endian layout:
//!
//! ```text
//! magic  b"MKVD"
//! u32    version (1)
//! u32    block count
//! per block: f64 weight, then three length-prefixed (u64) binary matrices:
//!            isometry (general, factors of B), left state (density), right state (density)
//! ```

use super::{MarkovBlock, MarkovDecomposition, LEFT_LABEL, RIGHT_LABEL};
use crate::error::{Error, Result};
use crate::tensor::{read_matrix, write_matrix, DensityOperator, FactorSpace, MatrixKind};

const MAGIC: &[u8; 4] = b"MKVD";
const VERSION: u32 = 1;

pub fn write_decomposition(d: &MarkovDecomposition) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(d.blocks.len() as u32).to_le_bytes());
    for blk in &d.blocks {
        out.extend_from_slice(&blk.weight.to_le_bytes());
        for blob in [
            write_matrix(MatrixKind::General, d.b_space(), &blk.isometry),
            write_matrix(MatrixKind::Density, blk.left_state.space(), blk.left_state.matrix()),
            write_matrix(MatrixKind::Density, blk.right_state.space(), blk.right_state.matrix()),
        ] {
            out.extend_from_slice(&(blob.len() as u64).to_le_bytes());
            out.extend_from_slice(&blob);
        }
    }
    out
}

fn take<'a>(data: &'a [u8], pos: &mut usize, n: usize) -> Result<&'a [u8]> {
    let end = pos.checked_add(n).filter(|&e| e <= data.len()).ok_or_else(|| Error::Format(format!("truncated input at byte {pos}")))?;
    let s = &data[*pos..end];
    *pos = end;
    Ok(s)
}

fn split_space(space: &FactorSpace, label: &str, first: bool) -> Result<FactorSpace> {
    let labels = space.labels();
    let at = if first { labels.first() } else { labels.last() };
    if at.map(String::as_str) != Some(label) {
        return Err(Error::Format(format!("factor state does not carry `{label}` at the expected end")));
    }
    let rest: Vec<&str> = labels.iter().map(String::as_str).filter(|l| *l != label).collect();
    space.subspace(&rest)
}

pub fn read_decomposition(data: &[u8]) -> Result<MarkovDecomposition> {
    let mut pos = 0;
    if take(data, &mut pos, 4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(data, &mut pos, 4)?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let count = u32::from_le_bytes(take(data, &mut pos, 4)?.try_into().unwrap()) as usize;
    // A block needs at least 32 bytes.
    if count > (data.len() - pos) / 32 {
        return Err(Error::Format("block count exceeds input size".into()));
    }
    let mut spaces: Option<(FactorSpace, FactorSpace, FactorSpace)> = None;
    let mut blocks = Vec::with_capacity(count);
    for _ in 0..count {
        let weight = f64::from_le_bytes(take(data, &mut pos, 8)?.try_into().unwrap());
        let mut blobs = Vec::with_capacity(3);
        for _ in 0..3 {
            let len = u64::from_le_bytes(take(data, &mut pos, 8)?.try_into().unwrap());
            let len = usize::try_from(len).map_err(|_| Error::Format("length overflow".into()))?;
            blobs.push(read_matrix(take(data, &mut pos, len)?)?);
        }
        let right = blobs.pop().unwrap();
        let left = blobs.pop().unwrap();
        let iso = blobs.pop().unwrap();
        if iso.kind != MatrixKind::General || left.kind != MatrixKind::Density || right.kind != MatrixKind::Density {
            return Err(Error::Format("unexpected matrix kind in block".into()));
        }
        let a_space = split_space(&left.space, LEFT_LABEL, false)?;
        let c_space = split_space(&right.space, RIGHT_LABEL, true)?;
        match &spaces {
            None => spaces = Some((a_space, iso.space.clone(), c_space)),
            Some((a, b, c)) if *a == a_space && *b == iso.space && *c == c_space => {}
            Some(_) => return Err(Error::Format("blocks disagree on the party spaces".into())),
        }
        blocks.push(MarkovBlock {
            weight,
            isometry: iso.matrix,
            left_state: DensityOperator::new(left.space, left.matrix)?,
            right_state: DensityOperator::new(right.space, right.matrix)?,
        });
    }
    if pos != data.len() {
        return Err(Error::Format("trailing bytes".into()));
    }
    let (a, b, c) = spaces.ok_or_else(|| Error::Format("no blocks".into()))?;
    MarkovDecomposition::new(a, b, c, blocks)
}
