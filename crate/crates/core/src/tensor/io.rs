//! Little-endian binary matrix layout used for fixtures and checkpoints.
//!
//! A record is `rows: u64`, `cols: u64`, then `rows * cols` entries in
//! row-major order, each stored as `re: f64` followed by `im: f64`.

use super::{CMatrix, C64};
use crate::{Error, Result};
use std::io::{Read, Write};

pub fn write_matrix<W: Write>(mut w: W, m: &CMatrix) -> Result<()> {
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<CMatrix> {
    let rows = read_u64(&mut r)? as usize;
    let cols = read_u64(&mut r)? as usize;
    let len = rows
        .checked_mul(cols)
        .filter(|&n| n <= 1 << 28)
        .ok_or_else(|| Error::DimensionMismatch(format!("implausible header {rows}x{cols}")))?;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        data.push(C64::new(re, im));
    }
    Ok(CMatrix::from_row_slice(rows, cols, &data))
}

/// Serializes a matrix into a fresh byte buffer.
pub fn to_bytes(m: &CMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 16 * m.len());
    write_matrix(&mut out, m).expect("writing to a Vec cannot fail");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, seeded};
    use proptest::prelude::*;

    #[test]
    fn layout_is_row_major_little_endian() {
        let m = CMatrix::from_row_slice(1, 2, &[C64::new(1.0, -2.0), C64::new(0.5, 0.0)]);
        let bytes = to_bytes(&m);
        assert_eq!(bytes.len(), 16 + 32);
        assert_eq!(&bytes[0..8], &1u64.to_le_bytes());
        assert_eq!(&bytes[8..16], &2u64.to_le_bytes());
        assert_eq!(&bytes[16..24], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[24..32], &(-2.0f64).to_le_bytes());
        assert_eq!(&bytes[32..40], &0.5f64.to_le_bytes());
    }

    #[test]
    fn truncated_input_is_an_error() {
        let m = CMatrix::identity(3, 3);
        let bytes = to_bytes(&m);
        assert!(read_matrix(&bytes[..bytes.len() - 1]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn roundtrip_is_exact(seed in any::<u64>(), dim in 0usize..6) {
            let mut rng = seeded(seed);
            let m = random_matrix(dim, &mut rng);
            let back = read_matrix(to_bytes(&m).as_slice()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
