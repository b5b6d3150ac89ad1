use super::FockBasis;
use crate::tensor::{factorial, CMatrix, Permutation, C64, DENSE_CAP};
use crate::{Error, Result};
use nalgebra::DVector;

/// Largest state-vector length the embedding into `(C^d)^{⊗N}` may allocate.
pub const VECTOR_CAP: usize = 1 << 23;

/// For each basis state, the tensor indices of its `N!` signed simple tensors.
struct SignedIndices {
    scale: f64,
    rows: Vec<Vec<(usize, f64)>>,
}

fn tensor_dim(d: usize, n: usize, cap: usize) -> Result<usize> {
    match d.checked_pow(n as u32) {
        Some(dim) if dim <= cap => Ok(dim),
        Some(dim) => Err(Error::DenseCapExceeded { dim, cap }),
        None => Err(Error::DenseCapExceeded { dim: usize::MAX, cap }),
    }
}

fn signed_indices(basis: &FockBasis) -> SignedIndices {
    let (d, n) = (basis.modes(), basis.particles());
    let strides: Vec<usize> = (0..n).map(|k| d.pow((n - 1 - k) as u32)).collect();
    let perms: Vec<(Permutation, f64)> = if n == 0 {
        Vec::new()
    } else {
        Permutation::all(n)
            .into_iter()
            .map(|p| {
                let s = p.sign() as f64;
                (p, s)
            })
            .collect()
    };
    let rows = (0..basis.len())
        .map(|k| {
            if n == 0 {
                return vec![(0, 1.0)];
            }
            let occ = basis.occupied(k);
            perms
                .iter()
                .map(|(p, s)| {
                    let idx = occ
                        .iter()
                        .enumerate()
                        .map(|(slot, &mode)| mode * strides[p.apply(slot)])
                        .sum();
                    (idx, *s)
                })
                .collect()
        })
        .collect();
    SignedIndices {
        scale: 1.0 / factorial(n).sqrt(),
        rows,
    }
}

/// The isometry `W: C^{C(d,N)} → (C^d)^{⊗N}` sending `|S⟩` to its Slater determinant.
pub fn embedding_isometry(basis: &FockBasis) -> Result<CMatrix> {
    let dim = tensor_dim(basis.modes(), basis.particles(), DENSE_CAP)?;
    let table = signed_indices(basis);
    let mut w = CMatrix::zeros(dim, basis.len());
    for (col, entries) in table.rows.iter().enumerate() {
        for &(row, s) in entries {
            w[(row, col)] = C64::new(s * table.scale, 0.0);
        }
    }
    Ok(w)
}

/// `W ψ` for occupation-number amplitudes `ψ`.
pub fn embed_vector(basis: &FockBasis, amplitudes: &DVector<C64>) -> Result<DVector<C64>> {
    if amplitudes.len() != basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for a basis of {} states",
            amplitudes.len(),
            basis.len()
        )));
    }
    let dim = tensor_dim(basis.modes(), basis.particles(), VECTOR_CAP)?;
    let table = signed_indices(basis);
    let mut out = DVector::zeros(dim);
    for (entries, &a) in table.rows.iter().zip(amplitudes.iter()) {
        for &(row, s) in entries {
            out[row] += a * (s * table.scale);
        }
    }
    Ok(out)
}

/// `W* X` for `X` with `d^k` rows, without forming `W`.
pub fn compress_rows(basis: &FockBasis, x: &CMatrix) -> Result<CMatrix> {
    let dim = tensor_dim(basis.modes(), basis.particles(), VECTOR_CAP)?;
    if x.nrows() != dim {
        return Err(Error::DimensionMismatch(format!(
            "expected {dim} rows, got {}",
            x.nrows()
        )));
    }
    let table = signed_indices(basis);
    let mut out = CMatrix::zeros(basis.len(), x.ncols());
    for (r, entries) in table.rows.iter().enumerate() {
        for c in 0..x.ncols() {
            let col = x.column(c);
            let acc: C64 = entries.iter().map(|&(row, s)| col[row] * s).sum();
            out[(r, c)] = acc * table.scale;
        }
    }
    Ok(out)
}

/// `W* X W` for an operator `X` on `(C^d)^{⊗k}`.
pub fn compress_operator(basis: &FockBasis, x: &CMatrix) -> Result<CMatrix> {
    let left = compress_rows(basis, x)?;
    Ok(compress_rows(basis, &left.adjoint())?.adjoint())
}

/// The k-th compound matrix `det F[S, T]` over k-subsets, which equals `W* F^{⊗k} W`.
pub fn compound_matrix(f: &CMatrix, basis: &FockBasis) -> Result<CMatrix> {
    let d = basis.modes();
    if f.nrows() != d || f.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for {d} modes",
            f.nrows(),
            f.ncols()
        )));
    }
    let k = basis.particles();
    let occ: Vec<Vec<usize>> = (0..basis.len()).map(|s| basis.occupied(s)).collect();
    let mut out = CMatrix::zeros(basis.len(), basis.len());
    for (r, rows) in occ.iter().enumerate() {
        for (c, cols) in occ.iter().enumerate() {
            out[(r, c)] = if k == 0 {
                C64::new(1.0, 0.0)
            } else {
                CMatrix::from_fn(k, k, |a, b| f[(rows[a], cols[b])]).determinant()
            };
        }
    }
    Ok(out)
}
