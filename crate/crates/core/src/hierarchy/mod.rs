//! The objects of the hierarchy comparison: `F_n⁻`, the differences
//! `E_{N,n} = D_{N:n} − F_n⁻`, the error term `𝓔_n`, the remainder `R_n`,
//! and the a-priori trace-norm bound on `E_{N,n}`.

mod bound;
mod report;

pub use bound::{apriori_bound, scaled_time, BoundForm, SUP_FALLBACK};
pub use report::{write_reports_csv, BoundReport, BoundContext, MARGIN_TOL};

use crate::fock::compressed_f_minus;
use crate::nbody::{
    compressed_state_marginal, coupling_commutator, interaction_commutator, marginal,
    MeanFieldSystem, Trajectory,
};
use crate::tensor::{
    embed_pair_operator, partial_trace_matrix, signed_permutation_sum, tensor_power,
    trace_norm, transposition_operator, CMatrix, Operator, Space, DENSE_CAP,
};
use crate::{Error, Result};

fn single_dim(f: &Operator) -> Result<usize> {
    match f.space() {
        Space::Single { d } => Ok(d),
        other => Err(Error::IncompatibleSpaces(format!(
            "expected a one-body operator, got {other:?}"
        ))),
    }
}

fn check_dense(d: usize, n: usize) -> Result<usize> {
    match d.checked_pow(n as u32) {
        Some(dim) if dim <= DENSE_CAP => Ok(dim),
        Some(dim) => Err(Error::DenseCapExceeded { dim, cap: DENSE_CAP }),
        None => Err(Error::DenseCapExceeded { dim: usize::MAX, cap: DENSE_CAP }),
    }
}

/// `F_1⁻ = F` and `F_n⁻ = F^{⊗n} Σ_n`.
pub fn f_minus_n(f: &Operator, n: usize) -> Result<Operator> {
    let d = single_dim(f)?;
    if n == 0 {
        return Err(Error::OutOfRange("F_n⁻ needs n ≥ 1".into()));
    }
    if n == 1 {
        return Ok(f.clone());
    }
    check_dense(d, n)?;
    let power = tensor_power(f, n)?;
    let sigma = signed_permutation_sum(d, n)?;
    power.mul(&sigma)
}

/// `E_{N,n}(t) = D_{N:n}(t) − F_n⁻(t)` on `(C^d)^{⊗n}`.
pub fn difference_e(
    n_body: &Trajectory,
    tdhf: &Trajectory,
    n: usize,
    t: f64,
) -> Result<Operator> {
    n_body.check_same_grid(tdhf)?;
    let k = n_body.index_of_time(t)?;
    let d_n = marginal(&n_body.states()[k], n)?;
    d_n.sub(&f_minus_n(&tdhf.states()[k], n)?)
}

/// `‖E_{N,n}‖_tr` for one N-body state and one-body density. Antisymmetric-subspace
/// states are compared in the occupation-number basis of `n` particles, where
/// both terms live, so `n` is not limited by the dense cap.
pub fn difference_norm(state: &Operator, f: &Operator, n: usize) -> Result<f64> {
    match state.space() {
        Space::Antisym { .. } => {
            let d_n = compressed_state_marginal(state, n)?;
            let f_n = compressed_f_minus(f.matrix(), n)?;
            Ok(trace_norm(&(d_n - f_n)))
        }
        _ => Ok(marginal(state, n)?.sub(&f_minus_n(f, n)?)?.trace_norm()),
    }
}

/// `𝓔_n = (1/N) Σ_{i<j≤n} [V_ij, D_{:n}] − (n/N) Σ_{i≤n} [V_{i,n+1}, D_{:n+1}]_{:n}`.
pub fn error_term(sys: &MeanFieldSystem, state: &Operator, n: usize) -> Result<Operator> {
    let big_n = sys.particles();
    if n == 0 || n >= big_n {
        return Err(Error::OutOfRange(format!(
            "the error term needs 1 ≤ n < N = {big_n}, got {n}"
        )));
    }
    let d = sys.modes();
    check_dense(d, n + 1)?;
    let d_n = marginal(state, n)?.into_matrix();
    let d_next = marginal(state, n + 1)?.into_matrix();
    let v = sys.potential().matrix();
    let inv = 1.0 / big_n as f64;
    let e = interaction_commutator(v, d, n, &d_n).map(|z| z * inv)
        - coupling_commutator(v, d, n, &d_next).map(|z| z * (n as f64 * inv));
    Ok(Operator::from_parts(Space::tensor(d, n), e))
}

/// [`error_term`] at the sample of `traj` at time `t`.
pub fn error_term_at(
    sys: &MeanFieldSystem,
    traj: &Trajectory,
    n: usize,
    t: f64,
) -> Result<Operator> {
    let k = traj.index_of_time(t)?;
    error_term(sys, &traj.states()[k], n)
}

/// `R_1 = 0` and `R_n(X) = Σ_j [V_{j,n+1}, X^{⊗n+1} Σ_{k≠j} U_{(k,n+1)}]_{:n} Σ_n`.
pub fn remainder_r(sys: &MeanFieldSystem, x: &Operator, n: usize) -> Result<Operator> {
    let d = single_dim(x)?;
    if d != sys.modes() {
        return Err(Error::DimensionMismatch(format!(
            "operator on C^{d} for a system on C^{}",
            sys.modes()
        )));
    }
    if n == 0 {
        return Err(Error::OutOfRange("R_n needs n ≥ 1".into()));
    }
    if n == 1 {
        return Ok(Operator::zeros(Space::Single { d }));
    }
    let dim = check_dense(d, n + 1)?;
    let power = tensor_power(x, n + 1)?.into_matrix();
    // X^{⊗n+1} U_{(k,n)} permutes the columns of X^{⊗n+1} by swapping digits k and n.
    let swapped: Vec<Vec<usize>> = (0..n).map(|k| swap_digits(d, n + 1, k, n)).collect();
    let v = sys.potential().matrix();
    let mut acc = CMatrix::zeros(dim, dim);
    for j in 0..n {
        let mut m = CMatrix::zeros(dim, dim);
        for (k, cols) in swapped.iter().enumerate() {
            if k != j {
                for (c, &src) in cols.iter().enumerate() {
                    let mut col = m.column_mut(c);
                    col += power.column(src);
                }
            }
        }
        acc += crate::tensor::pair_commutator(v, d, n + 1, j, n, &m);
    }
    let reduced = partial_trace_matrix(&acc, d.pow(n as u32), d);
    let sigma = signed_permutation_sum(d, n)?.into_matrix();
    Ok(Operator::from_parts(Space::tensor(d, n), reduced * sigma))
}

/// Index of `U_{(a,b)} e_c` for every basis index `c` of `(C^d)^{⊗n}`.
fn swap_digits(d: usize, n: usize, a: usize, b: usize) -> Vec<usize> {
    let stride = |k: usize| d.pow((n - 1 - k) as u32);
    let (sa, sb) = (stride(a), stride(b));
    (0..d.pow(n as u32))
        .map(|c| {
            let (da, db) = (c / sa % d, c / sb % d);
            c - da * sa - db * sb + db * sa + da * sb
        })
        .collect()
}

/// `‖{V_{n−1,n+1} U_{(n,n+1)} (F_n⁻ ⊗ F)}_{:n} − (I^{⊗n−1} ⊗ F) V_{n−1,n} F_n⁻‖_tr`.
pub fn claim_identity_check(sys: &MeanFieldSystem, f: &Operator, n: usize) -> Result<f64> {
    let d = single_dim(f)?;
    if n < 2 {
        return Err(Error::OutOfRange(format!("the identity needs n ≥ 2, got {n}")));
    }
    check_dense(d, n + 1)?;
    let v = sys.potential();
    let f_n = f_minus_n(f, n)?.into_matrix();
    let lifted = f_n.kronecker(f.matrix());
    let swap = transposition_operator(d, n + 1, n - 1, n)?.into_matrix();
    let v_far = embed_pair_operator(v, n - 2, n, n + 1)?.into_matrix();
    let lhs = partial_trace_matrix(&(v_far * swap * lifted), d.pow(n as u32), d);
    let left_id = CMatrix::identity(d.pow(n as u32 - 1), d.pow(n as u32 - 1));
    let f_last = left_id.kronecker(f.matrix());
    let v_near = embed_pair_operator(v, n - 2, n - 1, n)?.into_matrix();
    let rhs = f_last * v_near * f_n;
    Ok(trace_norm(&(lhs - rhs)))
}
