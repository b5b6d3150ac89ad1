use super::{factorial, operator_norm, CMatrix, Operator, Permutation, Space, C64, DENSE_CAP};
use crate::{Error, Result};

fn checked_tensor_dim(d: usize, n: usize, cap: usize) -> Result<usize> {
    match d.checked_pow(n as u32) {
        Some(dim) if dim <= cap => Ok(dim),
        Some(dim) => Err(Error::DenseCapExceeded { dim, cap }),
        None => Err(Error::DenseCapExceeded { dim: usize::MAX, cap }),
    }
}

/// `A ⊗ B`, refusing results larger than [`DENSE_CAP`].
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    kron_capped(a, b, DENSE_CAP)
}

pub fn kron_capped(a: &Operator, b: &Operator, cap: usize) -> Result<Operator> {
    let (sa, sb) = (a.space(), b.space());
    if !sa.is_product() || !sb.is_product() || sa.single_dim() != sb.single_dim() {
        return Err(Error::IncompatibleSpaces(format!("cannot form {sa:?} ⊗ {sb:?}")));
    }
    let d = sa.single_dim();
    let n = sa.particles() + sb.particles();
    checked_tensor_dim(d, n, cap)?;
    Ok(Operator::from_parts(
        Space::Tensor { d, n },
        a.matrix().kronecker(b.matrix()),
    ))
}

/// `A^{⊗n}` for a single-particle operator `A`.
pub fn tensor_power(a: &Operator, n: usize) -> Result<Operator> {
    let Space::Single { d } = a.space() else {
        return Err(Error::IncompatibleSpaces(format!(
            "tensor power needs a single-particle operator, got {:?}",
            a.space()
        )));
    };
    if n == 0 {
        return Err(Error::OutOfRange("tensor power with n = 0".into()));
    }
    checked_tensor_dim(d, n, DENSE_CAP)?;
    let mut acc = a.matrix().clone();
    for _ in 1..n {
        acc = acc.kronecker(a.matrix());
    }
    Ok(Operator::from_parts(Space::tensor(d, n), acc))
}

/// Index map of `U_π` on basis vectors: the factor in slot `k` moves to slot `π(k)`.
fn permuted_index(pi: &Permutation, d: usize, strides: &[usize], idx: usize) -> usize {
    let n = pi.len();
    let mut out = 0;
    let mut rem = idx;
    for k in 0..n {
        let digit = rem / strides[k];
        rem %= strides[k];
        out += digit * strides[pi.apply(k)];
    }
    debug_assert!(out < d.pow(n as u32));
    out
}

fn strides(d: usize, n: usize) -> Vec<usize> {
    (0..n).map(|k| d.pow((n - 1 - k) as u32)).collect()
}

/// The unitary `U_π` on `(C^d)^{⊗n}`; `U_π U_σ = U_{πσ}`.
pub fn permutation_operator(pi: &Permutation, d: usize) -> Result<Operator> {
    let n = pi.len();
    if d == 0 {
        return Err(Error::OutOfRange("single-particle dimension must be positive".into()));
    }
    let dim = checked_tensor_dim(d, n, DENSE_CAP)?;
    let st = strides(d, n);
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(permuted_index(pi, d, &st, col), col)] = C64::new(1.0, 0.0);
    }
    Ok(Operator::from_parts(Space::tensor(d, n), m))
}

/// `U_{(ij)}` on `n` factors (zero-based slots).
pub fn transposition_operator(d: usize, n: usize, i: usize, j: usize) -> Result<Operator> {
    permutation_operator(&Permutation::transposition(n, i, j)?, d)
}

/// `Σ_n = Σ_π sgn(π) U_π`.
pub fn signed_permutation_sum(d: usize, n: usize) -> Result<Operator> {
    if n == 0 {
        return Err(Error::OutOfRange("Σ_n needs n ≥ 1".into()));
    }
    let dim = checked_tensor_dim(d, n, DENSE_CAP)?;
    let st = strides(d, n);
    let mut m = CMatrix::zeros(dim, dim);
    for pi in Permutation::all(n) {
        let s = pi.sign() as f64;
        for col in 0..dim {
            m[(permuted_index(&pi, d, &st, col), col)] += C64::new(s, 0.0);
        }
    }
    Ok(Operator::from_parts(Space::tensor(d, n), m))
}

/// The orthogonal projector `P_{A_n} = Σ_n / n!` onto the antisymmetric subspace.
pub fn antisymmetrizer(d: usize, n: usize) -> Result<Operator> {
    Ok(signed_permutation_sum(d, n)?.scale(1.0 / factorial(n)))
}

/// Traces out all but the first `keep_dim`-sized factor block.
pub fn partial_trace_matrix(t: &CMatrix, keep_dim: usize, traced_dim: usize) -> CMatrix {
    assert_eq!(t.nrows(), keep_dim * traced_dim);
    CMatrix::from_fn(keep_dim, keep_dim, |x, w| {
        (0..traced_dim)
            .map(|z| t[(x * traced_dim + z, w * traced_dim + z)])
            .sum()
    })
}

/// `T_{:n}`: trace over the last `N − n` factors of an operator on `(C^d)^{⊗N}`.
pub fn partial_trace(t: &Operator, keep: usize) -> Result<Operator> {
    let Space::Tensor { d, n } = t.space() else {
        return Err(Error::IncompatibleSpaces(format!(
            "partial trace needs a tensor-space operator, got {:?}",
            t.space()
        )));
    };
    if keep == 0 || keep >= n {
        return Err(Error::OutOfRange(format!(
            "partial trace keeps 1 ≤ n < N factors, asked for {keep} of {n}"
        )));
    }
    let keep_dim = d.pow(keep as u32);
    let traced = d.pow((n - keep) as u32);
    Ok(Operator::from_parts(
        Space::tensor(d, keep),
        partial_trace_matrix(t.matrix(), keep_dim, traced),
    ))
}

/// `L_j = I^{⊗j} ⊗ L ⊗ I^{⊗(n-j-1)}` (zero-based slot `j`).
pub fn lift_one_body(l: &Operator, j: usize, n: usize) -> Result<Operator> {
    let Space::Single { d } = l.space() else {
        return Err(Error::IncompatibleSpaces("one-body operator must be single-particle".into()));
    };
    if j >= n {
        return Err(Error::OutOfRange(format!("slot {j} outside {n} factors")));
    }
    checked_tensor_dim(d, n, DENSE_CAP)?;
    let left = CMatrix::identity(d.pow(j as u32), d.pow(j as u32));
    let right = CMatrix::identity(d.pow((n - j - 1) as u32), d.pow((n - j - 1) as u32));
    let m = left.kronecker(l.matrix()).kronecker(&right);
    Ok(Operator::from_parts(Space::tensor(d, n), m))
}

fn pair_potential_dim(v: &Operator) -> Result<usize> {
    match v.space() {
        Space::Tensor { d, n: 2 } => Ok(d),
        other => Err(Error::IncompatibleSpaces(format!(
            "pair potential must act on Tensor(d, 2), got {other:?}"
        ))),
    }
}

pub(crate) fn transposition_deviation(v: &CMatrix, d: usize) -> f64 {
    let swap = transposition_operator(d, 2, 0, 1).expect("d^2 within cap").into_matrix();
    operator_norm(&(v * &swap - &swap * v))
}

fn check_pair_slots(i: usize, j: usize, n: usize) -> Result<()> {
    if !(i < j && j < n) {
        return Err(Error::OutOfRange(format!(
            "pair slots need 0 ≤ i < j < N, got i = {i}, j = {j}, N = {n}"
        )));
    }
    Ok(())
}

/// `V_ij`: the pair operator acting on slots `i < j` (zero-based) of `n` factors.
pub fn embed_pair_operator(v: &Operator, i: usize, j: usize, n: usize) -> Result<Operator> {
    let d = pair_potential_dim(v)?;
    check_pair_slots(i, j, n)?;
    let deviation = transposition_deviation(v.matrix(), d);
    if deviation > super::HERMITIAN_TOL {
        return Err(Error::NotTranspositionSymmetric { deviation });
    }
    let dim = checked_tensor_dim(d, n, DENSE_CAP)?;
    let st = strides(d, n);
    let (si, sj) = (st[i], st[j]);
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let ci = (col / si) % d;
        let cj = (col / sj) % d;
        let base = col - ci * si - cj * sj;
        for a in 0..d {
            for b in 0..d {
                m[(base + a * si + b * sj, col)] = v.matrix()[(a * d + b, ci * d + cj)];
            }
        }
    }
    Ok(Operator::from_parts(Space::Tensor { d, n }, m))
}

/// `U_π^* (V ⊗ I^{⊗(n-2)}) U_π` for a permutation with `π(i) = 0`, `π(j) = 1`.
pub fn embed_pair_by_conjugation(
    v: &Operator,
    i: usize,
    j: usize,
    n: usize,
    pi: &Permutation,
) -> Result<Operator> {
    let d = pair_potential_dim(v)?;
    check_pair_slots(i, j, n)?;
    if pi.len() != n || pi.apply(i) != 0 || pi.apply(j) != 1 {
        return Err(Error::InvalidPermutation(format!(
            "{pi:?} must send slot {i} to 0 and slot {j} to 1"
        )));
    }
    let dim = checked_tensor_dim(d, n, DENSE_CAP)?;
    let rest = dim / (d * d);
    let v12 = v.matrix().kronecker(&CMatrix::identity(rest, rest));
    let u = permutation_operator(pi, d)?.into_matrix();
    Ok(Operator::from_parts(
        Space::Tensor { d, n },
        u.adjoint() * v12 * u,
    ))
}

/// `V_ij · X` without materializing `V_ij`; `x` has `d^n` rows and any number of columns.
pub fn pair_left_mul(v: &CMatrix, d: usize, n: usize, i: usize, j: usize, x: &CMatrix) -> CMatrix {
    let dim = d.pow(n as u32);
    assert_eq!(x.nrows(), dim, "operand rows must equal d^n");
    assert!(i < j && j < n);
    let st = strides(d, n);
    let (si, sj) = (st[i], st[j]);
    let bases: Vec<usize> = (0..dim)
        .filter(|&r| (r / si) % d == 0 && (r / sj) % d == 0)
        .collect();
    let offsets: Vec<usize> = (0..d * d).map(|ab| (ab / d) * si + (ab % d) * sj).collect();
    let mut y = CMatrix::zeros(dim, x.ncols());
    let mut block = vec![C64::new(0.0, 0.0); d * d];
    for c in 0..x.ncols() {
        let xc = x.column(c);
        let mut yc = y.column_mut(c);
        for &base in &bases {
            for (slot, off) in block.iter_mut().zip(&offsets) {
                *slot = xc[base + off];
            }
            for (rs, off) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (ab, xb) in block.iter().enumerate() {
                    acc += v[(rs, ab)] * xb;
                }
                yc[base + off] = acc;
            }
        }
    }
    y
}

/// `X · V_ij` without materializing `V_ij`.
pub fn pair_right_mul(x: &CMatrix, v: &CMatrix, d: usize, n: usize, i: usize, j: usize) -> CMatrix {
    pair_left_mul(&v.adjoint(), d, n, i, j, &x.adjoint()).adjoint()
}

/// `[V_ij, X]`.
pub fn pair_commutator(v: &CMatrix, d: usize, n: usize, i: usize, j: usize, x: &CMatrix) -> CMatrix {
    pair_left_mul(v, d, n, i, j, x) - pair_right_mul(x, v, d, n, i, j)
}

/// Operator-norm defect of `Σ_{n+1} = (I − Σ_{k≤n} U_{(k,n+1)})(Σ_n ⊗ I)`.
pub fn sigma_factorization_defect(d: usize, n: usize) -> Result<f64> {
    let lhs = signed_permutation_sum(d, n + 1)?.into_matrix();
    let dim = lhs.nrows();
    let mut left = CMatrix::identity(dim, dim);
    for k in 0..n {
        left -= transposition_operator(d, n + 1, k, n)?.matrix();
    }
    let sigma_n = signed_permutation_sum(d, n)?.into_matrix();
    let rhs = left * sigma_n.kronecker(&CMatrix::identity(d, d));
    Ok(operator_norm(&(lhs - rhs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_matrix, random_pair_potential, seeded};
    use crate::tensor::{max_abs_diff, trace_norm};

    fn e(d: usize, k: usize) -> CMatrix {
        let mut v = CMatrix::zeros(d, 1);
        v[(k, 0)] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i2 = Operator::identity(Space::Single { d: 2 });
        let i4 = kron(&i2, &i2).unwrap();
        assert_eq!(i4.space(), Space::Tensor { d: 2, n: 2 });
        assert_eq!(i4.matrix(), &CMatrix::identity(4, 4));

        let a = Operator::from_real_diagonal(Space::Single { d: 2 }, &[1.0, 2.0]).unwrap();
        let b = Operator::from_real_diagonal(Space::Single { d: 2 }, &[3.0, 4.0]).unwrap();
        let ab = kron(&a, &b).unwrap();
        let expected =
            Operator::from_real_diagonal(Space::Tensor { d: 2, n: 2 }, &[3.0, 4.0, 6.0, 8.0])
                .unwrap();
        assert_eq!(ab, expected);
    }

    #[test]
    fn kron_trace_factorizes() {
        let mut rng = seeded(11);
        let sp = Space::Single { d: 3 };
        let a = Operator::new(sp, random_matrix(3, &mut rng)).unwrap();
        let b = Operator::new(sp, random_matrix(3, &mut rng)).unwrap();
        let t = kron(&a, &b).unwrap().trace();
        assert!((t - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn kron_respects_cap() {
        let a = Operator::identity(Space::Tensor { d: 4, n: 3 });
        let b = Operator::identity(Space::Tensor { d: 4, n: 4 });
        assert!(matches!(kron(&a, &b), Err(Error::DenseCapExceeded { .. })));
        let s3 = Operator::identity(Space::Single { d: 3 });
        assert!(kron(&a, &s3).is_err());
    }

    #[test]
    fn transposition_swaps_simple_tensors() {
        let u = transposition_operator(2, 2, 0, 1).unwrap();
        let e12 = e(2, 0).kronecker(&e(2, 1));
        let e21 = e(2, 1).kronecker(&e(2, 0));
        assert_eq!(u.matrix() * e12, e21);
        let id = permutation_operator(&Permutation::identity(3), 2).unwrap();
        assert_eq!(id.matrix(), &CMatrix::identity(8, 8));
    }

    #[test]
    fn permutation_moves_slot_k_to_pi_k() {
        // π = (0 → 1, 1 → 2, 2 → 0); x0 ⊗ x1 ⊗ x2 ↦ x2 ⊗ x0 ⊗ x1.
        let pi = Permutation::new(vec![1, 2, 0]).unwrap();
        let u = permutation_operator(&pi, 3).unwrap();
        let input = e(3, 0).kronecker(&e(3, 1)).kronecker(&e(3, 2));
        let output = e(3, 2).kronecker(&e(3, 0)).kronecker(&e(3, 1));
        assert_eq!(u.matrix() * input, output);
        let u3 = u.matrix() * u.matrix() * u.matrix();
        assert_eq!(u3, CMatrix::identity(27, 27));
    }

    #[test]
    fn representation_is_homomorphic_exhaustively() {
        for n in 1..=4 {
            let d = 2;
            let perms = Permutation::all(n);
            let ops: Vec<CMatrix> = perms
                .iter()
                .map(|p| permutation_operator(p, d).unwrap().into_matrix())
                .collect();
            for (p, up) in perms.iter().zip(&ops) {
                for (q, uq) in perms.iter().zip(&ops) {
                    let upq = permutation_operator(&p.compose(q).unwrap(), d).unwrap();
                    assert_eq!(up * uq, *upq.matrix());
                }
            }
        }
    }

    #[test]
    fn antisymmetrizer_smallest_case() {
        let p = antisymmetrizer(2, 2).unwrap();
        let r = p.matrix();
        let s = 0.5f64;
        // Range spanned by (e1⊗e2 − e2⊗e1)/√2.
        let expected = CMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 0.0, 0.0, 0.0, s, -s, 0.0, 0.0, -s, s, 0.0, 0.0, 0.0, 0.0, 0.0,
            ]
            .map(|x| C64::new(x, 0.0)),
        );
        assert!(max_abs_diff(r, &expected) < 1e-15);
        assert!((trace_norm(r) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn antisymmetrizer_trace_counts_subsets() {
        for (d, n, count) in [(4, 2, 6.0), (4, 3, 4.0), (3, 3, 1.0), (2, 3, 0.0), (5, 2, 10.0)] {
            let tr = antisymmetrizer(d, n).unwrap().trace();
            assert!((tr.re - count).abs() < 1e-12, "d={d} n={n}: {tr}");
        }
    }

    #[test]
    fn antisymmetrizer_is_orthogonal_projector() {
        for d in 1..=4 {
            for n in 1..=3 {
                let p = antisymmetrizer(d, n).unwrap().into_matrix();
                assert!(operator_norm(&(&p * &p - &p)) <= 1e-12);
                assert!(operator_norm(&(&p - p.adjoint())) <= 1e-12);
            }
        }
    }

    #[test]
    fn sigma_two_kills_repeated_factor() {
        let mut rng = seeded(3);
        let phi = random_matrix(3, &mut rng).column(0).into_owned();
        let pp = phi.kronecker(&phi);
        let s2 = signed_permutation_sum(3, 2).unwrap();
        assert!((s2.matrix() * pp).norm() < 1e-14);
    }

    #[test]
    fn sigma_factorization_holds() {
        for d in 1..=3 {
            for n in 1..=3 {
                assert!(sigma_factorization_defect(d, n).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_of_product_and_bell_state() {
        let mut rng = seeded(5);
        let sp = Space::Single { d: 3 };
        let a = Operator::new(sp, random_matrix(3, &mut rng)).unwrap();
        let b = Operator::new(sp, random_matrix(3, &mut rng)).unwrap();
        let ab = kron(&a, &b).unwrap();
        let red = partial_trace(&ab, 1).unwrap();
        let expected = a.matrix() * b.trace();
        assert!(max_abs_diff(red.matrix(), &expected) < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CMatrix::from_column_slice(4, 1, &[s, 0.0, 0.0, s].map(|x| C64::new(x, 0.0)));
        let proj = Operator::new(Space::Tensor { d: 2, n: 2 }, &bell * bell.adjoint()).unwrap();
        let red = partial_trace(&proj, 1).unwrap();
        assert!(max_abs_diff(red.matrix(), &(CMatrix::identity(2, 2) * C64::new(0.5, 0.0))) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_keep() {
        let t = Operator::identity(Space::Tensor { d: 2, n: 3 });
        assert!(partial_trace(&t, 3).is_err());
        assert!(partial_trace(&t, 0).is_err());
        assert!(partial_trace(&Operator::identity(Space::Single { d: 2 }), 1).is_err());
    }

    #[test]
    fn pair_embedding_anchor_and_transposition() {
        let mut rng = seeded(8);
        let v = random_pair_potential(2, 1.0, &mut rng).unwrap();
        let v12 = embed_pair_operator(&v, 0, 1, 3).unwrap();
        let expected = v.matrix().kronecker(&CMatrix::identity(2, 2));
        assert!(max_abs_diff(v12.matrix(), &expected) < 1e-15);

        let swap = transposition_operator(3, 2, 0, 1).unwrap();
        let v23 = embed_pair_operator(&swap, 1, 2, 3).unwrap();
        assert_eq!(v23, transposition_operator(3, 3, 1, 2).unwrap());
    }

    #[test]
    fn pair_embedding_is_well_defined() {
        let mut rng = seeded(9);
        let v = random_pair_potential(3, 1.0, &mut rng).unwrap();
        let direct = embed_pair_operator(&v, 0, 2, 3).unwrap();
        // Both permutations send slot 0 → 0 and slot 2 → 1.
        let p1 = Permutation::new(vec![0, 2, 1]).unwrap();
        let via1 = embed_pair_by_conjugation(&v, 0, 2, 3, &p1).unwrap();
        assert!(max_abs_diff(direct.matrix(), via1.matrix()) < 1e-14);

        let v4 = embed_pair_operator(&v, 0, 2, 4).unwrap();
        let pa = Permutation::new(vec![0, 2, 1, 3]).unwrap();
        let pb = Permutation::new(vec![0, 3, 1, 2]).unwrap();
        let a = embed_pair_by_conjugation(&v, 0, 2, 4, &pa).unwrap();
        let b = embed_pair_by_conjugation(&v, 0, 2, 4, &pb).unwrap();
        assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-14);
        assert!(max_abs_diff(a.matrix(), v4.matrix()) < 1e-14);
    }

    #[test]
    fn pair_embedding_rejects_asymmetric_potential() {
        let mut rng = seeded(10);
        let h = random_hermitian(4, &mut rng);
        let v = Operator::new(Space::Tensor { d: 2, n: 2 }, h).unwrap();
        assert!(matches!(
            embed_pair_operator(&v, 0, 1, 2),
            Err(Error::NotTranspositionSymmetric { .. })
        ));
    }

    #[test]
    fn structured_pair_products_match_dense() {
        let mut rng = seeded(12);
        let d = 3;
        let v = random_pair_potential(d, 1.0, &mut rng).unwrap();
        let x = random_matrix(27, &mut rng);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let vij = embed_pair_operator(&v, i, j, 3).unwrap().into_matrix();
            let left = pair_left_mul(v.matrix(), d, 3, i, j, &x);
            let right = pair_right_mul(&x, v.matrix(), d, 3, i, j);
            assert!(max_abs_diff(&left, &(&vij * &x)) < 1e-12);
            assert!(max_abs_diff(&right, &(&x * &vij)) < 1e-12);
        }
    }

    #[test]
    fn lift_matches_kron() {
        let mut rng = seeded(13);
        let l = Operator::new(Space::Single { d: 2 }, random_hermitian(2, &mut rng)).unwrap();
        let i = Operator::identity(Space::Single { d: 2 });
        let l1 = lift_one_body(&l, 1, 3).unwrap();
        let k = kron(&kron(&i, &l).unwrap(), &i).unwrap();
        assert!(max_abs_diff(l1.matrix(), k.matrix()) < 1e-15);
    }
}
