use super::basis::{apply_ladder_string, Ladder};
use super::embed::{compound_matrix, compress_rows, embed_vector};
use super::{AntisymDensity, FockBasis};
use crate::tensor::{factorial, trace_norm, CMatrix, Operator, Space, C64, DENSE_CAP};
use crate::{Error, Result};
use nalgebra::DVector;

/// `Tr(D · O)` for a product of ladder operators that conserves particle number.
pub fn expectation(rho: &AntisymDensity, ops: &[Ladder]) -> C64 {
    let basis = rho.basis();
    let m = rho.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for (col, &bits) in basis.states().iter().enumerate() {
        if let Some((sign, out)) = apply_ladder_string(ops, bits) {
            if let Some(row) = basis.index_of(out) {
                acc += m[(col, row)] * sign;
            }
        }
    }
    acc
}

/// `D_{:1}` with entries `⟨a†_j a_i⟩ / N`.
pub fn one_body_reduced(rho: &AntisymDensity) -> CMatrix {
    let d = rho.modes();
    let n = rho.particles() as f64;
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(i, j)] = expectation(rho, &[Ladder::Create(j), Ladder::Annihilate(i)]) / n;
        }
    }
    out
}

/// `D_{:2}` with entries `⟨a†_j a†_l a_k a_i⟩ / (N(N−1))` at row `(i,k)`, column `(j,l)`.
pub fn two_body_reduced(rho: &AntisymDensity) -> Result<CMatrix> {
    let d = rho.modes();
    let n = rho.particles();
    if n < 2 {
        return Err(Error::OutOfRange(format!("two-body marginal of an N = {n} state")));
    }
    let norm = (n * (n - 1)) as f64;
    let mut out = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for k in 0..d {
            if i == k {
                continue;
            }
            for j in 0..d {
                for l in 0..d {
                    if j == l {
                        continue;
                    }
                    let ops = [
                        Ladder::Create(j),
                        Ladder::Create(l),
                        Ladder::Annihilate(k),
                        Ladder::Annihilate(i),
                    ];
                    out[(i * d + k, j * d + l)] = expectation(rho, &ops) / norm;
                }
            }
        }
    }
    Ok(out)
}

/// Eigenpairs of the density with non-negligible weight, as embedded state vectors
/// reshaped to `d^k × d^{N−k}`.
fn weighted_reshaped_states(rho: &AntisymDensity, k: usize) -> Result<Vec<(f64, CMatrix)>> {
    let (d, n) = (rho.modes(), rho.particles());
    let herm = crate::tensor::hermitian_part(rho.matrix());
    let eig = herm.symmetric_eigen();
    let rows = d.pow(k as u32);
    let cols = d.pow((n - k) as u32);
    let mut out = Vec::new();
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() < 1e-15 {
            continue;
        }
        let v: DVector<C64> = eig.eigenvectors.column(idx).into_owned();
        let psi = embed_vector(rho.basis(), &v)?;
        out.push((lambda, CMatrix::from_row_slice(rows, cols, psi.as_slice())));
    }
    Ok(out)
}

fn check_marginal_order(rho: &AntisymDensity, k: usize) -> Result<()> {
    if k == 0 || k > rho.particles() {
        return Err(Error::OutOfRange(format!(
            "marginal of order {k} for N = {}",
            rho.particles()
        )));
    }
    Ok(())
}

/// `D_{:k}` on `(C^d)^{⊗k}` by embedding the eigenvectors of `D` and tracing out
/// the last `N − k` factors.
pub fn embedded_marginal(rho: &AntisymDensity, k: usize) -> Result<Operator> {
    check_marginal_order(rho, k)?;
    let d = rho.modes();
    let dim = d.pow(k as u32);
    if dim > DENSE_CAP {
        return Err(Error::DenseCapExceeded { dim, cap: DENSE_CAP });
    }
    let mut acc = CMatrix::zeros(dim, dim);
    for (lambda, m) in weighted_reshaped_states(rho, k)? {
        acc += (&m * m.adjoint()).map(|z| z * lambda);
    }
    Ok(Operator::from_parts(Space::tensor(d, k), acc))
}

/// `W_k* D_{:k} W_k`: the marginal restricted to the antisymmetric subspace, in the
/// occupation-number basis of `k` particles. `D_{:k}` is supported there, so no
/// information is lost.
pub fn compressed_marginal(rho: &AntisymDensity, k: usize) -> Result<CMatrix> {
    check_marginal_order(rho, k)?;
    if k == rho.particles() {
        return Ok(rho.matrix().clone());
    }
    let basis_k = FockBasis::new(rho.modes(), k)?;
    let mut acc = CMatrix::zeros(basis_k.len(), basis_k.len());
    for (lambda, m) in weighted_reshaped_states(rho, k)? {
        let a = compress_rows(&basis_k, &m)?;
        acc += (&a * a.adjoint()).map(|z| z * lambda);
    }
    Ok(acc)
}

/// `D_{:n}` on `(C^d)^{⊗n}`. Orders 1 and 2 come from correlators; higher
/// orders go through the embedded state vectors.
pub fn reduced_density(rho: &AntisymDensity, n: usize) -> Result<Operator> {
    check_marginal_order(rho, n)?;
    let d = rho.modes();
    match n {
        1 => Ok(Operator::from_parts(Space::Single { d }, one_body_reduced(rho))),
        2 => Ok(Operator::from_parts(Space::Tensor { d, n: 2 }, two_body_reduced(rho)?)),
        _ => embedded_marginal(rho, n),
    }
}

/// `W_n* F^{⊗n} Σ_n W_n = n! · C_n(F)`, the compressed form of `F_n⁻`.
pub fn compressed_f_minus(f: &CMatrix, n: usize) -> Result<CMatrix> {
    let basis = FockBasis::new(f.nrows(), n)?;
    Ok(compound_matrix(f, &basis)?.map(|z| z * factorial(n)))
}

/// `‖D_{:n} − D_{:1}^{⊗n} Σ_n‖_tr`.
pub fn closure_defect(rho: &AntisymDensity, n: usize) -> Result<f64> {
    if n < 2 || n > rho.particles() {
        return Err(Error::OutOfRange(format!(
            "closure defect needs 2 ≤ n ≤ N, got n = {n}, N = {}",
            rho.particles()
        )));
    }
    let f = one_body_reduced(rho);
    // Both terms live on the antisymmetric subspace, where the trace norm is
    // unchanged by compression.
    let diff = compressed_marginal(rho, n)? - compressed_f_minus(&f, n)?;
    Ok(trace_norm(&diff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{random_fermionic_density, slater_density, SlaterOrbitals};
    use crate::random::seeded;
    use crate::tensor::{
        antisymmetrizer, max_abs_diff, operator_norm, partial_trace, signed_permutation_sum,
        tensor_power, transposition_operator,
    };
    use std::sync::Arc;

    fn dense_marginal(rho: &AntisymDensity, n: usize) -> CMatrix {
        let full = rho.embed().unwrap();
        if n == rho.particles() {
            full.into_matrix()
        } else {
            partial_trace(&full, n).unwrap().into_matrix()
        }
    }

    #[test]
    fn correlators_match_dense_partial_trace() {
        let mut rng = seeded(51);
        for (d, n) in [(3, 2), (4, 2), (4, 3), (3, 3), (2, 2)] {
            let basis = Arc::new(FockBasis::new(d, n).unwrap());
            let rho = random_fermionic_density(&basis, 3, &mut rng).unwrap();
            let d1 = one_body_reduced(&rho);
            assert!(max_abs_diff(&d1, &dense_marginal(&rho, 1)) < 1e-12, "D1 d={d} N={n}");
            let d2 = two_body_reduced(&rho).unwrap();
            assert!(max_abs_diff(&d2, &dense_marginal(&rho, 2)) < 1e-12, "D2 d={d} N={n}");
        }
    }

    #[test]
    fn embedded_marginals_match_dense_oracle() {
        let mut rng = seeded(52);
        let basis = Arc::new(FockBasis::new(4, 3).unwrap());
        let rho = random_fermionic_density(&basis, 4, &mut rng).unwrap();
        for k in 1..=3 {
            let got = embedded_marginal(&rho, k).unwrap();
            assert!(max_abs_diff(got.matrix(), &dense_marginal(&rho, k)) < 1e-12);
        }
    }

    #[test]
    fn compressed_marginal_has_the_same_trace_norm_of_differences() {
        let mut rng = seeded(53);
        let basis = Arc::new(FockBasis::new(4, 3).unwrap());
        let rho = random_fermionic_density(&basis, 2, &mut rng).unwrap();
        let f = one_body_reduced(&rho);
        let fop = Operator::new(Space::Single { d: 4 }, f.clone()).unwrap();
        for n in 2..=3 {
            let sigma = signed_permutation_sum(4, n).unwrap();
            let f_minus = tensor_power(&fop, n).unwrap().matrix() * sigma.matrix();
            let dense = trace_norm(&(dense_marginal(&rho, n) - f_minus));
            let defect = closure_defect(&rho, n).unwrap();
            assert!((dense - defect).abs() < 1e-11, "n={n}: {dense} vs {defect}");
        }
    }

    #[test]
    fn marginals_are_fermionic_densities() {
        let mut rng = seeded(54);
        let basis = Arc::new(FockBasis::new(5, 3).unwrap());
        let rho = random_fermionic_density(&basis, 5, &mut rng).unwrap();
        let d2 = two_body_reduced(&rho).unwrap();
        assert!((d2.trace().re - 1.0).abs() < 1e-12);
        let swap = transposition_operator(5, 2, 0, 1).unwrap().into_matrix();
        assert!(max_abs_diff(&(&swap * &d2), &(-&d2)) < 1e-12);
        let p = antisymmetrizer(5, 2).unwrap().into_matrix();
        assert!(max_abs_diff(&(&p * &d2 * &p), &d2) < 1e-12);
    }

    #[test]
    fn slater_formula_holds_beyond_two() {
        let mut rng = seeded(55);
        for (d, big_n) in [(5, 3), (6, 4), (6, 5)] {
            let orb = SlaterOrbitals::random(d, big_n, &mut rng);
            let rho = slater_density(&orb).unwrap();
            let f = one_body_reduced(&rho);
            for n in 1..=big_n {
                let coeff =
                    (big_n as f64).powi(n as i32) * factorial(big_n - n) / factorial(big_n);
                let expected = compressed_f_minus(&f, n).unwrap().map(|z| z * coeff);
                let got = compressed_marginal(&rho, n).unwrap();
                assert!(max_abs_diff(&got, &expected) < 1e-12, "d={d} N={big_n} n={n}");
            }
        }
    }

    #[test]
    fn slater_defect_and_norm() {
        let mut rng = seeded(56);
        for big_n in 2..=5 {
            let orb = SlaterOrbitals::random(6, big_n, &mut rng);
            let rho = slater_density(&orb).unwrap();
            let defect = closure_defect(&rho, 2).unwrap();
            assert!((defect - 1.0 / big_n as f64).abs() < 1e-10);
            let d1 = one_body_reduced(&rho);
            assert!((operator_norm(&d1) - 1.0 / big_n as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn single_particle_marginal_is_the_state() {
        let mut rng = seeded(57);
        let basis = Arc::new(FockBasis::new(4, 1).unwrap());
        let rho = random_fermionic_density(&basis, 3, &mut rng).unwrap();
        assert!(max_abs_diff(&one_body_reduced(&rho), rho.matrix()) < 1e-14);
        assert!(closure_defect(&rho, 2).is_err());
        assert!(reduced_density(&rho, 2).is_err());
    }

    #[test]
    fn mixing_increases_the_defect() {
        let a = slater_density(&SlaterOrbitals::from_modes(6, &[0, 1]).unwrap()).unwrap();
        let b = slater_density(&SlaterOrbitals::from_modes(6, &[2, 3]).unwrap()).unwrap();
        let mix = AntisymDensity::new(
            Arc::clone(a.basis()),
            (a.matrix() + b.matrix()).map(|z| z * 0.5),
        )
        .unwrap();
        let pure = closure_defect(&a, 2).unwrap();
        assert!((pure - closure_defect(&b, 2).unwrap()).abs() < 1e-14);
        assert!(closure_defect(&mix, 2).unwrap() > pure + 1e-3);
    }
}
