//! Seeded random operators for experiments and tests.

use crate::tensor::{
    hermitian_part, operator_norm, transposition_operator, CMatrix, Operator, Space, C64,
};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};

pub type SeededRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut SeededRng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// `rows × cols` matrix with iid standard complex Gaussian entries.
pub fn random_rect(rows: usize, cols: usize, rng: &mut SeededRng) -> CMatrix {
    // Fill row by row so the stream order is independent of storage order.
    let data: Vec<C64> = (0..rows * cols).map(|_| gaussian(rng)).collect();
    CMatrix::from_row_slice(rows, cols, &data)
}

pub fn random_matrix(dim: usize, rng: &mut SeededRng) -> CMatrix {
    random_rect(dim, dim, rng)
}

pub fn random_hermitian(dim: usize, rng: &mut SeededRng) -> CMatrix {
    hermitian_part(&random_matrix(dim, rng))
}

/// `d × n` matrix with orthonormal columns (`n ≤ d`).
pub fn random_orthonormal(d: usize, n: usize, rng: &mut SeededRng) -> CMatrix {
    assert!(n <= d, "cannot fit {n} orthonormal vectors in dimension {d}");
    let q = random_rect(d, n, rng).qr().q();
    q.columns(0, n).into_owned()
}

pub fn random_unitary(dim: usize, rng: &mut SeededRng) -> CMatrix {
    random_orthonormal(dim, dim, rng)
}

/// Random Hermitian one-body operator scaled to unit operator norm.
pub fn random_one_body(d: usize, rng: &mut SeededRng) -> Operator {
    let h = random_hermitian(d, rng);
    let norm = operator_norm(&h);
    Operator::new(Space::Single { d }, h.map(|z| z / norm)).expect("shape is consistent")
}

/// Random bounded pair potential: Hermitian, symmetrized under `U_(12)`,
/// and scaled to operator norm `norm` (zero gives the zero potential).
pub fn random_pair_potential(d: usize, norm: f64, rng: &mut SeededRng) -> Result<Operator> {
    let h = random_hermitian(d * d, rng);
    let swap = transposition_operator(d, 2, 0, 1)?.into_matrix();
    let sym = (&h + &swap * &h * &swap).map(|z| z * 0.5);
    let current = operator_norm(&sym);
    let scaled = sym.map(|z| z * (norm / current));
    Operator::new(Space::Tensor { d, n: 2 }, hermitian_part(&scaled))
}

/// Random full-rank density operator on `C^d`.
pub fn random_density(d: usize, rng: &mut SeededRng) -> CMatrix {
    let g = random_matrix(d, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    hermitian_part(&w.map(|z| z / tr))
}

/// Weights drawn from the flat Dirichlet distribution on `k` outcomes.
pub fn dirichlet_weights(k: usize, rng: &mut SeededRng) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}
