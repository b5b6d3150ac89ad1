use super::{hermitian_part, max_abs_diff, CMatrix, C64};
use nalgebra::DVector;

/// Singular values of `t`, up to order.
///
/// Hermitian and anti-Hermitian inputs are diagonalized directly; anything
/// else goes through the Hermitian dilation `[[0, T], [T*, 0]]`, whose
/// eigenvalues are `±σ_k`.
fn singular_values(t: &CMatrix) -> Vec<f64> {
    let scale = t.iter().fold(0.0f64, |acc, z| acc.max(z.norm())).max(f64::MIN_POSITIVE);
    let adj = t.adjoint();
    if max_abs_diff(t, &adj) <= 1e-15 * scale {
        return eigen_moduli(&hermitian_part(t));
    }
    if max_abs_diff(t, &(-&adj)) <= 1e-15 * scale {
        return eigen_moduli(&hermitian_part(&t.map(|z| z * C64::i())));
    }
    let (r, c) = t.shape();
    let mut dilation = CMatrix::zeros(r + c, r + c);
    dilation.view_mut((0, r), (r, c)).copy_from(t);
    dilation.view_mut((r, 0), (c, r)).copy_from(&adj);
    let ev: DVector<f64> = dilation.symmetric_eigenvalues();
    let mut pos: Vec<f64> = ev.iter().map(|x| x.abs()).collect();
    // The spectrum is symmetric about zero; each σ appears twice.
    pos.sort_by(|a, b| b.total_cmp(a));
    pos.into_iter().step_by(2).take(r.min(c)).collect()
}

fn eigen_moduli(h: &CMatrix) -> Vec<f64> {
    h.symmetric_eigenvalues().iter().map(|x| x.abs()).collect()
}

/// `‖T‖_tr`: the sum of singular values.
pub fn trace_norm(t: &CMatrix) -> f64 {
    if t.is_empty() {
        return 0.0;
    }
    singular_values(t).iter().sum()
}

/// `‖T‖`: the largest singular value.
pub fn operator_norm(t: &CMatrix) -> f64 {
    if t.is_empty() {
        return 0.0;
    }
    singular_values(t).into_iter().fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
