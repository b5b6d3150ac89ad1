use crate::tensor::{binomial, factorial};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Value used for `sup_s ‖E_{N,n+m+1}(s)‖_tr` when it is not measured: `‖D‖_tr + ‖F⁻‖_tr ≤ 2`.
pub const SUP_FALLBACK: f64 = 2.0;

/// Which form of the iterated bound to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundForm {
    /// Binomial coefficients `C(n+k−1, n−1)`, with `ε` bounded by its estimate.
    #[default]
    Binomial,
    /// The coefficients `(n+k)^n / n!` used for the limit argument.
    Revisited,
}

/// `T = 2‖V‖t/ħ`.
pub fn scaled_time(vnorm: f64, t: f64, hbar: f64) -> f64 {
    2.0 * vnorm * t / hbar
}

/// Upper bound on `‖E_{N,n}(t)‖_tr` from the iterated hierarchy of differences.
///
/// `initial[k]` is the measured `‖E_{N,n+k}(0)‖_tr` for `k = 0..=m`, and
/// `f0_norm` is `‖F(0)‖`. `sup` replaces [`SUP_FALLBACK`] in the binomial form
/// when a measured supremum is available.
#[allow(clippy::too_many_arguments)]
pub fn apriori_bound(
    big_n: usize,
    n: usize,
    m: usize,
    t_scaled: f64,
    initial: &[f64],
    f0_norm: f64,
    form: BoundForm,
    sup: Option<f64>,
) -> Result<f64> {
    if t_scaled.is_nan() || t_scaled < 0.0 {
        return Err(Error::OutOfRange(format!("scaled time must be ≥ 0, got {t_scaled}")));
    }
    if t_scaled >= 1.0 {
        return Err(Error::BoundInapplicable(t_scaled));
    }
    if n == 0 || big_n < n + m + 1 {
        return Err(Error::OutOfRange(format!(
            "need 1 ≤ n and m ≤ N − n − 1, got N = {big_n}, n = {n}, m = {m}"
        )));
    }
    if initial.len() != m + 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected {} initial differences, got {}",
            m + 1,
            initial.len()
        )));
    }
    if initial.iter().chain([&f0_norm]).any(|x| x.is_nan() || *x < 0.0) {
        return Err(Error::OutOfRange("norms must be non-negative".into()));
    }
    let amplitude = 2.0 / big_n as f64 + f0_norm;
    let t = t_scaled;
    let value = match form {
        BoundForm::Binomial => {
            let coeff = |k: usize| binomial(n + k - 1, n - 1).expect("small binomial") as f64;
            let series: f64 = (0..=m)
                .map(|k| {
                    let order = (n + k) as f64;
                    let eps = initial[k] + order * order * t * amplitude;
                    coeff(k) * t.powi(k as i32) * eps
                })
                .sum();
            series + coeff(m) * t.powi(m as i32) * sup.unwrap_or(SUP_FALLBACK)
        }
        BoundForm::Revisited => {
            let nf = factorial(n);
            let p = n as i32;
            let first: f64 = (0..=m)
                .map(|k| ((n + k) as f64).powi(p) * initial[k] * t.powi(k as i32))
                .sum();
            let second: f64 = (0..=m)
                .map(|k| ((n + k) as f64).powi(p + 2) * amplitude * t.powi(k as i32 + 1))
                .sum();
            let tail = 2.0 * ((n + m) as f64).powi(p) * t.powi(m as i32);
            (first + second + tail) / nf
        }
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inapplicable_and_invalid_inputs() {
        assert!(matches!(
            apriori_bound(5, 1, 3, 1.0, &[0.0; 4], 0.2, BoundForm::Binomial, None),
            Err(Error::BoundInapplicable(_))
        ));
        assert!(apriori_bound(4, 1, 3, 0.5, &[0.0; 4], 0.2, BoundForm::Binomial, None).is_err());
        assert!(apriori_bound(5, 1, 3, 0.5, &[0.0; 3], 0.2, BoundForm::Binomial, None).is_err());
    }

    #[test]
    fn degenerates_to_the_tail_as_time_vanishes() {
        let tiny = 1e-6;
        let b = apriori_bound(10, 1, 2, tiny, &[0.0; 3], 0.0, BoundForm::Revisited, None).unwrap();
        assert!(b < 1e-4);
        let at_zero = apriori_bound(10, 2, 2, 0.0, &[0.3, 0.1, 0.2], 0.1, BoundForm::Binomial, None)
            .unwrap();
        assert!((at_zero - 0.3).abs() < 1e-15);
        let t = 0.5;
        let tails: Vec<f64> = (1..6)
            .map(|m| {
                apriori_bound(100, 1, m, t, &vec![0.0; m + 1], 0.0, BoundForm::Revisited, None)
                    .unwrap()
            })
            .collect();
        // With vanishing inputs only the amplitude 2/N and the tail remain.
        assert!(tails.last().unwrap() < &tails[0]);
    }

    #[test]
    fn monotone_in_every_input() {
        for form in [BoundForm::Binomial, BoundForm::Revisited] {
            let base = [0.1, 0.2, 0.3, 0.4];
            let b0 = apriori_bound(6, 1, 3, 0.4, &base, 0.2, form, None).unwrap();
            for k in 0..4 {
                let mut bumped = base;
                bumped[k] += 0.05;
                assert!(apriori_bound(6, 1, 3, 0.4, &bumped, 0.2, form, None).unwrap() > b0);
            }
            assert!(apriori_bound(6, 1, 3, 0.4, &base, 0.3, form, None).unwrap() > b0);
            assert!(apriori_bound(6, 1, 3, 0.5, &base, 0.2, form, None).unwrap() > b0);
        }
    }

    #[test]
    fn binomial_form_is_tighter() {
        let eps = [0.0, 0.2, 0.1, 0.05];
        let a = apriori_bound(5, 1, 3, 0.5, &eps, 0.2, BoundForm::Binomial, None).unwrap();
        let b = apriori_bound(5, 1, 3, 0.5, &eps, 0.2, BoundForm::Revisited, None).unwrap();
        assert!(a <= b);
        let a2 = apriori_bound(8, 2, 3, 0.5, &eps, 0.2, BoundForm::Binomial, None).unwrap();
        let b2 = apriori_bound(8, 2, 3, 0.5, &eps, 0.2, BoundForm::Revisited, None).unwrap();
        assert!(a2 <= b2);
    }
}
