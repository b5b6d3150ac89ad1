use crate::tensor::{binomial, CMatrix, C64};
use crate::{Error, Result};
use std::collections::HashMap;

/// Largest single-particle dimension representable by the `u64` bit-sets.
pub const MAX_MODES: usize = 63;

/// N-element subsets of the `d` modes, in lexicographic order of their sorted
/// element lists. Mode `i` (zero-based) is bit `i` of the occupation word.
#[derive(Clone, Debug)]
pub struct FockBasis {
    d: usize,
    particles: usize,
    states: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl FockBasis {
    /// `0 ≤ particles ≤ d`; the zero-particle sector is the vacuum.
    pub fn new(d: usize, particles: usize) -> Result<Self> {
        if d == 0 || d > MAX_MODES || particles > d {
            return Err(Error::InvalidParticleCount { d, n: particles });
        }
        let expected = binomial(d, particles)
            .ok_or(Error::InvalidParticleCount { d, n: particles })?;
        let mut states = Vec::with_capacity(expected);
        let mut chosen = Vec::with_capacity(particles);
        enumerate(d, particles, 0, &mut chosen, &mut states);
        debug_assert_eq!(states.len(), expected);
        let index = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        Ok(Self {
            d,
            particles,
            states,
            index,
        })
    }

    pub fn modes(&self) -> usize {
        self.d
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, k: usize) -> u64 {
        self.states[k]
    }

    pub fn index_of(&self, bits: u64) -> Option<usize> {
        self.index.get(&bits).copied()
    }

    /// Occupied modes of basis state `k`, ascending.
    pub fn occupied(&self, k: usize) -> Vec<usize> {
        occupied_modes(self.states[k])
    }
}

fn enumerate(d: usize, left: usize, start: usize, chosen: &mut Vec<usize>, out: &mut Vec<u64>) {
    if left == 0 {
        out.push(chosen.iter().fold(0u64, |acc, &i| acc | (1 << i)));
        return;
    }
    for i in start..=(d - left) {
        chosen.push(i);
        enumerate(d, left - 1, i + 1, chosen, out);
        chosen.pop();
    }
}

pub fn occupied_modes(bits: u64) -> Vec<usize> {
    (0..64).filter(|&i| bits >> i & 1 == 1).collect()
}

/// A fermionic creation or annihilation operator on one mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// `(-1)^{|{j ∈ S : j < i}|}`.
fn jordan_wigner_sign(bits: u64, i: usize) -> f64 {
    if (bits & ((1u64 << i) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Applies an operator product to `|bits⟩`, rightmost factor first.
/// Returns the sign and resulting occupation word, or `None` if it vanishes.
pub fn apply_ladder_string(ops: &[Ladder], bits: u64) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    let mut state = bits;
    for op in ops.iter().rev() {
        match *op {
            Ladder::Create(i) => {
                if state >> i & 1 == 1 {
                    return None;
                }
                sign *= jordan_wigner_sign(state, i);
                state |= 1 << i;
            }
            Ladder::Annihilate(i) => {
                if state >> i & 1 == 0 {
                    return None;
                }
                sign *= jordan_wigner_sign(state, i);
                state &= !(1 << i);
            }
        }
    }
    Some((sign, state))
}

/// Matrix of `a†_i` from the `N−1` sector to the `N` sector.
pub fn creation_matrix(lower: &FockBasis, upper: &FockBasis, mode: usize) -> Result<CMatrix> {
    if lower.modes() != upper.modes() || lower.particles() + 1 != upper.particles() {
        return Err(Error::DimensionMismatch(format!(
            "creation maps N−1 → N on a common mode set, got (d={}, N={}) → (d={}, N={})",
            lower.modes(),
            lower.particles(),
            upper.modes(),
            upper.particles()
        )));
    }
    if mode >= lower.modes() {
        return Err(Error::OutOfRange(format!("mode {mode} outside 0..{}", lower.modes())));
    }
    let mut m = CMatrix::zeros(upper.len(), lower.len());
    for (col, &bits) in lower.states().iter().enumerate() {
        if let Some((sign, out)) = apply_ladder_string(&[Ladder::Create(mode)], bits) {
            let row = upper.index_of(out).expect("creation stays in the upper sector");
            m[(row, col)] = C64::new(sign, 0.0);
        }
    }
    Ok(m)
}

/// Matrix of `a_i` from the `N` sector to the `N−1` sector.
pub fn annihilation_matrix(upper: &FockBasis, lower: &FockBasis, mode: usize) -> Result<CMatrix> {
    Ok(creation_matrix(lower, upper, mode)?.adjoint())
}
