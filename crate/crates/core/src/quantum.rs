//! States, effects, POVMs, ensembles, and the Born-rule joint distribution.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tol;

/// A normalized pure state.
#[derive(Debug, Clone)]
pub struct PureState {
    amps: Vec<Complex64>,
}

/// Normalizes `amps` into a pure state. Vectors with squared norm below the
/// normalization floor are rejected as degenerate.
pub fn make_pure_state(amps: Vec<Complex64>) -> Result<PureState> {
    let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq < tol::STATE_NORM_FLOOR {
        return Err(Error::DegenerateState {
            norm: norm_sq.sqrt(),
        });
    }
    let inv = 1.0 / norm_sq.sqrt();
    let amps = amps.into_iter().map(|z| z * inv).collect();
    Ok(PureState { amps })
}

impl PureState {
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amps)
    }

    /// `<psi|M|psi>`, real part. The imaginary part vanishes for Hermitian
    /// `M`; callers pass effects, so it is dropped.
    pub fn expectation(&self, m: &ComplexMatrix) -> f64 {
        m.quadratic_form(&self.amps).re
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// A POVM element: Hermitian with spectrum in `[0, 1]` (within slack).
#[derive(Debug, Clone)]
pub struct Effect {
    matrix: ComplexMatrix,
    trace: f64,
}

impl Effect {
    /// Validates Hermiticity and the eigenvalue window, then caches the trace.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let residual = matrix.hermiticity_residual();
        if residual > tol::HERMITICITY {
            return Err(Error::NotHermitian { residual });
        }
        let (lo, hi) = matrix.eigenvalue_range();
        if lo < -tol::EIG_SLACK {
            return Err(Error::EffectOutOfRange { eigenvalue: lo });
        }
        if hi > 1.0 + tol::EIG_SLACK {
            return Err(Error::EffectOutOfRange { eigenvalue: hi });
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    /// Skips the spectral checks. For candidate effects whose validity is the
    /// question being asked (see [`validate_povm`]).
    pub fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        let trace = matrix.trace().re;
        Effect { matrix, trace }
    }

    /// `weight * |psi><psi|`.
    pub fn rank_one(state: &PureState, weight: f64) -> Result<Self> {
        if !(0.0..=1.0 + tol::EIG_SLACK).contains(&weight) {
            return Err(Error::EffectOutOfRange { eigenvalue: weight });
        }
        Ok(Self::from_matrix_unchecked(state.projector().scale(weight)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }
}

/// A finite-outcome POVM on a `dim`-dimensional system.
#[derive(Debug, Clone)]
pub struct Povm {
    dim: usize,
    effects: Vec<Effect>,
}

impl Povm {
    /// Builds a POVM and verifies completeness: the effects must sum to the
    /// identity within the max-entry tolerance.
    pub fn new(effects: Vec<Effect>) -> Result<Self> {
        let povm = Self::from_effects_unchecked(effects)?;
        let report = validate_povm(&povm);
        if report.completeness_residual > tol::MATRIX_EQ {
            return Err(Error::Incomplete {
                residual: report.completeness_residual,
            });
        }
        Ok(povm)
    }

    /// Builds the structure without the completeness check, so that candidate
    /// POVMs can be held and then diagnosed with [`validate_povm`].
    pub fn from_effects_unchecked(effects: Vec<Effect>) -> Result<Self> {
        let dim = match effects.first() {
            Some(e) => e.dim(),
            None => return Err(Error::EmptyPovm),
        };
        for e in &effects {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.dim(),
                });
            }
        }
        Ok(Povm { dim, effects })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }
}

/// Diagnostics from checking POVM axioms on a candidate.
#[derive(Debug, Clone)]
pub struct PovmValidation {
    /// Smallest eigenvalue across all effects (negative means a PSD failure).
    pub min_eigenvalue: f64,
    /// Largest eigenvalue across all effects (above 1 means a failure).
    pub max_eigenvalue: f64,
    /// Worst Hermiticity residual across effects.
    pub hermiticity_residual: f64,
    /// Max-entry norm of `sum(effects) - identity`.
    pub completeness_residual: f64,
}

impl PovmValidation {
    pub fn is_valid(&self) -> bool {
        self.min_eigenvalue >= -tol::EIG_SLACK
            && self.max_eigenvalue <= 1.0 + tol::EIG_SLACK
            && self.hermiticity_residual <= tol::HERMITICITY
            && self.completeness_residual <= tol::MATRIX_EQ
    }
}

/// Checks the POVM axioms entry by entry and reports the worst violations.
/// Eigenvalue checks run on the Hermitian part of each effect.
pub fn validate_povm(povm: &Povm) -> PovmValidation {
    let mut min_eig = f64::INFINITY;
    let mut max_eig = f64::NEG_INFINITY;
    let mut herm = 0.0f64;
    let mut sum = ComplexMatrix::zeros(povm.dim);
    for e in &povm.effects {
        let (lo, hi) = e.matrix().eigenvalue_range();
        min_eig = min_eig.min(lo);
        max_eig = max_eig.max(hi);
        herm = herm.max(e.matrix().hermiticity_residual());
        sum = sum.add(e.matrix());
    }
    let completeness_residual = sum.max_abs_diff(&ComplexMatrix::identity(povm.dim));
    PovmValidation {
        min_eigenvalue: min_eig,
        max_eigenvalue: max_eig,
        hermiticity_residual: herm,
        completeness_residual,
    }
}

/// An ensemble of pure states with probability weights summing to 1.
#[derive(Debug, Clone)]
pub struct Ensemble {
    dim: usize,
    states: Vec<PureState>,
    weights: Vec<f64>,
}

impl Ensemble {
    pub fn new(states: Vec<PureState>, weights: Vec<f64>) -> Result<Self> {
        if states.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: states.len(),
                right: weights.len(),
            });
        }
        let dim = match states.first() {
            Some(s) => s.dim(),
            None => return Err(Error::LengthMismatch { left: 0, right: 0 }),
        };
        for s in &states {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.dim(),
                });
            }
        }
        let mut sum = 0.0;
        for &w in &weights {
            if w < 0.0 {
                return Err(Error::NegativeWeight { weight: w });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > tol::TRACE_EQ {
            return Err(Error::BadWeightSum { sum });
        }
        Ok(Ensemble {
            dim,
            states,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Joint input/outcome distribution `p(x, y) = w_x <psi_x|pi_y|psi_x>`.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    probs: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn n_inputs(&self) -> usize {
        self.probs.len()
    }

    pub fn n_outcomes(&self) -> usize {
        self.probs.first().map_or(0, |row| row.len())
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[x][y]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.probs
    }

    /// Marginal over outcomes: `p(x)`, the ensemble weight.
    pub fn input_marginal(&self, x: usize) -> f64 {
        self.probs[x].iter().sum()
    }

    /// Marginal over inputs: `p(y)`.
    pub fn output_marginals(&self) -> Vec<f64> {
        let n_out = self.n_outcomes();
        let mut out = vec![0.0; n_out];
        for row in &self.probs {
            for (acc, p) in out.iter_mut().zip(row) {
                *acc += p;
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().map(|r| r.iter().sum::<f64>()).sum()
    }
}

/// Born rule applied to every (state, effect) pair. Probabilities that round
/// slightly negative are clamped to zero; the clamp window is an invariant,
/// not a repair of bad input.
pub fn born_joint(ensemble: &Ensemble, povm: &Povm) -> Result<JointDistribution> {
    if ensemble.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            got: ensemble.dim(),
        });
    }
    let mut probs = Vec::with_capacity(ensemble.len());
    for (state, &w) in ensemble.states().iter().zip(ensemble.weights()) {
        let mut row = Vec::with_capacity(povm.n_outcomes());
        for effect in povm.effects() {
            let p = w * state.expectation(effect.matrix());
            debug_assert!(
                p >= tol::CLAMP_NEGATIVE_PROB,
                "probability {p} below clamp window"
            );
            row.push(p.max(0.0));
        }
        probs.push(row);
    }
    Ok(JointDistribution { probs })
}

/// Projector onto the symmetric subspace of `(C^d)^{tensor k}`.
///
/// Entry formula: with row and column multi-indices `r`, `c` in base `d`,
/// the entry is `prod_i(m_i!) / k!` when `r` is a rearrangement of `c`
/// (where `m_i` counts how often digit `i` appears), and zero otherwise.
/// This is the permutation average `(1/k!) sum_sigma U_sigma` written out,
/// and gives trace `binom(d+k-1, k)` exactly.
pub fn symmetric_projector(d: usize, k: u32) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::Domain {
            what: "dimension",
            value: 0.0,
        });
    }
    if k == 0 {
        return Err(Error::UnsupportedOrder {
            t: 0,
            supported: "k >= 1",
        });
    }
    let big_dim = checked_tensor_dim(d, k)?;

    // Group basis multi-indices by their sorted digit string.
    let mut groups: HashMap<Vec<u8>, Vec<usize>> = HashMap::new();
    let mut digits = vec![0u8; k as usize];
    for index in 0..big_dim {
        let mut rest = index;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % d) as u8;
            rest /= d;
        }
        let mut key = digits.clone();
        key.sort_unstable();
        groups.entry(key).or_default().push(index);
    }

    let k_factorial: f64 = (1..=k as u64).map(|j| j as f64).product();
    let mut proj = ComplexMatrix::zeros(big_dim);
    for (key, members) in &groups {
        let mut weight = 1.0;
        let mut run = 1u64;
        for i in 1..key.len() {
            if key[i] == key[i - 1] {
                run += 1;
                weight *= run as f64;
            } else {
                run = 1;
            }
        }
        let weight = weight / k_factorial;
        for &r in members {
            for &c in members {
                *proj.at_mut(r, c) = Complex64::new(weight, 0.0);
            }
        }
    }
    Ok(proj)
}

/// `d^k` with the cap enforced.
pub fn checked_tensor_dim(d: usize, k: u32) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..k {
        acc = acc
            .checked_mul(d)
            .filter(|&v| v <= tol::TENSOR_DIM_CAP)
            .ok_or(Error::TensorCap {
                dim: d,
                power: k,
                cap: tol::TENSOR_DIM_CAP,
            })?;
    }
    Ok(acc)
}

/// Conjugates every effect by `sqrt(rho)`, producing the distorted family
/// `sqrt(rho) pi_y sqrt(rho)`. The result is a sub-POVM: its effects are PSD
/// and sum to `rho` rather than the identity.
pub fn distort_povm(povm: &Povm, rho: &ComplexMatrix) -> Result<Vec<Effect>> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            got: rho.dim(),
        });
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > tol::TRACE_EQ {
        return Err(Error::BadTrace {
            trace,
            expected: 1.0,
        });
    }
    let root = rho.sqrt_psd()?;
    let mut out = Vec::with_capacity(povm.n_outcomes());
    for effect in povm.effects() {
        let conjugated = root.mul(effect.matrix()).mul(&root).hermitian_part();
        out.push(Effect::new(conjugated)?);
    }
    Ok(out)
}
