//! Concrete POVMs, their design orders, and related constructions.
//!
//! A POVM `{pi_y}` on dimension d has design order t when, for every
//! `k <= t`, the k-th moment matrix
//!
//! ```text
//!     M_k = sum_y pi_y^{tensor k} / Tr[pi_y]^{k-1}
//! ```
//!
//! equals `d / binom(d+k-1, k)` times the projector onto the symmetric
//! subspace of `(C^d)^{tensor k}`. For rank-one qubit POVMs with equal
//! weights this reduces to the Bloch vectors forming a spherical k-design,
//! which is how the solids below earn their orders: tetrahedron 2,
//! octahedron 3, icosahedron 5.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::quantum::{
    checked_tensor_dim, make_pure_state, symmetric_projector, Effect, Ensemble, Povm, PureState,
};
use crate::tol;

/// Unit Bloch vector to qubit state: `(cos(theta/2), e^{i phi} sin(theta/2))`.
pub fn bloch_state(n: [f64; 3]) -> PureState {
    let [nx, ny, nz] = n;
    let theta = nz.clamp(-1.0, 1.0).acos();
    let phi = ny.atan2(nx);
    let half = theta / 2.0;
    let amps = vec![
        Complex64::new(half.cos(), 0.0),
        Complex64::from_polar(half.sin(), phi),
    ];
    // Construction already yields a unit vector unless n was antiparallel to
    // numeric noise; make_pure_state cannot fail on it.
    make_pure_state(amps).expect("Bloch construction yields a unit vector")
}

/// Bloch direction of a qubit effect: `n_i = Tr[pi sigma_i] / Tr[pi]`.
/// Unit length exactly when the effect is rank one.
pub fn bloch_vector(effect: &Effect) -> Result<[f64; 3]> {
    if effect.dim() != 2 {
        return Err(Error::NotQubit { dim: effect.dim() });
    }
    let tr = effect.trace();
    if tr < tol::STATE_NORM_FLOOR {
        return Err(Error::Domain {
            what: "effect trace",
            value: tr,
        });
    }
    let m = effect.matrix();
    let nx = (m.at(0, 1) + m.at(1, 0)).re;
    let ny = (Complex64::i() * (m.at(0, 1) - m.at(1, 0))).re;
    let nz = (m.at(0, 0) - m.at(1, 1)).re;
    Ok([nx / tr, ny / tr, nz / tr])
}

fn equal_weight_qubit_povm(directions: &[[f64; 3]]) -> Povm {
    let weight = 2.0 / directions.len() as f64;
    let effects = directions
        .iter()
        .map(|&n| {
            let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            let unit = [n[0] / norm, n[1] / norm, n[2] / norm];
            Effect::rank_one(&bloch_state(unit), weight).expect("weight is in range")
        })
        .collect();
    Povm::new(effects).expect("directions sum to zero, so effects sum to identity")
}

/// The d-outcome projective measurement onto the computational basis.
pub fn basis_povm(d: usize) -> Result<Povm> {
    if d == 0 {
        return Err(Error::Domain {
            what: "dimension",
            value: 0.0,
        });
    }
    let effects = (0..d)
        .map(|i| {
            let mut amps = vec![Complex64::ZERO; d];
            amps[i] = Complex64::ONE;
            Effect::rank_one(&make_pure_state(amps).unwrap(), 1.0).unwrap()
        })
        .collect();
    Povm::new(effects)
}

/// Qubit SIC POVM: four effects along the tetrahedron directions, pairwise
/// state overlaps 1/3. Design order 2.
pub fn tetrahedron_povm() -> Povm {
    let s = 1.0 / 3f64.sqrt();
    equal_weight_qubit_povm(&[[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]])
}

/// Three mutually unbiased qubit bases glued into one six-outcome POVM
/// along the coordinate axes. Design order 3.
pub fn octahedron_povm() -> Povm {
    equal_weight_qubit_povm(&[
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ])
}

/// Twelve effects along the icosahedron vertices. Design order 5.
pub fn icosahedron_povm() -> Povm {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut dirs = Vec::with_capacity(12);
    for &a in &[1.0f64, -1.0] {
        for &b in &[g, -g] {
            dirs.push([0.0, a, b]);
            dirs.push([a, b, 0.0]);
            dirs.push([b, 0.0, a]);
        }
    }
    equal_weight_qubit_povm(&dirs)
}

/// Qutrit SIC POVM: the Weyl-Heisenberg orbit of the fiducial
/// `(0, 1, -1)/sqrt(2)`, nine effects with pairwise overlaps 1/4.
/// Design order 2.
pub fn qutrit_sic_povm() -> Povm {
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    let fiducial = [
        Complex64::ZERO,
        Complex64::new(inv_sqrt2, 0.0),
        Complex64::new(-inv_sqrt2, 0.0),
    ];
    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let mut effects = Vec::with_capacity(9);
    for a in 0..3usize {
        for b in 0..3u32 {
            // (X^a Z^b f)[j] = omega^(b (j-a)) f[j-a], indices mod 3.
            let mut amps = vec![Complex64::ZERO; 3];
            for (j, amp) in amps.iter_mut().enumerate() {
                let src = (j + 3 - a) % 3;
                *amp = omega.powu(b * src as u32) * fiducial[src];
            }
            let state = make_pure_state(amps).unwrap();
            effects.push(Effect::rank_one(&state, 1.0 / 3.0).unwrap());
        }
    }
    Povm::new(effects).expect("Weyl-Heisenberg orbit averages to the identity")
}

/// A state drawn from the unitarily invariant measure: normalized vector of
/// independent standard complex Gaussians.
pub fn haar_random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PureState> {
    if d == 0 {
        return Err(Error::Domain {
            what: "dimension",
            value: 0.0,
        });
    }
    let amps = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    make_pure_state(amps)
}

/// The ensemble that pairs each rank-one qubit effect with the orthogonal
/// (antipodal) state, weighted by `Tr[pi_x] / d`. Measuring it with the same
/// POVM puts zero mass on the diagonal, which is what makes the upper bound
/// on informational power attainable for the solids.
pub fn antipodal_ensemble(povm: &Povm) -> Result<Ensemble> {
    if povm.dim() != 2 {
        return Err(Error::NotQubit { dim: povm.dim() });
    }
    let mut states = Vec::with_capacity(povm.n_outcomes());
    let mut weights = Vec::with_capacity(povm.n_outcomes());
    for (index, effect) in povm.effects().iter().enumerate() {
        let n = bloch_vector(effect).map_err(|_| Error::NotRankOne {
            index,
            deviation: 1.0,
        })?;
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let deviation = (len - 1.0).abs();
        if deviation > 1e-9 {
            return Err(Error::NotRankOne { index, deviation });
        }
        states.push(bloch_state([-n[0], -n[1], -n[2]]));
        weights.push(effect.trace() / 2.0);
    }
    Ensemble::new(states, weights)
}

/// `C_k(povm, psi) = sum_y <psi|pi_y|psi>^k / Tr[pi_y]^{k-1}`.
///
/// For a POVM of design order t and any pure state, this is the constant
/// `d / binom(d+k-1, k)` whenever `k <= t`.
pub fn index_of_coincidence(povm: &Povm, state: &PureState, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::UnsupportedOrder {
            t: 0,
            supported: "k >= 1",
        });
    }
    if state.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            got: state.dim(),
        });
    }
    let mut acc = 0.0;
    for effect in povm.effects() {
        let tr = effect.trace();
        if tr <= tol::STATE_NORM_FLOOR {
            continue; // zero effect contributes nothing
        }
        let p = state.expectation(effect.matrix());
        acc += p.powi(k as i32) / tr.powi(k as i32 - 1);
    }
    Ok(acc)
}

/// Per-order residuals of the moment condition, for `k = 1..=t`.
#[derive(Debug, Clone)]
pub struct DesignCheckReport {
    pub dim: usize,
    pub t: u32,
    /// Max-entry residual `|M_k - d/binom(d+k-1,k) P_sym|` at index `k-1`.
    pub residuals: Vec<f64>,
    pub tolerance: f64,
}

impl DesignCheckReport {
    pub fn passes(&self, k: u32) -> bool {
        self.residuals[(k - 1) as usize] <= self.tolerance
    }

    /// True when every order up to t passes.
    pub fn is_design(&self) -> bool {
        (1..=self.t).all(|k| self.passes(k))
    }

    /// Largest order m with all of `1..=m` passing.
    pub fn order(&self) -> u32 {
        let mut m = 0;
        for k in 1..=self.t {
            if !self.passes(k) {
                break;
            }
            m = k;
        }
        m
    }
}

fn tensor_power(m: &ComplexMatrix, k: u32) -> ComplexMatrix {
    let mut acc = m.clone();
    for _ in 1..k {
        acc = acc.kron(m);
    }
    acc
}

fn binom_f64(n: usize, k: u32) -> f64 {
    (1..=k as usize)
        .map(|j| (n - k as usize + j) as f64 / j as f64)
        .product()
}

/// Tests the moment condition at every order up to `t`.
/// Fails with a cap error when `d^t` exceeds the tensor cap.
pub fn check_t_design(povm: &Povm, t: u32) -> Result<DesignCheckReport> {
    if t == 0 {
        return Err(Error::UnsupportedOrder {
            t: 0,
            supported: "t >= 1",
        });
    }
    let d = povm.dim();
    checked_tensor_dim(d, t)?;
    let mut residuals = Vec::with_capacity(t as usize);
    for k in 1..=t {
        let big_dim = checked_tensor_dim(d, k)?;
        let mut moment = ComplexMatrix::zeros(big_dim);
        for effect in povm.effects() {
            let tr = effect.trace();
            if tr <= tol::STATE_NORM_FLOOR {
                continue;
            }
            let scale = 1.0 / tr.powi(k as i32 - 1);
            moment.add_scaled_assign(&tensor_power(effect.matrix(), k), scale);
        }
        let target = symmetric_projector(d, k)?.scale(d as f64 / binom_f64(d + k as usize - 1, k));
        residuals.push(moment.max_abs_diff(&target));
    }
    Ok(DesignCheckReport {
        dim: d,
        t,
        residuals,
        tolerance: tol::DESIGN_RESIDUAL,
    })
}

/// Largest design order up to `t_max`, testing consecutively from k = 1.
pub fn design_order(povm: &Povm, t_max: u32) -> Result<u32> {
    Ok(check_t_design(povm, t_max)?.order())
}
