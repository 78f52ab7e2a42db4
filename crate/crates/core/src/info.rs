//! Mutual information, its maximization over input ensembles, and the
//! tightness reports that compare achieved values against the hierarchy.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bounds::{closed_form_bound, Order};
use crate::designs::{antipodal_ensemble, check_t_design};
use crate::error::{Error, Result};
use crate::quantum::{born_joint, make_pure_state, Ensemble, Povm};
use crate::tol;

/// Kullback-Leibler divergence `sum p ln(p/q)` in nats.
///
/// Terms with `p_i = 0` contribute zero. A positive `p_i` over `q_i = 0`
/// makes the divergence infinite, reported as `f64::INFINITY`.
pub fn relative_entropy(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += pi * (pi / qi).ln();
    }
    Ok(acc)
}

/// Mutual information, in nats, of the joint distribution the POVM induces
/// on the ensemble. Always finite and nonnegative: a zero output marginal
/// forces every joint entry in that column to zero.
pub fn mutual_information(ensemble: &Ensemble, povm: &Povm) -> Result<f64> {
    let joint = born_joint(ensemble, povm)?;
    Ok(mi_of_rows(joint.rows()))
}

fn mi_of_rows(rows: &[Vec<f64>]) -> f64 {
    let n_out = rows.first().map_or(0, |r| r.len());
    let mut out_marginal = vec![0.0f64; n_out];
    for row in rows {
        for (acc, &p) in out_marginal.iter_mut().zip(row) {
            *acc += p;
        }
    }
    let mut mi = 0.0;
    for row in rows {
        let in_marginal: f64 = row.iter().sum();
        if in_marginal <= 0.0 {
            continue;
        }
        for (&p, &py) in row.iter().zip(&out_marginal) {
            if p > 0.0 {
                mi += p * (p / (in_marginal * py)).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Controls for the ensemble search in [`maximize_mutual_information`].
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Independent random initializations; the best result wins.
    pub restarts: u32,
    pub seed: u64,
    /// First coordinate step of the pattern search.
    pub initial_step: f64,
    /// The search stops once the step shrinks below this.
    pub step_floor: f64,
    /// Safety cap on pattern-search sweeps per restart.
    pub max_sweeps: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 32,
            seed: 7,
            initial_step: 0.35,
            step_floor: 1e-9,
            max_sweeps: 400,
        }
    }
}

/// Optimization state: d^2 candidate states as raw amplitude coordinates
/// plus softmax weight logits, flattened into one parameter vector.
struct SearchSpace {
    dim: usize,
    n_states: usize,
}

impl SearchSpace {
    fn n_params(&self) -> usize {
        self.n_states * (2 * self.dim + 1)
    }

    /// Returns (normalized amplitude vectors, weights), or None when some
    /// state vector is numerically zero.
    fn decode(&self, params: &[f64]) -> Option<(Vec<Vec<Complex64>>, Vec<f64>)> {
        let mut states = Vec::with_capacity(self.n_states);
        for s in 0..self.n_states {
            let base = s * 2 * self.dim;
            let mut amps = Vec::with_capacity(self.dim);
            let mut norm_sq = 0.0;
            for j in 0..self.dim {
                let z = Complex64::new(params[base + 2 * j], params[base + 2 * j + 1]);
                norm_sq += z.norm_sqr();
                amps.push(z);
            }
            if norm_sq < tol::STATE_NORM_FLOOR {
                return None;
            }
            let inv = 1.0 / norm_sq.sqrt();
            for z in amps.iter_mut() {
                *z *= inv;
            }
            states.push(amps);
        }
        let logit_base = self.n_states * 2 * self.dim;
        let logits = &params[logit_base..logit_base + self.n_states];
        let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = logits.iter().map(|&l| (l - top).exp()).collect();
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        Some((states, weights))
    }
}

/// Searches for the ensemble of at most d^2 pure states maximizing the
/// mutual information extracted by `povm`. Pattern search over amplitude
/// and weight-logit coordinates with shrinking steps, restarted from
/// seeded random ensembles; deterministic for a fixed config.
///
/// The d^2 cap on ensemble size is lossless: an optimal ensemble of that
/// size always exists. Dimensions above `tol::MI_DIM_CAP` are rejected.
pub fn maximize_mutual_information(povm: &Povm, config: &SearchConfig) -> Result<(Ensemble, f64)> {
    let dim = povm.dim();
    if dim > tol::MI_DIM_CAP {
        return Err(Error::SearchDimCap {
            dim,
            cap: tol::MI_DIM_CAP,
        });
    }
    if config.restarts == 0 {
        return Err(Error::OptimizerFailed("restarts must be positive".into()));
    }
    let space = SearchSpace {
        dim,
        n_states: dim * dim,
    };
    let effects: Vec<&crate::matrix::ComplexMatrix> =
        povm.effects().iter().map(|e| e.matrix()).collect();

    let objective = |params: &[f64], rows: &mut Vec<Vec<f64>>| -> f64 {
        match space.decode(params) {
            None => f64::NEG_INFINITY,
            Some((states, weights)) => {
                rows.clear();
                for (amps, &w) in states.iter().zip(&weights) {
                    let row: Vec<f64> = effects
                        .iter()
                        .map(|m| (w * m.quadratic_form(amps).re).max(0.0))
                        .collect();
                    rows.push(row);
                }
                mi_of_rows(rows)
            }
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut scratch: Vec<Vec<f64>> = Vec::new();
    let mut best_params: Option<Vec<f64>> = None;
    let mut best_value = f64::NEG_INFINITY;

    for _ in 0..config.restarts {
        let mut params = vec![0.0f64; space.n_params()];
        for slot in params.iter_mut().take(space.n_states * 2 * dim) {
            *slot = rng.sample(StandardNormal);
        }
        // Weight logits start uniform (zero).
        let mut value = objective(&params, &mut scratch);
        let mut step = config.initial_step;
        let mut sweeps = 0;
        while step >= config.step_floor && sweeps < config.max_sweeps {
            sweeps += 1;
            let mut improved = false;
            for i in 0..params.len() {
                let original = params[i];
                params[i] = original + step;
                let up = objective(&params, &mut scratch);
                if up > value {
                    value = up;
                    improved = true;
                    continue;
                }
                params[i] = original - step;
                let down = objective(&params, &mut scratch);
                if down > value {
                    value = down;
                    improved = true;
                    continue;
                }
                params[i] = original;
            }
            if !improved {
                step *= 0.5;
            }
        }
        if value > best_value {
            best_value = value;
            best_params = Some(params);
        }
    }

    let params = best_params.ok_or_else(|| {
        Error::OptimizerFailed("all restarts failed to produce an ensemble".into())
    })?;
    let (states, weights) = space.decode(&params).ok_or_else(|| {
        Error::OptimizerFailed("best parameters decode to a degenerate state".into())
    })?;
    let states = states
        .into_iter()
        .map(make_pure_state)
        .collect::<Result<Vec<_>>>()?;
    let ensemble = Ensemble::new(states, weights)?;
    Ok((ensemble, best_value))
}

/// Comparison of the hierarchy bound against an achieving ensemble.
#[derive(Debug, Clone)]
pub struct TightnessReport {
    pub povm_label: String,
    pub design_t: u32,
    pub bound_nats: f64,
    pub achieved_nats: f64,
    /// `bound - achieved`; zero up to numerics when the bound is tight.
    pub gap: f64,
}

/// Verifies that `povm` really is a t-design, evaluates W_t at its
/// dimension, and produces the best ensemble value this crate can certify:
/// the antipodal ensemble for rank-one qubit POVMs (exact at the optimum),
/// the numeric search otherwise.
pub fn tightness_report(
    povm: &Povm,
    label: &str,
    t: u32,
    config: &SearchConfig,
) -> Result<TightnessReport> {
    let check = check_t_design(povm, t)?;
    if !check.is_design() {
        let failed_k = (1..=t).find(|&k| !check.passes(k)).unwrap_or(t);
        return Err(Error::NotADesign {
            t,
            failed_k,
            residual: check.residuals[(failed_k - 1) as usize],
        });
    }
    let bound = closed_form_bound(povm.dim() as u32, Order::Finite(t))?;
    let achieved = match antipodal_ensemble(povm) {
        Ok(ensemble) => mutual_information(&ensemble, povm)?,
        Err(_) => maximize_mutual_information(povm, config)?.1,
    };
    Ok(TightnessReport {
        povm_label: label.to_string(),
        design_t: t,
        bound_nats: bound.nats,
        achieved_nats: achieved,
        gap: bound.nats - achieved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{octahedron_povm, qutrit_sic_povm, tetrahedron_povm};
    use crate::quantum::make_pure_state;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // ===== relative entropy =====

    #[test]
    fn relative_entropy_basics() {
        let p = [0.5, 0.5];
        assert_eq!(relative_entropy(&p, &p).unwrap(), 0.0);
        let q = [0.25, 0.75];
        let d = relative_entropy(&p, &q).unwrap();
        let expected = 0.5 * (2.0f64).ln() + 0.5 * (2.0 / 3.0f64).ln();
        assert!((d - expected).abs() < 1e-15);
        assert!(d > 0.0);
    }

    #[test]
    fn relative_entropy_support_mismatch_is_infinite() {
        let p = [0.5, 0.5];
        let q = [1.0, 0.0];
        assert_eq!(relative_entropy(&p, &q).unwrap(), f64::INFINITY);
        // The other direction stays finite: 0 ln(0/q) = 0.
        assert!((relative_entropy(&q, &p).unwrap() - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn relative_entropy_rejects_length_mismatch() {
        assert!(matches!(
            relative_entropy(&[1.0], &[0.5, 0.5]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    // ===== mutual information =====

    #[test]
    fn orthogonal_states_read_out_perfectly() {
        let s0 = make_pure_state(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let s1 = make_pure_state(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let ensemble = Ensemble::new(vec![s0, s1], vec![0.5, 0.5]).unwrap();
        let povm = crate::designs::basis_povm(2).unwrap();
        let mi = mutual_information(&ensemble, &povm).unwrap();
        assert!((mi - 2.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn antipodal_tetrahedron_hits_the_order_two_bound() {
        let povm = tetrahedron_povm();
        let ensemble = antipodal_ensemble(&povm).unwrap();
        let mi = mutual_information(&ensemble, &povm).unwrap();
        assert!((mi - (4.0f64 / 3.0).ln()).abs() < 1e-13);
    }

    #[test]
    fn antipodal_octahedron_hits_the_order_three_bound() {
        let povm = octahedron_povm();
        let ensemble = antipodal_ensemble(&povm).unwrap();
        let mi = mutual_information(&ensemble, &povm).unwrap();
        assert!((mi - 4.0f64.ln() / 6.0).abs() < 1e-13);
    }

    // ===== maximization =====

    #[test]
    fn search_reaches_the_tetrahedron_optimum() {
        let povm = tetrahedron_povm();
        let config = SearchConfig {
            restarts: 6,
            seed: 7,
            ..Default::default()
        };
        let (ensemble, value) = maximize_mutual_information(&povm, &config).unwrap();
        let target = (4.0f64 / 3.0).ln();
        assert!(value <= target + 1e-9, "exceeded the bound: {value}");
        assert!(value >= target - 1e-6, "fell short of the optimum: {value}");
        assert_eq!(ensemble.dim(), 2);
        assert_eq!(ensemble.len(), 4);
    }

    #[test]
    fn search_rejects_large_dimensions() {
        let povm = crate::designs::basis_povm(5).unwrap();
        assert!(matches!(
            maximize_mutual_information(&povm, &SearchConfig::default()),
            Err(Error::SearchDimCap { dim: 5, .. })
        ));
    }

    // ===== tightness =====

    #[test]
    fn tetrahedron_tightness_gap_vanishes() {
        let povm = tetrahedron_povm();
        let report = tightness_report(&povm, "tetrahedron", 2, &SearchConfig::default()).unwrap();
        assert!(report.gap.abs() < 1e-9, "gap {}", report.gap);
        assert_eq!(report.design_t, 2);
    }

    #[test]
    fn tightness_rejects_overclaimed_order() {
        let povm = tetrahedron_povm();
        let err = tightness_report(&povm, "tetrahedron", 3, &SearchConfig::default());
        match err {
            Err(Error::NotADesign {
                t: 3,
                failed_k: 3,
                residual,
            }) => {
                assert!(residual > 1e-6)
            }
            other => panic!("expected NotADesign, got {other:?}"),
        }
    }

    #[test]
    fn qutrit_sic_search_approaches_its_bound() {
        let povm = qutrit_sic_povm();
        let config = SearchConfig {
            restarts: 8,
            seed: 7,
            ..Default::default()
        };
        let report = tightness_report(&povm, "qutrit-sic", 2, &config).unwrap();
        let target = 1.5f64.ln();
        assert!((report.bound_nats - target).abs() < 1e-14);
        assert!(report.achieved_nats <= target + 1e-9);
        assert!(
            report.achieved_nats >= target - 1e-4,
            "achieved only {} of {}",
            report.achieved_nats,
            target
        );
    }
}
