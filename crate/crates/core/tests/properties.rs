//! Randomized invariants: Born-rule distributions are distributions,
//! information quantities respect their known ranges, Hermite envelopes
//! stay below eta, and no knot choice beats the closed-form optimum.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdesign_core::{
    basis_povm, born_joint, bound_from_knots, closed_form_bound, eta, haar_random_state,
    hermite_lower_polynomial, index_of_coincidence, mutual_information, octahedron_povm,
    qutrit_sic_povm, relative_entropy, symmetric_projector, tetrahedron_povm, verify_lower_bound,
    Ensemble, Order, Povm,
};

fn random_ensemble(dim: usize, n: usize, seed: u64) -> Ensemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = (0..n)
        .map(|_| haar_random_state(dim, &mut rng).unwrap())
        .collect::<Vec<_>>();
    let mut weights = (0..n)
        .map(|_| rand::Rng::random_range(&mut rng, 0.1..1.0))
        .collect::<Vec<f64>>();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ensemble::new(states, weights).unwrap()
}

fn povm_for(dim: usize, pick: u8) -> Povm {
    match (dim, pick % 3) {
        (2, 0) => tetrahedron_povm(),
        (2, 1) => octahedron_povm(),
        (2, _) => basis_povm(2).unwrap(),
        (3, 0) => qutrit_sic_povm(),
        (3, _) => basis_povm(3).unwrap(),
        _ => unreachable!("test dims are 2 and 3"),
    }
}

fn sorted_knots(raw: &[f64]) -> Vec<f64> {
    let mut knots = raw.to_vec();
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots
}

fn gaps_ok(knots: &[f64]) -> bool {
    knots.windows(2).all(|w| w[1] - w[0] > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn born_joint_is_a_probability_distribution(
        dim in 2usize..=3,
        n in 2usize..=4,
        seed in any::<u64>(),
        pick in 0u8..6,
    ) {
        let ensemble = random_ensemble(dim, n, seed);
        let povm = povm_for(dim, pick);
        let joint = born_joint(&ensemble, &povm).unwrap();
        for row in joint.rows() {
            for &p in row {
                prop_assert!(p >= 0.0);
            }
        }
        prop_assert!((joint.total() - 1.0).abs() < 1e-10);
        let marg: f64 = joint.output_marginals().iter().sum();
        prop_assert!((marg - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mutual_information_respects_its_range(
        dim in 2usize..=3,
        n in 2usize..=4,
        seed in any::<u64>(),
        pick in 0u8..6,
    ) {
        let ensemble = random_ensemble(dim, n, seed);
        let povm = povm_for(dim, pick);
        let mi = mutual_information(&ensemble, &povm).unwrap();
        let cap = (n.min(povm.n_outcomes()) as f64).ln();
        prop_assert!(mi >= 0.0);
        prop_assert!(mi <= cap + 1e-10);
    }

    #[test]
    fn relative_entropy_is_nonnegative_and_zero_on_equal(
        raw_p in prop::collection::vec(0.05f64..1.0, 2..6),
        raw_q in prop::collection::vec(0.05f64..1.0, 2..6),
    ) {
        prop_assume!(raw_p.len() == raw_q.len());
        let norm = |v: &[f64]| {
            let s: f64 = v.iter().sum();
            v.iter().map(|x| x / s).collect::<Vec<_>>()
        };
        let p = norm(&raw_p);
        let q = norm(&raw_q);
        prop_assert!(relative_entropy(&p, &q).unwrap() >= -1e-15);
        prop_assert!(relative_entropy(&p, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn eta_stays_within_its_known_range(x in 0.0f64..=1.0) {
        let v = eta(x).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!(v <= (-1.0f64).exp() + 1e-15);
    }

    #[test]
    fn coincidence_index_of_a_design_ignores_the_state(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = haar_random_state(2, &mut rng).unwrap();
        let c2 = index_of_coincidence(&tetrahedron_povm(), &state, 2).unwrap();
        prop_assert!((c2 - 2.0 / 3.0).abs() < 1e-10);
        let c3 = index_of_coincidence(&octahedron_povm(), &state, 3).unwrap();
        prop_assert!((c3 - 0.5).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn symmetric_projector_is_idempotent(d in 2usize..=4, k in 1u32..=3) {
        let p = symmetric_projector(d, k).unwrap();
        let diff = p.mul(&p).max_abs_diff(&p);
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn order_two_envelope_matches_the_closed_form(x1 in 0.02f64..0.98) {
        let poly = hermite_lower_polynomial(2, &[x1]).unwrap();
        prop_assert!((poly.coeffs[0] - (1.0 - x1.ln())).abs() < 1e-10);
        prop_assert!((poly.coeffs[1] + 1.0 / x1).abs() < 1e-10);
    }

    #[test]
    fn hermite_envelope_never_exceeds_eta(
        t in 2u32..=6,
        raw in prop::collection::vec(0.02f64..0.98, 3),
    ) {
        let m = (t / 2) as usize;
        let knots = sorted_knots(&raw[..m]);
        prop_assume!(gaps_ok(&knots));
        let poly = hermite_lower_polynomial(t, &knots).unwrap();
        for &x in &knots {
            prop_assert!((poly.eval(x) - eta(x).unwrap()).abs() < 1e-9);
        }
        let worst = verify_lower_bound(&poly, 2001).unwrap();
        prop_assert!(worst <= 1e-9);
    }

    #[test]
    fn no_knot_choice_beats_the_closed_form_bound(
        d in 2u32..=6,
        t in 2u32..=5,
        raw in prop::collection::vec(0.02f64..0.98, 2),
    ) {
        let m = (t / 2) as usize;
        let knots = sorted_knots(&raw[..m]);
        prop_assume!(gaps_ok(&knots));
        let loose = bound_from_knots(d, t, &knots).unwrap();
        let tight = closed_form_bound(d, Order::Finite(t)).unwrap().nats;
        prop_assert!(loose >= tight - 1e-12);
    }
}
