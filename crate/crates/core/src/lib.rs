//! Quantum t-design POVMs and the hierarchy of upper bounds they place on
//! informational power.
//!
//! The crate has three layers:
//!
//! * finite-dimensional quantum objects: states, effects, POVMs, ensembles,
//!   Born-rule joint distributions, symmetric-subspace projectors
//!   ([`quantum`], [`matrix`]);
//! * concrete designs and their certification: the tetrahedron, octahedron,
//!   and icosahedron qubit POVMs, the qutrit SIC, basis measurements, moment
//!   checks, and the index of coincidence ([`designs`]);
//! * the bound hierarchy: Hermite lower envelopes of `-x ln x`, the induced
//!   bounds W_t(d) with closed forms for t <= 5 and the infinite limit,
//!   numeric knot optimization, mutual-information maximization, and
//!   tightness reports ([`interp`], [`bounds`], [`info`]).
//!
//! [`json`] carries the serialization formats used by the CLI and stored
//! test fixtures.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod designs;
pub mod error;
pub mod info;
pub mod interp;
pub mod json;
pub mod matrix;
pub mod quantum;
pub mod tol;

pub use bounds::{
    asymptote, bound_from_knots, closed_form_bound, optimal_knots_closed_form, optimize_knots,
    subentropy_bound, BoundResult, BoundSource, Order,
};
pub use designs::{
    antipodal_ensemble, basis_povm, bloch_state, bloch_vector, check_t_design, design_order,
    haar_random_state, icosahedron_povm, index_of_coincidence, octahedron_povm, qutrit_sic_povm,
    tetrahedron_povm, DesignCheckReport,
};
pub use error::{Error, Result};
pub use info::{
    maximize_mutual_information, mutual_information, relative_entropy, tightness_report,
    SearchConfig, TightnessReport,
};
pub use interp::{
    eta, eta_prime, evaluate_polynomial, hermite_lower_polynomial, verify_lower_bound,
    LowerPolynomial,
};
pub use matrix::ComplexMatrix;
pub use quantum::{
    born_joint, distort_povm, make_pure_state, symmetric_projector, validate_povm, Effect,
    Ensemble, JointDistribution, Povm, PovmValidation, PureState,
};
