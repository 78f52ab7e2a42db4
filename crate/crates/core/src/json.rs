//! JSON interchange for POVMs, ensembles, polynomials, and reports.
//!
//! Serialization is hand-rolled so every float is written with 17
//! significant digits (`{:.16e}`), enough to round-trip f64 exactly and to
//! keep emitted files byte-stable across runs. Parsing goes through
//! serde_json; structure errors surface as `Error::Parse`, while anything
//! content-related (bad norms, weights, incompleteness) is left to the
//! validation layer.
//!
//! Schemas:
//!   matrix            [[[re, im], ...], ...]   (row major, square)
//!   POVM              {"dim": d, "effects": [matrix, ...]}
//!   ensemble          {"dim": d, "states": [[[re, im], ...], ...], "weights": [...]}
//!   polynomial        {"t": t, "coeffs": [...], "knots": [...]}

use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::Value;

use crate::bounds::BoundResult;
use crate::designs::DesignCheckReport;
use crate::error::{Error, Result};
use crate::info::TightnessReport;
use crate::interp::LowerPolynomial;
use crate::matrix::ComplexMatrix;
use crate::quantum::{make_pure_state, Effect, Ensemble, Povm, PureState};

/// One f64 with 17 significant digits, exact under round-trip.
pub fn fmt_f64(x: f64) -> String {
    debug_assert!(x.is_finite(), "refusing to serialize a non-finite float");
    format!("{x:.16e}")
}

fn push_f64_array(out: &mut String, xs: &[f64]) {
    out.push('[');
    for (i, &x) in xs.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt_f64(x));
    }
    out.push(']');
}

fn push_matrix(out: &mut String, m: &ComplexMatrix) {
    out.push('[');
    for r in 0..m.dim() {
        if r > 0 {
            out.push(',');
        }
        out.push('[');
        for c in 0..m.dim() {
            if c > 0 {
                out.push(',');
            }
            let z = m.at(r, c);
            let _ = write!(out, "[{},{}]", fmt_f64(z.re), fmt_f64(z.im));
        }
        out.push(']');
    }
    out.push(']');
}

fn push_amplitudes(out: &mut String, state: &PureState) {
    out.push('[');
    for (i, z) in state.amplitudes().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "[{},{}]", fmt_f64(z.re), fmt_f64(z.im));
    }
    out.push(']');
}

pub fn povm_to_json(povm: &Povm) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\"dim\":{},\"effects\":[", povm.dim());
    for (i, e) in povm.effects().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_matrix(&mut out, e.matrix());
    }
    out.push_str("]}");
    out
}

pub fn ensemble_to_json(ensemble: &Ensemble) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\"dim\":{},\"states\":[", ensemble.dim());
    for (i, s) in ensemble.states().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_amplitudes(&mut out, s);
    }
    out.push_str("],\"weights\":");
    push_f64_array(&mut out, ensemble.weights());
    out.push('}');
    out
}

pub fn polynomial_to_json(poly: &LowerPolynomial) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\"t\":{},\"coeffs\":", poly.t);
    push_f64_array(&mut out, &poly.coeffs);
    out.push_str(",\"knots\":");
    push_f64_array(&mut out, &poly.knots);
    out.push('}');
    out
}

pub fn bound_result_to_json(result: &BoundResult) -> String {
    let mut out = String::new();
    let t_field = match result.t {
        crate::bounds::Order::Finite(t) => t.to_string(),
        crate::bounds::Order::Infinite => "\"inf\"".to_string(),
    };
    let _ = write!(
        out,
        "{{\"d\":{},\"t\":{},\"nats\":{},\"bits\":{},\"knots\":",
        result.d,
        t_field,
        fmt_f64(result.nats),
        fmt_f64(result.bits()),
    );
    push_f64_array(&mut out, &result.knots);
    let _ = write!(out, ",\"source\":\"{}\"}}", result.source.as_str());
    out
}

pub fn design_report_to_json(report: &DesignCheckReport) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"dim\":{},\"t\":{},\"checks\":[",
        report.dim, report.t
    );
    for k in 1..=report.t {
        if k > 1 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"k\":{},\"residual\":{},\"pass\":{}}}",
            k,
            fmt_f64(report.residuals[(k - 1) as usize]),
            report.passes(k),
        );
    }
    let _ = write!(
        out,
        "],\"tolerance\":{},\"order\":{},\"is_design\":{}}}",
        fmt_f64(report.tolerance),
        report.order(),
        report.is_design(),
    );
    out
}

pub fn tightness_to_json(report: &TightnessReport) -> String {
    format!(
        "{{\"povm_label\":{},\"design_t\":{},\"bound_nats\":{},\"achieved_nats\":{},\"gap\":{}}}",
        Value::String(report.povm_label.clone()),
        report.design_t,
        fmt_f64(report.bound_nats),
        fmt_f64(report.achieved_nats),
        fmt_f64(report.gap),
    )
}

// ===== parsing =====

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn as_object<'v>(v: &'v Value, what: &str) -> Result<&'v serde_json::Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| parse_err(format!("{what} must be a JSON object")))
}

fn field<'v>(obj: &'v serde_json::Map<String, Value>, key: &str) -> Result<&'v Value> {
    obj.get(key)
        .ok_or_else(|| parse_err(format!("missing field {key:?}")))
}

fn as_dim(v: &Value) -> Result<usize> {
    let d = v
        .as_u64()
        .ok_or_else(|| parse_err("\"dim\" must be a positive integer"))?;
    if d == 0 {
        return Err(parse_err("\"dim\" must be a positive integer"));
    }
    Ok(d as usize)
}

fn as_complex(v: &Value, what: &str) -> Result<Complex64> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| parse_err(format!("{what} must be a [re, im] pair")))?;
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| parse_err(format!("{what}: real part is not a number")))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| parse_err(format!("{what}: imaginary part is not a number")))?;
    Ok(Complex64::new(re, im))
}

fn as_matrix(v: &Value, dim: usize, what: &str) -> Result<ComplexMatrix> {
    let rows = v
        .as_array()
        .filter(|a| a.len() == dim)
        .ok_or_else(|| parse_err(format!("{what} must be a {dim}x{dim} matrix")))?;
    let mut parsed = Vec::with_capacity(dim);
    for (r, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .filter(|a| a.len() == dim)
            .ok_or_else(|| parse_err(format!("{what} row {r} must have {dim} entries")))?;
        let mut out_row = Vec::with_capacity(dim);
        for (c, entry) in entries.iter().enumerate() {
            out_row.push(as_complex(entry, &format!("{what}[{r}][{c}]"))?);
        }
        parsed.push(out_row);
    }
    ComplexMatrix::from_rows(parsed).map_err(|_| parse_err(format!("{what} is not square")))
}

/// Parses a POVM without judging its validity: effects are taken as given
/// so that defective candidates can still be loaded and diagnosed.
pub fn parse_povm(text: &str) -> Result<Povm> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    let obj = as_object(&root, "POVM")?;
    let dim = as_dim(field(obj, "dim")?)?;
    let effects_v = field(obj, "effects")?
        .as_array()
        .ok_or_else(|| parse_err("\"effects\" must be an array"))?;
    if effects_v.is_empty() {
        return Err(parse_err("\"effects\" must not be empty"));
    }
    let mut effects = Vec::with_capacity(effects_v.len());
    for (i, ev) in effects_v.iter().enumerate() {
        let m = as_matrix(ev, dim, &format!("effect {i}"))?;
        effects.push(Effect::from_matrix_unchecked(m));
    }
    Povm::from_effects_unchecked(effects).map_err(|e| parse_err(format!("inconsistent POVM: {e}")))
}

/// Parses an ensemble. Structural problems surface as parse errors; state
/// normalization and weight constraints go through the usual validation and
/// keep their own error types.
pub fn parse_ensemble(text: &str) -> Result<Ensemble> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    let obj = as_object(&root, "ensemble")?;
    let dim = as_dim(field(obj, "dim")?)?;
    let states_v = field(obj, "states")?
        .as_array()
        .ok_or_else(|| parse_err("\"states\" must be an array"))?;
    let weights_v = field(obj, "weights")?
        .as_array()
        .ok_or_else(|| parse_err("\"weights\" must be an array"))?;
    let mut states = Vec::with_capacity(states_v.len());
    for (i, sv) in states_v.iter().enumerate() {
        let amps_v = sv
            .as_array()
            .filter(|a| a.len() == dim)
            .ok_or_else(|| parse_err(format!("state {i} must have {dim} amplitudes")))?;
        let mut amps = Vec::with_capacity(dim);
        for (j, av) in amps_v.iter().enumerate() {
            amps.push(as_complex(av, &format!("state {i} amplitude {j}"))?);
        }
        states.push(make_pure_state(amps)?);
    }
    let mut weights = Vec::with_capacity(weights_v.len());
    for (i, wv) in weights_v.iter().enumerate() {
        weights.push(
            wv.as_f64()
                .ok_or_else(|| parse_err(format!("weight {i} is not a number")))?,
        );
    }
    Ensemble::new(states, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{antipodal_ensemble, tetrahedron_povm};
    use crate::quantum::validate_povm;

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[
            0.0,
            1.0,
            2.0 / 3.0,
            -1.0 / 3.0,
            1e-300,
            std::f64::consts::PI,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "round trip failed for {s}");
        }
    }

    #[test]
    fn povm_round_trip_preserves_every_entry() {
        let povm = tetrahedron_povm();
        let text = povm_to_json(&povm);
        let back = parse_povm(&text).unwrap();
        assert_eq!(back.dim(), 2);
        assert_eq!(back.n_outcomes(), 4);
        for (a, b) in povm.effects().iter().zip(back.effects()) {
            assert_eq!(a.matrix().max_abs_diff(b.matrix()), 0.0);
        }
        assert!(validate_povm(&back).is_valid());
    }

    #[test]
    fn ensemble_round_trip_preserves_states_and_weights() {
        let ensemble = antipodal_ensemble(&tetrahedron_povm()).unwrap();
        let text = ensemble_to_json(&ensemble);
        let back = parse_ensemble(&text).unwrap();
        assert_eq!(back.len(), 4);
        for (w1, w2) in ensemble.weights().iter().zip(back.weights()) {
            assert_eq!(w1, w2);
        }
        // The parse path renormalizes states, so amplitudes may drift by
        // an ulp even though the printed digits are exact.
        for (s1, s2) in ensemble.states().iter().zip(back.states()) {
            for (a, b) in s1.amplitudes().iter().zip(s2.amplitudes()) {
                assert!((a - b).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn malformed_povm_inputs_are_parse_errors() {
        for text in [
            "not json",
            "{}",
            "{\"dim\":2}",
            "{\"dim\":0,\"effects\":[]}",
            "{\"dim\":2,\"effects\":[]}",
            "{\"dim\":2,\"effects\":[[[0,0],[0,0]]]}",
            "{\"dim\":2,\"effects\":[[[[1,0],[0,0]],[[0,0],[\"x\",0]]]]}",
        ] {
            assert!(
                matches!(parse_povm(text), Err(Error::Parse(_))),
                "accepted malformed input: {text}"
            );
        }
    }

    #[test]
    fn ensemble_content_errors_are_not_parse_errors() {
        // Structurally fine, but the weights do not sum to 1.
        let text = "{\"dim\":1,\"states\":[[[1,0]]],\"weights\":[0.5]}";
        assert!(matches!(
            parse_ensemble(text),
            Err(Error::BadWeightSum { .. })
        ));
        // Structurally fine, but the state is the zero vector.
        let text = "{\"dim\":1,\"states\":[[[0,0]]],\"weights\":[1.0]}";
        assert!(matches!(
            parse_ensemble(text),
            Err(Error::DegenerateState { .. })
        ));
    }

    #[test]
    fn polynomial_serialization_shape() {
        let poly = crate::interp::hermite_lower_polynomial(2, &[0.5]).unwrap();
        let text = polynomial_to_json(&poly);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["t"], 2);
        assert_eq!(v["coeffs"].as_array().unwrap().len(), 2);
        assert_eq!(v["knots"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn bound_result_serialization_shape() {
        let r = crate::bounds::closed_form_bound(2, crate::bounds::Order::Infinite).unwrap();
        let text = bound_result_to_json(&r);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["t"], "inf");
        assert_eq!(v["source"], "closed_form");
        let nats = v["nats"].as_f64().unwrap();
        assert!((nats - (2f64.ln() - 0.5)).abs() < 1e-15);
    }
}
