//! JSON schemas for channels, ensembles, and circuits, plus deterministic
//! report serialization.
//!
//! Complex entries are `[re, im]` pairs; matrices are row-major nested
//! arrays. Channel files carry a `kind` discriminator:
//! `{"kind": "kraus"|"choi"|"gad"|"cq"|"measurement"|"dephasing"|
//!   "depolarizing"|"replacer"|"stokes"|"classical", ...}`.
//! Emitted JSON sorts keys and prints non-integer numbers with 12
//! significant digits, so parse/re-serialize round-trips are byte-identical.

use crate::applications::{BoundReport, CircuitLayer, GradientCheckReport, HypothesisTestingReport, NoisyCircuitSpec};
use crate::channels::{Channel, Family, QuantumState};
use crate::doeblin::{CoefficientReport, ContractionBoundReport};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator, C64};
use crate::oracles::Ensemble;
use crate::sdp::SdpStatus;
use serde_json::{json, Map, Value};

fn field<'v>(v: &'v Value, key: &str) -> Result<&'v Value> {
    v.get(key)
        .ok_or_else(|| Error::input(format!("missing field '{key}'")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::input(format!("{what} must be a number")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::input(format!("{what} must be a nonnegative integer")))
}

/// Parses a complex scalar: `[re, im]` or a bare number.
pub fn parse_complex(v: &Value) -> Result<C64> {
    if let Some(x) = v.as_f64() {
        return Ok(C64::new(x, 0.0));
    }
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::input("complex entries must be [re, im] pairs"))?;
    Ok(C64::new(
        as_f64(&arr[0], "re")?,
        as_f64(&arr[1], "im")?,
    ))
}

/// Parses a row-major complex matrix.
pub fn parse_matrix(v: &Value) -> Result<ComplexMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::input("matrix must be an array of rows"))?;
    let mut data = Vec::with_capacity(rows.len());
    for row in rows {
        let cols = row
            .as_array()
            .ok_or_else(|| Error::input("matrix rows must be arrays"))?;
        data.push(cols.iter().map(parse_complex).collect::<Result<Vec<_>>>()?);
    }
    ComplexMatrix::from_rows(&data)
}

pub fn parse_hermitian(v: &Value) -> Result<HermitianOperator> {
    HermitianOperator::new(parse_matrix(v)?)
}

pub fn parse_state(v: &Value) -> Result<QuantumState> {
    QuantumState::new(parse_hermitian(v)?)
}

fn parse_vector(v: &Value) -> Result<Vec<C64>> {
    v.as_array()
        .ok_or_else(|| Error::input("vector must be an array"))?
        .iter()
        .map(parse_complex)
        .collect()
}

/// Parses a channel description.
pub fn parse_channel(v: &Value) -> Result<Channel> {
    let kind = field(v, "kind")?
        .as_str()
        .ok_or_else(|| Error::input("'kind' must be a string"))?;
    let ch = match kind {
        "kraus" => {
            let d_in = as_usize(field(v, "d_in")?, "d_in")?;
            let d_out = as_usize(field(v, "d_out")?, "d_out")?;
            let ops = field(v, "kraus")?
                .as_array()
                .ok_or_else(|| Error::input("'kraus' must be an array of matrices"))?
                .iter()
                .map(parse_matrix)
                .collect::<Result<Vec<_>>>()?;
            Channel::from_kraus(&ops, d_in, d_out)?
        }
        "choi" => {
            let d_in = as_usize(field(v, "d_in")?, "d_in")?;
            let d_out = as_usize(field(v, "d_out")?, "d_out")?;
            Channel::from_choi(d_in, d_out, parse_hermitian(field(v, "choi")?)?)?
        }
        "gad" => Channel::make(Family::Gad {
            p: as_f64(field(v, "p")?, "p")?,
            eta: as_f64(field(v, "eta")?, "eta")?,
        })?,
        "cq" => {
            let states = field(v, "states")?
                .as_array()
                .ok_or_else(|| Error::input("'states' must be an array"))?
                .iter()
                .map(parse_state)
                .collect::<Result<Vec<_>>>()?;
            Channel::make(Family::Cq { states })?
        }
        "measurement" => {
            let povm = field(v, "povm")?
                .as_array()
                .ok_or_else(|| Error::input("'povm' must be an array"))?
                .iter()
                .map(parse_hermitian)
                .collect::<Result<Vec<_>>>()?;
            Channel::make(Family::Measurement { povm })?
        }
        "dephasing" => {
            let vectors = field(v, "vectors")?
                .as_array()
                .ok_or_else(|| Error::input("'vectors' must be an array"))?
                .iter()
                .map(parse_vector)
                .collect::<Result<Vec<_>>>()?;
            Channel::make(Family::Dephasing { vectors })?
        }
        "depolarizing" => {
            let dim = v.get("d").map(|d| as_usize(d, "d")).transpose()?.unwrap_or(2);
            Channel::make(Family::Depolarizing {
                q: as_f64(field(v, "q")?, "q")?,
                dim,
            })?
        }
        "replacer" => {
            let state = parse_state(field(v, "state")?)?;
            let d_in = v
                .get("d_in")
                .map(|d| as_usize(d, "d_in"))
                .transpose()?
                .unwrap_or(state.dim());
            Channel::make(Family::Replacer { state, d_in })?
        }
        "stokes" => {
            let t_arr = field(v, "t")?
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| Error::input("'t' must be a 3-vector"))?;
            let mut t = [0.0f64; 3];
            for (k, x) in t_arr.iter().enumerate() {
                t[k] = as_f64(x, "t entry")?;
            }
            let rows = field(v, "T")?
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| Error::input("'T' must be a 3x3 matrix"))?;
            let mut tmat = [[0.0f64; 3]; 3];
            for (r, row) in rows.iter().enumerate() {
                let cols = row
                    .as_array()
                    .filter(|a| a.len() == 3)
                    .ok_or_else(|| Error::input("'T' rows must have 3 entries"))?;
                for (c, x) in cols.iter().enumerate() {
                    tmat[r][c] = as_f64(x, "T entry")?;
                }
            }
            Channel::make(Family::Stokes { t, tmat })?
        }
        "classical" => {
            let rows = field(v, "matrix")?
                .as_array()
                .ok_or_else(|| Error::input("'matrix' must be an array of rows"))?;
            let mut w = Vec::with_capacity(rows.len());
            for row in rows {
                let cols = row
                    .as_array()
                    .ok_or_else(|| Error::input("'matrix' rows must be arrays"))?;
                w.push(
                    cols.iter()
                        .map(|x| as_f64(x, "stochastic entry"))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            Channel::make(Family::Classical { w })?
        }
        other => {
            return Err(Error::input(format!("unknown channel kind '{other}'")));
        }
    };
    // Validate declared dimensions when present.
    if let Some(d) = v.get("d_in") {
        if as_usize(d, "d_in")? != ch.d_in() {
            return Err(Error::input("declared d_in does not match the channel"));
        }
    }
    if let Some(d) = v.get("d_out") {
        if as_usize(d, "d_out")? != ch.d_out() {
            return Err(Error::input("declared d_out does not match the channel"));
        }
    }
    Ok(ch)
}

/// Ensemble JSON: `{"priors": [...], "states": [matrix, ...]}`.
pub fn parse_ensemble(v: &Value) -> Result<Ensemble> {
    let priors = field(v, "priors")?
        .as_array()
        .ok_or_else(|| Error::input("'priors' must be an array"))?
        .iter()
        .map(|x| as_f64(x, "prior"))
        .collect::<Result<Vec<_>>>()?;
    let states = field(v, "states")?
        .as_array()
        .ok_or_else(|| Error::input("'states' must be an array"))?
        .iter()
        .map(parse_state)
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(priors, states)
}

/// Circuit JSON: `{"n_qudits", "d", "dim_r", "initial", "observable",
/// "layers": [{"generators": [...], "thetas": [...], "noise": channel}]}`.
pub fn parse_circuit(v: &Value) -> Result<NoisyCircuitSpec> {
    let layers = field(v, "layers")?
        .as_array()
        .ok_or_else(|| Error::input("'layers' must be an array"))?
        .iter()
        .map(|l| -> Result<CircuitLayer> {
            Ok(CircuitLayer {
                generators: field(l, "generators")?
                    .as_array()
                    .ok_or_else(|| Error::input("'generators' must be an array"))?
                    .iter()
                    .map(parse_hermitian)
                    .collect::<Result<Vec<_>>>()?,
                thetas: field(l, "thetas")?
                    .as_array()
                    .ok_or_else(|| Error::input("'thetas' must be an array"))?
                    .iter()
                    .map(|x| as_f64(x, "theta"))
                    .collect::<Result<Vec<_>>>()?,
                noise: parse_channel(field(l, "noise")?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = NoisyCircuitSpec {
        n_qudits: as_usize(field(v, "n_qudits")?, "n_qudits")?,
        d: as_usize(field(v, "d")?, "d")?,
        dim_r: as_usize(field(v, "dim_r")?, "dim_r")?,
        initial: parse_state(field(v, "initial")?)?,
        observable: parse_hermitian(field(v, "observable")?)?,
        layers,
    };
    spec.validate()?;
    Ok(spec)
}

/// Matrix to row-major nested-array JSON with [re, im] entries.
pub fn matrix_to_value(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| {
            let cols: Vec<Value> = (0..m.cols())
                .map(|c| {
                    let z = m[(r, c)];
                    json!([z.re, z.im])
                })
                .collect();
            Value::Array(cols)
        })
        .collect();
    Value::Array(rows)
}

fn finite_or_string(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_infinite() && x > 0.0 {
        Value::String("infinity".to_string())
    } else if x.is_infinite() {
        Value::String("-infinity".to_string())
    } else {
        Value::String("nan".to_string())
    }
}

pub fn status_str(status: SdpStatus) -> &'static str {
    match status {
        SdpStatus::Optimal => "optimal",
        SdpStatus::PrimalInfeasible => "primal_infeasible",
        SdpStatus::DualInfeasible => "dual_infeasible",
        SdpStatus::NumericalLimit => "numerical_limit",
    }
}

pub fn coefficient_report_to_value(r: &CoefficientReport, witnesses: bool) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), json!(r.name));
    m.insert("value".into(), finite_or_string(r.value));
    m.insert("gap".into(), finite_or_string(r.gap));
    m.insert("status".into(), json!(status_str(r.status)));
    if let Some(a) = r.analytic_value {
        m.insert("analytic_value".into(), finite_or_string(a));
    }
    if let Some(a) = r.analytic_agreement {
        m.insert("analytic_agreement".into(), finite_or_string(a));
    }
    if witnesses {
        if let Some(x) = &r.primal_witness {
            m.insert("primal_witness".into(), matrix_to_value(x.matrix()));
        }
        let duals: Vec<Value> = r
            .dual_witness
            .iter()
            .map(|w| matrix_to_value(w.matrix()))
            .collect();
        m.insert("dual_witness".into(), Value::Array(duals));
    }
    Value::Object(m)
}

pub fn contraction_report_to_value(r: &ContractionBoundReport) -> Value {
    let mut m = Map::new();
    m.insert(
        "tr_upper_from_alpha".into(),
        finite_or_string(r.tr_upper_from_alpha),
    );
    m.insert(
        "tr_upper_from_cone".into(),
        finite_or_string(r.tr_upper_from_cone),
    );
    m.insert(
        "hs_upper_from_alpha_plus".into(),
        finite_or_string(r.hs_upper_from_alpha_plus),
    );
    if let Some(e) = r.expansion_lower {
        m.insert("expansion_lower".into(), finite_or_string(e));
    }
    if let Some(q) = r.qubit_exact {
        m.insert(
            "qubit_exact".into(),
            json!({"eta_tr": q.eta_tr, "expansion": q.expansion}),
        );
    }
    Value::Object(m)
}

pub fn bound_report_to_value(r: &BoundReport) -> Value {
    let mut m = Map::new();
    m.insert("bound_name".into(), json!(r.bound_name));
    let mut inputs = Map::new();
    for (k, v) in &r.inputs {
        inputs.insert(k.clone(), finite_or_string(*v));
    }
    m.insert("inputs".into(), Value::Object(inputs));
    m.insert("value".into(), finite_or_string(r.value));
    if let Some(flag) = &r.degenerate_flag {
        m.insert("degenerate".into(), json!(flag));
    }
    if let Some(e) = &r.empirical {
        m.insert(
            "empirical".into(),
            json!({"measured": e.measured, "bound_respected": e.bound_respected}),
        );
    }
    Value::Object(m)
}

pub fn hypothesis_report_to_value(r: &HypothesisTestingReport) -> Value {
    let mut m = Map::new();
    if let Some(flag) = &r.degenerate {
        m.insert("degenerate".into(), json!(flag));
    }
    if let Some(sc) = r.sample_complexity {
        m.insert("sample_complexity".into(), finite_or_string(sc));
    }
    if let Some(x) = r.lower {
        m.insert("lower".into(), finite_or_string(x));
    }
    if let Some(x) = r.upper {
        m.insert("upper".into(), finite_or_string(x));
    }
    if let Some(x) = r.alt_lower {
        m.insert("alt_lower".into(), finite_or_string(x));
    }
    m.insert("used_gad_constants".into(), json!(r.used_gad_constants));
    Value::Object(m)
}

pub fn gradient_report_to_value(r: &GradientCheckReport) -> Value {
    json!({
        "bound_name": "barren_plateau",
        "value": r.bound,
        "empirical": {
            "measured": r.max_abs_gradient,
            "bound_respected": r.bound_respected,
        },
        "samples": r.samples,
        "richardson_gap": r.richardson_gap,
    })
}

/// Deterministic JSON writer: sorted object keys (serde_json's default map)
/// and 12-significant-digit scientific notation for non-integer numbers.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let x = n.as_f64().unwrap_or(0.0);
                out.push_str(&format!("{x:.11e}"));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, val)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key serialization"));
                out.push(':');
                write_value(val, out);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_round_trip_gad() {
        let v = json!({"kind": "gad", "p": 0.3, "eta": 0.25});
        let ch = parse_channel(&v).unwrap();
        assert_eq!((ch.d_in(), ch.d_out()), (2, 2));
        assert!((ch.choi().entry(0, 0).re - 0.475).abs() < 1e-12);
    }

    #[test]
    fn channel_kind_required() {
        assert!(parse_channel(&json!({"p": 0.3})).is_err());
        assert!(parse_channel(&json!({"kind": "nonsense"})).is_err());
    }

    #[test]
    fn declared_dims_checked() {
        let v = json!({"kind": "gad", "p": 0.3, "eta": 0.25, "d_in": 3});
        assert!(parse_channel(&v).is_err());
    }

    #[test]
    fn json_writer_round_trip() {
        let v = json!({
            "name": "alpha",
            "value": 0.2500000001,
            "count": 17,
            "nested": [1.5, [0.1, -0.25]],
        });
        let s1 = to_json_string(&v);
        let reparsed: Value = serde_json::from_str(&s1).unwrap();
        let s2 = to_json_string(&reparsed);
        assert_eq!(s1, s2, "serialize/parse/serialize must be byte-identical");
    }

    #[test]
    fn infinity_becomes_string() {
        assert_eq!(finite_or_string(f64::INFINITY), json!("infinity"));
    }

    #[test]
    fn classical_channel_parse() {
        let v = json!({"kind": "classical", "matrix": [[0.9, 0.1], [0.1, 0.9]]});
        let ch = parse_channel(&v).unwrap();
        assert_eq!((ch.d_in(), ch.d_out()), (2, 2));
    }

    #[test]
    fn stokes_channel_parse() {
        let v = json!({
            "kind": "stokes",
            "t": [0.0, 0.0, 0.3],
            "T": [[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.25]],
        });
        // GAD(p, eta) with eta = 0.25, p = (0.3/(0.75) + 1)/2.
        let ch = parse_channel(&v).unwrap();
        let (t, tm) = ch.stokes_of_qubit().unwrap();
        assert!((t[2] - 0.3).abs() < 1e-10);
        assert!((tm[0][0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn non_cp_stokes_rejected() {
        let v = json!({
            "kind": "stokes",
            "t": [0.0, 0.0, 0.0],
            "T": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]],
        });
        assert!(parse_channel(&v).is_err());
    }
}
