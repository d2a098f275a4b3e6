//! JSON formats and the registry of named example channels.
//!
//! Matrices are row-major nested arrays whose entries are `[re, im]` pairs;
//! plain numbers are accepted on input as real entries. Every float written
//! is rounded to [`SIGNIFICANT_DIGITS`] significant digits.

use serde_json::{json, Map, Value};

use crate::channel::{builtins, Channel, HolevoForm, RankOneTerm};
use crate::error::{Error, Result};
use crate::mixed_unitary::{DecompositionResiduals, MixedUnitaryDecomposition, ObstructionReport, PrivatizingChannel};
use crate::nullspace::SynthesisRecipe;
use crate::operator::{orthonormalize, pauli_x, pauli_y, pauli_z, CMatrix, CVector, OperatorSubspace, Tolerance};
use crate::privacy::{self, PrivatizationCertificate};
use crate::C64;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// A float as JSON; non-finite values become `null`.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(round(x)).map_or(Value::Null, Value::Number)
}

fn complex(z: C64) -> Value {
    Value::Array(vec![number(z.re), number(z.im)])
}

pub fn matrix_to_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn vector_to_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

pub fn matrices_to_json(ms: &[CMatrix]) -> Value {
    Value::Array(ms.iter().map(matrix_to_json).collect())
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn complex_from_json(v: &Value) -> Result<C64> {
    match v {
        Value::Number(x) => Ok(C64::new(x.as_f64().ok_or_else(|| parse_err("bad number"))?, 0.0)),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| parse_err("complex entry needs numeric re"))?;
            let im = pair[1].as_f64().ok_or_else(|| parse_err("complex entry needs numeric im"))?;
            Ok(C64::new(re, im))
        }
        other => Err(parse_err(format!("expected [re, im], found {other}"))),
    }
}

pub fn matrix_from_json(v: &Value) -> Result<CMatrix> {
    let rows = v.as_array().ok_or_else(|| parse_err("matrix must be an array of rows"))?;
    if rows.is_empty() {
        return Err(parse_err("matrix has no rows"));
    }
    let mut entries = Vec::new();
    let mut ncols = None;
    for row in rows {
        let row = row.as_array().ok_or_else(|| parse_err("matrix row must be an array"))?;
        if *ncols.get_or_insert(row.len()) != row.len() || row.is_empty() {
            return Err(parse_err("matrix rows have unequal or zero length"));
        }
        for e in row {
            entries.push(complex_from_json(e)?);
        }
    }
    Ok(CMatrix::from_row_slice(rows.len(), ncols.unwrap_or(0), &entries))
}

pub fn vector_from_json(v: &Value) -> Result<CVector> {
    let items = v.as_array().ok_or_else(|| parse_err("vector must be an array"))?;
    let entries = items.iter().map(complex_from_json).collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(entries))
}

fn matrices_from_json(v: Option<&Value>, what: &str) -> Result<Vec<CMatrix>> {
    v.and_then(Value::as_array)
        .ok_or_else(|| parse_err(format!("missing array field \"{what}\"")))?
        .iter()
        .map(matrix_from_json)
        .collect()
}

fn holevo_to_json(h: &HolevoForm) -> Value {
    json!({ "F": matrices_to_json(&h.povm), "R": matrices_to_json(&h.states) })
}

pub fn channel_to_json(phi: &Channel) -> Value {
    let mut obj = Map::new();
    obj.insert("n_in".into(), json!(phi.n_in()));
    obj.insert("n_out".into(), json!(phi.n_out()));
    obj.insert("kraus".into(), matrices_to_json(phi.kraus()));
    if let Some(h) = phi.holevo() {
        obj.insert("holevo".into(), holevo_to_json(h));
    }
    Value::Object(obj)
}

/// Parses either `{"n_in", "n_out", "kraus"}` or `{"holevo": {"F", "R"}}`.
/// When both are present the Holevo form must describe the same channel.
pub fn channel_from_json(v: &Value, tol: &Tolerance) -> Result<Channel> {
    let obj = v.as_object().ok_or_else(|| parse_err("channel must be a JSON object"))?;
    let holevo = obj
        .get("holevo")
        .map(|h| -> Result<HolevoForm> {
            Ok(HolevoForm::new(
                matrices_from_json(h.get("F"), "F")?,
                matrices_from_json(h.get("R"), "R")?,
            ))
        })
        .transpose()?;
    let Some(kraus) = obj.get("kraus") else {
        return match holevo {
            Some(h) => Channel::from_holevo(h, tol),
            None => Err(parse_err("channel needs \"kraus\" or \"holevo\"")),
        };
    };
    let kraus = matrices_from_json(Some(kraus), "kraus")?;
    if kraus.is_empty() {
        return Err(parse_err("\"kraus\" is empty"));
    }
    let (rows, cols) = kraus[0].shape();
    for (key, expected) in [("n_in", cols), ("n_out", rows)] {
        if let Some(n) = obj.get(key) {
            let n = n.as_u64().ok_or_else(|| parse_err(format!("\"{key}\" must be an integer")))?;
            if n as usize != expected {
                return Err(Error::dims(format!("{key} = {n}"), format!("Kraus shape {rows} × {cols}")));
            }
        }
    }
    let phi = Channel::from_kraus(kraus, tol)?;
    match holevo {
        Some(h) => {
            let from_h = Channel::from_holevo(h.clone(), tol)?;
            let dist = phi.choi_distance(&from_h);
            if dist > tol.check() {
                return Err(Error::InvalidHolevo(format!(
                    "Holevo form differs from the Kraus channel by {dist:.3e}"
                )));
            }
            Ok(phi.with_holevo(h))
        }
        None => Ok(phi),
    }
}

pub fn subspace_to_json(s: &OperatorSubspace) -> Value {
    json!({
        "n": s.n(),
        "basis": matrices_to_json(s.basis()),
        "self_adjoint": s.is_self_adjoint(),
        "traceless": s.is_traceless(),
    })
}

/// The basis need not be orthonormal; it is orthonormalized on input and the
/// `self_adjoint`/`traceless` flags are recomputed.
pub fn subspace_from_json(v: &Value, tol: &Tolerance) -> Result<OperatorSubspace> {
    let obj = v.as_object().ok_or_else(|| parse_err("subspace must be a JSON object"))?;
    let basis = matrices_from_json(obj.get("basis"), "basis")?;
    let n = match obj.get("n") {
        Some(n) => n.as_u64().ok_or_else(|| parse_err("\"n\" must be an integer"))? as usize,
        None => basis.first().map(|b| b.nrows()).ok_or_else(|| parse_err("empty basis without \"n\""))?,
    };
    if n == 0 {
        return Err(parse_err("\"n\" must be positive"));
    }
    orthonormalize(n, &basis, tol)
}

pub fn rank_one_to_json(terms: &[RankOneTerm]) -> Value {
    Value::Array(
        terms
            .iter()
            .map(|t| json!({ "v": vector_to_json(&t.v), "w": vector_to_json(&t.w) }))
            .collect(),
    )
}

pub fn certificate_to_json(c: &PrivatizationCertificate) -> Value {
    json!({
        "algebra_basis": matrices_to_json(&c.algebra_basis),
        "rho0": matrix_to_json(&c.rho0),
        "residual": number(c.residual),
        "structure": c.structure,
    })
}

pub fn recipe_to_json(r: &SynthesisRecipe) -> Value {
    json!({
        "target": subspace_to_json(&r.target),
        "hermitian_basis": matrices_to_json(&r.hermitian_basis),
        "lambdas": r.lambdas.iter().map(|&x| number(x)).collect::<Vec<_>>(),
        "lambda": number(r.lambda),
        "povm": matrices_to_json(&r.povm),
        "states": matrices_to_json(&r.states),
        "seed": r.seed,
        "state_draws": r.state_draws,
        "state_gram_min_eigenvalue": number(r.state_gram_min_eigenvalue),
        "povm_gram_min_singular_value": number(r.povm_gram_min_singular_value),
    })
}

pub fn decomposition_to_json(d: &MixedUnitaryDecomposition) -> Value {
    json!({
        "p": d.probs.iter().map(|&x| number(x)).collect::<Vec<_>>(),
        "U": matrices_to_json(&d.unitaries),
        "W": matrix_to_json(&d.isometry),
    })
}

pub fn residuals_to_json(r: &DecompositionResiduals) -> Value {
    json!({
        "probability_sum": number(r.probability_sum),
        "unitarity": number(r.unitarity),
        "isometry": number(r.isometry),
        "reconstruction": number(r.reconstruction),
    })
}

/// `{"verdict", "T_dim", "decomposition"?, "residuals", ...}`.
pub fn mixed_unitary_to_json(
    phi: &Channel,
    report: &ObstructionReport,
    privatizing: Option<&PrivatizingChannel>,
) -> Value {
    let mut obj = Map::new();
    obj.insert("verdict".into(), json!(report.verdict));
    obj.insert("T_dim".into(), json!(report.t.dim()));
    obj.insert("S_dim".into(), json!(report.s.dim()));
    obj.insert("witness".into(), json!(report.witness));
    if let Some(b) = report.rank_one_bound {
        obj.insert("rank_one_bound".into(), number(b));
    }
    let mut residuals = Map::new();
    if let Some(d) = &report.decomposition {
        obj.insert("decomposition".into(), decomposition_to_json(d));
        if let Value::Object(m) = residuals_to_json(&d.residuals(phi)) {
            residuals.extend(m);
        }
    }
    if let Some(e) = privatizing {
        residuals.insert("privatization".into(), number(e.residual));
        obj.insert(
            "privatizing_channel".into(),
            json!({
                "n_in": e.map.n_in(),
                "n_out": e.map.n_out(),
                "kraus": matrices_to_json(e.map.kraus()),
                "choi_rank": e.choi_rank,
            }),
        );
    }
    obj.insert("residuals".into(), Value::Object(residuals));
    Value::Object(obj)
}

fn split_call(name: &str) -> (String, Vec<String>) {
    let name = name.trim();
    if let Some(open) = name.find('(') {
        let head = name[..open].trim().to_ascii_lowercase();
        let inner = name[open + 1..].trim_end().trim_end_matches(')');
        let args = inner
            .split(',')
            .map(|a| a.trim().to_string())
            .filter(|a| !a.is_empty())
            .collect();
        return (head, args);
    }
    // `depolarizing2` is shorthand for `depolarizing(2)`; names ending in a
    // digit that are themselves registered take precedence.
    let lower = name.to_ascii_lowercase();
    if lower == "werner_holevo3" || lower == "werner_holevo3_listed" {
        return (lower, Vec::new());
    }
    let digits = lower.trim_end_matches(|c: char| c.is_ascii_digit());
    if digits.len() < lower.len() {
        return (digits.trim_end_matches('_').to_string(), vec![lower[digits.len()..].to_string()]);
    }
    (lower, Vec::new())
}

fn usize_arg(args: &[String], i: usize, name: &str) -> Result<usize> {
    args.get(i)
        .ok_or_else(|| parse_err(format!("{name}: missing argument {}", i + 1)))?
        .parse()
        .map_err(|_| parse_err(format!("{name}: argument {} must be a positive integer", i + 1)))
        .and_then(|n: usize| if n == 0 { Err(parse_err(format!("{name}: dimension must be positive"))) } else { Ok(n) })
}

fn named_unitary(name: &str) -> Result<CMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match name.to_ascii_uppercase().as_str() {
        "I" => Ok(CMatrix::identity(2, 2)),
        "X" => Ok(pauli_x()),
        "Y" => Ok(pauli_y()),
        "Z" => Ok(pauli_z()),
        "H" => Ok((pauli_x() + pauli_z()).scale(h)),
        other => Err(parse_err(format!("unknown unitary \"{other}\" (expected I, X, Y, Z or H)"))),
    }
}

pub const BUILTIN_NAMES: &[&str] = &[
    "depolarizing(n)",
    "werner_holevo3",
    "werner_holevo3_listed",
    "spontaneous_emission(n)",
    "biunitary(U, p)",
    "identity(n)",
    "dephasing(n)",
    "example_family(n, r, s[, seed])",
];

/// A named example channel such as `depolarizing(2)`, `depolarizing2` or
/// `biunitary(Z, 0.3)`. `seed` is used by randomized families unless the
/// name supplies one.
pub fn builtin(name: &str, seed: u64, tol: &Tolerance) -> Result<Channel> {
    let (head, args) = split_call(name);
    let arity = |k: std::ops::RangeInclusive<usize>| {
        if k.contains(&args.len()) {
            Ok(())
        } else {
            Err(parse_err(format!("{head}: expected {k:?} arguments, found {}", args.len())))
        }
    };
    match head.as_str() {
        "depolarizing" => {
            arity(1..=1)?;
            Ok(builtins::depolarizing(usize_arg(&args, 0, &head)?))
        }
        "werner_holevo3" => {
            arity(0..=0)?;
            Ok(builtins::werner_holevo3())
        }
        "werner_holevo3_listed" => {
            arity(0..=0)?;
            Ok(builtins::werner_holevo3_listed())
        }
        "spontaneous_emission" => {
            arity(1..=1)?;
            Ok(builtins::spontaneous_emission(usize_arg(&args, 0, &head)?))
        }
        "identity" => {
            arity(1..=1)?;
            Ok(builtins::identity_channel(usize_arg(&args, 0, &head)?))
        }
        "dephasing" => {
            arity(1..=1)?;
            Ok(builtins::dephasing(usize_arg(&args, 0, &head)?))
        }
        "biunitary" => {
            arity(2..=2)?;
            let u = named_unitary(&args[0])?;
            let p: f64 = args[1]
                .parse()
                .map_err(|_| parse_err(format!("biunitary: \"{}\" is not a probability", args[1])))?;
            builtins::biunitary(&u, p, tol)
        }
        "example_family" => {
            arity(3..=4)?;
            let n = usize_arg(&args, 0, &head)?;
            let r = usize_arg(&args, 1, &head)?;
            let s = usize_arg(&args, 2, &head)?;
            if n != r * s {
                return Err(Error::InvalidPartition(format!("n = {n} differs from r·s = {}", r * s)));
            }
            let seed = match args.get(3) {
                Some(a) => a.parse().map_err(|_| parse_err(format!("example_family: bad seed \"{a}\"")))?,
                None => seed,
            };
            privacy::example_family(r, s, seed)
        }
        _ => Err(parse_err(format!(
            "unknown builtin \"{name}\"; known: {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::builtins::*;
    use crate::operator::matrix_unit;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round(0.1 + 0.2), 0.3);
        assert_eq!(round(1.0 / 3.0), 0.333333333333);
        assert_eq!(round(-0.0), 0.0);
        assert_eq!(round(1e-30), 1e-30);
    }

    #[test]
    fn channel_round_trip_is_idempotent() {
        for phi in [depolarizing(2), spontaneous_emission(3), werner_holevo3()] {
            let once = channel_to_json(&channel_from_json(&channel_to_json(&phi), &tol()).unwrap());
            let twice = channel_to_json(&channel_from_json(&once, &tol()).unwrap());
            assert_eq!(once, twice);
            let back = channel_from_json(&once, &tol()).unwrap();
            assert!(back.choi_distance(&phi) < 1e-10);
        }
    }

    #[test]
    fn holevo_only_input() {
        let v = json!({ "holevo": {
            "F": [matrix_to_json(&matrix_unit(2, 0, 0)), matrix_to_json(&matrix_unit(2, 1, 1))],
            "R": [matrix_to_json(&matrix_unit(2, 0, 0)), matrix_to_json(&matrix_unit(2, 0, 0))],
        }});
        let phi = channel_from_json(&v, &tol()).unwrap();
        assert!(phi.choi_distance(&spontaneous_emission(2)) < 1e-12);
        assert!(phi.holevo().is_some());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(matrix_from_json(&json!([[1, 2], [3]])), Err(Error::Parse(_))));
        assert!(matches!(channel_from_json(&json!({"n_in": 2}), &tol()), Err(Error::Parse(_))));
        let not_tp = json!({"kraus": [[[2, 0], [0, 0]]]});
        assert!(matches!(channel_from_json(&not_tp, &tol()), Err(Error::NotTracePreserving { .. })));
        let bad_dims = json!({"n_in": 3, "kraus": [[[1, 0], [0, 1]]]});
        assert!(matches!(channel_from_json(&bad_dims, &tol()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn subspace_round_trip() {
        let s = orthonormalize(2, &[pauli_z(), pauli_x()], &tol()).unwrap();
        let json1 = subspace_to_json(&subspace_from_json(&subspace_to_json(&s), &tol()).unwrap());
        let json2 = subspace_to_json(&subspace_from_json(&json1, &tol()).unwrap());
        assert_eq!(json1, json2);
        assert_eq!(json1["self_adjoint"], json!(true));
        assert_eq!(json1["traceless"], json!(true));
    }

    #[test]
    fn builtin_names() {
        let t = tol();
        assert!(builtin("depolarizing2", 0, &t).unwrap().choi_distance(&depolarizing(2)) < 1e-14);
        assert!(builtin("depolarizing(3)", 0, &t).unwrap().choi_distance(&depolarizing(3)) < 1e-14);
        assert!(builtin("werner_holevo3", 0, &t).unwrap().choi_distance(&werner_holevo3()) < 1e-14);
        assert!(builtin("spontaneous_emission2", 0, &t).is_ok());
        assert!(builtin("identity(2)", 0, &t).is_ok());
        let b = builtin("biunitary(Z, 0.3)", 0, &t).unwrap();
        assert!(b.choi_distance(&biunitary(&pauli_z(), 0.3, &t).unwrap()) < 1e-14);
        assert_eq!(builtin("example_family(4,2,2)", 0, &t).unwrap().n_in(), 4);
        assert!(builtin("example_family(5,2,2)", 0, &t).is_err());
        assert!(matches!(builtin("nonsense", 0, &t), Err(Error::Parse(_))));
        assert!(builtin("depolarizing(0)", 0, &t).is_err());
    }
}
