//! JSON documents: function descriptions, ratio expansions, identification
//! results and auction models.
//!
//! Rationals travel as strings (`"3"`, `"-1/6"`). Parse errors name the
//! offending location, either as a JSON line/column or as a path such as
//! `$.pieces[2][0]`.

use lapratio_core::algebra::{parse_rational, Poly, Rational, Series};
use lapratio_core::{AuctionModel, DistSpec, IdentifyResult, PiecewisePoly, RatioExpansion};
use serde_json::{json, Map, Value};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

type Result<T> = std::result::Result<T, FormatError>;

fn invalid(path: &str, message: impl Into<String>) -> FormatError {
    FormatError::Invalid {
        path: path.to_string(),
        message: message.into(),
    }
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    value.as_object().ok_or_else(|| invalid(path, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| invalid(path, format!("missing field \"{key}\"")))
}

fn array<'a>(value: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    value.as_array().ok_or_else(|| invalid(path, "expected an array"))
}

fn string<'a>(value: &'a Value, path: &str) -> Result<&'a str> {
    value.as_str().ok_or_else(|| invalid(path, "expected a string"))
}

fn integer(value: &Value, path: &str) -> Result<i64> {
    value.as_i64().ok_or_else(|| invalid(path, "expected an integer"))
}

fn unsigned(value: &Value, path: &str) -> Result<u64> {
    value
        .as_u64()
        .ok_or_else(|| invalid(path, "expected a nonnegative integer"))
}

fn number(value: &Value, path: &str) -> Result<f64> {
    value.as_f64().ok_or_else(|| invalid(path, "expected a number"))
}

fn rational(value: &Value, path: &str) -> Result<Rational> {
    let text = string(value, path)?;
    parse_rational(text).map_err(|_| invalid(path, format!("malformed rational \"{text}\"")))
}

fn rationals(value: &Value, path: &str) -> Result<Vec<Rational>> {
    array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, v)| rational(v, &format!("{path}[{i}]")))
        .collect()
}

fn rational_strings(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(|c| Value::String(c.to_string())).collect())
}

/// A function as described in an input file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionSpec {
    Poly(Poly),
    Piecewise(PiecewisePoly),
    Builtin(Builtin),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    /// Maclaurin polynomial of `sin` through `order`.
    Sin { order: usize },
    StepExample { n_max: u32 },
}

impl Builtin {
    pub fn resolve(self) -> FunctionSpec {
        match self {
            Builtin::Sin { order } => {
                FunctionSpec::Poly(lapratio_core::transform::maclaurin_sin(order))
            }
            Builtin::StepExample { n_max } => {
                FunctionSpec::Piecewise(PiecewisePoly::step_example(n_max))
            }
        }
    }
}

impl FunctionSpec {
    /// Replaces built-ins by what they stand for.
    pub fn resolve(self) -> FunctionSpec {
        match self {
            FunctionSpec::Builtin(b) => b.resolve(),
            other => other,
        }
    }
}

pub fn parse_function(text: &str) -> Result<FunctionSpec> {
    function_from_value(&parse_json(text)?)
}

pub fn function_from_value(value: &Value) -> Result<FunctionSpec> {
    let obj = object(value, "$")?;
    let kind = string(field(obj, "$", "kind")?, "$.kind")?;
    match kind {
        "poly" => Ok(FunctionSpec::Poly(Poly::new(rationals(
            field(obj, "$", "coeffs")?,
            "$.coeffs",
        )?))),
        "piecewise" => {
            let breakpoints = rationals(field(obj, "$", "breakpoints")?, "$.breakpoints")?;
            let pieces = array(field(obj, "$", "pieces")?, "$.pieces")?
                .iter()
                .enumerate()
                .map(|(i, p)| rationals(p, &format!("$.pieces[{i}]")).map(Poly::new))
                .collect::<Result<Vec<_>>>()?;
            let tail = Poly::new(rationals(field(obj, "$", "tail")?, "$.tail")?);
            let unbounded_tail = match obj.get("unbounded_tail") {
                None => false,
                Some(v) => v
                    .as_bool()
                    .ok_or_else(|| invalid("$.unbounded_tail", "expected a boolean"))?,
            };
            PiecewisePoly::new(breakpoints, pieces, tail, unbounded_tail)
                .map(FunctionSpec::Piecewise)
                .map_err(|e| invalid("$", e.to_string()))
        }
        "builtin" => {
            let name = string(field(obj, "$", "name")?, "$.name")?;
            match name {
                "sin" => {
                    let order = unsigned(field(obj, "$", "order")?, "$.order")? as usize;
                    Ok(FunctionSpec::Builtin(Builtin::Sin { order }))
                }
                "step_example" => {
                    let n_max = unsigned(field(obj, "$", "n_max")?, "$.n_max")?;
                    let n_max = u32::try_from(n_max)
                        .map_err(|_| invalid("$.n_max", "value too large"))?;
                    Ok(FunctionSpec::Builtin(Builtin::StepExample { n_max }))
                }
                other => Err(invalid("$.name", format!("unknown builtin \"{other}\""))),
            }
        }
        other => Err(invalid("$.kind", format!("unknown kind \"{other}\""))),
    }
}

pub fn function_to_value(spec: &FunctionSpec) -> Value {
    match spec {
        FunctionSpec::Poly(p) => json!({"kind": "poly", "coeffs": rational_strings(p.coeffs())}),
        FunctionSpec::Piecewise(pp) => {
            let mut doc = json!({
                "kind": "piecewise",
                "breakpoints": rational_strings(pp.breakpoints()),
                "pieces": pp.pieces().iter().map(|p| rational_strings(p.coeffs())).collect::<Vec<_>>(),
                "tail": rational_strings(pp.tail().coeffs()),
            });
            if pp.unbounded_tail() {
                doc["unbounded_tail"] = Value::Bool(true);
            }
            doc
        }
        FunctionSpec::Builtin(Builtin::Sin { order }) => {
            json!({"kind": "builtin", "name": "sin", "order": order})
        }
        FunctionSpec::Builtin(Builtin::StepExample { n_max }) => {
            json!({"kind": "builtin", "name": "step_example", "n_max": n_max})
        }
    }
}

pub fn parse_ratio_expansion(text: &str) -> Result<RatioExpansion> {
    let value = parse_json(text)?;
    let obj = object(&value, "$")?;
    let lead = integer(field(obj, "$", "lead")?, "$.lead")?;
    let tail = rationals(field(obj, "$", "tail")?, "$.tail")?;
    if tail.is_empty() {
        return Err(invalid("$.tail", "expected at least one coefficient"));
    }
    let order = tail.len() - 1;
    RatioExpansion::new(lead, Series::new(tail, order))
        .map_err(|e| invalid("$.tail[0]", e.to_string()))
}

pub fn ratio_expansion_to_value(h: &RatioExpansion) -> Value {
    json!({"lead": h.lead, "tail": rational_strings(h.tail.coeffs())})
}

/// `coeffs` runs through the recovered degree, trailing zeros included.
pub fn identify_result_to_value(r: &IdentifyResult) -> Value {
    let coeffs: Vec<Rational> = (0..=r.recovered_degree).map(|i| r.poly.coeff(i)).collect();
    json!({
        "coeffs": rational_strings(&coeffs),
        "ambiguous_sign": r.ambiguous_sign,
        "k": r.k(),
    })
}

pub fn parse_identify_result(text: &str) -> Result<IdentifyResult> {
    let value = parse_json(text)?;
    let obj = object(&value, "$")?;
    let coeffs = rationals(field(obj, "$", "coeffs")?, "$.coeffs")?;
    let ambiguous_sign = field(obj, "$", "ambiguous_sign")?
        .as_bool()
        .ok_or_else(|| invalid("$.ambiguous_sign", "expected a boolean"))?;
    let k = unsigned(field(obj, "$", "k")?, "$.k")? as usize;
    let recovered_degree = coeffs.len().saturating_sub(1);
    let poly = Poly::new(coeffs);
    if poly.lowest_order().unwrap_or(0) != k {
        return Err(invalid("$.k", "does not match the first nonzero coefficient"));
    }
    Ok(IdentifyResult {
        poly,
        ambiguous_sign,
        recovered_degree,
    })
}

fn dist_from_value(value: &Value, path: &str) -> Result<DistSpec> {
    let obj = object(value, path)?;
    let kind = string(field(obj, path, "kind")?, &format!("{path}.kind"))?;
    let num = |key: &str| number(field(obj, path, key)?, &format!("{path}.{key}"));
    let dist = match kind {
        "exponential" => DistSpec::exponential(num("theta")?),
        "lognormal" => DistSpec::lognormal(num("mu")?, num("sigma")?),
        "point_mass" => DistSpec::point_mass(num("value")?),
        "shifted" => {
            let base = dist_from_value(field(obj, path, "base")?, &format!("{path}.base"))?;
            DistSpec::shifted(base, num("offset")?)
        }
        other => {
            return Err(invalid(
                &format!("{path}.kind"),
                format!("unknown distribution \"{other}\""),
            ))
        }
    };
    dist.map_err(|e| invalid(path, e.to_string()))
}

pub fn dist_to_value(dist: &DistSpec) -> Value {
    match dist {
        DistSpec::Exponential { theta } => json!({"kind": "exponential", "theta": theta}),
        DistSpec::Lognormal { mu, sigma } => json!({"kind": "lognormal", "mu": mu, "sigma": sigma}),
        DistSpec::PointMass { value } => json!({"kind": "point_mass", "value": value}),
        DistSpec::Shifted { base, offset } => {
            json!({"kind": "shifted", "base": dist_to_value(base), "offset": offset})
        }
    }
}

pub fn parse_model(text: &str) -> Result<AuctionModel> {
    let value = parse_json(text)?;
    let obj = object(&value, "$")?;
    let common = dist_from_value(field(obj, "$", "common")?, "$.common")?;
    let idiosyncratic = dist_from_value(field(obj, "$", "idiosyncratic")?, "$.idiosyncratic")?;
    let n = unsigned(field(obj, "$", "N")?, "$.N")?;
    let n = u32::try_from(n).map_err(|_| invalid("$.N", "value too large"))?;
    AuctionModel::new(common, idiosyncratic, n).map_err(|e| invalid("$.N", e.to_string()))
}

pub fn model_to_value(model: &AuctionModel) -> Value {
    json!({
        "common": dist_to_value(&model.common),
        "idiosyncratic": dist_to_value(&model.idiosyncratic),
        "N": model.bidders(),
    })
}

/// Serialises a document, compact unless `pretty`.
pub fn render(value: &Value, pretty: bool) -> String {
    let mut text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .expect("JSON values always serialise");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(err: FormatError) -> String {
        match err {
            FormatError::Invalid { path, .. } => path,
            other => panic!("expected a path error, got {other}"),
        }
    }

    #[test]
    fn polynomial_round_trip() {
        let text = r#"{"kind": "poly", "coeffs": ["1", "-1/2", "0", "3"]}"#;
        let spec = parse_function(text).unwrap();
        let back = function_from_value(&function_to_value(&spec)).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn malformed_rationals_are_located() {
        let err = parse_function(r#"{"kind": "poly", "coeffs": ["1", "1/0"]}"#).unwrap_err();
        assert_eq!(path_of(err), "$.coeffs[1]");
        let err = parse_function(
            r#"{"kind": "piecewise", "breakpoints": ["0", "1"], "pieces": [["2", "x"]], "tail": []}"#,
        )
        .unwrap_err();
        assert_eq!(path_of(err), "$.pieces[0][1]");
    }

    #[test]
    fn non_increasing_breakpoints_are_rejected() {
        let err = parse_function(
            r#"{"kind": "piecewise", "breakpoints": ["0", "1", "1"], "pieces": [["1"], ["2"]], "tail": ["3"]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("breakpoints[2]"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_function("{\n  \"kind\": \"poly\",\n  \"coeffs\": [1,]\n}").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 3, .. }), "{err}");
    }

    #[test]
    fn piecewise_and_builtins_round_trip() {
        for spec in [
            FunctionSpec::Piecewise(PiecewisePoly::step_example(3)),
            FunctionSpec::Builtin(Builtin::Sin { order: 9 }),
            FunctionSpec::Builtin(Builtin::StepExample { n_max: 4 }),
        ] {
            assert_eq!(function_from_value(&function_to_value(&spec)).unwrap(), spec);
        }
        assert!(parse_function(r#"{"kind": "builtin", "name": "cos", "order": 3}"#).is_err());
    }

    #[test]
    fn ratio_documents() {
        let h = parse_ratio_expansion(r#"{"lead": -1, "tail": ["2", "0", "-6"]}"#).unwrap();
        assert_eq!((h.lead, h.order()), (-1, 2));
        assert_eq!(
            parse_ratio_expansion(&render(&ratio_expansion_to_value(&h), false)).unwrap(),
            h
        );
        let err = parse_ratio_expansion(r#"{"lead": 0, "tail": ["0", "1"]}"#).unwrap_err();
        assert_eq!(path_of(err), "$.tail[0]");
        let err = parse_ratio_expansion(r#"{"lead": 0.5, "tail": ["1"]}"#).unwrap_err();
        assert_eq!(path_of(err), "$.lead");
    }

    #[test]
    fn identify_documents() {
        let r = IdentifyResult {
            poly: Poly::from_ints(&[0, 2, 1]),
            ambiguous_sign: true,
            recovered_degree: 4,
        };
        let value = identify_result_to_value(&r);
        assert_eq!(value["coeffs"], json!(["0", "2", "1", "0", "0"]));
        assert_eq!(value["k"], json!(1));
        assert_eq!(parse_identify_result(&render(&value, true)).unwrap(), r);
    }

    #[test]
    fn model_documents() {
        let text = r#"{
            "common": {"kind": "point_mass", "value": 0},
            "idiosyncratic": {"kind": "shifted", "offset": -1.5,
                              "base": {"kind": "lognormal", "mu": 0, "sigma": 1}},
            "N": 3
        }"#;
        let model = parse_model(text).unwrap();
        assert_eq!(model.bidders(), 3);
        assert_eq!(parse_model(&render(&model_to_value(&model), false)).unwrap(), model);

        let bad = r#"{"common": {"kind": "point_mass", "value": 0},
                      "idiosyncratic": {"kind": "exponential", "theta": -1}, "N": 3}"#;
        assert_eq!(path_of(parse_model(bad).unwrap_err()), "$.idiosyncratic");
        let bad = r#"{"common": {"kind": "point_mass", "value": 0},
                      "idiosyncratic": {"kind": "exponential", "theta": 1}, "N": 1}"#;
        assert_eq!(path_of(parse_model(bad).unwrap_err()), "$.N");
    }
}
