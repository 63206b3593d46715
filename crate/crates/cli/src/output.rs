// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Machine-readable output: JSON with every float at 12 significant digits.

use qwass::experiments::round_sig;
use qwass::states::io::{matrix_to_json, pure_to_json};
use qwass::states::{CMat, PureState};
use qwass::Error;
use serde_json::{json, Value};

/// Round every float in `v`, recursively.
pub fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            let x = round_sig(n.as_f64().unwrap_or(0.0));
            if x.is_finite() && x == x.trunc() && x.abs() < 1e15 {
                json!(x as i64)
            } else {
                serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

pub fn render(v: Value) -> String {
    serde_json::to_string_pretty(&rounded(v)).expect("JSON value renders")
}

pub fn pure(p: &PureState) -> Value {
    serde_json::to_value(pure_to_json(p)).expect("state serializes")
}

pub fn matrix(m: &CMat, dims: &[usize]) -> Value {
    serde_json::to_value(matrix_to_json(m, dims)).expect("matrix serializes")
}

/// Structured error record for stderr.
pub fn error(e: &Error) -> Value {
    let mut v = json!({ "error": e.kind(), "message": e.to_string() });
    if let Error::Validation { invariant, .. } = e {
        v["invariant"] = json!(invariant);
    }
    if let Error::MetricAxiom { axiom, .. } = e {
        v["axiom"] = json!(axiom);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_nested_floats() {
        let v = rounded(json!({ "a": [0.1 + 0.2, 1.0], "b": { "c": 1.0 / 3.0 }, "n": 7 }));
        assert_eq!(v.to_string(), r#"{"a":[0.3,1],"b":{"c":0.333333333333},"n":7}"#);
    }
}
