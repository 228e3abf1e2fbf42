use cerny_lab::{rational_string, rational_to_f64, Automaton, Rational, StateSet, Word};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "cerny-lab/1";

/// `{"num": .., "den": .., "display": "num/den"}`; numerator and denominator
/// are JSON numbers when they fit in an i64, decimal strings otherwise.
pub fn rational(r: &Rational) -> Value {
    let int = |v: &num_bigint::BigInt| match v.to_i64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    };
    json!({
        "num": int(r.numer()),
        "den": int(r.denom()),
        "display": rational_string(r),
    })
}

pub fn rationals(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(rational).collect())
}

/// Display-only decimal rendering with 12 significant digits.
pub fn float12(r: &Rational) -> String {
    let x = rational_to_f64(r);
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// 1-based state labels.
pub fn states(set: &StateSet) -> Value {
    json!(set.labels())
}

pub fn word(aut: &Automaton, w: &Word) -> Value {
    json!(w.render(aut))
}

/// Top-level object: schema and command first, then `body`'s fields.
pub fn envelope(command: &str, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    out.insert("command".into(), json!(command));
    if let Value::Object(fields) = body {
        out.extend(fields);
    }
    Value::Object(out)
}

pub fn print_json(command: &str, body: Value) {
    let v = envelope(command, body);
    println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
}
