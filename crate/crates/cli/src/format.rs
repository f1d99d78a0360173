//! Fixed decimal formatting of JSON output.
//!
//! Every float is cut to 12 significant digits. Lower bounds round down,
//! upper bounds and error fields round up, everything else to nearest.

use serde_json::{Map, Value};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Dir {
    Nearest,
    Down,
    Up,
}

fn direction(key: &str) -> Dir {
    let k = key.to_ascii_lowercase();
    if k == "lo" || k.ends_with("_lo") || k == "lower" || k.starts_with("lower_") {
        Dir::Down
    } else if k == "hi"
        || k.ends_with("_hi")
        || k == "upper"
        || k.starts_with("upper_")
        || k.ends_with("_upper")
        || k.contains("error")
        || k == "radius"
        || k == "tolerance"
    {
        Dir::Up
    } else {
        Dir::Nearest
    }
}

fn cut(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn step(y: f64, sign: f64) -> f64 {
    let unit = 10f64.powi(y.abs().log10().floor() as i32 - 11);
    cut(y + sign * unit)
}

pub fn sig12(x: f64, up: Option<bool>) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let y = cut(x);
    match up {
        Some(true) if y < x => step(y, 1.0),
        Some(false) if y > x => step(y, -1.0),
        _ => y,
    }
}

fn walk(v: Value, dir: Dir) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let up = match dir {
                Dir::Nearest => None,
                Dir::Up => Some(true),
                Dir::Down => Some(false),
            };
            serde_json::Number::from_f64(sig12(x, up)).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(|x| walk(x, dir)).collect()),
        Value::Object(m) => {
            let mut out = Map::new();
            for (k, x) in m {
                let d = match direction(&k) {
                    Dir::Nearest => dir,
                    d => d,
                };
                out.insert(k, walk(x, d));
            }
            Value::Object(out)
        }
        other => other,
    }
}

/// Rounds every float in the tree.
pub fn normalize(v: Value) -> Value {
    walk(v, Dir::Nearest)
}

pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding() {
        assert_eq!(sig12(1.6180339887498949, None), 1.61803398875);
        assert_eq!(sig12(0.1234567890125, Some(false)), 0.123456789012);
        assert!(sig12(0.1234567890121, Some(true)) >= 0.1234567890121);
        assert_eq!(sig12(2.0, Some(true)), 2.0);
    }

    #[test]
    fn directed_by_key() {
        let v = normalize(json!({"lo": 0.33333333333333333, "hi": 0.33333333333333333, "x": [1.0e-20]}));
        assert!(v["lo"].as_f64().unwrap() < 1.0 / 3.0);
        assert!(v["hi"].as_f64().unwrap() > 1.0 / 3.0);
        assert_eq!(render(&v), render(&normalize(v.clone())));
    }
}
