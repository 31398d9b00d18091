use serde::Serialize;
use serde_json::{Map, Number, Value};

pub const TOOL: &str = "qkdlab";
pub const SIGNIFICANT_DIGITS: usize = 10;

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal text of the rounded value.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".to_string()
    } else if (1e-4..1e10).contains(&r.abs()) {
        r.to_string()
    } else {
        format!("{r:e}")
    }
}

/// Rounds every floating-point number in a JSON tree; integers are kept.
pub fn round_numbers(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Standard wrapper around every JSON result.
#[derive(Debug, Serialize)]
pub struct Envelope<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub input: Value,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub result: Value,
}

pub fn envelope(command: &str, input: Value, seed: Option<u64>, timestamp: bool, result: Value) -> String {
    let env = Envelope {
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command,
        input,
        seed,
        timestamp: timestamp.then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        result,
    };
    let mut v = serde_json::to_value(&env).expect("envelope serializes");
    round_numbers(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

/// Input echo: the subcommand's flags as a JSON object.
pub fn echo<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or_else(|_| Value::Object(Map::new()))
}
