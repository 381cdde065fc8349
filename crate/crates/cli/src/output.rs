//! Number formatting and writers for CSV and JSON output.

use serde_json::Value;

/// Version of the JSON documents written by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits kept in JSON numbers.
pub const JSON_SIGNIFICANT_DIGITS: usize = 12;

/// Rounds `x` to [`JSON_SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", JSON_SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("exponent form parses")
}

/// A JSON number rounded to 12 significant digits; NaN and infinities,
/// which JSON cannot carry, become `null`.
pub fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(round_significant(x)).map_or(Value::Null, Value::Number)
}

pub fn json_numbers(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json_number(x)).collect())
}

/// CSV cell for a real: the shortest text that parses back to the same
/// `f64`, in exponent form for very small or large magnitudes, and `inf`,
/// `-inf` or `nan` for non-finite values.
pub fn csv_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Serialises rows with RFC 4180 quoting.
pub fn write_csv(header: &[String], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

pub fn to_json_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serialising a JSON value");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(round_significant(0.123456789012345), 0.123456789012);
        assert_eq!(round_significant(-98765.43210987654), -98765.4321099);
        assert_eq!(round_significant(0.0), 0.0);
        assert_eq!(json_number(f64::INFINITY), Value::Null);
        assert_eq!(json_number(1.0).to_string(), "1.0");
    }

    #[test]
    fn csv_numbers_round_trip() {
        for x in [
            0.0,
            1.5,
            -2.25e-9,
            3.0e20,
            0.9387654321234567,
            1e-4,
            123456.0,
        ] {
            assert_eq!(csv_number(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(csv_number(1e-20), "1e-20");
        assert_eq!(csv_number(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_quoting() {
        let bytes = write_csv(&["a".into(), "b".into()], &[vec!["x,y".into(), "1".into()]]);
        assert_eq!(String::from_utf8(bytes).unwrap(), "a,b\n\"x,y\",1\n");
    }
}
