//! Byte-stable serialization of results.
//!
//! Reals are written with 12 significant digits. JSON goes through
//! `serde_json` after rounding every float to 12 significant digits, so the
//! shortest round-trip representation it prints never carries more digits
//! than that. Field order is the struct declaration order.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Decimal rendering with [`SIG_DIGITS`] significant digits, trailing zeros
/// trimmed. Very large or small magnitudes fall back to `1.5e-9` style.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-6..15).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa.to_string()));
    }
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m.replace('.', "")),
        None => ("", mantissa.replace('.', "")),
    };
    let body = if exp < 0 {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            format!("{digits}{}", "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    };
    trim_zeros(format!("{sign}{body}"))
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

/// `x` rounded to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

fn round_value(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) => {
            if n.is_f64() {
                if let Some(f) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig(f)) {
                        *n = r;
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_value),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_value(value).expect("result types serialize");
    round_value(&mut v);
    let mut out = serde_json::to_vec_pretty(&v).expect("json value serializes");
    out.push(b'\n');
    out
}

/// Something that can be written as CSV rows under a fixed header.
pub trait Tabular {
    fn header() -> &'static [&'static str];
    fn row(&self) -> Vec<String>;
}

pub fn to_csv<T: Tabular>(rows: &[T]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(T::header()).expect("in-memory write");
    for r in rows {
        w.write_record(r.row()).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Serializes a table in either format.
pub fn emit_table<T: Tabular + Serialize>(rows: &[T], format: Format) -> Vec<u8> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(&rows),
    }
}

/// Serializes a summary that only has a JSON form.
pub fn emit_summary<T: Serialize>(value: &T, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => Ok(to_json(value)),
        Format::Csv => Err(Error::UnsupportedFormat(format!(
            "{format} (this output is JSON only)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(1.4), "1.4");
        assert_eq!(fmt_sig(0.1 + 0.2), "0.3");
        assert_eq!(fmt_sig(6.669968495425617), "6.66996849543");
        assert_eq!(fmt_sig(27.810580499042919), "27.810580499");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1e6), "1000000");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(1.5e-9), "1.5e-9");
        assert_eq!(fmt_sig(1e20), "1e20");
        assert_eq!(fmt_sig(123456789012345.0), "123456789012000");
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.9856804168542678), 1.98568041685);
    }

    #[derive(Serialize)]
    struct Row {
        a: f64,
        b: &'static str,
    }

    impl Tabular for Row {
        fn header() -> &'static [&'static str] {
            &["a", "b"]
        }
        fn row(&self) -> Vec<String> {
            vec![fmt_sig(self.a), self.b.to_string()]
        }
    }

    #[test]
    fn csv_quotes_commas_and_keeps_header() {
        let out = to_csv(&[Row { a: 0.5, b: "(1,2)" }]);
        assert_eq!(String::from_utf8(out).unwrap(), "a,b\n0.5,\"(1,2)\"\n");
    }

    #[test]
    fn json_is_stable_and_parses() {
        let rows = [Row { a: 1.0 / 3.0, b: "x" }];
        let one = emit_table(&rows, Format::Json);
        assert_eq!(one, emit_table(&rows, Format::Json));
        let v: serde_json::Value = serde_json::from_slice(&one).unwrap();
        assert_eq!(v[0]["a"].as_f64().unwrap(), 0.333333333333);
        assert_eq!(v[0]["b"], "x");
    }

    #[test]
    fn summary_rejects_csv() {
        assert!(matches!(
            emit_summary(&1.0, Format::Csv),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!("xml".parse::<Format>().is_err());
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
    }
}
