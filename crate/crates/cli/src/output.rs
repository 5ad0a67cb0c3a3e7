//! Report rendering: JSON with `%.17g` floats, or CSV rows.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

/// `%.17g`: 17 significant digits, trailing zeros dropped, exponent form
/// outside `[1e-5, 1e17)`.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.16e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..17).contains(&exp) {
        trim_fraction(format!("{v:.*}", (16 - exp) as usize))
    } else {
        format!("{}e{exp}", trim_fraction(mant.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

struct G17;

impl Formatter for G17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_g17(value).as_bytes())
    }
}

pub fn write_json(out: &mut impl Write, report: &Value) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *out, G17);
    report.serialize(&mut ser)?;
    writeln!(out)
}

/// One row per result object; nested values become compact JSON cells.
pub fn write_csv(out: &mut impl Write, results: &Value) -> io::Result<()> {
    let rows: Vec<&Map<String, Value>> = match results {
        Value::Array(items) => items.iter().filter_map(Value::as_object).collect(),
        Value::Object(obj) => vec![obj],
        _ => Vec::new(),
    };
    let Some(first) = rows.first() else {
        return Ok(());
    };
    let header: Vec<&String> = first.keys().collect();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header.iter().map(|k| k.as_str()))?;
    for row in &rows {
        w.write_record(header.iter().map(|k| cell(row.get(*k).unwrap_or(&Value::Null))))?;
    }
    w.flush()
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => fmt_g17(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => {
            let mut buf = Vec::new();
            let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17);
            other.serialize(&mut ser).expect("in-memory serialisation");
            String::from_utf8(buf).expect("json is utf-8")
        }
    }
}
