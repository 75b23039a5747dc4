//! Text formats for result files: `%.12g` floats, 0/1 booleans and the
//! `# config:` header line.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;
pub const HEADER_PREFIX: &str = "# config: ";

/// C-style `%.{digits}g`: shortest of fixed or exponent notation, trailing
/// zeros removed. Non-finite values print as `inf`, `-inf` and `nan`.
pub fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_f64(x: f64) -> String {
    format_g(x, SIGNIFICANT_DIGITS)
}

pub fn fmt_bool(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn parse_f64(s: &str) -> Result<f64, CliError> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        _ => s.parse().map_err(|_| CliError::Format(format!("not a number: {s:?}"))),
    }
}

pub fn parse_bool(s: &str) -> Result<bool, CliError> {
    match s {
        "1" => Ok(true),
        "0" => Ok(false),
        _ => Err(CliError::Format(format!("not a 0/1 flag: {s:?}"))),
    }
}

/// Splits leading `#` lines from the body.
pub fn split_header(text: &str) -> (Vec<&str>, &str) {
    let mut rest = text;
    let mut header = Vec::new();
    while rest.starts_with('#') {
        let end = rest.find('\n').map_or(rest.len(), |i| i + 1);
        header.push(rest[..end].trim_end_matches('\n'));
        rest = &rest[end..];
    }
    (header, rest)
}

pub fn header_line<C: Serialize>(config: &C) -> Result<String, CliError> {
    Ok(format!("{HEADER_PREFIX}{}\n", serde_json::to_string(config)?))
}

/// Writes `body` to `path` behind the config header, or to stdout without it.
pub fn emit<C: Serialize>(config: &C, path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, header_line(config)? + body).map_err(CliError::from),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    Ok(serde_json::from_str(split_header(text).1)?)
}

/// Renders CSV rows of preformatted fields.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Format(e.to_string()))
}

/// Parses CSV text (header comments allowed), checking the column names.
pub fn csv_records(text: &str, header: &[&str]) -> Result<Vec<csv::StringRecord>, CliError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(CliError::Format(format!("expected columns {header:?}, found {found:?}")));
    }
    r.records().map(|rec| rec.map_err(CliError::from)).collect()
}
