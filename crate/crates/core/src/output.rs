//! Experiment tables and their CSV / JSON renderings. Numbers are printed
//! with 17 significant digits; exact values are rounded exactly and JSON
//! output also carries their exact form.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::ExactScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format '{s}' (csv, json)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Exact(ExactScalar),
    Float(f64),
    Int(i128),
    Text(String),
    Bool(bool),
}

impl From<ExactScalar> for Cell {
    fn from(x: ExactScalar) -> Self {
        Cell::Exact(x)
    }
}
impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}
impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i128)
    }
}
impl From<u128> for Cell {
    fn from(x: u128) -> Self {
        Cell::Int(x as i128)
    }
}
impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i128)
    }
}
impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x as i128)
    }
}
impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}
impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}
impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// `x` rounded to 17 significant digits, trailing zeros dropped;
/// positional for moderate exponents, `de±x` otherwise.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant),
    };
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let body = if (-5..17).contains(&exp) {
        if exp >= 0 {
            let e = exp as usize;
            if digits.len() <= e + 1 {
                format!("{}{}", digits, "0".repeat(e + 1 - digits.len()))
            } else {
                format!("{}.{}", &digits[..=e], &digits[e + 1..])
            }
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        }
    } else if digits.len() == 1 {
        format!("{digits}e{exp}")
    } else {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

pub fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Exact(x) => x.to_decimal_string(17),
        Cell::Float(x) => format_f64(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header of {}",
            self.name
        );
        self.rows.push(row);
    }
}

/// Key/value pairs echoed at the top of every output file.
pub type Header = Vec<(String, String)>;

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn json_cell(c: &Cell) -> String {
    match c {
        Cell::Exact(_) | Cell::Float(_) => {
            let s = format_cell(c);
            if s.parse::<f64>().map_or(false, f64::is_finite) {
                s
            } else {
                json_string(&s)
            }
        }
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => json_string(s),
        Cell::Bool(b) => b.to_string(),
    }
}

/// Renders tables with a `# key: value` header (CSV) or a `config` object
/// (JSON). Several tables in one CSV file are separated by blank lines.
pub fn render(tables: &[Table], header: &Header, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            for (k, v) in header {
                let _ = writeln!(out, "# {k}: {v}");
            }
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                if tables.len() > 1 {
                    let _ = writeln!(out, "# table: {}", t.name);
                }
                let _ = writeln!(
                    out,
                    "{}",
                    t.columns
                        .iter()
                        .map(|c| csv_field(c))
                        .collect::<Vec<_>>()
                        .join(",")
                );
                for row in &t.rows {
                    let _ = writeln!(
                        out,
                        "{}",
                        row.iter()
                            .map(|c| csv_field(&format_cell(c)))
                            .collect::<Vec<_>>()
                            .join(",")
                    );
                }
            }
        }
        Format::Json => {
            out.push_str("{\n  \"config\": {");
            let cfg: Vec<String> = header
                .iter()
                .map(|(k, v)| format!("\n    {}: {}", json_string(k), json_string(v)))
                .collect();
            out.push_str(&cfg.join(","));
            out.push_str("\n  },\n  \"tables\": [");
            let ts: Vec<String> = tables
                .iter()
                .map(|t| {
                    let rows: Vec<String> = t
                        .rows
                        .iter()
                        .map(|row| {
                            let mut fields = Vec::new();
                            for (col, c) in t.columns.iter().zip(row) {
                                fields.push(format!("{}: {}", json_string(col), json_cell(c)));
                                if let Cell::Exact(x) = c {
                                    fields.push(format!(
                                        "{}: {}",
                                        json_string(&format!("{col}_exact")),
                                        json_string(&x.to_exact_string())
                                    ));
                                }
                            }
                            format!("\n        {{{}}}", fields.join(", "))
                        })
                        .collect();
                    format!(
                        "\n    {{\n      \"name\": {},\n      \"rows\": [{}\n      ]\n    }}",
                        json_string(&t.name),
                        rows.join(",")
                    )
                })
                .collect();
            out.push_str(&ts.join(","));
            out.push_str("\n  ]\n}\n");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_f64(0.5), "0.5");
        assert_eq!(format_f64(2.0 / 3.0), "0.66666666666666663");
        assert_eq!(format_f64(-1234.5), "-1234.5");
        assert_eq!(format_f64(1e20), "1e20");
        assert_eq!(format_f64(1.5e-9), "1.5e-9");
        assert_eq!(format_f64(100.0), "100");
        assert_eq!(format_f64(0.001), "0.001");
        for x in [std::f64::consts::PI, 1.0 / 3.0, 6.02214076e23, 1e-300] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn render_both_formats() {
        let mut t = Table::new("demo", &["t", "value", "note"]);
        t.push(vec![
            Cell::Int(3),
            ExactScalar::ratio(2, 3).into(),
            "a,b".into(),
        ]);
        let header = vec![("seed".to_string(), "1".to_string())];
        let csv = render(&[t.clone()], &header, Format::Csv);
        assert_eq!(
            csv,
            "# seed: 1\nt,value,note\n3,0.66666666666666667,\"a,b\"\n"
        );
        let json = render(&[t], &header, Format::Json);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["tables"][0]["rows"][0]["value_exact"], "2/3");
        assert_eq!(v["config"]["seed"], "1");
    }
}
