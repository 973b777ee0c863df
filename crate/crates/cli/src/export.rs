//! Bit-stable CSV and JSON output: fixed column order, 17 significant digits,
//! LF line endings.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use tailforge::convolve::BracketGrid;
use tailforge::functionals::DiagSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// `{:.16e}` for finite values, `inf`, `-inf` or `nan` otherwise.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A JSON number, or a string for non-finite values.
pub fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or_else(|| Value::String(fmt_f64(v)))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    /// Rows as objects keyed by column, values kept as their CSV text.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: serde_json::Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(r.iter().map(|c| match c.parse::<f64>() {
                        Ok(v) if v.is_finite() => json_f64(v),
                        _ => Value::String(c.clone()),
                    }))
                    .collect();
                Value::Object(m)
            })
            .collect();
        json_text(&Value::Array(rows))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_text<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}

/// Columns `param, value` and `window` when annotated.
pub fn series_table(s: &DiagSeries) -> Table {
    let windowed = s.windows.is_some();
    let mut t = Table::new(if windowed { &["param", "value", "window"] } else { &["param", "value"] });
    for (i, (p, v)) in s.param.iter().zip(&s.values).enumerate() {
        let mut row = vec![fmt_f64(*p), fmt_f64(*v)];
        if let Some(w) = &s.windows {
            row.push(w[i].map(|w| w.to_string()).unwrap_or_default());
        }
        t.push(row);
    }
    t
}

/// Columns `x, log_lower, log_upper`.
pub fn bracket_table(g: &BracketGrid) -> Table {
    let mut t = Table::new(&["x", "log_lower", "log_upper"]);
    for i in 0..g.grid.len() {
        t.push(vec![fmt_f64(g.grid[i]), fmt_f64(g.lower[i]), fmt_f64(g.upper[i])]);
    }
    t
}

pub fn bracket_json(g: &BracketGrid) -> String {
    let arr = |v: &[f64]| Value::Array(v.iter().map(|&x| json_f64(x)).collect());
    json_text(&serde_json::json!({
        "n": g.n,
        "h": json_f64(g.h),
        "cap": g.cap.map(json_f64),
        "x": arr(&g.grid),
        "log_lower": arr(&g.lower),
        "log_upper": arr(&g.upper),
    }))
}

/// A result that can be exported.
pub enum Exportable {
    Series(DiagSeries),
    Brackets(BracketGrid),
}

impl Exportable {
    /// Recognises a JSON document written by this tool.
    pub fn from_json(text: &str) -> Result<Self> {
        if let Ok(s) = serde_json::from_str::<DiagSeries>(text) {
            return Ok(Exportable::Series(s));
        }
        let v: Value = serde_json::from_str(text).context("input is not JSON")?;
        let arr = |k: &str| -> Result<Vec<f64>> {
            v.get(k)
                .and_then(Value::as_array)
                .with_context(|| format!("missing array {k:?}"))?
                .iter()
                .map(|e| match e {
                    Value::Number(n) => n.as_f64().context("bad number"),
                    Value::String(s) => s.parse::<f64>().with_context(|| format!("bad number {s:?}")),
                    _ => anyhow::bail!("bad entry in {k:?}"),
                })
                .collect()
        };
        let n = v.get("n").and_then(Value::as_u64).context("not a diagnostic series or bracket grid")? as usize;
        Ok(Exportable::Brackets(BracketGrid {
            grid: arr("x")?,
            lower: arr("log_lower")?,
            upper: arr("log_upper")?,
            n,
            h: v.get("h").and_then(Value::as_f64).context("missing h")?,
            cap: v.get("cap").and_then(Value::as_f64),
        }))
    }

    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Exportable::Series(s), Format::Csv) => series_table(s).to_csv(),
            (Exportable::Series(s), Format::Json) => json_text(s),
            (Exportable::Brackets(g), Format::Csv) => bracket_table(g).to_csv(),
            (Exportable::Brackets(g), Format::Json) => bracket_json(g),
        }
    }
}

pub fn export_grid(item: &Exportable, format: Format, path: &Path) -> Result<()> {
    write_file(path, &item.render(format))
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tailforge::functionals::{DiagSeries, TrendRules};

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 7.417750289644485e18, -2.5] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(f64::NEG_INFINITY).parse::<f64>().unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn series_round_trip() {
        let s = DiagSeries::from_logs("d", vec![1.0, 2.0], vec![0.0, 1.0], &TrendRules::default());
        let e = Exportable::from_json(&json_text(&s)).unwrap();
        assert_eq!(e.render(Format::Csv), series_table(&s).to_csv());
        assert!(e.render(Format::Csv).starts_with("param,value\n"));
    }

    #[test]
    fn bracket_round_trip() {
        let g = BracketGrid {
            grid: vec![0.0, 0.5],
            lower: vec![0.0, f64::NEG_INFINITY],
            upper: vec![0.0, -0.25],
            n: 2,
            h: 0.5,
            cap: None,
        };
        let Exportable::Brackets(back) = Exportable::from_json(&bracket_json(&g)).unwrap() else {
            panic!()
        };
        assert_eq!(back, g);
    }
}
