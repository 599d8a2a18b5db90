//! Deterministic output rendering.
//!
//! Every run must produce byte-identical output for identical parameters,
//! and every floating-point number is serialized with 15 significant
//! digits.
//! The JSON writer keeps keys in insertion order; the CSV writer prepends
//! `# key=value` metadata lines before the header row.

use std::fmt::Write as FmtWrite;

/// 15 significant digits, scientific notation (valid in both JSON and CSV).
pub fn num(x: f64) -> String {
    debug_assert!(x.is_finite(), "non-finite metric: {x}");
    format!("{x:.14e}")
}

/// Ordered JSON value.
pub enum Val {
    Num(f64),
    Int(i64),
    UInt(u64),
    Str(String),
    Arr(Vec<Val>),
    Obj(Vec<(&'static str, Val)>),
}

impl Val {
    pub fn obj(fields: Vec<(&'static str, Val)>) -> Val {
        Val::Obj(fields)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Val::Num(x) => out.push_str(&num(*x)),
            Val::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Val::UInt(u) => {
                let _ = write!(out, "{u}");
            }
            Val::Str(s) => write_json_string(out, s),
            Val::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    newline_indent(out, indent + 1);
                    item.write(out, indent + 1);
                }
                newline_indent(out, indent);
                out.push(']');
            }
            Val::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    newline_indent(out, indent + 1);
                    write_json_string(out, key);
                    out.push_str(": ");
                    value.write(out, indent + 1);
                }
                newline_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn newline_indent(out: &mut String, indent: usize) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn write_json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// A CSV table with `# key=value` metadata lines above the header.
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            meta: Vec::new(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Metadata shared by both output formats: the resolved run parameters.
#[derive(Clone)]
pub struct Meta {
    pub entries: Vec<(&'static str, String)>,
}

impl Meta {
    pub fn new(experiment: &'static str, seed: Option<u64>) -> Self {
        let mut entries = vec![("experiment", experiment.to_string())];
        if let Some(s) = seed {
            entries.push(("seed", s.to_string()));
        }
        Meta { entries }
    }

    pub fn push(&mut self, key: &'static str, value: String) {
        self.entries.push((key, value));
    }

    pub fn to_json(&self) -> Val {
        Val::Obj(
            self.entries
                .iter()
                .map(|(k, v)| (*k, Val::Str(v.clone())))
                .collect(),
        )
    }

    pub fn apply_to(&self, table: &mut Table) {
        table.meta = self
            .entries
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_fifteen_digits() {
        assert_eq!(num(0.5), "5.00000000000000e-1");
        assert_eq!(num(0.0), "0.00000000000000e0");
        assert_eq!(num(-2.8284271247461903), "-2.82842712474619e0");
    }

    #[test]
    fn json_renders_in_insertion_order() {
        let v = Val::obj(vec![
            ("zeta", Val::Int(1)),
            ("alpha", Val::Arr(vec![Val::Int(1), Val::Num(0.25)])),
        ]);
        let text = v.render();
        assert!(text.find("zeta").unwrap() < text.find("alpha").unwrap());
        assert!(text.contains("2.50000000000000e-1"));
    }

    #[test]
    fn csv_meta_precedes_header() {
        let mut t = Table::new(vec!["a", "b"]);
        t.meta.push(("seed".into(), "7".into()));
        t.rows.push(vec!["1".into(), num(1.5)]);
        let text = t.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# seed=7");
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines[2], "1,1.50000000000000e0");
    }

    #[test]
    fn strings_are_escaped() {
        let v = Val::Str("a\"b\\c\n".into());
        assert_eq!(v.render(), "\"a\\\"b\\\\c\\n\"\n");
    }
}
