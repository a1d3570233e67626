//! Artifact writers. CSV floats carry 17 significant digits; JSON documents
//! carry `"schema": 1` and the seed.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn ints(v: &[i64]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

/// A CSV table whose fields never contain separators.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Collects artifacts for one output directory.
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Artifacts { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn put(&mut self, name: &str, text: &str) -> io::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> io::Result<()> {
        self.put(name, &table.render())
    }

    /// Writes `{"schema": 1, "command", "seed", ...body}`.
    pub fn json(&mut self, name: &str, command: &str, seed: u64, body: Value) -> io::Result<()> {
        let mut doc = json!({ "schema": SCHEMA, "command": command, "seed": seed });
        if let (Some(d), Value::Object(b)) = (doc.as_object_mut(), body) {
            d.extend(b);
        }
        let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
        text.push('\n');
        self.put(name, &text)
    }

    pub fn text(&mut self, name: &str, text: &str) -> io::Result<()> {
        self.put(name, text)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// Scatter plot of points in the plane with overlaid circles, on the square
/// `[-1.1, 1.1]^2`.
pub fn scatter_svg(title: &str, points: &[(f64, f64)], circles: &[(f64, f64, f64, &str)]) -> String {
    const SIZE: f64 = 480.0;
    const SPAN: f64 = 1.1;
    let px = |x: f64| (x + SPAN) / (2.0 * SPAN) * SIZE;
    let py = |y: f64| (SPAN - y) / (2.0 * SPAN) * SIZE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(
        s,
        r##"<line x1="0" y1="{y:.3}" x2="{SIZE}" y2="{y:.3}" stroke="#bbb"/><line x1="{x:.3}" y1="0" x2="{x:.3}" y2="{SIZE}" stroke="#bbb"/>"##,
        x = px(0.0),
        y = py(0.0)
    );
    for &(cx, cy, r, color) in circles {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            px(cx),
            py(cy),
            r / (2.0 * SPAN) * SIZE,
            color
        );
    }
    for &(x, y) in points {
        let _ = writeln!(s, r##"<circle cx="{:.3}" cy="{:.3}" r="1" fill="#1f4e9c"/>"##, px(x), py(y));
    }
    let _ = writeln!(s, r#"<text x="8" y="18" font-family="sans-serif" font-size="13">{}</text>"#, escape(title));
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Every `stride`-th item so that at most `cap` remain.
pub fn thin<T: Clone>(items: &[T], cap: usize) -> Vec<T> {
    let stride = items.len().div_ceil(cap.max(1)).max(1);
    items.iter().step_by(stride).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_is_pinned() {
        assert_eq!(num(-1.0 / 3.0), "-3.3333333333333331e-1");
        assert_eq!(num(0.0), "0.0000000000000000e0");
        assert_eq!(ints(&[1, -2]), "1 -2");
    }

    #[test]
    fn table_render() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.render(), "a,b\n1,2\n");
    }

    #[test]
    fn json_envelope() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::new(dir.path()).unwrap();
        a.json("x.json", "test", 7, json!({"value": 1.5})).unwrap();
        let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("x.json")).unwrap()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["seed"], 7);
        assert_eq!(v["value"], 1.5);
    }

    #[test]
    fn svg_is_well_formed() {
        let s = scatter_svg("a < b", &[(0.0, 0.0)], &[(0.0, 0.0, 1.0, "black")]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a &lt; b"));
        assert_eq!(thin(&[1, 2, 3, 4, 5], 2), vec![1, 4]);
    }
}
