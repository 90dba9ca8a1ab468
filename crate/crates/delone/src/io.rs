//! Point-set files (JSON and CSV) and JSON helpers for schemes, rules and
//! reports.
//!
//! JSON numbers use the shortest representation that parses back to the
//! same `f64`; CSV coordinates are written with 17 significant digits.
//! Both round-trip bit-exactly.

use crate::error::{DeloneError, Result};
use crate::geometry::Point;
use crate::set::WindowedDeloneSet;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use std::str::FromStr;

/// Serialized form of a [`WindowedDeloneSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSetFile {
    pub dim: usize,
    pub window_radius: f64,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
    #[serde(default)]
    pub meta: serde_json::Value,
}

impl PointSetFile {
    pub fn from_set(x: &WindowedDeloneSet) -> Self {
        PointSetFile {
            dim: x.dim(),
            window_radius: x.window_radius(),
            points: x.points().iter().map(|p| p.coords(x.dim()).to_vec()).collect(),
            labels: x.labels().map(<[u32]>::to_vec),
            r: x.r_declared(),
            big_r: x.big_r_declared(),
            meta: x.meta().clone(),
        }
    }

    pub fn into_set(self) -> Result<WindowedDeloneSet> {
        let pts = self
            .points
            .iter()
            .map(|c| {
                if c.len() != self.dim {
                    return Err(DeloneError::Parse(format!("point {c:?} does not have {} coordinates", self.dim)));
                }
                Point::from_slice(c).ok_or_else(|| DeloneError::Parse(format!("bad point {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        WindowedDeloneSet::new(self.dim, self.window_radius, pts, self.labels)?
            .with_declared(self.r, self.big_r)
            .map(|s| s.with_meta(self.meta))
    }
}

/// Output format for point sets and tabular reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = DeloneError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(DeloneError::InvalidInput(format!("unknown format {s:?} (json, csv)"))),
        }
    }
}

impl Format {
    /// `csv` for a `.csv` extension, JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

pub fn point_set_to_json(x: &WindowedDeloneSet) -> String {
    let mut s = serde_json::to_string_pretty(&PointSetFile::from_set(x)).expect("point sets serialize");
    s.push('\n');
    s
}

pub fn point_set_from_json(text: &str) -> Result<WindowedDeloneSet> {
    serde_json::from_str::<PointSetFile>(text)?.into_set()
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with `#` header lines carrying the window and declared constants,
/// then a column-name row, then one point per row with the label last.
pub fn point_set_to_csv(x: &WindowedDeloneSet) -> String {
    let mut out = format!("# dim={}\n# window_radius={}\n", x.dim(), fmt_f64(x.window_radius()));
    if let Some(r) = x.r_declared() {
        out += &format!("# r={}\n", fmt_f64(r));
    }
    if let Some(r) = x.big_r_declared() {
        out += &format!("# R={}\n", fmt_f64(r));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head: Vec<&str> = ["x", "y"][..x.dim()].to_vec();
    if x.labels().is_some() {
        head.push("label");
    }
    w.write_record(&head).expect("in-memory write");
    for (i, p) in x.points().iter().enumerate() {
        let mut row: Vec<String> = p.coords(x.dim()).iter().map(|&c| fmt_f64(c)).collect();
        if let Some(l) = x.label(i) {
            row.push(l.to_string());
        }
        w.write_record(&row).expect("in-memory write");
    }
    out + &String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

/// Reads [`point_set_to_csv`] output. Without a `window_radius` header the
/// window is the largest point norm; without `dim` it is the number of
/// coordinate columns.
pub fn point_set_from_csv(text: &str) -> Result<WindowedDeloneSet> {
    let mut hdr = std::collections::HashMap::new();
    for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
        if let Some((k, v)) = line.trim().split_once('=') {
            hdr.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let num = |k: &str| -> Result<Option<f64>> {
        hdr.get(k)
            .map(|v| v.parse::<f64>().map_err(|e| DeloneError::Parse(format!("header {k}: {e}"))))
            .transpose()
    };
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let cols: Vec<String> = rd
        .headers()
        .map_err(|e| DeloneError::Parse(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let labelled = cols.last().is_some_and(|c| c == "label");
    let ncoord = cols.len() - labelled as usize;
    let dim = match num("dim")? {
        Some(d) => d as usize,
        None => ncoord,
    };
    if dim != ncoord {
        return Err(DeloneError::Parse(format!("dim {dim} but {ncoord} coordinate columns")));
    }
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| DeloneError::Parse(e.to_string()))?;
        let vals: Vec<f64> = rec
            .iter()
            .take(ncoord)
            .map(|v| v.parse::<f64>().map_err(|e| DeloneError::Parse(format!("{v:?}: {e}"))))
            .collect::<Result<_>>()?;
        pts.push(Point::from_slice(&vals).ok_or_else(|| DeloneError::Parse(format!("bad point {vals:?}")))?);
        if labelled {
            let l = rec.get(ncoord).unwrap_or("");
            labels.push(l.parse::<u32>().map_err(|e| DeloneError::Parse(format!("label {l:?}: {e}")))?);
        }
    }
    let w = match num("window_radius")? {
        Some(w) => w,
        None => pts.iter().map(|p| p.norm()).fold(0.0, f64::max),
    };
    WindowedDeloneSet::new(dim, w, pts, labelled.then_some(labels))?.with_declared(num("r")?, num("R")?)
}

pub fn read_point_set(path: impl AsRef<Path>) -> Result<WindowedDeloneSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    match Format::from_path(path) {
        Format::Json => point_set_from_json(&text),
        Format::Csv => point_set_from_csv(&text),
    }
}

pub fn write_point_set(path: impl AsRef<Path>, x: &WindowedDeloneSet, format: Format) -> Result<()> {
    let text = match format {
        Format::Json => point_set_to_json(x),
        Format::Csv => point_set_to_csv(x),
    };
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

/// CSV text from a header and rows of already formatted fields.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{ammann_beenker_scheme, generate_cut_and_project, generate_substitution_1d, SubstitutionRule1D};

    fn same(a: &WindowedDeloneSet, b: &WindowedDeloneSet) {
        assert_eq!(a.dim(), b.dim());
        assert_eq!(a.window_radius().to_bits(), b.window_radius().to_bits());
        assert_eq!(a.len(), b.len());
        for (p, q) in a.points().iter().zip(b.points()) {
            assert_eq!(p.x().to_bits(), q.x().to_bits());
            assert_eq!(p.y().to_bits(), q.y().to_bits());
        }
        assert_eq!(a.labels(), b.labels());
        assert_eq!(a.r_declared(), b.r_declared());
        assert_eq!(a.big_r_declared(), b.big_r_declared());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let x = generate_substitution_1d(&SubstitutionRule1D::fibonacci(), 200.0).unwrap();
        let y = point_set_from_json(&point_set_to_json(&x)).unwrap();
        same(&x, &y);
        assert_eq!(y.meta(), x.meta());
        let ab = generate_cut_and_project(&ammann_beenker_scheme(), 6.0).unwrap().set;
        same(&ab, &point_set_from_json(&point_set_to_json(&ab)).unwrap());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let x = generate_substitution_1d(&SubstitutionRule1D::fibonacci(), 200.0).unwrap();
        same(&x, &point_set_from_csv(&point_set_to_csv(&x)).unwrap());
        let ab = generate_cut_and_project(&ammann_beenker_scheme(), 6.0).unwrap().set;
        let text = point_set_to_csv(&ab);
        assert!(text.contains("x,y\n"));
        same(&ab, &point_set_from_csv(&text).unwrap());
    }

    #[test]
    fn bare_csv_infers_window() {
        let x = point_set_from_csv("x\n-1\n0\n2.5\n").unwrap();
        assert_eq!(x.window_radius(), 2.5);
        assert_eq!(x.len(), 3);
        assert!(point_set_from_csv("x,label\n0,a\n").is_err());
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(point_set_from_json("{\"dim\": 1}"), Err(DeloneError::Parse(_))));
        let bad = r#"{"dim": 2, "window_radius": 3, "points": [[0.0]]}"#;
        assert!(matches!(point_set_from_json(bad), Err(DeloneError::Parse(_))));
    }

    #[test]
    fn files_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        let x = generate_substitution_1d(&SubstitutionRule1D::silver_mean(), 50.0).unwrap();
        for name in ["a.json", "a.csv"] {
            let p = dir.path().join(name);
            write_point_set(&p, &x, Format::from_path(&p)).unwrap();
            same(&x, &read_point_set(&p).unwrap());
        }
    }
}
