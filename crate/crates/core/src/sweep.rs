//! Parameter sweeps: deterministic parallel evaluation and self-describing
//! CSV output.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Modelling conventions every output records.
pub fn default_assumptions() -> Vec<(String, String)> {
    [
        ("background_error_e0", "0.5"),
        ("log_base", "2"),
        ("photon_cutoff", "dots: 3 photons; poisson: tail < 1e-13"),
        ("mu_search", "64-point log grid then golden section"),
        ("choi_convention", "J = sum_ij L(|i><j|) x |i><j|, Tr_out J = 1, operators paired with the entrywise conjugate"),
        ("token_squashed_qubits", "+, +i, -, -i"),
        ("coinflip_states", "collected photons on the qubit Phi_(alpha,c)"),
        ("z_model", "(1 - p_click)^N, dark counts folded into p_click"),
        ("pulse_count", "smallest integer N with P_ab <= target"),
        ("bitcommit_m3", "1-P(>=2)"),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub title: String,
    pub metadata: Vec<(String, String)>,
    pub assumptions: Vec<(String, String)>,
    pub columns: Vec<String>,
    rows: Vec<(f64, Vec<String>)>,
}

impl SweepResult {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            title: title.into(),
            metadata: vec![("toolkit_version".into(), TOOLKIT_VERSION.into())],
            assumptions: default_assumptions(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    /// Replaces (or adds) an assumption entry.
    pub fn assume(mut self, key: &str, value: impl ToString) -> Self {
        match self.assumptions.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value.to_string(),
            None => self.assumptions.push((key.into(), value.to_string())),
        }
        self
    }

    /// Appends a row; rows are kept sorted by `key` (stable for ties).
    pub fn push(&mut self, key: f64, cells: Vec<String>) -> Result<()> {
        if cells.len() != self.columns.len() {
            return invalid(format!(
                "row has {} cells, expected {}",
                cells.len(),
                self.columns.len()
            ));
        }
        let at = self
            .rows
            .partition_point(|(k, _)| k.total_cmp(&key).is_le());
        self.rows.insert(at, (key, cells));
        Ok(())
    }

    pub fn rows(&self) -> impl Iterator<Item = &[String]> {
        self.rows.iter().map(|(_, r)| r.as_slice())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|(_, r)| r[i].as_str()).collect())
    }

    /// CSV with a `#`-commented header of metadata and assumptions.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = Vec::new();
        writeln!(out, "# {}", self.title)?;
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        for (k, v) in &self.assumptions {
            writeln!(out, "# assumption {k}: {v}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            let fail = |e: csv::Error| Error::InvalidInput(format!("csv encoding failed: {e}"));
            w.write_record(&self.columns).map_err(fail)?;
            for (_, row) in &self.rows {
                w.write_record(row).map_err(fail)?;
            }
            w.flush()?;
        }
        String::from_utf8(out).map_err(|e| Error::InvalidInput(format!("non-utf8 csv output: {e}")))
    }

    /// Writes through a temporary file in the target directory and renames it into place.
    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv()?.as_bytes())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// `steps` evenly spaced points from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return invalid(format!("a sweep needs at least 2 steps, got {steps}"));
    }
    if !(min.is_finite() && max.is_finite()) || min > max {
        return invalid(format!("invalid sweep bounds [{min}, {max}]"));
    }
    let h = (max - min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                max
            } else {
                min + h * i as f64
            }
        })
        .collect())
}

/// Evaluates `f` on every point with `workers` threads; output order
/// matches input order regardless of scheduling.
pub fn parallel_map<T: Send>(
    points: &[f64],
    workers: usize,
    f: impl Fn(f64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    if workers <= 1 {
        return points.iter().map(|&x| f(x)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| points.par_iter().map(|&x| f(x)).collect())
}

/// Shortest round-trip decimal form, so equal values always print identically.
pub fn num(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_sorted_and_csv_header() {
        let mut r = SweepResult::new("demo", &["x", "y"]).meta("source", "tpe");
        r.push(2.0, vec!["2".into(), "b".into()]).unwrap();
        r.push(1.0, vec!["1".into(), "a".into()]).unwrap();
        assert_eq!(r.column("x").unwrap(), vec!["1", "2"]);
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("# demo\n"));
        assert!(csv.contains("# source: tpe\n"));
        assert!(csv.contains("# assumption log_base: 2\n"));
        assert!(csv.ends_with("x,y\n1,a\n2,b\n"));
        assert!(r.push(3.0, vec!["3".into()]).is_err());
    }

    #[test]
    fn assumption_override() {
        let r = SweepResult::new("t", &["x"]).assume("bitcommit_m3", "1-P(0)");
        assert!(r
            .assumptions
            .iter()
            .any(|(k, v)| k == "bitcommit_m3" && v == "1-P(0)"));
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.1, 1.0, 10).unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[9], 1.0);
        assert!(linspace(0.0, 1.0, 1).is_err());
        assert!(linspace(1.0, 0.0, 5).is_err());
    }

    #[test]
    fn parallel_map_keeps_order() {
        let pts = linspace(0.0, 1.0, 50).unwrap();
        let one = parallel_map(&pts, 1, |x| Ok(x * x)).unwrap();
        let many = parallel_map(&pts, 4, |x| Ok(x * x)).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
    }
}
