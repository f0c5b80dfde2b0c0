//! Artifact serialization: CSV for time series and spectra, JSON for
//! analysis reports. Files are UTF-8 with LF line endings, floats are
//! written with Rust's shortest round-trip formatting, and every file
//! embeds the resolved run configuration plus a schema version. Writes go
//! through a temp-file-then-rename step so concurrent sweep points never
//! expose partial files.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::analysis::SpectrumResult;
use crate::error::{Error, Result};
use crate::observables::TimeSeries;

/// Version stamp embedded in every artifact file.
pub const SCHEMA_VERSION: u32 = 1;

/// Shortest representation that parses back to the identical f64.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Writes `bytes` to `path` atomically (temp file in the same directory,
/// then rename), creating parent directories as needed.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn comment_header(config_json: &str) -> String {
    debug_assert!(!config_json.contains('\n'), "config comment must be one line");
    format!("# schema_version = {SCHEMA_VERSION}\n# config = {config_json}\n")
}

/// Renders a time-series CSV: comment header, then
/// `t_over_T0,<label>,...` with one row per sample.
pub fn series_csv(series: &TimeSeries, config_json: &str) -> String {
    let mut out = comment_header(config_json);
    out.push_str("t_over_T0");
    for label in &series.labels {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for k in 0..series.times.len() {
        out.push_str(&fmt_f64(series.times[k]));
        for row in &series.rows {
            out.push(',');
            out.push_str(&fmt_f64(row[k]));
        }
        out.push('\n');
    }
    out
}

/// Renders a spectrum CSV with columns `f_over_omega,magnitude`.
pub fn spectrum_csv(spec: &SpectrumResult, config_json: &str) -> String {
    let mut out = comment_header(config_json);
    out.push_str("f_over_omega,magnitude\n");
    for (f, m) in spec.freqs.iter().zip(&spec.magnitudes) {
        out.push_str(&fmt_f64(*f));
        out.push(',');
        out.push_str(&fmt_f64(*m));
        out.push('\n');
    }
    out
}

/// Writes a pretty-printed JSON document with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

/// Writes a time-series CSV (see [`series_csv`]).
pub fn write_series_csv(path: &Path, series: &TimeSeries, config_json: &str) -> Result<()> {
    atomic_write(path, series_csv(series, config_json).as_bytes())
}

/// Writes a spectrum CSV (see [`spectrum_csv`]).
pub fn write_spectrum_csv(path: &Path, spec: &SpectrumResult, config_json: &str) -> Result<()> {
    atomic_write(path, spectrum_csv(spec, config_json).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_series() -> TimeSeries {
        TimeSeries {
            times: vec![0.0, 0.05, 0.1],
            labels: vec!["m".into(), "sz_site_0".into()],
            rows: vec![vec![1.0, 0.5, -0.25], vec![0.1, 0.2, 0.3]],
        }
    }

    #[test]
    fn series_csv_layout() {
        let text = series_csv(&toy_series(), "{\"k\":1}");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema_version = 1");
        assert_eq!(lines[1], "# config = {\"k\":1}");
        assert_eq!(lines[2], "t_over_T0,m,sz_site_0");
        assert_eq!(lines[3], "0,1,0.1");
        assert_eq!(lines[4], "0.05,0.5,0.2");
        assert_eq!(lines.len(), 6);
        assert!(!text.contains('\r'), "LF only");
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn floats_round_trip_exactly() {
        let vals = [
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02e23,
            5e-324,
            -0.49371280382,
        ];
        for v in vals {
            let parsed: f64 = fmt_f64(v).parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits(), "value {v}");
        }
    }

    #[test]
    fn spectrum_csv_layout() {
        let spec = SpectrumResult {
            freqs: vec![0.0, 0.001],
            magnitudes: vec![3.25, 0.125],
            bin_width: 0.001,
        };
        let text = spectrum_csv(&spec, "{}");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[2], "f_over_omega,magnitude");
        assert_eq!(lines[3], "0,3.25");
        assert_eq!(lines[4], "0.001,0.125");
    }

    #[test]
    fn atomic_write_replaces_and_creates_dirs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/deep/file.csv");
        atomic_write(&path, b"one\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "one\n");
        atomic_write(&path, b"two\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two\n");
        // No stray temp files left behind.
        let entries: Vec<_> = std::fs::read_dir(path.parent().unwrap())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(entries.len(), 1);
    }

    #[test]
    fn json_write_is_pretty_with_trailing_newline() {
        #[derive(Serialize)]
        struct Doc {
            a: u32,
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("doc.json");
        write_json(&path, &Doc { a: 7 }).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"a\": 7"));
        assert!(text.ends_with("}\n"));
    }
}
