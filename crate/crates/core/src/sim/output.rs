//! CSV writers. Every file starts with `#`-prefixed `key=value` lines
//! echoing the configuration that produced it.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{CurvePoint, MdrTable};
use crate::error::Result;

/// Shortest round-trip decimal form; values within 1e-9 of a multiple of
/// 1e-9 are snapped first so sweep points print as typed.
pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let snapped = (v * 1e9).round() / 1e9;
    let v = if (snapped - v).abs() < 1e-12 { snapped } else { v };
    format!("{v}")
}

fn open(path: &Path, header: &[(String, String)]) -> Result<BufWriter<File>> {
    let mut w = BufWriter::new(File::create(path)?);
    for (k, v) in header {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(w)
}

/// Columns `EbN0dB,FER,errors,blocks`.
pub fn write_bler_csv(path: &Path, header: &[(String, String)], points: &[CurvePoint]) -> Result<()> {
    let mut w = open(path, header)?;
    writeln!(w, "EbN0dB,FER,errors,blocks")?;
    for p in points {
        writeln!(w, "{},{},{},{}", format_float(p.x), format_float(p.y), p.count, p.n)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `method,effort,B,MDR,misses,trials`.
pub fn write_mdr_csv(path: &Path, header: &[(String, String)], table: &MdrTable) -> Result<()> {
    let mut w = open(path, header)?;
    writeln!(w, "method,effort,B,MDR,misses,trials")?;
    for r in &table.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.series.label(),
            r.series.effort,
            r.b,
            format_float(r.mdr),
            r.misses,
            r.trials
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_print_plainly() {
        assert_eq!(format_float(3.0 + 7.0 * 0.1), "3.7");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(0.0001), "0.0001");
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(1.0 / 3.0), format!("{}", 1.0 / 3.0));
    }

    #[test]
    fn bler_file_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.csv");
        let pts = [CurvePoint::new(3.0, 5, 100), CurvePoint::new(3.5, 0, 100)];
        write_bler_csv(&path, &[("decoder".into(), "sc".into())], &pts).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "# decoder=sc\nEbN0dB,FER,errors,blocks\n3,0.05,5,100\n3.5,0,0,100\n");
    }

    #[test]
    fn unwritable_path_is_error() {
        let pts = [CurvePoint::new(3.0, 5, 100)];
        assert!(write_bler_csv(Path::new("/nonexistent-dir/x.csv"), &[], &pts).is_err());
    }
}
