//! Report emission: JSON with every float at 17 significant digits (full
//! f64 round-trip precision) and CSV with a timestamp comment header.

use anyhow::{Context, Result};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

/// serde_json formatter printing floats as d.dddddddddddddddd e+xx.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // JSON has no non-finite numbers; make the defect visible
            write!(writer, "null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json_string(value: &impl Serialize) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser).context("serializing report")?;
    Ok(String::from_utf8(out)?)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let body = to_json_string(value)?;
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn csv_sibling(path: &Path) -> PathBuf {
    path.with_extension("csv")
}

/// CSV with a leading timestamp comment; the data lines are deterministic.
pub fn write_csv(path: &Path, lines: &[String]) -> Result<()> {
    let mut f = std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))?;
    let ms = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    writeln!(f, "# generated_unix_ms {ms}")?;
    for line in lines {
        writeln!(f, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_17_significant_digits() {
        #[derive(Serialize)]
        struct S {
            x: f64,
        }
        let s = to_json_string(&S { x: std::f64::consts::PI }).unwrap();
        assert_eq!(s, "{\"x\":3.1415926535897931e0}");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), std::f64::consts::PI);
    }
}
