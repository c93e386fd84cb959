use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::formalism::{to_csv, GameReport};

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn reports_json(reports: &[GameReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

/// The JSON mirror sits next to the CSV with a `.json` extension.
pub fn json_sibling(csv_path: &Path) -> PathBuf {
    if csv_path.extension().is_some_and(|e| e == "json") {
        let mut s = csv_path.as_os_str().to_owned();
        s.push(".json");
        return PathBuf::from(s);
    }
    csv_path.with_extension("json")
}

/// Writes `reports` as CSV to `csv_path` and as JSON to its sibling.
pub fn write_reports(reports: &[GameReport], csv_path: &Path) -> Result<PathBuf> {
    write_atomic(csv_path, to_csv(reports).as_bytes())?;
    let json = json_sibling(csv_path);
    write_atomic(&json, reports_json(reports).as_bytes())?;
    Ok(json)
}
