//! Output files: CSV tables with a version line and header, gnuplot
//! scripts beside them, and atomic writes.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use gpscav_core::inverse::RateFit;

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Full-precision decimal (17 significant digits).
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table under construction.
#[derive(Clone, Debug)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = format!("# gpscav {VERSION}\n");
        text.push_str(&header.join(","));
        text.push('\n');
        Self {
            text,
            columns: header.len(),
        }
    }

    /// Appends a row of preformatted fields.
    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    /// Appends a row of numbers.
    pub fn nums(&mut self, values: &[f64]) {
        let f: Vec<String> = values.iter().map(|v| num(*v)).collect();
        self.row(&f);
    }

    /// Appends `# label: ...` trailer lines.
    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

/// `exponent=…, intercept=…, r2=…, window=[…], points=…`, or a note that
/// no fit was possible.
pub fn fit_summary(label: &str, fit: Option<&RateFit>) -> String {
    match fit {
        Some(f) => format!("{label}: {f}"),
        None => format!("{label}: unavailable"),
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

/// Files produced by a command, written only once the whole command has
/// succeeded.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), contents.into()));
    }

    /// Adds `name.csv` and the gnuplot script `name.gp` plotting it.
    pub fn csv(&mut self, name: &str, csv: &Csv, plot: &str) {
        self.add(&format!("{name}.csv"), csv.text());
        let script = format!(
            "# gpscav {VERSION}\nset datafile separator ','\nset datafile commentschars '#'\n{}\n",
            plot.replace("$CSV", &format!("'{name}.csv'"))
        );
        self.add(&format!("{name}.gp"), script);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let mut written = Vec::new();
        for (name, data) in &self.files {
            let p = dir.join(name);
            write_atomic(&p, data)?;
            written.push(p);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_has_version_and_header() {
        let mut c = Csv::new(&["a", "b"]);
        c.nums(&[1.0, 2.0]);
        c.comment("fit: none");
        let lines: Vec<&str> = c.text().lines().collect();
        assert_eq!(lines[0], format!("# gpscav {VERSION}"));
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn atomic_write_leaves_no_temporary() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("x.csv");
        write_atomic(&p, b"hello").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"hello");
        let names: Vec<_> = fs::read_dir(p.parent().unwrap()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }
}
