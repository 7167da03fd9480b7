// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::Path;

use anyhow::Context;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV text with the versioned schema comment line.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(schema: &str, columns: &[&str]) -> Self {
        let mut text = format!("# hetero-oracle v{VERSION} schema={schema}\n");
        text.push_str(&columns.join(","));
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        let escaped: Vec<String> = fields.iter().map(|f| escape(f)).collect();
        self.text.push_str(&escaped.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("temp file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    let target = dir.join(name);
    tmp.persist(&target)
        .with_context(|| format!("renaming into {}", target.display()))?;
    Ok(())
}

/// File-name-safe form of a scenario name.
pub fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_header_and_escaping() {
        let mut c = Csv::new("demo", &["a", "b"]);
        c.row(&["x,y".into(), "1".into()]);
        assert_eq!(
            c.into_string(),
            format!("# hetero-oracle v{VERSION} schema=demo\na,b\n\"x,y\",1\n")
        );
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "f.txt", "one").unwrap();
        write_atomic(dir.path(), "f.txt", "two").unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("f.txt")).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
