use std::fmt;

use hewisard::io::Manifest;

/// `key = value` lines followed by a table whose lines start with `#`, so
/// the whole text still parses as a manifest.
#[derive(Debug, Default)]
pub struct Report {
    pub fields: Manifest,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.fields.set("command", command);
        r
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.set(key, value);
        self
    }

    pub fn columns(&mut self, names: &[&str]) {
        self.header = names.iter().map(|s| s.to_string()).collect();
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fields)?;
        if self.header.is_empty() {
            return Ok(());
        }
        let mut widths: Vec<usize> = self.header.iter().map(String::len).collect();
        for row in &self.rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let line = |f: &mut fmt::Formatter<'_>, cells: &[String]| -> fmt::Result {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            writeln!(f, "# {}", padded.join("  "))
        };
        line(f, &self.header)?;
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        writeln!(f, "# {}", rule.join("  "))?;
        for row in &self.rows {
            line(f, row)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendered_report_parses_back() {
        let mut r = Report::new("oracle");
        r.set("accuracy", "91.70");
        r.columns(&["seed", "accuracy"]);
        r.row(vec!["0".into(), "91.70".into()]);
        let m = Manifest::parse(&r.to_string()).unwrap();
        assert_eq!(m.get("accuracy"), Some("91.70"));
        assert_eq!(m.entries.len(), 2);
        assert!(r.to_string().contains("#    0     91.70"));
    }
}
