use serde::{Deserialize, Serialize};

/// One named check: a residual compared against a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Ordered collection of checks. `overall` is the conjunction of the entry passes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub entries: Vec<Entry>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport {
            entries: Vec::new(),
            overall: true,
        }
    }

    /// Records `residual <= tolerance`; a NaN residual fails.
    pub fn check(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> bool {
        let pass = residual <= tolerance;
        self.push(Entry {
            name: name.into(),
            residual,
            tolerance,
            pass,
        });
        pass
    }

    /// Records a boolean property as residual 0 (holds) or 1 (fails) at tolerance 0.
    pub fn check_true(&mut self, name: impl Into<String>, holds: bool) -> bool {
        self.check(name, if holds { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn push(&mut self, entry: Entry) {
        self.overall &= entry.pass;
        self.entries.push(entry);
    }

    /// Appends another report's entries, prefixing their names.
    pub fn extend_prefixed(&mut self, prefix: &str, other: VerificationReport) {
        for mut e in other.entries {
            if !prefix.is_empty() {
                e.name = format!("{prefix}{}", e.name);
            }
            self.push(e);
        }
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Largest residual among entries whose name starts with `prefix`.
    pub fn max_residual(&self, prefix: &str) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.name.starts_with(prefix))
            .map(|e| e.residual)
            .fold(
                0.0,
                |a: f64, r| if r.is_nan() { f64::NAN } else { a.max(r) },
            )
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}
