//! Three-way check results shared by every law checker.

use std::fmt;

/// A labelled piece of evidence: the short label names the law and the
/// offending (or covered) instance, the lines carry details such as traces.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Witness {
    pub label: String,
    pub lines: Vec<String>,
}

impl Witness {
    pub fn new(label: impl Into<String>) -> Self {
        Witness {
            label: label.into(),
            lines: Vec::new(),
        }
    }

    pub fn with_line(mut self, line: impl Into<String>) -> Self {
        self.lines.push(line.into());
        self
    }

    pub fn with_lines<I: IntoIterator<Item = String>>(mut self, lines: I) -> Self {
        self.lines.extend(lines);
        self
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)?;
        for l in &self.lines {
            write!(f, "\n  {l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Verified(Witness),
    Counterexample(Witness),
    /// Some instance could not be decided within the configured budgets.
    Inconclusive(Witness),
}

impl CheckResult {
    pub fn verified(label: impl Into<String>) -> Self {
        CheckResult::Verified(Witness::new(label))
    }

    pub fn counterexample(label: impl Into<String>) -> Self {
        CheckResult::Counterexample(Witness::new(label))
    }

    pub fn inconclusive(label: impl Into<String>) -> Self {
        CheckResult::Inconclusive(Witness::new(label))
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, CheckResult::Verified(_))
    }

    pub fn is_counterexample(&self) -> bool {
        matches!(self, CheckResult::Counterexample(_))
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, CheckResult::Inconclusive(_))
    }

    pub fn witness(&self) -> &Witness {
        match self {
            CheckResult::Verified(w) | CheckResult::Counterexample(w) | CheckResult::Inconclusive(w) => w,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CheckResult::Verified(_) => "verified",
            CheckResult::Counterexample(_) => "counterexample",
            CheckResult::Inconclusive(_) => "inconclusive",
        }
    }

    /// Combines sub-checks: the first counterexample wins, otherwise any
    /// inconclusive part makes the whole inconclusive.
    pub fn all<I: IntoIterator<Item = CheckResult>>(label: impl Into<String>, parts: I) -> CheckResult {
        let mut pending: Option<CheckResult> = None;
        let mut lines = Vec::new();
        for p in parts {
            match p {
                CheckResult::Counterexample(_) => return p,
                CheckResult::Inconclusive(_) => {
                    pending.get_or_insert(p);
                }
                CheckResult::Verified(w) => lines.push(w.label),
            }
        }
        pending.unwrap_or_else(|| CheckResult::Verified(Witness::new(label).with_lines(lines)))
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.witness())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_precedence() {
        let v = CheckResult::verified("a");
        let i = CheckResult::inconclusive("b");
        let c = CheckResult::counterexample("c");
        assert!(CheckResult::all("x", [v.clone(), v.clone()]).is_verified());
        assert_eq!(CheckResult::all("x", [v.clone(), i.clone(), c.clone()]), c);
        assert_eq!(CheckResult::all("x", [i.clone(), v]), i);
    }

    #[test]
    fn display() {
        let r = CheckResult::Counterexample(Witness::new("law").with_line("detail"));
        assert_eq!(r.to_string(), "counterexample: law\n  detail");
    }
}
