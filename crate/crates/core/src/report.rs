//! Report values produced by every validation and law check.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    pub counterexamples: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            ..Default::default()
        }
    }

    fn entry(&mut self, name: &str) -> &mut CheckResult {
        if let Some(pos) = self.checks.iter().position(|c| c.name == name) {
            return &mut self.checks[pos];
        }
        self.checks.push(CheckResult {
            name: name.to_string(),
            ..Default::default()
        });
        self.checks.last_mut().unwrap()
    }

    /// Records one sample of check `name`; `detail` is evaluated only on failure.
    pub fn record(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> String) -> bool {
        let e = self.entry(name);
        e.samples += 1;
        if !ok {
            e.failures += 1;
            if e.counterexamples.len() < MAX_COUNTEREXAMPLES {
                e.counterexamples.push(detail());
            }
        }
        ok
    }

    pub fn pass(&mut self, name: &str) {
        self.record(name, true, String::new);
    }

    pub fn fail(&mut self, name: &str, detail: impl Into<String>) {
        let d = detail.into();
        self.record(name, false, || d);
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    /// Appends all checks of `other` under `prefix.`.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for c in other.checks {
            let name = if prefix.is_empty() {
                c.name.clone()
            } else {
                format!("{prefix}.{}", c.name)
            };
            let e = self.entry(&name);
            e.samples += c.samples;
            e.failures += c.failures;
            for x in c.counterexamples {
                if e.counterexamples.len() < MAX_COUNTEREXAMPLES {
                    e.counterexamples.push(x);
                }
            }
        }
        self.warnings.extend(other.warnings);
    }

    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn is_ok_strict(&self) -> bool {
        self.is_ok() && self.warnings.is_empty()
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn has_failure(&self, name: &str) -> bool {
        self.failing().any(|c| c.name == name || c.name.ends_with(&format!(".{name}")))
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "report: {}", self.title);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "check {} ... {} ({}/{})",
                c.name,
                if c.passed() { "PASS" } else { "FAIL" },
                c.samples - c.failures,
                c.samples
            );
            for x in &c.counterexamples {
                let _ = writeln!(s, "  counterexample: {x}");
            }
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        let _ = writeln!(s, "verdict: {}", if self.is_ok() { "pass" } else { "fail" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_caps() {
        let mut r = Report::new("t");
        for k in 0..10 {
            r.record("a", k % 2 == 0, || format!("k={k}"));
        }
        r.pass("b");
        let a = r.check("a").unwrap();
        assert_eq!((a.samples, a.failures, a.counterexamples.len()), (10, 5, 5));
        assert!(!r.is_ok());
        assert!(r.has_failure("a"));
        assert!(!r.has_failure("b"));
        assert!(r.render_text().contains("verdict: fail"));
    }

    #[test]
    fn absorb_prefixes() {
        let mut inner = Report::new("inner");
        inner.fail("x", "boom");
        let mut outer = Report::new("outer");
        outer.absorb("sub", inner);
        assert!(outer.has_failure("x"));
        assert_eq!(outer.checks[0].name, "sub.x");
    }
}
