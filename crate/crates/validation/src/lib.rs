//! Runner for the acceptance criteria: each criterion prints one
//! `PASS`/`FAIL` line followed by indented diagnostics.

use std::time::{Duration, Instant};

/// Outcome of one criterion before the runtime limit is applied.
#[derive(Clone, Debug, Default)]
pub struct Verdict {
    pub pass: bool,
    pub summary: String,
    pub details: Vec<String>,
}

impl Verdict {
    pub fn new(pass: bool, summary: impl Into<String>) -> Self {
        Verdict { pass, summary: summary.into(), details: Vec::new() }
    }

    pub fn detail(mut self, line: impl Into<String>) -> Self {
        self.details.push(line.into());
        self
    }
}

pub struct Criterion {
    pub number: usize,
    pub title: &'static str,
    pub limit: Duration,
    pub run: fn() -> Verdict,
}

/// `value <= bound` rendered as `7.1e-9 <= 1e-8`.
pub fn within(value: f64, bound: f64) -> (bool, String) {
    let ok = value <= bound;
    (ok, format!("{value:.2e} {} {bound:.0e}", if ok { "<=" } else { ">" }))
}

/// Runs the criteria in order; returns the number that failed.
pub fn run_all(criteria: &[Criterion]) -> usize {
    let mut failed = 0;
    for c in criteria {
        let start = Instant::now();
        let v = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let pass = v.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{}] {}: {} ({:.1} s, limit {} s{})",
            if pass { "PASS" } else { "FAIL" },
            c.number,
            c.title,
            v.summary,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            if in_time { "" } else { ", over the limit" }
        );
        for d in &v.details {
            println!("    {d}");
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    failed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_rendering() {
        assert_eq!(within(1e-9, 1e-8), (true, "1.00e-9 <= 1e-8".to_string()));
        assert!(!within(2.0, 1.0).0);
    }
}
