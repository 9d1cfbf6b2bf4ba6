//! Check reports: human-readable lines and a machine-readable JSON form.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub check: String,
    pub status: String,
    pub residual: Vec<String>,
    pub params: serde_json::Value,
    pub ms: u64,
}

pub const PASS: &str = "pass";
pub const FAIL: &str = "fail";
/// Reserved for cataloged paper-vs-oracle conflicts; never for
/// implementation residuals.
pub const LOGGED: &str = "logged-discrepancy";

impl Report {
    pub fn pass(check: &str) -> Self {
        Report {
            check: check.into(),
            status: PASS.into(),
            residual: vec![],
            params: serde_json::json!({}),
            ms: 0,
        }
    }

    pub fn fail(check: &str, residual: Vec<String>) -> Self {
        assert!(!residual.is_empty(), "a fail must carry a residual");
        Report {
            check: check.into(),
            status: FAIL.into(),
            residual,
            params: serde_json::json!({}),
            ms: 0,
        }
    }

    pub fn logged(check: &str, notes: Vec<String>) -> Self {
        Report {
            check: check.into(),
            status: LOGGED.into(),
            residual: notes,
            params: serde_json::json!({}),
            ms: 0,
        }
    }

    pub fn with_params(mut self, params: serde_json::Value) -> Self {
        self.params = params;
        self
    }

    pub fn is_ok(&self) -> bool {
        self.status == PASS || self.status == LOGGED
    }

    pub fn text_line(&self) -> String {
        let mark = match self.status.as_str() {
            "pass" => "ok",
            "logged-discrepancy" => "logged",
            _ => "FAIL",
        };
        let mut line = format!("[{:>6}] {} ({} ms)", mark, self.check, self.ms);
        for r in &self.residual {
            line.push_str(&format!("\n         | {}", r));
        }
        line
    }
}

/// Run a closure, recording elapsed milliseconds.
pub fn timed(check: &str, f: impl FnOnce() -> Result<Report, String>) -> Report {
    let start = std::time::Instant::now();
    let mut rep = match f() {
        Ok(r) => r,
        Err(msg) => Report::fail(check, vec![msg]),
    };
    rep.ms = start.elapsed().as_millis() as u64;
    rep
}
