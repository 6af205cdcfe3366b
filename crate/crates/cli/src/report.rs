use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "skipped-budget")]
    SkippedBudget,
}

/// One named assertion inside a suite.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Serialize) -> Self {
        Check { name: name.into(), ok, detail: serde_json::to_value(detail).unwrap_or(Value::Null) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    /// The statement the suite exercises.
    pub lemma: String,
    pub parameters: Value,
    pub status: Status,
    /// First failing check or error, if any.
    pub defect: Option<String>,
    /// Wall time in seconds.
    pub runtime: f64,
    /// Target wall time in seconds.
    pub time_limit: f64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn within_time(&self) -> bool {
        self.runtime < self.time_limit
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        let st = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::SkippedBudget => "SKIP",
        };
        let mut s = format!("{st:4}  {:22} {:7.3}s / {:>3}s  {}", self.suite, self.runtime, self.time_limit, self.lemma);
        if let Some(d) = &self.defect {
            s.push_str(&format!("\n      defect: {d}"));
        }
        s
    }
}
