use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|computed - expected| <= tolerance`
    Abs,
    /// `|computed - expected| <= tolerance * |expected|`
    Rel,
    /// `computed <= expected + tolerance`, for inequalities.
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, expected: f64, computed: f64, tolerance: f64, comparison: Comparison) -> Self {
        let diff = computed - expected;
        let pass = match comparison {
            Comparison::Abs => diff.abs() <= tolerance,
            Comparison::Rel => diff.abs() <= tolerance * expected.abs(),
            Comparison::AtMost => diff <= tolerance,
        };
        Self {
            name: name.to_string(),
            expected,
            computed,
            tolerance,
            comparison,
            pass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub n_t: usize,
    pub n_c: usize,
    pub n_r: usize,
    #[serde(rename = "L")]
    pub degree: usize,
    pub seed: u64,
}

/// Everything that varies between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Seconds since the Unix epoch at the start of the run.
    pub timestamp: u64,
    /// Wall time of each check in seconds, in check order.
    pub wall_time_s: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite_name: String,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub timing: Timing,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
