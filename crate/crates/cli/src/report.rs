//! Report structure shared by every subcommand. The JSON document is
//! the single source of truth; the human-readable text is rendered
//! from it, never computed separately.

use std::collections::BTreeMap;

use geosym_core::expr::ZeroVerdict;
use geosym_core::symmetry::ConstraintReport;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct WitnessJson {
    pub bindings: BTreeMap<String, f64>,
    pub value: f64,
    pub scale: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl Check {
    pub fn from_verdict(name: &str, verdict: &ZeroVerdict) -> Check {
        let mut c = Check {
            name: name.to_string(),
            verdict: verdict_name(verdict).to_string(),
            residuals: Vec::new(),
            witness: None,
            notes: Vec::new(),
            value: None,
        };
        if let ZeroVerdict::NonZero(w) = verdict {
            c.witness = Some(WitnessJson {
                bindings: w.bindings.clone(),
                value: w.value,
                scale: w.scale,
            });
        }
        c
    }

    pub fn from_report(name: &str, report: &ConstraintReport) -> Check {
        let mut c = Check::from_verdict(name, &report.verdict);
        for r in &report.residuals {
            c.residuals
                .push(format!("{} = {}", r.label, r.expr));
        }
        c.notes = report.notes.clone();
        c
    }

    pub fn skipped(name: &str, reason: &str) -> Check {
        Check {
            name: name.to_string(),
            verdict: "skipped".to_string(),
            residuals: Vec::new(),
            witness: None,
            notes: vec![reason.to_string()],
            value: None,
        }
    }

    pub fn numeric(name: &str, value: f64, threshold: f64) -> Check {
        Check {
            name: name.to_string(),
            verdict: if value.abs() < threshold {
                "zero".to_string()
            } else {
                "nonzero".to_string()
            },
            residuals: Vec::new(),
            witness: None,
            notes: vec![format!("threshold {threshold:e}")],
            value: Some(value),
        }
    }
}

pub fn verdict_name(v: &ZeroVerdict) -> &'static str {
    match v {
        ZeroVerdict::Zero => "zero",
        ZeroVerdict::NonZero(_) => "nonzero",
        ZeroVerdict::Inconclusive => "inconclusive",
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub zero: usize,
    pub nonzero: usize,
    pub inconclusive: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub seed: u64,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<BTreeMap<String, serde_json::Value>>,
    pub summary: Summary,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<f64>,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            seed,
            checks: Vec::new(),
            data: None,
            summary: Summary::default(),
            exit_code: 0,
            timings_ms: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn insert_data(&mut self, key: &str, value: serde_json::Value) {
        self.data
            .get_or_insert_with(BTreeMap::new)
            .insert(key.to_string(), value);
    }

    /// Fills the summary and derives the exit code:
    /// 0 = everything zero/pass (skips allowed), 1 = some check
    /// nonzero, 3 = inconclusive present with nothing nonzero.
    pub fn finalize(&mut self) -> i32 {
        let mut s = Summary::default();
        for c in &self.checks {
            match c.verdict.as_str() {
                "zero" => s.zero += 1,
                "nonzero" => s.nonzero += 1,
                "inconclusive" => s.inconclusive += 1,
                _ => s.skipped += 1,
            }
        }
        self.exit_code = if s.nonzero > 0 {
            1
        } else if s.inconclusive > 0 {
            3
        } else {
            0
        };
        self.summary = s;
        self.exit_code
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human rendering of the JSON document.
    pub fn render_text(&self, quiet: bool) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{:<12} {}\n", c.verdict, c.name));
            if quiet {
                continue;
            }
            if let Some(v) = c.value {
                out.push_str(&format!("             value: {v:e}\n"));
            }
            for r in &c.residuals {
                out.push_str(&format!("             residual: {r}\n"));
            }
            if let Some(w) = &c.witness {
                let point: Vec<String> =
                    w.bindings.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                out.push_str(&format!(
                    "             witness: value {} at {}\n",
                    w.value,
                    point.join(", ")
                ));
            }
            for n in &c.notes {
                out.push_str(&format!("             note: {n}\n"));
            }
        }
        if let Some(data) = &self.data {
            if !quiet {
                for (k, v) in data {
                    out.push_str(&format!("{k}: {v}\n"));
                }
            }
        }
        out.push_str(&format!(
            "summary: {} zero, {} nonzero, {} inconclusive, {} skipped (exit {})\n",
            self.summary.zero,
            self.summary.nonzero,
            self.summary.inconclusive,
            self.summary.skipped,
            self.exit_code
        ));
        out
    }
}
