//! Results, summary, timing and plot-data files.
//!
//! `results.tsv` starts with a schema line and holds one row per computed
//! quantity:
//!
//! ```text
//! # collarbound-results v1
//! step	quantity	value	error	bound	verdict	seed	note
//! ```
//!
//! Empty `bound`/`verdict` cells mean the row is an estimate rather than a
//! claim. Floats are written in shortest round-trip form, so a rerun with the
//! same seed reproduces the file byte for byte. Wall-clock times go to
//! `timings.tsv` instead.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use collarbound::compare::{ComparisonReport, Verdict};

use crate::error::{CliError, CliResult};

pub const RESULTS_SCHEMA: &str = "# collarbound-results v1";
pub const COLUMNS: [&str; 8] = ["step", "quantity", "value", "error", "bound", "verdict", "seed", "note"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub step: String,
    pub quantity: String,
    pub value: f64,
    pub error: f64,
    pub bound: Option<f64>,
    pub verdict: Option<Verdict>,
    pub seed: u64,
    pub note: String,
}

impl Row {
    pub fn estimate(step: &str, quantity: impl Into<String>, value: f64, error: f64, seed: u64) -> Self {
        Self {
            step: step.to_string(),
            quantity: quantity.into(),
            value,
            error,
            bound: None,
            verdict: None,
            seed,
            note: String::new(),
        }
    }

    pub fn from_report(step: &str, report: &ComparisonReport, seed: u64) -> Self {
        let mut quantity = report.claim.name().to_string();
        if !report.params.is_empty() {
            let params: Vec<String> = report.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            quantity = format!("{quantity}[{}]", params.join(","));
        }
        let note = format!("slack={}", report.slack());
        Self {
            step: step.to_string(),
            quantity,
            value: report.measured,
            error: report.measured_error,
            bound: Some(report.bound),
            verdict: Some(report.verdict),
            seed,
            note,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    fn to_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.step,
            self.quantity,
            self.value,
            self.error,
            opt(self.bound),
            self.verdict.map(Verdict::name).unwrap_or(""),
            self.seed,
            self.note
        )
    }
}

/// Plot-ready series kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    AreaProfile,
    PackingTrend,
    ContractionRatios,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [Self::AreaProfile, Self::PackingTrend, Self::ContractionRatios];

    pub fn name(self) -> &'static str {
        match self {
            Self::AreaProfile => "area_profile",
            Self::PackingTrend => "packing_trend",
            Self::ContractionRatios => "contraction_ratios",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// A column-oriented table produced by a step.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub kind: String,
    pub step: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(kind: &str, step: &str, columns: &[&str]) -> Self {
        Self {
            kind: kind.to_string(),
            step: step.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn render(&self) -> String {
        let mut s = format!("# {} from step {}\n{}\n", self.kind, self.step, self.columns.join("\t"));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", cells.join("\t"));
        }
        s
    }
}

/// Everything one step produced.
#[derive(Debug, Clone, Default)]
pub struct StepRecord {
    pub name: String,
    pub seed: u64,
    pub runtime: f64,
    pub rows: Vec<Row>,
    pub series: Vec<Series>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct RunResults {
    pub scenario: String,
    pub seed: u64,
    pub space: String,
    pub audit: Vec<String>,
    pub steps: Vec<StepRecord>,
}

/// Verdict tallies over all claim rows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub pass: usize,
    pub pass_at_equality: usize,
    pub fail: usize,
    pub control: usize,
    pub step_errors: usize,
}

impl RunResults {
    pub fn rows(&self) -> impl Iterator<Item = &Row> {
        self.steps.iter().flat_map(|s| s.rows.iter())
    }

    pub fn tally(&self) -> Tally {
        let mut t = Tally::default();
        for v in self.rows().filter_map(|r| r.verdict) {
            match v {
                Verdict::Pass => t.pass += 1,
                Verdict::PassAtEquality => t.pass_at_equality += 1,
                Verdict::Fail => t.fail += 1,
                Verdict::HypothesisViolatedControl => t.control += 1,
            }
        }
        t.step_errors = self.steps.iter().filter(|s| s.error.is_some()).count();
        t
    }

    /// Nonzero when a non-control claim failed or a step errored.
    pub fn exit_code(&self) -> i32 {
        let t = self.tally();
        if t.fail > 0 || t.step_errors > 0 {
            1
        } else {
            0
        }
    }

    pub fn render_results(&self) -> String {
        let mut s = format!("{RESULTS_SCHEMA}\n{}\n", COLUMNS.join("\t"));
        for r in self.rows() {
            s.push_str(&r.to_line());
            s.push('\n');
        }
        s
    }

    pub fn render_summary(&self) -> String {
        let t = self.tally();
        let mut s = format!("scenario {} (seed {})\n", self.scenario, self.seed);
        for line in &self.audit {
            let _ = writeln!(s, "{line}");
        }
        s.push('\n');
        let _ = writeln!(s, "{:<40} {:>14} {:>14} {:>12}  verdict", "claim", "measured", "bound", "error");
        for r in self.rows().filter(|r| r.verdict.is_some()) {
            let _ = writeln!(
                s,
                "{:<40} {:>14.8} {:>14.8} {:>12.3e}  {}",
                r.quantity,
                r.value,
                r.bound.unwrap_or(f64::NAN),
                r.error,
                r.verdict.map(Verdict::name).unwrap_or("")
            );
        }
        for st in self.steps.iter().filter(|s| s.error.is_some()) {
            let _ = writeln!(s, "step {} failed: {}", st.name, st.error.as_deref().unwrap_or(""));
        }
        let _ = writeln!(
            s,
            "\npass {} | pass-at-equality {} | fail {} | control {} | step errors {}",
            t.pass, t.pass_at_equality, t.fail, t.control, t.step_errors
        );
        s
    }

    pub fn render_timings(&self) -> String {
        let mut s = String::from("step\tseconds\n");
        for st in &self.steps {
            let _ = writeln!(s, "{}\t{:.3}", st.name, st.runtime);
        }
        s
    }

    /// Writes `results.tsv`, `summary.txt`, `timings.tsv` and every plot
    /// series present.
    pub fn write_all(&self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut written = Vec::new();
        for (name, body) in [
            ("results.tsv", self.render_results()),
            ("summary.txt", self.render_summary()),
            ("timings.tsv", self.render_timings()),
        ] {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| CliError::io(&p, e))?;
            written.push(p);
        }
        for kind in PlotKind::ALL {
            if self.series(kind.name()).next().is_some() {
                written.push(emit_plot_data(self, kind, dir)?);
            }
        }
        for s in self.steps.iter().flat_map(|s| &s.series) {
            if PlotKind::parse(&s.kind).is_none() {
                let p = dir.join(format!("{}__{}.tsv", s.kind, s.step));
                fs::write(&p, s.render()).map_err(|e| CliError::io(&p, e))?;
                written.push(p);
            }
        }
        Ok(written)
    }

    fn series<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Series> + 'a {
        self.steps.iter().flat_map(|s| &s.series).filter(move |s| s.kind == kind)
    }
}

/// Writes every series of `kind` into `dir/<kind>.tsv`, one block per step.
pub fn emit_plot_data(results: &RunResults, kind: PlotKind, dir: &Path) -> CliResult<PathBuf> {
    let blocks: Vec<String> = results.series(kind.name()).map(Series::render).collect();
    if blocks.is_empty() {
        return Err(CliError::MissingSeries(kind.name().to_string()));
    }
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let p = dir.join(format!("{}.tsv", kind.name()));
    fs::write(&p, blocks.join("\n")).map_err(|e| CliError::io(&p, e))?;
    Ok(p)
}
