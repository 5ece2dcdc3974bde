//! Experiment configs, dispatch and reports.
//!
//! A run is described by one [`ExperimentConfig`]; the same config and seed
//! always produce the same report bytes. Wall-clock fields are written as
//! zero unless `timings` is set.

pub mod checks;
pub mod studies;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::gnn::{random_trial_suite, TrialSettings};
use crate::graphon::{
    builtin_graphon, deterministic_graph, random_graph, AdjacencyMatrix, BuiltinGraphon,
    GraphonSpec,
};
use crate::kernels::{plan_params, RegularizerParams, DEFAULT_ALPHA, DEFAULT_BETA};
use crate::quadrature::QuadOptions;
use crate::signal::{random_signal, BandlimitedSignal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Plan,
    Verify,
    SweepSampling,
    WnnEval,
    GnnEval,
    Transfer,
    RandomTrials,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Plan,
        ExperimentKind::Verify,
        ExperimentKind::SweepSampling,
        ExperimentKind::WnnEval,
        ExperimentKind::GnnEval,
        ExperimentKind::Transfer,
        ExperimentKind::RandomTrials,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Plan => "plan",
            ExperimentKind::Verify => "verify",
            ExperimentKind::SweepSampling => "sweep-sampling",
            ExperimentKind::WnnEval => "wnn-eval",
            ExperimentKind::GnnEval => "gnn-eval",
            ExperimentKind::Transfer => "transfer",
            ExperimentKind::RandomTrials => "random-trials",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Deterministic or realized random graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    #[default]
    Det,
    Ran,
}

impl FromStr for GraphMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "det" => Ok(GraphMode::Det),
            "ran" => Ok(GraphMode::Ran),
            _ => Err(Error::Config(format!("mode must be det or ran, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!(
                "format must be csv or json, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let q = QuadOptions::default();
        Tolerances {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_panels: q.max_panels,
        }
    }
}

/// Where the report goes. A path with an extension is a file; anything
/// else is a directory that receives `<kind>.<format>`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

/// One experiment. Lists left as `None` take per-kind defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub graphon: GraphonSpec,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default = "default_m")]
    pub m_frak: usize,
    #[serde(default = "default_channels")]
    pub channels: usize,
    /// Values of `N`.
    #[serde(default)]
    pub half_counts: Option<Vec<usize>>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub c1: Option<f64>,
    #[serde(default)]
    pub c2: Option<f64>,
    /// Graph sizes `n`.
    #[serde(default)]
    pub vertices: Option<Vec<usize>>,
    /// Graph sizes used to fit the `C / n` rate in `transfer`.
    #[serde(default)]
    pub fit_vertices: Option<Vec<usize>>,
    /// Extra adjacency matrix (`.csv` or binary) evaluated by `transfer`.
    #[serde(default)]
    pub adjacency: Option<PathBuf>,
    #[serde(default)]
    pub mode: GraphMode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Evaluation points for `wnn-eval`.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_probability_constant")]
    pub probability_constant: f64,
    /// Acceptance check names for `verify`; empty runs the whole suite.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub timings: bool,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_kappa() -> f64 {
    checks::RING_KAPPA
}
fn default_m() -> usize {
    2
}
fn default_channels() -> usize {
    1
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_beta() -> f64 {
    DEFAULT_BETA
}
fn default_trials() -> usize {
    50
}
fn default_grid() -> usize {
    2048
}
fn default_probability_constant() -> f64 {
    1.0
}

impl ExperimentConfig {
    /// The defaults for `kind`.
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            graphon: GraphonSpec::default(),
            kappa: default_kappa(),
            epsilon: None,
            m_frak: default_m(),
            channels: default_channels(),
            half_counts: None,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            c1: None,
            c2: None,
            vertices: None,
            fit_vertices: None,
            adjacency: None,
            mode: GraphMode::Det,
            seed: 0,
            trials: default_trials(),
            grid: default_grid(),
            probability_constant: default_probability_constant(),
            checks: Vec::new(),
            tolerances: Tolerances::default(),
            timings: false,
            threads: None,
            output: OutputSpec::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn half_counts(&self) -> Vec<usize> {
        self.half_counts.clone().unwrap_or_else(|| match self.kind {
            ExperimentKind::SweepSampling => vec![32, 64, 128],
            ExperimentKind::Transfer => vec![32],
            _ => vec![64],
        })
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.vertices.clone().unwrap_or_else(|| match self.kind {
            ExperimentKind::Transfer => vec![1024, 4096],
            _ => vec![2048],
        })
    }

    pub fn fit_vertices(&self) -> Vec<usize> {
        self.fit_vertices
            .clone()
            .unwrap_or_else(|| vec![512, 1024, 2048])
    }

    pub fn quad_options(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.tolerances.rel_tol,
            abs_tol: self.tolerances.abs_tol,
            max_panels: self.tolerances.max_panels,
        }
    }

    pub fn params(&self, n: usize) -> Result<RegularizerParams> {
        RegularizerParams::with_overrides(self.m_frak, n, self.alpha, self.beta, self.c1, self.c2)
    }

    /// Seeds `seed, seed + 1, ...` for the random trials.
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.trials as u64)
            .map(|i| self.seed.wrapping_add(i))
            .collect()
    }

    /// Rejects inconsistent settings before any work starts.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.channels == 0 {
            return bad("channels must be positive".into());
        }
        if self.half_counts().is_empty() || self.vertices().is_empty() {
            return bad("half_counts and vertices must not be empty".into());
        }
        if self.kind == ExperimentKind::Plan && self.epsilon.is_none() {
            return bad("plan needs epsilon".into());
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return bad(format!("epsilon {e} must lie in (0, 1)"));
            }
        }
        if self.kind != ExperimentKind::Plan && self.kind != ExperimentKind::Verify {
            for n in self.half_counts() {
                self.params(n).map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        if self
            .vertices()
            .iter()
            .chain(&self.fit_vertices())
            .any(|&n| n < 2)
        {
            return bad("graph sizes must be at least 2".into());
        }
        if self.kind == ExperimentKind::Transfer && self.fit_vertices().len() < 2 {
            return bad("transfer needs at least two fit sizes".into());
        }
        if self.kind == ExperimentKind::RandomTrials && self.trials < 10 {
            return bad(format!(
                "random-trials needs at least 10 trials, got {}",
                self.trials
            ));
        }
        if self.kind == ExperimentKind::GnnEval && self.mode == GraphMode::Ran && self.trials == 0 {
            return bad("random mode needs at least one trial".into());
        }
        if self.grid < 2 {
            return bad("grid needs at least 2 points".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        if self.tolerances.rel_tol.is_nan()
            || self.tolerances.rel_tol <= 0.0
            || self.tolerances.max_panels == 0
        {
            return bad("tolerances must be positive".into());
        }
        for name in &self.checks {
            checks::find(name)?;
        }
        builtin_graphon(self.graphon, self.kappa).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

/// Where a number came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Measured,
    BoundFormula,
    FittedConstant,
    Parameter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => sig17(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub name: String,
    pub value: f64,
    pub provenance: Provenance,
}

/// Pass or fail of one invariant, with the number it was judged on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
    pub runtime_ms: Option<f64>,
    pub budget_ms: Option<f64>,
}

impl Verdict {
    pub fn new(
        name: &str,
        passed: bool,
        measured: f64,
        threshold: f64,
        detail: impl Into<String>,
    ) -> Self {
        Verdict {
            name: name.into(),
            passed,
            measured,
            threshold,
            detail: detail.into(),
            runtime_ms: None,
            budget_ms: None,
        }
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let time = match (self.runtime_ms, self.budget_ms) {
            (Some(t), Some(b)) => format!(" [{t:.1} ms / {b} ms]"),
            _ => String::new(),
        };
        format!("{tag} {}: {}{time}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<SummaryEntry>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    fn new(config: &ExperimentConfig, columns: &[(&str, Provenance)]) -> Self {
        ExperimentReport {
            kind: config.kind,
            config: config.clone(),
            columns: columns
                .iter()
                .map(|&(name, provenance)| Column {
                    name: name.into(),
                    provenance,
                })
                .collect(),
            rows: Vec::new(),
            summary: Vec::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn stat(&mut self, name: &str, value: f64, provenance: Provenance) {
        self.summary.push(SummaryEntry {
            name: name.into(),
            value,
            provenance,
        });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }

    /// `0` when every verdict passed, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    /// Writes the report where `output` says. CSV output gets a sibling
    /// `<stem>.report.json` carrying provenance, summary and verdicts.
    /// Returns the paths written.
    pub fn save(&self, output: &OutputSpec) -> Result<Vec<PathBuf>> {
        let Some(path) = &output.path else {
            return Ok(Vec::new());
        };
        let ext = match output.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        };
        let file = if path.extension().is_some() {
            path.clone()
        } else {
            fs::create_dir_all(path)?;
            path.join(format!("{}.{ext}", self.kind))
        };
        if let Some(dir) = file.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut written = vec![file.clone()];
        match output.format {
            OutputFormat::Csv => {
                self.write_csv(fs::File::create(&file)?)?;
                let stem = file
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("report");
                let side = file.with_file_name(format!("{stem}.report.json"));
                self.write_json(fs::File::create(&side)?)?;
                written.push(side);
            }
            OutputFormat::Json => self.write_json(fs::File::create(&file)?)?,
        }
        Ok(written)
    }
}

/// Validates `config` and runs it on its own pool when `threads` is set.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| dispatch(config)),
        None => dispatch(config),
    }
}

/// Whether an error means the request itself was bad (exit code 2).
pub fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::InvalidParams(_)
            | Error::UnknownGraphon(_)
            | Error::Aliasing { .. }
            | Error::Domain { .. }
    )
}

fn dispatch(config: &ExperimentConfig) -> Result<ExperimentReport> {
    match config.kind {
        ExperimentKind::Plan => run_plan(config),
        ExperimentKind::Verify => run_verify(config),
        ExperimentKind::SweepSampling => run_sweep(config),
        ExperimentKind::WnnEval => run_wnn(config),
        ExperimentKind::GnnEval => run_gnn(config),
        ExperimentKind::Transfer => run_transfer(config),
        ExperimentKind::RandomTrials => run_random(config),
    }
}

fn signal(config: &ExperimentConfig) -> Result<BandlimitedSignal> {
    random_signal(config.m_frak, config.channels, config.seed, true)
}

fn graphon(config: &ExperimentConfig, report: &mut ExperimentReport) -> Result<BuiltinGraphon> {
    let g = builtin_graphon(config.graphon, config.kappa)?;
    if let Some(c) = &g.caveat {
        report
            .notes
            .push(format!("graphon {}: {c}", g.graphon.name()));
    }
    Ok(g)
}

fn clock(config: &ExperimentConfig, t: Instant) -> f64 {
    if config.timings {
        t.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    }
}

use Provenance::{BoundFormula, FittedConstant, Measured, Parameter};

fn run_plan(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let eps = config
        .epsilon
        .ok_or_else(|| Error::Config("plan needs epsilon".into()))?;
    let p = plan_params(
        eps,
        config.m_frak,
        config.alpha,
        config.beta,
        config.c1,
        config.c2,
    )?;
    let mut report = ExperimentReport::new(
        config,
        &[
            ("epsilon", Parameter),
            ("m", Parameter),
            ("N", BoundFormula),
            ("weights", BoundFormula),
            ("n_min", BoundFormula),
            ("alpha", Parameter),
            ("beta", Parameter),
            ("r", BoundFormula),
            ("sigma", BoundFormula),
            ("zone_lo", BoundFormula),
            ("zone_hi", BoundFormula),
            ("valid", BoundFormula),
        ],
    );
    report.push(vec![
        eps.into(),
        p.m_frak.into(),
        p.n.into(),
        p.weights.into(),
        p.n_min.into(),
        p.alpha.into(),
        p.beta.into(),
        p.r.into(),
        p.sigma.into(),
        p.zone.0.into(),
        p.zone.1.into(),
        p.valid.into(),
    ]);
    report.notes.extend(p.issues.iter().cloned());
    Ok(report)
}

fn run_verify(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        config,
        &[
            ("check", Parameter),
            ("passed", Measured),
            ("measured", Measured),
            ("threshold", Parameter),
            ("runtime_ms", Measured),
            ("budget_ms", Parameter),
            ("detail", Measured),
        ],
    );
    let verdicts = if config.checks.is_empty() {
        checks::verify_suite()
    } else {
        config
            .checks
            .iter()
            .map(|n| checks::find(n).map(|f| f()))
            .collect::<Result<Vec<_>>>()?
    };
    for mut v in verdicts {
        if !config.timings {
            v.runtime_ms = None;
            // the detail line of an over-budget check quotes the time
            if let Some(i) = v.detail.find("; over budget") {
                v.detail.truncate(i);
                v.detail.push_str("; over budget");
            }
        }
        report.push(vec![
            v.name.as_str().into(),
            v.passed.into(),
            v.measured.into(),
            v.threshold.into(),
            v.runtime_ms.unwrap_or(0.0).into(),
            v.budget_ms.unwrap_or(0.0).into(),
            v.detail.as_str().into(),
        ]);
        report.verdicts.push(v);
    }
    Ok(report)
}

fn run_sweep(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let f = signal(config)?;
    let params = config
        .half_counts()
        .into_iter()
        .map(|n| config.params(n))
        .collect::<Result<Vec<_>>>()?;
    let rows = studies::sampling_sweep(&f, &params, &config.quad_options())?;
    let mut report = ExperimentReport::new(
        config,
        &[
            ("N", Parameter),
            ("r", Parameter),
            ("sigma", Parameter),
            ("measured_l2", Measured),
            ("exact_identity_l2", BoundFormula),
            ("tilde_E", BoundFormula),
            ("ratio", Measured),
        ],
    );
    for r in &rows {
        report.push(vec![
            r.n.into(),
            r.r.into(),
            r.sigma.into(),
            r.measured_l2.into(),
            r.exact_identity_l2.into(),
            r.tilde_e.into(),
            r.ratio.into(),
        ]);
    }
    let measured: Vec<f64> = rows.iter().map(|r| r.measured_l2).collect();
    let tilde: Vec<f64> = rows.iter().map(|r| r.tilde_e).collect();
    let gap = rows
        .iter()
        .map(|r| (r.measured_l2 - r.exact_identity_l2).abs() / r.exact_identity_l2)
        .fold(0.0, f64::max);
    report.stat("max_identity_gap", gap, Measured);
    report.verdicts.push(Verdict::new(
        "identity_agreement",
        gap < 1e-5,
        gap,
        1e-5,
        format!("largest relative gap to the spectral identity {gap:.3e}"),
    ));
    let decreasing = studies::strictly_decreasing(&measured);
    report.verdicts.push(Verdict::new(
        "measured_decreasing",
        decreasing,
        if decreasing { 1.0 } else { 0.0 },
        1.0,
        "measured_l2 strictly decreasing in N",
    ));
    if rows.len() >= 2 {
        let c = studies::fit_log_constant(&tilde, &measured)?;
        let (slope, _) = studies::fit_log_line(&tilde, &measured)?;
        report.stat("fitted_constant", c, FittedConstant);
        report.stat("fitted_log_slope", slope, FittedConstant);
        report.verdicts.push(Verdict::new(
            "fitted_constant_range",
            (1e-2..=1e2).contains(&c),
            c,
            1e2,
            format!("measured ~ C tilde_E with C = {c:.3e}; need [1e-2, 1e2]"),
        ));
    }
    Ok(report)
}

fn run_wnn(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let f = signal(config)?;
    let mut report = ExperimentReport::new(
        config,
        &[
            ("N", Parameter),
            ("x", Parameter),
            ("abs_psi_minus_f", Measured),
            ("in_zone", Parameter),
        ],
    );
    let g = graphon(config, &mut report)?;
    let xs: Vec<f64> = (0..config.grid)
        .map(|i| (i as f64 + 0.5) / config.grid as f64)
        .collect();
    let mut zone_errors = Vec::new();
    for n in config.half_counts() {
        let model = studies::wnn_model(&g.graphon, g.certificate, config.params(n)?, &f)?;
        let values = model.forward_many(&xs)?;
        let mut sup: f64 = 0.0;
        for (&x, (psi, zone)) in xs.iter().zip(&values) {
            let d = studies::max_abs_diff(psi, &f.evaluate(x)?);
            if *zone {
                sup = sup.max(d);
            }
            report.push(vec![n.into(), x.into(), d.into(), (*zone).into()]);
        }
        let e = model.zone_error(&f, &config.quad_options())?;
        report.stat(&format!("zone_sup_N{n}"), sup, Measured);
        report.stat(&format!("zone_l2_N{n}"), e, Measured);
        zone_errors.push(e);
    }
    if zone_errors.len() >= 2 {
        let ok = studies::strictly_decreasing(&zone_errors);
        let worst = zone_errors
            .windows(2)
            .map(|e| e[1] / e[0])
            .fold(0.0, f64::max);
        report.verdicts.push(Verdict::new(
            "zone_error_decreasing",
            ok,
            worst,
            1.0,
            format!("largest successive ratio {worst:.4}"),
        ));
    }
    Ok(report)
}

const GNN_COLUMNS: [(&str, Provenance); 7] = [
    ("mode", Parameter),
    ("N", Parameter),
    ("n", Parameter),
    ("seed", Parameter),
    ("l2_err_zone", Measured),
    ("l2_err_vs_wnn", Measured),
    ("runtime_ms", Measured),
];

fn run_gnn(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let f = signal(config)?;
    let opts = config.quad_options();
    let mut report = ExperimentReport::new(config, &GNN_COLUMNS);
    let g = graphon(config, &mut report)?;
    for big_n in config.half_counts() {
        let p = config.params(big_n)?;
        let table = studies::zone_table(&studies::wnn_model(&g.graphon, g.certificate, p, &f)?)?;
        for n in config.vertices() {
            let t = Instant::now();
            let det = studies::deterministic_gnn(&g.graphon, p, &f, n)?;
            let e = studies::gnn_errors(&det, &f, &table, &opts)?;
            let det_ms = clock(config, t);
            if config.mode == GraphMode::Det {
                report.push(vec![
                    "det".into(),
                    big_n.into(),
                    n.into(),
                    "".into(),
                    e.l2_err_zone.into(),
                    e.l2_err_vs_wnn.into(),
                    det_ms.into(),
                ]);
                continue;
            }
            let runs = config
                .seeds()
                .par_iter()
                .map(|&seed| {
                    let t = Instant::now();
                    let model = det.transfer(Arc::new(random_graph(&g.graphon, n, seed)?))?;
                    let e = studies::gnn_errors(&model, &f, &table, &opts)?;
                    Ok((seed, e, clock(config, t)))
                })
                .collect::<Result<Vec<_>>>()?;
            let mean = runs.iter().map(|r| r.1.l2_err_zone).sum::<f64>() / runs.len() as f64;
            for (seed, e, ms) in runs {
                report.push(vec![
                    "ran".into(),
                    big_n.into(),
                    n.into(),
                    seed.into(),
                    e.l2_err_zone.into(),
                    e.l2_err_vs_wnn.into(),
                    ms.into(),
                ]);
            }
            report.stat(
                &format!("det_l2_err_zone_N{big_n}_n{n}"),
                e.l2_err_zone,
                Measured,
            );
            report.stat(&format!("mean_l2_err_zone_N{big_n}_n{n}"), mean, Measured);
        }
    }
    Ok(report)
}

fn run_transfer(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let f = signal(config)?;
    let mut report = ExperimentReport::new(
        config,
        &[
            ("N", Parameter),
            ("n", Parameter),
            ("source", Parameter),
            ("l2_err_zone", Measured),
            ("l2_err_vs_wnn", Measured),
            ("bound", BoundFormula),
            ("within_bound", Measured),
        ],
    );
    let g = graphon(config, &mut report)?;
    let mut targets = Vec::new();
    let mut sources = Vec::new();
    for n in config.vertices() {
        targets.push(Arc::new(deterministic_graph(&g.graphon, n)?));
        sources.push("deterministic".to_string());
    }
    if let Some(path) = &config.adjacency {
        targets.push(Arc::new(AdjacencyMatrix::load(path)?));
        sources.push(path.display().to_string());
    }
    for big_n in config.half_counts() {
        let p = config.params(big_n)?;
        let s = studies::transfer_study(
            &g.graphon,
            g.certificate,
            p,
            &f,
            &config.fit_vertices(),
            &targets,
            &config.quad_options(),
        )?;
        for (row, src) in s.rows.iter().zip(&sources) {
            report.push(vec![
                big_n.into(),
                row.errors.n.into(),
                src.as_str().into(),
                row.errors.l2_err_zone.into(),
                row.errors.l2_err_vs_wnn.into(),
                row.bound.into(),
                (row.errors.l2_err_zone <= row.bound).into(),
            ]);
        }
        report.stat(
            &format!("fitted_constant_N{big_n}"),
            s.fitted_constant,
            FittedConstant,
        );
        report.stat(&format!("wnn_zone_error_N{big_n}"), s.wnn_error, Measured);
        for e in &s.fit {
            report.stat(
                &format!("fit_err_vs_wnn_N{big_n}_n{}", e.n),
                e.l2_err_vs_wnn,
                Measured,
            );
        }
        let first = s.rows[0].errors.l2_err_zone;
        let worst = s
            .rows
            .iter()
            .map(|r| r.errors.l2_err_zone / first)
            .fold(0.0, f64::max);
        report.verdicts.push(Verdict::new(
            &format!("transfer_ratio_N{big_n}"),
            worst <= 1.5,
            worst,
            1.5,
            "largest error relative to the first target",
        ));
        let below = s.rows.iter().all(|r| r.errors.l2_err_zone <= r.bound);
        report.verdicts.push(Verdict::new(
            &format!("below_fitted_bound_N{big_n}"),
            below,
            s.rows
                .iter()
                .map(|r| r.errors.l2_err_zone / r.bound)
                .fold(0.0, f64::max),
            1.0,
            format!(
                "error over C/n + ||Psi_f - f|| with C = {:.4e}",
                s.fitted_constant
            ),
        ));
    }
    Ok(report)
}

fn run_random(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let f = signal(config)?;
    let mut report = ExperimentReport::new(
        config,
        &[
            ("N", Parameter),
            ("n", Parameter),
            ("seed", Parameter),
            ("l2_err_zone", Measured),
            ("runtime_ms", Measured),
        ],
    );
    let g = graphon(config, &mut report)?;
    let eta = match g.certificate {
        Some(c) => c.eta,
        None => {
            report
                .notes
                .push("no regularity certificate; probability expression uses eta = NaN".into());
            f64::NAN
        }
    };
    for big_n in config.half_counts() {
        let p = config.params(big_n)?;
        for n in config.vertices() {
            let settings = TrialSettings {
                n,
                seeds: config.seeds(),
                eta,
                probability_constant: config.probability_constant,
                opts: config.quad_options(),
            };
            let s = random_trial_suite(
                &g.graphon,
                &p,
                &f.sample_uniform(big_n),
                |x, o| f.eval_into(x, o),
                &settings,
            )?;
            for t in &s.trials {
                let ms = if config.timings { t.runtime_ms } else { 0.0 };
                report.push(vec![
                    big_n.into(),
                    n.into(),
                    t.seed.into(),
                    t.l2_err_zone.into(),
                    ms.into(),
                ]);
            }
            let tag = format!("N{big_n}_n{n}");
            report.stat(
                &format!("deterministic_error_{tag}"),
                s.deterministic_error,
                Measured,
            );
            report.stat(&format!("mean_error_{tag}"), s.mean_error, Measured);
            report.stat(&format!("max_error_{tag}"), s.max_error, Measured);
            report.stat(&format!("std_error_{tag}"), s.std_error, Measured);
            report.stat(&format!("within_factor_{tag}"), s.within_factor, Measured);
            report.stat(
                &format!("mean_relative_difference_{tag}"),
                s.mean_relative_difference,
                Measured,
            );
            report.stat(
                &format!("probability_bound_{tag}"),
                s.probability_bound,
                BoundFormula,
            );
            report.stat(
                &format!("probability_constant_{tag}"),
                s.probability_constant,
                Parameter,
            );
            report.verdicts.push(Verdict::new(
                &format!("seed_mean_{tag}"),
                s.mean_relative_difference < 5e-2,
                s.mean_relative_difference,
                5e-2,
                "relative L2 gap between the seed-mean and the deterministic output",
            ));
            report.verdicts.push(Verdict::new(
                &format!("within_factor_{tag}"),
                s.within_factor >= 0.9,
                s.within_factor,
                0.9,
                "share of seeds with error at most 1.5x the deterministic one",
            ));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(
            ExperimentConfig::from_json(r#"{"kind": "plan", "epsilon": 0.1, "bogus": 1}"#).is_err()
        );
        let c = ExperimentConfig::from_json(r#"{"kind": "plan", "epsilon": 0.1, "m_frak": 1}"#)
            .unwrap();
        assert_eq!(c.kind, ExperimentKind::Plan);
        assert_eq!(c.graphon, GraphonSpec::Ring);
    }

    #[test]
    fn config_round_trips() {
        let mut c = ExperimentConfig::new(ExperimentKind::Transfer);
        c.graphon = GraphonSpec::Tent { eta0: 0.5 };
        c.vertices = Some(vec![64, 128]);
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn kinds_parse() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("sweep".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn plan_report() {
        let mut c = ExperimentConfig::new(ExperimentKind::Plan);
        c.epsilon = Some(0.1);
        c.m_frak = 1;
        let r = run(&c).unwrap();
        assert_eq!(r.column("N").unwrap()[0], &Cell::Int(13));
        assert_eq!(r.column("n_min").unwrap()[0], &Cell::Int(21545));
        assert_eq!(r.column("valid").unwrap()[0], &Cell::Bool(false));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn plan_without_epsilon_is_usage_error() {
        let e = run(&ExperimentConfig::new(ExperimentKind::Plan)).unwrap_err();
        assert!(is_usage_error(&e));
    }
}
