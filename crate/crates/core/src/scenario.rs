//! Scenario files, parameter sweeps and report emission.
//!
//! Scenarios are JSON documents whose fields mirror the engine scenario;
//! unknown keys are rejected by name so a typo cannot silently fall back to
//! a default. A sweep takes a base scenario and a list of parameter axes,
//! runs the cartesian grid (later axes vary fastest), and writes one row
//! per grid point as CSV and JSON lines. Rows compute concurrently but are
//! emitted in grid order, so the artifacts are byte-identical for any
//! parallelism setting. A row whose cycle fails carries the error message
//! in place of its metrics; the sweep itself never aborts on one.
//!
//! CSV numerics are written with 17 significant digits so values survive a
//! round trip exactly; nonfinite values are spelled `inf`, `-inf` or `nan`,
//! and undefined optional quantities (such as the efficiency of a cycle
//! without heat input) are empty cells. The JSON lines carry every CSV
//! column and the per-outcome vectors on top.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::engine::{
    assumptions_report, fidelity_and_exchange, run_cycle, second_law_slack, theorem2_gap,
    theorem3_gap, theorem4_and_tradeoff, ApparatusKind, AssumptionsReport, CodeKind, CycleLedger,
    EngineInput, EngineScenario, NoiseStrength, TradeoffReport,
};
use crate::error::{Error, Result};
use crate::space::CompositeSpace;
use crate::state::DensityMatrix;
use crate::{C64, CMatrix, Real};

const FRAC_1_SQRT_2: Real = std::f64::consts::FRAC_1_SQRT_2;

/// Engine input as it appears in a scenario file. Complex numbers are
/// `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InputConfig {
    /// Schmidt amplitudes of the purified input `a|00> + b|11>`.
    Pure { a: [Real; 2], b: [Real; 2] },
    /// A qubit density matrix, purified internally onto the reference.
    Mixed { matrix: [[[Real; 2]; 2]; 2] },
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig::Pure { a: [FRAC_1_SQRT_2, 0.0], b: [FRAC_1_SQRT_2, 0.0] }
    }
}

fn default_t_h() -> Real {
    1.0
}

fn default_t_cold() -> Real {
    0.5
}

fn default_degeneracy() -> usize {
    1
}

fn default_eps1() -> Real {
    100.0
}

fn default_eps2() -> Real {
    101.0
}

/// One engine scenario as read from or written to a JSON file.
///
/// Exactly one of `flip_probability` and `damping_parameter` must be set;
/// every other field has the baseline default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub code: CodeKind,
    #[serde(default)]
    pub input: InputConfig,
    #[serde(default)]
    pub flip_probability: Option<Real>,
    #[serde(default)]
    pub damping_parameter: Option<Real>,
    #[serde(default = "default_t_h")]
    pub t_h: Real,
    #[serde(default = "default_t_cold")]
    pub t_c: Real,
    #[serde(default = "default_t_cold")]
    pub t_m: Real,
    #[serde(default = "default_degeneracy")]
    pub bath_degeneracy: usize,
    #[serde(default = "default_eps1")]
    pub eps1: Real,
    #[serde(default = "default_eps2")]
    pub eps2: Real,
    #[serde(default = "default_apparatus")]
    pub apparatus: ApparatusKind,
}

fn default_apparatus() -> ApparatusKind {
    ApparatusKind::Degenerate
}

impl ScenarioConfig {
    /// The baseline bit-flip configuration at the given flip probability.
    pub fn baseline(code: CodeKind, flip_probability: Real) -> Self {
        Self {
            code,
            input: InputConfig::default(),
            flip_probability: Some(flip_probability),
            damping_parameter: None,
            t_h: default_t_h(),
            t_c: default_t_cold(),
            t_m: default_t_cold(),
            bath_degeneracy: default_degeneracy(),
            eps1: default_eps1(),
            eps2: default_eps2(),
            apparatus: default_apparatus(),
        }
    }

    /// Builds and validates the engine scenario this file describes.
    pub fn to_engine(&self) -> Result<EngineScenario> {
        let noise = match (self.flip_probability, self.damping_parameter) {
            (Some(p), None) => NoiseStrength::FlipProbability(p),
            (None, Some(l)) => NoiseStrength::DampingParameter(l),
            (Some(_), Some(_)) => {
                return Err(Error::Validation(
                    "set exactly one of flip_probability and damping_parameter, got both"
                        .to_string(),
                ))
            }
            (None, None) => {
                return Err(Error::Validation(
                    "set exactly one of flip_probability and damping_parameter, got neither"
                        .to_string(),
                ))
            }
        };
        let input = match &self.input {
            InputConfig::Pure { a, b } => {
                EngineInput::Pure { a: C64::new(a[0], a[1]), b: C64::new(b[0], b[1]) }
            }
            InputConfig::Mixed { matrix } => {
                let m = CMatrix::from_fn(2, 2, |r, c| C64::new(matrix[r][c][0], matrix[r][c][1]));
                let state = DensityMatrix::new(CompositeSpace::single("s", 2), m)
                    .map_err(|e| Error::Validation(format!("input.mixed.matrix: {}", e)))?;
                EngineInput::Mixed { state }
            }
        };
        let scenario = EngineScenario {
            code: self.code,
            input,
            noise,
            t_h: self.t_h,
            t_c: self.t_c,
            t_m: self.t_m,
            bath_degeneracy: self.bath_degeneracy,
            eps1: self.eps1,
            eps2: self.eps2,
            apparatus: self.apparatus,
        };
        scenario.validate().map_err(|e| match e {
            Error::Validation(_) => e,
            other => Error::Validation(other.to_string()),
        })?;
        Ok(scenario)
    }
}

/// Parses a scenario document from JSON text.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e)))
}

/// Serializes a scenario document as pretty JSON.
pub fn write_scenario(config: &ScenarioConfig) -> String {
    serde_json::to_string_pretty(config).expect("scenario configs always serialize")
}

/// Loads and validates a scenario file into an engine scenario.
pub fn load_scenario(path: &Path) -> Result<EngineScenario> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
    parse_scenario(&text)?.to_engine()
}

/// A sweepable scalar field of the scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterPath {
    FlipProbability,
    DampingParameter,
    TH,
    TC,
    TM,
    Eps1,
    Eps2,
}

impl ParameterPath {
    fn apply(self, config: &mut ScenarioConfig, value: Real) {
        match self {
            ParameterPath::FlipProbability => {
                config.flip_probability = Some(value);
                config.damping_parameter = None;
            }
            ParameterPath::DampingParameter => {
                config.damping_parameter = Some(value);
                config.flip_probability = None;
            }
            ParameterPath::TH => config.t_h = value,
            ParameterPath::TC => config.t_c = value,
            ParameterPath::TM => config.t_m = value,
            ParameterPath::Eps1 => config.eps1 = value,
            ParameterPath::Eps2 => config.eps2 = value,
        }
    }
}

/// One sweep axis: a parameter and the grid of values it takes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: ParameterPath,
    pub grid: Vec<Real>,
}

/// A base scenario and the axes to sweep over it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub base: ScenarioConfig,
    pub axes: Vec<SweepAxis>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

fn default_parallelism() -> usize {
    1
}

impl SweepPlan {
    /// A single-point plan running just the base scenario.
    pub fn single(base: ScenarioConfig) -> Self {
        Self { base, axes: Vec::new(), parallelism: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.parallelism == 0 {
            return Err(Error::Validation("parallelism must be at least 1".to_string()));
        }
        for axis in &self.axes {
            if axis.grid.is_empty() {
                return Err(Error::Validation(format!(
                    "axis {:?} has an empty grid",
                    axis.parameter
                )));
            }
            if let Some(bad) = axis.grid.iter().find(|v| !v.is_finite()) {
                return Err(Error::Validation(format!(
                    "axis {:?} contains the non-finite value {}",
                    axis.parameter, bad
                )));
            }
        }
        Ok(())
    }

    /// Every grid point in enumeration order: the first axis varies
    /// slowest, the last fastest.
    pub fn grid_points(&self) -> Vec<ScenarioConfig> {
        let total: usize = self.axes.iter().map(|a| a.grid.len()).product();
        let mut points = Vec::with_capacity(total);
        let mut counters = vec![0usize; self.axes.len()];
        loop {
            let mut config = self.base.clone();
            for (axis, &i) in self.axes.iter().zip(&counters) {
                axis.parameter.apply(&mut config, axis.grid[i]);
            }
            points.push(config);
            // Odometer increment, last axis fastest.
            let mut k = self.axes.len();
            loop {
                if k == 0 {
                    return points;
                }
                k -= 1;
                counters[k] += 1;
                if counters[k] < self.axes[k].grid.len() {
                    break;
                }
                counters[k] = 0;
            }
        }
    }
}

/// Everything measured on one successful cycle.
#[derive(Clone, Debug)]
pub struct RowMetrics {
    pub ledger: CycleLedger,
    pub theorem2_gap: Real,
    pub theorem3_gap: Real,
    pub second_law_slack: Real,
    pub fano_gap: Real,
    pub assumptions: AssumptionsReport,
    pub tradeoff: TradeoffReport,
}

/// One report row: the scenario parameters and either the metrics or the
/// error that stopped the cycle.
#[derive(Clone, Debug)]
pub struct ReportRow {
    pub index: usize,
    pub config: ScenarioConfig,
    pub outcome: std::result::Result<RowMetrics, String>,
}

/// Tallies of a finished sweep. Violations count certified inequalities
/// that failed their stated tolerance on otherwise successful rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub failures: usize,
    pub inequality_violations: usize,
}

/// Runs one scenario and collects every certified quantity.
pub fn evaluate(config: &ScenarioConfig) -> Result<RowMetrics> {
    let scenario = config.to_engine()?;
    let (snap, ledger) = run_cycle(&scenario)?;
    let assumptions = assumptions_report(&snap, &ledger)?;
    let tradeoff = theorem4_and_tradeoff(&ledger, &assumptions)?;
    Ok(RowMetrics {
        theorem2_gap: theorem2_gap(&snap)?,
        theorem3_gap: theorem3_gap(&snap, &ledger)?,
        second_law_slack: second_law_slack(&snap)?,
        fano_gap: fidelity_and_exchange(&snap)?.fano_gap,
        assumptions,
        tradeoff,
        ledger,
    })
}

fn evaluate_row(index: usize, config: ScenarioConfig) -> ReportRow {
    let outcome = evaluate(&config).map_err(|e| e.to_string());
    ReportRow { index, config, outcome }
}

impl RowMetrics {
    /// Number of certified inequalities this row violates at their stated
    /// tolerances.
    pub fn inequality_violations(&self) -> usize {
        let mut n = 0;
        if self.theorem2_gap.abs() > crate::tol::IDENTITY_GAP {
            n += 1;
        }
        if self.theorem3_gap.abs() > crate::tol::IDENTITY_GAP {
            n += 1;
        }
        if self.second_law_slack < -crate::tol::INEQ_SLACK {
            n += 1;
        }
        if self.fano_gap < -crate::tol::INEQ_SLACK {
            n += 1;
        }
        if self.tradeoff.hypothesis_violation.is_none()
            && self.tradeoff.theorem4_gap < -crate::tol::INEQ_SLACK
        {
            n += 1;
        }
        if let Some(gap) = self.tradeoff.corollary4_gap {
            if gap > crate::tol::INEQ_SLACK {
                n += 1;
            }
        }
        n
    }
}

/// Fixed CSV column set, parameters first, then metrics.
pub const CSV_COLUMNS: &[&str] = &[
    "index",
    "code",
    "flip_probability",
    "damping_parameter",
    "t_h",
    "t_c",
    "t_m",
    "bath_degeneracy",
    "eps1",
    "eps2",
    "apparatus_beta_epsilon",
    "status",
    "error",
    "q_h",
    "q_c",
    "q_meas",
    "q_meas_y",
    "q_meas_rsa_given_y",
    "d_apparatus",
    "q_y_erase_modeled",
    "w_enc",
    "w_meas",
    "w_dec",
    "w_tot",
    "q_tot_energetic",
    "q_input",
    "delta_u_rsay",
    "delta_h_e",
    "s_e",
    "f_e",
    "h_y_given_x",
    "h_xy_given_e",
    "h_y_given_xm",
    "i_g_avg",
    "i_rs_baths",
    "i_rsa_m_given_xy",
    "gamma",
    "neg_log_efficacy_avg",
    "eta",
    "eta_defined",
    "eta_c",
    "heat_engine_regime",
    "theorem2_gap",
    "theorem3_gap",
    "second_law_slack",
    "fano_gap",
    "theorem4_gap",
    "fano_tradeoff_gap",
    "corollary4_gap",
    "carnot_flux",
    "hypothesis_violation",
    "a1_ok",
    "a2_ok",
    "a2_slack",
    "a3_modeled",
    "a4_ok",
    "a4_slack",
];

/// Lossless decimal form of a float: 17 significant digits, `.` decimal
/// separator, nonfinite values spelled out.
pub fn format_real(x: Real) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{:.16e}", x)
    }
}

fn real_value(x: Real) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        Value::String("nan".to_string())
    } else if x > 0.0 {
        Value::String("inf".to_string())
    } else {
        Value::String("-inf".to_string())
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn code_name(code: CodeKind) -> &'static str {
    match code {
        CodeKind::BitFlip => "bit_flip",
        CodeKind::PhaseFlip => "phase_flip",
    }
}

impl ReportRow {
    fn param_cells(&self) -> Vec<String> {
        let c = &self.config;
        let beta_eps = match c.apparatus {
            ApparatusKind::Degenerate => String::new(),
            ApparatusKind::Gapped { beta_epsilon } => format_real(beta_epsilon),
        };
        vec![
            self.index.to_string(),
            code_name(c.code).to_string(),
            c.flip_probability.map(format_real).unwrap_or_default(),
            c.damping_parameter.map(format_real).unwrap_or_default(),
            format_real(c.t_h),
            format_real(c.t_c),
            format_real(c.t_m),
            c.bath_degeneracy.to_string(),
            format_real(c.eps1),
            format_real(c.eps2),
            beta_eps,
        ]
    }

    /// The row as one CSV line following [`CSV_COLUMNS`].
    pub fn csv_line(&self) -> String {
        let mut cells = self.param_cells();
        match &self.outcome {
            Err(message) => {
                cells.push("error".to_string());
                cells.push(csv_escape(message));
                cells.extend(std::iter::repeat(String::new()).take(CSV_COLUMNS.len() - cells.len()));
            }
            Ok(m) => {
                cells.push("ok".to_string());
                cells.push(String::new());
                let l = &m.ledger;
                for x in [
                    l.q_h,
                    l.q_c,
                    l.q_meas,
                    l.q_meas_y,
                    l.q_meas_rsa_given_y,
                    l.d_apparatus,
                    l.q_y_erase_modeled,
                    l.w_enc,
                    l.w_meas,
                    l.w_dec,
                    l.w_tot,
                    l.q_tot_energetic,
                    l.q_input,
                    l.delta_u_rsay,
                    l.delta_h_e,
                    l.s_e,
                    l.f_e,
                    l.h_y_given_x,
                    l.h_xy_given_e,
                    l.h_y_given_xm,
                    l.i_g_avg,
                    l.i_rs_baths,
                    l.i_rsa_m_given_xy,
                    l.gamma,
                    l.neg_log_efficacy_avg,
                ] {
                    cells.push(format_real(x));
                }
                cells.push(l.eta.map(format_real).unwrap_or_default());
                cells.push(l.eta.is_some().to_string());
                cells.push(format_real(l.eta_c));
                cells.push(l.heat_engine_regime.to_string());
                for x in [
                    m.theorem2_gap,
                    m.theorem3_gap,
                    m.second_law_slack,
                    m.fano_gap,
                    m.tradeoff.theorem4_gap,
                    m.tradeoff.fano_tradeoff_gap,
                ] {
                    cells.push(format_real(x));
                }
                cells.push(m.tradeoff.corollary4_gap.map(format_real).unwrap_or_default());
                cells.push(format_real(m.tradeoff.carnot_flux));
                cells.push(
                    m.tradeoff.hypothesis_violation.map(|i| i.to_string()).unwrap_or_default(),
                );
                cells.push(m.assumptions.a1_ok.to_string());
                cells.push(m.assumptions.a2_ok.to_string());
                cells.push(format_real(m.assumptions.a2_slack));
                cells.push(m.assumptions.a3_modeled.to_string());
                cells.push(m.assumptions.a4_ok.to_string());
                cells.push(format_real(m.assumptions.a4_slack));
            }
        }
        debug_assert_eq!(cells.len(), CSV_COLUMNS.len());
        cells.join(",")
    }

    /// The row as one JSON object carrying every CSV column plus the
    /// per-outcome vectors.
    pub fn json_line(&self) -> String {
        let c = &self.config;
        let mut obj = Map::new();
        obj.insert("index".to_string(), json!(self.index));
        obj.insert("code".to_string(), json!(code_name(c.code)));
        obj.insert("flip_probability".to_string(), opt_real(c.flip_probability));
        obj.insert("damping_parameter".to_string(), opt_real(c.damping_parameter));
        obj.insert("t_h".to_string(), real_value(c.t_h));
        obj.insert("t_c".to_string(), real_value(c.t_c));
        obj.insert("t_m".to_string(), real_value(c.t_m));
        obj.insert("bath_degeneracy".to_string(), json!(c.bath_degeneracy));
        obj.insert("eps1".to_string(), real_value(c.eps1));
        obj.insert("eps2".to_string(), real_value(c.eps2));
        obj.insert(
            "apparatus_beta_epsilon".to_string(),
            match c.apparatus {
                ApparatusKind::Degenerate => Value::Null,
                ApparatusKind::Gapped { beta_epsilon } => real_value(beta_epsilon),
            },
        );
        match &self.outcome {
            Err(message) => {
                obj.insert("status".to_string(), json!("error"));
                obj.insert("error".to_string(), json!(message));
            }
            Ok(m) => {
                obj.insert("status".to_string(), json!("ok"));
                obj.insert("error".to_string(), Value::Null);
                let l = &m.ledger;
                for (name, x) in [
                    ("q_h", l.q_h),
                    ("q_c", l.q_c),
                    ("q_meas", l.q_meas),
                    ("q_meas_y", l.q_meas_y),
                    ("q_meas_rsa_given_y", l.q_meas_rsa_given_y),
                    ("d_apparatus", l.d_apparatus),
                    ("q_y_erase_modeled", l.q_y_erase_modeled),
                    ("w_enc", l.w_enc),
                    ("w_meas", l.w_meas),
                    ("w_dec", l.w_dec),
                    ("w_tot", l.w_tot),
                    ("q_tot_energetic", l.q_tot_energetic),
                    ("q_input", l.q_input),
                    ("delta_u_rsay", l.delta_u_rsay),
                    ("delta_h_e", l.delta_h_e),
                    ("s_e", l.s_e),
                    ("f_e", l.f_e),
                    ("h_y_given_x", l.h_y_given_x),
                    ("h_xy_given_e", l.h_xy_given_e),
                    ("h_y_given_xm", l.h_y_given_xm),
                    ("i_g_avg", l.i_g_avg),
                    ("i_rs_baths", l.i_rs_baths),
                    ("i_rsa_m_given_xy", l.i_rsa_m_given_xy),
                    ("gamma", l.gamma),
                    ("neg_log_efficacy_avg", l.neg_log_efficacy_avg),
                    ("eta_c", l.eta_c),
                    ("theorem2_gap", m.theorem2_gap),
                    ("theorem3_gap", m.theorem3_gap),
                    ("second_law_slack", m.second_law_slack),
                    ("fano_gap", m.fano_gap),
                    ("theorem4_gap", m.tradeoff.theorem4_gap),
                    ("fano_tradeoff_gap", m.tradeoff.fano_tradeoff_gap),
                    ("carnot_flux", m.tradeoff.carnot_flux),
                    ("a2_slack", m.assumptions.a2_slack),
                    ("a4_slack", m.assumptions.a4_slack),
                ] {
                    obj.insert(name.to_string(), real_value(x));
                }
                obj.insert("eta".to_string(), opt_real(l.eta));
                obj.insert("eta_defined".to_string(), json!(l.eta.is_some()));
                obj.insert("heat_engine_regime".to_string(), json!(l.heat_engine_regime));
                obj.insert("corollary4_gap".to_string(), opt_real(m.tradeoff.corollary4_gap));
                obj.insert(
                    "hypothesis_violation".to_string(),
                    m.tradeoff.hypothesis_violation.map(|i| json!(i)).unwrap_or(Value::Null),
                );
                obj.insert("a1_ok".to_string(), json!(m.assumptions.a1_ok));
                obj.insert("a2_ok".to_string(), json!(m.assumptions.a2_ok));
                obj.insert("a3_modeled".to_string(), json!(m.assumptions.a3_modeled));
                obj.insert("a4_ok".to_string(), json!(m.assumptions.a4_ok));
                obj.insert(
                    "p_x".to_string(),
                    Value::Array(l.p_x.iter().map(|&x| real_value(x)).collect()),
                );
                obj.insert(
                    "i_g_x".to_string(),
                    Value::Array(l.i_g_x.iter().map(|&x| real_value(x)).collect()),
                );
                obj.insert(
                    "minus_ln_efficacy_x".to_string(),
                    Value::Array(l.minus_ln_efficacy_x.iter().map(|&x| real_value(x)).collect()),
                );
            }
        }
        Value::Object(obj).to_string()
    }
}

fn opt_real(x: Option<Real>) -> Value {
    x.map(real_value).unwrap_or(Value::Null)
}

/// Runs every grid point of the plan and writes `<out>.csv` and
/// `<out>.jsonl`. The rows land in grid order whatever the parallelism.
pub fn run_sweep(plan: &SweepPlan, out_base: &Path) -> Result<SweepSummary> {
    let rows = sweep_rows(plan)?;
    let summary = summarize(&rows);

    let io_err = |e: std::io::Error, p: &PathBuf| Error::Validation(format!("{}: {}", p.display(), e));
    let csv_path = out_base.with_extension("csv");
    let jsonl_path = out_base.with_extension("jsonl");
    if let Some(dir) = csv_path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| io_err(e, &dir.to_path_buf()))?;
        }
    }

    let mut csv = Vec::new();
    writeln!(csv, "{}", CSV_COLUMNS.join(",")).expect("vec write");
    let mut jsonl = Vec::new();
    for row in &rows {
        writeln!(csv, "{}", row.csv_line()).expect("vec write");
        writeln!(jsonl, "{}", row.json_line()).expect("vec write");
    }
    fs::write(&csv_path, csv).map_err(|e| io_err(e, &csv_path))?;
    fs::write(&jsonl_path, jsonl).map_err(|e| io_err(e, &jsonl_path))?;
    Ok(summary)
}

/// Computes the rows of a sweep without touching the filesystem, in grid
/// order.
pub fn sweep_rows(plan: &SweepPlan) -> Result<Vec<ReportRow>> {
    plan.validate()?;
    let points = plan.grid_points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.parallelism)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {}", e)))?;
    Ok(pool.install(|| {
        points
            .into_par_iter()
            .enumerate()
            .map(|(i, config)| evaluate_row(i, config))
            .collect()
    }))
}

/// Tallies a finished row set.
pub fn summarize(rows: &[ReportRow]) -> SweepSummary {
    let failures = rows.iter().filter(|r| r.outcome.is_err()).count();
    let inequality_violations = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .map(RowMetrics::inequality_violations)
        .sum();
    SweepSummary { rows: rows.len(), failures, inequality_violations }
}
