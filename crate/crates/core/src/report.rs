//! Command layer behind the `crwa` binary: configuration, the seven
//! commands, and CSV / JSON / SVG output.
//!
//! Every command first renders its artifacts in memory and only then writes
//! them, removing anything already written if a later write fails.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::crwa::{crwa_energy_closed, crwa_energy_series, ground_state, GroundStateOrder};
use crate::dynamics::{
    crwa_inversion_full, envelope_diff_k, envelope_diff_k_approx, envelope_same_k,
    envelope_same_k_approx, saddle_point_analysis,
};
use crate::error::{Error, Result};
use crate::exact::{build_hamiltonian, diagonalize, InversionEvaluator, DEFAULT_N_CUT};
use crate::model::{reduced_time_grid, Branch, CoherentField, ModelParams, TimeGrid, TimeSeries};
use crate::rwa::{rwa_energy, rwa_inversion};
use crate::spectrum::{
    bin_aligned_grid, detect_peaks, match_predictions, power_spectrum, predict_peaks_first_order,
    predict_peaks_second_order, resolution, PeakPrediction, SpectrumResult, DEFAULT_PROMINENCE,
    DEFAULT_TAU_MAX,
};
use crate::validation::run_all;

pub const VERSION: &str = concat!("rabi-crwa ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Levels,
    Inversion,
    Components,
    Envelopes,
    Power,
    Peaks,
    Validate,
}

impl Command {
    fn is_time_domain(self) -> bool {
        !matches!(self, Command::Levels | Command::Validate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rwa,
    Crwa,
    Exact,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Rwa, Backend::Crwa, Backend::Exact];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Rwa => "rwa",
            Backend::Crwa => "crwa",
            Backend::Exact => "exact",
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rwa" => Ok(Backend::Rwa),
            "crwa" => Ok(Backend::Crwa),
            "exact" => Ok(Backend::Exact),
            other => Err(Error::Config(format!(
                "unknown backend `{other}` (expected rwa, crwa or exact)"
            ))),
        }
    }
}

/// Parses `rwa,crwa,exact`.
pub fn parse_backends(list: &str) -> Result<Vec<Backend>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(Backend::from_str)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Config(format!(
                "unknown format `{other}` (expected csv, json or svg)"
            ))),
        }
    }
}

/// A partial configuration: one layer of command-line flags or a JSON file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub g: Option<f64>,
    pub alpha_sq: Option<f64>,
    pub backends: Option<Vec<Backend>>,
    pub tau_max: Option<f64>,
    pub n_points: Option<usize>,
    pub n_cut: Option<usize>,
    pub tail_tol: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub n_max: Option<usize>,
    pub quick: Option<bool>,
}

impl ConfigLayer {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))
    }

    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            g: self.g.or(lower.g),
            alpha_sq: self.alpha_sq.or(lower.alpha_sq),
            backends: self.backends.or(lower.backends),
            tau_max: self.tau_max.or(lower.tau_max),
            n_points: self.n_points.or(lower.n_points),
            n_cut: self.n_cut.or(lower.n_cut),
            tail_tol: self.tail_tol.or(lower.tail_tol),
            output: self.output.or(lower.output),
            format: self.format.or(lower.format),
            n_max: self.n_max.or(lower.n_max),
            quick: self.quick.or(lower.quick),
        }
    }
}

/// Fully resolved configuration, echoed into every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub g: f64,
    pub alpha_sq: f64,
    pub backends: Vec<Backend>,
    pub tau_max: f64,
    pub n_points: usize,
    pub n_cut: Option<usize>,
    pub tail_tol: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub n_max: usize,
    pub quick: bool,
}

/// Reduced-time sampling step used when `n_points` is not given.
const DEFAULT_TAU_STEP: f64 = 0.02;

impl RunConfig {
    /// Flags override the file, the file overrides the defaults.
    pub fn resolve(command: Command, flags: ConfigLayer, file: Option<ConfigLayer>) -> Result<Self> {
        let layer = flags.over(file.unwrap_or_default());
        let tau_max = layer.tau_max.unwrap_or(match command {
            Command::Power | Command::Peaks => DEFAULT_TAU_MAX,
            _ => 40.0,
        });
        let config = RunConfig {
            command,
            g: layer.g.unwrap_or(0.06),
            alpha_sq: layer.alpha_sq.unwrap_or(10.0),
            backends: layer.backends.unwrap_or_else(|| Backend::ALL.to_vec()),
            tau_max,
            n_points: layer
                .n_points
                .unwrap_or((tau_max / DEFAULT_TAU_STEP).round() as usize + 1),
            n_cut: layer.n_cut,
            tail_tol: layer.tail_tol.unwrap_or(1e-12),
            output: layer.output,
            format: layer.format.unwrap_or(Format::Csv),
            n_max: layer.n_max.unwrap_or(10),
            quick: layer.quick.unwrap_or(false),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(Error::param("g", self.g, "must be finite and non-negative"));
        }
        if self.command.is_time_domain() && self.g == 0.0 {
            return Err(Error::param("g", self.g, "time-domain commands need g > 0"));
        }
        if !(self.alpha_sq >= 0.0) || !self.alpha_sq.is_finite() {
            return Err(Error::param("alpha_sq", self.alpha_sq, "must be finite and non-negative"));
        }
        if !(self.tau_max > 0.0) || !self.tau_max.is_finite() {
            return Err(Error::param("tau_max", self.tau_max, "must be positive"));
        }
        if self.n_points < 2 {
            return Err(Error::param("n_points", self.n_points as f64, "need at least 2 points"));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::param("tail_tol", self.tail_tol, "must lie in (0, 1)"));
        }
        if self.backends.is_empty() && self.command != Command::Levels && self.command != Command::Validate {
            return Err(Error::Config("no backend selected".into()));
        }
        Ok(())
    }

    fn field(&self) -> Result<CoherentField> {
        let field = CoherentField::with_tolerance(self.alpha_sq.sqrt(), self.tail_tol)?;
        match self.n_cut {
            Some(n) if n > field.n_cut => crate::model::coherent_amplitudes(field.alpha, n),
            _ => Ok(field),
        }
    }

    fn grid(&self) -> Result<TimeGrid> {
        reduced_time_grid(self.tau_max, self.n_points, self.g)
    }

    fn exact_n_cut(&self, field: &CoherentField) -> usize {
        self.n_cut.unwrap_or_else(|| DEFAULT_N_CUT.max(field.n_cut))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) => Value::Null,
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }

    fn number(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

/// A rectangular result with free-form notes carried as metadata.
#[derive(Debug, Clone)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl Table {
    fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn from_series(title: &str, columns: &[(&str, &TimeSeries)]) -> Self {
        let mut names = vec!["tau"];
        names.extend(columns.iter().map(|c| c.0));
        let mut table = Table::new(title, &names);
        if let Some((_, first)) = columns.first() {
            for (i, tau) in first.tau().iter().enumerate() {
                let mut row = vec![Cell::Num(*tau)];
                row.extend(columns.iter().map(|(_, s)| Cell::Num(s.values[i])));
                table.rows.push(row);
            }
        }
        table
    }

    pub fn to_csv(&self, config: &RunConfig) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "# {VERSION}").ok();
        writeln!(out, "# {}", self.title).ok();
        writeln!(out, "# config: {}", serde_json::to_string(config)?).ok();
        for note in &self.notes {
            writeln!(out, "# {note}").ok();
        }
        writeln!(out, "{}", self.columns.join(",")).ok();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells.join(",")).ok();
        }
        Ok(out)
    }

    pub fn to_json(&self, config: &RunConfig) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "version": VERSION,
            "title": self.title,
            "config": config,
            "notes": self.notes,
            "columns": self.columns,
            "rows": rows,
        });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    /// Numeric columns against the first column.
    pub fn to_svg(&self) -> String {
        let x: Vec<f64> = self
            .rows
            .iter()
            .map(|r| r[0].number().unwrap_or(f64::NAN))
            .collect();
        let series: Vec<(&str, Vec<f64>)> = (1..self.columns.len())
            .filter(|&c| self.rows.iter().all(|r| r[c].number().is_some()))
            .map(|c| {
                (
                    self.columns[c].as_str(),
                    self.rows.iter().map(|r| r[c].number().unwrap_or(f64::NAN)).collect(),
                )
            })
            .collect();
        svg_plot(&self.title, &self.columns[0], &x, &series)
    }

    fn render(&self, config: &RunConfig) -> Result<String> {
        match config.format {
            Format::Csv => self.to_csv(config),
            Format::Json => self.to_json(config),
            Format::Svg => Ok(self.to_svg()),
        }
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Polylines on linear axes with tick labels and a legend.
pub fn svg_plot(title: &str, x_label: &str, x: &[f64], series: &[(&str, Vec<f64>)]) -> String {
    let (width, height) = (800.0, 480.0);
    let (left, right, top, bottom) = (70.0, 150.0, 40.0, 50.0);
    let range = |vals: &mut dyn Iterator<Item = f64>| {
        vals.filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (mut x0, mut x1) = range(&mut x.iter().copied());
    let (mut y0, mut y1) = range(&mut series.iter().flat_map(|s| s.1.iter().copied()));
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let sx = |v: f64| left + (v - x0) / (x1 - x0) * plot_w;
    let sy = |v: f64| top + (y1 - v) / (y1 - y0) * plot_h;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    )
    .ok();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).ok();
    writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, width / 2.0, escape(title)).ok();
    writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    )
    .ok();
    for i in 0..=4 {
        let f = f64::from(i) / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(xv),
            top + plot_h + 18.0,
            tick(xv)
        )
        .ok();
        writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            left - 6.0,
            sy(yv) + 4.0,
            tick(yv)
        )
        .ok();
    }
    writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        left + plot_w / 2.0,
        height - 10.0,
        escape(x_label)
    )
    .ok();
    for (i, (name, ys)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = x
            .iter()
            .zip(ys)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| format!("{:.2},{:.2}", sx(*a), sy(*b)))
            .collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
            points.join(" ")
        )
        .ok();
        let ly = top + 16.0 * i as f64 + 10.0;
        writeln!(
            out,
            r#"<line x1="{0}" y1="{ly}" x2="{1}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{2}" y="{3}">{4}</text>"#,
            width - right + 10.0,
            width - right + 30.0,
            width - right + 35.0,
            ly + 4.0,
            escape(name)
        )
        .ok();
    }
    out.push_str("</svg>\n");
    out
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A file to write, or stdout when `path` is `None`.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub content: String,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    /// Diagnostics for stderr.
    pub messages: Vec<String>,
    /// False when a validation run found failing checks.
    pub success: bool,
}

fn single(config: &RunConfig, table: Table, messages: Vec<String>) -> Result<RunOutput> {
    Ok(RunOutput {
        artifacts: vec![Artifact {
            path: config.output.clone(),
            content: table.render(config)?,
        }],
        messages,
        success: true,
    })
}

fn exact_evaluator(config: &RunConfig, field: &CoherentField) -> Result<InversionEvaluator> {
    let params = ModelParams::resonant(config.g)?;
    let eig = diagonalize(&build_hamiltonian(&params, config.exact_n_cut(field)))?;
    Ok(InversionEvaluator::new(&eig, field))
}

fn inversions(config: &RunConfig, field: &CoherentField, grid: &TimeGrid) -> Result<(Vec<(Backend, TimeSeries)>, Vec<String>)> {
    let mut messages = Vec::new();
    let mut out = Vec::new();
    for &b in &config.backends {
        let series = match b {
            Backend::Rwa => rwa_inversion(field, config.g, grid),
            Backend::Crwa => crwa_inversion_full(field, config.g, grid).total,
            Backend::Exact => {
                let eval = exact_evaluator(config, field)?;
                messages.extend(eval.leakage_warning());
                eval.evaluate(grid)
            }
        };
        out.push((b, series));
    }
    Ok((out, messages))
}

fn levels(config: &RunConfig) -> Result<RunOutput> {
    let g = config.g;
    let n_cut = config.n_cut.unwrap_or(DEFAULT_N_CUT).max(2 * config.n_max + 20);
    let eig = diagonalize(&build_hamiltonian(&ModelParams::resonant(g)?, n_cut))?;
    let mut table = Table::new(
        "energy levels E_kn (k=1 lower, k=2 upper branch)",
        &[
            "n", "rwa_k1", "rwa_k2", "crwa_k1", "crwa_k2", "crwa_series_k1", "crwa_series_k2",
            "exact_k1", "exact_k2", "crwa_minus_exact_k1", "crwa_minus_exact_k2",
        ],
    );
    for n in 0..=config.n_max {
        let [lo, up] = Branch::BOTH;
        let exact = |k| eig.level_energy(k, n).unwrap_or(f64::NAN);
        table.rows.push(vec![
            Cell::Int(n as i64),
            Cell::Num(rwa_energy(lo, n, g)),
            Cell::Num(rwa_energy(up, n, g)),
            Cell::Num(crwa_energy_closed(lo, n, g)),
            Cell::Num(crwa_energy_closed(up, n, g)),
            Cell::Num(crwa_energy_series(lo, n, g)),
            Cell::Num(crwa_energy_series(up, n, g)),
            Cell::Num(exact(lo)),
            Cell::Num(exact(up)),
            Cell::Num(crwa_energy_closed(lo, n, g) - exact(lo)),
            Cell::Num(crwa_energy_closed(up, n, g) - exact(up)),
        ]);
    }
    table.notes.push(format!(
        "ground state: exact {:.16e}, first order {:.16e}, second order {:.16e}",
        eig.ground_energy(),
        ground_state(g, GroundStateOrder::First).energy,
        ground_state(g, GroundStateOrder::Second).energy
    ));
    single(config, table, Vec::new())
}

fn inversion(config: &RunConfig) -> Result<RunOutput> {
    let field = config.field()?;
    let grid = config.grid()?;
    let (series, messages) = inversions(config, &field, &grid)?;
    let names: Vec<String> = series.iter().map(|(b, _)| format!("W_{}", b.name())).collect();
    let cols: Vec<(&str, &TimeSeries)> = names.iter().map(String::as_str).zip(series.iter().map(|s| &s.1)).collect();
    let table = Table::from_series("population inversion W(tau), tau = 2 g t", &cols);
    single(config, table, messages)
}

fn components(config: &RunConfig) -> Result<RunOutput> {
    let field = config.field()?;
    let grid = config.grid()?;
    let c = crwa_inversion_full(&field, config.g, &grid);
    let constant = TimeSeries::new(grid.clone(), vec![c.constant; grid.len()]);
    let mut table = Table::from_series(
        "CRWA inversion components",
        &[
            ("constant", &constant),
            ("ground_state", &c.gs_term),
            ("rabi", &c.rabi),
            ("same_k", &c.same_k),
            ("diff_k", &c.diff_k),
            ("total", &c.total),
        ],
    );
    table
        .notes
        .push(format!("decomposition error {:.3e}", c.decomposition_error()));
    single(config, table, Vec::new())
}

fn envelopes(config: &RunConfig) -> Result<RunOutput> {
    let field = config.field()?;
    let grid = config.grid()?;
    let g = config.g;
    let terms: Vec<(f64, f64)> = field
        .betas
        .iter()
        .enumerate()
        .map(|(n, b)| {
            let r1 = ((n + 1) as f64).sqrt();
            (b * b / r1, g * (r1 + ((n + 3) as f64).sqrt()))
        })
        .collect();
    let f_sum = TimeSeries::from_fn(&grid, |t| terms.iter().map(|(w, om)| w * (om * t).sin()).sum());
    let saddle = saddle_point_analysis(config.alpha_sq.max(f64::MIN_POSITIVE), g, &grid);
    let table = Table::from_series(
        "intrinsic-oscillation envelopes: regrouped sums and approximants",
        &[
            ("same_k", &envelope_same_k(&field, g, &grid)),
            ("same_k_approx", &envelope_same_k_approx(&field, g, &grid)),
            ("diff_k", &envelope_diff_k(&field, g, &grid)),
            ("diff_k_approx", &envelope_diff_k_approx(&field, g, &grid)),
            ("f_sum", &f_sum),
            ("f_saddle", &saddle.envelope),
        ],
    );
    single(config, table, saddle.warning.into_iter().collect())
}

fn frequency_grid(config: &RunConfig, grid: &TimeGrid) -> Result<Vec<f64>> {
    let bin = resolution(config.tau_max);
    let highest = predict_peaks_second_order(config.g, config.alpha_sq.sqrt())?
        .iter()
        .map(|p| p.frequency)
        .fold(25.0, f64::max);
    let nyquist = std::f64::consts::PI / grid.tau_step();
    Ok(bin_aligned_grid(bin, 1.0, (1.1 * highest).min(nyquist)))
}

fn predictions(config: &RunConfig) -> Result<Vec<PeakPrediction>> {
    let alpha = config.alpha_sq.sqrt();
    let mut all = predict_peaks_first_order(config.g, alpha)?;
    all.extend(predict_peaks_second_order(config.g, alpha)?);
    Ok(all)
}

fn spectra(config: &RunConfig) -> Result<(Vec<(Backend, SpectrumResult)>, Vec<String>)> {
    let field = config.field()?;
    let grid = config.grid()?;
    let freqs = frequency_grid(config, &grid)?;
    let (series, messages) = inversions(config, &field, &grid)?;
    let spectra = series
        .iter()
        .map(|(b, s)| Ok((*b, power_spectrum(s, &freqs)?)))
        .collect::<Result<_>>()?;
    Ok((spectra, messages))
}

fn power(config: &RunConfig) -> Result<RunOutput> {
    let (spectra, messages) = spectra(config)?;
    let preds = predictions(config)?;
    let mut columns = vec!["nu".to_string()];
    columns.extend(spectra.iter().map(|(b, _)| format!("P_{}", b.name())));
    let mut table = Table {
        title: "power spectrum |F(nu)|^2, nu in units of 2g".into(),
        columns,
        rows: Vec::new(),
        notes: Vec::new(),
    };
    let first = &spectra[0].1;
    for (i, nu) in first.freqs.iter().enumerate() {
        let mut row = vec![Cell::Num(*nu)];
        row.extend(spectra.iter().map(|(_, s)| Cell::Num(s.power[i])));
        table.rows.push(row);
    }
    table.notes.push(format!("bin width {:.16e}", first.bin_width));
    for p in &preds {
        table
            .notes
            .push(format!("prediction {} (order {}) at {:.16e}", p.label.name(), p.order, p.frequency));
    }
    let mut artifacts = vec![Artifact {
        path: config.output.clone(),
        content: table.render(config)?,
    }];
    if let Some(path) = &config.output {
        if config.format != Format::Json {
            let doc = json!({
                "version": VERSION,
                "config": config,
                "bin_width": first.bin_width,
                "predictions": preds,
            });
            artifacts.push(Artifact {
                path: Some(sibling(path, "predictions.json")),
                content: serde_json::to_string_pretty(&doc)? + "\n",
            });
        }
    }
    Ok(RunOutput {
        artifacts,
        messages,
        success: true,
    })
}

/// `out/spec.csv` → `out/spec.predictions.json`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn peaks(config: &RunConfig) -> Result<RunOutput> {
    let (spectra, messages) = spectra(config)?;
    let preds: Vec<PeakPrediction> = predictions(config)?
        .into_iter()
        .filter(|p| p.label.is_line())
        .collect();
    let mut table = Table::new(
        "detected vs predicted peaks (2-bin tolerance)",
        &[
            "backend", "label", "order", "predicted", "detected", "distance_bins", "matched",
            "half_width", "prominence",
        ],
    );
    for (b, spec) in &spectra {
        let detected = detect_peaks(spec, DEFAULT_PROMINENCE);
        for m in match_predictions(&detected, &preds, spec.bin_width, 2.0) {
            let (freq, hw, prom) = m
                .nearest
                .map(|p| (p.frequency, p.half_width, p.prominence))
                .unwrap_or((f64::NAN, f64::NAN, f64::NAN));
            table.rows.push(vec![
                Cell::Text(b.name().into()),
                Cell::Text(m.prediction.label.name().into()),
                Cell::Int(i64::from(m.prediction.order)),
                Cell::Num(m.prediction.frequency),
                Cell::Num(freq),
                Cell::Num(m.distance_bins),
                Cell::Bool(m.matched),
                Cell::Num(hw),
                Cell::Num(prom),
            ]);
        }
        table.notes.push(format!(
            "{}: {} peaks above {} of max prominence, bin {:.16e}",
            b.name(),
            detected.len(),
            DEFAULT_PROMINENCE,
            spec.bin_width
        ));
    }
    single(config, table, messages)
}

fn validate(config: &RunConfig) -> Result<RunOutput> {
    let report = run_all(config.quick)?;
    let mut table = Table::new(
        "acceptance checks",
        &["id", "title", "passed", "seconds", "summary"],
    );
    let mut messages = Vec::new();
    for c in &report.criteria {
        messages.push(c.line());
        table.rows.push(vec![
            Cell::Int(i64::from(c.id)),
            Cell::Text(c.title.clone()),
            Cell::Bool(c.passed),
            Cell::Num(c.seconds),
            Cell::Text(c.summary.replace(',', ";")),
        ]);
    }
    let content = match config.format {
        Format::Json => {
            let doc = json!({ "version": VERSION, "config": config, "report": report });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        _ => table.to_csv(config)?,
    };
    Ok(RunOutput {
        artifacts: vec![Artifact {
            path: config.output.clone(),
            content,
        }],
        messages,
        success: report.all_passed,
    })
}

/// Runs the command in memory.
pub fn execute(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    match config.command {
        Command::Levels => levels(config),
        Command::Inversion => inversion(config),
        Command::Components => components(config),
        Command::Envelopes => envelopes(config),
        Command::Power => power(config),
        Command::Peaks => peaks(config),
        Command::Validate => validate(config),
    }
}

/// Writes artifacts, removing already written files if one write fails.
pub fn write_artifacts(artifacts: &[Artifact], stdout: &mut dyn Write) -> Result<()> {
    let mut written: Vec<&Path> = Vec::new();
    for a in artifacts {
        let result = match &a.path {
            Some(path) => {
                let r = path
                    .parent()
                    .filter(|p| !p.as_os_str().is_empty())
                    .map_or(Ok(()), fs::create_dir_all)
                    .and_then(|()| fs::write(path, &a.content));
                if r.is_ok() {
                    written.push(path);
                }
                r
            }
            None => stdout.write_all(a.content.as_bytes()),
        };
        if let Err(e) = result {
            for p in written {
                let _ = fs::remove_file(p);
            }
            return Err(e.into());
        }
    }
    Ok(())
}

/// Exit status: 0 success, 1 usage error, 2 numerical or validation failure.
pub fn exit_code(result: &Result<RunOutput>) -> i32 {
    match result {
        Ok(out) if out.success => 0,
        Ok(_) => 2,
        Err(e) if e.is_usage() => 1,
        Err(_) => 2,
    }
}

/// Executes, writes and reports; returns the exit status.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut result = execute(config);
    if let Ok(out) = &result {
        for m in &out.messages {
            let _ = writeln!(stderr, "{m}");
        }
        if let Err(e) = write_artifacts(&out.artifacts, stdout) {
            result = Err(e);
        }
    }
    if let Err(e) = &result {
        let _ = writeln!(stderr, "error: {e}");
    }
    exit_code(&result)
}
