//! Run and sweep configuration: TOML schema, defaults, validation, and
//! resolution into the concrete parameter structs the pipeline consumes.
//!
//! An empty config file is a complete experiment description: every field
//! defaults to the resonant S = 1, N = 5 working point (D = 1,
//! omega = 10 pi D, B = omega/2, B' = omega, J = D, thermal start at
//! beta = 1/(J S), spectral backend, 1000 periods at 20 samples each).
//! Unknown keys are rejected, naming the offender.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{DetectionOptions, Window};
use crate::error::{Error, Result};
use crate::evolution::{Backend, EvolutionConfig};
use crate::model::{Coupling, ModelParams};
use crate::spin::Spin;

/// Environment variable overriding the output directory (beaten only by
/// the `--out` CLI flag).
pub const OUT_DIR_ENV: &str = "SMM_DTC_OUT";

fn default_spin() -> f64 {
    1.0
}
fn default_n_sites() -> usize {
    5
}
fn default_unit() -> f64 {
    1.0
}
fn default_omega() -> f64 {
    10.0 * std::f64::consts::PI
}

/// `[model]` section; raw user input before resolution.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    /// Site spin S.
    pub spin: f64,
    /// Chain length N.
    pub n_sites: usize,
    /// Exchange J; energies in units of the axial anisotropy by default.
    pub j_exchange: f64,
    /// Axial anisotropy D.
    pub d_axial: f64,
    /// Rhombic anisotropy E.
    pub e_rhombic: f64,
    /// Drive angular frequency omega.
    pub omega: f64,
    /// Drive amplitude B. Exclusive with `b_drive_over_omega`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_drive: Option<f64>,
    /// Drive amplitude as a fraction of omega (resolves to 0.5 if neither
    /// field is set).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_drive_over_omega: Option<f64>,
    /// Static longitudinal field B'. Exclusive with
    /// `b_static_over_omega`; defaults to omega (the resonant point).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_static: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_static_over_omega: Option<f64>,
    /// Exchange form.
    pub coupling: Coupling,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            spin: default_spin(),
            n_sites: default_n_sites(),
            j_exchange: default_unit(),
            d_axial: default_unit(),
            e_rhombic: 0.0,
            omega: default_omega(),
            b_drive: None,
            b_drive_over_omega: None,
            b_static: None,
            b_static_over_omega: None,
            coupling: Coupling::Heisenberg,
        }
    }
}

/// How the chain starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// Gibbs state of the t = 0 lab Hamiltonian (static part plus the
    /// drive field frozen along x).
    #[default]
    Thermal,
    /// Every site in the same single-site state (identical local
    /// magnetizations).
    ProductSynchronized,
    /// Explicit per-site state vectors.
    ProductCustom,
    /// Seeded random product state (the only randomness in the pipeline).
    Random,
}

/// `[initial_state]` section.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct InitialStateSection {
    pub kind: StateKind,
    /// Inverse temperature for `thermal`. Defaults to 1/(J S) for S <= 1
    /// and 1/J for S > 1; mandatory when J <= 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Polarization axis for `product_synchronized`: `z` (default) or `x`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    /// Per-site state vectors for `product_custom`, each entry a list of
    /// `[re, im]` pairs of site dimension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_states: Option<Vec<Vec<[f64; 2]>>>,
    /// RNG seed for `random`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// `[analysis]` section.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    /// DFT taper.
    pub window: Window,
    /// Drive periods discarded before the transform (transient removal);
    /// 0 reproduces the reference analysis.
    pub discard_periods: usize,
    /// Sub-harmonic search band in omega units.
    pub band: [f64; 2],
    /// Peak-over-median detection threshold.
    pub threshold: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        let d = DetectionOptions::default();
        AnalysisSection {
            window: Window::Rectangular,
            discard_periods: 0,
            band: [d.band.0, d.band.1],
            threshold: d.threshold,
        }
    }
}

/// `[output]` section.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Output directory; overridden by the environment variable and the
    /// `--out` flag, in that order of increasing precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    /// Write the time-series CSV.
    pub write_series: bool,
    /// Write the spectrum CSV.
    pub write_spectrum: bool,
    /// Write the analysis report JSON.
    pub write_report: bool,
    /// Include per-site lab-frame transverse columns in the series CSV
    /// and a transverse spectrum in the report.
    pub transverse: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: None,
            write_series: true,
            write_spectrum: true,
            write_report: true,
            transverse: false,
        }
    }
}

/// A complete single-run configuration file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub initial_state: InitialStateSection,
    pub evolution: EvolutionConfig,
    pub analysis: AnalysisSection,
    pub output: OutputSection,
}

/// One sweep axis: a dotted config path and the values it takes.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted path into the run config, e.g. `model.j_exchange`.
    pub path: String,
    /// Values substituted at `path`; heterogeneous TOML values allowed.
    pub values: Vec<toml::Value>,
}

/// Maximum number of points in a sweep's Cartesian product.
pub const MAX_SWEEP_POINTS: usize = 10_000;

/// A sweep: a base run plus axes whose Cartesian product defines the runs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Base configuration every point starts from.
    #[serde(default)]
    pub base: RunConfig,
    /// Swept parameters; must be non-empty.
    pub axes: Vec<SweepAxis>,
    /// Maximum concurrent runs; defaults to the available parallelism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<usize>,
}

/// What a config file turned out to contain.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedConfig {
    Run(Box<RunConfig>),
    Sweep(Box<SweepConfig>),
}

/// Parses a config file; a top-level `axes` key selects sweep mode.
pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Parses config text (see [`load_config`]).
pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let probe: toml::Value = toml::from_str(text)?;
    let is_sweep = probe.get("axes").is_some();
    if is_sweep {
        let sweep: SweepConfig = toml::from_str(text)?;
        if sweep.axes.is_empty() {
            return Err(Error::Config("sweep requires at least one axis".into()));
        }
        let mut points: usize = 1;
        for axis in &sweep.axes {
            if axis.values.is_empty() {
                return Err(Error::Config(format!(
                    "sweep axis '{}' has no values",
                    axis.path
                )));
            }
            points = points
                .checked_mul(axis.values.len())
                .filter(|&p| p <= MAX_SWEEP_POINTS)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "sweep Cartesian product exceeds {MAX_SWEEP_POINTS} points"
                    ))
                })?;
        }
        Ok(LoadedConfig::Sweep(Box::new(sweep)))
    } else {
        let run: RunConfig = toml::from_str(text)?;
        Ok(LoadedConfig::Run(Box::new(run)))
    }
}

/// Expands a sweep into its ordered list of run configs (row-major over
/// the axes, last axis fastest), applying each axis value at its dotted
/// path and re-validating the resulting config.
pub fn expand_sweep(sweep: &SweepConfig) -> Result<Vec<RunConfig>> {
    let base_value =
        toml::Value::try_from(&sweep.base).map_err(|e| Error::Config(e.to_string()))?;
    let counts: Vec<usize> = sweep.axes.iter().map(|a| a.values.len()).collect();
    let total: usize = counts.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut indices = vec![0usize; counts.len()];
    for _ in 0..total {
        let mut point = base_value.clone();
        for (axis, &i) in sweep.axes.iter().zip(&indices) {
            set_path(&mut point, &axis.path, axis.values[i].clone())?;
        }
        let run: RunConfig = point
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        out.push(run);
        for k in (0..indices.len()).rev() {
            indices[k] += 1;
            if indices[k] < counts[k] {
                break;
            }
            indices[k] = 0;
        }
    }
    Ok(out)
}

fn set_path(root: &mut toml::Value, path: &str, value: toml::Value) -> Result<()> {
    let mut cursor = root;
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("malformed sweep path '{path}'")));
    }
    for (i, part) in parts.iter().enumerate() {
        let table = cursor.as_table_mut().ok_or_else(|| {
            Error::Config(format!(
                "sweep path '{path}' descends into non-table at '{part}'"
            ))
        })?;
        if i + 1 == parts.len() {
            table.insert((*part).into(), value);
            return Ok(());
        }
        cursor = table
            .entry(*part)
            .or_insert(toml::Value::Table(Default::default()));
    }
    unreachable!("empty path rejected above")
}

/// Fully resolved initial-state choice.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResolvedState {
    Thermal { beta: f64 },
    ProductSynchronized { direction: char },
    ProductCustom { local_states: Vec<Vec<[f64; 2]>> },
    Random { seed: u64 },
}

/// A validated, fully concrete run description.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedRun {
    /// Physical model.
    pub params: ModelParams,
    /// Initial-state recipe.
    pub state: ResolvedState,
    /// Grid and backend.
    pub evolution: EvolutionConfig,
    /// DFT taper.
    pub window: Window,
    /// Transient discard, in drive periods.
    pub discard_periods: usize,
    /// Peak-search options.
    #[serde(skip)]
    pub detection: DetectionOptions,
    /// Detection band, serialized form.
    pub band: [f64; 2],
    /// Detection threshold, serialized form.
    pub threshold: f64,
    /// Include transverse observables.
    pub transverse: bool,
    /// Validation warnings (non-fatal).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl RunConfig {
    /// Validates and resolves every default. The returned struct is the
    /// exact experiment descriptor embedded in output files.
    pub fn resolve(&self) -> Result<ResolvedRun> {
        let m = &self.model;
        let spin = Spin::new(m.spin)?;
        let b_drive = match (m.b_drive, m.b_drive_over_omega) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "set only one of model.b_drive and model.b_drive_over_omega".into(),
                ))
            }
            (Some(b), None) => b,
            (None, Some(r)) => r * m.omega,
            (None, None) => 0.5 * m.omega,
        };
        let b_static = match (m.b_static, m.b_static_over_omega) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "set only one of model.b_static and model.b_static_over_omega".into(),
                ))
            }
            (Some(b), None) => b,
            (None, Some(r)) => r * m.omega,
            (None, None) => m.omega,
        };
        let params = ModelParams {
            spin,
            n_sites: m.n_sites,
            j_exchange: m.j_exchange,
            d_axial: m.d_axial,
            e_rhombic: m.e_rhombic,
            b_drive,
            b_static,
            omega: m.omega,
            coupling: m.coupling,
        };
        let mut warnings = params.validate()?;

        let st = &self.initial_state;
        let state = match st.kind {
            StateKind::Thermal => {
                let beta = match st.beta {
                    Some(b) => {
                        if !b.is_finite() || b < 0.0 {
                            return Err(Error::Config(format!(
                                "initial_state.beta must be finite and non-negative, got {b}"
                            )));
                        }
                        b
                    }
                    None => default_beta(&params).ok_or_else(|| {
                        Error::Config(
                            "initial_state.beta is required when j_exchange <= 0 \
                             (the 1/(J S) default is undefined)"
                                .into(),
                        )
                    })?,
                };
                ResolvedState::Thermal { beta }
            }
            StateKind::ProductSynchronized => {
                let direction = match st.direction.as_deref() {
                    None | Some("z") | Some("+z") => 'z',
                    Some("x") | Some("+x") => 'x',
                    Some(other) => {
                        return Err(Error::Config(format!(
                            "initial_state.direction must be 'z' or 'x', got '{other}'"
                        )))
                    }
                };
                ResolvedState::ProductSynchronized { direction }
            }
            StateKind::ProductCustom => {
                let local_states = st.local_states.clone().ok_or_else(|| {
                    Error::Config("product_custom requires initial_state.local_states".into())
                })?;
                ResolvedState::ProductCustom { local_states }
            }
            StateKind::Random => ResolvedState::Random {
                seed: st.seed.unwrap_or(0),
            },
        };
        if st.kind != StateKind::Thermal && st.beta.is_some() {
            warnings.push("initial_state.beta is ignored for non-thermal kinds".into());
        }
        if st.kind != StateKind::Random && st.seed.is_some() {
            warnings.push("initial_state.seed is ignored unless kind = \"random\"".into());
        }

        self.evolution.resolve_dt(params.period())?;
        if self.evolution.backend == Backend::Spectral && params.e_rhombic != 0.0 {
            return Err(Error::Unsupported(
                "the spectral backend requires e_rhombic = 0; choose backend = \"stepping\""
                    .into(),
            ));
        }

        let a = &self.analysis;
        if !(a.band[0] >= 0.0 && a.band[0] < a.band[1]) {
            return Err(Error::Config(format!(
                "analysis.band must satisfy 0 <= lo < hi, got [{}, {}]",
                a.band[0], a.band[1]
            )));
        }
        if a.threshold <= 0.0 {
            return Err(Error::Config("analysis.threshold must be positive".into()));
        }
        if a.discard_periods >= self.evolution.periods {
            return Err(Error::Config(format!(
                "analysis.discard_periods = {} leaves no data from {} periods",
                a.discard_periods, self.evolution.periods
            )));
        }

        Ok(ResolvedRun {
            params,
            state,
            evolution: self.evolution.clone(),
            window: a.window,
            discard_periods: a.discard_periods,
            detection: DetectionOptions {
                band: (a.band[0], a.band[1]),
                threshold: a.threshold,
            },
            band: a.band,
            threshold: a.threshold,
            transverse: self.output.transverse,
            warnings,
        })
    }

    /// Output directory with precedence: explicit override (CLI), then the
    /// environment variable, then the config, then `./out`.
    pub fn output_directory(&self, cli_override: Option<&Path>) -> PathBuf {
        if let Some(p) = cli_override {
            return p.to_path_buf();
        }
        if let Ok(env_dir) = std::env::var(OUT_DIR_ENV) {
            if !env_dir.is_empty() {
                return PathBuf::from(env_dir);
            }
        }
        self.output
            .directory
            .clone()
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// The documented default inverse temperature: `1/(J S)` for S <= 1 and
/// `1/J` above (the low-energy scale stays of order 1/J for larger spins).
/// Undefined for J <= 0.
pub fn default_beta(params: &ModelParams) -> Option<f64> {
    if params.j_exchange <= 0.0 {
        return None;
    }
    let s = params.spin.s();
    if s <= 1.0 {
        Some(1.0 / (params.j_exchange * s))
    } else {
        Some(1.0 / params.j_exchange)
    }
}
