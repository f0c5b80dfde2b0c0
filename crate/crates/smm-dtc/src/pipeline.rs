//! Run orchestration: state preparation, evolution, observables, analysis,
//! and artifact writing for single runs and parameter sweeps.
//!
//! Every step is deterministic: the only randomness in the pipeline is the
//! explicitly seeded `random` initial-state kind, so re-running a config
//! byte-reproduces every output file. Sweep points are fully independent
//! and execute on a bounded worker pool; each point writes its own
//! directory atomically.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    decay_time, detect_subharmonic, dft, dtc_susceptibility, envelope_analysis, f_dtc_analytic,
    parseval_deviation, SpectrumResult, Window,
};
use crate::config::{ResolvedRun, ResolvedState, RunConfig, SweepConfig};
use crate::error::{Error, Result};
use crate::evolution::{step_evolve, Backend, ExpectationSeries, SpectralEvolution};
use crate::linalg::{CMatrix, CVector, C64};
use crate::model::{operators_for, rotating_frame, static_hamiltonian, LabHamiltonian};
use crate::observables::{
    average_magnetization, dynamical_symmetry_residual, real_row, transverse_lab_from_rotating,
    TimeSeries,
};
use crate::output;
use crate::states::{
    custom_product, polarized_product, random_product, thermal_state, DensityMatrix, Direction,
};
use crate::spin::ChainOperators;

/// Sub-harmonic detection outcome in the analysis report.
#[derive(Debug, Clone, Serialize)]
pub struct DetectionReport {
    /// Interpolated peak frequency in units of omega.
    pub f_dtc: f64,
    /// Interpolated peak magnitude.
    pub peak_magnitude: f64,
    /// Index of the winning DFT bin.
    pub bin_index: usize,
    /// Peak over in-band median.
    pub threshold_ratio: f64,
}

/// Envelope diagnostics in the analysis report.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeReport {
    /// Sub-harmonic period used for the window maxima, in T0 units.
    pub t_dtc: f64,
    /// Number of strict local minima found in the envelope.
    pub n_minima: usize,
    /// Mean minima spacing T, in T0 units; absent with fewer than 2 minima.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    /// T / T_DTC.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_t_over_tdtc: Option<f64>,
    /// `"ok"`, or `"period undetermined"` when minima are too few to
    /// space (a run shorter than one envelope cycle).
    pub status: String,
    /// Envelope 1/e decay time in T0 units; absent if the envelope never
    /// falls that far.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_time: Option<f64>,
}

/// Dynamical-symmetry diagnostics in the analysis report.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    /// Predicted ladder eigenvalue (energy units of D).
    pub lambda_pred: f64,
    /// Projected commutator residual, Frobenius norm.
    pub residual_norm: f64,
    /// Residual over `lambda * ||P S~+ P||`.
    pub normalized_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// The structured analysis document written next to the CSV artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    /// Single-SMM analytic sub-harmonic prediction, units of omega.
    pub f_dtc_analytic: f64,
    /// dF_DTC/dB at the configured field.
    pub chi_dtc: f64,
    /// DFT bin width, units of omega.
    pub bin_width: f64,
    /// `"detected"` or `"no sub-harmonic detected"`.
    pub detection_status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeReport>,
    /// Why the envelope block is absent, when it is.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryReport>,
    /// Relative Parseval deviation of the magnetization spectrum; only
    /// meaningful (and only present) for the rectangular window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parseval_deviation: Option<f64>,
    /// Non-fatal notes accumulated across config resolution and the run.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Everything a single run produces, before any file is written.
#[derive(Debug, Clone)]
pub struct RunProducts {
    /// The exact experiment descriptor (also embedded in artifacts).
    pub resolved: ResolvedRun,
    /// Sampled observables; times in T0 units. Labels: `m`,
    /// `sz_site_j`, and with transverse output `sx_site_j`, `sy_site_j`
    /// (lab frame).
    pub series: TimeSeries,
    /// Magnitude spectrum of `m` after the configured discard.
    pub spectrum: SpectrumResult,
    /// Spectrum of the site-averaged lab-frame `<S^x>`; present when
    /// transverse output is enabled.
    pub transverse_spectrum: Option<SpectrumResult>,
    /// Structured analysis results.
    pub report: AnalysisReport,
}

/// Prepares the initial density matrix for a resolved run.
pub fn initial_state(resolved: &ResolvedRun, ops: &ChainOperators) -> Result<DensityMatrix> {
    let params = &resolved.params;
    match &resolved.state {
        ResolvedState::Thermal { beta } => {
            // Gibbs state of the t = 0 lab Hamiltonian: the static part
            // plus the drive frozen along +x.
            let mut h0 = static_hamiltonian(params, ops);
            h0.scaled_add(C64::new(params.b_drive, 0.0), &ops.sx_total);
            thermal_state(&h0, *beta)
        }
        ResolvedState::ProductSynchronized { direction } => {
            let dir = match direction {
                'z' => Direction::Z,
                'x' => Direction::X,
                other => {
                    return Err(Error::Config(format!(
                        "unsupported polarization axis '{other}'"
                    )))
                }
            };
            polarized_product(&ops.basis, dir)
        }
        ResolvedState::ProductCustom { local_states } => {
            let site_states: Vec<CVector> = local_states
                .iter()
                .map(|site| {
                    CVector::from(
                        site.iter()
                            .map(|&[re, im]| C64::new(re, im))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect();
            custom_product(&ops.basis, &site_states)
        }
        ResolvedState::Random { seed } => random_product(&ops.basis, *seed),
    }
}

/// Evolves the run's observables on the configured backend. Rows:
/// `sz_site_j` for all sites, then `sx_site_j`, `sy_site_j` when
/// transverse output is on. The transverse rows come back in whatever
/// frame the backend works in; callers convert via the returned flag.
fn evolve_observables(
    resolved: &ResolvedRun,
    ops: &ChainOperators,
    rho0: &DensityMatrix,
) -> Result<(ExpectationSeries, bool)> {
    let params = &resolved.params;
    let n = params.n_sites;
    let mut obs: Vec<&CMatrix> = Vec::with_capacity(if resolved.transverse { 3 * n } else { n });
    for op in &ops.sz {
        obs.push(op);
    }
    if resolved.transverse {
        for op in &ops.sx {
            obs.push(op);
        }
        for op in &ops.sy {
            obs.push(op);
        }
    }
    match resolved.evolution.backend {
        Backend::Stepping => {
            let lab = LabHamiltonian::new(params, ops);
            let series = step_evolve(&lab, rho0, &resolved.evolution, &obs)?;
            Ok((series, false))
        }
        Backend::Spectral => {
            let h_f = rotating_frame(params, ops)?;
            let spectral = SpectralEvolution::new(&h_f, rho0)?;
            let times = resolved.evolution.sample_times(params.period());
            let series = spectral.expectation_series(&obs, &times)?;
            Ok((series, true))
        }
    }
}

/// Assembles the labeled series in T0 time units. `<S_j^z>` commutes with
/// the frame rotation, so the z rows are frame-independent; transverse
/// rows are rotated to the lab frame when they were measured rotating.
fn build_series(
    resolved: &ResolvedRun,
    exp: &ExpectationSeries,
    rotating_transverse: bool,
) -> Result<TimeSeries> {
    let params = &resolved.params;
    let n = params.n_sites;
    let s = params.spin.s();
    let period = params.period();

    let mut sz_rows = Vec::with_capacity(n);
    for j in 0..n {
        sz_rows.push(real_row(exp, j, Some(s))?);
    }
    let m = average_magnetization(&sz_rows);

    let mut labels = vec!["m".to_string()];
    let mut rows = vec![m];
    for (j, row) in sz_rows.into_iter().enumerate() {
        labels.push(format!("sz_site_{j}"));
        rows.push(row);
    }
    if resolved.transverse {
        for j in 0..n {
            let sx = real_row(exp, n + j, Some(s))?;
            let sy = real_row(exp, 2 * n + j, Some(s))?;
            let (sx_lab, sy_lab) = if rotating_transverse {
                transverse_lab_from_rotating(&sx, &sy, &exp.times, params.omega)
            } else {
                (sx, sy)
            };
            labels.push(format!("sx_site_{j}"));
            rows.push(sx_lab);
            labels.push(format!("sy_site_{j}"));
            rows.push(sy_lab);
        }
    }
    let times = exp.times.iter().map(|&t| t / period).collect();
    Ok(TimeSeries {
        times,
        labels,
        rows,
    })
}

/// The tail of a series with the first `discard_periods` drive periods
/// removed.
fn discard_tail(series: &TimeSeries, discard_periods: usize, spp: usize) -> TimeSeries {
    let skip = discard_periods * spp;
    TimeSeries {
        times: series.times[skip..].to_vec(),
        labels: series.labels.clone(),
        rows: series.rows.iter().map(|r| r[skip..].to_vec()).collect(),
    }
}

fn analyze(
    resolved: &ResolvedRun,
    ops: &ChainOperators,
    series: &TimeSeries,
) -> Result<(SpectrumResult, Option<SpectrumResult>, AnalysisReport)> {
    let params = &resolved.params;
    let tail = discard_tail(series, resolved.discard_periods, resolved.evolution.samples_per_period);

    let spectrum = dft(&tail, "m", resolved.window)?;
    let detection = detect_subharmonic(&spectrum, &resolved.detection);
    let f_analytic = f_dtc_analytic(params.b_drive, params.d_axial) / params.omega;

    let m_tail = tail.row("m").expect("m row always present");
    let f_env = detection.as_ref().map(|d| d.f_dtc).unwrap_or(f_analytic);
    let (envelope, envelope_note) = if f_env > 0.0 {
        match envelope_analysis(&tail.times, m_tail, f_env) {
            Ok(env) => {
                let decay = decay_time(&env);
                let status = if env.period.is_some() {
                    "ok".to_string()
                } else {
                    "period undetermined".to_string()
                };
                (
                    Some(EnvelopeReport {
                        t_dtc: env.t_dtc,
                        n_minima: env.minima_times.len(),
                        period: env.period,
                        ratio_t_over_tdtc: env.ratio_t_over_tdtc,
                        status,
                        decay_time: decay,
                    }),
                    None,
                )
            }
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, Some("no positive sub-harmonic frequency to track".into()))
    };

    let symmetry = if params.e_rhombic == 0.0 && params.b_drive > 0.0 {
        let h_f = rotating_frame(params, ops)?;
        let res = dynamical_symmetry_residual(params, ops, &h_f, 1)?;
        Some(SymmetryReport {
            lambda_pred: res.lambda_pred,
            residual_norm: res.residual_norm,
            normalized_residual: res.normalized_residual,
            warning: res.warning,
        })
    } else {
        None
    };

    let parseval = if resolved.window == Window::Rectangular {
        Some(parseval_deviation(m_tail, &spectrum))
    } else {
        None
    };

    let transverse_spectrum = if resolved.transverse {
        let n = params.n_sites;
        let sx_rows: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                tail.row(&format!("sx_site_{j}"))
                    .expect("transverse rows present")
                    .to_vec()
            })
            .collect();
        let mx = average_magnetization(&sx_rows);
        let step = tail.uniform_step()?;
        Some(crate::analysis::dft_row(step, &mx, resolved.window)?)
    } else {
        None
    };

    let report = AnalysisReport {
        f_dtc_analytic: f_analytic,
        chi_dtc: dtc_susceptibility(params.d_axial, params.b_drive),
        bin_width: spectrum.bin_width,
        detection_status: if detection.is_some() {
            "detected".to_string()
        } else {
            "no sub-harmonic detected".to_string()
        },
        detection: detection.map(|d| DetectionReport {
            f_dtc: d.f_dtc,
            peak_magnitude: d.peak_magnitude,
            bin_index: d.bin_index,
            threshold_ratio: d.threshold_ratio,
        }),
        envelope,
        envelope_note,
        symmetry,
        parseval_deviation: parseval,
        warnings: resolved.warnings.clone(),
    };
    Ok((spectrum, transverse_spectrum, report))
}

/// Runs the full pipeline (state prep, evolution, observables, analysis)
/// without touching the filesystem.
pub fn run_in_memory(resolved: &ResolvedRun) -> Result<RunProducts> {
    let ops = operators_for(&resolved.params)?;
    let rho0 = initial_state(resolved, &ops)?;
    let (exp, rotating_transverse) = evolve_observables(resolved, &ops, &rho0)?;
    let series = build_series(resolved, &exp, rotating_transverse)?;
    let (spectrum, transverse_spectrum, report) = analyze(resolved, &ops, &series)?;
    Ok(RunProducts {
        resolved: resolved.clone(),
        series,
        spectrum,
        transverse_spectrum,
        report,
    })
}

/// Report document written to `report.json`.
#[derive(Serialize)]
struct ReportDocument<'a> {
    schema_version: u32,
    config: &'a ResolvedRun,
    report: &'a AnalysisReport,
}

/// Writes a run's artifacts into `dir` per its output flags. Returns the
/// paths written.
pub fn write_artifacts(products: &RunProducts, config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let config_json = serde_json::to_string(&products.resolved)?;
    let mut written = Vec::new();
    if config.output.write_series {
        let path = dir.join("series.csv");
        output::write_series_csv(&path, &products.series, &config_json)?;
        written.push(path);
    }
    if config.output.write_spectrum {
        let path = dir.join("spectrum.csv");
        output::write_spectrum_csv(&path, &products.spectrum, &config_json)?;
        written.push(path);
        if let Some(tspec) = &products.transverse_spectrum {
            let path = dir.join("transverse_spectrum.csv");
            output::write_spectrum_csv(&path, tspec, &config_json)?;
            written.push(path);
        }
    }
    if config.output.write_report {
        let path = dir.join("report.json");
        output::write_json(
            &path,
            &ReportDocument {
                schema_version: output::SCHEMA_VERSION,
                config: &products.resolved,
                report: &products.report,
            },
        )?;
        written.push(path);
    }
    Ok(written)
}

/// A fully executed single run: products plus the files written.
pub struct ExecutedRun {
    pub products: RunProducts,
    pub directory: PathBuf,
    pub written: Vec<PathBuf>,
}

/// Resolves, runs, and writes one config. `out_override` is the CLI-level
/// directory override (it beats the environment variable and the config).
pub fn execute_run(config: &RunConfig, out_override: Option<&Path>) -> Result<ExecutedRun> {
    let resolved = config.resolve()?;
    let products = run_in_memory(&resolved)?;
    let dir = config.output_directory(out_override);
    let written = write_artifacts(&products, config, &dir)?;
    Ok(ExecutedRun {
        products,
        directory: dir,
        written,
    })
}

/// One row of the sweep summary.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// Point index in expansion order (last axis fastest).
    pub index: usize,
    /// Swept values, one per axis, rendered as TOML literals.
    pub axis_values: Vec<String>,
    pub detection_status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_dtc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_magnitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_t_over_tdtc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_time: Option<f64>,
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Renders the sweep summary CSV: one row per point, axis columns named by
/// their dotted paths.
pub fn sweep_summary_csv(sweep: &SweepConfig, rows: &[SweepRow]) -> String {
    let mut out = format!("# schema_version = {}\n", output::SCHEMA_VERSION);
    out.push_str("index");
    for axis in &sweep.axes {
        out.push(',');
        out.push_str(&axis.path);
    }
    out.push_str(
        ",detection_status,f_dtc,peak_magnitude,threshold_ratio,\
         envelope_period,ratio_t_over_tdtc,decay_time\n",
    );
    for row in rows {
        out.push_str(&row.index.to_string());
        for v in &row.axis_values {
            out.push(',');
            out.push_str(v);
        }
        out.push(',');
        out.push_str(&row.detection_status);
        for v in [
            row.f_dtc,
            row.peak_magnitude,
            row.threshold_ratio,
            row.envelope_period,
            row.ratio_t_over_tdtc,
            row.decay_time,
        ] {
            out.push(',');
            out.push_str(&opt_cell(v));
        }
        out.push('\n');
    }
    out
}

/// Executes every sweep point on a bounded worker pool, writing
/// `point_NNNN/` directories plus a `summary.csv` under the sweep's output
/// directory. Points are independent; results are collected in expansion
/// order regardless of scheduling.
pub fn execute_sweep(sweep: &SweepConfig, out_override: Option<&Path>) -> Result<Vec<SweepRow>> {
    let runs = crate::config::expand_sweep(sweep)?;
    let base_dir = sweep.base.output_directory(out_override);

    // Per-point swept values for the summary, in expansion order.
    let counts: Vec<usize> = sweep.axes.iter().map(|a| a.values.len()).collect();
    let value_strings = |index: usize| -> Vec<String> {
        let mut rem = index;
        let mut vals = vec![String::new(); counts.len()];
        for k in (0..counts.len()).rev() {
            let i = rem % counts[k];
            rem /= counts[k];
            vals[k] = sweep.axes[k].values[i].to_string();
        }
        vals
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep.parallelism.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    let rows: Result<Vec<SweepRow>> = pool.install(|| {
        runs.par_iter()
            .enumerate()
            .map(|(index, run)| {
                let resolved = run.resolve()?;
                let products = run_in_memory(&resolved)?;
                let dir = base_dir.join(format!("point_{index:04}"));
                write_artifacts(&products, run, &dir)?;
                let r = &products.report;
                Ok(SweepRow {
                    index,
                    axis_values: value_strings(index),
                    detection_status: r.detection_status.clone(),
                    f_dtc: r.detection.as_ref().map(|d| d.f_dtc),
                    peak_magnitude: r.detection.as_ref().map(|d| d.peak_magnitude),
                    threshold_ratio: r.detection.as_ref().map(|d| d.threshold_ratio),
                    envelope_period: r.envelope.as_ref().and_then(|e| e.period),
                    ratio_t_over_tdtc: r.envelope.as_ref().and_then(|e| e.ratio_t_over_tdtc),
                    decay_time: r.envelope.as_ref().and_then(|e| e.decay_time),
                })
            })
            .collect()
    });
    let rows = rows?;
    output::atomic_write(
        &base_dir.join("summary.csv"),
        sweep_summary_csv(sweep, &rows).as_bytes(),
    )?;
    Ok(rows)
}
