//! Spectral and envelope analysis of magnetization traces.
//!
//! Conventions: series times are in units of the drive period T0, so DFT
//! frequencies come out directly in units of the drive frequency
//! (cycles per T0 = f / omega). The bin width is 1 / duration; a
//! sub-harmonic claim is never sharper than that.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::single_smm_spectrum;
use crate::observables::TimeSeries;
use crate::spin::Spin;

/// Tapering applied before the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    /// No taper; Parseval-exact.
    #[default]
    Rectangular,
    /// Hann taper for sidelobe suppression at the cost of main-lobe width.
    Hann,
}

/// One-sided magnitude spectrum of a real series.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Bin frequencies in units of omega, `k * bin_width`, up to and
    /// including the Nyquist bin.
    pub freqs: Vec<f64>,
    /// `|X_k|` per bin.
    pub magnitudes: Vec<f64>,
    /// `1 / duration` in omega units.
    pub bin_width: f64,
}

/// Minimum sample count for a meaningful spectrum.
pub const MIN_DFT_SAMPLES: usize = 64;

/// One-sided DFT of a uniformly sampled real row. `step` is the sample
/// spacing in units of T0.
pub fn dft_row(step: f64, values: &[f64], window: Window) -> Result<SpectrumResult> {
    if values.len() < MIN_DFT_SAMPLES {
        return Err(Error::Analysis(format!(
            "need at least {MIN_DFT_SAMPLES} samples for a spectrum, got {}",
            values.len()
        )));
    }
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::Analysis(format!("invalid sample step {step}")));
    }
    let n = values.len();
    let mut buf: Vec<Complex<f64>> = match window {
        Window::Rectangular => values.iter().map(|&v| Complex::new(v, 0.0)).collect(),
        Window::Hann => values
            .iter()
            .enumerate()
            .map(|(t, &v)| {
                let w = 0.5
                    * (1.0 - (2.0 * std::f64::consts::PI * t as f64 / (n as f64 - 1.0)).cos());
                Complex::new(v * w, 0.0)
            })
            .collect(),
    };
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let bin_width = 1.0 / (n as f64 * step);
    let freqs = (0..=half).map(|k| k as f64 * bin_width).collect();
    let magnitudes = buf[..=half].iter().map(|z| z.norm()).collect();
    Ok(SpectrumResult {
        freqs,
        magnitudes,
        bin_width,
    })
}

/// One-sided DFT of a labeled row of a time series. Errors if the grid is
/// non-uniform or the label is unknown.
pub fn dft(series: &TimeSeries, label: &str, window: Window) -> Result<SpectrumResult> {
    let step = series.uniform_step()?;
    let row = series
        .row(label)
        .ok_or_else(|| Error::Analysis(format!("no series labeled '{label}'")))?;
    dft_row(step, row, window)
}

/// Sub-harmonic search parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DetectionOptions {
    /// Open frequency band searched, in omega units. The default brackets
    /// the period-doubling peak away from DC, envelope sidebands, and the
    /// drive harmonic.
    pub band: (f64, f64),
    /// Peak must exceed this multiple of the in-band median magnitude.
    pub threshold: f64,
}

impl Default for DetectionOptions {
    fn default() -> Self {
        DetectionOptions {
            band: (0.25, 0.75),
            threshold: 5.0,
        }
    }
}

/// A detected sub-harmonic peak.
#[derive(Debug, Clone, Copy)]
pub struct Detection {
    /// Peak frequency in omega units, refined by three-point quadratic
    /// interpolation around the winning bin.
    pub f_dtc: f64,
    /// Interpolated peak magnitude.
    pub peak_magnitude: f64,
    /// Index of the winning bin in the spectrum.
    pub bin_index: usize,
    /// Peak magnitude over in-band median magnitude.
    pub threshold_ratio: f64,
}

/// Finds the dominant in-band peak, or `None` when nothing exceeds the
/// median-based threshold (the negative-control outcome). Ties break
/// toward lower frequency.
pub fn detect_subharmonic(spec: &SpectrumResult, opts: &DetectionOptions) -> Option<Detection> {
    let (lo, hi) = opts.band;
    let in_band: Vec<usize> = (0..spec.freqs.len())
        .filter(|&k| spec.freqs[k] > lo && spec.freqs[k] < hi)
        .collect();
    if in_band.is_empty() {
        return None;
    }
    let mut best = in_band[0];
    for &k in &in_band[1..] {
        if spec.magnitudes[k] > spec.magnitudes[best] {
            best = k;
        }
    }
    let mut band_mags: Vec<f64> = in_band.iter().map(|&k| spec.magnitudes[k]).collect();
    band_mags.sort_by(|a, b| a.partial_cmp(b).expect("finite magnitudes"));
    let mid = band_mags.len() / 2;
    let median = if band_mags.len() % 2 == 1 {
        band_mags[mid]
    } else {
        0.5 * (band_mags[mid - 1] + band_mags[mid])
    };
    let peak = spec.magnitudes[best];
    let ratio = if median > 0.0 {
        peak / median
    } else if peak > 0.0 {
        f64::INFINITY
    } else {
        return None;
    };
    if ratio <= opts.threshold {
        return None;
    }

    // Quadratic refinement needs both neighbors; at a spectrum edge fall
    // back to the raw bin.
    let (mut f, mut magnitude) = (spec.freqs[best], peak);
    if best > 0 && best + 1 < spec.magnitudes.len() {
        let a = spec.magnitudes[best - 1];
        let b = spec.magnitudes[best];
        let c = spec.magnitudes[best + 1];
        let denom = a - 2.0 * b + c;
        if denom.abs() > 1e-300 {
            let delta = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
            f += delta * spec.bin_width;
            magnitude = b - 0.25 * (a - c) * delta;
        }
    }
    Some(Detection {
        f_dtc: f,
        peak_magnitude: magnitude,
        bin_index: best,
        threshold_ratio: ratio,
    })
}

/// Closed-form S = 1 sub-harmonic frequency
/// `f = sqrt(B^2 + (D/2)^2) - D/2` (same units as B and D).
pub fn f_dtc_analytic(b: f64, d: f64) -> f64 {
    (b * b + 0.25 * d * d).sqrt() - 0.5 * d
}

/// General-S sub-harmonic frequency: the gap between the two lowest
/// levels of the single-molecule rotating-frame Hamiltonian.
pub fn f_dtc_gap(spin: Spin, d: f64, b: f64) -> Result<f64> {
    Ok(single_smm_spectrum(spin, d, b)?.gap)
}

/// `d f_DTC / d B = B / sqrt(B^2 + (D/2)^2)`, evaluated at the supplied
/// field; approaches 1 for B >> D.
pub fn dtc_susceptibility(d: f64, b: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    b / (b * b + 0.25 * d * d).sqrt()
}

/// Envelope of a sub-harmonic oscillation: per-DTC-period maxima of |m|,
/// their minima structure, and the resulting envelope period.
#[derive(Debug, Clone)]
pub struct EnvelopeResult {
    /// Window centers, units of T0.
    pub envelope_times: Vec<f64>,
    /// `max |m|` within each window; nonnegative.
    pub envelope_values: Vec<f64>,
    /// Times of envelope minima (plateaus collapse to their midpoint).
    pub minima_times: Vec<f64>,
    /// Mean spacing between successive minima; `None` when fewer than two
    /// minima exist (undetermined, e.g. a run shorter than one envelope
    /// cycle).
    pub period: Option<f64>,
    /// `period / T_DTC`.
    pub ratio_t_over_tdtc: Option<f64>,
    /// The DTC period used for windowing, units of T0.
    pub t_dtc: f64,
}

/// Computes the envelope of `values` over `times` (T0 units) given the
/// detected sub-harmonic frequency (omega units). Requires at least 20
/// DTC periods of data.
pub fn envelope_analysis(times: &[f64], values: &[f64], f_dtc: f64) -> Result<EnvelopeResult> {
    if !(f_dtc > 0.0) {
        return Err(Error::Analysis(format!(
            "envelope analysis needs a positive f_dtc, got {f_dtc}"
        )));
    }
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::Analysis(
            "times and values must have equal length >= 2".into(),
        ));
    }
    let t_dtc = 1.0 / f_dtc;
    let t0 = times[0];
    let duration = times[times.len() - 1] - t0;
    if duration < 20.0 * t_dtc {
        return Err(Error::Analysis(format!(
            "envelope analysis needs >= 20 DTC periods, have {:.1}",
            duration / t_dtc
        )));
    }
    let n_windows = (duration / t_dtc).floor() as usize;
    let mut maxima = vec![f64::NEG_INFINITY; n_windows];
    for (k, &t) in times.iter().enumerate() {
        let idx = ((t - t0) / t_dtc).floor() as usize;
        if idx < n_windows {
            maxima[idx] = maxima[idx].max(values[k].abs());
        }
    }
    let mut envelope_times = Vec::with_capacity(n_windows);
    let mut envelope_values = Vec::with_capacity(n_windows);
    for (i, &v) in maxima.iter().enumerate() {
        if v > f64::NEG_INFINITY {
            envelope_times.push(t0 + (i as f64 + 0.5) * t_dtc);
            envelope_values.push(v);
        }
    }

    let minima_times = local_minima(&envelope_times, &envelope_values);
    let period = if minima_times.len() >= 2 {
        let spacings: Vec<f64> = minima_times.windows(2).map(|w| w[1] - w[0]).collect();
        Some(spacings.iter().sum::<f64>() / spacings.len() as f64)
    } else {
        None
    };
    Ok(EnvelopeResult {
        envelope_times,
        envelope_values,
        minima_times,
        period,
        ratio_t_over_tdtc: period.map(|p| p / t_dtc),
        t_dtc,
    })
}

/// Strict local minima with plateau handling: a run of equal values counts
/// as one minimum at the plateau's temporal midpoint, provided both
/// flanks rise. Series ends never count.
fn local_minima(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i] < values[i - 1] {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] > values[i] {
                out.push(0.5 * (times[i] + times[j]));
                i = j + 1;
                continue;
            }
            i = j + 1;
            continue;
        }
        i += 1;
    }
    out
}

/// First time the envelope falls below `peak / e` after its peak,
/// linearly interpolated between envelope samples; `None` when the
/// envelope never crosses within the run.
pub fn decay_time(envelope: &EnvelopeResult) -> Option<f64> {
    let v = &envelope.envelope_values;
    let t = &envelope.envelope_times;
    if v.is_empty() {
        return None;
    }
    let mut peak = 0;
    for i in 1..v.len() {
        if v[i] > v[peak] {
            peak = i;
        }
    }
    let target = v[peak] / std::f64::consts::E;
    for i in peak + 1..v.len() {
        if v[i] < target {
            let (t0, t1) = (t[i - 1], t[i]);
            let (v0, v1) = (v[i - 1], v[i]);
            // v0 >= target > v1 along this segment.
            return Some(t0 + (v0 - target) / (v0 - v1) * (t1 - t0));
        }
    }
    None
}

/// Parseval check for a rectangular-window spectrum against its source
/// series: `sum_t x_t^2 = (|X_0|^2 + |X_{N/2}|^2 + 2 sum |X_k|^2) / N`
/// (even N). Returns the relative deviation.
pub fn parseval_deviation(values: &[f64], spec: &SpectrumResult) -> f64 {
    let n = values.len();
    let time_energy: f64 = values.iter().map(|v| v * v).sum();
    let m = &spec.magnitudes;
    let mut freq_energy = m[0] * m[0];
    let last = m.len() - 1;
    let nyquist_doubled = n % 2 == 1; // odd N: no self-conjugate Nyquist bin
    for (k, &mag) in m.iter().enumerate().skip(1) {
        let w = if k == last && !nyquist_doubled { 1.0 } else { 2.0 };
        freq_energy += w * mag * mag;
    }
    freq_energy /= n as f64;
    (time_energy - freq_energy).abs() / time_energy.max(f64::MIN_POSITIVE)
}

/// Convenience: spectrum magnitudes of a complex series row (used for
/// rotating-frame transverse components). Not part of the real-series
/// contract; shares the bin conventions.
pub fn dft_complex_magnitude(step: f64, values: &[C64]) -> Result<SpectrumResult> {
    if values.len() < MIN_DFT_SAMPLES {
        return Err(Error::Analysis(format!(
            "need at least {MIN_DFT_SAMPLES} samples for a spectrum, got {}",
            values.len()
        )));
    }
    let n = values.len();
    let mut buf: Vec<Complex<f64>> = values.iter().map(|z| Complex::new(z.re, z.im)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let bin_width = 1.0 / (n as f64 * step);
    Ok(SpectrumResult {
        freqs: (0..=half).map(|k| k as f64 * bin_width).collect(),
        magnitudes: buf[..=half].iter().map(|z| z.norm()).collect(),
        bin_width,
    })
}
