//! Frequency-domain post-processing.
//!
//! The measured series p(n), n = 0..N, is symmetric under n → −n, so its
//! 2N+1-point DFT is a real cosine series. Bin k maps to energy
//! 2πk/((2N+1)Δ); spectral lines of the signal sit at eigenenergy gaps.
//! Detection thresholds come from the shot-noise bound σ ≤ 1/√(2NM) or
//! from a half-normal median fit of the spectrum itself.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{MqteError, Result};
use crate::sampling::SignalSeries;

/// Median of |X| for X ~ N(0, 1); divides a median into a sigma estimate.
const HALF_NORMAL_MEDIAN: f64 = 0.674_489_750_196_081_7;

/// Series length below which the direct cosine sum beats FFT setup cost.
const FFT_CUTOFF: usize = 64;

/// Magnitude floor for peak reporting when no noise threshold applies.
const ZERO_SIGMA_FLOOR: f64 = 1e-12;

/// Largest plannable grid extent; matches the stream-index cap upstream.
const MAX_PLANNED_POINTS: usize = (1 << 28) - 1;

/// Cosine coefficients F(k), k = 0..N, of the even extension of a signal.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub delta: f64,
    /// Grid extent N; the implicit transform length is 2N+1.
    pub n_points: usize,
    /// F(k); the DC bin F(0) is the series mean.
    pub coeffs: Vec<f64>,
}

impl Spectrum {
    /// Frequency variable x_k = k/((2N+1)Δ).
    pub fn x_at(&self, k: usize) -> f64 {
        k as f64 / ((2 * self.n_points + 1) as f64 * self.delta)
    }

    /// Energy gap 2π·x_k at bin k.
    pub fn gap_at(&self, k: usize) -> f64 {
        gap_from_bin(k, self.n_points, self.delta)
    }

    /// Signed line amplitude 2F(k).
    pub fn amplitude(&self, k: usize) -> f64 {
        2.0 * self.coeffs[k]
    }

    /// |2F(k)|.
    pub fn magnitude(&self, k: usize) -> f64 {
        self.amplitude(k).abs()
    }

    /// Energy width of one bin, 2π/((2N+1)Δ).
    pub fn bin_width(&self) -> f64 {
        bin_width(self.n_points, self.delta)
    }
}

/// One detected spectral line.
#[derive(Debug, Clone, Serialize)]
pub struct PeakReport {
    /// DFT bin index, ≥ 1.
    pub bin: usize,
    /// Energy gap 2πk/((2N+1)Δ).
    pub gap: f64,
    /// Signed 2F(k).
    pub amplitude: f64,
    /// |2F(k)|.
    pub magnitude: f64,
    /// magnitude/(2σ); absent when detection ran without a noise scale.
    pub significance: Option<f64>,
    /// The σ the detection threshold was built from.
    pub sigma_used: f64,
}

/// DFT of the even extension of `series`.
pub fn dft_real_even(series: &SignalSeries) -> Result<Spectrum> {
    dft_from_values(&series.values, series.delta)
}

/// DFT of the even extension of raw values p(0..=N) at spacing `delta`.
pub fn dft_from_values(values: &[f64], delta: f64) -> Result<Spectrum> {
    check_input(values, delta)?;
    let length = 2 * values.len() - 1;
    let coeffs = if length < FFT_CUTOFF {
        direct_cosine_transform(values)
    } else {
        fft_cosine_transform(values)?
    };
    Ok(Spectrum {
        delta,
        n_points: values.len() - 1,
        coeffs,
    })
}

/// Direct cosine-sum evaluation of the same transform. Slow reference
/// path with exact integer phase reduction; used to cross-check the FFT.
pub fn dft_reference(values: &[f64], delta: f64) -> Result<Spectrum> {
    check_input(values, delta)?;
    Ok(Spectrum {
        delta,
        n_points: values.len() - 1,
        coeffs: direct_cosine_transform(values),
    })
}

fn check_input(values: &[f64], delta: f64) -> Result<()> {
    if values.is_empty() {
        return Err(MqteError::invalid("empty signal".to_string()));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(MqteError::invalid(format!(
            "sample spacing must be positive and finite, got {delta}"
        )));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(MqteError::invalid(format!(
            "non-finite signal value {bad}"
        )));
    }
    Ok(())
}

fn direct_cosine_transform(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    let length = 2 * n + 1;
    // Phase k·n mod (2N+1) stays exact in integers; one shared cosine table
    // avoids accumulation error across bins.
    let table: Vec<f64> = (0..length)
        .map(|m| (2.0 * std::f64::consts::PI * m as f64 / length as f64).cos())
        .collect();
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc = values[0];
        for (i, &v) in values.iter().enumerate().skip(1) {
            acc += 2.0 * v * table[(k * i) % length];
        }
        coeffs.push(acc / length as f64);
    }
    coeffs
}

fn fft_cosine_transform(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len() - 1;
    let length = 2 * n + 1;
    let mut buf = vec![Complex64::new(0.0, 0.0); length];
    for (i, &v) in values.iter().enumerate() {
        buf[i].re = v;
        if i > 0 {
            buf[length - i].re = v;
        }
    }
    FftPlanner::new().plan_fft_forward(length).process(&mut buf);
    let scale: f64 = values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    let mut coeffs = Vec::with_capacity(n + 1);
    for b in buf.iter().take(n + 1) {
        // A real even input makes every bin real; residue beyond rounding
        // error means the transform itself is broken.
        if b.im.abs() > 1e-9 * scale {
            return Err(MqteError::invalid(format!(
                "imaginary residue {} in real-even transform",
                b.im
            )));
        }
        coeffs.push(b.re / length as f64);
    }
    Ok(coeffs)
}

/// Inverse transform; returns the full extended series of length 2N+1,
/// index m ∈ 0..=2N holding time index n = m for m ≤ N and n = m−(2N+1)
/// (negative times) above.
pub fn reconstruct_series(spectrum: &Spectrum) -> Vec<f64> {
    let n = spectrum.n_points;
    let length = 2 * n + 1;
    let mut out = Vec::with_capacity(length);
    for m in 0..length {
        let mut acc = spectrum.coeffs[0];
        for (k, &f) in spectrum.coeffs.iter().enumerate().skip(1) {
            acc += 2.0 * f * (2.0 * std::f64::consts::PI * ((k * m) % length) as f64
                / length as f64)
                .cos();
        }
        out.push(acc);
    }
    out
}

/// Energy gap at bin k: 2πk/((2N+1)Δ).
pub fn gap_from_bin(k: usize, n_points: usize, delta: f64) -> f64 {
    2.0 * std::f64::consts::PI * k as f64 / ((2 * n_points + 1) as f64 * delta)
}

/// Energy width of one bin.
pub fn bin_width(n_points: usize, delta: f64) -> f64 {
    gap_from_bin(1, n_points, delta)
}

/// Where a gap above the folding edge π/Δ lands: the angle θ = gap·Δ is
/// reduced mod 2π and reflected into [0, π] before mapping back to energy.
pub fn fold_gap(gap: f64, delta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let theta = (gap * delta).rem_euclid(two_pi);
    theta.min(two_pi - theta) / delta
}

/// Grid plan for a target gap accuracy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingPlan {
    /// N = ⌈π/(Δ·ε)⌉.
    pub n_points: usize,
    /// Folding edge π/Δ: gaps above it alias back into band.
    pub nyquist: f64,
    pub aliasing: Option<AliasDiagnostic>,
}

/// Raised when the declared largest gap cannot sit inside the band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AliasDiagnostic {
    pub max_gap: f64,
    /// Apparent position of `max_gap` after folding.
    pub folded_gap: f64,
}

/// Pick N so the bin width is at most ε, flagging aliasing risk when the
/// caller declares a maximum spectral gap that violates Δ < π/max_gap.
pub fn plan_sampling(delta: f64, epsilon: f64, max_gap: Option<f64>) -> Result<SamplingPlan> {
    if !(delta.is_finite() && delta > 0.0) || !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(MqteError::invalid(format!(
            "sample spacing and accuracy must be positive, got Δ={delta}, ε={epsilon}"
        )));
    }
    let raw = std::f64::consts::PI / (delta * epsilon);
    // Targets that are integral up to rounding error snap instead of
    // spilling into one extra point.
    let nearest = raw.round();
    let n_real = if (raw - nearest).abs() < 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    if n_real > MAX_PLANNED_POINTS as f64 {
        return Err(MqteError::TooLarge {
            what: "planned time points",
            cap: MAX_PLANNED_POINTS,
            got: n_real.min(usize::MAX as f64) as usize,
        });
    }
    let n_points = n_real as usize;
    let nyquist = std::f64::consts::PI / delta;
    let aliasing = max_gap.and_then(|g| {
        if delta >= std::f64::consts::PI / g {
            Some(AliasDiagnostic {
                max_gap: g,
                folded_gap: fold_gap(g, delta),
            })
        } else {
            None
        }
    });
    Ok(SamplingPlan {
        n_points,
        nyquist,
        aliasing,
    })
}

/// Upper bound 1/√(2NM) on the frequency-domain noise σ; 0 in exact mode.
pub fn noise_sigma_bound(n_points: usize, shots: u64) -> f64 {
    if shots == 0 {
        return 0.0;
    }
    1.0 / (2.0 * n_points as f64 * shots as f64).sqrt()
}

/// σ estimated from the spectrum itself: the median of |2F(k)|, k ≥ 1,
/// read through the half-normal quantile, on the same scale as
/// `noise_sigma_bound`. Robust while peaks occupy few bins.
pub fn empirical_sigma(spectrum: &Spectrum) -> f64 {
    let mut mags: Vec<f64> = (1..spectrum.coeffs.len())
        .map(|k| spectrum.magnitude(k))
        .collect();
    if mags.is_empty() {
        return 0.0;
    }
    mags.sort_by(f64::total_cmp);
    let mid = mags.len() / 2;
    let median = if mags.len() % 2 == 1 {
        mags[mid]
    } else {
        0.5 * (mags[mid - 1] + mags[mid])
    };
    median / HALF_NORMAL_MEDIAN / 2.0
}

/// Find spectral lines: bins with |2F(k)| strictly above multiplier·(2σ),
/// k ≥ 1, runs of adjacent qualifying bins merged at their largest bin.
/// With σ = 0 every strict local maximum above a 1e-12 floor is reported.
/// Sorted by magnitude descending.
pub fn detect_peaks(spectrum: &Spectrum, sigma: f64, multiplier: f64) -> Result<Vec<PeakReport>> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(MqteError::invalid(format!("sigma must be ≥ 0, got {sigma}")));
    }
    if !(multiplier.is_finite() && multiplier > 0.0) {
        return Err(MqteError::invalid(format!(
            "threshold multiplier must be positive, got {multiplier}"
        )));
    }
    let n = spectrum.n_points;
    let mut bins: Vec<usize> = Vec::new();
    if sigma > 0.0 {
        let threshold = multiplier * 2.0 * sigma;
        let mut run_best: Option<usize> = None;
        for k in 1..=n {
            if spectrum.magnitude(k) > threshold {
                run_best = Some(match run_best {
                    Some(b) if spectrum.magnitude(b) >= spectrum.magnitude(k) => b,
                    _ => k,
                });
            } else if let Some(b) = run_best.take() {
                bins.push(b);
            }
        }
        if let Some(b) = run_best {
            bins.push(b);
        }
    } else {
        for k in 1..=n {
            let m = spectrum.magnitude(k);
            let left = spectrum.magnitude(k - 1);
            let right = if k < n { spectrum.magnitude(k + 1) } else { f64::NEG_INFINITY };
            if m > ZERO_SIGMA_FLOOR && m > left && m > right {
                bins.push(k);
            }
        }
    }
    bins.sort_by(|&a, &b| {
        spectrum
            .magnitude(b)
            .total_cmp(&spectrum.magnitude(a))
            .then(a.cmp(&b))
    });
    Ok(bins
        .into_iter()
        .map(|k| PeakReport {
            bin: k,
            gap: spectrum.gap_at(k),
            amplitude: spectrum.amplitude(k),
            magnitude: spectrum.magnitude(k),
            significance: if sigma > 0.0 {
                Some(spectrum.magnitude(k) / (2.0 * sigma))
            } else {
                None
            },
            sigma_used: sigma,
        })
        .collect())
}
