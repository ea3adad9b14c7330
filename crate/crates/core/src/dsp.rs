//! Anti-aliased downsampling and linear-phase FIR bandpass filtering.
//!
//! The bandpass is a Hamming windowed-sinc design with two adjustments:
//! the coefficient mean is subtracted so the DC gain is exactly zero (a
//! plain windowed sinc leaks noticeable DC when the lower cutoff sits close
//! to 0 Hz), and the result is scaled to unit gain at the band center.
//! Both adjustments preserve coefficient symmetry, so the filter stays
//! linear-phase and group delay is exactly (taps-1)/2 samples.

use std::f64::consts::PI;

use thiserror::Error;

use crate::signal::{EcgRecording, ValidityMask};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DspError {
    #[error("invalid band: need 0 < lo < hi < fs/2")]
    InvalidBand,
    #[error("tap count must be odd")]
    EvenTaps,
    #[error("tap count must be at least 3")]
    TooFewTaps,
    #[error("signal shorter than the filter ({len} < {taps})")]
    SignalTooShort { len: usize, taps: usize },
    #[error("source rate {source_fs} Hz is not an integer multiple of {target_fs} Hz")]
    NonIntegerFactor { source_fs: u32, target_fs: u32 },
}

/// A linear-phase FIR filter with its design metadata.
#[derive(Debug, Clone)]
pub struct FirFilter {
    pub coefficients: Vec<f64>,
    pub cutoff_low: f64,
    pub cutoff_high: f64,
    pub sample_rate: u32,
}

impl FirFilter {
    pub fn taps(&self) -> usize {
        self.coefficients.len()
    }

    /// Group delay in samples, (taps-1)/2 for a Type-I filter.
    pub fn group_delay(&self) -> usize {
        (self.taps() - 1) / 2
    }

    /// Magnitude response at `freq_hz`, evaluated by direct DFT of the
    /// coefficients.
    pub fn gain_at(&self, freq_hz: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / f64::from(self.sample_rate);
        let mut re = 0.0;
        let mut im = 0.0;
        for (n, c) in self.coefficients.iter().enumerate() {
            re += c * (w * n as f64).cos();
            im -= c * (w * n as f64).sin();
        }
        (re * re + im * im).sqrt()
    }
}

fn hamming(n: usize, len: usize) -> f64 {
    0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos()
}

/// sin(w*x)/(pi*x) with the x=0 limit.
fn sinc_term(w: f64, x: f64) -> f64 {
    if x == 0.0 {
        w / PI
    } else {
        (w * x).sin() / (PI * x)
    }
}

fn check_taps(taps: usize) -> Result<(), DspError> {
    if taps % 2 == 0 {
        return Err(DspError::EvenTaps);
    }
    if taps < 3 {
        return Err(DspError::TooFewTaps);
    }
    Ok(())
}

/// Designs a Hamming windowed-sinc bandpass with exactly zero DC gain and
/// unit gain at the arithmetic band center.
pub fn design_fir_bandpass(taps: usize, lo: f64, hi: f64, fs: u32) -> Result<FirFilter, DspError> {
    check_taps(taps)?;
    let nyquist = f64::from(fs) / 2.0;
    if !(lo > 0.0 && lo < hi && hi < nyquist) {
        return Err(DspError::InvalidBand);
    }
    let w_lo = 2.0 * PI * lo / f64::from(fs);
    let w_hi = 2.0 * PI * hi / f64::from(fs);
    let mid = (taps - 1) as f64 / 2.0;
    let mut coeffs: Vec<f64> = (0..taps)
        .map(|n| {
            let x = n as f64 - mid;
            (sinc_term(w_hi, x) - sinc_term(w_lo, x)) * hamming(n, taps)
        })
        .collect();

    // Zero the DC gain exactly; subtracting a constant keeps symmetry.
    let mean = coeffs.iter().sum::<f64>() / taps as f64;
    for c in coeffs.iter_mut() {
        *c -= mean;
    }

    let mut filter = FirFilter {
        coefficients: coeffs,
        cutoff_low: lo,
        cutoff_high: hi,
        sample_rate: fs,
    };
    let center_gain = filter.gain_at((lo + hi) / 2.0);
    for c in filter.coefficients.iter_mut() {
        *c /= center_gain;
    }
    Ok(filter)
}

/// Designs a Hamming windowed-sinc lowpass with unit DC gain.
pub fn design_fir_lowpass(taps: usize, cutoff: f64, fs: u32) -> Result<FirFilter, DspError> {
    check_taps(taps)?;
    let nyquist = f64::from(fs) / 2.0;
    if !(cutoff > 0.0 && cutoff < nyquist) {
        return Err(DspError::InvalidBand);
    }
    let w_c = 2.0 * PI * cutoff / f64::from(fs);
    let mid = (taps - 1) as f64 / 2.0;
    let mut coeffs: Vec<f64> = (0..taps)
        .map(|n| {
            let x = n as f64 - mid;
            sinc_term(w_c, x) * hamming(n, taps)
        })
        .collect();
    let sum: f64 = coeffs.iter().sum();
    for c in coeffs.iter_mut() {
        *c /= sum;
    }
    Ok(FirFilter {
        coefficients: coeffs,
        cutoff_low: 0.0,
        cutoff_high: cutoff,
        sample_rate: fs,
    })
}

#[derive(Clone, Copy)]
enum Padding {
    Zero,
    Replicate,
}

/// Same-length convolution with group-delay compensation: output sample i
/// aligns with input sample i, so fiducial timing survives filtering.
fn convolve_same(signal: &[f64], coeffs: &[f64], padding: Padding) -> Vec<f64> {
    let n = signal.len();
    let taps = coeffs.len();
    let delay = (taps - 1) / 2;
    let fetch = |j: isize| -> f64 {
        if j < 0 {
            match padding {
                Padding::Zero => 0.0,
                Padding::Replicate => signal[0],
            }
        } else if j as usize >= n {
            match padding {
                Padding::Zero => 0.0,
                Padding::Replicate => signal[n - 1],
            }
        } else {
            signal[j as usize]
        }
    };
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let base = i as isize + delay as isize;
        let mut acc = 0.0;
        for (k, c) in coeffs.iter().enumerate() {
            acc += c * fetch(base - k as isize);
        }
        *o = acc;
    }
    out
}

/// Applies a FIR filter with zero-padded edges and group-delay compensation.
///
/// The first and last `(taps-1)/2` output samples are edge warm-up; callers
/// doing beat detection should not trust fiducials inside that margin.
pub fn apply_fir(signal: &[f64], filter: &FirFilter) -> Result<Vec<f64>, DspError> {
    if signal.len() < filter.taps() {
        return Err(DspError::SignalTooShort {
            len: signal.len(),
            taps: filter.taps(),
        });
    }
    Ok(convolve_same(signal, &filter.coefficients, Padding::Zero))
}

/// Anti-alias lowpass tap count for an integer decimation factor; sized so
/// the transition band fits between 0.45x and 0.5x the target rate.
fn antialias_taps(factor: u32) -> usize {
    (48 * factor + 1) as usize
}

/// Downsamples a recording by an integer factor after anti-alias filtering
/// at 0.45x the target rate. The validity mask is decimated with AND over
/// each group of source samples.
pub fn downsample(recording: &EcgRecording, target_fs: u32) -> Result<EcgRecording, DspError> {
    recording.assert_well_formed();
    let fs = recording.sample_rate;
    if target_fs == 0 || fs % target_fs != 0 {
        return Err(DspError::NonIntegerFactor {
            source_fs: fs,
            target_fs,
        });
    }
    let factor = fs / target_fs;
    if factor == 1 {
        return Ok(recording.clone());
    }
    let lowpass = design_fir_lowpass(antialias_taps(factor), 0.45 * f64::from(target_fs), fs)
        .expect("anti-alias design is valid by construction");
    // Replicate-padding keeps constant signals exactly constant through the
    // resampler, including at the edges.
    let filtered = if recording.is_empty() {
        Vec::new()
    } else {
        convolve_same(&recording.samples, &lowpass.coefficients, Padding::Replicate)
    };

    let factor = factor as usize;
    let out_len = recording.len().div_ceil(factor);
    let mut samples = Vec::with_capacity(out_len);
    let mut validity = Vec::with_capacity(out_len);
    for i in 0..out_len {
        samples.push(filtered[i * factor]);
        let group_end = ((i + 1) * factor).min(recording.len());
        validity.push(recording.validity.0[i * factor..group_end].iter().all(|&v| v));
    }
    Ok(EcgRecording {
        samples,
        sample_rate: target_fs,
        subject_id: recording.subject_id.clone(),
        day_index: recording.day_index,
        start_offset: recording.start_offset,
        validity: ValidityMask(validity),
    })
}
