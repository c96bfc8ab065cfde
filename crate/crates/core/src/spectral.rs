//! Peak frequencies of sampled signals.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::Error;

const PAD_FACTOR: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub frequency: f64,
    pub magnitude: f64,
}

/// Removes the least-squares line from `signal`.
pub fn detrend(signal: &[f64]) -> Vec<f64> {
    let n = signal.len() as f64;
    if signal.len() < 2 {
        return vec![0.0; signal.len()];
    }
    let t_mean = (n - 1.0) / 2.0;
    let y_mean = signal.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (k, y) in signal.iter().enumerate() {
        let dt = k as f64 - t_mean;
        sxy += dt * (y - y_mean);
        sxx += dt * dt;
    }
    let slope = sxy / sxx;
    signal.iter().enumerate().map(|(k, y)| y - y_mean - slope * (k as f64 - t_mean)).collect()
}

/// One-sided magnitude spectrum of the detrended, Hann-windowed and
/// zero-padded signal. Returns `(frequencies, magnitudes)`.
pub fn amplitude_spectrum(signal: &[f64], dt: f64) -> (Vec<f64>, Vec<f64>) {
    let n = signal.len();
    let len = (n.max(2)).next_power_of_two() * PAD_FACTOR;
    let detrended = detrend(signal);
    let mut buf: Vec<Complex<f64>> = detrended
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (n.max(2) - 1) as f64).cos();
            Complex::new(v * w, 0.0)
        })
        .collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let half = len / 2 + 1;
    let freqs = (0..half).map(|k| k as f64 / (len as f64 * dt)).collect();
    let mags = buf[..half].iter().map(|c| c.norm()).collect();
    (freqs, mags)
}

/// Local spectral maxima above five times the median magnitude, strongest
/// first, located by a parabola through the log magnitudes.
pub fn spectral_peaks(signal: &[f64], dt: f64) -> Vec<Peak> {
    let (freqs, mags) = amplitude_spectrum(signal, dt);
    let mut sorted = mags.clone();
    sorted.sort_by(f64::total_cmp);
    let floor = 5.0 * sorted[sorted.len() / 2];
    let df = freqs[1] - freqs[0];
    let mut peaks: Vec<Peak> = (1..mags.len() - 1)
        .filter(|&k| mags[k] > floor && mags[k] > 0.0 && mags[k] >= mags[k - 1] && mags[k] > mags[k + 1])
        .map(|k| {
            let (a, b, c) = (mags[k - 1].max(1e-300).ln(), mags[k].ln(), mags[k + 1].max(1e-300).ln());
            let denom = a - 2.0 * b + c;
            let shift = if denom < 0.0 { (0.5 * (a - c) / denom).clamp(-0.5, 0.5) } else { 0.0 };
            Peak { frequency: freqs[k] + shift * df, magnitude: (b - 0.25 * (a - c) * shift).exp() }
        })
        .collect();
    peaks.sort_by(|p, q| q.magnitude.total_cmp(&p.magnitude));
    peaks
}

/// Frequency of the strongest spectral peak.
pub fn dominant_frequency(signal: &[f64], dt: f64) -> Result<f64, Error> {
    spectral_peaks(signal, dt).first().map(|p| p.frequency).ok_or(Error::NoSpectralPeak { samples: signal.len() })
}

/// Strongest peak with frequency inside `[lo, hi]`.
pub fn peak_in_band(signal: &[f64], dt: f64, lo: f64, hi: f64) -> Option<Peak> {
    spectral_peaks(signal, dt).into_iter().find(|p| p.frequency >= lo && p.frequency <= hi)
}
