//! Mel-frequency cepstral coefficients.
//!
//! Frame blocking → Hamming window → radix-2 FFT → power spectrum → triangular
//! mel filterbank → natural log → DCT, keeping coefficients `1..=num_ceps`
//! (`c₀` is dropped). An utterance is summarized by the per-coefficient mean
//! followed by the per-coefficient standard deviation across frames.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ingest::AudioRecord;
use crate::linalg::{Matrix, Vector};

/// Filterbank energies are floored here before taking the log.
pub const ENERGY_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct MfccConfig {
    pub frame_ms: f64,
    pub shift_ms: f64,
    /// `None`: smallest power of two holding one frame.
    pub fft_size: Option<usize>,
    pub num_filters: usize,
    pub num_ceps: usize,
    pub fmin_hz: f64,
    /// `None`: half the sample rate.
    pub fmax_hz: Option<f64>,
}

impl Default for MfccConfig {
    fn default() -> Self {
        MfccConfig {
            frame_ms: 25.0,
            shift_ms: 10.0,
            fft_size: None,
            num_filters: 20,
            num_ceps: 12,
            fmin_hz: 0.0,
            fmax_hz: None,
        }
    }
}

/// A config resolved against a concrete sample rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameGeometry {
    pub sample_rate: u32,
    pub frame_len: usize,
    pub shift: usize,
    pub fft_size: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
}

impl MfccConfig {
    pub fn geometry(&self, sample_rate: u32) -> Result<FrameGeometry> {
        let sr = sample_rate as f64;
        let frame_len = (self.frame_ms * sr / 1000.0).round() as usize;
        let shift = (self.shift_ms * sr / 1000.0).round() as usize;
        if frame_len < 2 {
            return Err(Error::domain(format!(
                "frame of {} ms is shorter than 2 samples at {sample_rate} Hz",
                self.frame_ms
            )));
        }
        if shift < 1 {
            return Err(Error::domain("frame shift must be at least one sample"));
        }
        let fft_size = match self.fft_size {
            Some(n) => {
                if !n.is_power_of_two() {
                    return Err(Error::Size(n));
                }
                if n < frame_len {
                    return Err(Error::domain(format!(
                        "fft size {n} is smaller than the {frame_len}-sample frame"
                    )));
                }
                n
            }
            None => frame_len.next_power_of_two(),
        };
        if self.num_ceps == 0 || self.num_ceps >= self.num_filters {
            return Err(Error::domain(format!(
                "need 1 <= num_ceps < num_filters, got {} and {}",
                self.num_ceps, self.num_filters
            )));
        }
        let nyquist = sr / 2.0;
        let fmax = self.fmax_hz.unwrap_or(nyquist);
        if !(self.fmin_hz >= 0.0 && self.fmin_hz < fmax && fmax <= nyquist) {
            return Err(Error::domain(format!(
                "need 0 <= fmin < fmax <= {nyquist}, got {} and {fmax}",
                self.fmin_hz
            )));
        }
        Ok(FrameGeometry {
            sample_rate,
            frame_len,
            shift,
            fft_size,
            fmin_hz: self.fmin_hz,
            fmax_hz: fmax,
        })
    }
}

/// `h(n) = 0.54 − 0.46·cos(2πn / (N − 1))`
pub fn hamming(n: usize, len: usize) -> Result<f64> {
    if len < 2 || n >= len {
        return Err(Error::Index { index: n, len });
    }
    Ok(0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos())
}

fn hamming_window(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| hamming(n, len).expect("n < len"))
        .collect()
}

pub fn frame_count(num_samples: usize, geom: &FrameGeometry) -> usize {
    if num_samples < geom.frame_len {
        0
    } else {
        (num_samples - geom.frame_len) / geom.shift + 1
    }
}

/// Windowed frames, each zero-padded to `fft_size`. A trailing partial frame is dropped.
pub fn frame_and_window(audio: &AudioRecord, cfg: &MfccConfig) -> Result<Vec<Vec<f64>>> {
    let geom = cfg.geometry(audio.sample_rate)?;
    windowed_frames(&audio.samples, &geom)
}

fn windowed_frames(samples: &[f64], geom: &FrameGeometry) -> Result<Vec<Vec<f64>>> {
    let count = frame_count(samples.len(), geom);
    if count == 0 {
        return Err(Error::TooShort {
            samples: samples.len(),
            needed: geom.frame_len,
        });
    }
    let window = hamming_window(geom.frame_len);
    Ok((0..count)
        .map(|i| {
            let start = i * geom.shift;
            let mut frame = vec![0.0; geom.fft_size];
            for (k, w) in window.iter().enumerate() {
                frame[k] = samples[start + k] * w;
            }
            frame
        })
        .collect())
}

/// In-place iterative radix-2 decimation-in-time FFT, `X_k = Σ x_n e^{−j2πkn/N}`.
pub fn fft_in_place(buf: &mut [Complex64]) -> Result<()> {
    let n = buf.len();
    if !n.is_power_of_two() {
        return Err(Error::Size(n));
    }
    if n == 1 {
        return Ok(());
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        // twiddles evaluated directly rather than by recurrence to keep error at rounding level
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = buf[start + k];
                let b = buf[start + k + half] * twiddles[k];
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len *= 2;
    }
    Ok(())
}

/// DFT of a real frame whose length is a power of two.
pub fn dft(frame: &[f64]) -> Result<Vec<Complex64>> {
    let mut buf: Vec<Complex64> = frame.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_in_place(&mut buf)?;
    Ok(buf)
}

/// `|X_k|²` for bins `0..=N/2`.
pub fn power_spectrum(frame: &[f64]) -> Result<Vec<f64>> {
    let spec = dft(frame)?;
    Ok(spec[..=frame.len() / 2].iter().map(|c| c.norm_sqr()).collect())
}

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters with centers equally spaced on the mel scale.
#[derive(Clone, Debug, PartialEq)]
pub struct MelFilterbank {
    /// `K + 2` band edges in Hz: filter `i` rises from `edges[i]`, peaks at
    /// `edges[i+1]` and falls to zero at `edges[i+2]`.
    pub edges_hz: Vec<f64>,
    /// `K × (fft_size/2 + 1)` weights.
    pub weights: Matrix,
}

impl MelFilterbank {
    pub fn new(num_filters: usize, geom: &FrameGeometry) -> Result<Self> {
        if num_filters == 0 {
            return Err(Error::domain("filterbank needs at least one filter"));
        }
        let nbins = geom.fft_size / 2 + 1;
        let bin_hz = geom.sample_rate as f64 / geom.fft_size as f64;
        let (mlo, mhi) = (hz_to_mel(geom.fmin_hz), hz_to_mel(geom.fmax_hz));
        let step = (mhi - mlo) / (num_filters + 1) as f64;
        let edges_hz: Vec<f64> = (0..num_filters + 2)
            .map(|i| mel_to_hz(mlo + step * i as f64))
            .collect();

        let mut weights = Matrix::zeros(num_filters, nbins);
        for i in 0..num_filters {
            let (lo, mid, hi) = (edges_hz[i], edges_hz[i + 1], edges_hz[i + 2]);
            let mut covered = 0;
            for b in 0..nbins {
                let f = b as f64 * bin_hz;
                let w = if f > lo && f <= mid {
                    (f - lo) / (mid - lo)
                } else if f > mid && f < hi {
                    (hi - f) / (hi - mid)
                } else {
                    0.0
                };
                if w > 0.0 {
                    covered += 1;
                }
                weights[(i, b)] = w;
            }
            if covered == 0 {
                return Err(Error::Resolution(format!(
                    "filter {i} ({lo:.1}-{hi:.1} Hz) covers no FFT bin at {bin_hz:.2} Hz/bin; \
                     use fewer filters or a larger fft size"
                )));
            }
        }
        Ok(MelFilterbank { edges_hz, weights })
    }

    pub fn num_filters(&self) -> usize {
        self.weights.rows()
    }

    /// Filter energies `Σ_bin wᵢ(bin)·power(bin)`, floored at [`ENERGY_FLOOR`].
    pub fn apply(&self, power: &[f64]) -> Result<Vector> {
        if power.len() != self.weights.cols() {
            return Err(Error::dim(format!(
                "power spectrum of length {}, filterbank expects {}",
                power.len(),
                self.weights.cols()
            )));
        }
        if power.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::domain("power spectrum entries must be >= 0"));
        }
        let mut out = self.weights.mul_vec(power)?;
        out.iter_mut().for_each(|e| *e = e.max(ENERGY_FLOOR));
        Ok(out)
    }
}

/// Convenience wrapper building the filterbank for one call.
pub fn mel_filterbank(power: &[f64], cfg: &MfccConfig, sample_rate: u32) -> Result<Vector> {
    let geom = cfg.geometry(sample_rate)?;
    MelFilterbank::new(cfg.num_filters, &geom)?.apply(power)
}

/// `c̃ₙ = Σ_{k=1..K} (log S_k)·cos[n(k − ½)π/K]` for `n = 1..=num_ceps`.
pub fn dct_cepstra(log_energies: &[f64], num_ceps: usize) -> Result<Vector> {
    let k = log_energies.len();
    if k < 2 || num_ceps == 0 || num_ceps > k - 1 {
        return Err(Error::domain(format!(
            "need 1 <= num_ceps <= K - 1, got num_ceps = {num_ceps}, K = {k}"
        )));
    }
    let kf = k as f64;
    Ok((1..=num_ceps)
        .map(|n| {
            log_energies
                .iter()
                .enumerate()
                .map(|(j, &s)| s * (n as f64 * (j as f64 + 0.5) * PI / kf).cos())
                .sum()
        })
        .collect::<Vec<f64>>()
        .into())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MfccFeatures {
    /// `num_ceps × frames`
    pub frames: Matrix,
    /// Per-coefficient mean, then per-coefficient standard deviation.
    pub summary: Vector,
}

/// Reusable extractor for one sample rate.
#[derive(Clone, Debug)]
pub struct MfccExtractor {
    pub config: MfccConfig,
    pub geometry: FrameGeometry,
    pub filterbank: MelFilterbank,
}

impl MfccExtractor {
    pub fn new(config: &MfccConfig, sample_rate: u32) -> Result<Self> {
        let geometry = config.geometry(sample_rate)?;
        let filterbank = MelFilterbank::new(config.num_filters, &geometry)?;
        Ok(MfccExtractor {
            config: config.clone(),
            geometry,
            filterbank,
        })
    }

    /// Log filterbank energies of every frame (`K × frames`).
    pub fn log_energies(&self, samples: &[f64]) -> Result<Matrix> {
        let frames = windowed_frames(samples, &self.geometry)?;
        let cols = frames
            .iter()
            .map(|f| {
                let e = self.filterbank.apply(&power_spectrum(f)?)?;
                Ok(e.iter().map(|v| v.ln()).collect::<Vec<f64>>())
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_columns(&cols)
    }

    pub fn extract(&self, samples: &[f64]) -> Result<MfccFeatures> {
        let loge = self.log_energies(samples)?;
        let cols = loge
            .columns()
            .map(|c| dct_cepstra(c, self.config.num_ceps).map(Vector::into_inner))
            .collect::<Result<Vec<_>>>()?;
        let frames = Matrix::from_columns(&cols)?;
        let summary = summarize(&frames);
        Ok(MfccFeatures { frames, summary })
    }
}

pub fn extract(audio: &AudioRecord, cfg: &MfccConfig) -> Result<MfccFeatures> {
    MfccExtractor::new(cfg, audio.sample_rate)?.extract(&audio.samples)
}

/// Mean ⊕ population standard deviation of each row, by Welford's update
/// (constant rows give exactly zero deviation).
fn summarize(frames: &Matrix) -> Vector {
    let n = frames.rows();
    let mut mean = vec![0.0; n];
    let mut m2 = vec![0.0; n];
    for (t, col) in frames.columns().enumerate() {
        let count = (t + 1) as f64;
        for i in 0..n {
            let delta = col[i] - mean[i];
            mean[i] += delta / count;
            m2[i] += delta * (col[i] - mean[i]);
        }
    }
    let frames_n = frames.cols() as f64;
    let mut out = mean;
    out.extend(m2.iter().map(|v| (v / frames_n).sqrt()));
    Vector::new(out)
}
