//! Deterministic synthetic enrollment data.
//!
//! Faces are smooth per-client prototype patterns plus pixel noise and a
//! brightness offset. Voices are white noise shaped by per-client formant
//! resonators, passed through a random per-utterance channel (first-order
//! tilt), with additive noise.

use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::ingest::{AudioRecord, ImageRecord};

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusSpec {
    pub clients: usize,
    pub faces_per_client: usize,
    pub utterances_per_client: usize,
    /// Held-out genuine probes per client (one face + one utterance each).
    pub probes_per_client: usize,
    /// Unenrolled identities (one face + one utterance each).
    pub impostors: usize,
    pub width: usize,
    pub height: usize,
    pub pixel_noise: f64,
    pub sample_rate: u32,
    pub utterance_secs: f64,
    /// Per-utterance channel tilt coefficient is drawn from `±channel_tilt`.
    pub channel_tilt: f64,
    /// Relative standard deviation of per-utterance formant jitter.
    pub formant_jitter: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            clients: 5,
            faces_per_client: 4,
            utterances_per_client: 4,
            probes_per_client: 2,
            impostors: 10,
            width: 16,
            height: 16,
            pixel_noise: 8.0,
            sample_rate: 8000,
            utterance_secs: 0.5,
            channel_tilt: 0.9,
            formant_jitter: 0.02,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FacePrototype {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Formant {
    pub freq_hz: f64,
    pub bandwidth_hz: f64,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VoiceSignature {
    pub formants: Vec<Formant>,
}

#[derive(Clone, Debug)]
pub struct SyntheticClient {
    pub name: String,
    pub faces: Vec<ImageRecord>,
    pub voices: Vec<AudioRecord>,
    pub probe_faces: Vec<ImageRecord>,
    pub probe_voices: Vec<AudioRecord>,
}

#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub clients: Vec<SyntheticClient>,
    pub impostor_faces: Vec<ImageRecord>,
    pub impostor_voices: Vec<AudioRecord>,
}

pub fn face_prototype(rng: &mut ChaCha8Rng, width: usize, height: usize) -> FacePrototype {
    let mut pixels = vec![110.0; width * height];
    let blobs = 5;
    for _ in 0..blobs {
        let cx = rng.random_range(0.0..width as f64);
        let cy = rng.random_range(0.0..height as f64);
        let sigma = rng.random_range(1.5..4.0);
        let amp = rng.random_range(40.0..90.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        for y in 0..height {
            for x in 0..width {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                pixels[y * width + x] += amp * (-d2 / (2.0 * sigma * sigma)).exp();
            }
        }
    }
    FacePrototype {
        width,
        height,
        pixels,
    }
}

pub fn face_sample(proto: &FacePrototype, rng: &mut ChaCha8Rng, pixel_noise: f64) -> ImageRecord {
    let noise = Normal::new(0.0, pixel_noise.max(1e-12)).expect("finite std");
    let offset = Normal::new(0.0, 5.0).expect("finite std").sample(rng);
    let gray = proto
        .pixels
        .iter()
        .map(|&p| (p + offset + noise.sample(rng)).round().clamp(0.0, 255.0) as u8)
        .collect();
    ImageRecord::new(proto.width, proto.height, gray).expect("prototype dimensions are valid")
}

pub fn voice_signature(rng: &mut ChaCha8Rng) -> VoiceSignature {
    let bands = [(250.0, 900.0), (900.0, 2300.0), (2300.0, 3500.0)];
    VoiceSignature {
        formants: bands
            .iter()
            .map(|&(lo, hi)| Formant {
                freq_hz: rng.random_range(lo..hi),
                bandwidth_hz: rng.random_range(60.0..160.0),
                gain: rng.random_range(0.5..1.5),
            })
            .collect(),
    }
}

/// One utterance: formant-shaped noise through a random tilt channel.
pub fn utterance(
    sig: &VoiceSignature,
    rng: &mut ChaCha8Rng,
    sample_rate: u32,
    secs: f64,
    channel_tilt: f64,
    formant_jitter: f64,
) -> AudioRecord {
    let n = (secs * sample_rate as f64).round() as usize;
    let fs = sample_rate as f64;
    let gauss = Normal::new(0.0, 1.0).expect("unit normal");
    let excitation: Vec<f64> = (0..n).map(|_| gauss.sample(rng)).collect();

    let mut voiced = vec![0.0; n];
    for f in &sig.formants {
        let freq = (f.freq_hz * (1.0 + formant_jitter * gauss.sample(rng))).clamp(50.0, fs / 2.0 - 50.0);
        let r = (-PI * f.bandwidth_hz / fs).exp();
        let a1 = 2.0 * r * (2.0 * PI * freq / fs).cos();
        let a2 = -r * r;
        let (mut y1, mut y2) = (0.0, 0.0);
        for (out, &x) in voiced.iter_mut().zip(&excitation) {
            let y = (1.0 - r) * x + a1 * y1 + a2 * y2;
            *out += f.gain * y;
            y2 = y1;
            y1 = y;
        }
    }

    let beta = rng.random_range(-channel_tilt..=channel_tilt);
    let mut shaped: Vec<f64> = (0..n)
        .map(|i| voiced[i] + beta * if i > 0 { voiced[i - 1] } else { 0.0 })
        .collect();

    let power = shaped.iter().map(|v| v * v).sum::<f64>() / n.max(1) as f64;
    let snr_db = rng.random_range(20.0..35.0);
    let noise_std = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    for v in shaped.iter_mut() {
        *v += noise_std * gauss.sample(rng);
    }

    let peak = shaped.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if peak > 0.0 { 0.5 / peak } else { 0.0 };
    let pcm: Vec<i16> = shaped
        .iter()
        .map(|v| (v * scale * 32768.0).round().clamp(-32768.0, 32767.0) as i16)
        .collect();
    AudioRecord::from_pcm16(sample_rate, &pcm).expect("synthetic sample rate is supported")
}

pub fn corpus(spec: &CorpusSpec, seed: u64) -> Result<SyntheticCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let utter = |sig: &VoiceSignature, rng: &mut ChaCha8Rng| {
        utterance(
            sig,
            rng,
            spec.sample_rate,
            spec.utterance_secs,
            spec.channel_tilt,
            spec.formant_jitter,
        )
    };
    let mut clients = Vec::with_capacity(spec.clients);
    for c in 0..spec.clients {
        let proto = face_prototype(&mut rng, spec.width, spec.height);
        let sig = voice_signature(&mut rng);
        let faces = (0..spec.faces_per_client)
            .map(|_| face_sample(&proto, &mut rng, spec.pixel_noise))
            .collect();
        let voices = (0..spec.utterances_per_client)
            .map(|_| utter(&sig, &mut rng))
            .collect();
        let probe_faces = (0..spec.probes_per_client)
            .map(|_| face_sample(&proto, &mut rng, spec.pixel_noise))
            .collect();
        let probe_voices = (0..spec.probes_per_client)
            .map(|_| utter(&sig, &mut rng))
            .collect();
        clients.push(SyntheticClient {
            name: format!("client{c}"),
            faces,
            voices,
            probe_faces,
            probe_voices,
        });
    }
    let mut impostor_faces = Vec::with_capacity(spec.impostors);
    let mut impostor_voices = Vec::with_capacity(spec.impostors);
    for _ in 0..spec.impostors {
        let proto = face_prototype(&mut rng, spec.width, spec.height);
        let sig = voice_signature(&mut rng);
        impostor_faces.push(face_sample(&proto, &mut rng, spec.pixel_noise));
        impostor_voices.push(utter(&sig, &mut rng));
    }
    Ok(SyntheticCorpus {
        clients,
        impostor_faces,
        impostor_voices,
    })
}
