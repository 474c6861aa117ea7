//! Audio preparation: fixed-length epoch splitting, 16 kHz conversion, and
//! transcript de-duplication of hallucinated repeats.

use crate::error::{Error, Result};
use crate::model::AnnotationStream;
use crate::time::Tenths;

pub const TARGET_RATE: u32 = 16_000;

/// Interleaved signed 16-bit PCM audio held in memory.
///
/// `origin_offset` is the distance from the start of the source file; for
/// epoch-split outputs it is always a multiple of the epoch length.
#[derive(Clone, Debug, PartialEq)]
pub struct WavClip {
    pub sample_rate_hz: u32,
    pub channels: u16,
    pub samples: Vec<i16>,
    pub origin_offset: Tenths,
}

impl WavClip {
    pub fn mono(sample_rate_hz: u32, samples: Vec<i16>) -> WavClip {
        WavClip {
            sample_rate_hz,
            channels: 1,
            samples,
            origin_offset: Tenths::ZERO,
        }
    }

    pub fn frames(&self) -> usize {
        self.samples.len() / self.channels as usize
    }
}

/// Split a clip into consecutive chunks of exactly `epoch_len_s` seconds,
/// with a shorter final chunk for the remainder. Concatenating the outputs
/// reproduces the input bit-exactly.
pub fn split_epochs(clip: &WavClip, epoch_len_s: u32) -> Result<Vec<WavClip>> {
    if epoch_len_s == 0 {
        return Err(Error::BadEpochLength);
    }
    let samples_per_epoch =
        epoch_len_s as usize * clip.sample_rate_hz as usize * clip.channels as usize;
    let mut out = Vec::new();
    for (i, chunk) in clip.samples.chunks(samples_per_epoch).enumerate() {
        out.push(WavClip {
            sample_rate_hz: clip.sample_rate_hz,
            channels: clip.channels,
            samples: chunk.to_vec(),
            origin_offset: clip.origin_offset
                + Tenths::from_tenths(i as i64 * epoch_len_s as i64 * 10),
        });
    }
    Ok(out)
}

pub(crate) fn mix_frame(frame: &[i16]) -> i16 {
    // arithmetic mean, rounded half away from zero
    let sum: i64 = frame.iter().map(|&s| s as i64).sum();
    let n = frame.len() as i64;
    let q = (2 * sum + sum.signum() * n) / (2 * n);
    q as i16
}

/// Average channels down to mono. Already-mono input is returned unchanged.
pub fn downmix_mono(clip: &WavClip) -> WavClip {
    if clip.channels == 1 {
        return clip.clone();
    }
    let samples = clip
        .samples
        .chunks(clip.channels as usize)
        .map(mix_frame)
        .collect();
    WavClip {
        sample_rate_hz: clip.sample_rate_hz,
        channels: 1,
        samples,
        origin_offset: clip.origin_offset,
    }
}

pub(crate) fn resampled_len(frames: usize, from_rate: u32) -> usize {
    // round(frames * 16000 / from_rate), half up, in integer arithmetic
    ((frames as u64 * TARGET_RATE as u64 + from_rate as u64 / 2) / from_rate as u64) as usize
}

pub(crate) fn interpolate(mono: &[i16], position: f64) -> i16 {
    let i0 = position.floor() as usize;
    let i0 = i0.min(mono.len() - 1);
    let i1 = (i0 + 1).min(mono.len() - 1);
    let frac = position - i0 as f64;
    let value = mono[i0] as f64 + (mono[i1] as f64 - mono[i0] as f64) * frac;
    let rounded = if value >= 0.0 {
        (value + 0.5).floor()
    } else {
        (value - 0.5).ceil()
    };
    rounded as i16
}

/// Convert to mono 16 kHz by channel averaging followed by linear
/// interpolation. Deterministic; only downsampling is supported.
pub fn resample_to_16k(clip: &WavClip) -> Result<WavClip> {
    if clip.sample_rate_hz < TARGET_RATE {
        return Err(Error::UnsupportedRate {
            rate: clip.sample_rate_hz,
        });
    }
    let mono = downmix_mono(clip);
    if mono.sample_rate_hz == TARGET_RATE {
        return Ok(mono);
    }
    let n = mono.samples.len();
    let out_len = resampled_len(n, mono.sample_rate_hz);
    if n == 0 || out_len == 0 {
        return Ok(WavClip {
            sample_rate_hz: TARGET_RATE,
            channels: 1,
            samples: Vec::new(),
            origin_offset: clip.origin_offset,
        });
    }
    let ratio = mono.sample_rate_hz as f64 / TARGET_RATE as f64;
    let samples = (0..out_len)
        .map(|j| interpolate(&mono.samples, j as f64 * ratio))
        .collect();
    Ok(WavClip {
        sample_rate_hz: TARGET_RATE,
        channels: 1,
        samples,
        origin_offset: clip.origin_offset,
    })
}

/// Remove hallucinated transcription loops: within each maximal run of
/// consecutive utterances whose normalized tokens are identical, utterances
/// after the second are dropped when the run is at least three long.
/// Non-adjacent repeats are untouched. Returns the cleaned stream and the
/// number of removed utterances.
pub fn dedup_repeats(stream: &AnnotationStream) -> (AnnotationStream, usize) {
    let mut kept = Vec::with_capacity(stream.utterances.len());
    let mut removed = 0usize;
    let mut run_len = 0usize;
    let mut run_tokens: Option<&[String]> = None;

    for u in &stream.utterances {
        let same = run_tokens.is_some_and(|t| t == u.tokens.as_slice());
        run_len = if same { run_len + 1 } else { 1 };
        run_tokens = Some(&u.tokens);
        if run_len <= 2 {
            kept.push(u.clone());
        } else {
            removed += 1;
        }
    }

    (
        AnnotationStream::new(
            stream.recording_id.clone(),
            stream.wearer_role,
            stream.source,
            stream.duration,
            kept,
        ),
        removed,
    )
}
