//! RIFF/PCM wav file handling on top of `hound`, with streaming variants of
//! the epoch splitter and resampler so multi-hour recordings never have to
//! fit in memory.

use std::path::{Path, PathBuf};

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use serde::{Deserialize, Serialize};

use crate::audio::{mix_frame, resampled_len, WavClip, TARGET_RATE};
use crate::error::{Error, Result};
use crate::time::Tenths;

fn check_spec(spec: &WavSpec, path: &Path) -> Result<()> {
    if spec.sample_format != SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedWav {
            detail: format!(
                "{}: expected 16-bit integer PCM, found {}-bit {:?}",
                path.display(),
                spec.bits_per_sample,
                spec.sample_format
            ),
        });
    }
    if spec.channels == 0 || spec.channels > 2 {
        return Err(Error::UnsupportedWav {
            detail: format!(
                "{}: expected 1 or 2 channels, found {}",
                path.display(),
                spec.channels
            ),
        });
    }
    Ok(())
}

fn writer_spec(channels: u16, sample_rate: u32) -> WavSpec {
    WavSpec {
        channels,
        sample_rate,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    }
}

/// Read a whole wav file into memory. Intended for epoch-sized files and
/// tests; use [`chunk_wav_file`] / [`resample_wav_file`] for long inputs.
pub fn read_wav_clip(path: &Path) -> Result<WavClip> {
    let mut reader = WavReader::open(path)?;
    let spec = reader.spec();
    check_spec(&spec, path)?;
    let samples = reader
        .samples::<i16>()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(WavClip {
        sample_rate_hz: spec.sample_rate,
        channels: spec.channels,
        samples,
        origin_offset: Tenths::ZERO,
    })
}

pub fn write_wav_clip(path: &Path, clip: &WavClip) -> Result<()> {
    let mut writer = WavWriter::create(path, writer_spec(clip.channels, clip.sample_rate_hz))?;
    for &s in &clip.samples {
        writer.write_sample(s)?;
    }
    writer.finalize()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpochEntry {
    pub file: String,
    #[serde(rename = "origin_offset_s")]
    pub origin_offset: Tenths,
    pub frames: u64,
    /// True for a final chunk shorter than the full epoch length.
    pub partial: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChunkManifest {
    pub source: String,
    pub sample_rate_hz: u32,
    pub channels: u16,
    pub epoch_len_s: u32,
    pub epochs: Vec<EpochEntry>,
}

/// Split a wav file into epoch files `<stem>_e<index>.wav` under `out_dir`,
/// streaming one epoch at a time. An empty input produces no files and an
/// empty manifest.
pub fn chunk_wav_file(input: &Path, out_dir: &Path, epoch_len_s: u32) -> Result<ChunkManifest> {
    if epoch_len_s == 0 {
        return Err(Error::BadEpochLength);
    }
    let mut reader = WavReader::open(input)?;
    let spec = reader.spec();
    check_spec(&spec, input)?;
    std::fs::create_dir_all(out_dir)?;

    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("audio")
        .to_string();
    let full_epoch_frames = epoch_len_s as u64 * spec.sample_rate as u64;
    let samples_per_epoch = (full_epoch_frames * spec.channels as u64) as usize;

    let mut manifest = ChunkManifest {
        source: input.display().to_string(),
        sample_rate_hz: spec.sample_rate,
        channels: spec.channels,
        epoch_len_s,
        epochs: Vec::new(),
    };

    let mut buffer: Vec<i16> = Vec::with_capacity(samples_per_epoch);
    let mut index = 0usize;
    let mut flush = |buffer: &mut Vec<i16>, index: &mut usize, at_end: bool| -> Result<()> {
        if buffer.is_empty() {
            return Ok(());
        }
        let file_name = format!("{stem}_e{index:04}.wav");
        let path = out_dir.join(&file_name);
        let mut writer = WavWriter::create(&path, writer_spec(spec.channels, spec.sample_rate))?;
        for &s in buffer.iter() {
            writer.write_sample(s)?;
        }
        writer.finalize()?;
        let frames = buffer.len() as u64 / spec.channels as u64;
        manifest.epochs.push(EpochEntry {
            file: file_name,
            origin_offset: Tenths::from_tenths(*index as i64 * epoch_len_s as i64 * 10),
            frames,
            partial: at_end && frames < full_epoch_frames,
        });
        buffer.clear();
        *index += 1;
        Ok(())
    };

    for sample in reader.samples::<i16>() {
        buffer.push(sample?);
        if buffer.len() == samples_per_epoch {
            flush(&mut buffer, &mut index, false)?;
        }
    }
    flush(&mut buffer, &mut index, true)?;

    Ok(manifest)
}

fn round_half_away(value: f64) -> i16 {
    let rounded = if value >= 0.0 {
        (value + 0.5).floor()
    } else {
        (value - 0.5).ceil()
    };
    rounded as i16
}

/// Streaming mono 16 kHz conversion of a wav file: channel mean followed by
/// linear interpolation, sample for sample identical to
/// [`crate::audio::resample_to_16k`].
pub fn resample_wav_file(input: &Path, output: &Path) -> Result<PathBuf> {
    let mut reader = WavReader::open(input)?;
    let spec = reader.spec();
    check_spec(&spec, input)?;
    if spec.sample_rate < TARGET_RATE {
        return Err(Error::UnsupportedRate {
            rate: spec.sample_rate,
        });
    }
    if let Some(parent) = output.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut writer = WavWriter::create(output, writer_spec(1, TARGET_RATE))?;

    let total_frames = reader.duration() as usize;
    let mut samples = reader.samples::<i16>();
    let channels = spec.channels as usize;
    let mut next_frame = move || -> Result<Option<i16>> {
        let mut frame = [0i16; 2];
        for slot in frame.iter_mut().take(channels) {
            match samples.next() {
                Some(s) => *slot = s?,
                None => return Ok(None),
            }
        }
        Ok(Some(mix_frame(&frame[..channels])))
    };

    if total_frames == 0 {
        writer.finalize()?;
        return Ok(output.to_path_buf());
    }

    if spec.sample_rate == TARGET_RATE {
        while let Some(s) = next_frame()? {
            writer.write_sample(s)?;
        }
        writer.finalize()?;
        return Ok(output.to_path_buf());
    }

    let out_len = resampled_len(total_frames, spec.sample_rate);
    let ratio = spec.sample_rate as f64 / TARGET_RATE as f64;

    // sliding window of mono frames; base = source index of window[0]
    let mut window: Vec<i16> = Vec::new();
    let mut base = 0usize;
    let mut read_through = 0usize; // frames consumed from the reader

    for j in 0..out_len {
        let pos = j as f64 * ratio;
        let i0 = (pos.floor() as usize).min(total_frames - 1);
        let i1 = (i0 + 1).min(total_frames - 1);
        while read_through <= i1 {
            match next_frame()? {
                Some(s) => {
                    window.push(s);
                    read_through += 1;
                }
                None => break, // header promised more frames than present; clamp below
            }
        }
        if i0 > base {
            let drop = (i0 - base).min(window.len().saturating_sub(1));
            window.drain(..drop);
            base += drop;
        }
        if window.is_empty() {
            break;
        }
        let last = base + window.len() - 1;
        let s0 = window[i0.min(last) - base];
        let s1 = window[i1.min(last) - base];
        let frac = pos - i0 as f64;
        let value = s0 as f64 + (s1 as f64 - s0 as f64) * frac;
        writer.write_sample(round_half_away(value))?;
    }
    writer.finalize()?;
    Ok(output.to_path_buf())
}
