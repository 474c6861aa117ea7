// Split a recording into fixed-length epochs and convert a copy to the
// mono 16 kHz format the downstream speaker classifier expects.
//
// Run with: `cargo run --example chunk_and_resample`

use classroom_speech::audio::{resample_to_16k, split_epochs, WavClip};
use classroom_speech::wav::{chunk_wav_file, resample_wav_file, write_wav_clip};

/// 25 s stereo clip at 44.1 kHz carrying a 1 kHz tone.
fn demo_clip() -> WavClip {
    let rate = 44_100u32;
    let frames = 25 * rate as usize;
    let mut samples = Vec::with_capacity(frames * 2);
    for n in 0..frames {
        let v = (8000.0 * (2.0 * std::f64::consts::PI * 1000.0 * n as f64 / rate as f64).sin())
            .round() as i16;
        samples.push(v);
        samples.push(v / 2);
    }
    WavClip {
        sample_rate_hz: rate,
        channels: 2,
        samples,
        origin_offset: classroom_speech::Tenths::ZERO,
    }
}

pub fn run() -> classroom_speech::Result<()> {
    let clip = demo_clip();

    // in-memory splitting: 10 s epochs -> 2 full chunks + a 5 s remainder
    let epochs = split_epochs(&clip, 10)?;
    println!(
        "split {} frames into {} epochs:",
        clip.frames(),
        epochs.len()
    );
    for e in &epochs {
        println!("  offset {:>5}s  {} frames", e.origin_offset, e.frames());
    }

    let mono = resample_to_16k(&clip)?;
    println!(
        "\nresampled to {} Hz mono: {} frames",
        mono.sample_rate_hz,
        mono.frames()
    );

    // the same operations streaming over wav files
    let dir = tempfile::tempdir()?;
    let input = dir.path().join("demo.wav");
    write_wav_clip(&input, &clip)?;
    let manifest = chunk_wav_file(&input, &dir.path().join("epochs"), 10)?;
    println!("\nchunk manifest:");
    for entry in &manifest.epochs {
        println!(
            "  {} offset={}s frames={} partial={}",
            entry.file, entry.origin_offset, entry.frames, entry.partial
        );
    }
    let output = dir.path().join("demo_16k.wav");
    resample_wav_file(&input, &output)?;
    println!("\nstreaming resample wrote {}", output.display());
    Ok(())
}

fn main() -> classroom_speech::Result<()> {
    run()
}
