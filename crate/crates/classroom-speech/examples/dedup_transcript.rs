// Clean hallucinated repetition loops out of a transcriber stream: within
// a run of three or more identical transcriptions only the first two are
// kept.
//
// Run with: `cargo run --example dedup_transcript`

use classroom_speech::audio::dedup_repeats;
use classroom_speech::ingest::parse_transcriber_json;
use classroom_speech::model::RoleMap;

const LOOPY: &str = r#"{
  "recording_id": "demo",
  "duration_s": 20.0,
  "segments": [
    {"start": 0.5, "end": 1.5, "text": "let's pour the water"},
    {"start": 2.0, "end": 3.0, "text": "Where is it?"},
    {"start": 3.0, "end": 4.0, "text": "where is it?"},
    {"start": 4.0, "end": 5.0, "text": "Where is it"},
    {"start": 5.0, "end": 6.0, "text": "where is it?"},
    {"start": 7.0, "end": 8.0, "text": "there it goes"}
  ]
}"#;

pub fn run() -> classroom_speech::Result<()> {
    let parsed = parse_transcriber_json(LOOPY.as_bytes(), &RoleMap::default())?;
    println!("before ({} utterances):", parsed.stream.utterances.len());
    for u in &parsed.stream.utterances {
        println!("  [{} - {}] {:?}", u.start, u.end, u.raw_text);
    }

    let (cleaned, removed) = dedup_repeats(&parsed.stream);
    println!(
        "\nafter ({} utterances, {} removed):",
        cleaned.utterances.len(),
        removed
    );
    for u in &cleaned.utterances {
        println!("  [{} - {}] {:?}", u.start, u.end, u.raw_text);
    }
    Ok(())
}

fn main() -> classroom_speech::Result<()> {
    run()
}
