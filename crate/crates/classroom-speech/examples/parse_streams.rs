// Parse the three input annotation formats into the common stream model
// and emit the canonical interchange JSON.
//
// Run with: `cargo run --example parse_streams`

use classroom_speech::ingest::{
    canonical_json, parse_diarizer_csv, parse_expert_export, parse_transcriber_json,
};
use classroom_speech::model::RoleMap;

const TRANSCRIBER_JSON: &str = r#"{
  "recording_id": "demo",
  "duration_s": 30.0,
  "segments": [
    {"start": 1.2, "end": 3.4, "text": "Where is it?"},
    {"start": 4.0, "end": 6.5, "text": "I think it's under the table."}
  ]
}"#;

const DIARIZER_CSV: &str = "onset,offset,speaker\n1.2,3.4,FEM\n4.0,6.5,KCHI\n8.0,9.0,ROBOT\n";

const EXPERT_TSV: &str = "FEM\t1.2\t3.4\tWhere is it?\nKCHI\t4.0\t6.5\tit's under the table\n";

pub fn run() -> classroom_speech::Result<()> {
    let map = RoleMap::default();

    let transcriber = parse_transcriber_json(TRANSCRIBER_JSON.as_bytes(), &map)?;
    println!(
        "transcriber: {} utterance(s), recording {:?}",
        transcriber.stream.utterances.len(),
        transcriber.stream.recording_id
    );
    for u in &transcriber.stream.utterances {
        println!(
            "  [{} - {}] question={} tokens={:?}",
            u.start, u.end, u.is_question, u.tokens
        );
    }

    let diarizer = parse_diarizer_csv(DIARIZER_CSV.as_bytes(), &map)?;
    println!(
        "\ndiarizer: {} utterance(s)",
        diarizer.stream.utterances.len()
    );
    for u in &diarizer.stream.utterances {
        println!("  [{} - {}] {} -> {}", u.start, u.end, u.speaker, u.role);
    }
    for warning in &diarizer.warnings {
        println!("  warning: {warning}");
    }

    let expert = parse_expert_export(EXPERT_TSV.as_bytes(), &map)?;
    println!("\nexpert: {} utterance(s)", expert.stream.utterances.len());
    for u in &expert.stream.utterances {
        println!("  [{} - {}] {} {:?}", u.start, u.end, u.role, u.raw_text);
    }

    println!("\ncanonical interchange JSON for the transcriber stream:");
    println!("{}", canonical_json(&transcriber.stream));
    Ok(())
}

fn main() -> classroom_speech::Result<()> {
    run()
}
