// The whole batch flow on a small synthetic corpus: write three recordings
// in the pipeline directory layout, then dedup, align three ways, and emit
// every report.
//
// Run with: `cargo run --example full_pipeline`

use std::path::Path;

use classroom_speech::config::RunConfig;
use classroom_speech::pipeline;

/// One scripted recording. The per-recording `variant` changes utterance
/// lengths and question counts so per-file features differ, flips a couple
/// of diarizer classes, and garbles some transcriber words so reliability
/// and word error rates come out below 1.
/// Returns (transcriber json, expert tsv, diarizer csv).
fn recording(id: &str, variant: usize) -> (String, String, String) {
    let s = variant as f64 * 0.7;
    let extra = ["", " right now", " over at the table"][variant];
    let rows: Vec<(&str, f64, f64, String)> = vec![
        (
            "FEM",
            0.0 + s,
            2.0 + s,
            format!("Good morning everyone{extra}."),
        ),
        ("KCHI", 2.5 + s, 3.5 + s, "hi teacher".into()),
        (
            "FEM",
            4.0 + s,
            6.0 + s,
            "What do you think will happen?".into(),
        ),
        ("KCHI", 6.5 + s, 7.5 + s, "it's going to explode".into()),
        (
            "FEM",
            8.0 + s,
            9.0 + s,
            format!("Why do you think that number {variant}?"),
        ),
        ("KCHI", 10.5 + s, 11.5 + s, "because it is hot".into()),
        ("KCHI", 16.0 + s, 17.0 + s, "can we see it again?".into()),
        (
            "FEM",
            17.5 + s,
            18.5 + s,
            format!("Yes we can see it again{extra}."),
        ),
        ("KCHI", 20.0 + s, 21.0 + s, "pour the water in".into()),
        (
            "FEM",
            21.5 + s,
            23.0 + s,
            "Shall we measure it first?".into(),
        ),
    ];

    let mut expert = String::new();
    let mut diarizer = String::from("onset,offset,speaker\n");
    let mut segments = Vec::new();
    for (i, (tag, start, end, text)) in rows.iter().enumerate() {
        expert.push_str(&format!("{tag}\t{start:.1}\t{end:.1}\t{text}\n"));
        // the diarizer misclassifies every fourth utterance
        let diar_tag = if (i + variant).is_multiple_of(4) {
            if *tag == "FEM" {
                "KCHI"
            } else {
                "FEM"
            }
        } else {
            tag
        };
        diarizer.push_str(&format!("{start:.1},{end:.1},{diar_tag}\n"));
        // the transcriber garbles every fifth utterance a little
        let transcribed = if (i + variant).is_multiple_of(5) {
            format!("{} okay", text.trim_end_matches('.'))
        } else {
            text.clone()
        };
        segments.push(serde_json::json!({"start": start, "end": end, "text": transcribed}));
    }
    // a transcriber hallucination loop the dedup stage will clean up
    for i in 0..3 {
        let start = 30.0 + s + i as f64;
        segments.push(serde_json::json!({
            "start": start, "end": start + 0.8, "text": "where is it?",
        }));
    }
    let transcriber = serde_json::json!({
        "recording_id": id,
        "duration_s": 60.0,
        "wearer": if variant.is_multiple_of(2) { "child" } else { "teacher" },
        "segments": segments,
    });
    (
        serde_json::to_string_pretty(&transcriber).unwrap(),
        expert,
        diarizer,
    )
}

fn write_corpus(dir: &Path) -> std::io::Result<()> {
    for (i, id) in ["morning_a", "morning_b", "afternoon_a"].iter().enumerate() {
        let (t, e, d) = recording(id, i);
        std::fs::write(dir.join(format!("{id}.transcriber.json")), t)?;
        std::fs::write(dir.join(format!("{id}.expert.tsv")), e)?;
        std::fs::write(dir.join(format!("{id}.diarizer.csv")), d)?;
    }
    Ok(())
}

pub fn run() -> classroom_speech::Result<()> {
    let base = tempfile::tempdir()?;
    let input = base.path().join("input");
    let out = base.path().join("out");
    std::fs::create_dir_all(&input)?;
    write_corpus(&input)?;

    let outcome = pipeline::run(&input, &out, 2, &RunConfig::default())?;
    println!("pipeline outputs:");
    for path in &outcome.outputs {
        println!("  {}", path.strip_prefix(base.path()).unwrap().display());
    }
    for note in &outcome.notes {
        println!("note: {note}");
    }
    for warning in &outcome.warnings {
        println!("warning: {warning}");
    }

    println!("\nreliability.csv:");
    print!("{}", std::fs::read_to_string(out.join("reliability.csv"))?);

    println!("\nicc.csv:");
    print!("{}", std::fs::read_to_string(out.join("icc.csv"))?);

    println!("\nwer_summary.json:");
    print!("{}", std::fs::read_to_string(out.join("wer_summary.json"))?);
    Ok(())
}

fn main() -> classroom_speech::Result<()> {
    run()
}
