// Three-way alignment: expert and diarizer streams are synchronized onto
// the transcriber's segments. Speech both secondaries saw but the
// transcriber missed becomes a blank-anchor unit; several secondary
// segments under one anchor merge, keeping the class that covers the
// longest duration.
//
// Run with: `cargo run --example align_timeline`

use classroom_speech::align::{align_three_way, write_jsonl};
use classroom_speech::ingest::{parse_diarizer_csv, parse_expert_export, parse_transcriber_json};
use classroom_speech::model::RoleMap;

const TRANSCRIBER: &str = r#"{
  "recording_id": "demo",
  "duration_s": 20.0,
  "segments": [
    {"start": 0.0, "end": 4.0, "text": "come look at this everyone"},
    {"start": 5.0, "end": 6.0, "text": "wow"}
  ]
}"#;

// two expert segments under the first anchor: KCHI holds 1.0 s, FEM 3.0 s,
// so the merged unit is classified Teacher; the segment at [8, 9] has no
// anchor at all
const EXPERT: &str = "KCHI\t0.0\t1.0\tooh\nFEM\t1.0\t4.0\tcome look at this\nKCHI\t5.0\t6.0\twow\nFEM\t8.0\t9.0\tnow wash your hands\n";

const DIARIZER: &str = "onset,offset,speaker\n0.0,3.9,FEM\n5.0,6.0,KCHI\n8.1,9.0,FEM\n";

pub fn run() -> classroom_speech::Result<()> {
    let map = RoleMap::default();
    let transcriber = parse_transcriber_json(TRANSCRIBER.as_bytes(), &map)?.stream;
    let expert = parse_expert_export(EXPERT.as_bytes(), &map)?.stream;
    let diarizer = parse_diarizer_csv(DIARIZER.as_bytes(), &map)?.stream;

    let timeline = align_three_way(&expert, &transcriber, &diarizer)?;
    println!(
        "{} units ({} blank-anchor, {} merged)\n",
        timeline.units.len(),
        timeline.blank_anchor_count(),
        timeline.merged_count()
    );
    for unit in &timeline.units {
        let anchor = unit
            .anchor
            .as_ref()
            .map(|a| format!("{:?}", a.raw_text))
            .unwrap_or_else(|| "(blank)".into());
        let side = |s: &Option<classroom_speech::align::MergedSide>| {
            s.as_ref()
                .map(|m| format!("{} {:?}", m.role, m.text))
                .unwrap_or_else(|| "-".into())
        };
        println!(
            "unit {} [{} - {}] anchor={} expert={} diarizer={}",
            unit.unit_id,
            unit.start,
            unit.end,
            anchor,
            side(&unit.expert),
            side(&unit.diarizer),
        );
    }

    println!("\ntimeline as JSON lines:\n{}", write_jsonl(&timeline));
    Ok(())
}

fn main() -> classroom_speech::Result<()> {
    run()
}
