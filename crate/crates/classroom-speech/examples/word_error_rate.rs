// Word-level Levenshtein distance and word error rate between transcriber
// and expert versions of the same utterances.
//
// Run with: `cargo run --example word_error_rate`

use classroom_speech::ingest::normalize_tokens;
use classroom_speech::wer::{corpus_wer, utterance_wer, word_levenshtein};

pub fn run() -> classroom_speech::Result<()> {
    let pairs = [
        (
            "What do you think is gonna happen right now?", // transcriber
            "What do you think will happen?",               // expert
        ),
        ("It's going to explode now.", "it's going to explode"),
        ("the bubbles go up", "the bubbles go up"),
    ];

    let mut outcomes = Vec::new();
    for (hyp_text, ref_text) in pairs {
        let hyp = normalize_tokens(hyp_text);
        let reference = normalize_tokens(ref_text);
        let ld = word_levenshtein(&hyp, &reference);
        let outcome = utterance_wer(&hyp, &reference).expect("non-empty pair");
        println!("hyp: {hyp_text:?}");
        println!("ref: {ref_text:?}");
        println!(
            "  LD={ld}  ref words={}  WER={:.2}\n",
            outcome.ref_len, outcome.wer
        );
        outcomes.push(outcome);
    }

    // an utterance only the expert transcribed counts every word as an error
    let missed = utterance_wer(&[], &normalize_tokens("you found all five pieces")).unwrap();
    println!(
        "expert-only utterance: LD={} WER={:.2} (denominator {})",
        missed.ld, missed.wer, missed.denom
    );
    outcomes.push(missed);

    let corpus = corpus_wer(&outcomes, "all")?;
    println!(
        "\ncorpus over {} pairs: micro {:.3} (= {}/{}), macro {:.3}",
        corpus.pairs, corpus.micro, corpus.total_ld, corpus.total_denom, corpus.macro_mean
    );
    Ok(())
}

fn main() -> classroom_speech::Result<()> {
    run()
}
