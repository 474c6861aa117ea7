// The speech-feature table over a scripted teacher/child dialogue: MLU,
// words per minute, questions, responses within the 2.5 s window, response
// latency, and zero lexical alignment.
//
// Run with: `cargo run --example speech_features`

use classroom_speech::features::{
    detect_responses, feature_table, FeatureInput, FeatureOptions, RoleFeatures, StopwordMode,
};
use classroom_speech::model::{RawSpeakerClass, Role, RoleMap, Source, Utterance};
use classroom_speech::time::Tenths;

fn utt(id: &str, role: Role, start: f64, end: f64, text: &str) -> Utterance {
    let speaker = match role {
        Role::Teacher => RawSpeakerClass::Fem,
        _ => RawSpeakerClass::Kchi,
    };
    Utterance::new(
        id,
        Source::Expert,
        Tenths::from_seconds(start),
        Tenths::from_seconds(end),
        speaker,
        RoleMap::default().role_of(speaker),
        text,
    )
    .unwrap()
}

fn dialogue() -> Vec<Utterance> {
    vec![
        utt("1", Role::Teacher, 0.0, 2.0, "Good morning everyone."),
        utt("2", Role::Child, 2.5, 3.5, "hi teacher"),
        utt(
            "3",
            Role::Teacher,
            4.0,
            6.0,
            "What do you think will happen?",
        ),
        utt("4", Role::Child, 6.5, 7.5, "it's going to explode"),
        utt("5", Role::Teacher, 8.0, 9.0, "Why do you think that?"),
        utt("6", Role::Child, 12.0, 13.0, "because it is hot"),
        utt("7", Role::Teacher, 13.2, 14.0, "Tell me more."),
        utt("8", Role::Child, 14.5, 15.5, "the water gets hot"),
        utt("9", Role::Child, 16.0, 17.0, "can we see it again?"),
        utt("10", Role::Teacher, 17.5, 18.5, "Yes we can see it again."),
        utt("11", Role::Teacher, 19.0, 20.5, "Do you want to try?"),
        utt("12", Role::Child, 20.4, 21.4, "yes I want to try"),
    ]
}

fn print_row(label: &str, f: &RoleFeatures) {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
    println!("{label}:");
    println!("  utterances            {}", f.total_utterances);
    println!("  questions             {}", f.questions);
    println!("  non-questions         {}", f.non_questions);
    println!("  MLU                   {}", opt(f.mlu));
    println!("  words per minute      {}", opt(f.words_per_minute));
    println!(
        "  responded: questions  {} ({} of {})",
        opt(f.prop_questions_responded),
        f.responses_received_to_questions,
        f.questions
    );
    println!(
        "  responded: non-quest. {} ({} of {})",
        opt(f.prop_non_questions_responded),
        f.responses_received_to_non_questions,
        f.non_questions
    );
    println!("  mean latency (s)      {}", opt(f.mean_response_latency_s));
    println!(
        "  zero-alignment (Q)    {}",
        opt(f.prop_question_responses_zero_alignment)
    );
}

pub fn run() -> classroom_speech::Result<()> {
    let utterances = dialogue();

    println!("responses detected in the dialogue:");
    let events = detect_responses(&utterances, Tenths::from_seconds(2.5), StopwordMode::All);
    for ev in &events {
        println!(
            "  {:>2} -> {:<2} latency {}s shared-words {} {}",
            utterances[ev.prior].id,
            utterances[ev.response].id,
            ev.latency,
            ev.overlap_words,
            if ev.prior_is_question {
                "(question)"
            } else {
                ""
            }
        );
    }

    let summary = feature_table(
        &[FeatureInput {
            utterances,
            duration: Tenths::from_seconds(60.0),
        }],
        &FeatureOptions::default(),
    );
    println!();
    print_row("teacher", &summary.teacher);
    println!();
    print_row("child", &summary.child);
    Ok(())
}

fn main() -> classroom_speech::Result<()> {
    run()
}
