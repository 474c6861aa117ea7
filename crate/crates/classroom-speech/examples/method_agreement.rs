// Cross-method agreement statistics: Pearson correlation of per-file
// features, chance-corrected agreement on question flags, and absolute
// intraclass correlation over audio files.
//
// Run with: `cargo run --example method_agreement`

use classroom_speech::stats::{binary_kappa, icc_absolute, pearson_r};

pub fn run() -> classroom_speech::Result<()> {
    // per-file MLU measured by two methods
    let transcriber_mlu = [3.1, 4.2, 2.8, 3.9, 4.6, 3.3];
    let expert_mlu = [3.3, 4.4, 2.7, 4.1, 4.5, 3.6];
    let r = pearson_r(&transcriber_mlu, &expert_mlu)?;
    println!("pearson r over per-file MLU: {r:.3}");

    // question / non-question flags on units both methods produced
    let flags = [
        (true, true),
        (false, false),
        (true, true),
        (false, false),
        (true, false), // one disagreement
        (false, false),
        (true, true),
        (false, false),
    ];
    let kappa = binary_kappa(&flags)?;
    println!(
        "question-flag kappa: {:.3}{}",
        kappa.value.unwrap_or(f64::NAN),
        if kappa.degenerate {
            " (degenerate)"
        } else {
            ""
        }
    );

    // files x methods matrix; absolute agreement punishes systematic offsets
    let matrix: Vec<[f64; 2]> = transcriber_mlu
        .iter()
        .zip(&expert_mlu)
        .map(|(t, e)| [*t, *e])
        .collect();
    let icc = icc_absolute(&matrix)?;
    println!(
        "icc (two-way random, absolute, single measure): {:.3}",
        icc.value
    );

    let shifted: Vec<[f64; 2]> = matrix.iter().map(|row| [row[0], row[1] + 1.0]).collect();
    let icc_shifted = icc_absolute(&shifted)?;
    println!(
        "same data with one method shifted by +1.0: {:.3} (r would not move)",
        icc_shifted.value
    );
    Ok(())
}

fn main() -> classroom_speech::Result<()> {
    run()
}
