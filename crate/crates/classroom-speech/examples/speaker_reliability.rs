// Speaker-classification reliability between the diarizer and the expert:
// accuracy, weighted F1, predictive values, and Cohen's kappa, per file
// and pooled.
//
// Run with: `cargo run --example speaker_reliability`

use classroom_speech::model::Role;
use classroom_speech::reliability::{
    accuracy, cohens_kappa, predictive_value, weighted_f1, ConfusionMatrix,
};

pub fn run() -> classroom_speech::Result<()> {
    // counts[predicted][expert] over {teacher, child}
    let cm = ConfusionMatrix::from_counts([[40, 10], [14, 36]]);

    println!("confusion matrix (predicted x expert):");
    println!("             expert T  expert C");
    println!(
        "predicted T  {:>8}  {:>8}",
        cm.get(Role::Teacher, Role::Teacher),
        cm.get(Role::Teacher, Role::Child)
    );
    println!(
        "predicted C  {:>8}  {:>8}",
        cm.get(Role::Child, Role::Teacher),
        cm.get(Role::Child, Role::Child)
    );

    println!("\naccuracy     {:.4}", accuracy(&cm)?);
    println!(
        "weighted F1  {:.4}",
        weighted_f1(&cm)?.value.unwrap_or(f64::NAN)
    );
    println!(
        "teacher PV   {:.4}",
        predictive_value(&cm, Role::Teacher)
            .value
            .unwrap_or(f64::NAN)
    );
    println!(
        "child PV     {:.4}",
        predictive_value(&cm, Role::Child).value.unwrap_or(f64::NAN)
    );
    println!(
        "kappa        {:.4}",
        cohens_kappa(&cm)?.value.unwrap_or(f64::NAN)
    );

    // pooling two files is elementwise; the overall row of the report is
    // computed on the pooled matrix, not the mean of per-file metrics
    let other = ConfusionMatrix::from_counts([[22, 3], [5, 20]]);
    let pooled = cm.pooled(&other);
    println!(
        "\npooled with a second file: accuracy {:.4}",
        accuracy(&pooled)?
    );
    Ok(())
}

fn main() -> classroom_speech::Result<()> {
    run()
}
