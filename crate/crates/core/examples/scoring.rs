//! Exact match, BLEU, MoA, expectation verdicts and learning-curve phases.

use abstraction_probe::metrics::{
    analyze_learning_curves, bleu, exact_match, expectation_verdict, moa, LearningCurve, MoaInputs,
    Prediction, VerdictThresholds,
};

fn main() -> anyhow::Result<()> {
    let golds = vec![
        ("0".to_string(), "EAT ( EMMA , CAKE , NONE )".to_string()),
        ("1".to_string(), "SEE ( DOG , NONE , NONE )".to_string()),
    ];
    let preds = vec![
        Prediction {
            id: "0".into(),
            prediction: "EAT ( EMMA ,  CAKE , NONE )".into(),
        },
        Prediction {
            id: "1".into(),
            prediction: "SEE ( CAT , NONE , NONE )".into(),
        },
    ];
    let em = exact_match(&preds, &golds)?;
    println!(
        "exact match {:.1} ({}/{})",
        em.accuracy, em.n_correct, em.n_gold
    );

    let hyps: Vec<&str> = preds.iter().map(|p| p.prediction.as_str()).collect();
    let refs: Vec<&str> = golds.iter().map(|g| g.1.as_str()).collect();
    println!("bleu {:.2}", bleu(&hyps, &refs)?);

    let m = moa(&MoaInputs {
        score_main: 88.2,
        score_control: 23.1,
        score_contrast: 15.4,
        score_full: 95.7,
    })?;
    println!("moa {m:.2}");

    let v = expectation_verdict(71.9, 18.7, 16.0, &VerdictThresholds::default());
    println!(
        "delta {:+.1} / contrast {:+.1}: {:?} {:?}",
        v.delta_main, v.delta_contrast, v.expectation1, v.expectation2
    );

    let in_task =
        LearningCurve::from_pairs(&[(0, 0.0), (5_000, 60.0), (10_000, 91.0), (60_000, 100.0)])?;
    let cross =
        LearningCurve::from_pairs(&[(0, 0.0), (20_000, 30.0), (58_000, 90.0), (80_000, 95.0)])?;
    let phase = analyze_learning_curves(&in_task, &cross, 0.9)?;
    println!(
        "90% at {} vs {}: phase difference {}",
        phase.step_in_task, phase.step_cross_task, phase.phase_difference
    );
    Ok(())
}
