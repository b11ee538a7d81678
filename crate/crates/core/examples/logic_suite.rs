//! Build a small Boolean operation probe and re-derive a few labels.

use abstraction_probe::dataset::{dataset_stats, Split, SubProbe};
use abstraction_probe::logic::{
    build_logic_suite, evaluate_expression, BindingKind, LogicCounts, LogicSuiteConfig,
    OperatorBinding,
};

fn main() -> anyhow::Result<()> {
    let cfg = LogicSuiteConfig {
        seed: 7,
        sub_probe: SubProbe::Disc,
        counts: LogicCounts {
            train: 1_000,
            dev: 50,
            transfer: 200,
            supplement: 16,
            test: 50,
        },
        ..Default::default()
    };
    println!("probing operator {}", cfg.probed_symbol()?);
    let ds = build_logic_suite(&cfg)?;
    for (split, st) in dataset_stats(&ds) {
        println!(
            "{split:<11} {:>5}  True/False {:?}",
            st.count, st.label_balance
        );
    }

    let binding = OperatorBinding::default();
    for (a, c) in ds
        .split(Split::TrainA)
        .iter()
        .zip(ds.split(Split::ContrastC))
        .take(3)
    {
        let task = evaluate_expression(&a.source, &binding, BindingKind::Task)?;
        let contrast = evaluate_expression(&a.source, &binding, BindingKind::Contrast)?;
        println!(
            "\n{}\n  task {task} ({})  contrast {contrast} ({})",
            a.source, a.target, c.target
        );
    }
    Ok(())
}
