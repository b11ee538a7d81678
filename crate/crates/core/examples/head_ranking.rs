//! Rank attention heads by DPC from synthetic log-probabilities and pick
//! the top ones.

use abstraction_probe::metrics::{
    dpc_report, select_top_heads, Condition, EvalSet, HeadId, HeadMode, LogProbRecord,
};

fn record(id: usize, condition: Condition, eval_set: EvalSet, lp: f64) -> LogProbRecord {
    LogProbRecord {
        id: format!("{eval_set}-{id}"),
        condition,
        eval_set,
        token_logprobs: vec![lp; 4],
        n_tokens: 4,
    }
}

fn main() -> anyhow::Result<()> {
    let heads = HeadId::all(2, 4);
    let mut records = Vec::new();
    for set in [EvalSet::TestB, EvalSet::TransferB] {
        for id in 0..10 {
            records.push(record(id, Condition::Baseline, set, -0.5));
            for (i, h) in heads.iter().enumerate() {
                // Odd heads hurt test_B more than transfer_B when pruned.
                let hurt = match (set, i % 2) {
                    (EvalSet::TestB, 1) => 0.3 + 0.01 * i as f64,
                    _ => 0.05,
                };
                records.push(record(id, Condition::Prune(*h), set, -0.5 - hurt));
            }
        }
    }
    let report = dpc_report(&records)?;
    print!("{}", report.summary(8));
    let sel = select_top_heads(&report, 4, HeadMode::Freeze)?;
    println!("\n{}", serde_json::to_string_pretty(&sel)?);
    Ok(())
}
