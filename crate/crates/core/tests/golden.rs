mod common;

#[test]
fn cogs_rows() {
    common::golden::cogs_rows();
}

#[test]
fn contrast_rows_are_reversals() {
    common::golden::contrast_rows_are_reversals();
}

#[test]
fn derivation_rows() {
    common::golden::derivation_rows();
}

#[test]
fn operation_rows() {
    common::golden::operation_rows();
}

#[test]
fn default_pair_maps_worked_sentences() {
    common::golden::default_pair_maps_worked_sentences();
}
