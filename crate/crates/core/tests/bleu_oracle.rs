use std::collections::HashMap;

use abstraction_probe::metrics::bleu;

const HYPS: [&str; 3] = [
    "EAT ( EMMA , CAKE , NONE ) CCOMP SEE ( DOG , NONE , NONE )",
    "LIKE ( LIAM , NONE )",
    "SCREAM ( ON ( BABY , TRAY ) , NONE , NONE )",
];
const REFS: [&str; 3] = [
    "EAT ( EMMA , CAKE , NONE ) CCOMP SEE ( GIRL , NONE , NONE )",
    "LIKE ( LIAM , NONE , NONE )",
    "SCREAM ( ON ( BABY , IN ( TRAY , HOUSE ) ) , NONE , NONE )",
];

fn counts(toks: &[&str], n: usize) -> HashMap<String, i64> {
    let mut m = HashMap::new();
    if toks.len() >= n {
        for i in 0..=toks.len() - n {
            *m.entry(toks[i..i + n].join("\u{1}")).or_insert(0) += 1;
        }
    }
    m
}

fn oracle(hyps: &[&str], refs: &[&str]) -> f64 {
    let mut log_sum = 0.0;
    let (mut c, mut r) = (0.0, 0.0);
    for n in 1..=4 {
        let (mut hit, mut all) = (0i64, 0i64);
        for (h, rf) in hyps.iter().zip(refs) {
            let h: Vec<&str> = h.split(' ').collect();
            let rf: Vec<&str> = rf.split(' ').collect();
            if n == 1 {
                c += h.len() as f64;
                r += rf.len() as f64;
            }
            let rc = counts(&rf, n);
            for (g, k) in counts(&h, n) {
                hit += k.min(*rc.get(&g).unwrap_or(&0));
                all += k;
            }
        }
        log_sum += (hit as f64 / all as f64).ln();
    }
    let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    100.0 * bp * (log_sum / 4.0).exp()
}

#[test]
fn corpus_bleu_matches_reference_implementation() {
    let got = bleu(&HYPS, &REFS).unwrap();
    assert!((got - oracle(&HYPS, &REFS)).abs() < 0.1, "{got}");
    // Hand computation: precisions 35/36, 29/33, 24/30, 18/27; lengths 36 vs 43.
    assert!((got - 67.64).abs() < 0.1, "{got}");
}

#[test]
fn perfect_and_disjoint() {
    assert!((bleu(&REFS, &REFS).unwrap() - 100.0).abs() < 1e-9);
    assert_eq!(bleu(&["A B C D"], &["E F G H"]).unwrap(), 0.0);
}
