use super::{constraints, find_derivation, tiny_pair};
use abstraction_probe::flt::{
    convert_cogs_logical_form, map_derivation_to_target, omit_none, CogsOptions,
};
use abstraction_probe::logic::{evaluate_expression, BindingKind, OperatorBinding};
use abstraction_probe::mutations::{
    coarse_string, local_reverse_string, nested_string, reverse_string,
};

const TRAIN_ROW: &str =
    "False c3 ( ( ( False a1 ( ( ( False b2 ( True d4 True ) ) d4 True ) d4 True ) ) d4 False ) b2 False )";
const TRANSFER_ROW: &str =
    "( ( False c3 ( False b2 False ) ) b2 True ) d4 ( True b2 ( ( False b2 ( False b2 False ) ) c3 True ) )";
const TEST_ROW: &str =
    "( True b2 ( ( False a1 False ) d4 False ) ) a1 ( False c3 ( ( ( True a1 True ) c3 True ) a1 True ) )";

pub fn cogs_rows() {
    let plain = CogsOptions::default();
    assert_eq!(
        convert_cogs_logical_form(
            "rose ( x _ 1 ) AND help . theme ( x _ 3 , x _ 1 ) AND help . agent ( x _ 3 , x _ 6 ) AND dog ( x _ 6 )",
            &plain
        )
        .unwrap(),
        "HELP ( DOG , ROSE , NONE )"
    );
    let mut sic = CogsOptions::default();
    sic.spelling.insert("CAPTAIN".into(), "CAPTION".into());
    let captain = "* captain ( x _ 1 ) ; eat . agent ( x _ 2 , x _ 1 )";
    assert_eq!(
        convert_cogs_logical_form(captain, &sic).unwrap(),
        "EAT ( CAPTION , NONE , NONE )"
    );
    assert_eq!(
        convert_cogs_logical_form(captain, &plain).unwrap(),
        "EAT ( CAPTAIN , NONE , NONE )"
    );
    assert_eq!(
        convert_cogs_logical_form(
            "* dog ( x _ 4 ) ; hope . agent ( x _ 1 , Liam ) AND hope . ccomp ( x _ 1 , x _ 5 ) AND prefer . agent ( x _ 5 , x _ 4 )",
            &plain
        )
        .unwrap(),
        "HOPE ( LIAM , NONE , NONE ) CCOMP PREFER ( DOG , NONE , NONE )"
    );
}

pub fn contrast_rows_are_reversals() {
    assert_eq!(
        reverse_string("INCURVE ( SOKE ) LG UPON ( SOON ) LG BIBB ( BAN ) LG GOLADAR ( ACETUM )"),
        "( ACETUM ) GOLADAR LG ( BAN ) BIBB LG ( SOON ) UPON LG ( SOKE ) INCURVE"
    );
    assert_eq!(
        reverse_string("CORD ( ABOVE ( SAFE , PODDY ) , PIAL , SOON )"),
        "( SOON , PIAL , ( PODDY , SAFE ) ABOVE ) CORD"
    );
}

pub fn derivation_rows() {
    let chain = "CLAN ( BAN ) LG INCURVE ( SOKE ) LG UPON ( SOON , GOALDER , BIBB )";
    assert_eq!(
        coarse_string(chain).unwrap(),
        "CLAN ( ) LG INCURVE ( ) LG UPON ( )"
    );
    assert_eq!(
        local_reverse_string(chain).unwrap(),
        "( BAN ) CLAN LG ( SOKE ) INCURVE LG ( BIBB , GOALDER , SOON ) UPON"
    );
    assert_eq!(
        nested_string(chain).unwrap(),
        "CLAN ( BAN , LG INCURVE ( SOKE , LG UPON ( SOON , GOALDER , BIBB ) ) )"
    );
    // With NONE slots present, enclosing clauses drop theirs.
    let padded = "CLAN ( BAN , NONE , NONE ) LG INCURVE ( SOKE , NONE , NONE ) LG UPON ( SOON , GOALDER , BIBB )";
    assert_eq!(
        nested_string(padded).unwrap(),
        "CLAN ( BAN , LG INCURVE ( SOKE , LG UPON ( SOON , GOALDER , BIBB ) ) )"
    );
    assert_eq!(
        omit_none(&local_reverse_string(padded).unwrap()),
        "( BAN ) CLAN LG ( SOKE ) INCURVE LG ( BIBB , GOALDER , SOON ) UPON"
    );
}

pub fn operation_rows() {
    let b = OperatorBinding::default();
    let task = |s| evaluate_expression(s, &b, BindingKind::Task).unwrap();
    assert!(task(TRAIN_ROW));
    assert!(task(TRANSFER_ROW));
    assert!(!task(TEST_ROW));
    assert!(!evaluate_expression(TRAIN_ROW, &b, BindingKind::Contrast).unwrap());
}

pub fn default_pair_maps_worked_sentences() {
    let cases: [(&str, _, &str); 3] = [
        (
            "Emma liked that a girl saw .",
            (
                tiny_pair(
                    &[("liked", "LIKE"), ("saw", "SEE")],
                    &["Emma"],
                    &["girl"],
                    &["on"],
                ),
                constraints(1, 1, &[], &["subj_mod", "obj_mod"]),
                10,
            ),
            "LIKE ( EMMA , NONE , NONE ) CCOMP SEE ( GIRL , NONE , NONE )",
        ),
        (
            "Emma ate the ring beside a bed .",
            (
                tiny_pair(&[("ate", "EAT")], &["Emma"], &["ring", "bed"], &["beside"]),
                constraints(0, 0, &["obj_mod"], &["subj_mod", "pp_nest"]),
                10,
            ),
            "EAT ( EMMA , BESIDE ( RING , BED ) , NONE )",
        ),
        (
            "The baby on a tray in the house screamed .",
            (
                tiny_pair(
                    &[("screamed", "SCREAM")],
                    &["Emma"],
                    &["baby", "tray", "house"],
                    &["on", "in"],
                ),
                constraints(0, 0, &["subj_mod", "pp_nest"], &["obj_mod"]),
                1260,
            ),
            "SCREAM ( ON ( BABY , IN ( TRAY , HOUSE ) ) , NONE , NONE )",
        ),
    ];
    for (sentence, (pair, c, seed), target) in cases {
        let d = find_derivation(&pair, sentence, &c, seed, 2_000_000)
            .unwrap_or_else(|| panic!("no derivation for {sentence}"));
        assert_eq!(map_derivation_to_target(&pair, &d).unwrap(), target);
    }
}
