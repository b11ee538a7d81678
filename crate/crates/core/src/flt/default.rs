use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{GrammarPair, RuleImage, CONCAT_CLASS, CONJ_CLASS, NONE, OTHER_CLASS};
use crate::grammar::{Pcfg, Production};

/// Terminal inventory of the default grammar pair. Verbs and conjunctions
/// are `(source, target)` pairs; names, nouns and prepositions map to their
/// upper-cased form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    pub verbs: Vec<(String, String)>,
    pub names: Vec<String>,
    pub nouns: Vec<String>,
    pub prepositions: Vec<String>,
    pub conjunctions: Vec<(String, String)>,
}

fn owned(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

impl Default for Lexicon {
    fn default() -> Self {
        let verbs = [
            ("liked", "LIKE"),
            ("saw", "SEE"),
            ("admired", "ADMIRE"),
            ("meant", "MEAN"),
            ("froze", "FREEZE"),
            ("ate", "EAT"),
            ("screamed", "SCREAM"),
            ("helped", "HELP"),
            ("hoped", "HOPE"),
            ("preferred", "PREFER"),
            ("gave", "GIVE"),
            ("sold", "SELL"),
            ("sent", "SEND"),
            ("lent", "LEND"),
            ("offered", "OFFER"),
            ("passed", "PASS"),
            ("handed", "HAND"),
            ("brought", "BRING"),
            ("painted", "PAINT"),
            ("cleaned", "CLEAN"),
            ("found", "FIND"),
            ("noticed", "NOTICE"),
            ("touched", "TOUCH"),
            ("burned", "BURN"),
            ("rolled", "ROLL"),
            ("smiled", "SMILE"),
            ("laughed", "LAUGH"),
            ("slept", "SLEEP"),
            ("ran", "RUN"),
            ("walked", "WALK"),
            ("called", "CALL"),
            ("knew", "KNOW"),
        ];
        Lexicon {
            verbs: verbs
                .iter()
                .map(|(s, t)| (s.to_string(), t.to_string()))
                .collect(),
            names: owned(&[
                "Emma",
                "Liam",
                "Daniel",
                "James",
                "Olivia",
                "Noah",
                "Ava",
                "Mason",
                "Sophia",
                "Lucas",
                "Mia",
                "Ethan",
                "Isabella",
                "Logan",
                "Charlotte",
                "Oliver",
                "Amelia",
                "Elijah",
                "Harper",
                "Benjamin",
            ]),
            nouns: owned(&[
                "girl", "dog", "rose", "ring", "bed", "baby", "tray", "house", "lion", "captain",
                "cake", "boy", "cat", "table", "box", "chair", "book", "cookie", "monkey",
                "teacher", "doctor", "farmer", "king", "child", "hero", "pencil", "bottle",
                "donut", "lamp", "basket", "bowl", "horse", "duck", "frog", "shelf", "car",
                "drawer", "room", "garden", "rabbit",
            ]),
            prepositions: owned(&["on", "in", "beside"]),
            conjunctions: vec![("that".into(), "CCOMP".into())],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrammarOptions {
    pub lexicon: Lexicon,
    /// Base weight of the clause-chaining rule; every other rule has weight 1.
    pub chain_weight: f64,
    /// Adds passive clauses (`OBJ was VERB by SUBJ`).
    pub passive: bool,
    /// Bound on derivation tree height.
    pub max_depth: u32,
}

impl Default for GrammarOptions {
    fn default() -> Self {
        GrammarOptions {
            lexicon: Lexicon::default(),
            chain_weight: 2.5,
            passive: false,
            max_depth: 40,
        }
    }
}

#[derive(Default)]
struct Builder {
    src: Vec<Production>,
    tgt: Vec<Production>,
    images: Vec<RuleImage>,
    tgt_index: HashMap<(String, Vec<String>), usize>,
}

impl Builder {
    fn rule(&mut self, src: Production, tgt: Option<(&str, &[&str], &[usize])>) {
        let image = match tgt {
            None => RuleImage::Exempt,
            Some((lhs, rhs, children)) => {
                let key = (lhs.to_string(), rhs.iter().map(|s| s.to_string()).collect());
                let idx = match self.tgt_index.get(&key) {
                    Some(&i) => i,
                    None => {
                        let mut p = Production::new(lhs, rhs).weight(src.weight);
                        p.iterative = src.iterative;
                        self.tgt.push(p);
                        self.tgt_index.insert(key, self.tgt.len() - 1);
                        self.tgt.len() - 1
                    }
                };
                RuleImage::Rule {
                    target: idx,
                    children: children.to_vec(),
                }
            }
        };
        self.src.push(src);
        self.images.push(image);
    }
}

const CLAUSE3: [&str; 8] = [
    "PREDICATE",
    "(",
    "AGENT",
    ",",
    "THEME",
    ",",
    "RECIPIENT",
    ")",
];
const CLAUSE2: [&str; 8] = ["PREDICATE", "(", "AGENT", ",", "THEME", ",", NONE, ")"];
const CLAUSE1: [&str; 8] = ["PREDICATE", "(", "AGENT", ",", NONE, ",", NONE, ")"];

/// The default pair: an English-like source grammar and a chain-structured
/// target grammar whose clauses read `PRED ( AGENT , THEME , RECIPIENT )`.
pub fn build_default_grammar_pair(opts: &GrammarOptions) -> GrammarPair {
    let lex = &opts.lexicon;
    let mut b = Builder::default();
    let p = Production::new;

    b.rule(p("S", &["CHAIN", "."]), Some(("ROOT", &["CHAIN"], &[0])));
    b.rule(p("CHAIN", &["CLAUSE"]), Some(("CHAIN", &["CLAUSE"], &[0])));
    b.rule(
        p("CHAIN", &["CPCLAUSE", "CONJ", "CHAIN"])
            .iterative()
            .weight(opts.chain_weight),
        Some(("CHAIN", &["CPCLAUSE", "CONCAT", "CHAIN"], &[0, 1, 2])),
    );
    b.rule(
        p("CPCLAUSE", &["SUBJ", "VERB"]),
        Some(("CPCLAUSE", &CLAUSE1, &[1, 0])),
    );
    b.rule(
        p("CLAUSE", &["SUBJ", "VERB"]),
        Some(("CLAUSE", &CLAUSE1, &[1, 0])),
    );
    b.rule(
        p("CLAUSE", &["SUBJ", "VERB", "OBJ"]),
        Some(("CLAUSE", &CLAUSE2, &[1, 0, 2])),
    );
    b.rule(
        p("CLAUSE", &["SUBJ", "VERB", "IOBJ", "OBJ"]),
        Some(("CLAUSE", &CLAUSE3, &[1, 0, 3, 2])),
    );
    if opts.passive {
        b.rule(
            p("CLAUSE", &["OBJ", "was", "VERB", "by", "SUBJ"]),
            Some(("CLAUSE", &CLAUSE2, &[1, 2, 0])),
        );
        b.rule(
            p(
                "CLAUSE",
                &["OBJ", "was", "VERB", "to", "IOBJ", "by", "SUBJ"],
            ),
            Some(("CLAUSE", &CLAUSE3, &[1, 3, 0, 2])),
        );
    }
    b.rule(p("SUBJ", &["NP"]), Some(("AGENT", &["ENTITY"], &[0])));
    b.rule(
        p("SUBJ", &["NPMOD"]).tagged("subj_mod"),
        Some(("AGENT", &["ENTMOD"], &[0])),
    );
    b.rule(p("OBJ", &["NP"]), Some(("THEME", &["ENTITY"], &[0])));
    b.rule(
        p("OBJ", &["NPMOD"]).tagged("obj_mod"),
        Some(("THEME", &["ENTMOD"], &[0])),
    );
    b.rule(p("IOBJ", &["NP"]), Some(("RECIPIENT", &["ENTITY"], &[0])));
    b.rule(p("NP", &["NAME"]), Some(("ENTITY", &["ENAME"], &[0])));
    b.rule(
        p("NP", &["DET", "NOUN"]),
        Some(("ENTITY", &["ENOUN"], &[1])),
    );
    b.rule(
        p("NPMOD", &["NP", "PREP", "PPOBJ"]),
        Some((
            "ENTMOD",
            &["PREPOSITION", "(", "ENTITY", ",", "PPOBJ", ")"],
            &[1, 0, 2],
        )),
    );
    b.rule(p("PPOBJ", &["NP"]), Some(("PPOBJ", &["ENTITY"], &[0])));
    b.rule(
        p("PPOBJ", &["NP", "PREP", "NP"]).tagged("pp_nest"),
        Some((
            "PPOBJ",
            &["PREPOSITION", "(", "ENTITY", ",", "ENTITY", ")"],
            &[1, 0, 2],
        )),
    );
    b.rule(p("DET", &["a"]), None);
    b.rule(p("DET", &["the"]), None);
    for (s, t) in &lex.verbs {
        b.rule(p("VERB", &[s]), Some(("PREDICATE", &[t], &[])));
    }
    for n in &lex.names {
        b.rule(p("NAME", &[n]), Some(("ENAME", &[&n.to_uppercase()], &[])));
    }
    for n in &lex.nouns {
        b.rule(p("NOUN", &[n]), Some(("ENOUN", &[&n.to_uppercase()], &[])));
    }
    for w in &lex.prepositions {
        b.rule(
            p("PREP", &[w]),
            Some(("PREPOSITION", &[&w.to_uppercase()], &[])),
        );
    }
    for (s, t) in &lex.conjunctions {
        b.rule(p("CONJ", &[s]), Some(("CONCAT", &[t], &[])));
    }

    let mut src_other = owned(&[".", "a", "the"]);
    if opts.passive {
        src_other.extend(owned(&["was", "by", "to"]));
    }
    let mut src_classes = BTreeMap::new();
    src_classes.insert(
        "S_v".to_string(),
        lex.verbs.iter().map(|v| v.0.clone()).collect(),
    );
    src_classes.insert(
        "S_n".to_string(),
        lex.names.iter().chain(&lex.nouns).cloned().collect(),
    );
    src_classes.insert("S_prep".to_string(), lex.prepositions.clone());
    src_classes.insert(
        CONJ_CLASS.to_string(),
        lex.conjunctions.iter().map(|c| c.0.clone()).collect(),
    );
    src_classes.insert(OTHER_CLASS.to_string(), src_other);

    let upper = |xs: &[String]| xs.iter().map(|s| s.to_uppercase()).collect::<Vec<_>>();
    let mut tgt_classes = BTreeMap::new();
    tgt_classes.insert(
        "S_P".to_string(),
        lex.verbs.iter().map(|v| v.1.clone()).collect(),
    );
    let mut ents = upper(&lex.names);
    ents.extend(upper(&lex.nouns));
    tgt_classes.insert("S_E".to_string(), ents);
    tgt_classes.insert("S_PREP".to_string(), upper(&lex.prepositions));
    tgt_classes.insert(
        CONCAT_CLASS.to_string(),
        lex.conjunctions.iter().map(|c| c.1.clone()).collect(),
    );
    tgt_classes.insert(OTHER_CLASS.to_string(), owned(&["(", ")", ",", NONE]));

    GrammarPair {
        source: Pcfg::new("S", b.src, src_classes, opts.max_depth),
        target: Pcfg::new("ROOT", b.tgt, tgt_classes, opts.max_depth),
        images: b.images,
    }
}
