#![allow(dead_code)]

pub mod golden;
pub mod props;

use std::collections::BTreeMap;

use abstraction_probe::flt::{
    build_default_grammar_pair, render_source, GrammarOptions, GrammarPair, Lexicon,
};
use abstraction_probe::grammar::{
    sample_derivation_with_rng, Constraints, Derivation, DerivationChild, DerivationNode,
};
use abstraction_probe::seed::rng_from;

fn owned(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// The default pair restricted to a handful of words.
pub fn tiny_pair(
    verbs: &[(&str, &str)],
    names: &[&str],
    nouns: &[&str],
    preps: &[&str],
) -> GrammarPair {
    let lexicon = Lexicon {
        verbs: verbs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        names: owned(names),
        nouns: owned(nouns),
        prepositions: owned(preps),
        conjunctions: vec![("that".into(), "CCOMP".into())],
    };
    build_default_grammar_pair(&GrammarOptions {
        lexicon,
        ..Default::default()
    })
}

/// Samples from `seed` until the rendered source equals `sentence`.
pub fn find_derivation(
    pair: &GrammarPair,
    sentence: &str,
    c: &Constraints,
    seed: u64,
    tries: usize,
) -> Option<Derivation> {
    let mut rng = rng_from(seed);
    (0..tries).find_map(|_| {
        let d = sample_derivation_with_rng(&pair.source, &mut rng, c).ok()?;
        (render_source(&d.root.tokens()) == sentence).then_some(d)
    })
}

#[derive(Clone)]
enum Ent {
    Name(String),
    Var(usize),
}

impl Ent {
    fn lf(&self) -> String {
        match self {
            Ent::Name(n) => n.clone(),
            Ent::Var(v) => format!("x _ {v}"),
        }
    }
}

/// Builds a COGS-style logical form for a derivation of the default source
/// grammar. Variables are token positions. `None` when a name is modified,
/// which COGS cannot express.
pub struct LfBuilder<'a> {
    pair: &'a GrammarPair,
    lemmas: BTreeMap<String, String>,
    pos: usize,
    definite: Vec<(usize, String)>,
    conjuncts: Vec<String>,
}

impl<'a> LfBuilder<'a> {
    pub fn build(pair: &'a GrammarPair, lexicon: &Lexicon, d: &Derivation) -> Option<String> {
        let mut b = LfBuilder {
            pair,
            lemmas: lexicon
                .verbs
                .iter()
                .map(|(p, l)| (p.clone(), l.to_lowercase()))
                .collect(),
            pos: 0,
            definite: Vec::new(),
            conjuncts: Vec::new(),
        };
        b.chain(d.root.child_nodes().next()?)?;
        let mut s = String::new();
        for (v, n) in &b.definite {
            s.push_str(&format!("* {n} ( x _ {v} ) ; "));
        }
        s.push_str(&b.conjuncts.join(" AND "));
        Some(s)
    }

    fn lhs(&self, n: &DerivationNode) -> &str {
        &self.pair.source.production(n.production).lhs
    }

    fn leaf(&mut self, n: &DerivationNode) -> String {
        let DerivationChild::Leaf(t) = &n.children[0] else {
            panic!("expected a preterminal")
        };
        self.pos += 1;
        t.clone()
    }

    /// Returns the verb variable of the first clause.
    fn chain(&mut self, n: &DerivationNode) -> Option<usize> {
        let kids: Vec<&DerivationNode> = n.child_nodes().collect();
        match kids.as_slice() {
            [clause] => self.clause(clause),
            [cp, conj, rest] => {
                let v = self.clause(cp)?;
                self.leaf(conj);
                let next = self.chain(rest)?;
                let lemma = self.lemma_of(v);
                self.conjuncts
                    .push(format!("{lemma} . ccomp ( x _ {v} , x _ {next} )"));
                Some(v)
            }
            _ => None,
        }
    }

    fn lemma_of(&self, v: usize) -> String {
        self.conjuncts
            .iter()
            .find_map(|c| {
                let (lemma, rest) = c.split_once(" . ")?;
                rest.contains(&format!("( x _ {v} ,"))
                    .then(|| lemma.to_string())
            })
            .expect("clause has an agent")
    }

    fn clause(&mut self, n: &DerivationNode) -> Option<usize> {
        let kids: Vec<&DerivationNode> = n.child_nodes().collect();
        let subj = self.arg(kids[0])?;
        let v = self.pos;
        let past = self.leaf(kids[1]);
        let lemma = self.lemmas[&past].clone();
        self.conjuncts
            .push(format!("{lemma} . agent ( x _ {v} , {} )", subj.lf()));
        match kids.len() {
            2 => {}
            3 => {
                let obj = self.arg(kids[2])?;
                self.conjuncts
                    .push(format!("{lemma} . theme ( x _ {v} , {} )", obj.lf()));
            }
            4 => {
                let iobj = self.arg(kids[2])?;
                let obj = self.arg(kids[3])?;
                self.conjuncts
                    .push(format!("{lemma} . recipient ( x _ {v} , {} )", iobj.lf()));
                self.conjuncts
                    .push(format!("{lemma} . theme ( x _ {v} , {} )", obj.lf()));
            }
            _ => return None,
        }
        Some(v)
    }

    fn arg(&mut self, n: &DerivationNode) -> Option<Ent> {
        let kids: Vec<&DerivationNode> = n.child_nodes().collect();
        match self.lhs(n) {
            "SUBJ" | "OBJ" | "IOBJ" | "PPOBJ" if kids.len() == 1 => self.arg(kids[0]),
            "NPMOD" => self.modified(kids[0], kids[1], kids[2]),
            "PPOBJ" => self.modified(kids[0], kids[1], kids[2]),
            "NP" if kids.len() == 1 => Some(Ent::Name(self.leaf(kids[0]))),
            "NP" => {
                let det = self.leaf(kids[0]);
                let v = self.pos;
                let noun = self.leaf(kids[1]);
                if det.eq_ignore_ascii_case("the") {
                    self.definite.push((v, noun));
                } else {
                    self.conjuncts.push(format!("{noun} ( x _ {v} )"));
                }
                Some(Ent::Var(v))
            }
            _ => None,
        }
    }

    fn modified(
        &mut self,
        head: &DerivationNode,
        prep: &DerivationNode,
        arg: &DerivationNode,
    ) -> Option<Ent> {
        let h = self.arg(head)?;
        let Ent::Var(hv) = h else { return None };
        let p = self.leaf(prep);
        let a = self.arg(arg)?;
        let noun = self
            .definite
            .iter()
            .find(|(v, _)| *v == hv)
            .map(|(_, n)| n.clone())
            .or_else(|| {
                self.conjuncts.iter().find_map(|c| {
                    c.strip_suffix(&format!(" ( x _ {hv} )"))
                        .map(str::to_string)
                })
            })?;
        self.conjuncts
            .push(format!("{noun} . nmod . {p} ( x _ {hv} , {} )", a.lf()));
        Some(h)
    }
}

/// Postfix evaluator for logic expressions, built with the shunting-yard
/// algorithm. Shares nothing with the library evaluator.
pub fn postfix_eval(expr: &str, task: bool) -> bool {
    let table = |op: &str, l: bool, r: bool| -> bool {
        match (op, task) {
            ("a1", true) => l & r,
            ("b2", true) => !(l & r),
            ("c3", true) => l | r,
            ("d4", true) => !(l | r),
            ("a1", false) => l & !r,
            ("b2", false) => !l | r,
            ("c3", false) => !l & r,
            ("d4", false) => l | !r,
            _ => panic!("unknown operator {op}"),
        }
    };
    let mut output: Vec<&str> = Vec::new();
    let mut ops: Vec<&str> = Vec::new();
    for tok in expr.split_whitespace() {
        match tok {
            "True" | "False" => output.push(tok),
            "(" => ops.push(tok),
            ")" => {
                while let Some(o) = ops.pop() {
                    if o == "(" {
                        break;
                    }
                    output.push(o);
                }
            }
            op => {
                // Every binary operator has equal precedence; the input is
                // parenthesized so at most one operator is pending per level.
                while let Some(&top) = ops.last() {
                    if top == "(" {
                        break;
                    }
                    output.push(ops.pop().unwrap());
                }
                ops.push(op);
            }
        }
    }
    while let Some(o) = ops.pop() {
        output.push(o);
    }
    let mut stack: Vec<bool> = Vec::new();
    for t in output {
        match t {
            "True" => stack.push(true),
            "False" => stack.push(false),
            op => {
                let r = stack.pop().unwrap();
                let l = stack.pop().unwrap();
                stack.push(table(op, l, r));
            }
        }
    }
    assert_eq!(stack.len(), 1);
    stack[0]
}

pub fn constraints(min: u32, max: u32, require: &[&str], forbid: &[&str]) -> Constraints {
    let mut c = Constraints::recursion(min, max);
    for r in require {
        c = c.require(r);
    }
    for f in forbid {
        c = c.forbid(f);
    }
    c
}
