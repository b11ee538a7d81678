//! Conversion of COGS logical forms into the chain-structured target format.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::NONE;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CogsError {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unknown role {role:?} at offset {offset}")]
    UnknownRole { role: String, offset: usize },
    #[error("ill-formed logical form: {0}")]
    Structure(String),
    #[error("reading TSV: {0}")]
    Tsv(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CogsOptions {
    /// Output-token replacements applied after capitalization,
    /// e.g. `CAPTAIN → CAPTION`.
    #[serde(default)]
    pub spelling: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Tok<'a> {
    text: &'a str,
    offset: usize,
}

fn tokenize(lf: &str) -> Result<Vec<Tok<'_>>, CogsError> {
    let mut out = Vec::new();
    let mut it = lf.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        if c.is_whitespace() {
            continue;
        }
        if "()*,;._".contains(c) {
            out.push(Tok {
                text: &lf[i..i + 1],
                offset: i,
            });
        } else if c.is_alphanumeric() {
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = it.peek() {
                if d.is_alphanumeric() {
                    end = j + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            out.push(Tok {
                text: &lf[i..end],
                offset: i,
            });
        } else {
            return Err(CogsError::Parse {
                offset: i,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Arg {
    Var(u32),
    Name(String),
}

struct Parser<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.offset)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, CogsError> {
        Err(CogsError::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).map(|t| t.text)
    }

    fn next_ident(&mut self) -> Result<&'a str, CogsError> {
        match self.peek() {
            Some(t) if t.chars().next().is_some_and(char::is_alphanumeric) => {
                self.pos += 1;
                Ok(t)
            }
            Some(t) => self.err(format!("expected a word, found {t:?}")),
            None => self.err("expected a word, found end of input"),
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), CogsError> {
        match self.peek() {
            Some(t) if t == s => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => self.err(format!("expected {s:?}, found {t:?}")),
            None => self.err(format!("expected {s:?}, found end of input")),
        }
    }

    fn var(&mut self) -> Result<u32, CogsError> {
        self.expect("x")?;
        self.expect("_")?;
        let off = self.offset();
        let n = self.next_ident()?;
        n.parse().map_err(|_| CogsError::Parse {
            offset: off,
            message: format!("bad variable index {n:?}"),
        })
    }

    fn arg(&mut self) -> Result<Arg, CogsError> {
        if self.peek() == Some("x") && self.toks.get(self.pos + 1).map(|t| t.text) == Some("_") {
            Ok(Arg::Var(self.var()?))
        } else {
            Ok(Arg::Name(self.next_ident()?.to_string()))
        }
    }
}

#[derive(Default)]
struct Event {
    pred: String,
    roles: BTreeMap<&'static str, Arg>,
}

#[derive(Default)]
struct Lf {
    nouns: BTreeMap<u32, String>,
    events: BTreeMap<u32, Event>,
    nmods: BTreeMap<u32, Vec<(String, Arg)>>,
}

fn parse(lf: &str) -> Result<Lf, CogsError> {
    let mut p = Parser {
        toks: tokenize(lf)?,
        pos: 0,
        end: lf.len(),
    };
    let mut out = Lf::default();

    while p.peek() == Some("*") {
        p.pos += 1;
        let noun = p.next_ident()?;
        p.expect("(")?;
        let v = p.var()?;
        p.expect(")")?;
        p.expect(";")?;
        out.nouns.insert(v, noun.to_string());
    }

    loop {
        let name = p.next_ident()?;
        if p.peek() == Some("(") {
            p.pos += 1;
            let v = p.var()?;
            p.expect(")")?;
            out.nouns.insert(v, name.to_string());
        } else {
            p.expect(".")?;
            let role_off = p.offset();
            let role = p.next_ident()?;
            if role == "nmod" {
                p.expect(".")?;
                let prep = p.next_ident()?;
                p.expect("(")?;
                let v = p.var()?;
                p.expect(",")?;
                let a = p.arg()?;
                p.expect(")")?;
                out.nmods.entry(v).or_default().push((prep.to_string(), a));
            } else {
                let role: &'static str = match role {
                    "agent" => "agent",
                    "theme" => "theme",
                    "recipient" => "recipient",
                    "ccomp" => "ccomp",
                    other => {
                        return Err(CogsError::UnknownRole {
                            role: other.to_string(),
                            offset: role_off,
                        })
                    }
                };
                p.expect("(")?;
                let v = p.var()?;
                p.expect(",")?;
                let a = p.arg()?;
                p.expect(")")?;
                let ev = out.events.entry(v).or_default();
                if !ev.pred.is_empty() && ev.pred != name {
                    return Err(CogsError::Structure(format!(
                        "x _ {v} is both {} and {name}",
                        ev.pred
                    )));
                }
                ev.pred = name.to_string();
                if ev.roles.insert(role, a).is_some() {
                    return Err(CogsError::Structure(format!(
                        "x _ {v} has two {role} arguments"
                    )));
                }
            }
        }
        match p.peek() {
            None => break,
            Some("AND") => p.pos += 1,
            Some(t) => return p.err(format!("expected AND, found {t:?}")),
        }
    }
    Ok(out)
}

struct Render<'a> {
    lf: &'a Lf,
    opts: &'a CogsOptions,
}

impl Render<'_> {
    fn word(&self, w: &str) -> String {
        let up = w.to_uppercase();
        self.opts.spelling.get(&up).cloned().unwrap_or(up)
    }

    fn entity(&self, a: &Arg, out: &mut Vec<String>, depth: usize) -> Result<(), CogsError> {
        let v = match a {
            Arg::Name(n) => {
                out.push(self.word(n));
                return Ok(());
            }
            Arg::Var(v) => *v,
        };
        if depth > self.lf.nouns.len() {
            return Err(CogsError::Structure("cyclic nmod".into()));
        }
        let noun = self.lf.nouns.get(&v).ok_or_else(|| {
            CogsError::Structure(format!("x _ {v} is used as an entity but never introduced"))
        })?;
        let mods = self.lf.nmods.get(&v).map(Vec::as_slice).unwrap_or(&[]);
        // Multiple modifiers wrap the head left to right.
        for (prep, _) in mods.iter().rev() {
            out.push(self.word(prep));
            out.push("(".into());
        }
        out.push(self.word(noun));
        for (_, arg) in mods {
            out.push(",".into());
            self.entity(arg, out, depth + 1)?;
            out.push(")".into());
        }
        Ok(())
    }

    fn clause(
        &self,
        v: u32,
        out: &mut Vec<String>,
        seen: &mut BTreeSet<u32>,
    ) -> Result<(), CogsError> {
        if !seen.insert(v) {
            return Err(CogsError::Structure("cyclic ccomp chain".into()));
        }
        let ev = &self.lf.events[&v];
        out.push(self.word(&ev.pred));
        out.push("(".into());
        for (i, role) in ["agent", "theme", "recipient"].into_iter().enumerate() {
            if i > 0 {
                out.push(",".into());
            }
            match ev.roles.get(role) {
                Some(a) => self.entity(a, out, 0)?,
                None => out.push(NONE.into()),
            }
        }
        out.push(")".into());
        if let Some(c) = ev.roles.get("ccomp") {
            let Arg::Var(next) = c else {
                return Err(CogsError::Structure(
                    "ccomp argument must be a variable".into(),
                ));
            };
            if !self.lf.events.contains_key(next) {
                return Err(CogsError::Structure(format!(
                    "ccomp target x _ {next} has no predicate"
                )));
            }
            out.push("CCOMP".into());
            self.clause(*next, out, seen)?;
        }
        Ok(())
    }
}

/// Converts one COGS logical form to `PRED ( AGENT , THEME , RECIPIENT )`
/// clauses joined by `CCOMP`, missing arguments filled with `NONE`.
pub fn convert_cogs_logical_form(lf: &str, opts: &CogsOptions) -> Result<String, CogsError> {
    let parsed = parse(lf)?;
    let embedded: BTreeSet<u32> = parsed
        .events
        .values()
        .filter_map(|e| match e.roles.get("ccomp") {
            Some(Arg::Var(v)) => Some(*v),
            _ => None,
        })
        .collect();
    let roots: Vec<u32> = parsed
        .events
        .keys()
        .copied()
        .filter(|v| !embedded.contains(v))
        .collect();
    let root = match roots.as_slice() {
        [r] => *r,
        [] => return Err(CogsError::Structure("no predicate".into())),
        _ => {
            return Err(CogsError::Structure(format!(
                "{} root predicates",
                roots.len()
            )))
        }
    };
    let r = Render { lf: &parsed, opts };
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    r.clause(root, &mut out, &mut seen)?;
    if seen.len() != parsed.events.len() {
        return Err(CogsError::Structure(
            "predicates outside the ccomp chain".into(),
        ));
    }
    Ok(out.join(" "))
}

/// One line of a COGS TSV file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CogsRow {
    pub source: String,
    pub logical_form: String,
    pub generalization_type: String,
}

/// Reads a headerless three-column COGS TSV.
pub fn read_cogs_tsv(reader: impl Read) -> Result<Vec<CogsRow>, CogsError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .quoting(false)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CogsError::Tsv(format!("line {}: {e}", i + 1)))?;
        if rec.len() != 3 {
            return Err(CogsError::Tsv(format!(
                "line {}: expected 3 columns, found {}",
                i + 1,
                rec.len()
            )));
        }
        rows.push(CogsRow {
            source: rec[0].to_string(),
            logical_form: rec[1].to_string(),
            generalization_type: rec[2].to_string(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conv(lf: &str) -> Result<String, CogsError> {
        convert_cogs_logical_form(lf, &CogsOptions::default())
    }

    #[test]
    fn nmod_nests_inside_argument() {
        let lf = "* ring ( x _ 3 ) ; bed ( x _ 6 ) AND eat . agent ( x _ 1 , Emma ) \
                  AND eat . theme ( x _ 1 , x _ 3 ) AND ring . nmod . beside ( x _ 3 , x _ 6 )";
        assert_eq!(
            conv(lf).unwrap(),
            "EAT ( EMMA , BESIDE ( RING , BED ) , NONE )"
        );
    }

    #[test]
    fn chained_nmods() {
        let lf = "* baby ( x _ 1 ) ; tray ( x _ 4 ) AND * house ( x _ 7 ) ; \
                  baby . nmod . on ( x _ 1 , x _ 4 ) AND tray . nmod . in ( x _ 4 , x _ 7 ) \
                  AND scream . agent ( x _ 8 , x _ 1 )";
        // prefixes must come first; this one is malformed on purpose
        assert!(matches!(conv(lf), Err(CogsError::Parse { .. })));
        let lf = "* baby ( x _ 1 ) ; * house ( x _ 7 ) ; tray ( x _ 4 ) AND \
                  baby . nmod . on ( x _ 1 , x _ 4 ) AND tray . nmod . in ( x _ 4 , x _ 7 ) \
                  AND scream . agent ( x _ 8 , x _ 1 )";
        assert_eq!(
            conv(lf).unwrap(),
            "SCREAM ( ON ( BABY , IN ( TRAY , HOUSE ) ) , NONE , NONE )"
        );
    }

    #[test]
    fn errors_carry_offsets() {
        match conv("eat . agent ( x _ 1 Emma )") {
            Err(CogsError::Parse { offset, .. }) => assert_eq!(offset, 20),
            other => panic!("{other:?}"),
        }
        match conv("eat . patient ( x _ 1 , Emma )") {
            Err(CogsError::UnknownRole { role, offset }) => {
                assert_eq!(role, "patient");
                assert_eq!(offset, 6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tsv_rows() {
        let text =
            "A dog ate .\t* dog ( x _ 1 ) ; eat . agent ( x _ 2 , x _ 1 )\tin_distribution\n";
        let rows = read_cogs_tsv(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(
            conv(&rows[0].logical_form).unwrap(),
            "EAT ( DOG , NONE , NONE )"
        );
    }
}
