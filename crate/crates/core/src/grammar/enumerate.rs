use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use super::Pcfg;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerateError {
    #[error("language too large at depth {depth}: more than {cap} sentences")]
    TooLarge { depth: u32, cap: usize },
}

type Lang = Rc<BTreeSet<Vec<String>>>;

/// Every yield derivable with tree height at most `max_depth`.
///
/// Brute force; intended as a membership oracle for small grammars.
pub fn enumerate_language(
    g: &Pcfg,
    max_depth: u32,
    cap: usize,
) -> Result<BTreeSet<Vec<String>>, EnumerateError> {
    let mut e = Enumerator {
        g,
        cap,
        depth: max_depth,
        memo: HashMap::new(),
    };
    let lang = e.lang(g.start(), max_depth)?;
    Ok(Rc::try_unwrap(lang).unwrap_or_else(|rc| (*rc).clone()))
}

struct Enumerator<'a> {
    g: &'a Pcfg,
    cap: usize,
    depth: u32,
    memo: HashMap<(String, u32), Lang>,
}

impl Enumerator<'_> {
    fn too_large(&self) -> EnumerateError {
        EnumerateError::TooLarge {
            depth: self.depth,
            cap: self.cap,
        }
    }

    fn lang(&mut self, nt: &str, h: u32) -> Result<Lang, EnumerateError> {
        if let Some(l) = self.memo.get(&(nt.to_string(), h)) {
            return Ok(l.clone());
        }
        let mut out = BTreeSet::new();
        if h > 0 {
            for &i in self.g.productions_for(nt) {
                let p = self.g.production(i);
                let mut partial: Vec<Vec<String>> = vec![Vec::new()];
                for s in &p.rhs {
                    if self.g.is_nonterminal(s) {
                        let sub = self.lang(s, h - 1)?;
                        if sub.is_empty() {
                            partial.clear();
                            break;
                        }
                        if partial.len().saturating_mul(sub.len()) > self.cap {
                            return Err(self.too_large());
                        }
                        let mut next = Vec::with_capacity(partial.len() * sub.len());
                        for pre in &partial {
                            for tail in sub.iter() {
                                let mut v = pre.clone();
                                v.extend(tail.iter().cloned());
                                next.push(v);
                            }
                        }
                        partial = next;
                    } else {
                        for v in &mut partial {
                            v.push(s.clone());
                        }
                    }
                }
                out.extend(partial);
                if out.len() > self.cap {
                    return Err(self.too_large());
                }
            }
        }
        let rc = Rc::new(out);
        self.memo.insert((nt.to_string(), h), rc.clone());
        Ok(rc)
    }
}
