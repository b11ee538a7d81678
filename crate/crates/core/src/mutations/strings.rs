//! The target-side mutations applied directly to chain strings.

use crate::flt::omit_none;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a chain target at token {token}: {message}")]
pub struct ChainError {
    pub token: usize,
    pub message: String,
}

/// Clause blocks `P ( ... )` and the connective tokens between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain<'a> {
    pub clauses: Vec<Vec<&'a str>>,
    pub connectives: Vec<&'a str>,
}

pub fn split_chain(target: &str) -> Result<Chain<'_>, ChainError> {
    let toks: Vec<&str> = target.split_whitespace().collect();
    let err = |token, message: &str| ChainError {
        token,
        message: message.to_string(),
    };
    let mut clauses = Vec::new();
    let mut connectives = Vec::new();
    let mut i = 0;
    if toks.is_empty() {
        return Err(err(0, "empty target"));
    }
    loop {
        let start = i;
        if toks.get(i).is_none_or(|t| matches!(*t, "(" | ")" | ",")) {
            return Err(err(i, "expected a predicate"));
        }
        i += 1;
        if toks.get(i) != Some(&"(") {
            return Err(err(i, "expected ("));
        }
        let mut depth = 0usize;
        loop {
            match toks.get(i) {
                None => return Err(err(i, "unbalanced parentheses")),
                Some(&"(") => depth += 1,
                Some(&")") => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                _ => {}
            }
            i += 1;
        }
        clauses.push(toks[start..=i].to_vec());
        i += 1;
        if i == toks.len() {
            break;
        }
        connectives.push(toks[i]);
        i += 1;
    }
    Ok(Chain {
        clauses,
        connectives,
    })
}

fn swap_paren(t: &str) -> &str {
    match t {
        "(" => ")",
        ")" => "(",
        other => other,
    }
}

fn reversed<'a>(toks: &[&'a str]) -> Vec<&'a str> {
    toks.iter().rev().map(|t| swap_paren(t)).collect()
}

/// Whole-string reversal with `(` and `)` swapped. An involution.
pub fn reverse_string(target: &str) -> String {
    let toks: Vec<&str> = target.split_whitespace().collect();
    reversed(&toks).join(" ")
}

fn join_chain(clauses: Vec<Vec<&str>>, connectives: &[&str]) -> String {
    let mut out: Vec<&str> = Vec::new();
    for (i, c) in clauses.into_iter().enumerate() {
        if i > 0 {
            out.push(connectives[i - 1]);
        }
        out.extend(c);
    }
    out.join(" ")
}

/// Every clause reduced to `P ( )`.
pub fn coarse_string(target: &str) -> Result<String, ChainError> {
    let ch = split_chain(target)?;
    let clauses = ch.clauses.iter().map(|c| vec![c[0], "(", ")"]).collect();
    Ok(join_chain(clauses, &ch.connectives))
}

/// Each clause reversed in place; clause order kept.
pub fn local_reverse_string(target: &str) -> Result<String, ChainError> {
    let ch = split_chain(target)?;
    let clauses = ch.clauses.iter().map(|c| reversed(c)).collect();
    Ok(join_chain(clauses, &ch.connectives))
}

/// Each following clause moves inside the previous one's argument list:
/// `P ( A ) C Q ( B )` becomes `P ( A , C Q ( B ) )`. `NONE` arguments of
/// the enclosing clauses are dropped.
pub fn nested_string(target: &str) -> Result<String, ChainError> {
    let ch = split_chain(target)?;
    let k = ch.clauses.len();
    let mut out: Vec<String> = Vec::new();
    for (i, c) in ch.clauses.iter().enumerate() {
        if i + 1 < k {
            let trimmed = omit_none(&c.join(" "));
            let mut toks: Vec<&str> = trimmed.split_whitespace().collect();
            toks.pop();
            if toks.last() != Some(&"(") {
                toks.push(",");
            }
            out.extend(toks.iter().map(|t| t.to_string()));
            out.push(ch.connectives[i].to_string());
        } else {
            out.extend(c.iter().map(|t| t.to_string()));
        }
    }
    out.extend(std::iter::repeat_n(")".to_string(), k - 1));
    Ok(out.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_clause_cases() {
        assert_eq!(reverse_string("P ( A )"), "( A ) P");
        assert_eq!(coarse_string("P ( A , B , C )").unwrap(), "P ( )");
        assert_eq!(local_reverse_string("P ( )").unwrap(), "( ) P");
        assert_eq!(nested_string("P ( A , B , C )").unwrap(), "P ( A , B , C )");
    }

    #[test]
    fn malformed_chain() {
        assert!(split_chain("P A").is_err());
        assert!(split_chain("P ( A").is_err());
        assert!(split_chain("( A ) P").is_err());
    }
}
