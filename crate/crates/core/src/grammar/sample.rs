use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Pcfg;
use crate::seed::rng_from;

/// Plain rejection attempts before switching to forced sampling.
pub const REJECTION_ATTEMPTS: u32 = 10_000;
/// Forced attempts after rejection gives up.
pub const FORCED_ATTEMPTS: u32 = 1_000;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    #[serde(default)]
    pub min_recursion: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_recursion: Option<u32>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub required_features: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub forbidden_features: BTreeSet<String>,
}

impl Constraints {
    pub fn recursion(min: u32, max: u32) -> Self {
        Constraints {
            min_recursion: min,
            max_recursion: Some(max),
            ..Default::default()
        }
    }

    pub fn require(mut self, tag: &str) -> Self {
        self.required_features.insert(tag.to_string());
        self
    }

    pub fn forbid(mut self, tag: &str) -> Self {
        self.forbidden_features.insert(tag.to_string());
        self
    }

    pub fn is_satisfied_by(&self, f: &FeatureSummary) -> bool {
        f.recursion >= self.min_recursion
            && self.max_recursion.is_none_or(|m| f.recursion <= m)
            && self.required_features.iter().all(|t| f.count(t) > 0)
            && self.forbidden_features.iter().all(|t| f.count(t) == 0)
    }
}

/// What a derivation did: iterative applications, tree height and counts of
/// tagged productions (modification sites and the like).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSummary {
    pub recursion: u32,
    pub height: u32,
    pub tags: BTreeMap<String, u32>,
}

impl FeatureSummary {
    pub fn count(&self, tag: &str) -> u32 {
        self.tags.get(tag).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivationChild {
    Leaf(String),
    Node(DerivationNode),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationNode {
    pub production: usize,
    /// Distance from the root (the root is at depth 0).
    pub depth: u32,
    pub children: Vec<DerivationChild>,
}

impl DerivationNode {
    pub fn height(&self) -> u32 {
        1 + self
            .child_nodes()
            .map(DerivationNode::height)
            .max()
            .unwrap_or(0)
    }

    /// Nonterminal children, in right-hand-side order.
    pub fn child_nodes(&self) -> impl Iterator<Item = &DerivationNode> {
        self.children.iter().filter_map(|c| match c {
            DerivationChild::Node(n) => Some(n),
            DerivationChild::Leaf(_) => None,
        })
    }

    pub fn push_yield(&self, out: &mut Vec<String>) {
        for c in &self.children {
            match c {
                DerivationChild::Leaf(t) => out.push(t.clone()),
                DerivationChild::Node(n) => n.push_yield(out),
            }
        }
    }

    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.push_yield(&mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub root: DerivationNode,
    pub features: FeatureSummary,
}

/// Leaf frontier read left to right.
pub fn yield_tokens(d: &Derivation) -> Vec<String> {
    d.root.tokens()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SampleError {
    #[error("constraints unsatisfiable after {attempts} attempts")]
    Unsatisfiable { attempts: u32 },
}

/// Samples one derivation satisfying `constraints`.
///
/// Tries plain sampling first, then a forced mode that steers rule choices
/// toward the requested recursion range and features.
pub fn sample_derivation(
    g: &Pcfg,
    seed: u64,
    constraints: &Constraints,
) -> Result<Derivation, SampleError> {
    sample_derivation_with_rng(g, &mut rng_from(seed), constraints)
}

pub fn sample_derivation_with_rng<R: Rng>(
    g: &Pcfg,
    rng: &mut R,
    constraints: &Constraints,
) -> Result<Derivation, SampleError> {
    let impossible = constraints
        .max_recursion
        .is_some_and(|m| m < constraints.min_recursion)
        || constraints.min_recursion > g.max_iterations()
        || constraints
            .required_features
            .intersection(&constraints.forbidden_features)
            .next()
            .is_some();
    if impossible {
        return Err(SampleError::Unsatisfiable { attempts: 0 });
    }

    let mut attempts = 0;
    for forced in [false, true] {
        let budget = if forced {
            FORCED_ATTEMPTS
        } else {
            REJECTION_ATTEMPTS
        };
        for _ in 0..budget {
            attempts += 1;
            let mut s = Sampler {
                g,
                rng: &mut *rng,
                constraints,
                forced,
                recursion: 0,
                tags: BTreeMap::new(),
            };
            if let Some(root) = s.expand(g.start(), 0) {
                let features = FeatureSummary {
                    recursion: s.recursion,
                    height: root.height(),
                    tags: s.tags,
                };
                if constraints.is_satisfied_by(&features) {
                    return Ok(Derivation { root, features });
                }
            }
        }
    }
    Err(SampleError::Unsatisfiable { attempts })
}

struct Sampler<'a, R> {
    g: &'a Pcfg,
    rng: &'a mut R,
    constraints: &'a Constraints,
    forced: bool,
    recursion: u32,
    tags: BTreeMap<String, u32>,
}

impl<R: Rng> Sampler<'_, R> {
    fn expand(&mut self, nt: &str, depth: u32) -> Option<DerivationNode> {
        let idx = self.choose(nt, depth)?;
        let p = self.g.production(idx);
        if p.iterative {
            self.recursion += 1;
        }
        if let Some(t) = &p.tag {
            *self.tags.entry(t.clone()).or_default() += 1;
        }
        let mut children = Vec::with_capacity(p.rhs.len());
        for s in &p.rhs {
            if self.g.is_nonterminal(s) {
                children.push(DerivationChild::Node(self.expand(s, depth + 1)?));
            } else {
                children.push(DerivationChild::Leaf(s.clone()));
            }
        }
        Some(DerivationNode {
            production: idx,
            depth,
            children,
        })
    }

    fn choose(&mut self, nt: &str, depth: u32) -> Option<usize> {
        let g = self.g;
        let feasible: Vec<usize> = g
            .productions_for(nt)
            .iter()
            .copied()
            .filter(|&i| {
                let p = g.production(i);
                let fits = g
                    .production_min_height(i)
                    .is_some_and(|h| depth + h <= g.max_depth());
                fits && !(p.iterative && self.recursion >= g.max_iterations())
            })
            .collect();
        if feasible.is_empty() {
            return None;
        }
        let candidates = if self.forced {
            let steered = self.steer(&feasible);
            if steered.is_empty() {
                feasible
            } else {
                steered
            }
        } else {
            feasible
        };

        let damp = g.recursion_damping().powi(self.recursion as i32);
        let weights: Vec<f64> = candidates
            .iter()
            .map(|&i| {
                let p = g.production(i);
                if p.iterative {
                    p.weight * damp
                } else {
                    p.weight
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let mut u = self.rng.gen::<f64>() * total;
        for (i, w) in candidates.iter().zip(&weights) {
            if u < *w {
                return Some(*i);
            }
            u -= w;
        }
        candidates.last().copied()
    }

    /// Narrows the choice set toward the constraints. Each filter is skipped
    /// when it would leave nothing to choose from.
    fn steer(&self, feasible: &[usize]) -> Vec<usize> {
        let g = self.g;
        let c = self.constraints;
        let mut set: Vec<usize> = feasible.to_vec();

        let narrow = |set: &mut Vec<usize>, keep: &dyn Fn(usize) -> bool| {
            let kept: Vec<usize> = set.iter().copied().filter(|&i| keep(i)).collect();
            if !kept.is_empty() {
                *set = kept;
            }
        };

        narrow(&mut set, &|i| {
            g.production(i)
                .tag
                .as_ref()
                .is_none_or(|t| !c.forbidden_features.contains(t))
        });

        let has_iter = set.iter().any(|&i| g.production(i).iterative);
        if has_iter {
            if self.recursion < c.min_recursion {
                narrow(&mut set, &|i| g.production(i).iterative);
            } else if c.max_recursion.is_some_and(|m| self.recursion >= m) {
                narrow(&mut set, &|i| !g.production(i).iterative);
            }
        }

        let missing: BTreeSet<&String> = c
            .required_features
            .iter()
            .filter(|t| self.tags.get(*t).copied().unwrap_or(0) == 0)
            .collect();
        if !missing.is_empty() {
            narrow(&mut set, &|i| {
                g.production(i)
                    .tag
                    .as_ref()
                    .is_some_and(|t| missing.contains(t))
            });
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Production;

    fn chain() -> Pcfg {
        Pcfg::new(
            "S",
            vec![
                Production::new("S", &["a"]),
                Production::new("S", &["a", "and", "S"]).iterative(),
            ],
            [("S_x".to_string(), vec!["a".into(), "and".into()])].into(),
            40,
        )
    }

    #[test]
    fn single_rule_grammar_yields_a() {
        let g = Pcfg::new(
            "S",
            vec![Production::new("S", &["a"])],
            [("S_x".to_string(), vec!["a".into()])].into(),
            4,
        );
        for seed in 0..5 {
            let d = sample_derivation(&g, seed, &Constraints::default()).unwrap();
            assert_eq!(yield_tokens(&d), vec!["a"]);
            assert_eq!(d.features.height, 1);
        }
    }

    #[test]
    fn exact_recursion_constraint() {
        let g = chain();
        let c = Constraints::recursion(3, 3);
        for seed in 0..20 {
            let d = sample_derivation(&g, seed, &c).unwrap();
            assert_eq!(d.features.recursion, 3);
            assert_eq!(yield_tokens(&d).iter().filter(|t| *t == "and").count(), 3);
        }
    }

    #[test]
    fn iteration_cap_holds() {
        let g = chain().with_recursion_damping(1.0);
        let g = {
            let mut g = g;
            g.edit(|ps, _| ps[1].weight = 1000.0);
            g
        };
        for seed in 0..50 {
            let d = sample_derivation(&g, seed, &Constraints::default()).unwrap();
            assert!(d.features.recursion <= 12);
        }
    }

    #[test]
    fn unsatisfiable_reports_attempts() {
        let g = chain();
        let c = Constraints::default().require("never");
        let err = sample_derivation(&g, 1, &c).unwrap_err();
        assert_eq!(
            err,
            SampleError::Unsatisfiable {
                attempts: REJECTION_ATTEMPTS + FORCED_ATTEMPTS
            }
        );
        let err = sample_derivation(&g, 1, &Constraints::recursion(13, 20)).unwrap_err();
        assert_eq!(err, SampleError::Unsatisfiable { attempts: 0 });
    }

    #[test]
    fn forced_mode_reaches_rare_targets() {
        // Plain sampling essentially never reaches 12 iterations here.
        let g = chain().with_recursion_damping(0.1);
        let d = sample_derivation(&g, 3, &Constraints::recursion(12, 12)).unwrap();
        assert_eq!(d.features.recursion, 12);
    }
}
