//! Deciding whether a presentation defines its target ideal.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::enumerate::{enumerate, EnumBudget};
use super::rewriting::{knuth_bendix, Cardinality};
use super::{Presentation, Word};
use crate::derivation::{counterexample, split_form};
use crate::error::{Error, Result};
use crate::green::{ideal_elements, IdealSpec};
use crate::transform::PartialMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Live-class cap for enumeration; `None` means ten times the ideal size.
    pub size: Option<usize>,
    /// Definition cap for enumeration; `None` derives it from `size`.
    pub steps: Option<usize>,
    pub kb_rules: usize,
    pub run_enumeration: bool,
    pub run_kb: bool,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            size: None,
            steps: None,
            kb_rules: 1_000_000,
            run_enumeration: true,
            run_kb: true,
        }
    }
}

impl Budgets {
    pub fn enum_budget(&self, target: usize) -> EnumBudget {
        let size = self.size.unwrap_or(10 * target);
        let mut b = EnumBudget::with_size(size);
        if let Some(steps) = self.steps {
            b.steps = steps;
        }
        b
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// The presented semigroup has a different number of elements.
    SizeMismatch {
        presented: Cardinality,
        target: usize,
    },
    /// Two words equal in the ideal but distinct in the presented semigroup.
    WordPair {
        left: Vec<String>,
        right: Vec<String>,
        reason: String,
    },
    /// An ideal element that no word over the generators represents.
    NotGenerating { missing: PartialMap },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Defines { count: usize },
    NotDefines { witness: Witness },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_defines(&self) -> bool {
        matches!(self, Verdict::Defines { .. })
    }

    pub fn is_not_defines(&self) -> bool {
        matches!(self, Verdict::NotDefines { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive { .. })
    }

    pub fn short(&self) -> &'static str {
        match self {
            Verdict::Defines { .. } => "defines",
            Verdict::NotDefines { .. } => "not-defines",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

fn check_labels(p: &Presentation, spec: &IdealSpec) -> Result<()> {
    if let Some(g) = p.generators.iter().find(|g| !spec.contains(&g.map)) {
        return Err(Error::Usage(format!(
            "generator `{}` is not an element of the ideal {spec}",
            g.symbol
        )));
    }
    if let Some(k) = p.invalid_relation() {
        let (u, v) = &p.relations[k];
        return Err(Error::Usage(format!(
            "relation {} = {} does not hold in the ideal",
            p.word_symbols(u).join(" "),
            p.word_symbols(v).join(" ")
        )));
    }
    Ok(())
}

fn first_missing(p: &Presentation, chain_len: usize, spec: &IdealSpec) -> Option<PartialMap> {
    let labels: Vec<PartialMap> = p.generators.iter().map(|g| g.map).collect();
    let mut seen: HashSet<PartialMap> = labels.iter().copied().collect();
    let mut frontier: Vec<PartialMap> = seen.iter().copied().collect();
    while let Some(f) = frontier.pop() {
        for g in &labels {
            let h = f.then(g);
            if seen.insert(h) {
                frontier.push(h);
            }
        }
    }
    if seen.len() == chain_len {
        return None;
    }
    ideal_elements(spec)
        .elements()
        .find(|f| !seen.contains(f))
        .copied()
}

/// A pair `(x_a x_b x_c, x_b x_c)` whose non-congruence follows from the
/// split-form invariant, when every relation is of Cayley form.
///
/// Words derivable from `x_b x_c` by relations whose letters all have rank
/// above `rank(bc)` keep a prefix with product `b` and a suffix with product
/// `c`; `x_a x_b x_c` has no such split.
pub fn split_form_witness(p: &Presentation, spec: &IdealSpec) -> Option<(Word, Word)> {
    if !p.is_cayley_form() {
        return None;
    }
    let floor = p.min_relation_rank()?;
    let m = spec.m;
    let top: Vec<(u32, PartialMap)> = p
        .generators
        .iter()
        .enumerate()
        .filter(|(_, g)| g.map.rank() == m)
        .map(|(i, g)| (i as u32, g.map))
        .collect();
    if top.is_empty() {
        return None;
    }
    let letter = |f: &PartialMap| top.iter().find(|(_, g)| g == f).map(|(i, _)| *i);
    let valid = |a: &PartialMap, b: &PartialMap, c: &PartialMap| {
        let bc = b.then(c);
        bc.rank() < floor && a.then(&bc) == bc && !split_form(&[*a, *b, *c], b, c, bc.rank())
    };
    let n = spec.n;
    let eps = spec.epsilon();
    if m < n && floor < m && floor > eps.max((2 * m).saturating_sub(n)) {
        if let Ok((a, b)) = counterexample(spec.fam, n, m, floor) {
            if valid(&a, &b, &b) {
                if let (Some(xa), Some(xb)) = (letter(&a), letter(&b)) {
                    return Some((vec![xa, xb, xb], vec![xb, xb]));
                }
            }
        }
    }
    for (xb, b) in &top {
        for (xc, c) in &top {
            let bc = b.then(c);
            if bc.rank() >= floor {
                continue;
            }
            for (xa, a) in &top {
                if valid(a, b, c) {
                    return Some((vec![*xa, *xb, *xc], vec![*xb, *xc]));
                }
            }
        }
    }
    None
}

/// Decides whether `p` presents the ideal `spec` under the labelling of its
/// generators.
pub fn defines(p: &Presentation, spec: &IdealSpec, budgets: &Budgets) -> Result<Verdict> {
    check_labels(p, spec)?;
    let target = ideal_elements(spec).len();
    if let Some(missing) = first_missing(p, target, spec) {
        return Ok(Verdict::NotDefines {
            witness: Witness::NotGenerating { missing },
        });
    }
    if let Some((u, v)) = split_form_witness(p, spec) {
        return Ok(Verdict::NotDefines {
            witness: Witness::WordPair {
                left: p.word_symbols(&u),
                right: p.word_symbols(&v),
                reason: "left side has no split into prefix and suffix with the right side's factor products".into(),
            },
        });
    }
    if full_table(p, target) {
        return Ok(Verdict::Defines { count: target });
    }
    let mut notes = Vec::new();
    if budgets.run_enumeration {
        let table = enumerate(p, budgets.enum_budget(target));
        if table.is_closed() {
            return Ok(size_verdict(
                Cardinality::Finite(table.class_count as u64),
                target,
            ));
        }
        notes.push(format!(
            "enumeration exceeded its budget after {} definitions",
            table.definitions
        ));
    }
    if budgets.run_kb {
        let kb = knuth_bendix(p, budgets.kb_rules);
        if kb.is_confluent() {
            return Ok(size_verdict(kb.count_normal_forms(), target));
        }
        notes.push(format!("completion stopped at {} rules", kb.rules.len()));
    }
    if notes.is_empty() {
        notes.push("no engine enabled".into());
    }
    Ok(Verdict::Inconclusive {
        reason: notes.join("; "),
    })
}

/// Every generator pair reduces to a generator and the labels are the ideal
/// without repeats, so every word equals a single generator.
fn full_table(p: &Presentation, target: usize) -> bool {
    let k = p.alphabet_len();
    let labels: HashSet<PartialMap> = p.generators.iter().map(|g| g.map).collect();
    if labels.len() != k || k != target {
        return false;
    }
    let mut covered = vec![false; k * k];
    for (u, v) in &p.relations {
        let (pair, single) = match (u.len(), v.len()) {
            (2, 1) => (u, v[0]),
            (1, 2) => (v, u[0]),
            _ => continue,
        };
        let (s, t) = (pair[0] as usize, pair[1] as usize);
        if p.label(s as u32).then(p.label(t as u32)) == *p.label(single) {
            covered[s * k + t] = true;
        }
    }
    covered.iter().all(|&c| c)
}

fn size_verdict(presented: Cardinality, target: usize) -> Verdict {
    if presented == Cardinality::Finite(target as u64) {
        Verdict::Defines { count: target }
    } else {
        Verdict::NotDefines {
            witness: Witness::SizeMismatch { presented, target },
        }
    }
}
