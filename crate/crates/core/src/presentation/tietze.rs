//! Elementary Tietze transformations with engine-checked side conditions.

use serde::{Deserialize, Serialize};

use super::enumerate::{enumerate, EnumBudget};
use super::rewriting::knuth_bendix;
use super::verdict::Budgets;
use super::{Generator, Presentation, Word};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move")]
pub enum TietzeMove {
    /// Add a relation that already follows from the presentation.
    T1 { lhs: Word, rhs: Word },
    /// Remove a relation that follows from the others.
    T2 { index: usize },
    /// Add a generator together with its defining word.
    T3 { symbol: String, word: Word },
    /// Remove a generator using a relation `b = w` with `b` absent from `w`.
    T4 { symbol: String },
}

/// Whether `u = v` holds in the semigroup presented by `p`. `None` when
/// neither engine settles the question within budget.
pub fn consequence(p: &Presentation, u: &[u32], v: &[u32], budgets: &Budgets) -> Option<bool> {
    if u == v {
        return Some(true);
    }
    if budgets.run_kb {
        let kb = knuth_bendix(p, budgets.kb_rules);
        if let Some(eq) = kb.word_equal(u, v) {
            return Some(eq);
        }
    }
    if budgets.run_enumeration {
        let table = enumerate(p, EnumBudget::with_size(budgets.size.unwrap_or(10_000)));
        if table.is_closed() {
            return Some(table.class_of(u) == table.class_of(v));
        }
    }
    None
}

fn require_consequence(p: &Presentation, u: &[u32], v: &[u32], budgets: &Budgets) -> Result<()> {
    match consequence(p, u, v, budgets) {
        Some(true) => Ok(()),
        Some(false) => Err(Error::Rejected(format!(
            "{} = {} is not a consequence of the remaining relations",
            p.word_symbols(u).join(" "),
            p.word_symbols(v).join(" ")
        ))),
        None => Err(Error::Rejected(
            "consequence check inconclusive within budget".into(),
        )),
    }
}

fn check_word(p: &Presentation, w: &[u32]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::Usage("empty word".into()));
    }
    if w.iter().any(|&x| x as usize >= p.alphabet_len()) {
        return Err(Error::Usage("word uses an undeclared generator".into()));
    }
    Ok(())
}

pub fn tietze(p: &Presentation, mv: &TietzeMove, budgets: &Budgets) -> Result<Presentation> {
    match mv {
        TietzeMove::T1 { lhs, rhs } => {
            check_word(p, lhs)?;
            check_word(p, rhs)?;
            require_consequence(p, lhs, rhs, budgets)?;
            let mut q = p.clone();
            q.relations.push((lhs.clone(), rhs.clone()));
            Ok(q)
        }
        TietzeMove::T2 { index } => {
            if *index >= p.relations.len() {
                return Err(Error::Usage(format!("no relation with index {index}")));
            }
            let mut q = p.clone();
            let (u, v) = q.relations.remove(*index);
            require_consequence(&q, &u, &v, budgets)?;
            Ok(q)
        }
        TietzeMove::T3 { symbol, word } => {
            check_word(p, word)?;
            if p.symbol_index(symbol).is_some() {
                return Err(Error::Usage(format!("symbol `{symbol}` already in use")));
            }
            let map = p.evaluate(word).expect("nonempty word");
            let mut q = p.clone();
            let b = q.generators.len() as u32;
            q.generators.push(Generator {
                symbol: symbol.clone(),
                map,
            });
            q.relations.push((vec![b], word.clone()));
            Ok(q)
        }
        TietzeMove::T4 { symbol } => {
            let b = p
                .symbol_index(symbol)
                .ok_or_else(|| Error::Usage(format!("unknown symbol `{symbol}`")))?;
            let pos = p
                .relations
                .iter()
                .position(|(u, v)| {
                    (u.as_slice() == [b] && !v.contains(&b))
                        || (v.as_slice() == [b] && !u.contains(&b))
                })
                .ok_or_else(|| {
                    Error::Rejected(format!(
                        "no relation `{symbol} = w` with `{symbol}` absent from w"
                    ))
                })?;
            let (u, v) = &p.relations[pos];
            let w = if u.as_slice() == [b] {
                v.clone()
            } else {
                u.clone()
            };
            let shift = |x: u32| if x > b { x - 1 } else { x };
            let substitute = |word: &Word| -> Word {
                word.iter()
                    .flat_map(|&x| {
                        if x == b {
                            w.iter().map(|&y| shift(y)).collect::<Vec<_>>()
                        } else {
                            vec![shift(x)]
                        }
                    })
                    .collect()
            };
            let relations = p
                .relations
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != pos)
                .map(|(_, (u, v))| (substitute(u), substitute(v)))
                .collect();
            let generators = p
                .generators
                .iter()
                .enumerate()
                .filter(|&(i, _)| i as u32 != b)
                .map(|(_, g)| g.clone())
                .collect();
            Presentation::new(generators, relations)
        }
    }
}
