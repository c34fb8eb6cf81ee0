//! Cayley-table presentations of ideals, their rank restrictions, and the
//! engines that decide whether a presentation defines its ideal.

mod enumerate;
mod rewriting;
mod tietze;
mod verdict;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::{ideal_elements, IdealSpec};
use crate::transform::PartialMap;

pub use enumerate::{enumerate, Closure, CongruenceTable, EnumBudget};
pub use rewriting::{knuth_bendix, Cardinality, KbStatus, RewritingSystem};
pub use tietze::{tietze, TietzeMove};
pub use verdict::{defines, split_form_witness, Budgets, Verdict, Witness};

/// A word over a generator alphabet, letters are generator indices.
pub type Word = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub symbol: String,
    pub map: PartialMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<Generator>,
    pub relations: Vec<(Word, Word)>,
}

impl Presentation {
    pub fn new(generators: Vec<Generator>, relations: Vec<(Word, Word)>) -> Result<Self> {
        let p = Presentation {
            generators,
            relations,
        };
        p.validate_shape()?;
        Ok(p)
    }

    fn validate_shape(&self) -> Result<()> {
        let k = self.generators.len() as u32;
        let mut seen = HashMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            if seen.insert(g.symbol.as_str(), i).is_some() {
                return Err(Error::Usage(format!("duplicate symbol `{}`", g.symbol)));
            }
        }
        for (u, v) in &self.relations {
            if u.is_empty() || v.is_empty() {
                return Err(Error::Usage("relation with an empty side".into()));
            }
            if u.iter().chain(v).any(|&x| x >= k) {
                return Err(Error::Usage("relation uses an undeclared generator".into()));
            }
        }
        Ok(())
    }

    pub fn alphabet_len(&self) -> usize {
        self.generators.len()
    }

    pub fn label(&self, x: u32) -> &PartialMap {
        &self.generators[x as usize].map
    }

    /// Value of a nonempty word in the target monoid.
    pub fn evaluate(&self, w: &[u32]) -> Option<PartialMap> {
        let (first, rest) = w.split_first()?;
        let mut acc = *self.label(*first);
        for &x in rest {
            acc = acc.then(self.label(x));
        }
        Some(acc)
    }

    pub fn symbol_index(&self, s: &str) -> Option<u32> {
        self.generators
            .iter()
            .position(|g| g.symbol == s)
            .map(|i| i as u32)
    }

    pub fn word_symbols(&self, w: &[u32]) -> Vec<String> {
        w.iter()
            .map(|&x| self.generators[x as usize].symbol.clone())
            .collect()
    }

    pub fn parse_word(&self, symbols: &[String]) -> Result<Word> {
        symbols
            .iter()
            .map(|s| {
                self.symbol_index(s)
                    .ok_or_else(|| Error::Usage(format!("unknown symbol `{s}`")))
            })
            .collect()
    }

    /// First relation whose sides evaluate differently, if any.
    pub fn invalid_relation(&self) -> Option<usize> {
        self.relations
            .iter()
            .position(|(u, v)| self.evaluate(u) != self.evaluate(v))
    }

    /// Whether every relation has the form `x_s x_t = x_{st}` on labels, in
    /// either orientation.
    pub fn is_cayley_form(&self) -> bool {
        self.relations.iter().all(|(u, v)| {
            let (two, one) = match (u.len(), v.len()) {
                (2, 1) => (u, v),
                (1, 2) => (v, u),
                _ => return false,
            };
            self.label(two[0]).then(self.label(two[1])) == *self.label(one[0])
        })
    }

    /// Least rank among labels of letters that occur in some relation.
    pub fn min_relation_rank(&self) -> Option<usize> {
        self.relations
            .iter()
            .flat_map(|(u, v)| u.iter().chain(v))
            .map(|&x| self.label(x).rank())
            .min()
    }
}

/// Generators for the elements of `spec` with rank at least `i`, ordered by
/// rank descending and then by map order.
fn generators_from(spec: &IdealSpec, i: usize) -> Vec<PartialMap> {
    let chain = ideal_elements(spec);
    let mut maps: Vec<PartialMap> = chain
        .classes
        .iter()
        .rev()
        .filter(|c| c.rank >= i)
        .flat_map(|c| c.elements.iter().copied())
        .collect();
    maps.sort_by(|a, b| b.rank().cmp(&a.rank()).then(a.cmp(b)));
    maps
}

fn cayley_on(maps: Vec<PartialMap>) -> Presentation {
    let index: HashMap<PartialMap, u32> = maps
        .iter()
        .enumerate()
        .map(|(i, m)| (*m, i as u32))
        .collect();
    let mut relations = Vec::new();
    for (s, ms) in maps.iter().enumerate() {
        for (t, mt) in maps.iter().enumerate() {
            if let Some(&st) = index.get(&ms.then(mt)) {
                relations.push((vec![s as u32, t as u32], vec![st]));
            }
        }
    }
    let generators = maps
        .into_iter()
        .enumerate()
        .map(|(i, map)| Generator {
            symbol: format!("g{i}"),
            map,
        })
        .collect();
    Presentation {
        generators,
        relations,
    }
}

pub fn cayley(spec: &IdealSpec) -> Presentation {
    cayley_on(generators_from(spec, spec.epsilon()))
}

pub fn restriction(spec: &IdealSpec, i: usize) -> Result<Presentation> {
    if i < spec.epsilon() || i > spec.m {
        return Err(Error::Range(format!(
            "restriction index {i} outside [{}, {}]",
            spec.epsilon(),
            spec.m
        )));
    }
    Ok(cayley_on(generators_from(spec, i)))
}

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    generators: Vec<Generator>,
    relations: Vec<(Vec<String>, Vec<String>)>,
}

impl Serialize for Presentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PresentationJson {
            generators: self.generators.clone(),
            relations: self
                .relations
                .iter()
                .map(|(u, v)| (self.word_symbols(u), self.word_symbols(v)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Presentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = PresentationJson::deserialize(d)?;
        let shell = Presentation {
            generators: j.generators,
            relations: Vec::new(),
        };
        let relations = j
            .relations
            .iter()
            .map(|(u, v)| Ok((shell.parse_word(u)?, shell.parse_word(v)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Presentation::new(shell.generators, relations).map_err(D::Error::custom)
    }
}
