//! Derivation certificates between words over ideal elements, and the
//! constructions that produce them.
//!
//! A word is a sequence of maps; the letter `x_s` is identified with its label
//! `s`. Every step applies one Cayley relation `x_s x_t = x_{st}`: forward
//! contracts the pair, backward expands the single letter.

mod invariance;
pub mod lemmas;
mod reduce;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::{product, PartialMap};

pub use invariance::{
    bounded_invariance, counterexample, split_form, top_witness, InvarianceBudget, InvarianceReport,
};
pub use lemmas::{
    admissible, apply_rule, equalize_pairs, reduce_triple, split_high_rank, triple_to_pair,
    RuleKind, RuleParams,
};
pub use reduce::reduce_word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Fwd,
    Bwd,
}

/// One application of `x_s x_t = x_{st}` at a word position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub pos: usize,
    pub lhs: Vec<PartialMap>,
    pub rhs: Vec<PartialMap>,
    pub dir: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub window: (usize, usize),
    pub start: Vec<PartialMap>,
    pub steps: Vec<Step>,
    pub end: Vec<PartialMap>,
    /// Case tags recorded by the constructions.
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("step {step}: {reason}")]
pub struct CheckFailure {
    /// Index of the failing step; `steps.len()` for endpoint failures.
    pub step: usize,
    pub reason: String,
}

impl Derivation {
    pub fn empty(word: Vec<PartialMap>, window: (usize, usize)) -> Self {
        Derivation {
            window,
            start: word.clone(),
            steps: Vec::new(),
            end: word,
            notes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The same derivation read from end to start.
    pub fn reversed(&self) -> Derivation {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| Step {
                dir: match s.dir {
                    Direction::Fwd => Direction::Bwd,
                    Direction::Bwd => Direction::Fwd,
                },
                ..s.clone()
            })
            .collect();
        Derivation {
            window: self.window,
            start: self.end.clone(),
            steps,
            end: self.start.clone(),
            notes: self.notes.clone(),
        }
    }

    /// Appends `other`, whose start must equal this end.
    pub fn then(mut self, other: &Derivation) -> Result<Derivation> {
        if self.end != other.start {
            return Err(Error::Usage("derivations do not chain".into()));
        }
        self.window = (
            self.window.0.min(other.window.0),
            self.window.1.max(other.window.1),
        );
        self.steps.extend(other.steps.iter().cloned());
        self.end = other.end.clone();
        self.notes.extend(other.notes.iter().cloned());
        Ok(self)
    }

    /// Embeds this derivation between a fixed prefix and suffix.
    pub fn in_context(&self, prefix: &[PartialMap], suffix: &[PartialMap]) -> Derivation {
        let wrap = |w: &[PartialMap]| -> Vec<PartialMap> {
            prefix.iter().chain(w).chain(suffix).copied().collect()
        };
        Derivation {
            window: self.window,
            start: wrap(&self.start),
            steps: self
                .steps
                .iter()
                .map(|s| Step {
                    pos: s.pos + prefix.len(),
                    ..s.clone()
                })
                .collect(),
            end: wrap(&self.end),
            notes: self.notes.clone(),
        }
    }

    /// Every intermediate word, start first.
    pub fn words(&self) -> std::result::Result<Vec<Vec<PartialMap>>, CheckFailure> {
        let mut w = self.start.clone();
        let mut out = vec![w.clone()];
        for (i, s) in self.steps.iter().enumerate() {
            w = apply_step(&w, s).map_err(|reason| CheckFailure { step: i, reason })?;
            out.push(w.clone());
        }
        Ok(out)
    }
}

fn apply_step(w: &[PartialMap], s: &Step) -> std::result::Result<Vec<PartialMap>, String> {
    let (from, to) = match s.dir {
        Direction::Fwd => (&s.lhs, &s.rhs),
        Direction::Bwd => (&s.rhs, &s.lhs),
    };
    if s.pos + from.len() > w.len() || w[s.pos..s.pos + from.len()] != from[..] {
        return Err(format!("relation side not found at position {}", s.pos));
    }
    let mut out = w[..s.pos].to_vec();
    out.extend_from_slice(to);
    out.extend_from_slice(&w[s.pos + from.len()..]);
    Ok(out)
}

/// Verifies every invariant of a derivation.
pub fn check(d: &Derivation) -> std::result::Result<(), CheckFailure> {
    let (lo, hi) = d.window;
    let fail = |step: usize, reason: String| Err(CheckFailure { step, reason });
    if d.start.is_empty() {
        return fail(0, "empty start word".into());
    }
    let n = d.start[0].n();
    let mut w = d.start.clone();
    for (i, s) in d.steps.iter().enumerate() {
        if s.lhs.len() != 2 || s.rhs.len() != 1 {
            return fail(i, "relation is not of the form x_s x_t = x_st".into());
        }
        if s.lhs.iter().chain(&s.rhs).any(|f| f.n() != n) {
            return fail(i, "letter on a different ground set".into());
        }
        if s.lhs[0].then(&s.lhs[1]) != s.rhs[0] {
            return fail(i, "relation sides differ in the monoid".into());
        }
        for f in s.lhs.iter().chain(&s.rhs) {
            let r = f.rank();
            if r < lo || r > hi {
                return fail(
                    i,
                    format!("letter {f} of rank {r} outside window [{lo}, {hi}]"),
                );
            }
        }
        w = match apply_step(&w, s) {
            Ok(w) => w,
            Err(reason) => return fail(i, reason),
        };
    }
    if w != d.end {
        return fail(
            d.steps.len(),
            "steps do not arrive at the stated end word".into(),
        );
    }
    if product(&d.start) != product(&d.end) {
        return fail(d.steps.len(), "endpoints evaluate differently".into());
    }
    Ok(())
}

pub fn is_valid(d: &Derivation) -> bool {
    check(d).is_ok()
}

/// Incremental construction of a derivation by naming successive words.
#[derive(Clone, Debug)]
pub struct Builder {
    d: Derivation,
}

impl Builder {
    pub fn new(start: Vec<PartialMap>, window: (usize, usize)) -> Self {
        Builder {
            d: Derivation::empty(start, window),
        }
    }

    pub fn word(&self) -> &[PartialMap] {
        &self.d.end
    }

    pub fn note(&mut self, tag: impl Into<String>) {
        self.d.notes.push(tag.into());
    }

    fn push(&mut self, pos: usize, s: PartialMap, t: PartialMap, dir: Direction) -> Result<()> {
        let st = s.then(&t);
        let (lo, hi) = self.d.window;
        for f in [s, t, st] {
            if f.rank() < lo || f.rank() > hi {
                return Err(Error::Precondition(format!(
                    "construction needs letter {f} of rank {} outside window [{lo}, {hi}]",
                    f.rank()
                )));
            }
        }
        let step = Step {
            pos,
            lhs: vec![s, t],
            rhs: vec![st],
            dir,
        };
        self.d.end = apply_step(&self.d.end, &step).map_err(Error::Precondition)?;
        self.d.steps.push(step);
        Ok(())
    }

    /// Replaces the letter at `pos` by the pair `s t`.
    pub fn expand(&mut self, pos: usize, s: PartialMap, t: PartialMap) -> Result<()> {
        if self.d.end.get(pos) != Some(&s.then(&t)) {
            return Err(Error::Precondition(format!(
                "letter at {pos} is not the product {s}·{t}"
            )));
        }
        self.push(pos, s, t, Direction::Bwd)
    }

    /// Replaces the pair at `pos` by its product.
    pub fn contract(&mut self, pos: usize) -> Result<()> {
        let w = &self.d.end;
        if pos + 1 >= w.len() {
            return Err(Error::Precondition(format!("no pair at position {pos}")));
        }
        let (s, t) = (w[pos], w[pos + 1]);
        self.push(pos, s, t, Direction::Fwd)
    }

    /// Moves to `to`, which must differ from the current word by one expansion,
    /// one contraction, or a refactorisation of one adjacent pair.
    pub fn go(&mut self, to: &[PartialMap]) -> Result<()> {
        let cur = self.d.end.clone();
        if cur == to {
            return Ok(());
        }
        let p = cur.iter().zip(to).take_while(|(a, b)| a == b).count();
        let bad = || {
            Err(Error::Precondition(format!(
                "cannot move from {} to {} in one relation",
                show(&cur),
                show(to)
            )))
        };
        if to.len() == cur.len() + 1 {
            for q in 0..cur.len() {
                if cur[..q] == to[..q]
                    && cur[q + 1..] == to[q + 2..]
                    && cur[q] == to[q].then(&to[q + 1])
                {
                    return self.expand(q, to[q], to[q + 1]);
                }
            }
            bad()
        } else if to.len() + 1 == cur.len() {
            for q in 0..cur.len() - 1 {
                if cur[..q] == to[..q]
                    && cur[q + 2..] == to[q + 1..]
                    && to[q] == cur[q].then(&cur[q + 1])
                {
                    return self.contract(q);
                }
            }
            bad()
        } else if to.len() == cur.len() {
            let q = p;
            if q + 1 < cur.len()
                && cur[q + 2..] == to[q + 2..]
                && cur[q].then(&cur[q + 1]) == to[q].then(&to[q + 1])
            {
                self.contract(q)?;
                return self.expand(q, to[q], to[q + 1]);
            }
            bad()
        } else {
            bad()
        }
    }

    /// Visits each word in turn.
    pub fn path(&mut self, words: &[Vec<PartialMap>]) -> Result<()> {
        for w in words {
            self.go(w)?;
        }
        Ok(())
    }

    /// Splices a derivation that starts at the current word's factor at `pos`.
    pub fn splice(&mut self, pos: usize, sub: &Derivation) -> Result<()> {
        let w = self.d.end.clone();
        let k = sub.start.len();
        if pos + k > w.len() || w[pos..pos + k] != sub.start[..] {
            return Err(Error::Precondition("sub-derivation does not match".into()));
        }
        let (lo, hi) = self.d.window;
        if sub.window.0 < lo || sub.window.1 > hi {
            return Err(Error::Precondition("sub-derivation window too wide".into()));
        }
        let ctx = sub.in_context(&w[..pos], &w[pos + k..]);
        self.d.steps.extend(ctx.steps);
        self.d.end = ctx.end;
        self.d.notes.extend(ctx.notes);
        Ok(())
    }

    pub fn finish(self) -> Derivation {
        self.d
    }
}

pub(crate) fn show(w: &[PartialMap]) -> String {
    w.iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    pos: usize,
    rel: (Vec<String>, Vec<String>),
    dir: Direction,
}

#[derive(Serialize, Deserialize)]
struct DerivationJson {
    window: (usize, usize),
    alphabet: BTreeMap<String, PartialMap>,
    start: Vec<String>,
    steps: Vec<StepJson>,
    end: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

impl Derivation {
    fn letters(&self) -> Vec<PartialMap> {
        let mut all: Vec<PartialMap> = self
            .start
            .iter()
            .chain(&self.end)
            .chain(self.steps.iter().flat_map(|s| s.lhs.iter().chain(&s.rhs)))
            .copied()
            .collect();
        all.sort_by(|a, b| b.rank().cmp(&a.rank()).then(a.cmp(b)));
        all.dedup();
        all
    }
}

impl Serialize for Derivation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let letters = self.letters();
        let sym = |f: &PartialMap| format!("g{}", letters.iter().position(|g| g == f).unwrap());
        let word = |w: &[PartialMap]| w.iter().map(sym).collect::<Vec<_>>();
        DerivationJson {
            window: self.window,
            alphabet: letters
                .iter()
                .enumerate()
                .map(|(i, f)| (format!("g{i}"), *f))
                .collect(),
            start: word(&self.start),
            steps: self
                .steps
                .iter()
                .map(|st| StepJson {
                    pos: st.pos,
                    rel: (word(&st.lhs), word(&st.rhs)),
                    dir: st.dir,
                })
                .collect(),
            end: word(&self.end),
            notes: self.notes.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Derivation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = DerivationJson::deserialize(d)?;
        let look = |s: &String| {
            j.alphabet
                .get(s)
                .copied()
                .ok_or_else(|| D::Error::custom(format!("unknown symbol `{s}`")))
        };
        let word = |w: &[String]| {
            w.iter()
                .map(look)
                .collect::<std::result::Result<Vec<_>, _>>()
        };
        let mut steps = Vec::new();
        for st in &j.steps {
            steps.push(Step {
                pos: st.pos,
                lhs: word(&st.rel.0)?,
                rhs: word(&st.rel.1)?,
                dir: st.dir,
            });
        }
        Ok(Derivation {
            window: j.window,
            start: word(&j.start)?,
            steps,
            end: word(&j.end)?,
            notes: j.notes,
        })
    }
}
