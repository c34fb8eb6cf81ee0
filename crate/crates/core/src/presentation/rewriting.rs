//! Shortlex Knuth–Bendix completion and normal-form counting.

use std::cmp::Ordering;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{Presentation, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KbStatus {
    Confluent,
    StoppedAtBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cardinality {
    Finite(u64),
    Infinite,
}

impl std::fmt::Display for Cardinality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cardinality::Finite(c) => write!(f, "{c}"),
            Cardinality::Infinite => f.write_str("infinite"),
        }
    }
}

/// Shortlex comparison, letters compared by index.
pub fn shortlex(a: &[u32], b: &[u32]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

#[derive(Clone, Debug)]
pub struct RewritingSystem {
    pub alphabet: usize,
    /// Oriented rules `lhs → rhs` with `rhs` shortlex-smaller.
    pub rules: Vec<(Word, Word)>,
    pub status: KbStatus,
    index: FxHashMap<Word, usize>,
    lengths: Vec<usize>,
}

impl RewritingSystem {
    fn from_rules(alphabet: usize, rules: Vec<(Word, Word)>, status: KbStatus) -> Self {
        let mut index = FxHashMap::default();
        let mut lengths = Vec::new();
        for (i, (l, _)) in rules.iter().enumerate() {
            index.insert(l.clone(), i);
            if !lengths.contains(&l.len()) {
                lengths.push(l.len());
            }
        }
        lengths.sort_unstable();
        RewritingSystem {
            alphabet,
            rules,
            status,
            index,
            lengths,
        }
    }

    pub fn is_confluent(&self) -> bool {
        self.status == KbStatus::Confluent
    }

    pub fn reduce(&self, w: &[u32]) -> Word {
        reduce_with(&self.index, &self.rules, &self.lengths, w)
    }

    /// Word equality, decided only for a confluent system.
    pub fn word_equal(&self, u: &[u32], v: &[u32]) -> Option<bool> {
        self.is_confluent()
            .then(|| self.reduce(u) == self.reduce(v))
    }

    /// Number of irreducible nonempty words, via the Aho–Corasick automaton of
    /// the left-hand sides.
    pub fn count_normal_forms(&self) -> Cardinality {
        let ac = Automaton::build(self.alphabet, self.rules.iter().map(|(l, _)| l.as_slice()));
        ac.count_avoiding()
    }
}

fn reduce_with(
    index: &FxHashMap<Word, usize>,
    rules: &[(Word, Word)],
    lengths: &[usize],
    w: &[u32],
) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    let mut input: Vec<u32> = w.iter().rev().copied().collect();
    while let Some(x) = input.pop() {
        out.push(x);
        for &len in lengths {
            if len > out.len() {
                break;
            }
            let start = out.len() - len;
            if let Some(&r) = index.get(&out[start..]) {
                out.truncate(start);
                input.extend(rules[r].1.iter().rev());
                break;
            }
        }
    }
    out
}

struct Completion {
    alphabet: usize,
    lhs: Vec<Word>,
    rhs: Vec<Word>,
    active: Vec<bool>,
    index: FxHashMap<Word, usize>,
    length_counts: Vec<usize>,
    lengths: Vec<usize>,
    by_first: Vec<Vec<usize>>,
    by_last: Vec<Vec<usize>>,
    active_count: usize,
    pending: Vec<(Word, Word)>,
}

impl Completion {
    fn new(alphabet: usize) -> Self {
        Completion {
            alphabet,
            lhs: Vec::new(),
            rhs: Vec::new(),
            active: Vec::new(),
            index: FxHashMap::default(),
            length_counts: Vec::new(),
            lengths: Vec::new(),
            by_first: vec![Vec::new(); alphabet],
            by_last: vec![Vec::new(); alphabet],
            active_count: 0,
            pending: Vec::new(),
        }
    }

    fn reduce(&self, w: &[u32]) -> Word {
        let mut out: Word = Vec::with_capacity(w.len());
        let mut input: Vec<u32> = w.iter().rev().copied().collect();
        while let Some(x) = input.pop() {
            out.push(x);
            for &len in &self.lengths {
                if len > out.len() {
                    break;
                }
                let start = out.len() - len;
                if let Some(&r) = self.index.get(&out[start..]) {
                    out.truncate(start);
                    input.extend(self.rhs[r].iter().rev());
                    break;
                }
            }
        }
        out
    }

    fn refresh_lengths(&mut self) {
        self.lengths = self
            .length_counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(l, _)| l)
            .collect();
    }

    fn add_rule(&mut self, l: Word, r: Word) {
        let id = self.lhs.len();
        if self.length_counts.len() <= l.len() {
            self.length_counts.resize(l.len() + 1, 0);
        }
        self.length_counts[l.len()] += 1;
        self.refresh_lengths();
        self.index.insert(l.clone(), id);
        self.by_first[l[0] as usize].push(id);
        self.by_last[*l.last().unwrap() as usize].push(id);
        self.lhs.push(l);
        self.rhs.push(r);
        self.active.push(true);
        self.active_count += 1;
    }

    fn deactivate(&mut self, id: usize) {
        if !self.active[id] {
            return;
        }
        self.active[id] = false;
        self.active_count -= 1;
        self.index.remove(&self.lhs[id]);
        self.length_counts[self.lhs[id].len()] -= 1;
        self.refresh_lengths();
    }

    /// Orients and installs pending equations.
    fn drain_pending(&mut self, budget: usize) -> bool {
        while let Some((a, b)) = self.pending.pop() {
            let a = self.reduce(&a);
            let b = self.reduce(&b);
            match shortlex(&a, &b) {
                Ordering::Equal => {}
                Ordering::Greater => self.add_rule(a, b),
                Ordering::Less => self.add_rule(b, a),
            }
            if self.active_count > budget {
                return false;
            }
        }
        true
    }

    /// Rules whose left side contains another active left side are retired and
    /// their equation requeued.
    fn interreduce(&mut self) {
        for id in 0..self.lhs.len() {
            if !self.active[id] {
                continue;
            }
            let l = &self.lhs[id];
            let mut redundant = false;
            'outer: for len in self.lengths.iter().copied() {
                if len > l.len() {
                    break;
                }
                for s in 0..=l.len() - len {
                    if len == l.len() {
                        continue;
                    }
                    if self.index.contains_key(&l[s..s + len]) {
                        redundant = true;
                        break 'outer;
                    }
                }
            }
            if redundant {
                let (l, r) = (self.lhs[id].clone(), self.rhs[id].clone());
                self.deactivate(id);
                self.pending.push((l, r));
            } else {
                let r = self.reduce(&self.rhs[id].clone());
                self.rhs[id] = r;
            }
        }
    }

    /// Critical pairs between rule `k` and every active rule `j <= k`.
    fn overlaps(&mut self, k: usize) {
        let lk = self.lhs[k].clone();
        let rk = self.rhs[k].clone();
        let n = lk.len();
        // Another left side strictly inside lk.
        for len in self.lengths.clone() {
            if len >= n {
                break;
            }
            for s in 0..=n - len {
                if let Some(&j) = self.index.get(&lk[s..s + len]) {
                    let mut w = lk[..s].to_vec();
                    w.extend_from_slice(&self.rhs[j]);
                    w.extend_from_slice(&lk[s + len..]);
                    self.pending.push((w, rk.clone()));
                }
            }
        }
        // lk = A B, lj = B C.
        for p in 1..n {
            let b = &lk[p..];
            for &j in &self.by_first[b[0] as usize] {
                if j > k || !self.active[j] {
                    continue;
                }
                let lj = &self.lhs[j];
                if lj.len() <= b.len() || &lj[..b.len()] != b {
                    continue;
                }
                let mut left = rk.clone();
                left.extend_from_slice(&lj[b.len()..]);
                let mut right = lk[..p].to_vec();
                right.extend_from_slice(&self.rhs[j]);
                self.pending.push((left, right));
            }
        }
        // lj = A B, lk = B C, with j < k.
        for p in 1..n {
            let b = &lk[..p];
            for &j in &self.by_last[b[p - 1] as usize] {
                if j >= k || !self.active[j] {
                    continue;
                }
                let lj = &self.lhs[j];
                if lj.len() <= b.len() || &lj[lj.len() - b.len()..] != b {
                    continue;
                }
                let mut left = self.rhs[j].clone();
                left.extend_from_slice(&lk[p..]);
                let mut right = lj[..lj.len() - p].to_vec();
                right.extend_from_slice(&rk);
                self.pending.push((left, right));
            }
        }
    }
}

/// Shortlex completion of the relations of `p`, stopping once more than
/// `rule_budget` rules are active.
pub fn knuth_bendix(p: &Presentation, rule_budget: usize) -> RewritingSystem {
    let mut c = Completion::new(p.alphabet_len());
    c.pending = p.relations.iter().rev().cloned().collect();
    let mut ok = c.drain_pending(rule_budget);
    let mut k = 0;
    let mut next_interreduce = 64usize;
    while ok && k < c.lhs.len() {
        if c.active[k] {
            c.overlaps(k);
            ok = c.drain_pending(rule_budget);
        }
        k += 1;
        if c.lhs.len() >= next_interreduce {
            c.interreduce();
            ok = ok && c.drain_pending(rule_budget);
            next_interreduce = c.lhs.len() * 2;
        }
    }
    if ok {
        loop {
            c.interreduce();
            if c.pending.is_empty() {
                break;
            }
            // Requeued equations reduce to trivial pairs in a confluent system,
            // anything else restarts completion from the new rules.
            let before = c.lhs.len();
            ok = c.drain_pending(rule_budget);
            if !ok || c.lhs.len() == before {
                break;
            }
            let mut k = before;
            while ok && k < c.lhs.len() {
                if c.active[k] {
                    c.overlaps(k);
                    ok = c.drain_pending(rule_budget);
                }
                k += 1;
            }
        }
    }
    let rules: Vec<(Word, Word)> = (0..c.lhs.len())
        .filter(|&i| c.active[i])
        .map(|i| (c.lhs[i].clone(), c.rhs[i].clone()))
        .collect();
    let status = if ok {
        KbStatus::Confluent
    } else {
        KbStatus::StoppedAtBudget
    };
    RewritingSystem::from_rules(c.alphabet, rules, status)
}

struct Automaton {
    alphabet: usize,
    children: Vec<FxHashMap<u32, usize>>,
    fail: Vec<usize>,
    terminal: Vec<bool>,
}

impl Automaton {
    fn build<'a>(alphabet: usize, patterns: impl Iterator<Item = &'a [u32]>) -> Self {
        let mut a = Automaton {
            alphabet,
            children: vec![FxHashMap::default()],
            fail: vec![0],
            terminal: vec![false],
        };
        for pat in patterns {
            let mut s = 0;
            for &x in pat {
                s = match a.children[s].get(&x) {
                    Some(&t) => t,
                    None => {
                        let t = a.children.len();
                        a.children.push(FxHashMap::default());
                        a.fail.push(0);
                        a.terminal.push(false);
                        a.children[s].insert(x, t);
                        t
                    }
                };
            }
            a.terminal[s] = true;
        }
        let mut queue = std::collections::VecDeque::new();
        let roots: Vec<usize> = a.children[0].values().copied().collect();
        for t in roots {
            a.fail[t] = 0;
            queue.push_back(t);
        }
        while let Some(s) = queue.pop_front() {
            let kids: Vec<(u32, usize)> = a.children[s].iter().map(|(&x, &t)| (x, t)).collect();
            for (x, t) in kids {
                let mut f = a.fail[s];
                let target = loop {
                    if let Some(&g) = a.children[f].get(&x) {
                        break g;
                    }
                    if f == 0 {
                        break 0;
                    }
                    f = a.fail[f];
                };
                a.fail[t] = target;
                if a.terminal[target] {
                    a.terminal[t] = true;
                }
                queue.push_back(t);
            }
        }
        a
    }

    fn step(&self, mut s: usize, x: u32) -> usize {
        loop {
            if let Some(&t) = self.children[s].get(&x) {
                return t;
            }
            if s == 0 {
                return 0;
            }
            s = self.fail[s];
        }
    }

    /// Counts nonempty words that never enter a terminal state.
    fn count_avoiding(&self) -> Cardinality {
        let n = self.children.len();
        // 0 = unvisited, 1 = on stack, 2 = done.
        let mut color = vec![0u8; n];
        let mut paths = vec![0u64; n];
        let mut stack: Vec<(usize, u32)> = vec![(0, 0)];
        color[0] = 1;
        while let Some(&mut (s, ref mut x)) = stack.last_mut() {
            if (*x as usize) < self.alphabet {
                let t = self.step(s, *x);
                *x += 1;
                if self.terminal[t] {
                    continue;
                }
                match color[t] {
                    0 => {
                        color[t] = 1;
                        stack.push((t, 0));
                    }
                    1 => return Cardinality::Infinite,
                    _ => {}
                }
            } else {
                let mut total = 0u64;
                for y in 0..self.alphabet as u32 {
                    let t = self.step(s, y);
                    if !self.terminal[t] {
                        total = total.saturating_add(1).saturating_add(paths[t]);
                    }
                }
                paths[s] = total;
                color[s] = 2;
                stack.pop();
            }
        }
        Cardinality::Finite(paths[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Generator;
    use crate::transform::PartialMap;

    fn letters(k: usize, relations: Vec<(Word, Word)>) -> Presentation {
        let generators = (0..k)
            .map(|i| Generator {
                symbol: format!("a{i}"),
                map: PartialMap::identity(1),
            })
            .collect();
        Presentation::new(generators, relations).unwrap()
    }

    #[test]
    fn idempotent_has_one_normal_form() {
        let kb = knuth_bendix(&letters(1, vec![(vec![0, 0], vec![0])]), 100);
        assert!(kb.is_confluent());
        assert_eq!(kb.count_normal_forms(), Cardinality::Finite(1));
    }

    #[test]
    fn free_semigroup_is_infinite() {
        let kb = knuth_bendix(&letters(2, vec![]), 100);
        assert_eq!(kb.count_normal_forms(), Cardinality::Infinite);
    }

    #[test]
    fn commuting_idempotents() {
        // Free semilattice on two generators: a, b, ab.
        let rels = vec![
            (vec![0, 0], vec![0]),
            (vec![1, 1], vec![1]),
            (vec![1, 0], vec![0, 1]),
        ];
        let kb = knuth_bendix(&letters(2, rels), 100);
        assert!(kb.is_confluent());
        assert_eq!(kb.count_normal_forms(), Cardinality::Finite(3));
        assert_eq!(kb.word_equal(&[1, 0, 1], &[0, 1]), Some(true));
    }
}
