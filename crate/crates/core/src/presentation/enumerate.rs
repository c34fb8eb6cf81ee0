//! Congruence enumeration of `A⁺/R♯` by a Felsch-style Todd–Coxeter procedure.
//!
//! Classes are right cosets of the monoid `A*`; class 0 is the empty word and
//! is dropped from the reported count.

use serde::{Deserialize, Serialize};

use super::{Presentation, Word};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumBudget {
    /// Maximum number of simultaneously live classes.
    pub size: usize,
    /// Maximum number of class definitions.
    pub steps: usize,
}

impl EnumBudget {
    pub fn with_size(size: usize) -> Self {
        EnumBudget {
            size,
            steps: size.saturating_mul(200).max(10_000),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Closure {
    Closed,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceTable {
    pub status: Closure,
    /// Number of classes of `A⁺/R♯`; meaningful only when closed.
    pub class_count: usize,
    /// Shortlex-least representative of each class.
    pub representatives: Vec<Word>,
    /// `table[c][x]` is the class of `representatives[c] · x`.
    pub table: Vec<Vec<u32>>,
    /// Class of each single generator.
    pub generator_class: Vec<u32>,
    pub definitions: usize,
    pub peak_live: usize,
}

impl CongruenceTable {
    pub fn is_closed(&self) -> bool {
        self.status == Closure::Closed
    }

    /// Class of a nonempty word, when closed.
    pub fn class_of(&self, w: &[u32]) -> Option<usize> {
        if !self.is_closed() || w.is_empty() {
            return None;
        }
        let mut c = *self.generator_class.get(w[0] as usize)? as usize;
        for &x in &w[1..] {
            c = self.table[c][x as usize] as usize;
        }
        Some(c)
    }
}

struct Engine<'a> {
    gens: usize,
    rels: &'a [(Word, Word)],
    /// occurrences[x] = (relation, side, position) where letter x appears.
    occurrences: Vec<Vec<(u32, u8, u32)>>,
    tab: Vec<u32>,
    preimages: Vec<Vec<(u32, u32)>>,
    forward: Vec<u32>,
    live: Vec<bool>,
    live_count: usize,
    peak_live: usize,
    definitions: usize,
    deductions: Vec<(u32, u32)>,
    coincidences: Vec<(u32, u32)>,
}

impl<'a> Engine<'a> {
    fn new(gens: usize, rels: &'a [(Word, Word)]) -> Self {
        let mut occurrences = vec![Vec::new(); gens];
        for (k, (u, v)) in rels.iter().enumerate() {
            for (side, w) in [(0u8, u), (1u8, v)] {
                for (j, &x) in w.iter().enumerate() {
                    occurrences[x as usize].push((k as u32, side, j as u32));
                }
            }
        }
        let mut e = Engine {
            gens,
            rels,
            occurrences,
            tab: Vec::new(),
            preimages: Vec::new(),
            forward: Vec::new(),
            live: Vec::new(),
            live_count: 0,
            peak_live: 0,
            definitions: 0,
            deductions: Vec::new(),
            coincidences: Vec::new(),
        };
        e.new_class();
        e
    }

    fn new_class(&mut self) -> u32 {
        let c = self.live.len() as u32;
        self.tab.extend(std::iter::repeat_n(NONE, self.gens));
        self.preimages.push(Vec::new());
        self.forward.push(c);
        self.live.push(true);
        self.live_count += 1;
        self.peak_live = self.peak_live.max(self.live_count);
        c
    }

    fn find(&mut self, mut c: u32) -> u32 {
        let mut root = c;
        while self.forward[root as usize] != root {
            root = self.forward[root as usize];
        }
        while self.forward[c as usize] != root {
            let next = self.forward[c as usize];
            self.forward[c as usize] = root;
            c = next;
        }
        root
    }

    #[inline]
    fn get(&mut self, c: u32, x: u32) -> u32 {
        let t = self.tab[c as usize * self.gens + x as usize];
        if t == NONE {
            NONE
        } else {
            self.find(t)
        }
    }

    fn set(&mut self, c: u32, x: u32, d: u32) {
        self.tab[c as usize * self.gens + x as usize] = d;
        self.preimages[d as usize].push((c, x));
        self.deductions.push((c, x));
    }

    /// Follows `w` from `c` as far as the table allows.
    fn trace(&mut self, mut c: u32, w: &[u32]) -> (u32, usize) {
        for (i, &x) in w.iter().enumerate() {
            let d = self.get(c, x);
            if d == NONE {
                return (c, i);
            }
            c = d;
        }
        (c, w.len())
    }

    fn scan(&mut self, e: u32, k: usize) {
        let rels = self.rels;
        let (u, v) = (&rels[k].0, &rels[k].1);
        let (cu, iu) = self.trace(e, u);
        let (cv, iv) = self.trace(e, v);
        let (lu, lv) = (u.len(), v.len());
        if iu == lu && iv == lv {
            if cu != cv {
                self.coincidences.push((cu, cv));
            }
        } else if iu == lu && iv + 1 == lv {
            self.set(cv, v[iv], cu);
        } else if iv == lv && iu + 1 == lu {
            self.set(cu, u[iu], cv);
        }
    }

    fn live_preimages(&mut self, d: u32, x: u32) -> Vec<u32> {
        let pre = std::mem::take(&mut self.preimages[d as usize]);
        let mut out = Vec::new();
        let mut keep = Vec::with_capacity(pre.len());
        for &(c, y) in &pre {
            if !self.live[c as usize] || self.get(c, y) != d {
                continue;
            }
            keep.push((c, y));
            if y == x {
                out.push(c);
            }
        }
        self.preimages[d as usize] = keep;
        out
    }

    /// Live preimages of `d`, sorted by generator.
    fn sorted_preimages(&mut self, d: u32) -> Vec<(u32, u32)> {
        let pre = std::mem::take(&mut self.preimages[d as usize]);
        let mut keep = Vec::with_capacity(pre.len());
        for &(c, y) in &pre {
            if self.live[c as usize] && self.get(c, y) == d {
                keep.push((c, y));
            }
        }
        keep.sort_unstable_by_key(|&(c, y)| (y, c));
        keep.dedup();
        self.preimages[d as usize] = keep.clone();
        keep
    }

    fn process_deduction(&mut self, c: u32, x: u32) {
        if !self.live[c as usize] || self.get(c, x) == NONE {
            return;
        }
        let occ = std::mem::take(&mut self.occurrences[x as usize]);
        let mut pre_c: Option<Vec<(u32, u32)>> = None;
        let rels = self.rels;
        for &(k, side, j) in &occ {
            let w = if side == 0 {
                &rels[k as usize].0
            } else {
                &rels[k as usize].1
            };
            let starts: Vec<u32> = match j {
                0 => vec![c],
                1 => {
                    let y = w[0];
                    if pre_c.is_none() {
                        pre_c = Some(self.sorted_preimages(c));
                    }
                    let pre = pre_c.as_ref().unwrap();
                    let lo = pre.partition_point(|&(_, z)| z < y);
                    pre[lo..]
                        .iter()
                        .take_while(|&&(_, z)| z == y)
                        .map(|&(e, _)| e)
                        .collect()
                }
                _ => {
                    let mut starts = vec![c];
                    for p in (0..j as usize).rev() {
                        let y = w[p];
                        let mut next = Vec::new();
                        for s in starts {
                            next.extend(self.live_preimages(s, y));
                        }
                        next.sort_unstable();
                        next.dedup();
                        starts = next;
                        if starts.is_empty() {
                            break;
                        }
                    }
                    starts
                }
            };
            for e in starts {
                if self.live[e as usize] {
                    self.scan(e, k as usize);
                }
            }
            if !self.coincidences.is_empty() {
                self.process_coincidences();
                pre_c = None;
                if !self.live[c as usize] {
                    break;
                }
            }
        }
        self.occurrences[x as usize] = occ;
    }

    fn process_coincidences(&mut self) {
        while let Some((a, b)) = self.coincidences.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (keep, lose) = if a < b { (a, b) } else { (b, a) };
            self.forward[lose as usize] = keep;
            self.live[lose as usize] = false;
            self.live_count -= 1;
            for x in 0..self.gens as u32 {
                let t = self.get(lose, x);
                if t == NONE {
                    continue;
                }
                let k = self.get(keep, x);
                if k == NONE {
                    self.set(keep, x, t);
                } else if k != t {
                    self.coincidences.push((k, t));
                }
            }
            let pre = std::mem::take(&mut self.preimages[lose as usize]);
            for &(c, y) in &pre {
                if self.live[c as usize] {
                    self.deductions.push((c, y));
                }
            }
            self.preimages[keep as usize].extend(pre);
        }
    }

    fn settle(&mut self) {
        loop {
            if !self.coincidences.is_empty() {
                self.process_coincidences();
            }
            match self.deductions.pop() {
                Some((c, x)) => self.process_deduction(c, x),
                None if self.coincidences.is_empty() => return,
                None => {}
            }
        }
    }
}

/// Enumerates the classes of the semigroup presented by `p`.
pub fn enumerate(p: &Presentation, budget: EnumBudget) -> CongruenceTable {
    let gens = p.alphabet_len();
    let mut eng = Engine::new(gens, &p.relations);
    let mut cursor_c = 0usize;
    let mut cursor_x = 0usize;
    let mut exceeded = false;
    loop {
        eng.settle();
        if eng.live_count > budget.size.saturating_add(1) || eng.definitions >= budget.steps {
            exceeded = true;
            break;
        }
        // Next undefined edge of a live class, in definition order.
        let mut found = None;
        while cursor_c < eng.live.len() {
            if eng.live[cursor_c] {
                while cursor_x < gens {
                    if eng.tab[cursor_c * gens + cursor_x] == NONE {
                        found = Some((cursor_c as u32, cursor_x as u32));
                        break;
                    }
                    cursor_x += 1;
                }
                if found.is_some() {
                    break;
                }
            }
            cursor_c += 1;
            cursor_x = 0;
        }
        let Some((c, x)) = found else { break };
        let d = eng.new_class();
        eng.definitions += 1;
        eng.set(c, x, d);
    }
    if exceeded {
        return CongruenceTable {
            status: Closure::BudgetExceeded,
            class_count: 0,
            representatives: Vec::new(),
            table: Vec::new(),
            generator_class: Vec::new(),
            definitions: eng.definitions,
            peak_live: eng.peak_live,
        };
    }
    compact(&mut eng)
}

fn compact(eng: &mut Engine<'_>) -> CongruenceTable {
    let gens = eng.gens;
    let mut index = vec![NONE; eng.live.len()];
    let mut order: Vec<u32> = Vec::new();
    let mut reps: Vec<Word> = Vec::new();
    // Breadth-first from the empty word gives shortlex-least representatives.
    let mut queue = std::collections::VecDeque::new();
    queue.push_back((0u32, Word::new()));
    index[0] = u32::MAX - 1;
    while let Some((c, w)) = queue.pop_front() {
        for x in 0..gens as u32 {
            let d = eng.get(c, x);
            if index[d as usize] == NONE {
                index[d as usize] = order.len() as u32;
                order.push(d);
                let mut wd = w.clone();
                wd.push(x);
                reps.push(wd.clone());
                queue.push_back((d, wd));
            }
        }
    }
    let table = order
        .iter()
        .map(|&c| {
            (0..gens as u32)
                .map(|x| {
                    let d = eng.get(c, x);
                    index[d as usize]
                })
                .collect()
        })
        .collect();
    let generator_class = (0..gens as u32)
        .map(|x| {
            let d = eng.get(0, x);
            index[d as usize]
        })
        .collect();
    CongruenceTable {
        status: Closure::Closed,
        class_count: order.len(),
        representatives: reps,
        table,
        generator_class,
        definitions: eng.definitions,
        peak_live: eng.peak_live,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Generator;
    use crate::transform::PartialMap;

    fn monogenic(relations: Vec<(Word, Word)>) -> Presentation {
        Presentation::new(
            vec![Generator {
                symbol: "a".into(),
                map: PartialMap::identity(1),
            }],
            relations,
        )
        .unwrap()
    }

    #[test]
    fn idempotent_closes_at_one() {
        let t = enumerate(
            &monogenic(vec![(vec![0, 0], vec![0])]),
            EnumBudget::with_size(10),
        );
        assert!(t.is_closed());
        assert_eq!(t.class_count, 1);
    }

    #[test]
    fn cyclic_semigroup_with_index_and_period() {
        // a^5 = a^2: index 2, period 3, four elements.
        let t = enumerate(
            &monogenic(vec![(vec![0; 5], vec![0; 2])]),
            EnumBudget::with_size(20),
        );
        assert!(t.is_closed());
        assert_eq!(t.class_count, 4);
    }

    #[test]
    fn free_monogenic_exceeds_budget() {
        let t = enumerate(&monogenic(vec![]), EnumBudget::with_size(50));
        assert_eq!(t.status, Closure::BudgetExceeded);
    }
}
