//! Test-side oracles, independent of the derivation module.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use depthwork::transform::{all_maps, Family, PartialMap};

/// Reachability between words under `x_s x_t = x_{st}` with all three labels
/// of rank in `[lo, hi]`, searched from both ends.
pub struct Bfs {
    letters: Vec<PartialMap>,
    lo: usize,
    hi: usize,
    split: HashMap<PartialMap, Vec<(PartialMap, PartialMap)>>,
    pub max_len: usize,
    pub max_states: usize,
}

#[derive(Debug, PartialEq, Eq)]
pub enum Reach {
    Found(usize),
    /// The whole component within the length bound was searched.
    Absent,
    Unknown,
}

impl Bfs {
    pub fn new(fam: Family, n: usize, lo: usize, hi: usize) -> Bfs {
        let letters = all_maps(fam, n)
            .into_iter()
            .filter(|f| (lo..=hi).contains(&f.rank()))
            .collect();
        Bfs {
            letters,
            lo,
            hi,
            split: HashMap::new(),
            max_len: 6,
            max_states: 400_000,
        }
    }

    fn splits(&mut self, s: PartialMap) -> Vec<(PartialMap, PartialMap)> {
        if let Some(v) = self.split.get(&s) {
            return v.clone();
        }
        let mut out = Vec::new();
        for a in &self.letters {
            for b in &self.letters {
                if a.then(b) == s {
                    out.push((*a, *b));
                }
            }
        }
        self.split.insert(s, out.clone());
        out
    }

    fn next(&mut self, w: &[PartialMap]) -> Vec<Vec<PartialMap>> {
        let mut out = Vec::new();
        for i in 0..w.len() {
            if i + 1 < w.len() {
                let p = w[i].then(&w[i + 1]);
                if (self.lo..=self.hi).contains(&p.rank()) {
                    let mut v = w[..i].to_vec();
                    v.push(p);
                    v.extend_from_slice(&w[i + 2..]);
                    out.push(v);
                }
            }
            if w.len() < self.max_len {
                for (a, b) in self.splits(w[i]) {
                    let mut v = w[..i].to_vec();
                    v.extend([a, b]);
                    v.extend_from_slice(&w[i + 1..]);
                    out.push(v);
                }
            }
        }
        out
    }

    /// Meets frontiers from `u` and `v`, at most `depth` steps in total.
    pub fn reach(&mut self, u: &[PartialMap], v: &[PartialMap], depth: usize) -> Reach {
        let mut sides = [
            (HashSet::from([u.to_vec()]), vec![u.to_vec()]),
            (HashSet::from([v.to_vec()]), vec![v.to_vec()]),
        ];
        if u == v {
            return Reach::Found(0);
        }
        let mut complete = false;
        for d in 1..=depth {
            let k = if sides[0].1.len() <= sides[1].1.len() {
                0
            } else {
                1
            };
            let layer = std::mem::take(&mut sides[k].1);
            let mut next = Vec::new();
            for w in &layer {
                for x in self.next(w) {
                    if sides[1 - k].0.contains(&x) {
                        return Reach::Found(d);
                    }
                    if sides[k].0.insert(x.clone()) {
                        next.push(x);
                    }
                }
                if sides[k].0.len() > self.max_states {
                    return Reach::Unknown;
                }
            }
            if next.is_empty() {
                complete = true;
                break;
            }
            sides[k].1 = next;
        }
        if complete {
            Reach::Absent
        } else {
            Reach::Unknown
        }
    }
}
