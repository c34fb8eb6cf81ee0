//! Lower-bound witnesses and the split-form invariant.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::{all_maps, factorizations_in, product, Family, PartialMap};

/// `α, β ∈ J_m` with `αβ = β² = αβ² ∈ J_{r-1}`.
///
/// Requires `m < n` and `m > r > max(2m - n, ε)`.
pub fn counterexample(
    fam: Family,
    n: usize,
    m: usize,
    r: usize,
) -> Result<(PartialMap, PartialMap)> {
    let eps = fam.epsilon();
    let floor = eps.max((2 * m).saturating_sub(n));
    if !(m < n && m > r && r > floor) {
        return Err(Error::Range(format!(
            "need m < n and m > r > max(2m - n, {eps}); got n = {n}, m = {m}, r = {r}"
        )));
    }
    match fam {
        Family::T => {
            let alpha: Vec<Option<usize>> = (1..=n).map(|x| Some(x.min(m))).collect();
            let beta: Vec<Option<usize>> = (1..=n)
                .map(|x| {
                    Some(if x + 2 <= r {
                        x
                    } else if x <= m {
                        r - 1
                    } else if x <= 2 * m - r {
                        x + r - (m + 1)
                    } else {
                        m
                    })
                })
                .collect();
            Ok((PartialMap::new(n, &alpha)?, PartialMap::new(n, &beta)?))
        }
        Family::I | Family::PT => {
            let alpha = PartialMap::partial_identity(n, 1..=m);
            // β fixes 1..r-1 and sends b_j = m+1+(j-r) to the least unused
            // points outside dom β, so that im β ∩ dom β = {1..r-1}.
            let moved: Vec<usize> = (r..=m).map(|j| m + 1 + (j - r)).collect();
            let targets: Vec<usize> = (r..=n)
                .filter(|y| !moved.contains(y))
                .take(moved.len())
                .collect();
            let mut pairs: Vec<(usize, usize)> = (1..r).map(|x| (x, x)).collect();
            pairs.extend(moved.iter().copied().zip(targets));
            Ok((alpha, PartialMap::from_pairs(n, &pairs)?))
        }
    }
}

/// The pair used for the full monoid (`m = n`): `αβ = β² = αβ² ∈ J_{n-2}`.
pub fn top_witness(fam: Family, n: usize) -> Result<(PartialMap, PartialMap)> {
    if n < 3 {
        return Err(Error::Unsupported("top witness needs n >= 3".into()));
    }
    match fam {
        Family::I | Family::PT => {
            let alpha = PartialMap::partial_identity(n, 1..n);
            let mut pairs: Vec<(usize, usize)> = (1..=n - 2).map(|x| (x, x)).collect();
            pairs.push((n, n - 1));
            Ok((alpha, PartialMap::from_pairs(n, &pairs)?))
        }
        Family::T => {
            let alpha: Vec<Option<usize>> = (1..=n).map(|x| Some(x.min(n - 1))).collect();
            let beta: Vec<Option<usize>> = (1..=n)
                .map(|x| {
                    Some(if x + 3 <= n {
                        x
                    } else if x < n {
                        n - 2
                    } else {
                        n - 1
                    })
                })
                .collect();
            Ok((PartialMap::new(n, &alpha)?, PartialMap::new(n, &beta)?))
        }
    }
}

/// Whether `w = a_1…a_k b_1…b_l` with `a_1…a_k = α`, `b_1…b_l = β`, every letter
/// of the rank of `α`, and `a_k b_1` of rank `r`.
pub fn split_form(w: &[PartialMap], alpha: &PartialMap, beta: &PartialMap, r: usize) -> bool {
    let m = alpha.rank();
    if w.len() < 2 || w.iter().any(|f| f.rank() != m) {
        return false;
    }
    (1..w.len()).any(|k| {
        w[k - 1].then(&w[k]).rank() == r
            && product(&w[..k]) == Some(*alpha)
            && product(&w[k..]) == Some(*beta)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub alpha: PartialMap,
    pub beta: PartialMap,
    pub step_bound: usize,
    /// Depth to which every reachable word was visited.
    pub exhaustive_depth: usize,
    /// Distinct words visited by the breadth-first phase.
    pub visited: usize,
    /// Random walks of length `step_bound` run after the state cap was hit.
    pub walks: usize,
    /// True when the state cap stopped exhaustive search short of `step_bound`.
    pub truncated: bool,
    pub invariant_held: bool,
    pub forbidden_reached: bool,
    pub first_violation: Option<Vec<PartialMap>>,
}

#[derive(Clone, Copy, Debug)]
pub struct InvarianceBudget {
    pub max_states: usize,
    pub walks: usize,
    pub seed: u64,
}

impl Default for InvarianceBudget {
    fn default() -> Self {
        InvarianceBudget {
            max_states: 400_000,
            walks: 400,
            seed: 0x5eed,
        }
    }
}

struct Explorer {
    fam: Family,
    lo: usize,
    hi: usize,
    candidates: Vec<PartialMap>,
    cache: rustc_hash::FxHashMap<PartialMap, Vec<(PartialMap, PartialMap)>>,
}

impl Explorer {
    fn neighbours(&mut self, w: &[PartialMap]) -> Vec<Vec<PartialMap>> {
        let mut out = Vec::new();
        for i in 0..w.len() {
            if i + 1 < w.len() {
                let p = w[i].then(&w[i + 1]);
                let ok = [w[i], w[i + 1], p]
                    .iter()
                    .all(|f| (self.lo..=self.hi).contains(&f.rank()));
                if ok {
                    let mut v = w[..i].to_vec();
                    v.push(p);
                    v.extend_from_slice(&w[i + 2..]);
                    out.push(v);
                }
            }
            let s = w[i];
            if !(self.lo..=self.hi).contains(&s.rank()) {
                continue;
            }
            let (fam, lo, hi) = (self.fam, self.lo, self.hi);
            let cands = &self.candidates;
            let facs = self
                .cache
                .entry(s)
                .or_insert_with(|| factorizations_in(&s, cands, fam, lo, hi));
            for &(a, b) in facs.iter() {
                let mut v = w[..i].to_vec();
                v.push(a);
                v.push(b);
                v.extend_from_slice(&w[i + 1..]);
                out.push(v);
            }
        }
        out
    }
}

/// Explores words reachable from `x_α x_β` and from `x_β x_β` for the
/// counterexample pair, using relations whose letters have rank in `[r, m]`.
///
/// Every visited word must be in split form for its start pair, and
/// `x_α x_β x_β` must never be reached from `x_β x_β`.
pub fn bounded_invariance(
    fam: Family,
    n: usize,
    m: usize,
    r: usize,
    step_bound: usize,
    budget: InvarianceBudget,
) -> Result<InvarianceReport> {
    let (alpha, beta) = counterexample(fam, n, m, r)?;
    let mut ex = Explorer {
        fam,
        lo: r,
        hi: m,
        candidates: all_maps(fam, n)
            .into_iter()
            .filter(|f| (r..=m).contains(&f.rank()))
            .collect(),
        cache: Default::default(),
    };
    let forbidden = vec![alpha, beta, beta];
    let mut report = InvarianceReport {
        family: fam,
        n,
        m,
        r,
        alpha,
        beta,
        step_bound,
        exhaustive_depth: step_bound,
        visited: 0,
        walks: 0,
        truncated: false,
        invariant_held: true,
        forbidden_reached: false,
        first_violation: None,
    };
    let low = r - 1;
    let starts = [(alpha, beta), (beta, beta)];
    let per_start = budget.max_states / starts.len();
    for (a, b) in starts {
        let start = vec![a, b];
        let mut seen: HashSet<Vec<PartialMap>> = HashSet::new();
        seen.insert(start.clone());
        let mut layer = vec![start.clone()];
        let mut depth = 0;
        let judge = |w: &Vec<PartialMap>, report: &mut InvarianceReport| {
            if !split_form(w, &a, &b, low) && report.invariant_held {
                report.invariant_held = false;
                report.first_violation = Some(w.clone());
            }
            if a == beta && *w == forbidden {
                report.forbidden_reached = true;
            }
        };
        judge(&start, &mut report);
        while depth < step_bound {
            let mut next = Vec::new();
            let mut capped = false;
            for w in &layer {
                for v in ex.neighbours(w) {
                    if seen.contains(&v) {
                        continue;
                    }
                    judge(&v, &mut report);
                    seen.insert(v.clone());
                    next.push(v);
                    if seen.len() > per_start {
                        capped = true;
                        break;
                    }
                }
                if capped {
                    break;
                }
            }
            if capped {
                report.truncated = true;
                report.exhaustive_depth = report.exhaustive_depth.min(depth);
                break;
            }
            depth += 1;
            layer = next;
            if layer.is_empty() {
                break;
            }
        }
        report.visited += seen.len();
        if report.truncated {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ (a == beta) as u64);
            for _ in 0..budget.walks {
                let mut w = start.clone();
                for _ in 0..step_bound {
                    let nb = ex.neighbours(&w);
                    let Some(v) = nb.choose(&mut rng) else { break };
                    w = v.clone();
                    judge(&w, &mut report);
                }
                report.walks += 1;
            }
        }
    }
    Ok(report)
}
