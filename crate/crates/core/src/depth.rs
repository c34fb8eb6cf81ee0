//! Relational depth from restricted Cayley presentations, multiplication
//! depth, and the closed formula.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::IdealSpec;
use crate::presentation::{defines, restriction, Budgets, Verdict};
use crate::transform::all_of_rank;

/// `m - max(ε, 2m - n) + 1` for proper ideals, `3` for the whole monoid.
pub fn formula_depth(spec: &IdealSpec) -> Result<usize> {
    if spec.n < 3 {
        return Err(Error::Unsupported(format!(
            "the closed formula needs n ≥ 3; got n = {}",
            spec.n
        )));
    }
    if spec.m == spec.n {
        return Ok(3);
    }
    let floor = spec.epsilon().max((2 * spec.m).saturating_sub(spec.n));
    Ok(spec.m - floor + 1)
}

/// `m - r_min + 1`, where `r_min` is the least rank of a product of two
/// elements of `J_m`.
pub fn multiplication_depth(spec: &IdealSpec) -> Result<usize> {
    if spec.m == spec.n {
        return Err(Error::Unsupported(
            "multiplication depth is defined for proper ideals only (m < n)".into(),
        ));
    }
    let top = all_of_rank(spec.fam, spec.n, spec.m)?;
    let mut r_min = spec.m;
    'scan: for a in &top {
        for b in &top {
            r_min = r_min.min(a.then(b).rank());
            if r_min == spec.epsilon() {
                break 'scan;
            }
        }
    }
    Ok(spec.m - r_min + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthOptions {
    pub budgets: Budgets,
    /// Restriction indices examined at once.
    pub jobs: usize,
}

impl Default for DepthOptions {
    fn default() -> Self {
        DepthOptions {
            budgets: Budgets::default(),
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexVerdict {
    pub i: usize,
    pub verdict: Verdict,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Computed {
    Depth {
        depth: usize,
        largest_defining: usize,
    },
    Inconclusive {
        at: usize,
        reason: String,
    },
}

impl Computed {
    pub fn depth(&self) -> Option<usize> {
        match self {
            Computed::Depth { depth, .. } => Some(*depth),
            Computed::Inconclusive { .. } => None,
        }
    }
}

fn verdict_at(spec: &IdealSpec, i: usize, budgets: &Budgets) -> Result<IndexVerdict> {
    let t = Instant::now();
    let p = restriction(spec, i)?;
    let verdict = defines(&p, spec, budgets)?;
    Ok(IndexVerdict {
        i,
        verdict,
        elapsed: t.elapsed(),
    })
}

/// `m - i* + 1` for the largest `i*` whose restriction defines the ideal.
///
/// Defining is monotone in `i`, so indices are tried from `m` downwards; the
/// top indices usually fall to cheap witnesses. Returns the verdicts
/// computed, highest index first.
pub fn computed_depth(
    spec: &IdealSpec,
    opts: &DepthOptions,
) -> Result<(Computed, Vec<IndexVerdict>)> {
    let eps = spec.epsilon();
    let order: Vec<usize> = (eps..=spec.m).rev().collect();
    let mut seen: Vec<IndexVerdict> = Vec::new();
    for batch in order.chunks(opts.jobs.max(1)) {
        let results: Vec<Result<IndexVerdict>> = if batch.len() == 1 {
            vec![verdict_at(spec, batch[0], &opts.budgets)]
        } else {
            std::thread::scope(|s| {
                let hs: Vec<_> = batch
                    .iter()
                    .map(|&i| s.spawn(move || verdict_at(spec, i, &opts.budgets)))
                    .collect();
                hs.into_iter()
                    .map(|h| h.join().expect("verdict thread"))
                    .collect()
            })
        };
        for r in results {
            seen.push(r?);
        }
        for v in &seen {
            match &v.verdict {
                Verdict::Defines { .. } => {
                    return Ok((
                        Computed::Depth {
                            depth: spec.m - v.i + 1,
                            largest_defining: v.i,
                        },
                        seen,
                    ))
                }
                Verdict::Inconclusive { reason } => {
                    let c = Computed::Inconclusive {
                        at: v.i,
                        reason: reason.clone(),
                    };
                    return Ok((c, seen));
                }
                Verdict::NotDefines { .. } => {}
            }
        }
    }
    Err(Error::Rejected(format!(
        "no restriction of {spec} defines it, not even the full Cayley presentation"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthReport {
    pub spec: IdealSpec,
    /// `None` below `n = 3`.
    pub formula: Option<usize>,
    pub computed: Computed,
    /// `None` for `m = n`.
    pub multiplication: Option<usize>,
    /// `(n + ε) / 2`.
    pub theta: f64,
    /// `2m - n`.
    pub s: i64,
    pub verdicts: Vec<IndexVerdict>,
    pub budgets: Budgets,
    /// Whether every available value agrees; `None` when the computed depth
    /// is inconclusive.
    pub agree: Option<bool>,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub fn reconcile(spec: &IdealSpec, opts: &DepthOptions) -> Result<DepthReport> {
    let t = Instant::now();
    let formula = formula_depth(spec).ok();
    let multiplication = multiplication_depth(spec).ok();
    let (computed, verdicts) = computed_depth(spec, opts)?;
    let agree = computed
        .depth()
        .map(|c| formula.is_none_or(|f| f == c) && multiplication.is_none_or(|m| m == c));
    Ok(DepthReport {
        spec: *spec,
        formula,
        computed,
        multiplication,
        theta: (spec.n + spec.epsilon()) as f64 / 2.0,
        s: 2 * spec.m as i64 - spec.n as i64,
        verdicts,
        budgets: opts.budgets,
        agree,
        elapsed: t.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::Family;

    fn spec(fam: Family, n: usize, m: usize) -> IdealSpec {
        IdealSpec::new(fam, n, m).unwrap()
    }

    #[test]
    fn formula_examples() {
        assert_eq!(formula_depth(&spec(Family::I, 4, 3)).unwrap(), 2);
        assert_eq!(formula_depth(&spec(Family::T, 5, 3)).unwrap(), 3);
        assert_eq!(formula_depth(&spec(Family::PT, 4, 4)).unwrap(), 3);
        assert!(matches!(
            formula_depth(&spec(Family::T, 2, 1)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(multiplication_depth(&spec(Family::I, 3, 2)).unwrap(), 2);
        assert_eq!(multiplication_depth(&spec(Family::T, 5, 4)).unwrap(), 2);
        assert!(multiplication_depth(&spec(Family::PT, 3, 3)).is_err());
    }

    #[test]
    fn computed_examples() {
        for (fam, n, m) in [(Family::T, 3, 2), (Family::I, 3, 2), (Family::PT, 3, 2)] {
            let (c, v) = computed_depth(&spec(fam, n, m), &DepthOptions::default()).unwrap();
            assert_eq!(c.depth(), Some(2), "{fam}");
            assert!(v[0].verdict.is_not_defines());
        }
    }

    #[test]
    fn top_monoid_reconciles_without_multiplication_depth() {
        let r = reconcile(&spec(Family::PT, 3, 3), &DepthOptions::default()).unwrap();
        assert_eq!(r.formula, Some(3));
        assert_eq!(r.multiplication, None);
        assert_eq!(r.computed.depth(), Some(3));
        assert_eq!(r.agree, Some(true));
    }
}
