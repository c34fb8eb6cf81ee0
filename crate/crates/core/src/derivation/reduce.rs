//! Reduction of a word over `I_m` to a pair of rank-`r+1` letters.

use super::lemmas::{split_high_rank, triple_step};
use super::{check, Builder, Derivation};
use crate::error::{Error, Result};
use crate::green::IdealSpec;
use crate::transform::{product, PartialMap};

/// `r(w)`: the sum of `rank - r` over the letters of `w`.
fn excess(w: &[PartialMap], r: usize) -> usize {
    w.iter().map(|f| f.rank() - r).sum()
}

/// Reduces `w` (product of rank `r`, letters of rank in `[r+1, m]`) to
/// `x_α x_β` with `α, β ∈ J_{r+1}`. Every iteration lowers `r(w)`.
///
/// When some length-three step has no left factor of its last letter in
/// `J_{r+1}`, the pair produced there is kept and reduction continues; the
/// result is still a pair of rank-`r+1` letters.
pub fn reduce_word(
    spec: &IdealSpec,
    w: &[PartialMap],
    r: usize,
) -> Result<(PartialMap, PartialMap, Derivation)> {
    let (n, m) = (spec.n as isize, spec.m as isize);
    if r < spec.epsilon() || r as isize > 2 * m - n - 1 {
        return Err(Error::Precondition(format!(
            "need {} ≤ r ≤ 2m - n - 1 = {}; got r = {r}",
            spec.epsilon(),
            2 * m - n - 1
        )));
    }
    if w.is_empty() {
        return Err(Error::Usage("empty word".into()));
    }
    for f in w {
        if !spec.contains(f) || f.rank() <= r {
            return Err(Error::Precondition(format!(
                "letter {f} must lie in the ideal {spec} with rank above r = {r}"
            )));
        }
    }
    if product(w).map(|p| p.rank()) != Some(r) {
        return Err(Error::Precondition(format!(
            "the word must have product of rank r = {r}"
        )));
    }
    let fam = spec.fam;
    let mut bld = Builder::new(w.to_vec(), (r + 1, spec.m));
    bld.note(format!("r(w)={}", excess(w, r)));
    loop {
        let cur = bld.word().to_vec();
        if cur.len() == 2 && cur.iter().all(|f| f.rank() == r + 1) {
            break;
        }
        if let Some(q) = (0..cur.len() - 1).find(|&q| cur[q].then(&cur[q + 1]).rank() > r) {
            bld.contract(q)?;
        } else if cur.len() == 2 || cur[0].rank() > r + 1 || cur[1].rank() > r + 1 {
            let (_, _, d) = split_high_rank(spec, &cur[0], &cur[1], r)?;
            bld.splice(0, &d)?;
        } else if cur[2].rank() > r + 1 {
            let (_, _, d) = split_high_rank(spec, &cur[1], &cur[2], r)?;
            bld.splice(1, &d)?;
        } else {
            let (_, _, d) = triple_step(fam, &cur[0], &cur[1], &cur[2], r)?;
            bld.splice(0, &d)?;
        }
        let next = bld.word();
        let (before, after) = (excess(&cur, r), excess(next, r));
        if after >= before {
            return Err(Error::Rejected(format!(
                "r(w) did not decrease: {before} to {after}"
            )));
        }
        bld.note(format!("r(w)={after}"));
    }
    let d = bld.finish();
    check(&d).map_err(|e| Error::Rejected(format!("reduction: {e}")))?;
    Ok((d.end[0], d.end[1], d))
}
