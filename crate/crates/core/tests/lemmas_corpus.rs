//! Randomised corpus for the length-two and length-three constructions.

use depthwork::derivation::{
    admissible, apply_rule, check, equalize_pairs, reduce_triple, reduce_word, split_high_rank,
    triple_to_pair, RuleKind,
};
use depthwork::green::IdealSpec;
use depthwork::transform::{all_of_rank, factorizations_in, Family, PartialMap};
use depthwork::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn layer(fam: Family, n: usize, r: usize) -> Vec<PartialMap> {
    all_of_rank(fam, n, r + 1).unwrap()
}

/// Random `α, β ∈ J_{r+1}` with `αβ ∈ J_r`.
fn random_pair(rng: &mut ChaCha8Rng, pool: &[PartialMap], r: usize) -> (PartialMap, PartialMap) {
    loop {
        let a = *pool.choose(rng).unwrap();
        let b = *pool.choose(rng).unwrap();
        if a.then(&b).rank() == r {
            return (a, b);
        }
    }
}

fn kinds(fam: Family) -> Vec<RuleKind> {
    RuleKind::ALL
        .into_iter()
        .filter(|k| k.family() == fam)
        .collect()
}

/// `(n, r)` with `r + 3 ≤ n ≤ 6`.
fn cells(fam: Family) -> Vec<(usize, usize)> {
    (4..=6)
        .flat_map(|n| (fam.epsilon()..=n - 3).map(move |r| (n, r)))
        .collect()
}

#[test]
fn every_rule_checks_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut applied = std::collections::HashMap::<RuleKind, usize>::new();
    for fam in [Family::I, Family::T, Family::PT] {
        let cells = cells(fam);
        let pools: Vec<Vec<PartialMap>> = cells.iter().map(|&(n, r)| layer(fam, n, r)).collect();
        for round in 0..20_000 {
            if kinds(fam)
                .iter()
                .all(|k| applied.get(k).copied().unwrap_or(0) >= 100)
            {
                break;
            }
            let c = round % cells.len();
            let r = cells[c].1;
            let (a, b) = random_pair(&mut rng, &pools[c], r);
            for kind in kinds(fam) {
                if applied.get(&kind).copied().unwrap_or(0) >= 100 {
                    continue;
                }
                let opts = match admissible(kind, &a, &b, false) {
                    Ok(o) => o,
                    Err(Error::Precondition(_)) => continue,
                    Err(e) => panic!("{kind} on {a} {b}: {e}"),
                };
                for p in opts.choose_multiple(&mut rng, 2) {
                    let (a2, b2, d) = apply_rule(kind, &a, &b, p)
                        .unwrap_or_else(|e| panic!("{kind} {p:?} on {a} {b}: {e}"));
                    check(&d).unwrap();
                    assert_eq!(d.start, vec![a, b]);
                    assert_eq!(d.end, vec![a2, b2]);
                    assert_eq!(a2.then(&b2), a.then(&b));
                    assert_eq!(d.window, (r + 1, r + 2));
                    *applied.entry(kind).or_default() += 1;
                }
            }
        }
    }
    for kind in RuleKind::ALL {
        let k = applied.get(&kind).copied().unwrap_or(0);
        assert!(k >= 100, "{kind} applied only {k} times");
    }
}

#[test]
fn equalize_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for fam in [Family::I, Family::T, Family::PT] {
        let mut done = 0;
        for (n, r) in cells(fam) {
            let pool = layer(fam, n, r);
            for _ in 0..40 {
                let (a, b) = random_pair(&mut rng, &pool, r);
                let mut cands: Vec<PartialMap> =
                    pool.choose_multiple(&mut rng, 100).copied().collect();
                cands.push(a);
                let facs = factorizations_in(&a.then(&b), &cands, fam, r + 1, r + 1);
                let &(g, d0) = facs.choose(&mut rng).unwrap();
                let d = equalize_pairs(fam, &a, &b, &g, &d0, r)
                    .unwrap_or_else(|e| panic!("{fam} n={n} r={r}: {g} {d0} -> {a} {b}: {e}"));
                check(&d).unwrap();
                assert_eq!(d.start, vec![g, d0]);
                assert_eq!(d.end, vec![a, b]);
                done += 1;
            }
        }
        assert!(done >= 100, "{fam}: {done}");
    }
}

/// Ideals `(n, m)` with `m < n` and their admissible `r`.
fn ideal_cells(fam: Family) -> Vec<(IdealSpec, usize)> {
    let mut out = Vec::new();
    for n in 3..=6 {
        for m in fam.epsilon().max(1)..n {
            let spec = IdealSpec::new(fam, n, m).unwrap();
            for r in fam.epsilon()..m {
                if (r as isize) <= 2 * m as isize - n as isize - 1 {
                    out.push((spec, r));
                }
            }
        }
    }
    out
}

#[test]
fn triples_reach_a_left_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for fam in [Family::I, Family::T, Family::PT] {
        let (mut ok, mut gap) = (0, 0);
        let cells = ideal_cells(fam);
        let pools: Vec<Vec<PartialMap>> = cells.iter().map(|(s, r)| layer(fam, s.n, *r)).collect();
        for round in 0..50_000 {
            if ok >= 150 {
                break;
            }
            let c = round % cells.len();
            let (spec, r) = cells[c];
            let (a, b) = random_pair(&mut rng, &pools[c], r);
            let g = *pools[c].choose(&mut rng).unwrap();
            if b.then(&g).rank() != r || a.then(&b).then(&g).rank() != r {
                continue;
            }
            match reduce_triple(&spec, &a, &b, &g, r) {
                Ok((ap, d)) => {
                    check(&d).unwrap();
                    assert_eq!(d.start, vec![a, b, g]);
                    assert_eq!(d.end, vec![ap, g]);
                    assert_eq!(d.window, (r + 1, r + 2));
                    ok += 1;
                }
                Err(Error::Precondition(msg)) if msg.contains("α′") => {
                    let s = a.then(&b).then(&g);
                    let witness = pools[c].iter().find(|x| x.then(&g) == s);
                    assert!(
                        witness.is_none(),
                        "{spec} r={r}: missed left factor {witness:?}"
                    );
                    let (x, y, d) = triple_to_pair(&spec, &a, &b, &g, r).unwrap();
                    check(&d).unwrap();
                    assert_eq!((x.rank(), y.rank()), (r + 1, r + 1));
                    assert_eq!(x.then(&y), s);
                    assert_eq!(d.end, vec![x, y]);
                    if gap == 0 {
                        println!("{spec} r={r}: no left factor for α={a} β={b} γ={g}");
                    }
                    gap += 1;
                }
                Err(e) => panic!("{spec} r={r} {a} {b} {g}: {e}"),
            }
        }
        println!("{fam}: {ok} triples reduced, {gap} without a left factor");
        assert!(ok >= 100, "{fam}: {ok}");
    }
}

#[test]
fn high_rank_pairs_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for fam in [Family::I, Family::T, Family::PT] {
        let mut done = 0;
        let cells: Vec<(IdealSpec, usize)> = ideal_cells(fam)
            .into_iter()
            .filter(|(s, r)| s.m > r + 1)
            .collect();
        let pools: Vec<Vec<PartialMap>> = cells
            .iter()
            .map(|(s, r)| (r + 1..=s.m).flat_map(|k| layer(fam, s.n, k - 1)).collect())
            .collect();
        for round in 0..200_000 {
            if done >= 120 {
                break;
            }
            let c = round % cells.len();
            let (spec, r) = cells[c];
            let g = *pools[c].choose(&mut rng).unwrap();
            let d0 = *pools[c].choose(&mut rng).unwrap();
            if g.then(&d0).rank() != r || (g.rank() == spec.m && d0.rank() == spec.m) {
                continue;
            }
            let (x, y, d) = split_high_rank(&spec, &g, &d0, r)
                .unwrap_or_else(|e| panic!("{spec} r={r} {g} {d0}: {e}"));
            check(&d).unwrap();
            assert_eq!((x.rank(), y.rank()), (r + 1, r + 1));
            assert_eq!(d.end, vec![x, y]);
            assert!(d.window.0 >= r + 1 && d.window.1 <= spec.m);
            done += 1;
        }
        assert!(done >= 100, "{fam}: {done}");
    }
}

#[test]
fn words_reduce_to_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for fam in [Family::I, Family::T, Family::PT] {
        let mut done = 0;
        let cells = ideal_cells(fam);
        let pools: Vec<Vec<PartialMap>> = cells
            .iter()
            .map(|(s, r)| (r + 1..=s.m).flat_map(|k| layer(fam, s.n, k - 1)).collect())
            .collect();
        for round in 0..400_000 {
            if done >= 120 {
                break;
            }
            let c = round % cells.len();
            let (spec, r) = cells[c];
            let len = rng.gen_range(1..=6);
            let w: Vec<PartialMap> = (0..len)
                .map(|_| *pools[c].choose(&mut rng).unwrap())
                .collect();
            let p = w[1..].iter().fold(w[0], |x, y| x.then(y));
            if p.rank() != r {
                continue;
            }
            let (x, y, d) =
                reduce_word(&spec, &w, r).unwrap_or_else(|e| panic!("{spec} r={r} {w:?}: {e}"));
            check(&d).unwrap();
            assert_eq!((x.rank(), y.rank()), (r + 1, r + 1));
            assert_eq!(x.then(&y), p);
            assert_eq!(d.start, w);
            let marks: Vec<usize> = d
                .notes
                .iter()
                .filter_map(|t| t.strip_prefix("r(w)=").map(|v| v.parse().unwrap()))
                .collect();
            assert!(marks.windows(2).all(|m| m[1] < m[0]), "{marks:?}");
            done += 1;
        }
        assert!(done >= 100, "{fam}: {done}");
    }
}
