//! Derivations against an independent breadth-first reachability search.

mod common;

use common::{Bfs, Reach};
use depthwork::derivation::{
    admissible, apply_rule, equalize_pairs, reduce_triple, reduce_word, split_high_rank,
    Derivation, RuleKind,
};
use depthwork::green::IdealSpec;
use depthwork::transform::{all_of_rank, Family, PartialMap};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CELLS: [(Family, usize, usize, usize); 3] = [
    (Family::I, 3, 2, 0),
    (Family::PT, 3, 2, 0),
    (Family::T, 4, 3, 1),
];

fn pair(rng: &mut ChaCha8Rng, pool: &[PartialMap], r: usize) -> (PartialMap, PartialMap) {
    loop {
        let (a, b) = (*pool.choose(rng).unwrap(), *pool.choose(rng).unwrap());
        if a.then(&b).rank() == r {
            return (a, b);
        }
    }
}

/// Confirms `d`'s endpoints are connected inside its window.
fn confirm(fam: Family, n: usize, d: &Derivation, label: &str) -> bool {
    let mut bfs = Bfs::new(fam, n, d.window.0, d.window.1);
    bfs.max_states = 120_000;
    match bfs.reach(&d.start, &d.end, 8) {
        Reach::Found(_) => true,
        Reach::Absent => panic!(
            "{label}: oracle finds {:?} unreachable from {:?}",
            d.end, d.start
        ),
        Reach::Unknown => false,
    }
}

fn tally(
    op: &str,
    mut produce: impl FnMut(&mut ChaCha8Rng) -> Option<(Family, usize, Derivation)>,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut confirmed, mut tried) = (0, 0);
    for _ in 0..400 {
        if confirmed == 10 {
            break;
        }
        let Some((fam, n, d)) = produce(&mut rng) else {
            continue;
        };
        tried += 1;
        if confirm(fam, n, &d, op) {
            confirmed += 1;
        }
    }
    println!("{op}: {confirmed} of {tried} confirmed within depth 8");
    assert_eq!(confirmed, 10, "{op}: only {confirmed} instances confirmed");
}

#[test]
fn rules_agree_with_search() {
    tally("apply_rule", |rng| {
        let (fam, n, _, r) = *CELLS.choose(rng).unwrap();
        let pool = all_of_rank(fam, n, r + 1).unwrap();
        let (a, b) = pair(rng, &pool, r);
        let kinds: Vec<RuleKind> = RuleKind::ALL
            .into_iter()
            .filter(|k| k.family() == fam)
            .collect();
        let kind = *kinds.choose(rng).unwrap();
        let opts = admissible(kind, &a, &b, false).ok()?;
        let p = opts.choose(rng)?;
        let (_, _, d) = apply_rule(kind, &a, &b, p).unwrap();
        Some((fam, n, d))
    });
}

#[test]
fn equalize_agrees_with_search() {
    tally("equalize_pairs", |rng| {
        let (fam, n, _, r) = *CELLS.choose(rng).unwrap();
        let pool = all_of_rank(fam, n, r + 1).unwrap();
        let (a, b) = pair(rng, &pool, r);
        let (g, d0) = pair(rng, &pool, r);
        if a.then(&b) != g.then(&d0) {
            return None;
        }
        Some((fam, n, equalize_pairs(fam, &a, &b, &g, &d0, r).unwrap()))
    });
}

#[test]
fn triples_agree_with_search() {
    tally("reduce_triple", |rng| {
        let (fam, n, m, r) = *CELLS.choose(rng).unwrap();
        let spec = IdealSpec::new(fam, n, m).unwrap();
        let pool = all_of_rank(fam, n, r + 1).unwrap();
        let (a, b) = pair(rng, &pool, r);
        let g = *pool.choose(rng).unwrap();
        if b.then(&g).rank() != r || a.then(&b).then(&g).rank() != r {
            return None;
        }
        let (_, d) = reduce_triple(&spec, &a, &b, &g, r).ok()?;
        Some((fam, n, d))
    });
}

#[test]
fn high_rank_splits_agree_with_search() {
    tally("split_high_rank", |rng| {
        let (fam, n, m, r) = *CELLS.choose(rng).unwrap();
        let spec = IdealSpec::new(fam, n, m).unwrap();
        let pool: Vec<PartialMap> = (r + 1..=m)
            .flat_map(|k| all_of_rank(fam, n, k).unwrap())
            .collect();
        let (g, d0) = (*pool.choose(rng).unwrap(), *pool.choose(rng).unwrap());
        if g.then(&d0).rank() != r
            || (g.rank() == m && d0.rank() == m)
            || g.rank().max(d0.rank()) == r + 1
        {
            return None;
        }
        let (_, _, d) = split_high_rank(&spec, &g, &d0, r).unwrap();
        Some((fam, n, d))
    });
}

#[test]
fn word_reduction_agrees_with_search() {
    tally("reduce_word", |rng| {
        let (fam, n, m, r) = *CELLS.choose(rng).unwrap();
        let spec = IdealSpec::new(fam, n, m).unwrap();
        let pool: Vec<PartialMap> = (r + 1..=m)
            .flat_map(|k| all_of_rank(fam, n, k).unwrap())
            .collect();
        let len = rng.gen_range(2..=4);
        let w: Vec<PartialMap> = (0..len).map(|_| *pool.choose(rng).unwrap()).collect();
        let p = w[1..].iter().fold(w[0], |x, y| x.then(y));
        if p.rank() != r {
            return None;
        }
        let (_, _, d) = reduce_word(&spec, &w, r).unwrap();
        Some((fam, n, d))
    });
}
