//! Any two words over `X_{r+1,m}` with the same product of rank `r` are
//! connected by relations with labels of rank in `[r+1, m]`.

use std::collections::HashMap;

use depthwork::derivation::{check, equalize_pairs, reduce_word, Derivation};
use depthwork::green::IdealSpec;
use depthwork::transform::{all_of_rank, product, Family, PartialMap};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Joins each word to one canonical pair per product; returns the number of
/// words handled.
fn connect_all(
    spec: IdealSpec,
    r: usize,
    words: &[Vec<PartialMap>],
    rng: &mut ChaCha8Rng,
) -> usize {
    let mut canon: HashMap<PartialMap, (PartialMap, PartialMap)> = HashMap::new();
    let mut to_canon: Vec<Derivation> = Vec::new();
    for w in words {
        let p = product(w).unwrap();
        let (a, b, d) = reduce_word(&spec, w, r).unwrap_or_else(|e| panic!("{spec} {w:?}: {e}"));
        let &mut (ca, cb) = canon.entry(p).or_insert((a, b));
        let e = equalize_pairs(spec.fam, &ca, &cb, &a, &b, r).unwrap();
        let full = d.then(&e).unwrap();
        check(&full).unwrap();
        assert!(full.window.0 > r && full.window.1 <= spec.m);
        to_canon.push(full);
    }
    // spot-check joined pairs w -> canon -> w'
    for _ in 0..words.len().min(200) {
        let i = rng.gen_range(0..words.len());
        let j = rng.gen_range(0..words.len());
        if product(&words[i]) != product(&words[j]) {
            continue;
        }
        let joined = to_canon[i].clone().then(&to_canon[j].reversed()).unwrap();
        check(&joined).unwrap();
        assert_eq!(joined.start, words[i]);
        assert_eq!(joined.end, words[j]);
    }
    words.len()
}

fn letters(spec: &IdealSpec, r: usize) -> Vec<PartialMap> {
    (r + 1..=spec.m)
        .flat_map(|k| all_of_rank(spec.fam, spec.n, k).unwrap())
        .collect()
}

#[test]
fn all_short_words_in_i3_are_connected() {
    let (spec, r) = (IdealSpec::new(Family::I, 3, 2).unwrap(), 0);
    let ls = letters(&spec, r);
    let mut words: Vec<Vec<PartialMap>> = Vec::new();
    for &a in &ls {
        for &b in &ls {
            words.push(vec![a, b]);
            for &c in &ls {
                words.push(vec![a, b, c]);
            }
        }
    }
    words.retain(|w| product(w).unwrap().rank() == r);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let k = connect_all(spec, r, &words, &mut rng);
    assert!(k > 1000, "{k}");
}

#[test]
fn sampled_words_are_connected() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for (fam, n, m, r) in [
        (Family::I, 4, 3, 1),
        (Family::T, 5, 4, 2),
        (Family::PT, 4, 3, 1),
    ] {
        let spec = IdealSpec::new(fam, n, m).unwrap();
        let ls = letters(&spec, r);
        // Few products, so that many words share one.
        let targets: Vec<PartialMap> = all_of_rank(fam, n, r)
            .unwrap()
            .choose_multiple(&mut rng, 3)
            .copied()
            .collect();
        let mut words = Vec::new();
        for _ in 0..200_000 {
            if words.len() == 60 {
                break;
            }
            let len = rng.gen_range(2..=5);
            let w: Vec<PartialMap> = (0..len).map(|_| *ls.choose(&mut rng).unwrap()).collect();
            if targets.contains(&product(&w).unwrap()) {
                words.push(w);
            }
        }
        assert!(words.len() >= 30, "{spec}: {}", words.len());
        connect_all(spec, r, &words, &mut rng);
    }
}
