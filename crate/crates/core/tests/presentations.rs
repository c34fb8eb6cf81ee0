use depthwork::green::{ideal_elements, IdealSpec};
use depthwork::presentation::{
    cayley, defines, enumerate, knuth_bendix, restriction, tietze, Budgets, Cardinality,
    EnumBudget, Generator, Presentation, TietzeMove, Verdict, Witness,
};
use depthwork::transform::{all_of_rank, Family, PartialMap};
use depthwork::Error;

fn spec(fam: Family, n: usize, m: usize) -> IdealSpec {
    IdealSpec::new(fam, n, m).unwrap()
}

fn idempotent() -> Presentation {
    let a = Generator {
        symbol: "a".into(),
        map: PartialMap::identity(1),
    };
    Presentation::new(vec![a], vec![(vec![0, 0], vec![0])]).unwrap()
}

#[test]
fn cayley_counts() {
    let p = cayley(&spec(Family::I, 2, 2));
    assert_eq!((p.generators.len(), p.relations.len()), (7, 49));
    let p = cayley(&spec(Family::T, 2, 2));
    assert_eq!((p.generators.len(), p.relations.len()), (4, 16));
    for fam in [Family::I, Family::T, Family::PT] {
        for m in fam.epsilon()..=3 {
            let p = cayley(&spec(fam, 3, m));
            assert_eq!(p.invalid_relation(), None);
            assert!(p.is_cayley_form());
            let ranks: Vec<usize> = p.generators.iter().map(|g| g.map.rank()).collect();
            assert!(ranks.windows(2).all(|w| w[0] >= w[1]), "rank descending");
        }
    }
}

#[test]
fn restriction_counts() {
    for fam in [Family::I, Family::T, Family::PT] {
        let s = spec(fam, 3, 2);
        assert_eq!(restriction(&s, fam.epsilon()).unwrap(), cayley(&s));
        assert!(restriction(&s, 3).is_err());
    }
    let top = all_of_rank(Family::I, 3, 2).unwrap();
    let pairs = top
        .iter()
        .flat_map(|a| top.iter().map(move |b| a.then(b)))
        .filter(|p| p.rank() == 2)
        .count();
    let p = restriction(&spec(Family::I, 3, 2), 2).unwrap();
    assert_eq!(p.generators.len(), 18);
    assert_eq!(p.relations.len(), pairs);

    let p = restriction(&spec(Family::T, 5, 3), 3).unwrap();
    assert_eq!(p.min_relation_rank(), Some(3));
}

#[test]
fn enumeration_examples() {
    let t = enumerate(&cayley(&spec(Family::I, 2, 2)), EnumBudget::with_size(100));
    assert!(t.is_closed());
    assert_eq!(t.class_count, 7);

    let s = spec(Family::I, 3, 2);
    let t = enumerate(&restriction(&s, 1).unwrap(), EnumBudget::with_size(280));
    assert!(t.is_closed());
    assert_eq!(t.class_count, 28);

    let t = enumerate(&restriction(&s, 2).unwrap(), EnumBudget::with_size(2_000));
    assert!(!t.is_closed());
}

#[test]
fn completion_examples() {
    let kb = knuth_bendix(&idempotent(), 100);
    assert!(kb.is_confluent());
    assert_eq!(kb.count_normal_forms(), Cardinality::Finite(1));

    let kb = knuth_bendix(&cayley(&spec(Family::T, 2, 2)), 10_000);
    assert!(kb.is_confluent());
    assert_eq!(kb.count_normal_forms(), Cardinality::Finite(4));

    // The restricted quotient is infinite: either completion says so, or it
    // stops and still separates a pair equal in the ideal.
    let s = spec(Family::I, 3, 2);
    let p = restriction(&s, 2).unwrap();
    let kb = knuth_bendix(&p, 20_000);
    if kb.is_confluent() {
        assert_eq!(kb.count_normal_forms(), Cardinality::Infinite);
    }
    let v = defines(&p, &s, &Budgets::default()).unwrap();
    assert!(v.is_not_defines(), "{v:?}");
}

#[test]
fn defines_examples() {
    let b = Budgets::default();
    let s = spec(Family::T, 3, 2);
    assert!(defines(&restriction(&s, 1).unwrap(), &s, &b)
        .unwrap()
        .is_defines());

    let s = spec(Family::I, 4, 3);
    let v = defines(&restriction(&s, 2).unwrap(), &s, &b).unwrap();
    assert_eq!(
        v,
        Verdict::Defines {
            count: ideal_elements(&s).len()
        }
    );

    let p = restriction(&s, 3).unwrap();
    match defines(&p, &s, &b).unwrap() {
        Verdict::NotDefines {
            witness: Witness::WordPair { left, right, .. },
        } => {
            let l = p.evaluate(&p.parse_word(&left).unwrap()).unwrap();
            let r = p.evaluate(&p.parse_word(&right).unwrap()).unwrap();
            assert_eq!(l, r);
            assert_eq!((left.len(), right.len()), (3, 2));
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn defines_rejects_invalid_relations() {
    let s = spec(Family::T, 2, 2);
    let mut p = cayley(&s);
    let (u, _) = p.relations[0].clone();
    let other = (0..p.alphabet_len() as u32)
        .find(|&x| p.evaluate(&[x]) != p.evaluate(&u))
        .unwrap();
    p.relations[0] = (u, vec![other]);
    assert!(matches!(
        defines(&p, &s, &Budgets::default()),
        Err(Error::Usage(_))
    ));
}

#[test]
fn cayley_defines_and_restrictions_are_monotone() {
    let b = Budgets::default();
    for fam in [Family::I, Family::T, Family::PT] {
        for n in 1..=3 {
            for m in fam.epsilon()..=n {
                let s = spec(fam, n, m);
                let size = ideal_elements(&s).len();
                assert_eq!(
                    defines(&cayley(&s), &s, &b).unwrap(),
                    Verdict::Defines { count: size },
                    "{s}"
                );
                let verdicts: Vec<bool> = (fam.epsilon()..=m)
                    .map(|i| {
                        let v = defines(&restriction(&s, i).unwrap(), &s, &b).unwrap();
                        assert!(!v.is_inconclusive(), "{s} i={i}");
                        v.is_defines()
                    })
                    .collect();
                assert!(
                    verdicts.windows(2).all(|w| w[0] || !w[1]),
                    "{s}: {verdicts:?}"
                );
            }
        }
    }
}

#[test]
fn tietze_moves() {
    let b = Budgets::default();
    let s = spec(Family::T, 2, 2);
    let p = cayley(&s);

    let q = tietze(
        &p,
        &TietzeMove::T3 {
            symbol: "z".into(),
            word: vec![1, 2],
        },
        &b,
    )
    .unwrap();
    assert_eq!(q.alphabet_len(), p.alphabet_len() + 1);
    let back = tietze(&q, &TietzeMove::T4 { symbol: "z".into() }, &b).unwrap();
    assert_eq!(back, p);

    // x_s x_t = x_st for s, t in a restriction follows from the full table.
    let r = restriction(&spec(Family::I, 3, 2), 1).unwrap();
    let (u, v) = r.relations[r.relations.len() / 2].clone();
    let mut shrunk = r.clone();
    shrunk
        .relations
        .retain(|rel| rel != &(u.clone(), v.clone()));
    let added = tietze(
        &shrunk,
        &TietzeMove::T1 {
            lhs: u.clone(),
            rhs: v.clone(),
        },
        &b,
    )
    .unwrap();
    assert_eq!(added.relations.len(), r.relations.len());

    let small = Budgets {
        size: Some(50),
        kb_rules: 50,
        ..Budgets::default()
    };
    assert!(matches!(
        tietze(&idempotent(), &TietzeMove::T2 { index: 0 }, &small),
        Err(Error::Rejected(_))
    ));
    assert!(matches!(
        tietze(
            &p,
            &TietzeMove::T1 {
                lhs: vec![0],
                rhs: vec![1]
            },
            &b
        ),
        Err(Error::Rejected(_))
    ));
}
