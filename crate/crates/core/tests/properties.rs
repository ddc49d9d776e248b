//! Randomized invariants checked against pointwise evaluation.

use proptest::prelude::*;

use defmatch::instances::{self, rng};
use defmatch::iso::realize_word;
use defmatch::matching::{aug_start_set, covered, eliminate, flip_family, validate_matching, GeneratingSequence, Part};
use defmatch::oracle::aug_path_exists;
use defmatch::semigroup::{compose_witness, find_embedding, verify_witness, EmbeddingWitness, SearchBounds};
use defmatch::{DefSet, GeneratorSpec, IsoWord, Letter, Universe};

const WINDOW: u64 = 300;

fn nat() -> Universe {
    Universe::affine_nat()
        .generator(GeneratorSpec::affine("d", 2, 0))
        .generator(GeneratorSpec::affine("e", 2, 1))
        .generator(GeneratorSpec::affine("s", 1, 3))
        .generator(GeneratorSpec::affine("t", 3, 1))
        .build()
        .unwrap()
}

/// (threshold, period, residues, exceptional points)
fn periodic_parts() -> impl Strategy<Value = (u64, u64, Vec<u64>, Vec<u64>)> {
    (0u64..25, 1u64..13).prop_flat_map(|(t, p)| {
        (Just(t), Just(p), proptest::collection::vec(0..p, 0..=p as usize), proptest::collection::vec(0..t.max(1), 0..=t as usize))
    })
}

fn build(u: &Universe, (t, p, r, e): &(u64, u64, Vec<u64>, Vec<u64>)) -> DefSet {
    let e: Vec<u64> = e.iter().copied().filter(|&x| x < *t).collect();
    u.periodic(*t, *p, r, &e).unwrap()
}

/// Membership straight from the parts, without the set representation.
fn member((t, p, r, e): &(u64, u64, Vec<u64>, Vec<u64>), x: u64) -> bool {
    if x < *t {
        e.contains(&x)
    } else {
        r.contains(&(x % p))
    }
}

fn word_strategy() -> impl Strategy<Value = IsoWord> {
    proptest::collection::vec((0usize..4, any::<bool>()), 0..4).prop_map(|ls| {
        IsoWord::new(ls.into_iter().map(|(i, inv)| {
            let label = ["d", "e", "s", "t"][i];
            if inv {
                Letter::inv(label)
            } else {
                Letter::new(label)
            }
        }))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn boolean_ops_agree_pointwise(a in periodic_parts(), b in periodic_parts()) {
        let u = nat();
        let (x, y) = (build(&u, &a), build(&u, &b));
        let uni = x.union(&y).unwrap();
        let int = x.intersect(&y).unwrap();
        let dif = x.difference(&y).unwrap();
        let sym = x.symdiff(&y).unwrap();
        let com = x.complement();
        for n in 0..WINDOW {
            let (p, q) = (member(&a, n), member(&b, n));
            prop_assert_eq!(uni.contains(n), p || q);
            prop_assert_eq!(int.contains(n), p && q);
            prop_assert_eq!(dif.contains(n), p && !q);
            prop_assert_eq!(sym.contains(n), p != q);
            prop_assert_eq!(com.contains(n), !p);
        }
        prop_assert_eq!(x.is_subset(&y).unwrap(), dif.is_empty());
        prop_assert_eq!(x.is_disjoint(&y).unwrap(), int.is_empty());
    }

    #[test]
    fn images_agree_pointwise(a in periodic_parts(), w in word_strategy()) {
        let u = nat();
        let x = build(&u, &a);
        let f = realize_word(&u, &w).unwrap();
        let img = f.image(&x).unwrap();
        let pre = f.preimage(&x).unwrap();
        for n in 0..WINDOW {
            if let Some(y) = f.apply(n) {
                prop_assert_eq!(img.contains(y), member(&a, n), "image at {}", y);
                prop_assert_eq!(pre.contains(n), member(&a, y));
            } else {
                prop_assert!(!pre.contains(n));
            }
        }
    }

    #[test]
    fn inverse_undoes(w in word_strategy()) {
        let u = nat();
        let f = realize_word(&u, &w).unwrap();
        let g = f.invert();
        for n in 0..WINDOW {
            if let Some(y) = f.apply(n) {
                prop_assert_eq!(g.apply(y), Some(n));
            }
        }
        prop_assert_eq!(g.domain(), f.image_set());
    }

    #[test]
    fn composition_is_associative(a in word_strategy(), b in word_strategy(), c in word_strategy()) {
        let u = nat();
        let (f, g, h) = (realize_word(&u, &a).unwrap(), realize_word(&u, &b).unwrap(), realize_word(&u, &c).unwrap());
        let left = h.after(&g).unwrap().after(&f).unwrap();
        let right = h.after(&g.after(&f).unwrap()).unwrap();
        prop_assert!(left.same_graph(&right).unwrap());
        for n in 0..WINDOW {
            let direct = f.apply(n).and_then(|x| g.apply(x)).and_then(|x| h.apply(x));
            prop_assert_eq!(left.apply(n), direct);
        }
    }

    #[test]
    fn elimination_leaves_no_short_path(seed in any::<u64>(), k in 2usize..5, big_k in 0usize..4) {
        let mut r = rng(seed);
        let s = 8 + seed % 40;
        let g = instances::random_nice(&mut r, s, k).unwrap();
        let m0 = instances::random_matching(&mut r, &g, 0.5).unwrap();
        let m = eliminate(&g, &m0, big_k).unwrap();
        prop_assert!(validate_matching(&g, &m).is_valid());
        prop_assert!(covered(&g, &m0, Part::V).unwrap().is_subset(&covered(&g, &m, Part::V).unwrap()).unwrap());
        let ex = g.explicit_expand(2 * s);
        let mt = ex.matching_from_labels(&m.window_pairs(&g, 2 * s)).unwrap();
        prop_assert!(aug_path_exists(&ex, &mt, 2 * big_k + 1).unwrap().is_none());
    }

    #[test]
    fn flips_grow_the_matching_by_the_start_count(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = 6 + seed % 20;
        let g = instances::random_regular_split(&mut r, s, 2, 4).unwrap();
        let m = instances::random_matching(&mut r, &g, 0.6).unwrap();
        for len in [1usize, 3] {
            for first in g.map_refs().filter(|r| r.0 == 0) {
                let mut seq = vec![first];
                if len == 3 {
                    let Some(mid) = g.map_refs().find(|&r| m.component(r).is_some()) else { continue };
                    let Some(last) = (0..g.family(mid.0).len()).map(|j| (mid.0, j)).find(|&r| r != mid) else { continue };
                    seq.extend([mid, last]);
                }
                let gs = GeneratingSequence::new(seq);
                if gs.check(&g).is_err() {
                    continue;
                }
                let x = aug_start_set(&g, &m, &gs).unwrap();
                let out = flip_family(&g, &m, &gs, &x).unwrap();
                prop_assert_eq!(out.size(), m.size() + x.count());
                prop_assert!(validate_matching(&g, &out).is_valid());
            }
        }
    }

    #[test]
    fn found_witnesses_verify_and_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = instances::random_regular(&mut r, 6, 2).unwrap();
        let u = g.universe();
        let x = instances::random_subset(&mut r, u, &u.whole(), 0.4).unwrap();
        let y = instances::random_subset(&mut r, u, &u.whole(), 0.6).unwrap();
        if let Some(w) = find_embedding(u, &x, &y, &SearchBounds::default()).unwrap() {
            prop_assert!(verify_witness(&w).valid);
            prop_assert!(x.count() <= y.count());
            let json = serde_json::to_string(&w.to_json()).unwrap();
            let back = EmbeddingWitness::from_json(u, &serde_json::from_str(&json).unwrap()).unwrap();
            prop_assert!(verify_witness(&back).valid);
            for p in x.elements() {
                prop_assert_eq!(back.apply(p).unwrap(), w.apply(p).unwrap());
            }
        }
    }

    #[test]
    fn witness_composition_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = instances::random_regular(&mut r, 5, 3).unwrap();
        let u = g.universe();
        let sets: Vec<DefSet> = (0..4).map(|_| instances::random_subset(&mut r, u, &u.whole(), 0.5).unwrap()).collect();
        let b = SearchBounds::default();
        let links: Vec<Option<EmbeddingWitness>> = (0..3).map(|i| find_embedding(u, &sets[i], &sets[i + 1], &b).unwrap()).collect();
        if let [Some(p), Some(q), Some(w)] = &links[..] {
            let left = compose_witness(&compose_witness(p, q).unwrap(), w).unwrap();
            let right = compose_witness(p, &compose_witness(q, w).unwrap()).unwrap();
            prop_assert!(verify_witness(&left).valid && verify_witness(&right).valid);
            for x in sets[0].elements() {
                prop_assert_eq!(left.apply(x).unwrap(), right.apply(x).unwrap());
            }
        }
    }
}
