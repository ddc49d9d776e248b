//! Fixture graphs, named presets on ℕ, and seeded random finite instances.
//!
//! Random finite graphs live on `{0..2s-1}` with `A = {0..s-1}` and
//! `B = {s..2s-1}`. Each generator is an involution swapping `x ∈ A` with
//! `s + σ(x)`, so every generator is a total bijection of the universe.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::NiceGraph;
use crate::iso::{IsoWord, Letter};
use crate::matching::{Component, SymbolicMatching};
use crate::set::DefSet;
use crate::universe::{GeneratorSpec, Universe};

pub use rand::SeedableRng;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn w(letters: &[(&str, bool)]) -> IsoWord {
    IsoWord::new(letters.iter().map(|&(l, inv)| if inv { Letter::inv(l) } else { Letter::new(l) }))
}

/// `A = {0,1}`, `B = {2,3}`, maps `p: x ↦ x+2` and `q: x ↦ (x+1 mod 2)+2`.
pub fn four_cycle() -> NiceGraph {
    let u = Universe::finite(4)
        .generator(GeneratorSpec::table("p", vec![(0, 2), (1, 3), (2, 0), (3, 1)]))
        .generator(GeneratorSpec::table("q", vec![(0, 3), (1, 2), (2, 1), (3, 0)]))
        .build()
        .expect("fixture universe");
    NiceGraph::new(
        &u,
        vec![u.set(&[0, 1]).expect("in range")],
        u.set(&[2, 3]).expect("in range"),
        vec![vec![IsoWord::single("p"), IsoWord::single("q")]],
    )
    .expect("fixture graph")
}

/// The perfect matching `x ↔ x+n` on `{0..2n-1}`.
pub fn single_bijection(n: u64) -> NiceGraph {
    let pairs = (0..n).flat_map(|x| [(x, x + n), (x + n, x)]).collect();
    let u = Universe::finite(2 * n).generator(GeneratorSpec::table("t", pairs)).build().expect("fixture universe");
    NiceGraph::new(&u, vec![u.range(0, n).expect("in range")], u.range(n, 2 * n).expect("in range"), vec![vec![
        IsoWord::single("t"),
    ]])
    .expect("fixture graph")
}

fn successor() -> Universe {
    Universe::affine_nat().generator(GeneratorSpec::affine("s", 1, 1)).build().expect("preset universe")
}

/// The path `0–1–2–…` on ℕ: pieces `{0}` and the evens `≥ 2`, `B` the odds.
pub fn one_ended_path() -> NiceGraph {
    let u = successor();
    NiceGraph::new(
        &u,
        vec![u.set(&[0]).expect("point"), u.progression_from(0, 2, 2).expect("progression")],
        u.progression(1, 2).expect("progression"),
        vec![vec![w(&[("s", false)])], vec![w(&[("s", false)]), w(&[("s", true)])]],
    )
    .expect("preset graph")
}

/// 2-regular on ℕ: `0` joins `1` and `3`, every even `x ≥ 2` joins `x-1` and `x+3`.
pub fn zigzag() -> NiceGraph {
    let u = successor();
    let s3 = w(&[("s", false), ("s", false), ("s", false)]);
    NiceGraph::new(
        &u,
        vec![u.set(&[0]).expect("point"), u.progression_from(0, 2, 2).expect("progression")],
        u.progression(1, 2).expect("progression"),
        vec![vec![w(&[("s", false)]), s3.clone()], vec![w(&[("s", true)]), s3]],
    )
    .expect("preset graph")
}

/// ℕ with `s: n ↦ n+1`, `d: n ↦ 2n`, `e: n ↦ 2n+1`.
pub fn hilbert_universe() -> Universe {
    Universe::affine_nat()
        .generator(GeneratorSpec::affine("d", 2, 0))
        .generator(GeneratorSpec::affine("e", 2, 1))
        .generator(GeneratorSpec::affine("s", 1, 1))
        .build()
        .expect("preset universe")
}

/// Evens joined to the next odd and the one after: `2n ↦ 2n+1, 2n+3`.
/// Degree 2 on `A`, at most 2 on `B` (the vertex `1` has degree 1).
pub fn hilbert_hotel() -> NiceGraph {
    let u = hilbert_universe();
    NiceGraph::new(
        &u,
        vec![u.progression(0, 2).expect("progression")],
        u.progression(1, 2).expect("progression"),
        vec![vec![w(&[("s", false)]), w(&[("s", false), ("s", false), ("s", false)])]],
    )
    .expect("preset graph")
}

/// Named presets on ℕ.
pub fn preset(name: &str) -> Result<NiceGraph> {
    match name {
        "one-ended-path" => Ok(one_ended_path()),
        "hilbert-hotel" => Ok(hilbert_hotel()),
        "zigzag" => Ok(zigzag()),
        _ => Err(Error::malformed(format!("unknown preset {name:?}; known: one-ended-path, hilbert-hotel, zigzag"))),
    }
}

pub const PRESETS: [&str; 3] = ["one-ended-path", "hilbert-hotel", "zigzag"];

/// `k` permutations `σ_j` of `{0..s-1}` with pairwise distinct values at every point.
fn permutation_family(rng: &mut Rng64, s: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 2 {
        // disjoint even cycles: A-vertices a_0..a_{L-1} of a cycle meet b_i and b_{i-1}
        let mut order: Vec<usize> = (0..s).collect();
        order.shuffle(rng);
        let mut targets: Vec<usize> = (0..s).collect();
        targets.shuffle(rng);
        let mut s1 = vec![0; s];
        let mut s2 = vec![0; s];
        let mut at = 0;
        while at < s {
            let rest = s - at;
            let len = if rest <= 3 { rest } else { rng.gen_range(2..=rest.min(8)) };
            let len = if rest - len == 1 { len + 1 } else { len };
            for i in 0..len {
                s1[order[at + i]] = targets[at + i];
                s2[order[at + i]] = targets[at + (i + len - 1) % len];
            }
            at += len;
        }
        vec![s1, s2]
    } else {
        let mut rho: Vec<usize> = (0..s).collect();
        rho.shuffle(rng);
        let mut pi: Vec<usize> = (0..s).collect();
        pi.shuffle(rng);
        let mut offsets: Vec<usize> = (0..s).collect();
        offsets.shuffle(rng);
        offsets.truncate(k);
        offsets.sort_unstable();
        offsets.iter().map(|&c| (0..s).map(|x| pi[(rho[x] + c) % s]).collect()).collect()
    }
}

/// A universe on `{0..2s-1}` whose generators `g0..g{k-1}` form a `k`-regular
/// bipartite graph between `{0..s-1}` and `{s..2s-1}`.
pub fn regular_universe(rng: &mut Rng64, s: u64, k: usize) -> Result<Universe> {
    if k == 0 || (k as u64) > s || (k == 2 && s < 2) {
        return Err(Error::precondition(format!("no {k}-regular instance on {s} + {s} vertices")));
    }
    let mut b = Universe::finite(2 * s);
    for (j, sigma) in permutation_family(rng, s as usize, k).into_iter().enumerate() {
        let pairs = sigma.iter().enumerate().flat_map(|(x, &y)| [(x as u64, s + y as u64), (s + y as u64, x as u64)]).collect();
        b = b.generator(GeneratorSpec::table(format!("g{j}"), pairs));
    }
    b.build()
}

/// A random `k`-regular graph with one piece.
pub fn random_regular(rng: &mut Rng64, s: u64, k: usize) -> Result<NiceGraph> {
    let u = regular_universe(rng, s, k)?;
    let family = (0..k).map(|j| IsoWord::single(format!("g{j}"))).collect();
    NiceGraph::new(&u, vec![u.range(0, s)?], u.range(s, 2 * s)?, vec![family])
}

/// A random `k`-regular graph whose `A` side is split into up to
/// `max_pieces` pieces, each listing all `k` generators in its own order.
/// Unlike [`random_regular`], the first stage of elimination rarely matches
/// everything at once.
pub fn random_regular_split(rng: &mut Rng64, s: u64, k: usize, max_pieces: usize) -> Result<NiceGraph> {
    let u = regular_universe(rng, s, k)?;
    let n_pieces = rng.gen_range(1..=max_pieces.max(1).min(s as usize));
    let mut label: Vec<usize> = (0..s as usize).map(|x| if x < n_pieces { x } else { rng.gen_range(0..n_pieces) }).collect();
    label.shuffle(rng);
    let mut pieces = Vec::new();
    let mut families = Vec::new();
    for p in 0..n_pieces {
        let xs: Vec<u64> = (0..s).filter(|&x| label[x as usize] == p).collect();
        pieces.push(u.set(&xs)?);
        let mut maps: Vec<usize> = (0..k).collect();
        maps.shuffle(rng);
        families.push(maps.into_iter().map(|j| IsoWord::single(format!("g{j}"))).collect());
    }
    NiceGraph::new(&u, pieces, u.range(s, 2 * s)?, families)
}

/// A random graph with up to three pieces, each using a random nonempty
/// subset of the `k` generators in random order.
pub fn random_nice(rng: &mut Rng64, s: u64, k: usize) -> Result<NiceGraph> {
    let u = regular_universe(rng, s, k)?;
    let n_pieces = rng.gen_range(1..=3usize.min(s as usize));
    let mut label = vec![0usize; s as usize];
    for (x, l) in label.iter_mut().enumerate() {
        *l = if x < n_pieces { x } else { rng.gen_range(0..n_pieces) };
    }
    let mut pieces = Vec::new();
    let mut families = Vec::new();
    for p in 0..n_pieces {
        let xs: Vec<u64> = (0..s).filter(|&x| label[x as usize] == p).collect();
        pieces.push(u.set(&xs)?);
        let mut maps: Vec<usize> = (0..k).collect();
        maps.shuffle(rng);
        maps.truncate(rng.gen_range(1..=k));
        families.push(maps.into_iter().map(|j| IsoWord::single(format!("g{j}"))).collect());
    }
    NiceGraph::new(&u, pieces, u.range(s, 2 * s)?, families)
}

/// A random matching of a finite graph built greedily over shuffled edges,
/// keeping roughly `fraction` of what a greedy pass would take.
pub fn random_matching(rng: &mut Rng64, g: &NiceGraph, fraction: f64) -> Result<SymbolicMatching> {
    let n = g.universe().finite_size().ok_or_else(|| Error::precondition("random matchings need a finite universe"))?;
    let mut edges = Vec::new();
    for (i, j) in g.map_refs() {
        for x in g.piece(i).elements() {
            edges.push((x, i, j));
        }
    }
    edges.shuffle(rng);
    let mut used = vec![false; n as usize];
    let mut chosen: Vec<Vec<Vec<u64>>> = g.pieces().iter().enumerate().map(|(i, _)| vec![Vec::new(); g.family(i).len()]).collect();
    for (x, i, j) in edges {
        let y = g.edge(i, j).map().apply(x).expect("total on its piece");
        if !used[x as usize] && !used[y as usize] && rng.gen_bool(fraction) {
            used[x as usize] = true;
            used[y as usize] = true;
            chosen[i][j].push(x);
        }
    }
    let mut comps = Vec::new();
    for (i, fam) in chosen.into_iter().enumerate() {
        for (j, xs) in fam.into_iter().enumerate() {
            comps.push(Component { piece: i, map: j, domain: g.universe().set(&xs)? });
        }
    }
    SymbolicMatching::new(comps)
}

/// A random set in a finite universe, each point kept with probability `p`.
pub fn random_subset(rng: &mut Rng64, u: &Universe, within: &DefSet, p: f64) -> Result<DefSet> {
    let xs: Vec<u64> = within.elements().into_iter().filter(|_| rng.gen_bool(p)).collect();
    u.set(&xs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::validate_matching;
    use crate::oracle;

    #[test]
    fn presets_are_valid() {
        for name in PRESETS {
            assert!(preset(name).unwrap().validate().is_valid(), "{name}");
        }
        assert!(zigzag().is_k_regular(2).unwrap());
        assert!(hilbert_hotel().is_k_regular_in_a_max_k_in_b(2).unwrap());
        assert!(!hilbert_hotel().is_k_regular(2).unwrap());
    }

    #[test]
    fn random_regular_is_regular_and_perfectly_matchable() {
        let mut r = rng(7);
        for k in 1..=4 {
            for s in [4u64, 9, 30] {
                let g = random_regular(&mut r, s, k).unwrap();
                assert!(g.validate().is_valid());
                assert!(g.is_k_regular(k as u64).unwrap(), "k={k} s={s}");
                assert_eq!(oracle::max_matching(&g.explicit_expand(2 * s)).0 as u64, s);
            }
        }
    }

    #[test]
    fn random_nice_and_matching_are_valid() {
        let mut r = rng(11);
        for _ in 0..20 {
            let g = random_nice(&mut r, 25, 3).unwrap();
            assert!(g.validate().is_valid());
            let m = random_matching(&mut r, &g, 0.5).unwrap();
            assert!(validate_matching(&g, &m).is_valid());
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_nice(&mut rng(3), 20, 3).unwrap().to_spec();
        let b = random_nice(&mut rng(3), 20, 3).unwrap().to_spec();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
