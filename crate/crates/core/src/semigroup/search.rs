//! Bounded searches for embedding witnesses. A `None` means the search ran
//! out of candidates, never that no witness exists; only a counting
//! argument on a finite universe rules one out.

use std::collections::HashMap;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::iso::{enumerate_pseudogroup, realize_word, IsoWord, PartialIso};
use crate::oracle::{self, ExplicitGraph};
use crate::set::DefSet;
use crate::universe::{Backend, Universe};

use super::{verify_witness, EmbeddingWitness, TaggedUniverse, WitnessPiece};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_word_len: usize,
    /// Largest `q` tried for `pX ≤ qY`.
    pub q_max: u64,
    /// Node budget of the depth-first search on ℕ.
    pub max_nodes: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { max_word_len: 2, q_max: 3, max_nodes: 20_000 }
    }
}

/// Searches for `x ≤ y` among the words of length `≤ max_word_len`.
pub fn find_embedding(u: &Universe, x: &DefSet, y: &DefSet, bounds: &SearchBounds) -> Result<Option<EmbeddingWitness>> {
    let cands = enumerate_pseudogroup(u, bounds.max_word_len)?;
    find_embedding_with(u, x, y, &cands, bounds.max_nodes)
}

/// Searches for `x ≤ y` using the given maps, each named by its word.
///
/// On a finite universe this is exact for the candidate set: points are
/// joined when some candidate carries one to the other and a maximum
/// matching decides. On ℕ, pieces are taken greedily (the largest part of
/// what is left that a candidate can still place) with backtracking over the
/// choice of candidates.
pub fn find_embedding_with(
    u: &Universe,
    x: &DefSet,
    y: &DefSet,
    candidates: &[(IsoWord, PartialIso)],
    max_nodes: u64,
) -> Result<Option<EmbeddingWitness>> {
    if x.universe_id() != u.id() || y.universe_id() != u.id() {
        return Err(Error::UniverseMismatch);
    }
    let pieces = if x.is_empty() {
        Some(Vec::new())
    } else {
        match u.backend() {
            Backend::Finite { .. } => finite_search(u, x, y, candidates)?,
            Backend::AffineNat => {
                let useful: Vec<&(IsoWord, PartialIso)> = candidates
                    .iter()
                    .filter(|(_, f)| !f.is_empty())
                    .filter(|(_, f)| !f.domain().is_disjoint(x).unwrap_or(true) && !f.image_set().is_disjoint(y).unwrap_or(true))
                    .collect();
                let mut chosen = Vec::new();
                let mut nodes = 0;
                if dfs(&useful, 0, x.clone(), y.clone(), &mut chosen, &mut nodes, max_nodes)? {
                    Some(chosen)
                } else {
                    None
                }
            }
        }
    };
    let Some(pieces) = pieces else { return Ok(None) };
    let w = EmbeddingWitness { universe: u.clone(), source: x.clone(), target: y.clone(), pieces };
    let report = verify_witness(&w);
    if !report.valid {
        return Err(Error::invariant(format!("search produced an invalid witness: {:?}", report.problems)));
    }
    if u.finite_size().is_some() && x.count() > y.count() {
        return Err(Error::invariant("witness contradicts counting"));
    }
    Ok(Some(w))
}

fn finite_search(u: &Universe, x: &DefSet, y: &DefSet, candidates: &[(IsoWord, PartialIso)]) -> Result<Option<Vec<WitnessPiece>>> {
    if x.count() > y.count() {
        return Ok(None);
    }
    let xs = x.elements();
    let ys = y.elements();
    let y_index: HashMap<u64, usize> = ys.iter().enumerate().map(|(j, &v)| (v, j)).collect();
    let mut label: HashMap<(usize, usize), usize> = HashMap::new();
    for (c, (_, f)) in candidates.iter().enumerate() {
        for (i, &v) in xs.iter().enumerate() {
            if let Some(j) = f.apply(v).and_then(|w| y_index.get(&w).copied()) {
                label.entry((i, j)).or_insert(c);
            }
        }
    }
    let mut edges: Vec<(usize, usize)> = label.keys().copied().collect();
    edges.sort_unstable();
    let g = ExplicitGraph::new(xs.len(), ys.len(), edges);
    let (size, pairs) = oracle::max_matching(&g);
    if size < xs.len() {
        return Ok(None);
    }
    let mut by_word: Vec<(usize, Vec<u64>)> = Vec::new();
    for (i, j) in pairs {
        let c = label[&(i, j)];
        match by_word.iter_mut().find(|(k, _)| *k == c) {
            Some((_, pts)) => pts.push(xs[i]),
            None => by_word.push((c, vec![xs[i]])),
        }
    }
    by_word.sort_by_key(|(c, _)| *c);
    by_word
        .into_iter()
        .map(|(c, pts)| Ok(WitnessPiece { set: u.set(&pts)?, word: candidates[c].0.clone() }))
        .collect::<Result<_>>()
        .map(Some)
}

fn dfs(
    cands: &[&(IsoWord, PartialIso)],
    from: usize,
    remaining: DefSet,
    avail: DefSet,
    chosen: &mut Vec<WitnessPiece>,
    nodes: &mut u64,
    cap: u64,
) -> Result<bool> {
    if remaining.is_empty() {
        return Ok(true);
    }
    for (i, (word, f)) in cands.iter().enumerate().skip(from) {
        *nodes += 1;
        if *nodes > cap {
            return Err(Error::Resource { what: "embedding search nodes", value: *nodes, cap });
        }
        let piece = remaining.intersect(&f.preimage(&avail)?)?;
        if piece.is_empty() {
            continue;
        }
        let rest = remaining.difference(&piece)?;
        let left = avail.difference(&f.image(&piece)?)?;
        chosen.push(WitnessPiece { set: piece, word: word.clone() });
        if dfs(cands, i + 1, rest, left, chosen, nodes, cap)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// `pX ≤ qY` with `p/q ≥ m`, over `max(p, q)` tagged copies.
#[derive(Debug, Clone)]
pub struct LeqM {
    pub m: Ratio<u64>,
    pub p: u64,
    pub q: u64,
    pub tagged: TaggedUniverse,
    pub witness: EmbeddingWitness,
}

/// Searches `q = 1..=q_max` with `p = ⌈m·q⌉`. Candidate maps are base words
/// lifted between every pair of copies. Budget exhaustion counts as not found.
pub fn check_leq_m(u: &Universe, x: &DefSet, y: &DefSet, m: Ratio<u64>, bounds: &SearchBounds) -> Result<Option<LeqM>> {
    if m == Ratio::from_integer(0) {
        return Err(Error::precondition("m must be positive"));
    }
    let base_words = enumerate_pseudogroup(u, bounds.max_word_len)?;
    for q in 1..=bounds.q_max {
        let p = (m * Ratio::from_integer(q)).ceil().to_integer();
        if u.finite_size().is_some() && p * x.count() > q * y.count() {
            continue;
        }
        let t = TaggedUniverse::new(u, p.max(q))?;
        let source = t.copies_of(x, p)?;
        let target = t.copies_of(y, q)?;
        let mut cands = Vec::new();
        for (w, _) in &base_words {
            for from in 0..p {
                for to in 0..q {
                    let lw = t.lift_word(w, from, to);
                    let f = realize_word(t.universe(), &lw)?;
                    cands.push((lw, f));
                }
            }
        }
        match find_embedding_with(t.universe(), &source, &target, &cands, bounds.max_nodes) {
            Ok(Some(witness)) => return Ok(Some(LeqM { m, p, q, tagged: t, witness })),
            Ok(None) => {}
            Err(e) if e.is_resource() => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// `X₀ ≤_m X` and `X ∖ X₀ ≤ Y`.
#[derive(Debug, Clone)]
pub struct LeqZero {
    pub x0: DefSet,
    pub self_embedding: LeqM,
    pub rest: EmbeddingWitness,
}

#[derive(Debug, Clone)]
pub struct LeqZeroEntry {
    pub m: u64,
    pub found: Option<LeqZero>,
}

/// For each integer `m ≤ m_max`, tries `X₀ = ∅` (so `X ≤ Y` directly) and
/// then `X₀ = X` (so `X ≤_m X`).
pub fn check_leq_0(u: &Universe, x: &DefSet, y: &DefSet, m_max: u64, bounds: &SearchBounds) -> Result<Vec<LeqZeroEntry>> {
    let attempt = |x0: &DefSet| -> Result<Option<EmbeddingWitness>> {
        match find_embedding(u, &x.difference(x0)?, y, bounds) {
            Err(e) if e.is_resource() => Ok(None),
            other => other,
        }
    };
    let empty = u.empty();
    let strategies = [(empty.clone(), attempt(&empty)?), (x.clone(), attempt(x)?)];
    let mut out = Vec::new();
    for m in 1..=m_max {
        let mut found = None;
        for (x0, rest) in &strategies {
            let Some(rest) = rest else { continue };
            if let Some(se) = check_leq_m(u, x0, x, Ratio::from_integer(m), bounds)? {
                found = Some(LeqZero { x0: x0.clone(), self_embedding: se, rest: rest.clone() });
                break;
            }
        }
        out.push(LeqZeroEntry { m, found });
    }
    Ok(out)
}
