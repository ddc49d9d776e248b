//! Weak cancellation: from `kA ≤ kB` build a multigraph from `A` to `B` that
//! is `k`-regular on `A` and has degree `≤ k` on `B`, match it with a small
//! defect `Y₀`, and read off `A ∖ Y₀ ≤ B`.

use num_rational::Ratio;

use crate::coverage::{match_with_defect, CoverageOptions, CoverageReport, Variant};
use crate::error::{Error, Result};
use crate::graph::NiceGraph;
use crate::iso::{realize_word, IsoWord, Letter};
use crate::set::DefSet;
use crate::universe::Universe;

use super::search::{check_leq_m, LeqM, SearchBounds};
use super::tagged::{lifted_label, shift_label};
use super::{compose_witness, sum_witness, verify_witness, EmbeddingWitness, TaggedUniverse, WitnessPiece};

/// `word` carries `c` (part of copy `i` of `A`) onto `d` (part of copy `j` of `B`).
#[derive(Debug, Clone)]
pub struct CancelPiece {
    pub i: u64,
    pub j: u64,
    pub c: DefSet,
    pub d: DefSet,
    pub word: IsoWord,
}

#[derive(Debug, Clone)]
pub struct CancellationOutput {
    pub y0: DefSet,
    pub pieces: Vec<CancelPiece>,
    /// `A ∖ Y₀ ≤ B` assembled from the pieces.
    pub witness: EmbeddingWitness,
    /// `None` when `A` is empty.
    pub coverage: Option<CoverageReport>,
    pub graph: Option<NiceGraph>,
}

/// One piece of `θ` seen from copy `i`: base points `set` go by `word` to copy `j`.
struct Route {
    i: u64,
    j: u64,
    set: DefSet,
    word: IsoWord,
}

/// Cancels `k` from a witness `θ : kA ≤ kB` over `t` (with `k` copies).
pub fn cancel(t: &TaggedUniverse, a: &DefSet, b: &DefSet, theta: &EmbeddingWitness, m: Ratio<u64>, opts: CoverageOptions) -> Result<CancellationOutput> {
    let base = t.base();
    let k = t.copies();
    if theta.universe.id() != t.universe().id() {
        return Err(Error::UniverseMismatch);
    }
    let report = verify_witness(theta);
    if !report.valid {
        return Err(Error::precondition(format!("input witness is invalid: {:?}", report.problems)));
    }
    if !theta.source.equals(&t.copies_of(a, k)?)? || !theta.target.is_subset(&t.copies_of(b, k)?)? {
        return Err(Error::precondition("input witness is not from k copies of A into k copies of B"));
    }
    if a.is_empty() {
        return Ok(CancellationOutput {
            y0: base.empty(),
            pieces: Vec::new(),
            witness: EmbeddingWitness { universe: base.clone(), source: base.empty(), target: b.clone(), pieces: Vec::new() },
            coverage: None,
            graph: None,
        });
    }

    let mut routes = Vec::new();
    for p in &theta.pieces {
        for i in 0..k {
            let part = t.untag(i, &p.set)?;
            if part.is_empty() {
                continue;
            }
            let (word, j) = t
                .project(&p.word, i)
                .ok_or_else(|| Error::invariant(format!("{} is undefined on copy {i}", p.word)))?;
            routes.push(Route { i, j, set: part, word });
        }
    }

    // cells of A on which every copy follows one route, and routes agree or differ everywhere
    let mut cells = vec![a.clone()];
    for r in &routes {
        cells = split(&cells, &r.set)?;
    }
    let route_of = |cell: &DefSet, i: u64| -> Result<usize> {
        for (n, r) in routes.iter().enumerate() {
            if r.i == i && cell.is_subset(&r.set)? {
                return Ok(n);
            }
        }
        Err(Error::invariant(format!("copy {i} of {cell} is not covered by the witness")))
    };
    let maps: Vec<_> = routes.iter().map(|r| realize_word(base, &r.word)).collect::<Result<_>>()?;
    let mut refined = Vec::new();
    for cell in cells {
        let rs: Vec<usize> = (0..k).map(|i| route_of(&cell, i)).collect::<Result<_>>()?;
        let mut parts = vec![cell];
        for x in 0..rs.len() {
            for y in x + 1..rs.len() {
                let eq = maps[rs[x]].equalizer(&maps[rs[y]])?;
                parts = split(&parts, &eq)?;
            }
        }
        for part in parts {
            refined.push((part, rs.clone()));
        }
    }

    // H lives on two copies of the base: A in copy 0, B in copy 1
    let h_u = TaggedUniverse::new(base, 2)?;
    let mut pieces = Vec::new();
    let mut families = Vec::new();
    let mut weights = Vec::new();
    let mut realized: Vec<Vec<usize>> = Vec::new();
    for (cell, rs) in &refined {
        let mut fam: Vec<usize> = Vec::new();
        let mut w: Vec<u64> = Vec::new();
        for &r in rs {
            let f = maps[r].restrict(cell)?;
            let mut same = None;
            for (slot, &q) in fam.iter().enumerate() {
                if maps[q].restrict(cell)?.same_graph(&f)? {
                    same = Some(slot);
                    break;
                }
            }
            match same {
                Some(slot) => w[slot] += 1,
                None => {
                    fam.push(r);
                    w.push(1);
                }
            }
        }
        pieces.push(h_u.tag(0, cell)?);
        families.push(fam.iter().map(|&r| h_u.lift_word(&routes[r].word, 0, 1)).collect());
        weights.push(w);
        realized.push(fam);
    }
    let h = NiceGraph::new(h_u.universe(), pieces, h_u.tag(1, b)?, families)?.with_multiplicity(weights)?;
    let rep = match_with_defect(&h, m, Variant::Multigraph, opts)?;

    let y0 = h_u.untag(0, &rep.y0)?;
    let mut out_pieces = Vec::new();
    for c in rep.matching.components() {
        let r = &routes[realized[c.piece][c.map]];
        let cset = h_u.untag(0, &c.domain)?;
        let d = maps[realized[c.piece][c.map]].image(&cset)?;
        out_pieces.push(CancelPiece { i: r.i, j: r.j, c: cset, d, word: r.word.clone() });
    }
    let witness = EmbeddingWitness {
        universe: base.clone(),
        source: a.difference(&y0)?,
        target: b.clone(),
        pieces: out_pieces.iter().map(|p| WitnessPiece { set: p.c.clone(), word: p.word.clone() }).collect(),
    };
    let out = CancellationOutput { y0, pieces: out_pieces, witness, coverage: Some(rep), graph: Some(h) };
    check_output(base, a, b, &out)?;
    Ok(out)
}

fn split(cells: &[DefSet], by: &DefSet) -> Result<Vec<DefSet>> {
    let mut out = Vec::with_capacity(cells.len());
    for c in cells {
        for part in [c.intersect(by)?, c.difference(by)?] {
            if !part.is_empty() {
                out.push(part);
            }
        }
    }
    Ok(out)
}

fn check_output(base: &Universe, a: &DefSet, b: &DefSet, out: &CancellationOutput) -> Result<()> {
    let mut cs = base.empty();
    let mut ds = base.empty();
    for p in &out.pieces {
        if !p.c.is_disjoint(&cs)? || !p.d.is_disjoint(&ds)? {
            return Err(Error::invariant("cancellation pieces overlap"));
        }
        if realize_word(base, &p.word)?.image(&p.c)? != p.d {
            return Err(Error::invariant(format!("{} does not carry its piece onto its image", p.word)));
        }
        cs = cs.union(&p.c)?;
        ds = ds.union(&p.d)?;
    }
    if cs != a.difference(&out.y0)? || !ds.is_subset(b)? || !out.y0.is_subset(a)? {
        return Err(Error::invariant("cancellation pieces do not partition A ∖ Y0 into B"));
    }
    let report = verify_witness(&out.witness);
    if !report.valid {
        return Err(Error::invariant(format!("reassembled witness is invalid: {:?}", report.problems)));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TwoFromKEntry {
    pub m: u64,
    pub cancellation: CancellationOutput,
    /// `X₀ ≤_m 2X` when the bounded search finds it.
    pub self_embedding: Option<LeqM>,
}

#[derive(Debug, Clone)]
pub struct TwoFromK {
    /// `2(nX) ≤ nX` over `2n` copies.
    pub doubled: EmbeddingWitness,
    /// Two copies of the base; `2X` is copies 0 and 1, `X` is copy 0.
    pub pair: TaggedUniverse,
    pub entries: Vec<TwoFromKEntry>,
}

/// From `w : (n+1)X ≤ nX` over `tw` (with `n + 1` copies), derives
/// `2(nX) ≤ nX` by repeated substitution and cancels `n` for each
/// `m ≤ m_max`, giving `X₀` with `2X ∖ X₀ ≤ X`.
pub fn two_from_k(
    tw: &TaggedUniverse,
    x: &DefSet,
    w: &EmbeddingWitness,
    m_max: u64,
    bounds: &SearchBounds,
    opts: CoverageOptions,
) -> Result<TwoFromK> {
    let base = tw.base();
    if tw.copies() < 2 {
        return Err(Error::precondition("the input witness needs n + 1 ≥ 2 copies"));
    }
    let n = tw.copies() - 1;
    let report = verify_witness(w);
    if !report.valid || w.universe.id() != tw.universe().id() {
        return Err(Error::precondition(format!("input witness is invalid: {:?}", report.problems)));
    }
    if !w.source.equals(&tw.copies_of(x, n + 1)?)? || !w.target.is_subset(&tw.copies_of(x, n)?)? {
        return Err(Error::precondition("input witness is not from n + 1 copies of X into n copies"));
    }

    // nX + jX ≤ nX for j = 1..=n: feed copy n + j back into copy n, then apply w again
    let flat = TaggedUniverse::new(base, 2 * n)?;
    let rehome = |s: &DefSet, copies: u64| -> Result<DefSet> {
        let mut out = flat.universe().empty();
        for c in 0..copies {
            out = out.union(&flat.tag(c, &tw.untag(c, s)?)?)?;
        }
        Ok(out)
    };
    let w1 = EmbeddingWitness {
        universe: flat.universe().clone(),
        source: flat.copies_of(x, n + 1)?,
        target: flat.copies_of(x, n)?,
        pieces: w
            .pieces
            .iter()
            .map(|p| Ok(WitnessPiece { set: rehome(&p.set, n + 1)?, word: p.word.clone() }))
            .collect::<Result<_>>()?,
    };
    let mut acc = w1.clone();
    for j in 1..n {
        let copy = flat.tag(n + j, x)?;
        let back = EmbeddingWitness {
            universe: flat.universe().clone(),
            source: copy.clone(),
            target: flat.tag(n, x)?,
            pieces: if copy.is_empty() {
                Vec::new()
            } else {
                vec![WitnessPiece { set: copy, word: IsoWord::single(shift_label(n + j, n)) }]
            },
        };
        acc = compose_witness(&sum_witness(&acc, &back)?, &w1)?;
    }
    let report = verify_witness(&acc);
    if !report.valid {
        return Err(Error::invariant(format!("substitution chain broke: {:?}", report.problems)));
    }

    // read the 2n flat copies as n copies of the pair universe: flat copy c = n·a + t
    let pair = TaggedUniverse::new(base, 2)?;
    let nested = TaggedUniverse::new(pair.universe(), n)?;
    let translate = |word: &IsoWord| -> Result<IsoWord> {
        word.letters()
            .iter()
            .map(|l| {
                let meta = flat.letter_meta(&l.label).ok_or_else(|| Error::UnknownLabel(l.label.clone()))?;
                let (a0, t0) = (meta.from / n, meta.from % n);
                let (a1, t1) = (meta.to / n, meta.to % n);
                let label = match &meta.base {
                    Some(g) => lifted_label(&lifted_label(g, a0, a1), t0, t1),
                    None if a0 == a1 => shift_label(t0, t1),
                    None => lifted_label(&shift_label(a0, a1), t0, t1),
                };
                Ok(Letter { label, inverse: l.inverse })
            })
            .collect::<Result<Vec<_>>>()
            .map(IsoWord::new)
    };
    let nu = nested.universe();
    let theta = EmbeddingWitness {
        universe: nu.clone(),
        source: nu.resolve(&acc.source.to_spec())?,
        target: nu.resolve(&acc.target.to_spec())?,
        pieces: acc
            .pieces
            .iter()
            .map(|p| Ok(WitnessPiece { set: nu.resolve(&p.set.to_spec())?, word: translate(&p.word)? }))
            .collect::<Result<_>>()?,
    };
    let alpha = pair.copies_of(x, 2)?;
    let beta = pair.tag(0, x)?;
    let mut entries = Vec::new();
    for m in 1..=m_max {
        let c = cancel(&nested, &alpha, &beta, &theta, Ratio::from_integer(m), opts)?;
        let self_embedding = check_leq_m(pair.universe(), &c.y0, &alpha, Ratio::from_integer(m), bounds)?;
        entries.push(TwoFromKEntry { m, cancellation: c, self_embedding });
    }
    Ok(TwoFromK { doubled: acc, pair, entries })
}
