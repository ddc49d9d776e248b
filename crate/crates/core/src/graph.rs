//! Bipartite graphs whose edges over each piece `A_i` of the left side are the
//! disjoint graphs of finitely many bijections `A_i → B`, optionally weighted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iso::{IsoWord, PartialIso};
use crate::oracle::ExplicitGraph;
use crate::set::{DefSet, SetSpec};
use crate::universe::{Backend, Limits, Universe, UniverseSpec};

/// One edge bijection of a piece.
#[derive(Debug, Clone)]
pub struct EdgeMap {
    word: IsoWord,
    full: PartialIso,
    map: PartialIso,
}

impl EdgeMap {
    pub fn word(&self) -> &IsoWord {
        &self.word
    }

    /// The realized word before restriction to its piece.
    pub fn full(&self) -> &PartialIso {
        &self.full
    }

    /// The bijection restricted to its piece.
    pub fn map(&self) -> &PartialIso {
        &self.map
    }
}

/// Union of a list of sets in `universe`.
pub(crate) fn union_all<'a>(universe: &Universe, sets: impl IntoIterator<Item = &'a DefSet>) -> Result<DefSet> {
    let mut acc = universe.empty();
    for s in sets {
        acc = acc.union(s)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct NiceGraph {
    universe: Universe,
    pieces: Vec<DefSet>,
    b: DefSet,
    families: Vec<Vec<EdgeMap>>,
    weights: Option<Vec<Vec<u64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    PiecesOverlap,
    PieceMeetsB,
    NotTotal,
    ImageEscapesB,
    OverlappingGraphs,
    ZeroMultiplicity,
    UnknownMap,
    DomainEscapesPiece,
    DomainsOverlap,
    ImagesOverlap,
}

/// One violated invariant with a nonempty witnessing set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub clause: Clause,
    /// Piece and map indices the clause refers to.
    pub at: Vec<usize>,
    pub witness: SetSpec,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, clause: Clause) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// JSON form of a graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSpec {
    pub universe: UniverseSpec,
    pub pieces: Vec<SetSpec>,
    #[serde(rename = "B")]
    pub b: SetSpec,
    pub families: Vec<Vec<IsoWord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<Vec<Vec<u64>>>,
}

impl NiceGraph {
    /// Realizes the words; invariants are checked by [`NiceGraph::validate`].
    pub fn new(universe: &Universe, pieces: Vec<DefSet>, b: DefSet, families: Vec<Vec<IsoWord>>) -> Result<Self> {
        let fams = families
            .into_iter()
            .map(|ws| ws.into_iter().map(|w| universe.realize(&w).map(|f| (w, f))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_maps(universe, pieces, b, fams)
    }

    /// Like [`NiceGraph::new`] with maps already realized.
    pub fn from_maps(
        universe: &Universe,
        pieces: Vec<DefSet>,
        b: DefSet,
        families: Vec<Vec<(IsoWord, PartialIso)>>,
    ) -> Result<Self> {
        if pieces.len() != families.len() {
            return Err(Error::malformed(format!(
                "{} pieces but {} map families",
                pieces.len(),
                families.len()
            )));
        }
        let whole = universe.whole();
        whole.same_universe(&b)?;
        let mut fams = Vec::with_capacity(families.len());
        for (piece, family) in pieces.iter().zip(families) {
            whole.same_universe(piece)?;
            let mut out = Vec::with_capacity(family.len());
            for (word, full) in family {
                whole.same_universe(full.domain())?;
                let map = full.restrict(piece)?;
                out.push(EdgeMap { word, full, map });
            }
            fams.push(out);
        }
        Ok(NiceGraph { universe: universe.clone(), pieces, b, families: fams, weights: None })
    }

    /// Attaches edge multiplicities, one per map.
    pub fn with_multiplicity(mut self, weights: Vec<Vec<u64>>) -> Result<Self> {
        if weights.len() != self.families.len()
            || weights.iter().zip(&self.families).any(|(w, f)| w.len() != f.len())
        {
            return Err(Error::malformed("multiplicity shape differs from the map families"));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn from_spec(spec: &GraphSpec, limits: Limits) -> Result<Self> {
        let u = Universe::from_spec(&spec.universe, limits)?;
        let pieces = spec.pieces.iter().map(|p| u.resolve(p)).collect::<Result<Vec<_>>>()?;
        let b = u.resolve(&spec.b)?;
        let g = NiceGraph::new(&u, pieces, b, spec.families.clone())?;
        match &spec.multiplicity {
            Some(w) => g.with_multiplicity(w.clone()),
            None => Ok(g),
        }
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            universe: self.universe.to_spec(),
            pieces: self.pieces.iter().map(DefSet::to_spec).collect(),
            b: self.b.to_spec(),
            families: self.families.iter().map(|f| f.iter().map(|e| e.word.clone()).collect()).collect(),
            multiplicity: self.weights.clone(),
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn pieces(&self) -> &[DefSet] {
        &self.pieces
    }

    pub fn piece(&self, i: usize) -> &DefSet {
        &self.pieces[i]
    }

    pub fn b(&self) -> &DefSet {
        &self.b
    }

    pub fn family(&self, i: usize) -> &[EdgeMap] {
        &self.families[i]
    }

    pub fn edge(&self, piece: usize, map: usize) -> &EdgeMap {
        &self.families[piece][map]
    }

    pub fn num_maps(&self) -> usize {
        self.families.iter().map(Vec::len).sum()
    }

    /// `(piece, map)` for every edge map, in index order.
    pub fn map_refs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.families.iter().enumerate().flat_map(|(i, f)| (0..f.len()).map(move |j| (i, j)))
    }

    pub fn is_multigraph(&self) -> bool {
        self.weights.is_some()
    }

    pub fn weight(&self, piece: usize, map: usize) -> u64 {
        self.weights.as_ref().map_or(1, |w| w[piece][map])
    }

    pub fn a_side(&self) -> Result<DefSet> {
        union_all(&self.universe, &self.pieces)
    }

    pub fn vertices(&self) -> Result<DefSet> {
        self.a_side()?.union(&self.b)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut flag = |clause, at: Vec<usize>, witness: &DefSet| {
            if !witness.is_empty() {
                violations.push(Violation { clause, at, witness: witness.to_spec() });
            }
        };
        for (i, p) in self.pieces.iter().enumerate() {
            for (j, q) in self.pieces.iter().enumerate().skip(i + 1) {
                flag(Clause::PiecesOverlap, vec![i, j], &p.intersect(q).expect("same universe"));
            }
            flag(Clause::PieceMeetsB, vec![i], &p.intersect(&self.b).expect("same universe"));
            for (j, e) in self.families[i].iter().enumerate() {
                flag(Clause::NotTotal, vec![i, j], &p.difference(e.map.domain()).expect("same universe"));
                flag(Clause::ImageEscapesB, vec![i, j], &e.map.image_set().difference(&self.b).expect("same universe"));
                for (j2, e2) in self.families[i].iter().enumerate().skip(j + 1) {
                    flag(Clause::OverlappingGraphs, vec![i, j, j2], &e.map.equalizer(&e2.map).expect("same universe"));
                }
                if self.weight(i, j) == 0 {
                    flag(Clause::ZeroMultiplicity, vec![i, j], p);
                }
            }
        }
        ValidationReport { violations }
    }

    /// Degree classes `(c, vertices of degree exactly c)`, ascending in `c`,
    /// nonempty, partitioning the side. Degrees count multiplicity.
    pub fn degree_partition(&self, side: Side) -> Result<Vec<(u64, DefSet)>> {
        let mut classes: Vec<(u64, DefSet)> = Vec::new();
        match side {
            Side::A => {
                for (i, p) in self.pieces.iter().enumerate() {
                    let d: u64 = (0..self.families[i].len()).map(|j| self.weight(i, j)).sum();
                    classes.push((d, p.clone()));
                }
            }
            Side::B => {
                // refine {B} by each image set in turn
                let mut parts = vec![(0u64, self.b.clone())];
                for (i, j) in self.map_refs() {
                    let img = self.families[i][j].map.image_set();
                    let w = self.weight(i, j);
                    let mut next = Vec::with_capacity(parts.len() * 2);
                    for (c, s) in parts {
                        let inside = s.intersect(img)?;
                        let outside = s.difference(img)?;
                        if !inside.is_empty() {
                            next.push((c + w, inside));
                        }
                        if !outside.is_empty() {
                            next.push((c, outside));
                        }
                    }
                    parts = next;
                }
                classes = parts;
            }
        }
        classes.sort_by_key(|(c, _)| *c);
        let mut merged: Vec<(u64, DefSet)> = Vec::new();
        for (c, s) in classes {
            if s.is_empty() {
                continue;
            }
            match merged.last_mut() {
                Some((c0, acc)) if *c0 == c => *acc = acc.union(&s)?,
                _ => merged.push((c, s)),
            }
        }
        Ok(merged)
    }

    /// Every vertex on both sides has degree `k`.
    pub fn is_k_regular(&self, k: u64) -> Result<bool> {
        Ok(self.is_k_regular_in_a_max_k_in_b(k)?
            && self.degree_partition(Side::B)?.iter().all(|(c, _)| *c == k))
    }

    /// Degree `k` on `A`, at most `k` on `B`.
    pub fn is_k_regular_in_a_max_k_in_b(&self, k: u64) -> Result<bool> {
        Ok(self.degree_partition(Side::A)?.iter().all(|(c, _)| *c == k)
            && self.degree_partition(Side::B)?.iter().all(|(c, _)| *c <= k))
    }

    /// The common degree of the `A` side, if it is uniform and `A` is nonempty.
    pub fn a_degree(&self) -> Result<Option<u64>> {
        let parts = self.degree_partition(Side::A)?;
        Ok(match parts.as_slice() {
            [(c, _)] => Some(*c),
            _ => None,
        })
    }

    /// Splits each piece into its parts inside and outside `s`, dropping empty
    /// parts. Also returns the original index of every new piece.
    pub fn refine_pieces(&self, s: &DefSet) -> Result<(NiceGraph, Vec<usize>)> {
        let a = self.a_side()?;
        let escape = s.difference(&a)?;
        if !escape.is_empty() {
            return Err(Error::precondition(format!("refining set escapes A at {escape}")));
        }
        let mut pieces = Vec::new();
        let mut families = Vec::new();
        let mut weights = Vec::new();
        let mut origin = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            for part in [p.intersect(s)?, p.difference(s)?] {
                if part.is_empty() {
                    continue;
                }
                let fam = self.families[i]
                    .iter()
                    .map(|e| Ok(EdgeMap { word: e.word.clone(), full: e.full.clone(), map: e.map.restrict(&part)? }))
                    .collect::<Result<Vec<_>>>()?;
                pieces.push(part);
                families.push(fam);
                weights.push((0..self.families[i].len()).map(|j| self.weight(i, j)).collect());
                origin.push(i);
            }
        }
        let g = NiceGraph {
            universe: self.universe.clone(),
            pieces,
            b: self.b.clone(),
            families,
            weights: self.weights.as_ref().map(|_| weights),
        };
        Ok((g, origin))
    }

    /// `N_G(x)`: all vertices adjacent to a member of `x`.
    pub fn neighbors(&self, x: &DefSet) -> Result<DefSet> {
        let mut out = self.universe.empty();
        for (i, j) in self.map_refs() {
            let f = &self.families[i][j].map;
            out = out.union(&f.image(x)?)?.union(&f.preimage(x)?)?;
        }
        Ok(out)
    }

    /// The explicit graph on `[0, n)`. Boundary flags mark vertices with a
    /// neighbor at or beyond `n`.
    pub fn explicit_expand(&self, n: u64) -> ExplicitGraph {
        let mut a_labels: Vec<(u64, usize)> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            a_labels.extend(p.enumerate_window(n).into_iter().map(|x| (x, i)));
        }
        a_labels.sort_unstable();
        let b_labels = self.b.enumerate_window(n);
        let b_index = |y: u64| b_labels.binary_search(&y).ok();
        let mut edges = Vec::new();
        let mut a_boundary = vec![false; a_labels.len()];
        let mut b_boundary = vec![false; b_labels.len()];
        for (ai, &(x, i)) in a_labels.iter().enumerate() {
            for e in &self.families[i] {
                match e.map.apply(x) {
                    Some(y) if y < n => {
                        if let Some(bi) = b_index(y) {
                            edges.push((ai, bi));
                        }
                    }
                    _ => a_boundary[ai] = true,
                }
            }
        }
        if self.universe.backend() == Backend::AffineNat {
            for (bi, &y) in b_labels.iter().enumerate() {
                let far = self.map_refs().any(|(i, j)| {
                    let inv = self.families[i][j].map.invert();
                    inv.apply(y).is_some_and(|x| x >= n)
                });
                b_boundary[bi] = far;
            }
        }
        edges.sort_unstable();
        ExplicitGraph {
            a: a_labels.into_iter().map(|(x, _)| x).collect(),
            b: b_labels,
            edges,
            a_boundary,
            b_boundary,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::universe::GeneratorSpec;

    #[test]
    fn four_cycle_validates() {
        let g = instances::four_cycle();
        assert!(g.validate().is_valid());
        let u = g.universe().clone();
        let bad = NiceGraph::new(
            &u,
            vec![u.set(&[0, 1]).unwrap()],
            u.set(&[2, 3]).unwrap(),
            vec![vec![IsoWord::single("p"), IsoWord::single("p")]],
        )
        .unwrap();
        let report = bad.validate();
        assert!(report.has(Clause::OverlappingGraphs));
    }

    #[test]
    fn image_escaping_b_is_reported() {
        let u = Universe::finite(4).generator(GeneratorSpec::affine("s", 1, 1)).build().unwrap();
        let g = NiceGraph::new(&u, vec![u.set(&[0, 1]).unwrap()], u.set(&[2, 3]).unwrap(), vec![vec![IsoWord::single("s")]])
            .unwrap();
        let report = g.validate();
        assert!(report.has(Clause::ImageEscapesB));
        let v = report.violations.iter().find(|v| v.clause == Clause::ImageEscapesB).unwrap();
        assert_eq!(v.witness, SetSpec::List(vec![1]));
    }

    #[test]
    fn four_cycle_degrees() {
        let g = instances::four_cycle();
        let a = g.degree_partition(Side::A).unwrap();
        let b = g.degree_partition(Side::B).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].0, 2);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0], (2, g.b().clone()));
        assert!(g.is_k_regular(2).unwrap());
    }

    #[test]
    fn one_ended_path_degrees_match_window_count() {
        let g = instances::one_ended_path();
        assert!(g.validate().is_valid());
        let b = g.degree_partition(Side::B).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].0, 2);
        let a = g.degree_partition(Side::A).unwrap();
        let u = g.universe();
        assert_eq!(a[0], (1, u.set(&[0]).unwrap()));
        assert_eq!(a[1], (2, u.progression_from(0, 2, 2).unwrap()));
        // window count of each vertex's neighbors
        let ex = g.explicit_expand(50);
        let mut deg = std::collections::BTreeMap::new();
        for &(ai, bi) in &ex.edges {
            *deg.entry(ex.a[ai]).or_insert(0u64) += 1;
            *deg.entry(ex.b[bi]).or_insert(0u64) += 1;
        }
        for (&v, &d) in &deg {
            if v < 49 {
                assert_eq!(d, if v == 0 { 1 } else { 2 }, "vertex {v}");
            }
        }
        assert!(!g.is_k_regular(2).unwrap());
        assert!(!g.is_k_regular_in_a_max_k_in_b(2).unwrap());
    }

    #[test]
    fn single_bijection_is_one_regular() {
        let g = instances::single_bijection(6);
        assert!(g.is_k_regular(1).unwrap());
    }

    #[test]
    fn refine_examples() {
        let g = instances::four_cycle();
        let all = g.a_side().unwrap();
        let (h, origin) = g.refine_pieces(&all).unwrap();
        assert_eq!(h.pieces().len(), 1);
        assert_eq!(origin, vec![0]);
        let (h, _) = g.refine_pieces(&g.universe().empty()).unwrap();
        assert_eq!(h.pieces(), g.pieces());
        let (h, origin) = g.refine_pieces(&g.universe().set(&[0]).unwrap()).unwrap();
        assert_eq!(h.pieces().len(), 2);
        assert_eq!(origin, vec![0, 0]);
        assert!(h.validate().is_valid());
        assert_eq!(h.explicit_expand(4).edges, g.explicit_expand(4).edges);
        assert!(g.refine_pieces(g.b()).is_err());
    }

    #[test]
    fn expand_examples() {
        let g = instances::four_cycle();
        let ex = g.explicit_expand(4);
        assert_eq!(ex.a.len() + ex.b.len(), 4);
        assert_eq!(ex.edges.len(), 4);
        let p = instances::one_ended_path();
        let ex = p.explicit_expand(10);
        assert_eq!(ex.a, vec![0, 2, 4, 6, 8]);
        assert_eq!(ex.b, vec![1, 3, 5, 7, 9]);
        assert_eq!(ex.edges.len(), 9);
        assert_eq!(ex.b_boundary, vec![false, false, false, false, true]);
        assert!(ex.a_boundary.iter().all(|&f| !f));
        let u = Universe::finite(3).build().unwrap();
        let empty = NiceGraph::new(&u, vec![], u.empty(), vec![]).unwrap();
        assert!(empty.explicit_expand(3).edges.is_empty());
    }

    #[test]
    fn json_form_round_trip() {
        let g = instances::one_ended_path();
        let json = serde_json::to_string(&g.to_spec()).unwrap();
        let back = NiceGraph::from_spec(&serde_json::from_str(&json).unwrap(), Limits::default()).unwrap();
        assert_eq!(back.explicit_expand(30).edges, g.explicit_expand(30).edges);
    }
}
