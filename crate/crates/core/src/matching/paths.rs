//! Starting sets of augmenting paths with a fixed generating sequence.
//!
//! The walk from `x₀` is tracked by prefix maps `φ_t : x₀ ↦ x_t`. `φ₀` is the
//! identity on the uncovered part of the start piece, odd steps apply the edge
//! map, even steps apply the inverse of a matched component. Points where two
//! same-parity prefixes agree revisit a vertex and are removed as soon as the
//! later prefix is built, so every surviving walk is simple.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::NiceGraph;
use crate::iso::PartialIso;
use crate::set::DefSet;

use super::{covered, validate_matching, Component, GeneratingSequence, MapRef, Part, SymbolicMatching};

/// Derived data of one matching state, reused across many sequences.
pub(crate) struct Walker<'a> {
    g: &'a NiceGraph,
    m: SymbolicMatching,
    covered_a: DefSet,
    uncovered_b: DefSet,
    back: HashMap<MapRef, Option<PartialIso>>,
}

impl<'a> Walker<'a> {
    pub(crate) fn new(g: &'a NiceGraph, m: SymbolicMatching) -> Result<Self> {
        Ok(Walker {
            g,
            covered_a: covered(g, &m, Part::A)?,
            uncovered_b: g.b().difference(&covered(g, &m, Part::B)?)?,
            m,
            back: HashMap::new(),
        })
    }

    pub(crate) fn has_component(&self, r: MapRef) -> bool {
        self.m.component(r).is_some()
    }

    /// `φ₀`: identity on the uncovered vertices of `piece`, or of `within` if given.
    pub(crate) fn start(&self, piece: usize, within: Option<&DefSet>) -> Result<PartialIso> {
        let mut s = self.g.piece(piece).difference(&self.covered_a)?;
        if let Some(w) = within {
            s = s.intersect(w)?;
        }
        Ok(PartialIso::identity_on(&s))
    }

    /// Inverse of the matched part of map `r`.
    fn matched_inverse(&mut self, r: MapRef) -> Result<Option<PartialIso>> {
        if let Some(cached) = self.back.get(&r) {
            return Ok(cached.clone());
        }
        let inv = match self.m.component(r) {
            Some(c) => Some(self.g.edge(r.0, r.1).map().restrict(&c.domain)?.invert()),
            None => None,
        };
        self.back.insert(r, inv.clone());
        Ok(inv)
    }

    /// Appends `φ_t` for step `t = prefixes.len()` along map `r`, with
    /// revisits removed.
    pub(crate) fn extend(&mut self, prefixes: &[PartialIso], r: MapRef) -> Result<PartialIso> {
        let t = prefixes.len();
        let last = prefixes.last().expect("φ₀ present");
        let next = if t % 2 == 1 {
            self.g.edge(r.0, r.1).map().after(last)?
        } else {
            match self.matched_inverse(r)? {
                Some(inv) => inv.after(last)?,
                None => PartialIso::identity_on(&self.g.universe().empty()),
            }
        };
        if next.is_empty() {
            return Ok(next);
        }
        let mut revisits = self.g.universe().empty();
        // x₀ is uncovered and every later A vertex is matched, so s = 0 never collides for even t
        let first = if t % 2 == 0 { 2 } else { 1 };
        for s in (first..t).step_by(2) {
            revisits = revisits.union(&prefixes[s].equalizer(&next)?)?;
        }
        if revisits.is_empty() {
            Ok(next)
        } else {
            next.restrict(&next.domain().difference(&revisits)?)
        }
    }

    /// Start points whose walk `φ_L` ends at an uncovered `B` vertex.
    pub(crate) fn finish(&self, last: &PartialIso) -> Result<DefSet> {
        last.preimage(&self.uncovered_b)
    }

    /// All prefix maps of `gs`, stopping early if one is empty.
    pub(crate) fn walk(&mut self, gs: &GeneratingSequence, within: Option<&DefSet>) -> Result<Vec<PartialIso>> {
        let mut prefixes = vec![self.start(gs.start_piece(), within)?];
        for &r in &gs.0 {
            let next = self.extend(&prefixes, r)?;
            let empty = next.is_empty();
            prefixes.push(next);
            if empty {
                break;
            }
        }
        Ok(prefixes)
    }
}

/// Start vertices of the augmenting paths with generating sequence `gs`.
pub fn aug_start_set(g: &NiceGraph, m: &SymbolicMatching, gs: &GeneratingSequence) -> Result<DefSet> {
    gs.check(g)?;
    let mut w = Walker::new(g, m.clone())?;
    let prefixes = w.walk(gs, None)?;
    if prefixes.len() < gs.len() + 1 {
        return Ok(g.universe().empty());
    }
    w.finish(prefixes.last().expect("nonempty"))
}

/// Flips every augmenting path with sequence `gs` starting in `x` at once.
pub fn flip_family(g: &NiceGraph, m: &SymbolicMatching, gs: &GeneratingSequence, x: &DefSet) -> Result<SymbolicMatching> {
    gs.check(g)?;
    if x.is_empty() {
        return Ok(m.clone());
    }
    let mut w = Walker::new(g, m.clone())?;
    let prefixes = w.walk(gs, None)?;
    let starts = if prefixes.len() < gs.len() + 1 {
        g.universe().empty()
    } else {
        w.finish(prefixes.last().expect("nonempty"))?
    };
    let outside = x.difference(&starts)?;
    if !outside.is_empty() {
        return Err(Error::precondition(format!("{outside} are not starts of augmenting paths for {gs}")));
    }
    flip_prefixes(g, m, gs, &prefixes, x)
}

/// Applies a flip given the prefix maps of a walk whose start set contains `x`.
pub(crate) fn flip_prefixes(
    g: &NiceGraph,
    m: &SymbolicMatching,
    gs: &GeneratingSequence,
    prefixes: &[PartialIso],
    x: &DefSet,
) -> Result<SymbolicMatching> {
    let mut comps: Vec<Component> = m.components().to_vec();
    for (t, &r) in gs.0.iter().enumerate().map(|(i, r)| (i + 1, r)) {
        if t % 2 == 0 {
            let gone = prefixes[t].image(x)?;
            let c = comps
                .iter_mut()
                .find(|c| (c.piece, c.map) == r)
                .ok_or_else(|| Error::invariant(format!("step {t} of {gs} uses an unmatched map")))?;
            c.domain = c.domain.difference(&gone)?;
        }
    }
    for (t, &r) in gs.0.iter().enumerate().map(|(i, r)| (i + 1, r)) {
        if t % 2 == 1 {
            comps.push(Component { piece: r.0, map: r.1, domain: prefixes[t - 1].image(x)? });
        }
    }
    let out = SymbolicMatching::new(comps)?;
    let report = validate_matching(g, &out);
    if !report.is_valid() {
        return Err(Error::invariant(format!("flip along {gs} broke the matching: {:?}", report.violations)));
    }
    if !covered(g, m, Part::V)?.is_subset(&covered(g, &out, Part::V)?)? {
        return Err(Error::invariant(format!("flip along {gs} uncovered a vertex")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::oracle;

    fn m1(_g: &NiceGraph, piece: usize, map: usize, domain: DefSet) -> SymbolicMatching {
        SymbolicMatching::new(vec![Component { piece, map, domain }]).unwrap()
    }

    #[test]
    fn empty_matching_single_step_starts_everywhere() {
        let g = instances::four_cycle();
        let s = aug_start_set(&g, &SymbolicMatching::empty(), &GeneratingSequence::new(vec![(0, 1)])).unwrap();
        assert_eq!(&s, g.piece(0));
    }

    #[test]
    fn perfect_matching_has_no_starts() {
        let g = instances::four_cycle();
        let m = m1(&g, 0, 0, g.piece(0).clone());
        let s = aug_start_set(&g, &m, &GeneratingSequence::new(vec![(0, 1), (0, 0), (0, 1)])).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn one_ended_path_start_matches_brute_force() {
        let g = instances::one_ended_path();
        let u = g.universe();
        let m = m1(&g, 1, 0, g.piece(1).clone());
        let s = aug_start_set(&g, &m, &GeneratingSequence::new(vec![(0, 0)])).unwrap();
        assert_eq!(s, u.set(&[0]).unwrap());
        // 0 and 1 are the only uncovered vertices; the edge 0–1 is the only augmenting path
        let ex = g.explicit_expand(20);
        let mt = ex.matching_from_labels(&m.window_pairs(&g, 20)).unwrap();
        let p = oracle::aug_path_exists(&ex, &mt, 19).unwrap().unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn flip_examples() {
        let g = instances::four_cycle();
        let gs = GeneratingSequence::new(vec![(0, 0)]);
        let flipped = flip_family(&g, &SymbolicMatching::empty(), &gs, g.piece(0)).unwrap();
        assert_eq!(flipped, m1(&g, 0, 0, g.piece(0).clone()));
        let same = flip_family(&g, &flipped, &gs, &g.universe().empty()).unwrap();
        assert_eq!(same, flipped);
    }

    #[test]
    fn flip_three_path_gives_a_perfect_matching() {
        // 4-cycle 0–2–1–3–0 with edge (0,3) matched via q; path 1 →p 3 ←q 0 →p 2
        let g = instances::four_cycle();
        let u = g.universe();
        let m = m1(&g, 0, 1, u.set(&[0]).unwrap());
        let gs = GeneratingSequence::new(vec![(0, 0), (0, 1), (0, 0)]);
        let x = aug_start_set(&g, &m, &gs).unwrap();
        assert_eq!(x, u.set(&[1]).unwrap());
        let out = flip_family(&g, &m, &gs, &x).unwrap();
        let pairs = out.window_pairs(&g, 4);
        // the two perfect matchings of the 4-cycle, by exhaustion
        let ex = g.explicit_expand(4);
        let mut perfect = Vec::new();
        for m0 in [[(0, 0), (1, 1)], [(0, 1), (1, 0)]] {
            if oracle::check_matching(&ex, &m0).is_ok() {
                perfect.push(m0.iter().map(|&(a, b)| (ex.a[a], ex.b[b])).collect::<Vec<_>>());
            }
        }
        assert!(perfect.contains(&pairs), "{pairs:?} not among {perfect:?}");
        assert!(flip_family(&g, &m, &gs, &u.set(&[0]).unwrap()).is_err());
    }
}
