//! Definable matchings as finite unions of restricted edge maps, the analysis
//! of augmenting paths by generating sequence, and their elimination.

mod eliminate;
mod paths;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Clause, NiceGraph, ValidationReport, Violation};
use crate::iso::IsoWord;
use crate::set::{DefSet, SetSpec};

pub use eliminate::{certify_no_short_paths, eliminate, eliminate_observed, ElimEvent};
pub use paths::{aug_start_set, flip_family};

/// `(piece index, map index within the piece's family)`.
pub type MapRef = (usize, usize);

/// The edges `{(x, f(x)) : x ∈ domain}` of one edge map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub piece: usize,
    pub map: usize,
    pub domain: DefSet,
}

/// A matching given by components. Normalized: sorted by `(piece, map)`, at
/// most one component per map, no empty domains.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolicMatching {
    components: Vec<Component>,
}

/// Which vertices to report as covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    A,
    B,
    V,
}

impl SymbolicMatching {
    pub fn empty() -> Self {
        SymbolicMatching { components: Vec::new() }
    }

    /// Builds and normalizes; the result may still be invalid for a graph.
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let mut merged: BTreeMap<MapRef, DefSet> = BTreeMap::new();
        for c in components {
            let key = (c.piece, c.map);
            match merged.get_mut(&key) {
                Some(d) => *d = d.union(&c.domain)?,
                None => {
                    merged.insert(key, c.domain);
                }
            }
        }
        Ok(SymbolicMatching {
            components: merged
                .into_iter()
                .filter(|(_, d)| !d.is_empty())
                .map(|((piece, map), domain)| Component { piece, map, domain })
                .collect(),
        })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, r: MapRef) -> Option<&Component> {
        self.components
            .binary_search_by_key(&r, |c| (c.piece, c.map))
            .ok()
            .map(|i| &self.components[i])
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Matched pairs `(x, y)` with both ends below `n`.
    pub fn window_pairs(&self, g: &NiceGraph, n: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for c in &self.components {
            let f = g.edge(c.piece, c.map).map();
            for x in c.domain.enumerate_window(n) {
                if let Some(y) = f.apply(x).filter(|&y| y < n) {
                    out.push((x, y));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Number of edges; finite matchings only.
    pub fn size(&self) -> u64 {
        self.components.iter().map(|c| c.domain.count()).sum()
    }

    pub fn to_json(&self, g: &NiceGraph) -> Vec<ComponentJson> {
        self.components
            .iter()
            .map(|c| ComponentJson {
                piece: c.piece,
                word: g.edge(c.piece, c.map).word().clone(),
                domain: c.domain.to_spec(),
            })
            .collect()
    }

    /// Resolves each word to the first map of its piece with that word.
    pub fn from_json(g: &NiceGraph, comps: &[ComponentJson]) -> Result<Self> {
        let mut out = Vec::with_capacity(comps.len());
        for c in comps {
            if c.piece >= g.pieces().len() {
                return Err(Error::malformed(format!("matching names piece {} of {}", c.piece, g.pieces().len())));
            }
            let map = g
                .family(c.piece)
                .iter()
                .position(|e| e.word() == &c.word)
                .ok_or_else(|| Error::malformed(format!("piece {} has no edge map {}", c.piece, c.word)))?;
            out.push(Component { piece: c.piece, map, domain: g.universe().resolve(&c.domain)? });
        }
        Self::new(out)
    }
}

impl fmt::Display for SymbolicMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.components.iter().map(|c| format!("({}, {}, {})", c.piece, c.map, c.domain)).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// JSON form of one matching component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub piece: usize,
    pub word: IsoWord,
    pub domain: SetSpec,
}

/// Checks that every component lies in its piece and that the components are
/// pairwise independent on both sides.
pub fn validate_matching(g: &NiceGraph, m: &SymbolicMatching) -> ValidationReport {
    let mut violations = Vec::new();
    let mut images: Vec<(usize, DefSet)> = Vec::new();
    for (ci, c) in m.components.iter().enumerate() {
        if c.piece >= g.pieces().len() || c.map >= g.family(c.piece).len() {
            violations.push(Violation { clause: Clause::UnknownMap, at: vec![ci], witness: c.domain.to_spec() });
            continue;
        }
        let escape = match c.domain.difference(g.piece(c.piece)) {
            Ok(e) => e,
            Err(_) => {
                violations.push(Violation { clause: Clause::UnknownMap, at: vec![ci], witness: SetSpec::List(vec![]) });
                continue;
            }
        };
        if !escape.is_empty() {
            violations.push(Violation { clause: Clause::DomainEscapesPiece, at: vec![ci], witness: escape.to_spec() });
        }
        let img = g.edge(c.piece, c.map).map().image(&c.domain).expect("same universe");
        images.push((ci, img));
    }
    for (i, c) in m.components.iter().enumerate() {
        for (j, d) in m.components.iter().enumerate().skip(i + 1) {
            if c.piece == d.piece {
                if let Ok(both) = c.domain.intersect(&d.domain) {
                    if !both.is_empty() {
                        violations.push(Violation { clause: Clause::DomainsOverlap, at: vec![i, j], witness: both.to_spec() });
                    }
                }
            }
        }
    }
    for (k, (i, a)) in images.iter().enumerate() {
        for (j, b) in images.iter().skip(k + 1) {
            let both = a.intersect(b).expect("same universe");
            if !both.is_empty() {
                violations.push(Violation { clause: Clause::ImagesOverlap, at: vec![*i, *j], witness: both.to_spec() });
            }
        }
    }
    ValidationReport { violations }
}

/// Vertices covered by `m` on the chosen side.
pub fn covered(g: &NiceGraph, m: &SymbolicMatching, part: Part) -> Result<DefSet> {
    let mut out = g.universe().empty();
    for c in &m.components {
        if matches!(part, Part::A | Part::V) {
            out = out.union(&c.domain)?;
        }
        if matches!(part, Part::B | Part::V) {
            out = out.union(&g.edge(c.piece, c.map).map().image(&c.domain)?)?;
        }
    }
    Ok(out)
}

/// `N_M(x)`: matched partners of members of `x`.
pub fn matched_neighbors(g: &NiceGraph, m: &SymbolicMatching, x: &DefSet) -> Result<DefSet> {
    let mut out = g.universe().empty();
    for c in &m.components {
        let f = g.edge(c.piece, c.map).map().restrict(&c.domain)?;
        out = out.union(&f.image(x)?)?.union(&f.preimage(x)?)?;
    }
    Ok(out)
}

/// A generating sequence: odd steps follow an edge map forward from `A`,
/// even steps follow a matched edge back from `B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratingSequence(pub Vec<MapRef>);

impl GeneratingSequence {
    pub fn new(maps: Vec<MapRef>) -> Self {
        GeneratingSequence(maps)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Odd length, step `2t+1` leaves from the piece step `2t` arrived in,
    /// and never along the map it arrived by.
    pub fn check(&self, g: &NiceGraph) -> Result<()> {
        if self.0.len() % 2 == 0 {
            return Err(Error::malformed("generating sequence must have odd length"));
        }
        for (t, &(p, j)) in self.0.iter().enumerate() {
            if p >= g.pieces().len() || j >= g.family(p).len() {
                return Err(Error::malformed(format!("step {} names unknown map ({p},{j})", t + 1)));
            }
            // index t holds step t+1; steps 3, 5, ... chain to the previous step
            if t >= 2 && t % 2 == 0 {
                let prev = self.0[t - 1];
                if prev.0 != p || prev.1 == j {
                    return Err(Error::malformed(format!("step {} does not continue from step {}", t + 1, t)));
                }
            }
        }
        Ok(())
    }

    pub fn start_piece(&self) -> usize {
        self.0[0].0
    }
}

impl fmt::Display for GeneratingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(p, j)| format!("{p}.{j}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn validate_examples() {
        let g = instances::single_bijection(4);
        let full = SymbolicMatching::new(vec![Component { piece: 0, map: 0, domain: g.piece(0).clone() }]).unwrap();
        assert!(validate_matching(&g, &full).is_valid());

        let c4 = instances::four_cycle();
        let u = c4.universe();
        let overlap = SymbolicMatching::new(vec![
            Component { piece: 0, map: 0, domain: u.set(&[0]).unwrap() },
            Component { piece: 0, map: 1, domain: u.set(&[0]).unwrap() },
        ])
        .unwrap();
        assert!(validate_matching(&c4, &overlap).has(Clause::DomainsOverlap));
        // 0 ↦ 2 via the first map and 1 ↦ 2 via the second
        let clash = SymbolicMatching::new(vec![
            Component { piece: 0, map: 0, domain: u.set(&[0]).unwrap() },
            Component { piece: 0, map: 1, domain: u.set(&[1]).unwrap() },
        ])
        .unwrap();
        let report = validate_matching(&c4, &clash);
        assert!(report.has(Clause::ImagesOverlap));
        assert_eq!(report.violations[0].witness, SetSpec::List(vec![2]));
    }

    #[test]
    fn covered_examples() {
        let c4 = instances::four_cycle();
        assert!(covered(&c4, &SymbolicMatching::empty(), Part::V).unwrap().is_empty());
        let perfect = SymbolicMatching::new(vec![Component { piece: 0, map: 0, domain: c4.piece(0).clone() }]).unwrap();
        assert_eq!(covered(&c4, &perfect, Part::V).unwrap(), c4.universe().whole());

        let p = instances::one_ended_path();
        let u = p.universe();
        // Γ(+1) on all evens: piece 0 is {0}, piece 1 is the evens ≥ 2
        let m = SymbolicMatching::new(vec![
            Component { piece: 0, map: 0, domain: p.piece(0).clone() },
            Component { piece: 1, map: 0, domain: p.piece(1).clone() },
        ])
        .unwrap();
        assert!(validate_matching(&p, &m).is_valid());
        let cov = covered(&p, &m, Part::V).unwrap();
        assert_eq!(cov, u.whole());
        assert_eq!(cov.enumerate_window(100), (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn json_round_trip() {
        let c4 = instances::four_cycle();
        let m = SymbolicMatching::new(vec![Component { piece: 0, map: 1, domain: c4.piece(0).clone() }]).unwrap();
        let json = serde_json::to_string(&m.to_json(&c4)).unwrap();
        assert!(json.contains(r#""word":[["q",1]]"#), "{json}");
        let back: Vec<ComponentJson> = serde_json::from_str(&json).unwrap();
        assert_eq!(SymbolicMatching::from_json(&c4, &back).unwrap(), m);
    }

    #[test]
    fn sequence_shape() {
        let c4 = instances::four_cycle();
        assert!(GeneratingSequence::new(vec![(0, 0)]).check(&c4).is_ok());
        assert!(GeneratingSequence::new(vec![(0, 0), (0, 1)]).check(&c4).is_err());
        assert!(GeneratingSequence::new(vec![(0, 1), (0, 0), (0, 1)]).check(&c4).is_ok());
        assert!(GeneratingSequence::new(vec![(0, 1), (0, 0), (0, 0)]).check(&c4).is_err());
    }
}
