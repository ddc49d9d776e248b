//! Removal of all augmenting paths up to a length bound by staged family flips.
//!
//! Stage `L = 1, 3, …, 2K+1` visits the pieces in index order and, in each,
//! the generating sequences of length `L` in lexicographic order of
//! `(piece, map)`, flipping the full start set of each. Once no augmenting
//! path shorter than `L` exists, flipping a family of `L`-paths creates no
//! augmenting path of length `≤ L`, so a prefix found empty stays empty for the
//! rest of the stage and its subtree is skipped.

use crate::error::{Error, Result};
use crate::graph::NiceGraph;
use crate::iso::PartialIso;
use crate::set::DefSet;

use super::paths::{flip_prefixes, Walker};
use super::{covered, validate_matching, Component, GeneratingSequence, MapRef, Part, SymbolicMatching};

/// Progress notifications. Matchings are expressed over the caller's graph.
#[derive(Debug)]
pub enum ElimEvent<'a> {
    Flip { length: usize, sequence: &'a GeneratingSequence, starts: &'a DefSet, matching: &'a SymbolicMatching },
    StageEnd { length: usize, matching: &'a SymbolicMatching },
}

/// A matching covering everything `m0` covers with no augmenting path of
/// length `≤ 2K+1`.
pub fn eliminate(g: &NiceGraph, m0: &SymbolicMatching, k: usize) -> Result<SymbolicMatching> {
    eliminate_observed(g, m0, k, &mut |_| {})
}

pub fn eliminate_observed(
    g: &NiceGraph,
    m0: &SymbolicMatching,
    k: usize,
    observer: &mut dyn FnMut(&ElimEvent),
) -> Result<SymbolicMatching> {
    let report = g.validate();
    if !report.is_valid() {
        return Err(Error::precondition(format!("graph is not valid: {:?}", report.violations)));
    }
    let report = validate_matching(g, m0);
    if !report.is_valid() {
        return Err(Error::precondition(format!("initial matching is not valid: {:?}", report.violations)));
    }
    let (refined, origin) = g.refine_pieces(&covered(g, m0, Part::A)?)?;
    let mut comps = Vec::new();
    for c in m0.components() {
        for (r, &o) in origin.iter().enumerate() {
            if o == c.piece {
                comps.push(Component { piece: r, map: c.map, domain: c.domain.intersect(refined.piece(r))? });
            }
        }
    }
    let m = SymbolicMatching::new(comps)?;
    let mut run = Run {
        g: &refined,
        origin: &origin,
        walker: Walker::new(&refined, m.clone())?,
        m,
        visited: 0,
        cap: g.universe().limits().max_sequences,
        mode: Mode::Flip,
        observer,
    };
    for length in (1..=2 * k + 1).step_by(2) {
        for piece in 0..refined.pieces().len() {
            run.stage_piece(length, piece)?;
        }
        let lifted = run.lift()?;
        (run.observer)(&ElimEvent::StageEnd { length, matching: &lifted });
    }
    let out = run.lift()?;
    if !validate_matching(g, &out).is_valid() || !covered(g, m0, Part::V)?.is_subset(&covered(g, &out, Part::V)?)? {
        return Err(Error::invariant("elimination output failed its final check"));
    }
    Ok(out)
}

/// The first generating sequence of length `≤ 2K+1` with a nonempty start
/// set, searching stage by stage as elimination does.
pub fn certify_no_short_paths(g: &NiceGraph, m: &SymbolicMatching, k: usize) -> Result<Option<GeneratingSequence>> {
    let origin: Vec<usize> = (0..g.pieces().len()).collect();
    let mut run = Run {
        g,
        origin: &origin,
        walker: Walker::new(g, m.clone())?,
        m: m.clone(),
        visited: 0,
        cap: g.universe().limits().max_sequences,
        mode: Mode::Find(None),
        observer: &mut |_| {},
    };
    for length in (1..=2 * k + 1).step_by(2) {
        for piece in 0..g.pieces().len() {
            run.stage_piece(length, piece)?;
            if let Mode::Find(Some(gs)) = run.mode {
                return Ok(Some(gs));
            }
        }
    }
    Ok(None)
}

enum Mode {
    Flip,
    Find(Option<GeneratingSequence>),
}

struct Run<'a, 'o> {
    g: &'a NiceGraph,
    origin: &'a [usize],
    m: SymbolicMatching,
    walker: Walker<'a>,
    visited: u64,
    cap: u64,
    mode: Mode,
    observer: &'o mut dyn FnMut(&ElimEvent),
}

impl Run<'_, '_> {
    /// The current matching over the caller's pieces.
    fn lift(&self) -> Result<SymbolicMatching> {
        SymbolicMatching::new(
            self.m
                .components()
                .iter()
                .map(|c| Component { piece: self.origin[c.piece], map: c.map, domain: c.domain.clone() })
                .collect(),
        )
    }

    fn found(&self) -> bool {
        matches!(self.mode, Mode::Find(Some(_)))
    }

    fn stage_piece(&mut self, length: usize, piece: usize) -> Result<()> {
        let start = self.walker.start(piece, None)?;
        if start.is_empty() {
            return Ok(());
        }
        let mut seq = Vec::with_capacity(length);
        let mut prefixes = vec![start];
        self.descend(length, piece, &mut seq, &mut prefixes)
    }

    /// Candidates for step `t`, in lexicographic order.
    fn candidates(&self, t: usize, piece: usize, seq: &[MapRef]) -> Vec<MapRef> {
        if t == 1 {
            (0..self.g.family(piece).len()).map(|j| (piece, j)).collect()
        } else if t % 2 == 0 {
            self.g.map_refs().filter(|&r| self.walker.has_component(r)).collect()
        } else {
            let (p, j0) = seq[t - 2];
            (0..self.g.family(p).len()).filter(|&j| j != j0).map(|j| (p, j)).collect()
        }
    }

    fn descend(
        &mut self,
        length: usize,
        piece: usize,
        seq: &mut Vec<MapRef>,
        prefixes: &mut Vec<PartialIso>,
    ) -> Result<()> {
        let t = seq.len() + 1;
        for r in self.candidates(t, piece, seq) {
            // a flip below may have emptied this prefix
            if prefixes.last().expect("φ₀ present").is_empty() {
                return Ok(());
            }
            self.visited += 1;
            if self.visited > self.cap {
                return Err(Error::Resource { what: "generating-sequence prefixes", value: self.visited, cap: self.cap });
            }
            let next = self.walker.extend(prefixes, r)?;
            if next.is_empty() {
                continue;
            }
            seq.push(r);
            prefixes.push(next);
            if t == length {
                let starts = self.walker.finish(prefixes.last().expect("nonempty"))?;
                if !starts.is_empty() {
                    let gs = GeneratingSequence::new(seq.clone());
                    match self.mode {
                        Mode::Find(_) => {
                            self.mode = Mode::Find(Some(gs));
                            return Ok(());
                        }
                        Mode::Flip => {
                            self.m = flip_prefixes(self.g, &self.m, &gs, prefixes, &starts)?;
                            self.walker = Walker::new(self.g, self.m.clone())?;
                            let lifted = self.lift()?;
                            (self.observer)(&ElimEvent::Flip { length, sequence: &gs, starts: &starts, matching: &lifted });
                            seq.pop();
                            prefixes.pop();
                            self.rebuild(piece, seq, prefixes)?;
                            continue;
                        }
                    }
                }
            } else {
                self.descend(length, piece, seq, prefixes)?;
                if self.found() {
                    return Ok(());
                }
            }
            seq.pop();
            prefixes.pop();
        }
        Ok(())
    }

    /// Recomputes the prefixes of `seq` against the current matching.
    fn rebuild(&mut self, piece: usize, seq: &[MapRef], prefixes: &mut Vec<PartialIso>) -> Result<()> {
        prefixes.clear();
        prefixes.push(self.walker.start(piece, None)?);
        for &r in seq {
            let next = self.walker.extend(prefixes, r)?;
            prefixes.push(next);
        }
        Ok(())
    }
}
