//! Piecewise embeddings between definable sets, the relations `≤`, `≤_m`,
//! `≤_0` they witness, weak cancellation and the paradoxicality verdict.

mod cancel;
mod search;
mod tagged;
mod tarski;

pub use cancel::{cancel, two_from_k, CancelPiece, CancellationOutput, TwoFromK, TwoFromKEntry};
pub use search::{check_leq_0, check_leq_m, find_embedding, find_embedding_with, LeqM, LeqZero, LeqZeroEntry, SearchBounds};
pub use tagged::{lifted_label, shift_label, TagLetter, TaggedUniverse};
pub use tarski::{tarski_verdict, Measure, Obstruction, ParadoxBundle, TarskiVerdict};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iso::{realize_word, IsoWord};
use crate::set::{DefSet, SetSpec};
use crate::universe::Universe;

#[derive(Debug, Clone)]
pub struct WitnessPiece {
    pub set: DefSet,
    pub word: IsoWord,
}

/// `source ≤ target`: the pieces partition `source` and their words carry
/// them injectively, with disjoint images, into `target`.
#[derive(Debug, Clone)]
pub struct EmbeddingWitness {
    pub universe: Universe,
    pub source: DefSet,
    pub target: DefSet,
    pub pieces: Vec<WitnessPiece>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceJson {
    pub set: SetSpec,
    pub word: IsoWord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub source: SetSpec,
    pub target: SetSpec,
    pub pieces: Vec<PieceJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub valid: bool,
    /// The images cover the target, so the witness shows `source ≃ target`.
    pub iso: bool,
    pub problems: Vec<String>,
}

impl EmbeddingWitness {
    /// `x ≤ x` by the identity.
    pub fn identity(u: &Universe, x: &DefSet) -> Self {
        let pieces = if x.is_empty() { Vec::new() } else { vec![WitnessPiece { set: x.clone(), word: IsoWord::identity() }] };
        EmbeddingWitness { universe: u.clone(), source: x.clone(), target: x.clone(), pieces }
    }

    pub fn to_json(&self) -> WitnessJson {
        WitnessJson {
            source: self.source.to_spec(),
            target: self.target.to_spec(),
            pieces: self.pieces.iter().map(|p| PieceJson { set: p.set.to_spec(), word: p.word.clone() }).collect(),
        }
    }

    pub fn from_json(u: &Universe, j: &WitnessJson) -> Result<Self> {
        Ok(EmbeddingWitness {
            universe: u.clone(),
            source: u.resolve(&j.source)?,
            target: u.resolve(&j.target)?,
            pieces: j
                .pieces
                .iter()
                .map(|p| Ok(WitnessPiece { set: u.resolve(&p.set)?, word: p.word.clone() }))
                .collect::<Result<_>>()?,
        })
    }

    /// Union of the piece images.
    pub fn image(&self) -> Result<DefSet> {
        let mut out = self.universe.empty();
        for p in &self.pieces {
            out = out.union(&realize_word(&self.universe, &p.word)?.image(&p.set)?)?;
        }
        Ok(out)
    }

    /// Image of one point, if it lies in some piece.
    pub fn apply(&self, x: u64) -> Result<Option<u64>> {
        for p in &self.pieces {
            if p.set.contains(x) {
                return Ok(realize_word(&self.universe, &p.word)?.apply(x));
            }
        }
        Ok(None)
    }
}

pub fn verify_witness(w: &EmbeddingWitness) -> WitnessReport {
    let mut problems = Vec::new();
    let u = &w.universe;
    let mut iso = false;
    let mut check = || -> Result<()> {
        for s in std::iter::once(&w.source).chain(std::iter::once(&w.target)).chain(w.pieces.iter().map(|p| &p.set)) {
            if s.universe_id() != u.id() {
                return Err(Error::UniverseMismatch);
            }
        }
        let mut covered = u.empty();
        let mut images = u.empty();
        for (i, p) in w.pieces.iter().enumerate() {
            let f = realize_word(u, &p.word)?;
            let outside = p.set.difference(f.domain())?;
            if !outside.is_empty() {
                problems.push(format!("piece {i} leaves the domain of {} at {outside}", p.word));
                continue;
            }
            if !p.set.is_disjoint(&covered)? {
                problems.push(format!("piece {i} overlaps an earlier piece"));
            }
            covered = covered.union(&p.set)?;
            let img = f.image(&p.set)?;
            if !img.is_disjoint(&images)? {
                problems.push(format!("image of piece {i} overlaps an earlier image"));
            }
            images = images.union(&img)?;
        }
        if !covered.equals(&w.source)? {
            problems.push(format!("pieces cover {covered}, not the source {}", w.source));
        }
        let escaped = images.difference(&w.target)?;
        if !escaped.is_empty() {
            problems.push(format!("images leave the target at {escaped}"));
        }
        iso = images.equals(&w.target)?;
        Ok(())
    };
    if let Err(e) = check() {
        problems.push(e.to_string());
    }
    let valid = problems.is_empty();
    WitnessReport { valid, iso: valid && iso, problems }
}

/// `u : X ≤ Y` then `v : Y' ≤ Z` with `Y ⊆ Y'`; pieces are intersections of
/// `u`-pieces with preimages of `v`-pieces.
pub fn compose_witness(u: &EmbeddingWitness, v: &EmbeddingWitness) -> Result<EmbeddingWitness> {
    if u.universe.id() != v.universe.id() {
        return Err(Error::UniverseMismatch);
    }
    if !u.target.is_subset(&v.source)? {
        return Err(Error::precondition("first target is not inside the second source"));
    }
    let mut pieces = Vec::new();
    for p in &u.pieces {
        let f = realize_word(&u.universe, &p.word)?;
        for q in &v.pieces {
            let set = p.set.intersect(&f.preimage(&q.set)?)?;
            if !set.is_empty() {
                pieces.push(WitnessPiece { set, word: p.word.then(&q.word) });
            }
        }
    }
    Ok(EmbeddingWitness { universe: u.universe.clone(), source: u.source.clone(), target: v.target.clone(), pieces })
}

/// Disjoint union of two witnesses.
pub fn sum_witness(u: &EmbeddingWitness, v: &EmbeddingWitness) -> Result<EmbeddingWitness> {
    if u.universe.id() != v.universe.id() {
        return Err(Error::UniverseMismatch);
    }
    if !u.source.is_disjoint(&v.source)? || !u.target.is_disjoint(&v.target)? {
        return Err(Error::precondition("sum needs disjoint sources and disjoint targets"));
    }
    Ok(EmbeddingWitness {
        universe: u.universe.clone(),
        source: u.source.union(&v.source)?,
        target: u.target.union(&v.target)?,
        pieces: u.pieces.iter().chain(&v.pieces).cloned().collect(),
    })
}
