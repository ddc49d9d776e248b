//! `n` disjoint copies of a universe, encoded by interleaving: copy `t` of `x`
//! is `n·x + t`. Copies of ℕ stay eventually periodic, and nesting two
//! taggings with `n` then `m` copies gives the same numbers as one with
//! `n·m` copies.
//!
//! Every base generator `g` yields letters `g@t>s` carrying copy `t` to copy
//! `s`, and `#t>s` moves a point between copies unchanged.

use std::collections::HashMap;

use crate::affine::AffineRule;
use crate::error::{Error, Result};
use crate::iso::{realize_word, IsoWord, Letter, PartialIso};
use crate::set::DefSet;
use crate::universe::{Backend, GeneratorSpec, Universe};

/// What a tagged letter does: apply `base` (or nothing) and move `from → to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagLetter {
    pub base: Option<String>,
    pub from: u64,
    pub to: u64,
}

#[derive(Debug, Clone)]
pub struct TaggedUniverse {
    base: Universe,
    copies: u64,
    universe: Universe,
    /// AffineNat without generators, for moving sets in and out of copies.
    scratch: Option<Universe>,
    letters: HashMap<String, TagLetter>,
}

pub fn lifted_label(base: &str, from: u64, to: u64) -> String {
    format!("{base}@{from}>{to}")
}

pub fn shift_label(from: u64, to: u64) -> String {
    format!("#{from}>{to}")
}

impl TaggedUniverse {
    pub fn new(base: &Universe, copies: u64) -> Result<Self> {
        if copies == 0 {
            return Err(Error::precondition("at least one copy is needed"));
        }
        let n = copies;
        let limits = *base.limits();
        let scratch = match base.backend() {
            Backend::AffineNat => Some(Universe::affine_nat().limits(limits).build()?),
            Backend::Finite { .. } => None,
        };
        let mut partial = TaggedUniverse {
            base: base.clone(),
            copies,
            universe: base.clone(),
            scratch,
            letters: HashMap::new(),
        };
        let mut specs = Vec::new();
        let mut letters = HashMap::new();
        for label in base.generator_labels() {
            let forward = base.letter(&Letter::new(label.clone()))?;
            let table = base.backend() != Backend::AffineNat || forward.affine_rule().is_none();
            for from in 0..n {
                for to in 0..n {
                    let name = lifted_label(label, from, to);
                    let spec = if table {
                        let pairs = forward.pairs().into_iter().map(|(x, y)| (n * x + from, n * y + to)).collect();
                        GeneratorSpec::table(name.clone(), pairs)
                    } else {
                        // y = n·x + from ↦ n·(mul·x + add)/div + to
                        let r = forward.affine_rule().expect("affine");
                        let (n, f, t) = (n as i128, from as i128, to as i128);
                        let rule = AffineRule::new(r.mul(), n * r.add() + r.div() * t - r.mul() * f, r.div())?;
                        GeneratorSpec::affine_on(name.clone(), rule, partial.tag(from, forward.domain())?.to_spec())
                    };
                    specs.push(spec);
                    letters.insert(name, TagLetter { base: Some(label.clone()), from, to });
                }
            }
        }
        for from in 0..n {
            for to in (0..n).filter(|&t| t != from) {
                let name = shift_label(from, to);
                let spec = match base.finite_size() {
                    Some(size) => GeneratorSpec::table(name.clone(), (0..size).map(|x| (n * x + from, n * x + to)).collect()),
                    None => GeneratorSpec::affine_on(
                        name.clone(),
                        AffineRule::new(1, to as i128 - from as i128, 1)?,
                        partial.tag(from, &base.whole())?.to_spec(),
                    ),
                };
                specs.push(spec);
                letters.insert(name, TagLetter { base: None, from, to });
            }
        }
        let universe = match base.finite_size() {
            Some(size) => Universe::finite(n * size).limits(limits).generators(specs).build()?,
            None => Universe::affine_nat().limits(limits).generators(specs).build()?,
        };
        partial.universe = universe;
        partial.letters = letters;
        Ok(partial)
    }

    pub fn base(&self) -> &Universe {
        &self.base
    }

    pub fn copies(&self) -> u64 {
        self.copies
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn letter_meta(&self, label: &str) -> Option<&TagLetter> {
        self.letters.get(label)
    }

    /// All of copy `t`.
    pub fn copy(&self, t: u64) -> Result<DefSet> {
        self.tag(t, &self.base.whole())
    }

    fn tag_map(&self, t: u64) -> Result<PartialIso> {
        let scratch = self.scratch.as_ref().expect("ℕ backend");
        PartialIso::from_affine(IsoWord::identity(), AffineRule::new(self.copies as i128, t as i128, 1)?, &scratch.whole())
    }

    /// Copy `t` of a base set, as a set of the tagged universe.
    pub fn tag(&self, t: u64, s: &DefSet) -> Result<DefSet> {
        self.check_copy(t)?;
        if s.universe_id() != self.base.id() {
            return Err(Error::UniverseMismatch);
        }
        let n = self.copies;
        match &self.scratch {
            None => {
                let xs: Vec<u64> = s.elements().into_iter().map(|x| n * x + t).collect();
                self.universe.set(&xs)
            }
            Some(scratch) => {
                let image = self.tag_map(t)?.image(&scratch.resolve(&s.to_spec())?)?;
                self.universe.resolve(&image.to_spec())
            }
        }
    }

    /// Base points whose copy `t` lies in `s`.
    pub fn untag(&self, t: u64, s: &DefSet) -> Result<DefSet> {
        self.check_copy(t)?;
        if s.universe_id() != self.universe.id() {
            return Err(Error::UniverseMismatch);
        }
        let n = self.copies;
        match &self.scratch {
            None => {
                let xs: Vec<u64> = s.elements().into_iter().filter(|y| y % n == t).map(|y| y / n).collect();
                self.base.set(&xs)
            }
            Some(scratch) => {
                let pre = self.tag_map(t)?.preimage(&scratch.resolve(&s.to_spec())?)?;
                self.base.resolve(&pre.to_spec())
            }
        }
    }

    /// Copies `0..count` of `s`.
    pub fn copies_of(&self, s: &DefSet, count: u64) -> Result<DefSet> {
        let mut out = self.universe.empty();
        for t in 0..count {
            out = out.union(&self.tag(t, s)?)?;
        }
        Ok(out)
    }

    fn check_copy(&self, t: u64) -> Result<()> {
        if t >= self.copies {
            return Err(Error::precondition(format!("copy {t} out of range 0..{}", self.copies)));
        }
        Ok(())
    }

    /// The letter acting as base letter `l` from copy `from` to copy `to`.
    pub fn lift_letter(&self, l: &Letter, from: u64, to: u64) -> Letter {
        if l.inverse {
            Letter::inv(lifted_label(&l.label, to, from))
        } else {
            Letter::new(lifted_label(&l.label, from, to))
        }
    }

    /// A word acting as `w` from copy `from` to copy `to`.
    pub fn lift_word(&self, w: &IsoWord, from: u64, to: u64) -> IsoWord {
        match w.letters() {
            [] if from == to => IsoWord::identity(),
            [] => IsoWord::single(shift_label(from, to)),
            [first, rest @ ..] => IsoWord::new(
                std::iter::once(self.lift_letter(first, from, to)).chain(rest.iter().map(|l| self.lift_letter(l, to, to))),
            ),
        }
    }

    /// The base word a tagged word applies to copy `from`, and the copy it
    /// lands in; `None` if the word is undefined on that copy.
    pub fn project(&self, w: &IsoWord, from: u64) -> Option<(IsoWord, u64)> {
        let mut at = from;
        let mut out = Vec::new();
        for l in w.letters() {
            let meta = self.letters.get(&l.label)?;
            let (src, dst) = if l.inverse { (meta.to, meta.from) } else { (meta.from, meta.to) };
            if src != at {
                return None;
            }
            at = dst;
            if let Some(b) = &meta.base {
                out.push(Letter { label: b.clone(), inverse: l.inverse });
            }
        }
        Some((IsoWord::new(out), at))
    }

    pub fn realize(&self, w: &IsoWord) -> Result<PartialIso> {
        realize_word(&self.universe, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doubling() -> Universe {
        Universe::affine_nat()
            .generator(GeneratorSpec::affine("d", 2, 0))
            .generator(GeneratorSpec::affine("e", 2, 1))
            .build()
            .unwrap()
    }

    #[test]
    fn copies_partition_the_tagged_universe() {
        for base in [doubling(), crate::instances::four_cycle().universe().clone()] {
            let t = TaggedUniverse::new(&base, 3).unwrap();
            let mut all = t.universe().empty();
            for c in 0..3 {
                let copy = t.copy(c).unwrap();
                assert!(copy.is_disjoint(&all).unwrap());
                all = all.union(&copy).unwrap();
                assert_eq!(t.untag(c, &copy).unwrap(), base.whole());
            }
            assert_eq!(all, t.universe().whole());
        }
    }

    #[test]
    fn lifted_letters_act_per_copy() {
        let base = doubling();
        let t = TaggedUniverse::new(&base, 2).unwrap();
        // copy 1 of 5 is 11; d sends 5 to 10, whose copy 0 is 20
        let f = t.realize(&IsoWord::single("d@1>0")).unwrap();
        assert_eq!(f.apply(11), Some(20));
        assert_eq!(f.apply(10), None);
        let s = t.realize(&IsoWord::single("#0>1")).unwrap();
        assert_eq!(s.apply(6), Some(7));
        let w = t.lift_word(&IsoWord::new([Letter::new("d"), Letter::new("e")]), 0, 1);
        assert_eq!(t.realize(&w).unwrap().apply(2 * 3), Some(2 * 13 + 1));
        assert_eq!(t.project(&w, 0), Some((IsoWord::new([Letter::new("d"), Letter::new("e")]), 1)));
        assert_eq!(t.project(&w, 1), None);
        let inv = t.lift_word(&IsoWord::new([Letter::inv("d")]), 1, 0);
        assert_eq!(t.realize(&inv).unwrap().apply(2 * 10 + 1), Some(2 * 5));
    }

    #[test]
    fn finite_lifts_match_base() {
        let g = crate::instances::four_cycle();
        let base = g.universe();
        let t = TaggedUniverse::new(base, 2).unwrap();
        let p = base.letter(&Letter::new("p")).unwrap();
        let lp = t.realize(&IsoWord::single("p@0>1")).unwrap();
        for x in 0..4 {
            assert_eq!(lp.apply(2 * x), p.apply(x).map(|y| 2 * y + 1));
        }
    }

    #[test]
    fn tag_round_trip() {
        let base = doubling();
        let t = TaggedUniverse::new(&base, 3).unwrap();
        let s = base.periodic(4, 3, &[1], &[0, 2]).unwrap();
        let tagged = t.tag(2, &s).unwrap();
        assert_eq!(t.untag(2, &tagged).unwrap(), s);
        assert!(t.untag(1, &tagged).unwrap().is_empty());
    }
}
