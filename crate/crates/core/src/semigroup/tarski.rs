//! Paradoxical decomposition against invariant measure. `2X ≤_0 X` rules
//! out an invariant finitely additive measure with `μ(X) = 1`: the `m = 3`
//! data give `μ(X₀) ≤ 2q/p` and `μ(2X ∖ X₀) ≤ 1`, while additivity forces
//! `μ(2X ∖ X₀) ≥ 2 − 2q/p > 1`. Measures are only certified where
//! invariance is checkable: counting under total bijections of a finite
//! universe, and natural density under translations of ℕ.

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::instances::rng;
use crate::iso::Letter;
use crate::set::DefSet;
use crate::universe::{Backend, Universe};

use super::search::{check_leq_0, LeqZeroEntry, SearchBounds};
use super::TaggedUniverse;

type Q = Ratio<u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Uniform counting measure on a finite universe.
    Counting,
    /// Natural density on ℕ.
    Density,
}

/// The arithmetic contradiction for one `m`, with `μ(X) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub m: u64,
    pub p: u64,
    pub q: u64,
    /// From `pX₀ ≤ q·2X`.
    pub x0_upper: Q,
    /// `μ(2X) − x0_upper`.
    pub rest_lower: Q,
    /// `rest_lower > 1`, against `μ(2X ∖ X₀) ≤ μ(X) = 1`.
    pub contradiction: bool,
}

#[derive(Debug, Clone)]
pub struct ParadoxBundle {
    /// Two copies of the base; `2X` is copies 0 and 1, `X` is copy 0.
    pub pair: TaggedUniverse,
    pub leq_zero: Vec<LeqZeroEntry>,
    pub obstruction: Obstruction,
}

#[derive(Debug, Clone)]
pub enum TarskiVerdict {
    Paradoxical(Box<ParadoxBundle>),
    MeasureCandidate { measure: Measure, sets_checked: usize },
    Inconclusive { reason: String },
}

/// Checks for a paradoxical decomposition of `x` (with `m ≤ 3`) and for a
/// certified invariant measure, and fails if both are found.
pub fn tarski_verdict(u: &Universe, x: &DefSet, bounds: &SearchBounds, samples: usize, seed: u64) -> Result<TarskiVerdict> {
    if x.universe_id() != u.id() {
        return Err(Error::UniverseMismatch);
    }
    if x.is_empty() {
        return Ok(TarskiVerdict::Inconclusive { reason: "X is empty, so no measure can normalize it".into() });
    }
    let measure = certified_measure(u, x, samples, seed)?;
    let paradox = paradox(u, x, bounds)?;
    match (paradox, measure) {
        (Some(_), Some((m, _))) => Err(Error::invariant(format!(
            "found both a paradoxical decomposition and an invariant {m:?} measure"
        ))),
        (Some(b), None) => Ok(TarskiVerdict::Paradoxical(Box::new(b))),
        (None, Some((measure, sets_checked))) => Ok(TarskiVerdict::MeasureCandidate { measure, sets_checked }),
        (None, None) => Ok(TarskiVerdict::Inconclusive {
            reason: "no paradoxical decomposition within the search bounds and no certified measure".into(),
        }),
    }
}

fn paradox(u: &Universe, x: &DefSet, bounds: &SearchBounds) -> Result<Option<ParadoxBundle>> {
    let pair = TaggedUniverse::new(u, 2)?;
    let two_x = pair.copies_of(x, 2)?;
    let one_x = pair.tag(0, x)?;
    let leq_zero = check_leq_0(pair.universe(), &two_x, &one_x, 3, bounds)?;
    if leq_zero.iter().any(|e| e.found.is_none()) {
        return Ok(None);
    }
    let three = leq_zero.last().and_then(|e| e.found.as_ref()).expect("m = 3 entry");
    let (p, q) = (three.self_embedding.p, three.self_embedding.q);
    let x0_upper = Q::new(2 * q, p);
    let two = Q::from_integer(2);
    let rest_lower = if x0_upper >= two { Q::from_integer(0) } else { two - x0_upper };
    let obstruction = Obstruction { m: 3, p, q, x0_upper, rest_lower, contradiction: rest_lower > Q::from_integer(1) };
    if !obstruction.contradiction {
        return Err(Error::invariant(format!("m = 3 data give no contradiction: {obstruction:?}")));
    }
    Ok(Some(ParadoxBundle { pair, leq_zero, obstruction }))
}

/// The certified measure, with the number of sets its invariance was checked on.
fn certified_measure(u: &Universe, x: &DefSet, samples: usize, seed: u64) -> Result<Option<(Measure, usize)>> {
    let mut r = rng(seed);
    let gens: Vec<Letter> = u.generator_labels().map(|l| Letter::new(l.clone())).collect();
    match u.backend() {
        Backend::Finite { size } if u.all_total_bijections() => {
            for _ in 0..samples {
                let pts: Vec<u64> = (0..size).filter(|_| r.gen_bool(0.5)).collect();
                let s = u.set(&pts)?;
                for l in &gens {
                    let f = u.letter(l)?;
                    if f.image(&s)?.count() != s.count() || f.preimage(&s)?.count() != s.count() {
                        return Err(Error::invariant(format!("{} changes the size of {s}", l.label)));
                    }
                }
            }
            Ok(Some((Measure::Counting, samples)))
        }
        Backend::AffineNat if u.all_translations() && x.density() > Q::from_integer(0) => {
            for _ in 0..samples {
                let period = r.gen_range(1..=12u64);
                let threshold = r.gen_range(0..=20u64);
                let residues: Vec<u64> = (0..period).filter(|_| r.gen_bool(0.5)).collect();
                let exceptional: Vec<u64> = (0..threshold).filter(|_| r.gen_bool(0.5)).collect();
                let s = u.periodic(threshold, period, &residues, &exceptional)?;
                for l in &gens {
                    let f = u.letter(l)?;
                    let inside = s.intersect(f.domain())?;
                    if f.image(&inside)?.density() != s.density() || f.preimage(&s)?.density() != s.density() {
                        return Err(Error::invariant(format!("{} changes the density of {s}", l.label)));
                    }
                }
            }
            Ok(Some((Measure::Density, samples)))
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::GeneratorSpec;

    #[test]
    fn doubling_is_paradoxical() {
        let u = Universe::affine_nat()
            .generator(GeneratorSpec::affine("d", 2, 0))
            .generator(GeneratorSpec::affine("e", 2, 1))
            .build()
            .unwrap();
        match tarski_verdict(&u, &u.whole(), &SearchBounds::default(), 20, 1).unwrap() {
            TarskiVerdict::Paradoxical(b) => {
                assert!(b.obstruction.contradiction);
                assert!(b.obstruction.p > 2 * b.obstruction.q);
                assert!(b.leq_zero.iter().all(|e| e.found.is_some()));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn translation_has_density() {
        let u = Universe::affine_nat().generator(GeneratorSpec::affine("s", 1, 1)).build().unwrap();
        let v = tarski_verdict(&u, &u.whole(), &SearchBounds::default(), 100, 2).unwrap();
        assert!(matches!(v, TarskiVerdict::MeasureCandidate { measure: Measure::Density, sets_checked: 100 }), "{v:?}");
    }

    #[test]
    fn permutations_have_counting() {
        let g = crate::instances::four_cycle();
        let u = g.universe();
        let v = tarski_verdict(u, &u.set(&[0, 2]).unwrap(), &SearchBounds::default(), 20, 3).unwrap();
        assert!(matches!(v, TarskiVerdict::MeasureCandidate { measure: Measure::Counting, .. }), "{v:?}");
    }
}
