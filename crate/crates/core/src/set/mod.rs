//! Definable subsets of a universe.
//!
//! Two backends share one surface: dense membership vectors over a finite
//! ground set `{0..n-1}`, and eventually periodic subsets of ℕ. Values are
//! immutable; every operation returns a fresh canonical set.

mod bits;
mod periodic;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::universe::{Backend, Ground};

pub(crate) use bits::{Bits, BitsBuilder};
pub use periodic::Periodic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
    SymDiff,
}

impl SetOp {
    fn bool_op(self) -> fn(bool, bool) -> bool {
        match self {
            SetOp::Union => |a, b| a || b,
            SetOp::Intersect => |a, b| a && b,
            SetOp::Difference => |a, b| a && !b,
            SetOp::SymDiff => |a, b| a != b,
        }
    }

    fn word_op(self) -> fn(u64, u64) -> u64 {
        match self {
            SetOp::Union => |a, b| a | b,
            SetOp::Intersect => |a, b| a & b,
            SetOp::Difference => |a, b| a & !b,
            SetOp::SymDiff => |a, b| a ^ b,
        }
    }
}

/// Cardinality of a definable set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Size {
    Finite(u64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Repr {
    Finite(Bits),
    Periodic(Periodic),
}

/// A definable subset of a [`Universe`](crate::Universe).
#[derive(Clone)]
pub struct DefSet {
    pub(crate) ground: Arc<Ground>,
    pub(crate) repr: Repr,
}

impl PartialEq for DefSet {
    fn eq(&self, other: &Self) -> bool {
        self.ground.id == other.ground.id && self.repr == other.repr
    }
}

impl Eq for DefSet {}

impl Hash for DefSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ground.id.hash(state);
        self.repr.hash(state);
    }
}

impl DefSet {
    pub(crate) fn from_bits(ground: &Arc<Ground>, bits: Bits) -> Self {
        DefSet { ground: ground.clone(), repr: Repr::Finite(bits) }
    }

    pub(crate) fn from_periodic(ground: &Arc<Ground>, p: Periodic) -> Self {
        DefSet { ground: ground.clone(), repr: Repr::Periodic(p) }
    }

    pub(crate) fn empty_in(ground: &Arc<Ground>) -> Self {
        match ground.backend {
            Backend::Finite { size } => Self::from_bits(ground, Bits::empty(size as usize)),
            Backend::AffineNat => Self::from_periodic(ground, Periodic::empty()),
        }
    }

    pub(crate) fn whole_in(ground: &Arc<Ground>) -> Self {
        match ground.backend {
            Backend::Finite { size } => Self::from_bits(ground, Bits::full(size as usize)),
            Backend::AffineNat => Self::from_periodic(ground, Periodic::naturals()),
        }
    }

    /// Builds a finite-backend set from an element list (all below the ground size).
    pub(crate) fn from_elements_in(ground: &Arc<Ground>, elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        match ground.backend {
            Backend::Finite { size } => {
                let b: BitsBuilder = elements.into_iter().collect();
                b.build(size as usize)
                    .map(|bits| Self::from_bits(ground, bits))
                    .ok_or_else(|| Error::malformed(format!("element outside universe of size {size}")))
            }
            Backend::AffineNat => {
                let v: Vec<u64> = elements.into_iter().collect();
                Ok(Self::from_periodic(ground, Periodic::from_elements(&v, &ground.limits)?))
            }
        }
    }

    pub fn universe_id(&self) -> u64 {
        self.ground.id
    }

    pub fn backend(&self) -> Backend {
        self.ground.backend
    }

    pub(crate) fn same_universe(&self, other: &DefSet) -> Result<()> {
        if self.ground.id == other.ground.id {
            Ok(())
        } else {
            Err(Error::UniverseMismatch)
        }
    }

    pub fn as_periodic(&self) -> Option<&Periodic> {
        match &self.repr {
            Repr::Periodic(p) => Some(p),
            Repr::Finite(_) => None,
        }
    }

    pub fn contains(&self, x: u64) -> bool {
        match &self.repr {
            Repr::Finite(b) => b.contains(x),
            Repr::Periodic(p) => p.contains(x),
        }
    }

    pub fn boolean(&self, op: SetOp, other: &DefSet) -> Result<DefSet> {
        self.same_universe(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Finite(a), Repr::Finite(b)) => Repr::Finite(a.zip(b, op.word_op())),
            (Repr::Periodic(a), Repr::Periodic(b)) => {
                Repr::Periodic(a.combine(b, op.bool_op(), &self.ground.limits)?)
            }
            _ => return Err(Error::UniverseMismatch),
        };
        Ok(DefSet { ground: self.ground.clone(), repr })
    }

    pub fn union(&self, other: &DefSet) -> Result<DefSet> {
        self.boolean(SetOp::Union, other)
    }

    pub fn intersect(&self, other: &DefSet) -> Result<DefSet> {
        self.boolean(SetOp::Intersect, other)
    }

    pub fn difference(&self, other: &DefSet) -> Result<DefSet> {
        self.boolean(SetOp::Difference, other)
    }

    pub fn symdiff(&self, other: &DefSet) -> Result<DefSet> {
        self.boolean(SetOp::SymDiff, other)
    }

    pub fn complement(&self) -> DefSet {
        DefSet::whole_in(&self.ground).difference(self).expect("same universe")
    }

    pub fn is_empty(&self) -> bool {
        match &self.repr {
            Repr::Finite(b) => b.is_empty(),
            Repr::Periodic(p) => p.is_empty(),
        }
    }

    pub fn equals(&self, other: &DefSet) -> Result<bool> {
        self.same_universe(other)?;
        Ok(self.repr == other.repr)
    }

    pub fn is_subset(&self, other: &DefSet) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn is_disjoint(&self, other: &DefSet) -> Result<bool> {
        Ok(self.intersect(other)?.is_empty())
    }

    pub fn size(&self) -> Size {
        match &self.repr {
            Repr::Finite(b) => Size::Finite(b.count()),
            Repr::Periodic(p) if p.is_finite() => Size::Finite(p.exceptional().len() as u64),
            Repr::Periodic(_) => Size::Infinite,
        }
    }

    /// Exact cardinality; panics on infinite sets. Intended for the finite backend.
    pub fn count(&self) -> u64 {
        match self.size() {
            Size::Finite(n) => n,
            Size::Infinite => panic!("count() on an infinite set"),
        }
    }

    /// Natural density on ℕ; proportion of the ground set on the finite backend.
    pub fn density(&self) -> Ratio<u64> {
        match &self.repr {
            Repr::Finite(b) if b.len() == 0 => Ratio::from_integer(0),
            Repr::Finite(b) => Ratio::new(b.count(), b.len() as u64),
            Repr::Periodic(p) => p.density(),
        }
    }

    /// Members below `bound`, ascending.
    pub fn enumerate_window(&self, bound: u64) -> Vec<u64> {
        match &self.repr {
            Repr::Finite(b) => b.iter().take_while(|&x| x < bound).collect(),
            Repr::Periodic(p) => p.enumerate_below(bound),
        }
    }

    /// All members of a finite set.
    pub fn elements(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Finite(b) => b.iter().collect(),
            Repr::Periodic(p) if p.is_finite() => p.exceptional().to_vec(),
            Repr::Periodic(_) => panic!("elements() on an infinite set"),
        }
    }

    /// Smallest member, if any.
    pub fn first_element(&self) -> Option<u64> {
        match &self.repr {
            Repr::Finite(b) => b.iter().next(),
            Repr::Periodic(p) => p
                .exceptional()
                .first()
                .copied()
                .or_else(|| p.enumerate_below(p.threshold() + p.period()).first().copied()),
        }
    }

    pub fn to_spec(&self) -> SetSpec {
        match &self.repr {
            Repr::Finite(b) => SetSpec::List(b.iter().collect()),
            Repr::Periodic(p) => SetSpec::Periodic {
                threshold: p.threshold(),
                period: p.period(),
                residues: p.residues(),
                exceptional: p.exceptional().to_vec(),
            },
        }
    }
}

impl fmt::Debug for DefSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DefSet#{}{}", self.ground.id, self)
    }
}

impl fmt::Display for DefSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Finite(b) => {
                let items: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            Repr::Periodic(p) => write!(
                f,
                "{{T={}, P={}, R={:?}, exceptional={:?}}}",
                p.threshold(),
                p.period(),
                p.residues(),
                p.exceptional()
            ),
        }
    }
}

/// JSON encoding of a set: a sorted array for finite sets, or the canonical
/// eventually periodic form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    List(Vec<u64>),
    Periodic {
        #[serde(rename = "T")]
        threshold: u64,
        #[serde(rename = "P")]
        period: u64,
        #[serde(rename = "R")]
        residues: Vec<u64>,
        #[serde(default)]
        exceptional: Vec<u64>,
    },
}

#[cfg(test)]
mod tests {
    use crate::universe::Universe;

    #[test]
    fn boolean_examples() {
        let u = Universe::affine_nat().build().unwrap();
        let evens = u.progression(0, 2).unwrap();
        let odds = u.progression(1, 2).unwrap();
        assert_eq!(evens.union(&odds).unwrap(), u.whole());
        let a = u.set(&[1, 2]).unwrap();
        let b = u.set(&[2, 3]).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), u.set(&[2]).unwrap());
        let four = u.progression(0, 4).unwrap();
        assert!(four.difference(&evens).unwrap().is_empty());
    }

    #[test]
    fn compare_examples() {
        let u = Universe::affine_nat().build().unwrap();
        assert!(u.empty().is_empty());
        let four = u.progression(0, 4).unwrap();
        let two = u.progression(0, 2).unwrap();
        assert!(four.is_subset(&two).unwrap());
        assert!(!two.is_subset(&four).unwrap());
        let all = two.union(&u.progression(1, 2).unwrap()).unwrap();
        assert!(all.equals(&u.whole()).unwrap());
    }

    #[test]
    fn size_density_examples() {
        use super::Size;
        use num_rational::Ratio;
        let u = Universe::affine_nat().build().unwrap();
        assert_eq!(u.set(&[1, 2, 3]).unwrap().size(), Size::Finite(3));
        assert_eq!(u.progression(0, 2).unwrap().density(), Ratio::new(1, 2));
        let s = u.progression(1, 3).unwrap().union(&u.set(&[0]).unwrap()).unwrap();
        assert_eq!(s.density(), Ratio::new(1, 3));
        assert_eq!(s.size(), Size::Infinite);
        let f = Universe::finite(5).build().unwrap();
        assert_eq!(f.set(&[0, 4]).unwrap().size(), Size::Finite(2));
    }

    #[test]
    fn window_examples() {
        let u = Universe::affine_nat().build().unwrap();
        assert_eq!(u.progression(0, 2).unwrap().enumerate_window(5), vec![0, 2, 4]);
        assert!(u.empty().enumerate_window(10).is_empty());
        assert!(u.set(&[7]).unwrap().enumerate_window(5).is_empty());
    }

    #[test]
    fn cross_universe_is_rejected() {
        let u = Universe::affine_nat().build().unwrap();
        let v = Universe::affine_nat().build().unwrap();
        assert_eq!(u.whole().union(&v.whole()).unwrap_err(), crate::Error::UniverseMismatch);
        let f = Universe::finite(3).build().unwrap();
        assert!(f.whole().is_subset(&u.whole()).is_err());
    }

    #[test]
    fn json_forms() {
        let u = Universe::affine_nat().build().unwrap();
        let s = u.progression(1, 3).unwrap().union(&u.set(&[0]).unwrap()).unwrap();
        let json = serde_json::to_string(&s.to_spec()).unwrap();
        assert_eq!(json, r#"{"T":1,"P":3,"R":[1],"exceptional":[0]}"#);
        let f = Universe::finite(6).build().unwrap();
        assert_eq!(serde_json::to_string(&f.set(&[4, 1]).unwrap().to_spec()).unwrap(), "[1,4]");
        let back: super::SetSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(u.resolve(&back).unwrap(), s);
    }
}
