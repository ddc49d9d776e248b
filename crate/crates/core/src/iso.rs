//! The pseudogroup of partial definable bijections generated by a universe's
//! generator maps: words, composition, inversion, restriction and equalizers.
//!
//! A word is read left to right: `[g, h]` applies `g` first, then `h`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::affine::AffineRule;
use crate::error::{Error, Result};
use crate::set::{Bits, DefSet, Periodic, Repr};
use crate::universe::{Backend, Ground, Universe};

/// A generator label with exponent `+1` or `-1`; JSON form `["d", 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "(String, i8)", try_from = "(String, i8)")]
pub struct Letter {
    pub label: String,
    pub inverse: bool,
}

impl Letter {
    pub fn new(label: impl Into<String>) -> Self {
        Letter { label: label.into(), inverse: false }
    }

    pub fn inv(label: impl Into<String>) -> Self {
        Letter { label: label.into(), inverse: true }
    }

    pub fn inverted(&self) -> Self {
        Letter { label: self.label.clone(), inverse: !self.inverse }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.label == other.label && self.inverse != other.inverse
    }
}

impl From<Letter> for (String, i8) {
    fn from(l: Letter) -> Self {
        (l.label, if l.inverse { -1 } else { 1 })
    }
}

impl TryFrom<(String, i8)> for Letter {
    type Error = String;

    fn try_from((label, exp): (String, i8)) -> std::result::Result<Self, String> {
        match exp {
            1 => Ok(Letter::new(label)),
            -1 => Ok(Letter::inv(label)),
            e => Err(format!("exponent must be 1 or -1, got {e}")),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}⁻¹", self.label)
        } else {
            write!(f, "{}", self.label)
        }
    }
}

/// A freely reduced word over generator letters. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<Letter>", into = "Vec<Letter>")]
pub struct IsoWord(Vec<Letter>);

impl From<Vec<Letter>> for IsoWord {
    fn from(letters: Vec<Letter>) -> Self {
        IsoWord::new(letters)
    }
}

impl From<IsoWord> for Vec<Letter> {
    fn from(w: IsoWord) -> Self {
        w.0
    }
}

impl IsoWord {
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|last| last.cancels(&l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        IsoWord(out)
    }

    pub fn identity() -> Self {
        IsoWord(Vec::new())
    }

    pub fn single(label: impl Into<String>) -> Self {
        IsoWord(vec![Letter::new(label)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &IsoWord) -> IsoWord {
        IsoWord::new(self.0.iter().chain(next.0.iter()).cloned())
    }

    pub fn inverse(&self) -> IsoWord {
        IsoWord(self.0.iter().rev().map(Letter::inverted).collect())
    }
}

impl fmt::Display for IsoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join("·"))
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Rule {
    /// Graph as `(x, f(x))` pairs sorted by `x`.
    Table(Arc<Vec<(u64, u64)>>),
    Affine(AffineRule),
}

/// A partial injection with definable domain, tagged by the word that realizes it.
#[derive(Clone)]
pub struct PartialIso {
    word: IsoWord,
    rule: Rule,
    domain: DefSet,
    image: DefSet,
}

impl fmt::Debug for PartialIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartialIso")
            .field("word", &self.word.to_string())
            .field("domain", &self.domain)
            .field("image", &self.image)
            .finish()
    }
}

fn bits_from(ground: &Arc<Ground>, xs: impl Iterator<Item = u64>) -> DefSet {
    let Backend::Finite { size } = ground.backend else { unreachable!("table maps live on finite universes") };
    let mut b = Bits::empty(size as usize);
    for x in xs {
        b.insert(x as usize);
    }
    DefSet::from_bits(ground, b)
}

impl PartialIso {
    pub(crate) fn from_pairs(ground: &Arc<Ground>, word: IsoWord, mut pairs: Vec<(u64, u64)>) -> Result<Self> {
        let Backend::Finite { size } = ground.backend else {
            return Err(Error::malformed("table maps require a finite universe"));
        };
        pairs.sort_unstable();
        pairs.dedup();
        let mut seen = Bits::empty(size as usize);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::malformed(format!("table maps {} twice", w[0].0)));
            }
        }
        for &(x, y) in &pairs {
            if x >= size || y >= size {
                return Err(Error::malformed(format!("pair ({x},{y}) outside universe of size {size}")));
            }
            if seen.contains(y) {
                return Err(Error::malformed(format!("table is not injective at image {y}")));
            }
            seen.insert(y as usize);
        }
        Ok(Self::table_unchecked(ground, word, pairs))
    }

    fn table_unchecked(ground: &Arc<Ground>, word: IsoWord, pairs: Vec<(u64, u64)>) -> Self {
        let domain = bits_from(ground, pairs.iter().map(|p| p.0));
        let image = bits_from(ground, pairs.iter().map(|p| p.1));
        PartialIso { word, rule: Rule::Table(Arc::new(pairs)), domain, image }
    }

    /// The rule restricted to `domain` (and to the points where it is defined).
    pub(crate) fn from_affine(word: IsoWord, rule: AffineRule, domain: &DefSet) -> Result<Self> {
        let ground = &domain.ground;
        match (&domain.repr, ground.backend) {
            (Repr::Finite(b), Backend::Finite { size }) => {
                let pairs = b
                    .iter()
                    .filter_map(|x| rule.apply(x).filter(|&y| y < size).map(|y| (x, y)))
                    .collect();
                Ok(Self::table_unchecked(ground, word, pairs))
            }
            (Repr::Periodic(p), _) => {
                let valid = Periodic::valid_points(&rule, &ground.limits)?;
                let dom = p.combine(&valid, |a, b| a && b, &ground.limits)?;
                let img = dom.image(&rule, &ground.limits)?;
                Ok(PartialIso {
                    word,
                    rule: Rule::Affine(rule),
                    domain: DefSet::from_periodic(ground, dom),
                    image: DefSet::from_periodic(ground, img),
                })
            }
            _ => Err(Error::UniverseMismatch),
        }
    }

    /// Identity on the whole universe.
    pub(crate) fn identity_in(ground: &Arc<Ground>) -> Self {
        match ground.backend {
            Backend::Finite { size } => {
                Self::table_unchecked(ground, IsoWord::identity(), (0..size).map(|x| (x, x)).collect())
            }
            Backend::AffineNat => {
                let whole = DefSet::whole_in(ground);
                PartialIso {
                    word: IsoWord::identity(),
                    rule: Rule::Affine(AffineRule::IDENTITY),
                    domain: whole.clone(),
                    image: whole,
                }
            }
        }
    }

    /// Identity restricted to `s`.
    pub fn identity_on(s: &DefSet) -> Self {
        match &s.repr {
            Repr::Finite(b) => Self::table_unchecked(&s.ground, IsoWord::identity(), b.iter().map(|x| (x, x)).collect()),
            Repr::Periodic(_) => PartialIso {
                word: IsoWord::identity(),
                rule: Rule::Affine(AffineRule::IDENTITY),
                domain: s.clone(),
                image: s.clone(),
            },
        }
    }

    pub fn word(&self) -> &IsoWord {
        &self.word
    }

    pub fn domain(&self) -> &DefSet {
        &self.domain
    }

    pub fn image_set(&self) -> &DefSet {
        &self.image
    }

    pub fn universe_id(&self) -> u64 {
        self.domain.ground.id
    }

    /// The affine rule, on the naturals backend.
    pub fn affine_rule(&self) -> Option<AffineRule> {
        match &self.rule {
            Rule::Affine(r) => Some(*r),
            Rule::Table(_) => None,
        }
    }

    fn check(&self, s: &DefSet) -> Result<()> {
        self.domain.same_universe(s)
    }

    pub fn apply(&self, x: u64) -> Option<u64> {
        match &self.rule {
            Rule::Table(pairs) => pairs.binary_search_by_key(&x, |p| p.0).ok().map(|i| pairs[i].1),
            Rule::Affine(r) => {
                if self.domain.contains(x) {
                    r.apply(x)
                } else {
                    None
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn invert(&self) -> PartialIso {
        let word = self.word.inverse();
        match &self.rule {
            Rule::Table(pairs) => {
                let mut inv: Vec<(u64, u64)> = pairs.iter().map(|&(x, y)| (y, x)).collect();
                inv.sort_unstable();
                PartialIso { word, rule: Rule::Table(Arc::new(inv)), domain: self.image.clone(), image: self.domain.clone() }
            }
            Rule::Affine(r) => PartialIso {
                word,
                rule: Rule::Affine(r.inverse()),
                domain: self.image.clone(),
                image: self.domain.clone(),
            },
        }
    }

    /// Shrinks the domain to `s ∩ dom f`.
    pub fn restrict(&self, s: &DefSet) -> Result<PartialIso> {
        self.check(s)?;
        match &self.rule {
            Rule::Table(pairs) => {
                let kept: Vec<(u64, u64)> = pairs.iter().copied().filter(|&(x, _)| s.contains(x)).collect();
                Ok(Self::table_unchecked(&self.domain.ground, self.word.clone(), kept))
            }
            Rule::Affine(r) => {
                let domain = self.domain.intersect(s)?;
                let image = affine_image(r, &domain)?;
                Ok(PartialIso { word: self.word.clone(), rule: self.rule.clone(), domain, image })
            }
        }
    }

    /// `f(s ∩ dom f)`.
    pub fn image(&self, s: &DefSet) -> Result<DefSet> {
        self.check(s)?;
        match &self.rule {
            Rule::Table(pairs) => Ok(bits_from(
                &self.domain.ground,
                pairs.iter().filter(|&&(x, _)| s.contains(x)).map(|p| p.1),
            )),
            Rule::Affine(r) => affine_image(r, &self.domain.intersect(s)?),
        }
    }

    /// `{x ∈ dom f : f(x) ∈ s}`.
    pub fn preimage(&self, s: &DefSet) -> Result<DefSet> {
        self.check(s)?;
        match &self.rule {
            Rule::Table(pairs) => Ok(bits_from(
                &self.domain.ground,
                pairs.iter().filter(|&&(_, y)| s.contains(y)).map(|p| p.0),
            )),
            Rule::Affine(r) => affine_image(&r.inverse(), &self.image.intersect(s)?),
        }
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &PartialIso) -> Result<PartialIso> {
        self.check(&inner.domain)?;
        let word = inner.word.then(&self.word);
        match (&self.rule, &inner.rule) {
            (Rule::Table(_), Rule::Table(ip)) => {
                let pairs: Vec<(u64, u64)> =
                    ip.iter().filter_map(|&(x, y)| self.apply(y).map(|z| (x, z))).collect();
                Ok(Self::table_unchecked(&self.domain.ground, word, pairs))
            }
            (Rule::Affine(outer), Rule::Affine(ir)) => {
                let domain = inner.preimage(&self.domain)?;
                let rule = outer.after(ir)?;
                let mid = inner.image.intersect(&self.domain)?;
                let image = affine_image(outer, &mid)?;
                Ok(PartialIso { word, rule: Rule::Affine(rule), domain, image })
            }
            _ => Err(Error::UniverseMismatch),
        }
    }

    /// `{x ∈ dom f ∩ dom g : f(x) = g(x)}`.
    pub fn equalizer(&self, other: &PartialIso) -> Result<DefSet> {
        self.check(&other.domain)?;
        match (&self.rule, &other.rule) {
            (Rule::Table(a), Rule::Table(b)) => {
                let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                let _ = large;
                let other_iso = if Arc::ptr_eq(small, a) { other } else { self };
                Ok(bits_from(
                    &self.domain.ground,
                    small.iter().filter(|&&(x, y)| other_iso.apply(x) == Some(y)).map(|p| p.0),
                ))
            }
            (Rule::Affine(f), Rule::Affine(g)) => {
                let common = self.domain.intersect(&other.domain)?;
                // d_g (m_f x + a_f) = d_f (m_g x + a_g)
                let coeff = g.div() * f.mul() - f.div() * g.mul();
                let rhs = f.div() * g.add() - g.div() * f.add();
                if coeff == 0 {
                    if rhs == 0 {
                        Ok(common)
                    } else {
                        Ok(DefSet::empty_in(&self.domain.ground))
                    }
                } else if rhs % coeff == 0 && rhs / coeff >= 0 {
                    let x = (rhs / coeff) as u64;
                    let point = DefSet::from_elements_in(&self.domain.ground, [x])?;
                    common.intersect(&point)
                } else {
                    Ok(DefSet::empty_in(&self.domain.ground))
                }
            }
            _ => Err(Error::UniverseMismatch),
        }
    }

    /// Same graph, regardless of word.
    pub fn same_graph(&self, other: &PartialIso) -> Result<bool> {
        Ok(self.domain.equals(&other.domain)? && self.equalizer(other)?.equals(&self.domain)?)
    }

    /// `(x, f(x))` for every `x < bound` in the domain.
    pub fn window_pairs(&self, bound: u64) -> Vec<(u64, u64)> {
        match &self.rule {
            Rule::Table(pairs) => pairs.iter().copied().filter(|&(x, _)| x < bound).collect(),
            Rule::Affine(r) => self
                .domain
                .enumerate_window(bound)
                .into_iter()
                .filter_map(|x| r.apply(x).map(|y| (x, y)))
                .collect(),
        }
    }

    /// Every pair of a finite-domain map.
    pub fn pairs(&self) -> Vec<(u64, u64)> {
        match &self.rule {
            Rule::Table(pairs) => pairs.as_ref().clone(),
            Rule::Affine(r) => {
                self.domain.elements().into_iter().filter_map(|x| r.apply(x).map(|y| (x, y))).collect()
            }
        }
    }

    fn graph_key(&self) -> GraphKey {
        match &self.rule {
            Rule::Table(pairs) => GraphKey::Table(pairs.as_ref().clone()),
            Rule::Affine(r) => match self.domain.size() {
                crate::set::Size::Finite(0) => GraphKey::Empty,
                crate::set::Size::Finite(1) => {
                    let x = self.domain.first_element().expect("nonempty");
                    GraphKey::Point(x, r.apply(x).expect("defined on domain"))
                }
                _ => GraphKey::Affine(self.domain.clone(), *r),
            },
        }
    }
}

fn affine_image(rule: &AffineRule, s: &DefSet) -> Result<DefSet> {
    match &s.repr {
        Repr::Periodic(p) => Ok(DefSet::from_periodic(&s.ground, p.image(rule, &s.ground.limits)?)),
        Repr::Finite(_) => Err(Error::invariant("affine rule on finite backend")),
    }
}

/// Extensional identity of a partial map. Two or more domain points fix an affine rule.
#[derive(PartialEq, Eq, Hash)]
enum GraphKey {
    Empty,
    Point(u64, u64),
    Table(Vec<(u64, u64)>),
    Affine(DefSet, AffineRule),
}

/// Composite of the letters, applied left to right, with maximal domain.
///
/// The letters are composed exactly as given, so `[d⁻¹, d]` is the identity
/// restricted to the image of `d`; the returned map carries the freely
/// reduced word.
pub fn realize(universe: &Universe, letters: &[Letter]) -> Result<PartialIso> {
    let mut acc = universe.identity();
    for l in letters {
        let step = universe.letter(l)?;
        acc = step.after(&acc)?;
    }
    Ok(acc)
}

pub fn realize_word(universe: &Universe, word: &IsoWord) -> Result<PartialIso> {
    realize(universe, word.letters())
}

/// `f ∘ g`, failing on universe mismatch.
pub fn compose(f: &PartialIso, g: &PartialIso) -> Result<PartialIso> {
    f.after(g)
}

/// All freely reduced words of length at most `max_len`, realized and
/// deduplicated by graph; the first word (shortest, then lexicographic over
/// `g, g⁻¹` in label order) names each map. The identity is always first.
pub fn enumerate_pseudogroup(universe: &Universe, max_len: usize) -> Result<Vec<(IsoWord, PartialIso)>> {
    let cap = universe.limits().max_pseudogroup;
    let mut alphabet: Vec<Letter> = Vec::new();
    for label in universe.generator_labels() {
        alphabet.push(Letter::new(label.clone()));
        alphabet.push(Letter::inv(label.clone()));
    }
    let mut out: Vec<(IsoWord, PartialIso)> = Vec::new();
    let mut seen: HashMap<GraphKey, usize> = HashMap::new();
    let id = universe.identity();
    seen.insert(id.graph_key(), 0);
    out.push((IsoWord::identity(), id.clone()));
    let mut frontier: Vec<(Vec<Letter>, PartialIso)> = vec![(Vec::new(), id)];
    let mut visited: u64 = 1;
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (letters, iso) in &frontier {
            for l in &alphabet {
                if letters.last().is_some_and(|last| last.cancels(l)) {
                    continue;
                }
                visited += 1;
                if visited > cap {
                    return Err(Error::Resource { what: "pseudogroup words", value: visited, cap });
                }
                let step = universe.letter(l)?;
                let ext = step.after(iso)?;
                let key = ext.graph_key();
                if !seen.contains_key(&key) {
                    seen.insert(key, out.len());
                    out.push((ext.word().clone(), ext.clone()));
                }
                let mut w = letters.clone();
                w.push(l.clone());
                next.push((w, ext));
            }
        }
        frontier = next;
    }
    Ok(out)
}
