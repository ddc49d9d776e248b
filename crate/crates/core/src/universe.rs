//! Universes: a ground set (finite `{0..n-1}` or ℕ) with named generator maps.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::affine::AffineRule;
use crate::error::{Error, Result};
use crate::iso::{IsoWord, Letter, PartialIso};
use crate::set::{Bits, BitsBuilder, DefSet, Periodic, SetSpec};

/// Resource caps. Exceeding one is an [`Error::Resource`], never a wrong answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_period: u64,
    pub max_threshold: u64,
    /// Augmenting-sequence prefixes visited by one elimination run.
    pub max_sequences: u64,
    /// Words visited by one pseudogroup enumeration.
    pub max_pseudogroup: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_period: 1_000_000, max_threshold: 10_000_000, max_sequences: 5_000_000, max_pseudogroup: 200_000 }
    }
}

impl Limits {
    pub fn check_period(&self, period: u64) -> Result<()> {
        if period > self.max_period {
            return Err(Error::Resource { what: "period", value: period, cap: self.max_period });
        }
        Ok(())
    }

    pub fn check_threshold(&self, threshold: u64) -> Result<()> {
        if threshold > self.max_threshold {
            return Err(Error::Resource { what: "threshold", value: threshold, cap: self.max_threshold });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Finite { size: u64 },
    AffineNat,
}

#[derive(Debug)]
pub(crate) struct Ground {
    pub(crate) id: u64,
    pub(crate) backend: Backend,
    pub(crate) limits: Limits,
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// A generator before realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    /// The rule on `domain` (default: everywhere it yields a point of the universe).
    Affine { label: String, rule: AffineRule, domain: Option<SetSpec> },
    Table { label: String, pairs: Vec<(u64, u64)> },
}

impl GeneratorSpec {
    /// `x ↦ a·x + b`.
    pub fn affine(label: impl Into<String>, a: u64, b: i64) -> Self {
        GeneratorSpec::Affine {
            label: label.into(),
            rule: AffineRule::integer(a, b).expect("positive multiplier"),
            domain: None,
        }
    }

    pub fn affine_on(label: impl Into<String>, rule: AffineRule, domain: SetSpec) -> Self {
        GeneratorSpec::Affine { label: label.into(), rule, domain: Some(domain) }
    }

    pub fn table(label: impl Into<String>, pairs: Vec<(u64, u64)>) -> Self {
        GeneratorSpec::Table { label: label.into(), pairs }
    }

    pub fn label(&self) -> &str {
        match self {
            GeneratorSpec::Affine { label, .. } | GeneratorSpec::Table { label, .. } => label,
        }
    }
}

/// JSON form of a generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorJson {
    Affine {
        label: String,
        a: i64,
        b: i64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        div: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<SetSpec>,
    },
    Table { label: String, pairs: Vec<(u64, u64)> },
}

fn one() -> i64 {
    1
}

fn is_one(x: &i64) -> bool {
    *x == 1
}

impl TryFrom<GeneratorJson> for GeneratorSpec {
    type Error = Error;

    fn try_from(j: GeneratorJson) -> Result<Self> {
        Ok(match j {
            GeneratorJson::Affine { label, a, b, div, domain } => {
                GeneratorSpec::Affine { label, rule: AffineRule::new(a.into(), b.into(), div.into())?, domain }
            }
            GeneratorJson::Table { label, pairs } => GeneratorSpec::Table { label, pairs },
        })
    }
}

impl From<&GeneratorSpec> for GeneratorJson {
    fn from(g: &GeneratorSpec) -> Self {
        match g {
            GeneratorSpec::Affine { label, rule, domain } => GeneratorJson::Affine {
                label: label.clone(),
                // coefficients are capped at 2^62
                a: rule.mul() as i64,
                b: rule.add() as i64,
                div: rule.div() as i64,
                domain: domain.clone(),
            },
            GeneratorSpec::Table { label, pairs } => GeneratorJson::Table { label: label.clone(), pairs: pairs.clone() },
        }
    }
}

/// JSON form of a universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UniverseSpec {
    Finite {
        size: u64,
        #[serde(default)]
        generators: Vec<GeneratorJson>,
    },
    AffineNat {
        #[serde(default)]
        generators: Vec<GeneratorJson>,
    },
}

struct Generator {
    spec: GeneratorSpec,
    forward: PartialIso,
    backward: PartialIso,
}

/// A ground set with its generators. Cheap to clone; clones share identity.
#[derive(Clone)]
pub struct Universe {
    pub(crate) ground: Arc<Ground>,
    generators: Arc<BTreeMap<String, Generator>>,
}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Universe")
            .field("id", &self.ground.id)
            .field("backend", &self.ground.backend)
            .field("generators", &self.generators.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl PartialEq for Universe {
    fn eq(&self, other: &Self) -> bool {
        self.ground.id == other.ground.id
    }
}

impl Eq for Universe {}

pub struct UniverseBuilder {
    backend: Backend,
    limits: Limits,
    generators: Vec<GeneratorSpec>,
}

impl UniverseBuilder {
    pub fn limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn generator(mut self, g: GeneratorSpec) -> Self {
        self.generators.push(g);
        self
    }

    pub fn generators(mut self, gs: impl IntoIterator<Item = GeneratorSpec>) -> Self {
        self.generators.extend(gs);
        self
    }

    pub fn build(self) -> Result<Universe> {
        let ground = Arc::new(Ground {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            backend: self.backend,
            limits: self.limits,
        });
        let mut map = BTreeMap::new();
        for spec in self.generators {
            let label = spec.label().to_string();
            if label.is_empty() {
                return Err(Error::malformed("empty generator label"));
            }
            if map.contains_key(&label) {
                return Err(Error::malformed(format!("duplicate generator label {label:?}")));
            }
            let word = IsoWord::single(label.clone());
            let forward = match &spec {
                GeneratorSpec::Table { pairs, .. } => PartialIso::from_pairs(&ground, word, pairs.clone())?,
                GeneratorSpec::Affine { rule, domain, .. } => {
                    let dom = match domain {
                        Some(d) => resolve_in(&ground, d)?,
                        None => DefSet::whole_in(&ground),
                    };
                    PartialIso::from_affine(word, *rule, &dom)?
                }
            };
            let backward = forward.invert();
            map.insert(label, Generator { spec, forward, backward });
        }
        Ok(Universe { ground, generators: Arc::new(map) })
    }
}

fn resolve_in(ground: &Arc<Ground>, spec: &SetSpec) -> Result<DefSet> {
    match (spec, ground.backend) {
        (SetSpec::List(xs), _) => DefSet::from_elements_in(ground, xs.iter().copied()),
        (SetSpec::Periodic { threshold, period, residues, exceptional }, Backend::AffineNat) => {
            let p = Periodic::from_parts(*threshold, *period, residues, exceptional, &ground.limits)?;
            Ok(DefSet::from_periodic(ground, p))
        }
        (SetSpec::Periodic { .. }, Backend::Finite { .. }) => {
            Err(Error::malformed("periodic set given for a finite universe"))
        }
    }
}

impl Universe {
    pub fn finite(size: u64) -> UniverseBuilder {
        UniverseBuilder { backend: Backend::Finite { size }, limits: Limits::default(), generators: Vec::new() }
    }

    pub fn affine_nat() -> UniverseBuilder {
        UniverseBuilder { backend: Backend::AffineNat, limits: Limits::default(), generators: Vec::new() }
    }

    pub fn from_spec(spec: &UniverseSpec, limits: Limits) -> Result<Universe> {
        let (builder, gens) = match spec {
            UniverseSpec::Finite { size, generators } => (Universe::finite(*size), generators),
            UniverseSpec::AffineNat { generators } => (Universe::affine_nat(), generators),
        };
        let mut b = builder.limits(limits);
        for g in gens {
            b = b.generator(GeneratorSpec::try_from(g.clone())?);
        }
        b.build()
    }

    pub fn to_spec(&self) -> UniverseSpec {
        let generators = self.generators.values().map(|g| GeneratorJson::from(&g.spec)).collect();
        match self.ground.backend {
            Backend::Finite { size } => UniverseSpec::Finite { size, generators },
            Backend::AffineNat => UniverseSpec::AffineNat { generators },
        }
    }

    pub fn id(&self) -> u64 {
        self.ground.id
    }

    pub fn backend(&self) -> Backend {
        self.ground.backend
    }

    /// `Some(n)` for the finite universe `{0..n-1}`.
    pub fn finite_size(&self) -> Option<u64> {
        match self.ground.backend {
            Backend::Finite { size } => Some(size),
            Backend::AffineNat => None,
        }
    }

    pub fn limits(&self) -> &Limits {
        &self.ground.limits
    }

    pub fn generator_labels(&self) -> impl Iterator<Item = &String> {
        self.generators.keys()
    }

    pub fn generator_specs(&self) -> impl Iterator<Item = &GeneratorSpec> {
        self.generators.values().map(|g| &g.spec)
    }

    pub fn generator_spec(&self, label: &str) -> Option<&GeneratorSpec> {
        self.generators.get(label).map(|g| &g.spec)
    }

    /// The map named by one letter.
    pub fn letter(&self, l: &Letter) -> Result<PartialIso> {
        let g = self.generators.get(&l.label).ok_or_else(|| Error::UnknownLabel(l.label.clone()))?;
        Ok(if l.inverse { g.backward.clone() } else { g.forward.clone() })
    }

    pub fn identity(&self) -> PartialIso {
        PartialIso::identity_in(&self.ground)
    }

    /// True when every generator is a translation `x ↦ x + b` on ℕ.
    pub fn all_translations(&self) -> bool {
        self.ground.backend == Backend::AffineNat
            && self.generators.values().all(|g| g.forward.affine_rule().is_some_and(|r| r.is_translation()))
    }

    /// True when every generator is a bijection of the whole universe.
    pub fn all_total_bijections(&self) -> bool {
        let whole = self.whole();
        self.generators
            .values()
            .all(|g| g.forward.domain() == &whole && g.forward.image_set() == &whole)
    }

    pub fn whole(&self) -> DefSet {
        DefSet::whole_in(&self.ground)
    }

    pub fn empty(&self) -> DefSet {
        DefSet::empty_in(&self.ground)
    }

    pub fn set(&self, elements: &[u64]) -> Result<DefSet> {
        DefSet::from_elements_in(&self.ground, elements.iter().copied())
    }

    /// `{x : x ≡ residue (mod modulus)}`; on a finite universe, its trace.
    pub fn progression(&self, residue: u64, modulus: u64) -> Result<DefSet> {
        self.progression_from(residue, modulus, 0)
    }

    /// `{x ≥ from : x ≡ residue (mod modulus)}`.
    pub fn progression_from(&self, residue: u64, modulus: u64, from: u64) -> Result<DefSet> {
        if modulus == 0 {
            return Err(Error::malformed("modulus must be at least 1"));
        }
        match self.ground.backend {
            Backend::AffineNat => Ok(DefSet::from_periodic(
                &self.ground,
                Periodic::progression(residue % modulus, modulus, from, &self.ground.limits)?,
            )),
            Backend::Finite { size } => {
                let b: BitsBuilder = (from..size).filter(|x| x % modulus == residue % modulus).collect();
                Ok(DefSet::from_bits(&self.ground, b.build(size as usize).expect("in range")))
            }
        }
    }

    /// `{lo..hi-1}`.
    pub fn range(&self, lo: u64, hi: u64) -> Result<DefSet> {
        match self.ground.backend {
            Backend::Finite { size } => {
                if hi > size {
                    return Err(Error::malformed(format!("range end {hi} exceeds universe size {size}")));
                }
                let mut b = Bits::empty(size as usize);
                for x in lo..hi {
                    b.insert(x as usize);
                }
                Ok(DefSet::from_bits(&self.ground, b))
            }
            Backend::AffineNat => {
                let xs: Vec<u64> = (lo..hi).collect();
                self.set(&xs)
            }
        }
    }

    /// `{x : x ≥ T, x mod P ∈ R} ∪ exceptional`.
    pub fn periodic(&self, threshold: u64, period: u64, residues: &[u64], exceptional: &[u64]) -> Result<DefSet> {
        self.resolve(&SetSpec::Periodic {
            threshold,
            period,
            residues: residues.to_vec(),
            exceptional: exceptional.to_vec(),
        })
    }

    pub fn resolve(&self, spec: &SetSpec) -> Result<DefSet> {
        resolve_in(&self.ground, spec)
    }

    pub fn realize(&self, word: &IsoWord) -> Result<PartialIso> {
        crate::iso::realize_word(self, word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_affine_generator_is_clipped() {
        let u = Universe::finite(6).generator(GeneratorSpec::affine("s", 1, 2)).build().unwrap();
        let s = u.letter(&Letter::new("s")).unwrap();
        assert_eq!(s.pairs(), vec![(0, 2), (1, 3), (2, 4), (3, 5)]);
        assert_eq!(u.letter(&Letter::inv("s")).unwrap().apply(5), Some(3));
    }

    #[test]
    fn negative_offset_has_restricted_domain() {
        let u = Universe::affine_nat().generator(GeneratorSpec::affine("p", 1, -2)).build().unwrap();
        let p = u.letter(&Letter::new("p")).unwrap();
        assert_eq!(p.domain(), &u.periodic(2, 1, &[0], &[]).unwrap());
    }

    #[test]
    fn json_form_round_trip() {
        let json = r#"{"kind":"affine_nat","generators":[{"kind":"affine","label":"d","a":2,"b":0},
            {"kind":"affine","label":"h","a":1,"b":0,"div":2,"domain":{"T":0,"P":2,"R":[0]}}]}"#;
        let spec: UniverseSpec = serde_json::from_str(json).unwrap();
        let u = Universe::from_spec(&spec, Limits::default()).unwrap();
        let h = u.letter(&Letter::new("h")).unwrap();
        assert_eq!(h.apply(6), Some(3));
        assert_eq!(h.apply(5), None);
        assert_eq!(u.to_spec(), spec);
        let f: UniverseSpec =
            serde_json::from_str(r#"{"kind":"finite","size":2,"generators":[{"kind":"table","label":"t","pairs":[[0,1],[1,0]]}]}"#)
                .unwrap();
        assert!(Universe::from_spec(&f, Limits::default()).unwrap().all_total_bijections());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let r = Universe::affine_nat()
            .generator(GeneratorSpec::affine("d", 2, 0))
            .generator(GeneratorSpec::affine("d", 3, 0))
            .build();
        assert!(r.is_err());
    }
}
