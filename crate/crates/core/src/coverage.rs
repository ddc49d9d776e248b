//! Matchings of regular graphs that cover all but a small set `Y₀`, with the
//! neighborhood chain `Y₀, Y₁, …, Y_K` whose growth bounds `Y₀`.
//!
//! `Y_i = N_G(Y_{i-1})` for odd `i` and `Y_i = N_M(Y_{i-1})` for even `i`.
//! With no augmenting path of length `≤ K`, every vertex of an odd `Y_i` is
//! matched, which drives the counting inequalities checked here.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NiceGraph;
use crate::matching::{covered, eliminate, matched_neighbors, Part, SymbolicMatching};
use crate::oracle;
use crate::set::DefSet;
use crate::universe::Backend;

pub type Q = Ratio<u64>;

/// `(k+1)/k · (1 + (K-1)/(2k))`, the growth factor reached by `Y_K`.
pub fn growth_factor(k: u64, big_k: u64) -> Q {
    Q::new(k + 1, k) * (Q::from_integer(1) + Q::new(big_k - 1, 2 * k))
}

/// Smallest odd `K ≥ 1` with `m ≤ growth_factor(k, K)`.
pub fn k_for_target(k: u64, m: Q) -> Result<u64> {
    if k < 2 {
        return Err(Error::precondition(format!("degree must be at least 2, got {k}")));
    }
    if m == Q::from_integer(0) {
        return Err(Error::precondition("target multiple must be positive"));
    }
    // m ≤ (k+1)/k (1 + (K-1)/(2k))  ⇔  K ≥ 1 + 2k (m k/(k+1) - 1)
    let scaled = m * Q::new(k, k + 1);
    let one = Q::from_integer(1);
    let need = if scaled <= one { one } else { one + Q::from_integer(2 * k) * (scaled - one) };
    let mut big_k = need.ceil().to_integer().max(1);
    if big_k % 2 == 0 {
        big_k += 1;
    }
    debug_assert!(m <= growth_factor(k, big_k));
    Ok(big_k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `k`-regular on both sides; `Y₀` is the uncovered part of `V`.
    BothSides,
    /// `k`-regular on `A`, degree `≤ k` on `B`; `Y₀` is the uncovered part of `A`.
    ASide,
    /// As `ASide` with degrees counting multiplicity.
    Multigraph,
}

/// How to read the even steps of the chain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum NmReading {
    /// Matched partners.
    #[default]
    M,
    /// All graph neighbors.
    E,
}

/// One checked inequality `lhs ≥ rhs` (or `=` when `equality`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: Q,
    pub rhs: Q,
    pub equality: bool,
    pub holds: bool,
}

impl Inequality {
    fn new(name: impl Into<String>, lhs: Q, rhs: Q, equality: bool) -> Self {
        let holds = if equality { lhs == rhs } else { lhs >= rhs };
        Inequality { name: name.into(), lhs, rhs, equality, holds }
    }
}

/// Counting checks on the chain. Exact on finite universes; on ℕ, counts
/// are taken on a window and only advisory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub sizes: Vec<u64>,
    pub windowed: bool,
    pub inequalities: Vec<Inequality>,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.inequalities.iter().all(|i| i.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DensityCertificate {
    /// Every generator is a translation, so natural density is invariant.
    Checked { y0: Q, vertices: Q, holds: bool },
    NotApplicable { reason: String },
}

#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub variant: Variant,
    pub k: u64,
    pub m: Q,
    pub big_k: u64,
    pub growth: Q,
    pub matching: SymbolicMatching,
    pub y0: DefSet,
    pub chain: Vec<DefSet>,
    pub chain_report: ChainReport,
    /// `m·|Y₀| ≤ |V|` (or `≤ |A|`) on finite universes.
    pub counting: Option<Inequality>,
    /// `|Y₀| ≤ 2|A|/(K+2)` against an independent maximum matching of size `|A|`.
    pub berge: Option<Inequality>,
    pub density: DensityCertificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageOptions {
    pub nm_reading: NmReading,
    /// Window for chain counts on ℕ.
    pub window: u64,
}

impl Default for CoverageOptions {
    fn default() -> Self {
        CoverageOptions { nm_reading: NmReading::M, window: 1000 }
    }
}

fn size_of(s: &DefSet, window: u64) -> u64 {
    match s.backend() {
        Backend::Finite { .. } => s.count(),
        Backend::AffineNat => s.enumerate_window(window).len() as u64,
    }
}

/// Degree on `A` after checking the variant's regularity hypothesis.
pub fn check_hypothesis(g: &NiceGraph, variant: Variant) -> Result<u64> {
    let report = g.validate();
    if !report.is_valid() {
        return Err(Error::hypothesis(format!("graph is not valid: {:?}", report.violations)));
    }
    if variant != Variant::Multigraph && g.is_multigraph() {
        return Err(Error::hypothesis("multiplicities need the multigraph variant"));
    }
    let k = g.a_degree()?.ok_or_else(|| Error::hypothesis("A side is empty or not regular"))?;
    match variant {
        Variant::BothSides => {
            if k < 2 {
                return Err(Error::hypothesis(format!("both-sides coverage needs degree at least 2, got {k}")));
            }
            if !g.is_k_regular(k)? {
                return Err(Error::hypothesis(format!("graph is not {k}-regular on both sides")));
            }
        }
        Variant::ASide | Variant::Multigraph => {
            if k < 1 || !g.is_k_regular_in_a_max_k_in_b(k)? {
                return Err(Error::hypothesis(format!("graph is not {k}-regular on A with degree at most {k} on B")));
            }
        }
    }
    Ok(k)
}

/// Runs elimination with the `K` chosen for `m` and reports `Y₀` with its
/// certificates. With degree 1 (possible on the `A`-side variants) `K = 1`
/// already leaves `Y₀` empty.
pub fn match_with_defect(g: &NiceGraph, m: Q, variant: Variant, opts: CoverageOptions) -> Result<CoverageReport> {
    let k = check_hypothesis(g, variant)?;
    let big_k = if k == 1 { 1 } else { k_for_target(k, m)? };
    let matching = eliminate(g, &SymbolicMatching::empty(), big_k as usize)?;
    let (y0, chain, chain_report) = y_chain_certificate(g, &matching, big_k, k, variant, opts)?;
    let finite = g.universe().finite_size().is_some();
    let counting = if finite {
        let total = match variant {
            Variant::BothSides => g.vertices()?.count(),
            Variant::ASide | Variant::Multigraph => g.a_side()?.count(),
        };
        let ineq = Inequality::new("m·|Y0| ≤ |V|", Q::from_integer(total), m * Q::from_integer(y0.count()), false);
        if !ineq.holds {
            return Err(Error::invariant(format!("coverage bound failed: {} < {}", ineq.lhs, ineq.rhs)));
        }
        Some(ineq)
    } else {
        None
    };
    let berge = if finite && variant == Variant::BothSides {
        let n = g.universe().finite_size().expect("finite");
        let ex = g.explicit_expand(n);
        let best = oracle::max_matching(&ex).0 as u64;
        let a = g.a_side()?.count();
        if best != a {
            return Err(Error::invariant(format!("regular graph without a perfect matching ({best} of {a})")));
        }
        // |M| ≥ (K+1)/(K+2)·|M*|
        let size = matching.size();
        Some(Inequality::new("(K+2)|M| ≥ (K+1)|M*|", Q::from_integer((big_k + 2) * size), Q::from_integer((big_k + 1) * best), false))
    } else {
        None
    };
    let density = density_certificate(g, &y0, m, variant)?;
    Ok(CoverageReport {
        variant,
        k,
        m,
        big_k,
        growth: growth_factor(k, big_k),
        matching,
        y0,
        chain,
        chain_report,
        counting,
        berge,
        density,
    })
}

fn density_certificate(g: &NiceGraph, y0: &DefSet, m: Q, variant: Variant) -> Result<DensityCertificate> {
    if g.universe().backend() != Backend::AffineNat {
        return Ok(DensityCertificate::NotApplicable { reason: "finite universe: counting applies".into() });
    }
    if !g.universe().all_translations() {
        return Ok(DensityCertificate::NotApplicable {
            reason: "some generator is not a translation, so density is not invariant".into(),
        });
    }
    let whole = match variant {
        Variant::BothSides => g.vertices()?,
        Variant::ASide | Variant::Multigraph => g.a_side()?,
    };
    let (dy, dv) = (y0.density(), whole.density());
    Ok(DensityCertificate::Checked { y0: dy, vertices: dv, holds: m * dy <= dv })
}

/// The chain `Y₀..Y_K` for a matching with no augmenting path of length
/// `≤ K`, and the counting inequalities it implies.
pub fn y_chain_certificate(
    g: &NiceGraph,
    m: &SymbolicMatching,
    big_k: u64,
    k: u64,
    variant: Variant,
    opts: CoverageOptions,
) -> Result<(DefSet, Vec<DefSet>, ChainReport)> {
    let y0 = match variant {
        Variant::BothSides => g.vertices()?.difference(&covered(g, m, Part::V)?)?,
        Variant::ASide | Variant::Multigraph => g.a_side()?.difference(&covered(g, m, Part::A)?)?,
    };
    let mut chain = vec![y0.clone()];
    for i in 1..=big_k {
        let prev = chain.last().expect("Y0 present");
        let next = if i % 2 == 1 || opts.nm_reading == NmReading::E {
            g.neighbors(prev)?
        } else {
            matched_neighbors(g, m, prev)?
        };
        chain.push(next);
    }
    let sizes: Vec<u64> = chain.iter().map(|s| size_of(s, opts.window)).collect();
    let q = |x: u64| Q::from_integer(x);
    let mut ineq = Vec::new();
    if big_k >= 1 {
        ineq.push(Inequality::new("(k-1)|Y1| ≥ k|Y0|", q((k - 1) * sizes[1]), q(k * sizes[0]), false));
    }
    let mut i = 1;
    while i + 2 <= big_k {
        ineq.push(Inequality::new(format!("|Y{i}| = |Y{}|", i + 1), q(sizes[i as usize]), q(sizes[i as usize + 1]), true));
        i += 2;
    }
    let mut i = 3;
    while i <= big_k {
        ineq.push(Inequality::new(
            format!("k|Y{i}| ≥ (k+({i}-1)/2)|Y1|"),
            q(2 * k * sizes[i as usize]),
            q((2 * k + i - 1) * sizes[1]),
            false,
        ));
        i += 2;
    }
    ineq.push(Inequality::new(
        "|YK| ≥ growth·|Y0|",
        q(sizes[big_k as usize]),
        growth_factor(k, big_k) * q(sizes[0]),
        false,
    ));
    let windowed = g.universe().backend() == Backend::AffineNat;
    Ok((y0, chain, ChainReport { sizes, windowed, inequalities: ineq }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn oracle_k(k: u64, m: Q) -> u64 {
        (1..).step_by(2).find(|&kk| m <= growth_factor(k, kk)).unwrap()
    }

    #[test]
    fn k_for_target_examples() {
        assert_eq!(k_for_target(2, Q::new(3, 2)).unwrap(), 1);
        assert_eq!(k_for_target(2, Q::from_integer(3)).unwrap(), 5);
        assert_eq!(k_for_target(3, Q::from_integer(2)).unwrap(), 5);
        assert!(k_for_target(1, Q::from_integer(2)).is_err());
        for k in 2..8 {
            for num in 1..40 {
                let m = Q::new(num, 4);
                assert_eq!(k_for_target(k, m).unwrap(), oracle_k(k, m), "k={k} m={m}");
            }
        }
    }

    #[test]
    fn four_cycle_is_covered() {
        let g = instances::four_cycle();
        let r = match_with_defect(&g, Q::from_integer(2), Variant::BothSides, CoverageOptions::default()).unwrap();
        assert!(r.y0.is_empty());
        assert_eq!(r.big_k, 3);
        assert!(r.chain_report.holds());
    }

    #[test]
    fn one_regular_is_rejected_on_both_sides() {
        let g = instances::single_bijection(3);
        let err = match_with_defect(&g, Q::from_integer(2), Variant::BothSides, CoverageOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
        let r = match_with_defect(&g, Q::from_integer(2), Variant::ASide, CoverageOptions::default()).unwrap();
        assert!(r.y0.is_empty());
    }

    #[test]
    fn random_two_regular_meet_the_bound() {
        let mut rng = instances::rng(5);
        for _ in 0..100 {
            let g = instances::random_regular(&mut rng, 30, 2).unwrap();
            let r = match_with_defect(&g, Q::from_integer(3), Variant::BothSides, CoverageOptions::default()).unwrap();
            assert!(3 * r.y0.count() <= 60);
            assert!(r.chain_report.holds(), "{:?}", r.chain_report);
        }
    }

    #[test]
    fn empty_defect_chain_is_vacuous() {
        let g = instances::four_cycle();
        let m = eliminate(&g, &SymbolicMatching::empty(), 1).unwrap();
        let (y0, _, rep) = y_chain_certificate(&g, &m, 3, 2, Variant::BothSides, CoverageOptions::default()).unwrap();
        assert!(y0.is_empty());
        assert!(rep.holds());
    }

    #[test]
    fn zigzag_density_certificate() {
        let g = instances::zigzag();
        let r = match_with_defect(&g, Q::from_integer(2), Variant::BothSides, CoverageOptions::default()).unwrap();
        assert!(matches!(r.density, DensityCertificate::Checked { holds: true, .. }), "{:?}", r.density);
        let h = instances::hilbert_hotel();
        let r = match_with_defect(&h, Q::from_integer(2), Variant::ASide, CoverageOptions::default()).unwrap();
        assert!(matches!(r.density, DensityCertificate::NotApplicable { .. }));
    }
}
