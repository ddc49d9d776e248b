//! Eventually periodic subsets of ℕ in canonical form.
//!
//! A set is stored as a threshold `T`, a period `P ≥ 1`, the residues `R ⊆ {0..P-1}`
//! describing membership for every `x ≥ T`, and the explicit members below `T`.
//! Canonical form has the least period and, for it, the least threshold, so two
//! sets are equal iff their canonical forms are.

use num_integer::Integer;
use num_rational::Ratio;

use crate::affine::AffineRule;
use crate::error::{Error, Result};
use crate::universe::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Periodic {
    threshold: u64,
    period: u64,
    residues: Vec<bool>,
    exceptional: Vec<u64>,
}

impl Periodic {
    pub fn empty() -> Self {
        Periodic { threshold: 0, period: 1, residues: vec![false], exceptional: Vec::new() }
    }

    pub fn naturals() -> Self {
        Periodic { threshold: 0, period: 1, residues: vec![true], exceptional: Vec::new() }
    }

    pub fn from_parts(
        threshold: u64,
        period: u64,
        residues: &[u64],
        exceptional: &[u64],
        limits: &Limits,
    ) -> Result<Self> {
        if period == 0 {
            return Err(Error::malformed("period must be at least 1"));
        }
        limits.check_period(period)?;
        limits.check_threshold(threshold)?;
        let mut res = vec![false; period as usize];
        for &r in residues {
            if r >= period {
                return Err(Error::malformed(format!("residue {r} not below period {period}")));
            }
            res[r as usize] = true;
        }
        let mut exc: Vec<u64> = exceptional.to_vec();
        exc.sort_unstable();
        exc.dedup();
        if let Some(&x) = exc.last() {
            if x >= threshold {
                return Err(Error::malformed(format!(
                    "exceptional element {x} not below threshold {threshold}"
                )));
            }
        }
        let mut s = Periodic { threshold, period, residues: res, exceptional: exc };
        s.canonicalize();
        Ok(s)
    }

    pub fn from_elements(elements: &[u64], limits: &Limits) -> Result<Self> {
        let t = elements.iter().max().map_or(0, |&m| m + 1);
        Self::from_parts(t, 1, &[], elements, limits)
    }

    /// `{ x ≥ from : x ≡ residue (mod modulus) }`.
    pub fn progression(residue: u64, modulus: u64, from: u64, limits: &Limits) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::malformed("modulus must be at least 1"));
        }
        let r = residue % modulus;
        let first = if from <= r { r } else { from + (modulus + r - from % modulus) % modulus };
        from_progressions(&[], &[(first, modulus)], limits)
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn residues(&self) -> Vec<u64> {
        self.residues.iter().enumerate().filter(|(_, &b)| b).map(|(r, _)| r as u64).collect()
    }

    pub fn exceptional(&self) -> &[u64] {
        &self.exceptional
    }

    #[inline]
    fn tail_contains(&self, x: u64) -> bool {
        self.residues[(x % self.period) as usize]
    }

    pub fn contains(&self, x: u64) -> bool {
        if x >= self.threshold {
            self.tail_contains(x)
        } else {
            self.exceptional.binary_search(&x).is_ok()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.exceptional.is_empty() && !self.residues.iter().any(|&b| b)
    }

    pub fn is_finite(&self) -> bool {
        !self.residues.iter().any(|&b| b)
    }

    /// Natural density `|R| / P`.
    pub fn density(&self) -> Ratio<u64> {
        let hits = self.residues.iter().filter(|&&b| b).count() as u64;
        Ratio::new(hits, self.period)
    }

    pub fn enumerate_below(&self, bound: u64) -> Vec<u64> {
        let mut out: Vec<u64> =
            self.exceptional.iter().copied().take_while(|&x| x < bound).collect();
        if bound > self.threshold && !self.is_finite() {
            for x in self.threshold..bound {
                if self.tail_contains(x) {
                    out.push(x);
                }
            }
        }
        out
    }

    fn canonicalize(&mut self) {
        // least period
        let p = self.period;
        let mut divisors: Vec<u64> = Vec::new();
        let mut d = 1;
        while d * d <= p {
            if p % d == 0 {
                divisors.push(d);
                if d != p / d {
                    divisors.push(p / d);
                }
            }
            d += 1;
        }
        divisors.sort_unstable();
        for d in divisors {
            if d == p {
                break;
            }
            let du = d as usize;
            if (0..p as usize).all(|r| self.residues[r] == self.residues[r % du]) {
                self.residues.truncate(du);
                self.period = d;
                break;
            }
        }
        // least threshold for that period
        while self.threshold > 0 {
            let x = self.threshold - 1;
            let member = self.exceptional.last() == Some(&x);
            if member != self.tail_contains(x) {
                break;
            }
            if member {
                self.exceptional.pop();
            }
            self.threshold = x;
        }
    }

    pub fn combine(&self, other: &Periodic, op: impl Fn(bool, bool) -> bool, limits: &Limits) -> Result<Self> {
        let threshold = self.threshold.max(other.threshold);
        let period = self.period.lcm(&other.period);
        limits.check_period(period)?;
        let residues: Vec<bool> = (0..period)
            .map(|r| op(self.tail_contains(r), other.tail_contains(r)))
            .collect();
        let exceptional: Vec<u64> = (0..threshold)
            .filter(|&x| op(self.contains(x), other.contains(x)))
            .collect();
        let mut s = Periodic { threshold, period, residues, exceptional };
        s.canonicalize();
        Ok(s)
    }

    /// Points where `rule` yields a natural number.
    pub fn valid_points(rule: &AffineRule, limits: &Limits) -> Result<Self> {
        let div = rule.div() as u64;
        limits.check_period(div)?;
        let from = rule.nonnegative_from();
        limits.check_threshold(from)?;
        let residues: Vec<u64> = (0..div)
            .filter(|&r| (rule.mul() * r as i128 + rule.add()).rem_euclid(rule.div()) == 0)
            .collect();
        // everything at or above `from` follows the residue pattern; nothing below is valid
        let mut res = vec![false; div as usize];
        for r in residues {
            res[r as usize] = true;
        }
        let mut s = Periodic { threshold: from, period: div, residues: res, exceptional: Vec::new() };
        s.canonicalize();
        Ok(s)
    }

    /// `{ rule(x) : x ∈ self, rule(x) ∈ ℕ }`.
    pub fn image(&self, rule: &AffineRule, limits: &Limits) -> Result<Self> {
        if rule.is_identity() {
            return Ok(self.clone());
        }
        let points: Vec<u64> = self.exceptional.iter().filter_map(|&x| rule.apply(x)).collect();
        let mut progs = Vec::new();
        for r in 0..self.period {
            if !self.residues[r as usize] {
                continue;
            }
            let t = self.threshold;
            let x0 = t + (self.period + r - t % self.period) % self.period;
            if let Some(p) = progression_image(x0, self.period, rule)? {
                progs.push(p);
            }
        }
        from_progressions(&points, &progs, limits)
    }
}

/// Image of `{x0 + step·j : j ≥ 0}` under `rule` as a progression `(start, step)`.
fn progression_image(x0: u64, step: u64, rule: &AffineRule) -> Result<Option<(u64, u64)>> {
    let (m, a, d) = (rule.mul(), rule.add(), rule.div());
    let (x0, step) = (x0 as i128, step as i128);
    // m·(x0 + step·j) + a ≡ 0 (mod d)
    let coeff = (m * step).rem_euclid(d);
    let rhs = (-(m * x0 + a)).rem_euclid(d);
    let g = coeff.gcd(&d);
    if rhs % g != 0 {
        return Ok(None);
    }
    let modulus = d / g;
    let j0 = if modulus == 1 {
        0
    } else {
        let inv = (coeff / g).extended_gcd(&modulus).x.rem_euclid(modulus);
        ((rhs / g) * inv).rem_euclid(modulus)
    };
    // smallest j = j0 + modulus·t with non-negative value
    let stride = m * step * modulus;
    let base = m * (x0 + step * j0) + a;
    let t = if base >= 0 { 0 } else { Integer::div_ceil(&-base, &stride) };
    let num = base + stride * t;
    let start = num / d;
    let out_step = m * step / g;
    let to_u64 = |v: i128| {
        u64::try_from(v).map_err(|_| Error::Resource { what: "set element", value: u64::MAX, cap: u64::MAX })
    };
    Ok(Some((to_u64(start)?, to_u64(out_step)?)))
}

/// Union of finitely many points and infinite progressions `(start, step)`.
pub(crate) fn from_progressions(points: &[u64], progs: &[(u64, u64)], limits: &Limits) -> Result<Periodic> {
    let mut period: u64 = 1;
    for &(_, step) in progs {
        period = period.lcm(&step);
        limits.check_period(period)?;
    }
    let threshold = progs
        .iter()
        .map(|&(s, _)| s)
        .chain(points.iter().map(|&p| p + 1))
        .max()
        .unwrap_or(0);
    limits.check_threshold(threshold)?;
    let mut residues = vec![false; period as usize];
    let mut exceptional: Vec<u64> = points.iter().copied().filter(|&p| p < threshold).collect();
    for &(start, step) in progs {
        let mut r = start % step;
        while r < period {
            residues[r as usize] = true;
            r += step;
        }
        let mut x = start;
        while x < threshold {
            exceptional.push(x);
            x += step;
        }
    }
    exceptional.sort_unstable();
    exceptional.dedup();
    let mut s = Periodic { threshold, period, residues, exceptional };
    s.canonicalize();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn canonical_period_is_minimal() {
        let s = Periodic::from_parts(0, 6, &[0, 2, 4], &[], &lim()).unwrap();
        assert_eq!(s.period(), 2);
        assert_eq!(s.residues(), vec![0]);
    }

    #[test]
    fn canonical_threshold_is_minimal() {
        // {0, 2, 4, 6, ...} written with a redundant prefix
        let s = Periodic::from_parts(7, 2, &[0], &[0, 2, 4, 6], &lim()).unwrap();
        assert_eq!(s, Periodic::progression(0, 2, 0, &lim()).unwrap());
        assert_eq!(s.threshold(), 0);
    }

    #[test]
    fn progression_with_offset_start() {
        let s = Periodic::progression(1, 3, 5, &lim()).unwrap();
        assert_eq!(s.enumerate_below(15), vec![7, 10, 13]);
    }

    #[test]
    fn image_under_doubling_and_halving() {
        let nat = Periodic::naturals();
        let double = AffineRule::integer(2, 0).unwrap();
        let evens = nat.image(&double, &lim()).unwrap();
        assert_eq!(evens, Periodic::progression(0, 2, 0, &lim()).unwrap());
        let halve = double.inverse();
        let back = evens.image(&halve, &lim()).unwrap();
        assert_eq!(back, nat);
        let odds = Periodic::progression(1, 2, 0, &lim()).unwrap();
        assert!(odds.image(&halve, &lim()).unwrap().is_empty());
    }

    #[test]
    fn image_with_negative_offset_drops_negatives() {
        let s = Periodic::from_elements(&[0, 1, 5], &lim()).unwrap();
        let r = AffineRule::new(1, -2, 1).unwrap();
        assert_eq!(s.image(&r, &lim()).unwrap().enumerate_below(10), vec![3]);
        let nat = Periodic::naturals();
        assert_eq!(nat.image(&r, &lim()).unwrap(), nat);
    }

    #[test]
    fn image_matches_pointwise_on_window() {
        let s = Periodic::from_parts(5, 6, &[1, 4], &[0, 3], &lim()).unwrap();
        let rule = AffineRule::new(3, -1, 4).unwrap();
        let img = s.image(&rule, &lim()).unwrap();
        let mut expect: Vec<u64> =
            s.enumerate_below(400).into_iter().filter_map(|x| rule.apply(x)).filter(|&y| y < 200).collect();
        expect.sort_unstable();
        assert_eq!(img.enumerate_below(200), expect);
    }

    #[test]
    fn period_cap_is_enforced() {
        let limits = Limits { max_period: 10, ..Limits::default() };
        let a = Periodic::progression(0, 7, 0, &limits).unwrap();
        let b = Periodic::progression(0, 3, 0, &limits).unwrap();
        assert!(a.combine(&b, |x, y| x || y, &limits).unwrap_err().is_resource());
    }
}
