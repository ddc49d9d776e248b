/// Dense membership vector over `{0..len-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn empty(len: usize) -> Self {
        Bits { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Bits { len, words: vec![u64::MAX; len.div_ceil(64)] };
        b.trim();
        b
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        let x = x as usize;
        x < self.len && self.words[x / 64] >> (x % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, x: usize) {
        self.words[x / 64] |= 1 << (x % 64);
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn zip(&self, other: &Bits, op: impl Fn(u64, u64) -> u64) -> Bits {
        debug_assert_eq!(self.len, other.len);
        let mut b = Bits {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect(),
        };
        b.trim();
        b
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as u64;
                    w &= w - 1;
                    Some(i as u64 * 64 + t)
                }
            })
        })
    }
}

impl FromIterator<u64> for BitsBuilder {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        BitsBuilder(iter.into_iter().collect())
    }
}

/// Collects elements before the universe size is known.
pub struct BitsBuilder(Vec<u64>);

impl BitsBuilder {
    pub fn build(self, len: usize) -> Option<Bits> {
        let mut b = Bits::empty(len);
        for x in self.0 {
            if x as usize >= len {
                return None;
            }
            b.insert(x as usize);
        }
        Some(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_is_trimmed() {
        let b = Bits::full(70);
        assert_eq!(b.count(), 70);
        assert!(!b.contains(70));
        let c = b.zip(&Bits::empty(70), |x, y| !x | y);
        assert_eq!(c.count(), 0);
    }

    #[test]
    fn iterates_in_order() {
        let b: Bits = [3u64, 64, 65, 0].into_iter().collect::<BitsBuilder>().build(100).unwrap();
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 3, 64, 65]);
    }
}
