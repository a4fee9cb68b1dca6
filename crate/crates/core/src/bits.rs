//! Packed boolean rows and square boolean matrices.
//!
//! A row of width `n` occupies `words_for(n)` little-endian `u64` words; bits at
//! positions `>= n` are always zero so whole-word comparisons are exact.

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

#[inline]
pub(crate) fn get(row: &[u64], i: usize) -> bool {
    row[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
}

#[inline]
pub(crate) fn set(row: &mut [u64], i: usize) {
    row[i / WORD_BITS] |= 1 << (i % WORD_BITS);
}

#[inline]
pub(crate) fn count(row: &[u64]) -> usize {
    row.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub(crate) fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

#[inline]
pub(crate) fn or_assign(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

/// A row with bits `0..n` set.
pub(crate) fn full_row(n: usize) -> Vec<u64> {
    let mut row = vec![u64::MAX; words_for(n)];
    if let Some(last) = row.last_mut() {
        let rem = n % WORD_BITS;
        if rem != 0 {
            *last = (1u64 << rem) - 1;
        }
    }
    row
}

/// Iterator over the indices of set bits, ascending.
pub(crate) fn ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        std::iter::from_fn(move || {
            if word == 0 {
                return None;
            }
            let tz = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(w * WORD_BITS + tz)
        })
    })
}

/// Dense `n x n` boolean matrix stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct BitMatrix {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn zeros(n: usize) -> Self {
        let words = words_for(n);
        BitMatrix {
            n,
            words,
            data: vec![0; n * words],
        }
    }

    #[inline]
    pub(crate) fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> bool {
        get(self.row(i), j)
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize) {
        set(self.row_mut(i), j)
    }

    /// Boolean product: row `i` of the result is the union of `rhs` rows
    /// selected by the set bits of row `i` of `self`.
    pub(crate) fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let mut out = BitMatrix::zeros(self.n);
        let words = self.words;
        for i in 0..self.n {
            let dst = &mut out.data[i * words..(i + 1) * words];
            for j in ones(&self.data[i * words..(i + 1) * words]) {
                or_assign(dst, rhs.row(j));
            }
        }
        out
    }

    /// `self^exp` over the boolean semiring. `exp == 0` gives the identity.
    ///
    /// When `self` contains the identity, powers grow monotonically and stop
    /// changing once they reach the transitive closure; the loop exits early
    /// at that point.
    pub(crate) fn pow(&self, mut exp: usize) -> BitMatrix {
        let reflexive = (0..self.n).all(|i| self.get(i, i));
        let mut acc: Option<BitMatrix> = None;
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            exp >>= 1;
            if exp > 0 {
                let sq = base.mul(&base);
                if reflexive && sq == base {
                    // base is the closure; every further factor is a no-op
                    return match acc {
                        None => base,
                        Some(a) => a.mul(&base),
                    };
                }
                base = sq;
            }
        }
        acc.unwrap_or_else(|| BitMatrix::identity(self.n))
    }

    pub(crate) fn identity(n: usize) -> BitMatrix {
        let mut m = BitMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub(crate) fn with_identity(&self) -> BitMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m.set(i, i);
        }
        m
    }

    /// Whether row `i` has all `n` bits set.
    pub(crate) fn row_is_full(&self, i: usize) -> bool {
        count(self.row(i)) == self.n
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
