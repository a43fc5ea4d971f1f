//! Fixed-width coalitions over at most 128 players.
//!
//! Players are 0-based internally: player `i` is bit `i`. Text output and
//! file formats use 1-based player numbers; the integer index of a coalition
//! is little-endian, `Σ 2^i` over its members.

use std::fmt;

use crate::error::{Error, Result};

/// Largest player count a [`Coalition`] can hold.
pub const MAX_PLAYERS: usize = 128;

/// A subset of `[d]` stored as a bit set together with its ground-set size.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition {
    d: u8,
    bits: u128,
}

#[inline]
fn width_mask(d: usize) -> u128 {
    if d >= 128 {
        u128::MAX
    } else {
        (1u128 << d) - 1
    }
}

impl Coalition {
    /// The empty coalition over `d` players.
    pub fn empty(d: usize) -> Self {
        assert!(d <= MAX_PLAYERS, "d={d} exceeds {MAX_PLAYERS}");
        Coalition {
            d: d as u8,
            bits: 0,
        }
    }

    /// The grand coalition `[d]`.
    pub fn full(d: usize) -> Self {
        Coalition::empty(d).with_bits_unchecked(width_mask(d))
    }

    pub fn from_bits(d: usize, bits: u128) -> Result<Self> {
        if d > MAX_PLAYERS || bits & !width_mask(d) != 0 {
            return Err(Error::InvalidCoalition { bits, d });
        }
        Ok(Coalition::empty(d).with_bits_unchecked(bits))
    }

    /// Builds a coalition from 0-based player indices.
    pub fn from_players(d: usize, players: &[usize]) -> Result<Self> {
        let mut bits = 0u128;
        for &p in players {
            if p >= d {
                return Err(Error::InvalidCoalition {
                    bits: if p < 128 { 1u128 << p } else { u128::MAX },
                    d,
                });
            }
            bits |= 1u128 << p;
        }
        Coalition::from_bits(d, bits)
    }

    /// Coalition for a dense table index (little-endian bit pattern).
    pub fn from_index(d: usize, index: usize) -> Self {
        debug_assert!(d <= 64 && (index as u128) <= width_mask(d));
        Coalition::empty(d).with_bits_unchecked(index as u128)
    }

    pub fn singleton(d: usize, player: usize) -> Self {
        assert!(player < d);
        Coalition::empty(d).with_bits_unchecked(1u128 << player)
    }

    fn with_bits_unchecked(mut self, bits: u128) -> Self {
        self.bits = bits;
        self
    }

    pub fn d(&self) -> usize {
        self.d as usize
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    /// Dense table index. Only meaningful for `d <= 64`.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == width_mask(self.d())
    }

    pub fn contains(&self, player: usize) -> bool {
        player < 128 && self.bits >> player & 1 == 1
    }

    pub fn with(self, player: usize) -> Self {
        assert!(player < self.d());
        self.with_bits_unchecked(self.bits | 1u128 << player)
    }

    pub fn without(self, player: usize) -> Self {
        self.with_bits_unchecked(self.bits & !(1u128 << player))
    }

    /// `[d] \ S`.
    pub fn complement(&self) -> Self {
        self.with_bits_unchecked(!self.bits & width_mask(self.d()))
    }

    pub fn is_subset_of(&self, other: &Coalition) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn intersection_len(&self, other: &Coalition) -> usize {
        (self.bits & other.bits).count_ones() as usize
    }

    /// Walsh character `χ_T(S) = (-1)^{|S ∩ T|}` with `self` as `T`.
    #[inline]
    pub fn chi(&self, s: &Coalition) -> f64 {
        if (self.bits & s.bits).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Unanimity indicator `u_T(S) = 1[T ⊆ S]` with `self` as `T`.
    #[inline]
    pub fn unanimity(&self, s: &Coalition) -> f64 {
        if self.is_subset_of(s) {
            1.0
        } else {
            0.0
        }
    }

    /// 0-based members in ascending order.
    pub fn players(&self) -> impl Iterator<Item = usize> {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let p = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(p)
            }
        })
    }

    /// Every subset of this coalition, the empty set first.
    pub fn subsets(&self) -> impl Iterator<Item = Coalition> {
        let base = *self;
        let full = self.bits;
        let mut next = Some(0u128);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(base.with_bits_unchecked(cur))
        })
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.players().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", p + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.d())
    }
}

/// All coalitions of exactly `k` players out of `d`, in increasing bit order.
pub fn subsets_of_size(d: usize, k: usize) -> impl Iterator<Item = Coalition> {
    let first = if k == 0 {
        Some(0u128)
    } else if k > d {
        None
    } else {
        Some(width_mask(k))
    };
    let limit = width_mask(d);
    let mut next = first;
    std::iter::from_fn(move || {
        let cur = next?;
        // Gosper's hack
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            cur.checked_add(c).and_then(|r| {
                let n = (((r ^ cur) >> 2) / c) | r;
                (n & !limit == 0).then_some(n)
            })
        };
        Some(Coalition::empty(d).with_bits_unchecked(cur))
    })
}

/// All coalitions of at most `k` players, ordered by size then bits.
pub fn subsets_up_to(d: usize, k: usize) -> Vec<Coalition> {
    (0..=k.min(d)).flat_map(|s| subsets_of_size(d, s)).collect()
}
