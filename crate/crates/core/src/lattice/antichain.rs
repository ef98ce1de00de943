use std::cmp::Ordering;
use std::fmt;

use crate::error::{argument, Result};

/// Largest participant count an antichain may range over. The text form
/// writes each participant as a single digit.
pub const MAX_PARTICIPANTS: usize = 6;

/// A subset of participants `{1..n}` stored as a bitmask (bit `i-1` for
/// participant `i`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    /// Builds a subset from 1-based participant numbers.
    pub fn from_members(members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut bits = 0u32;
        for m in members {
            if m == 0 || m > MAX_PARTICIPANTS {
                return Err(argument(format!("participant {m} out of range")));
            }
            bits |= 1 << (m - 1);
        }
        Ok(Subset(bits))
    }

    /// All participants `{1..n}`.
    pub fn full(n: usize) -> Self {
        Subset((1u32 << n) - 1)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, participant: usize) -> bool {
        (1..=32).contains(&participant) && self.0 >> (participant - 1) & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    /// 1-based members in ascending order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| self.0 >> i & 1 == 1).map(|i| i + 1)
    }

    /// Largest member, or 0 for the empty set.
    pub fn max_member(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// Ordering used for printing: by size, then lexicographically by members.
    fn display_cmp(&self, other: &Subset) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.members().cmp(other.members()))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for m in self.members() {
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

/// A nonempty family of nonempty, pairwise incomparable subsets of `{1..n}`.
///
/// Sets are kept sorted by bitmask, which makes equality and hashing
/// structural. Printing orders sets by size and then lexicographically, so
/// `{3}{12}` prints the way it is conventionally written.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Antichain {
    n: usize,
    sets: Vec<Subset>,
}

impl Antichain {
    pub fn new(n: usize, sets: impl IntoIterator<Item = Subset>) -> Result<Self> {
        check_n(n)?;
        let mut sets: Vec<Subset> = sets.into_iter().collect();
        sets.sort_unstable();
        sets.dedup();
        if sets.is_empty() {
            return Err(argument("an antichain needs at least one set"));
        }
        for s in &sets {
            if s.is_empty() {
                return Err(argument("antichain sets must be nonempty"));
            }
            if s.max_member() > n {
                return Err(argument(format!("set {s} is not a subset of {{1..{n}}}")));
            }
        }
        for (i, a) in sets.iter().enumerate() {
            for b in &sets[i + 1..] {
                if a.is_subset_of(*b) || b.is_subset_of(*a) {
                    return Err(argument(format!("sets {a} and {b} are comparable")));
                }
            }
        }
        Ok(Self { n, sets })
    }

    /// Builds from 1-based member lists, e.g. `[[1], [2, 3]]`.
    pub fn from_members<I, J>(n: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = usize>,
    {
        let sets = sets
            .into_iter()
            .map(Subset::from_members)
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, sets)
    }

    /// Internal constructor for already canonical, already valid input.
    pub(crate) fn from_canonical(n: usize, sets: Vec<Subset>) -> Self {
        debug_assert!(sets.windows(2).all(|w| w[0] < w[1]));
        Self { n, sets }
    }

    /// `{1}{2}…{n}`, the least element of the lattice.
    pub fn bottom(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self::from_canonical(
            n,
            (0..n).map(|i| Subset(1 << i)).collect(),
        ))
    }

    /// `{1…n}`, the greatest element of the lattice.
    pub fn top(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self::from_canonical(n, vec![Subset::full(n)]))
    }

    /// Parses the text form, e.g. `{1}{23}`. Sets may appear in any order.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        let mut sets = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('{') else {
                return Err(argument(format!("malformed antichain `{text}`")));
            };
            let Some(close) = body.find('}') else {
                return Err(argument(format!("unterminated set in `{text}`")));
            };
            let members = body[..close]
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| argument(format!("bad participant `{c}` in `{text}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if members.is_empty() {
                return Err(argument(format!("empty set in `{text}`")));
            }
            sets.push(Subset::from_members(members)?);
            rest = &body[close + 1..];
        }
        Self::new(n, sets)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sets in canonical (bitmask) order.
    pub fn sets(&self) -> &[Subset] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Redundancy-lattice order: `self ≼ other` iff every set of `other` contains
    /// some set of `self`.
    pub fn leq(&self, other: &Antichain) -> Result<bool> {
        if self.n != other.n {
            return Err(argument(format!(
                "antichains over {} and {} participants are not comparable",
                self.n, other.n
            )));
        }
        Ok(other
            .sets
            .iter()
            .all(|b| self.sets.iter().any(|a| a.is_subset_of(*b))))
    }

    /// True iff some set of the antichain is contained in `subset`, i.e.
    /// `subset` lies in the up-closure.
    pub fn covers(&self, subset: Subset) -> bool {
        self.sets.iter().any(|a| a.is_subset_of(subset))
    }

    /// Up-closure as a bitmask over the `2^n` subsets (bit `b` ↔ subset `b`).
    pub(crate) fn up_closure_bits(&self) -> u64 {
        let mut bits = 0u64;
        for mask in 1..(1u32 << self.n) {
            if self.covers(Subset(mask)) {
                bits |= 1 << mask;
            }
        }
        bits
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sets = self.sets.clone();
        sets.sort_by(Subset::display_cmp);
        for s in sets {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PARTICIPANTS {
        Err(argument(format!(
            "participant count {n} outside 1..={MAX_PARTICIPANTS}"
        )))
    } else {
        Ok(())
    }
}

/// Inclusion-minimal members of a family of subsets of `{1..n}`.
pub fn minimal_elements(n: usize, family: &[Subset]) -> Result<Antichain> {
    if family.is_empty() {
        return Err(argument("minimal elements of an empty family"));
    }
    let minimal: Vec<Subset> = family
        .iter()
        .copied()
        .filter(|s| !family.iter().any(|t| t.is_subset_of(*s) && t != s))
        .collect();
    Antichain::new(n, minimal)
}
