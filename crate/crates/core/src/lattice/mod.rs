//! Antichains over `{1..n}`, the partial information lattice they form, and
//! Möbius inversion of valuations on it.

mod antichain;
mod moebius;

use std::cmp::Reverse;
use std::collections::HashMap;

use crate::error::{argument, Error, Result};

pub use antichain::{minimal_elements, Antichain, Subset, MAX_PARTICIPANTS};
pub use moebius::{check_monotone, cumulate, moebius_invert, moebius_invert_map, LatticeValuation};

/// Largest `n` for which the full lattice is built (7,579 nodes at `n = 5`).
pub const MAX_LATTICE_N: usize = 5;

/// Strict down-sets are stored explicitly up to this `n`.
const MATERIALIZE_UP_TO: usize = 4;

/// All antichains of nonempty subsets of `{1..n}` under the redundancy
/// order.
///
/// Nodes are stored in a linear extension of the order (bottom first):
/// `a ≼ b` iff the up-closure of `b` is contained in that of `a`, so sorting
/// by decreasing up-closure size never puts a node before something below it.
#[derive(Debug)]
pub struct PiLattice {
    n: usize,
    nodes: Vec<Antichain>,
    index: HashMap<Antichain, usize>,
    up: Vec<u64>,
    below: Option<Vec<Vec<u32>>>,
}

/// Builds the lattice for `n` participants.
pub fn enumerate_antichains(n: usize) -> Result<PiLattice> {
    PiLattice::new(n)
}

impl PiLattice {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_LATTICE_N {
            return Err(Error::Capacity(format!(
                "lattice supports 1 <= n <= {MAX_LATTICE_N}, got {n}"
            )));
        }

        // Depth-first extension over subsets in decreasing cardinality; a
        // later subset can only conflict by being contained in a chosen one.
        let mut subsets: Vec<Subset> = (1..(1u32 << n)).map(Subset::from_bits).collect();
        subsets.sort_by_key(|s| (Reverse(s.len()), s.bits()));
        let mut found = Vec::new();
        let mut current = Vec::new();
        extend(&subsets, 0, &mut current, &mut found);

        let mut nodes: Vec<(u64, Antichain)> = found
            .into_iter()
            .map(|mut sets| {
                sets.sort_unstable();
                let a = Antichain::from_canonical(n, sets);
                (a.up_closure_bits(), a)
            })
            .collect();
        nodes.sort_by(|(ua, a), (ub, b)| {
            ub.count_ones()
                .cmp(&ua.count_ones())
                .then_with(|| a.cmp(b))
        });
        let (up, nodes): (Vec<u64>, Vec<Antichain>) = nodes.into_iter().unzip();
        let index = nodes.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();

        let mut lattice = Self {
            n,
            nodes,
            index,
            up,
            below: None,
        };
        if n <= MATERIALIZE_UP_TO {
            let below = (0..lattice.len())
                .map(|j| lattice.scan_below(j).map(|i| i as u32).collect())
                .collect();
            lattice.below = Some(below);
        }
        Ok(lattice)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in bottom-up topological order.
    pub fn nodes(&self) -> &[Antichain] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Antichain {
        &self.nodes[i]
    }

    pub fn index_of(&self, node: &Antichain) -> Option<usize> {
        self.index.get(node).copied()
    }

    pub fn require_index(&self, node: &Antichain) -> Result<usize> {
        self.index_of(node)
            .ok_or_else(|| argument(format!("{node} is not a node of the n={} lattice", self.n)))
    }

    /// `nodes[i] ≼ nodes[j]`.
    pub fn leq_index(&self, i: usize, j: usize) -> bool {
        self.up[j] & !self.up[i] == 0
    }

    pub fn bottom_index(&self) -> usize {
        0
    }

    pub fn top_index(&self) -> usize {
        self.nodes.len() - 1
    }

    fn scan_below(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..j).filter(move |&i| self.leq_index(i, j))
    }

    /// Indices strictly below node `j`, in topological order.
    pub fn strictly_below(&self, j: usize) -> Vec<usize> {
        match &self.below {
            Some(below) => below[j].iter().map(|&i| i as usize).collect(),
            None => self.scan_below(j).collect(),
        }
    }

    pub(crate) fn for_each_below(&self, j: usize, mut f: impl FnMut(usize)) {
        match &self.below {
            Some(below) => below[j].iter().for_each(|&i| f(i as usize)),
            None => self.scan_below(j).for_each(f),
        }
    }

    /// All nodes `≼ node`, including `node`, in topological order.
    pub fn down_set(&self, node: &Antichain) -> Result<Vec<&Antichain>> {
        let j = self.require_index(node)?;
        let mut out: Vec<&Antichain> = self
            .strictly_below(j)
            .into_iter()
            .map(|i| &self.nodes[i])
            .collect();
        out.push(&self.nodes[j]);
        Ok(out)
    }

    /// Cover relation `(lower, upper)` of the Hasse diagram, sorted.
    pub fn cover_edges(&self) -> Vec<(usize, usize)> {
        let len = self.len();
        let words = len.div_ceil(64);
        let mut below_bits = vec![0u64; len * words];
        for j in 0..len {
            let row = &mut below_bits[j * words..(j + 1) * words];
            self.for_each_below(j, |i| row[i / 64] |= 1 << (i % 64));
        }
        let mut edges = Vec::new();
        let mut covered = vec![0u64; words];
        for j in 0..len {
            covered.iter_mut().for_each(|w| *w = 0);
            let row = &below_bits[j * words..(j + 1) * words];
            for i in 0..j {
                if row[i / 64] >> (i % 64) & 1 == 1 {
                    let sub = &below_bits[i * words..(i + 1) * words];
                    covered.iter_mut().zip(sub).for_each(|(c, s)| *c |= s);
                }
            }
            for i in 0..j {
                if row[i / 64] >> (i % 64) & 1 == 1 && covered[i / 64] >> (i % 64) & 1 == 0 {
                    edges.push((i, j));
                }
            }
        }
        edges
    }
}

fn extend(subsets: &[Subset], start: usize, current: &mut Vec<Subset>, out: &mut Vec<Vec<Subset>>) {
    for (k, &s) in subsets.iter().enumerate().skip(start) {
        if current
            .iter()
            .all(|c| !s.is_subset_of(*c) && !c.is_subset_of(s))
        {
            current.push(s);
            out.push(current.clone());
            extend(subsets, k + 1, current, out);
            current.pop();
        }
    }
}
