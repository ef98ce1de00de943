use std::collections::HashMap;

use super::{Antichain, PiLattice};
use crate::error::{argument, Result};
use crate::TOL;

/// Cumulative values on every node together with their Möbius inverse.
#[derive(Clone, Debug)]
pub struct LatticeValuation<'a> {
    lattice: &'a PiLattice,
    cumulative: Vec<f64>,
    partial: Vec<f64>,
}

impl<'a> LatticeValuation<'a> {
    pub fn lattice(&self) -> &'a PiLattice {
        self.lattice
    }

    /// Cumulative values `I_∩`, indexed like `lattice.nodes()`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Partial terms `I_∂`, indexed like `lattice.nodes()`.
    pub fn partial(&self) -> &[f64] {
        &self.partial
    }

    pub fn cumulative_at(&self, node: &Antichain) -> Option<f64> {
        self.lattice.index_of(node).map(|i| self.cumulative[i])
    }

    pub fn partial_at(&self, node: &Antichain) -> Option<f64> {
        self.lattice.index_of(node).map(|i| self.partial[i])
    }

    /// `(node, cumulative, partial)` in topological order.
    pub fn rows(&self) -> impl Iterator<Item = (&'a Antichain, f64, f64)> + '_ {
        self.lattice
            .nodes()
            .iter()
            .zip(self.cumulative.iter().zip(&self.partial))
            .map(|(a, (c, p))| (a, *c, *p))
    }

    /// Largest `|cumulate(partial) − cumulative|` over all nodes.
    pub fn round_trip_error(&self) -> f64 {
        let back = cumulate(self.lattice, &self.partial).expect("lengths match");
        back.iter()
            .zip(&self.cumulative)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Partial terms from cumulative values: in topological order,
/// `partial(x) = cumulative(x) − Σ_{y ≺ x} partial(y)`.
pub fn moebius_invert<'a>(lattice: &'a PiLattice, cumulative: &[f64]) -> Result<LatticeValuation<'a>> {
    if cumulative.len() != lattice.len() {
        return Err(argument(format!(
            "valuation has {} values for {} nodes",
            cumulative.len(),
            lattice.len()
        )));
    }
    if let Some(i) = cumulative.iter().position(|v| !v.is_finite()) {
        return Err(argument(format!("value at {} is not finite", lattice.node(i))));
    }
    let mut partial = vec![0.0; lattice.len()];
    for j in 0..lattice.len() {
        let mut below = 0.0;
        lattice.for_each_below(j, |i| below += partial[i]);
        partial[j] = cumulative[j] - below;
    }
    Ok(LatticeValuation {
        lattice,
        cumulative: cumulative.to_vec(),
        partial,
    })
}

/// [`moebius_invert`] for a valuation keyed by antichain; every node must be
/// present.
pub fn moebius_invert_map<'a>(
    lattice: &'a PiLattice,
    cumulative: &HashMap<Antichain, f64>,
) -> Result<LatticeValuation<'a>> {
    let values = lattice
        .nodes()
        .iter()
        .map(|a| {
            cumulative
                .get(a)
                .copied()
                .ok_or_else(|| argument(format!("no value for node {a}")))
        })
        .collect::<Result<Vec<_>>>()?;
    moebius_invert(lattice, &values)
}

/// Sums partial terms over down-sets.
pub fn cumulate(lattice: &PiLattice, partial: &[f64]) -> Result<Vec<f64>> {
    if partial.len() != lattice.len() {
        return Err(argument("partial valuation does not cover the lattice"));
    }
    Ok((0..lattice.len())
        .map(|j| {
            let mut total = partial[j];
            lattice.for_each_below(j, |i| total += partial[i]);
            total
        })
        .collect())
}

/// Pairs `(a, b)` with `a ≺ b` but `cumulative(a) > cumulative(b) + TOL`.
pub fn check_monotone(lattice: &PiLattice, cumulative: &[f64]) -> Vec<(usize, usize)> {
    let mut violations = Vec::new();
    for j in 0..lattice.len().min(cumulative.len()) {
        lattice.for_each_below(j, |i| {
            if cumulative[i] > cumulative[j] + TOL {
                violations.push((i, j));
            }
        });
    }
    violations
}
