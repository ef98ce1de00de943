use std::collections::{BTreeMap, BTreeSet};

use super::{Entropic, JointDistribution, Outcome, VariableSpec, MAX_OUTCOMES};
use crate::error::{argument, Error, Result};

/// Independent product of joint distributions.
///
/// Materializes the full product table; see [`ProductDistribution`] for a
/// factored representation whose size stays linear in the number of factors.
pub fn product(dists: &[JointDistribution]) -> Result<JointDistribution> {
    let Some((first, rest)) = dists.split_first() else {
        return Err(argument("product of an empty list"));
    };
    check_names_disjoint(dists)?;
    let size = dists
        .iter()
        .try_fold(1usize, |acc, d| acc.checked_mul(d.support().len()))
        .filter(|&s| s <= MAX_OUTCOMES)
        .ok_or_else(|| Error::Capacity("product support too large".into()))?;

    let mut variables = first.variables().to_vec();
    let mut table: Vec<(Outcome, f64)> = first.support().to_vec();
    table.reserve(size.saturating_sub(table.len()));
    for d in rest {
        variables.extend_from_slice(d.variables());
        let mut next = Vec::with_capacity(table.len() * d.support().len());
        for (o, p) in &table {
            for (o2, p2) in d.support() {
                let mut joined = o.clone();
                joined.extend_from_slice(o2);
                next.push((joined, p * p2));
            }
        }
        table = next;
    }
    JointDistribution::new(variables, table)
}

fn check_names_disjoint(dists: &[JointDistribution]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for d in dists {
        for v in d.variables() {
            if !seen.insert(v.name.as_str()) {
                return Err(argument(format!(
                    "variable `{}` occurs in more than one factor",
                    v.name
                )));
            }
        }
    }
    Ok(())
}

/// Mutually independent factors kept apart.
///
/// Entropies add over factors, so joint quantities of combinations of many
/// schemes stay cheap even when the full product table would be enormous.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductDistribution {
    factors: Vec<JointDistribution>,
    owner: BTreeMap<String, usize>,
}

impl ProductDistribution {
    pub fn new(factors: Vec<JointDistribution>) -> Result<Self> {
        if factors.is_empty() {
            return Err(argument("product of an empty list"));
        }
        check_names_disjoint(&factors)?;
        let owner = factors
            .iter()
            .enumerate()
            .flat_map(|(i, d)| d.variables().iter().map(move |v| (v.name.clone(), i)))
            .collect();
        Ok(Self { factors, owner })
    }

    pub fn factors(&self) -> &[JointDistribution] {
        &self.factors
    }

    /// Splits `names` by owning factor, preserving factor order.
    fn split<'a>(&self, names: &[&'a str]) -> Result<BTreeMap<usize, Vec<&'a str>>> {
        let mut parts: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for n in names {
            let f = *self
                .owner
                .get(*n)
                .ok_or_else(|| Error::UnknownVariable(n.to_string()))?;
            let part = parts.entry(f).or_default();
            if !part.contains(n) {
                part.push(n);
            }
        }
        Ok(parts)
    }

    /// The full product table.
    pub fn flatten(&self) -> Result<JointDistribution> {
        product(&self.factors)
    }
}

impl From<JointDistribution> for ProductDistribution {
    fn from(d: JointDistribution) -> Self {
        Self::new(vec![d]).expect("a single distribution has unique names")
    }
}

impl Entropic for ProductDistribution {
    fn variable(&self, name: &str) -> Option<&VariableSpec> {
        let f = *self.owner.get(name)?;
        self.factors[f].variable(name)
    }

    fn variable_names(&self) -> Vec<&str> {
        self.factors.iter().flat_map(|d| d.variable_names()).collect()
    }

    fn marginal(&self, keep: &[&str]) -> Result<JointDistribution> {
        let parts = self
            .split(keep)?
            .into_iter()
            .map(|(f, names)| self.factors[f].marginal(&names))
            .collect::<Result<Vec<_>>>()?;
        product(&parts)
    }

    fn joint_entropy(&self, vars: &[&str]) -> Result<f64> {
        self.split(vars)?
            .into_iter()
            .map(|(f, names)| self.factors[f].joint_entropy(&names))
            .sum()
    }
}
