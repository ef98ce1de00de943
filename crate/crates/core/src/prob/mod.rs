//! Finite joint distributions over named discrete variables and the Shannon
//! quantities derived from them. All information is measured in bits.

mod product;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{argument, Error, Result};
use crate::TOL;

pub use product::{product, ProductDistribution};

/// Masses at or below this value are treated as exact zeros in entropy sums.
pub const ZERO_MASS: f64 = 1e-12;

/// Largest number of dense outcomes a single distribution may enumerate.
pub const MAX_OUTCOMES: usize = 1 << 24;

/// An outcome tuple, one coordinate per variable.
pub type Outcome = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VariableSpec {
    pub name: String,
    pub cardinality: usize,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, cardinality: usize) -> Self {
        Self {
            name: name.into(),
            cardinality,
        }
    }
}

/// A probability mass function over the product alphabet of its variables.
///
/// Only outcomes with positive mass are stored, sorted lexicographically, so
/// that every derived quantity is summed in the same order on every run.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    variables: Vec<VariableSpec>,
    mass: Vec<(Outcome, f64)>,
}

impl JointDistribution {
    /// Builds a distribution from (outcome, probability) entries. Repeated
    /// outcomes are accumulated, so pushing forward a table of equally likely
    /// "worlds" works directly. The total must be 1 within [`TOL`].
    pub fn new(
        variables: Vec<VariableSpec>,
        entries: impl IntoIterator<Item = (Outcome, f64)>,
    ) -> Result<Self> {
        Self::build(variables, entries, TOL, false)
    }

    /// Like [`JointDistribution::new`] but accepts a total within `slack` of 1
    /// and rescales it to exactly 1.
    pub fn normalized(
        variables: Vec<VariableSpec>,
        entries: impl IntoIterator<Item = (Outcome, f64)>,
        slack: f64,
    ) -> Result<Self> {
        Self::build(variables, entries, slack, true)
    }

    /// Enumerates every outcome of the product alphabet and assigns `f(outcome)`.
    pub fn from_fn(variables: Vec<VariableSpec>, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let cards: Vec<usize> = variables.iter().map(|v| v.cardinality).collect();
        let outcomes = all_outcomes(&cards)?;
        let entries: Vec<_> = outcomes
            .into_iter()
            .map(|o| {
                let p = f(&o);
                (o, p)
            })
            .collect();
        Self::new(variables, entries)
    }

    /// The uniform distribution on the full product alphabet.
    pub fn uniform(variables: Vec<VariableSpec>) -> Result<Self> {
        let total: usize = variables
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.cardinality))
            .filter(|&t| t <= MAX_OUTCOMES)
            .ok_or_else(|| Error::Capacity("product alphabet too large".into()))?;
        let p = 1.0 / total as f64;
        Self::from_fn(variables, |_| p)
    }

    fn build(
        variables: Vec<VariableSpec>,
        entries: impl IntoIterator<Item = (Outcome, f64)>,
        slack: f64,
        rescale: bool,
    ) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::Distribution("no variables".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &variables {
            if v.cardinality == 0 {
                return Err(Error::Distribution(format!(
                    "variable `{}` has cardinality 0",
                    v.name
                )));
            }
            if v.name.is_empty() {
                return Err(Error::Distribution("empty variable name".into()));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(Error::Distribution(format!(
                    "duplicate variable name `{}`",
                    v.name
                )));
            }
        }

        let mut table: BTreeMap<Outcome, f64> = BTreeMap::new();
        for (outcome, p) in entries {
            if outcome.len() != variables.len() {
                return Err(Error::Distribution(format!(
                    "outcome {outcome:?} has arity {} but there are {} variables",
                    outcome.len(),
                    variables.len()
                )));
            }
            for (x, v) in outcome.iter().zip(&variables) {
                if *x >= v.cardinality {
                    return Err(Error::Distribution(format!(
                        "outcome {outcome:?}: value {x} out of range for `{}` (cardinality {})",
                        v.name, v.cardinality
                    )));
                }
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Distribution(format!(
                    "outcome {outcome:?} has invalid probability {p}"
                )));
            }
            if p > 0.0 {
                *table.entry(outcome).or_insert(0.0) += p;
            }
        }

        let total: f64 = table.values().sum();
        if (total - 1.0).abs() > slack {
            return Err(Error::Distribution(format!(
                "probabilities sum to {total}, not 1 (tolerance {slack:e})"
            )));
        }
        let scale = if rescale { 1.0 / total } else { 1.0 };
        let mass = table.into_iter().map(|(o, p)| (o, p * scale)).collect();
        Ok(Self { variables, mass })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    /// Positive-mass outcomes in lexicographic order.
    pub fn support(&self) -> &[(Outcome, f64)] {
        &self.mass
    }

    pub fn probability(&self, outcome: &[usize]) -> f64 {
        self.mass
            .binary_search_by(|(o, _)| o.as_slice().cmp(outcome))
            .map(|i| self.mass[i].1)
            .unwrap_or(0.0)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Resolves names to column indices, deduplicated and in this
    /// distribution's variable order.
    pub fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut idx = names
            .iter()
            .map(|n| self.index_of(n))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    /// Marginal table over the given columns, keyed by the projected tuple.
    pub fn project(&self, columns: &[usize]) -> BTreeMap<Outcome, f64> {
        let mut table = BTreeMap::new();
        for (o, p) in &self.mass {
            let key: Outcome = columns.iter().map(|&c| o[c]).collect();
            *table.entry(key).or_insert(0.0) += *p;
        }
        table
    }

    /// Joint table of several name groups, keyed by one tuple per group.
    /// Groups may overlap; an overlapping variable is simply repeated.
    pub fn tabulate(&self, groups: &[&[&str]]) -> Result<BTreeMap<Vec<Outcome>, f64>> {
        let cols = groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|n| self.index_of(n))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut table = BTreeMap::new();
        for (o, p) in &self.mass {
            let key: Vec<Outcome> = cols
                .iter()
                .map(|c| c.iter().map(|&i| o[i]).collect())
                .collect();
            *table.entry(key).or_insert(0.0) += *p;
        }
        Ok(table)
    }

    /// Returns a copy with every variable renamed through `f`.
    pub fn renamed(&self, f: impl Fn(&str) -> String) -> Result<Self> {
        let variables = self
            .variables
            .iter()
            .map(|v| VariableSpec::new(f(&v.name), v.cardinality))
            .collect();
        Self::build(variables, self.mass.iter().cloned(), TOL, false)
    }

    fn entropy_of_columns(&self, columns: &[usize]) -> f64 {
        if columns.is_empty() {
            return 0.0;
        }
        if columns.len() == self.variables.len() {
            return shannon(self.mass.iter().map(|(_, p)| *p));
        }
        shannon(self.project(columns).into_values())
    }
}

impl fmt::Display for JointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.variables.iter().map(|v| v.name.as_str()).collect();
        writeln!(f, "({})", names.join(","))?;
        for (o, p) in &self.mass {
            writeln!(f, "  {o:?}: {p}")?;
        }
        Ok(())
    }
}

/// Shannon entropy in bits of a list of masses, ignoring masses at or below
/// [`ZERO_MASS`].
pub fn shannon(masses: impl IntoIterator<Item = f64>) -> f64 {
    masses
        .into_iter()
        .filter(|&p| p > ZERO_MASS)
        .map(|p| -p * p.log2())
        .sum()
}

/// Clamps a quantity that must be nonnegative. Rounding noise down to `-TOL`
/// becomes 0; anything more negative is an internal inconsistency.
pub fn clamp_nonnegative(value: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -TOL {
        Ok(0.0)
    } else {
        Err(Error::Consistency(format!("{what} evaluated to {value}")))
    }
}

/// All outcome tuples of a product alphabet in lexicographic order.
pub fn all_outcomes(cardinalities: &[usize]) -> Result<Vec<Outcome>> {
    let total = cardinalities
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .filter(|&t| t <= MAX_OUTCOMES)
        .ok_or_else(|| Error::Capacity("product alphabet too large".into()))?;
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0usize; cardinalities.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for pos in (0..cur.len()).rev() {
            cur[pos] += 1;
            if cur[pos] < cardinalities[pos] {
                break;
            }
            cur[pos] = 0;
        }
    }
    Ok(out)
}

fn require_nonempty(names: &[&str], role: &str) -> Result<()> {
    if names.is_empty() {
        Err(argument(format!("{role} variable set is empty")))
    } else {
        Ok(())
    }
}

fn require_disjoint(groups: &[&[&str]]) -> Result<()> {
    for (i, a) in groups.iter().enumerate() {
        for b in &groups[i + 1..] {
            if let Some(shared) = a.iter().find(|n| b.contains(n)) {
                return Err(argument(format!(
                    "variable `{shared}` appears in more than one argument set"
                )));
            }
        }
    }
    Ok(())
}

fn union<'a>(groups: &[&[&'a str]]) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for g in groups {
        for n in g.iter() {
            if !out.contains(n) {
                out.push(n);
            }
        }
    }
    out
}

/// Shannon quantities over named variable sets.
///
/// Implementors supply marginals and joint entropies; the remaining quantities
/// are derived. Every method is a pure function of the distribution.
pub trait Entropic {
    fn variable(&self, name: &str) -> Option<&VariableSpec>;

    fn variable_names(&self) -> Vec<&str>;

    /// Marginal distribution on `keep` (a nonempty set of names).
    fn marginal(&self, keep: &[&str]) -> Result<JointDistribution>;

    /// Joint entropy of a possibly empty name set; `H(∅) = 0`.
    fn joint_entropy(&self, vars: &[&str]) -> Result<f64>;

    fn entropy(&self, vars: &[&str]) -> Result<f64> {
        require_nonempty(vars, "entropy")?;
        self.joint_entropy(vars)
    }

    /// `H(target | given)`; an empty `given` yields the plain entropy.
    fn conditional_entropy(&self, target: &[&str], given: &[&str]) -> Result<f64> {
        require_nonempty(target, "target")?;
        require_disjoint(&[target, given])?;
        let joint = self.joint_entropy(&union(&[target, given]))?;
        clamp_nonnegative(joint - self.joint_entropy(given)?, "conditional entropy")
    }

    fn mutual_information(&self, left: &[&str], right: &[&str]) -> Result<f64> {
        require_nonempty(left, "left")?;
        require_nonempty(right, "right")?;
        require_disjoint(&[left, right])?;
        let value = self.joint_entropy(left)? + self.joint_entropy(right)?
            - self.joint_entropy(&union(&[left, right]))?;
        clamp_nonnegative(value, "mutual information")
    }

    fn conditional_mutual_information(
        &self,
        left: &[&str],
        right: &[&str],
        given: &[&str],
    ) -> Result<f64> {
        require_nonempty(left, "left")?;
        require_nonempty(right, "right")?;
        require_disjoint(&[left, right, given])?;
        let value = self.joint_entropy(&union(&[left, given]))?
            + self.joint_entropy(&union(&[right, given]))?
            - self.joint_entropy(&union(&[left, right, given]))?
            - self.joint_entropy(given)?;
        clamp_nonnegative(value, "conditional mutual information")
    }

    /// Co-information `I(s;x) − I(s;x|y)`; may be negative.
    fn coinformation(&self, s: &[&str], x: &[&str], y: &[&str]) -> Result<f64> {
        require_nonempty(y, "conditioning")?;
        require_disjoint(&[s, x, y])?;
        Ok(self.mutual_information(s, x)? - self.conditional_mutual_information(s, x, y)?)
    }

    fn is_function_of(&self, target: &[&str], given: &[&str]) -> Result<bool> {
        Ok(self.conditional_entropy(target, given)? <= TOL)
    }
}

impl Entropic for JointDistribution {
    fn variable(&self, name: &str) -> Option<&VariableSpec> {
        self.variables.iter().find(|v| v.name == name)
    }

    fn variable_names(&self) -> Vec<&str> {
        self.variables.iter().map(|v| v.name.as_str()).collect()
    }

    fn marginal(&self, keep: &[&str]) -> Result<JointDistribution> {
        require_nonempty(keep, "kept")?;
        let cols = self.indices(keep)?;
        let variables = cols.iter().map(|&c| self.variables[c].clone()).collect();
        let mass = self.project(&cols).into_iter().collect();
        Ok(JointDistribution { variables, mass })
    }

    fn joint_entropy(&self, vars: &[&str]) -> Result<f64> {
        let cols = self.indices(vars)?;
        Ok(self.entropy_of_columns(&cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(names: &[&str]) -> Vec<VariableSpec> {
        names.iter().map(|n| VariableSpec::new(*n, 2)).collect()
    }

    fn xor_gate() -> JointDistribution {
        JointDistribution::from_fn(bits(&["S", "X1", "X2"]), |o| {
            if o[0] == o[1] ^ o[2] {
                0.25
            } else {
                0.0
            }
        })
        .unwrap()
    }

    /// Example-1 world table enumerated by hand: (Y1, Y2, Y3, S) uniform.
    fn cyclic_by_enumeration() -> JointDistribution {
        let vars = vec![
            VariableSpec::new("S", 2),
            VariableSpec::new("A", 4),
            VariableSpec::new("B", 4),
            VariableSpec::new("C", 4),
        ];
        let mut worlds = Vec::new();
        for w in 0..16usize {
            let (y1, y2, y3, s) = (w >> 3 & 1, w >> 2 & 1, w >> 1 & 1, w & 1);
            let a = 2 * y1 + (y2 ^ s);
            let b = 2 * y2 + (y3 ^ s);
            let c = 2 * y3 + (y1 ^ s);
            worlds.push((vec![s, a, b, c], 1.0 / 16.0));
        }
        JointDistribution::new(vars, worlds).unwrap()
    }

    #[test]
    fn marginalize_all_is_identity() {
        let d = xor_gate();
        assert_eq!(d.marginal(&["X2", "S", "X1"]).unwrap(), d);
    }

    #[test]
    fn marginalize_uniform_pair() {
        let d = JointDistribution::uniform(bits(&["X", "Y"])).unwrap();
        let m = d.marginal(&["Y"]).unwrap();
        assert_eq!(m.support(), &[(vec![0], 0.5), (vec![1], 0.5)]);
    }

    #[test]
    fn marginalize_cyclic_share_is_uniform_on_four() {
        let d = cyclic_by_enumeration();
        let a = d.marginal(&["A"]).unwrap();
        assert_eq!(a.support().len(), 4);
        for (_, p) in a.support() {
            assert_eq!(*p, 0.25);
        }
        assert!((d.entropy(&["A"]).unwrap() - 2.0).abs() < TOL);
        assert!((d.entropy(&["S"]).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn unknown_names_are_rejected() {
        let d = xor_gate();
        assert!(matches!(d.marginal(&["Z"]), Err(Error::UnknownVariable(_))));
        assert!(matches!(d.entropy(&["Z"]), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn conditional_entropies() {
        let d = cyclic_by_enumeration();
        assert!(d.conditional_entropy(&["A"], &["A"]).is_err());
        assert!(d.conditional_entropy(&["S"], &["A", "B"]).unwrap().abs() < TOL);
        assert!((d.conditional_entropy(&["S"], &["A"]).unwrap() - 1.0).abs() < TOL);
        assert!((d.conditional_entropy(&["S"], &[]).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn function_of_itself_has_zero_conditional_entropy() {
        let vars = vec![VariableSpec::new("X", 3), VariableSpec::new("Xc", 3)];
        let d = JointDistribution::from_fn(vars, |o| if o[0] == o[1] { 1.0 / 3.0 } else { 0.0 })
            .unwrap();
        assert!(d.conditional_entropy(&["X"], &["Xc"]).unwrap().abs() < TOL);
        assert!(d.is_function_of(&["X"], &["Xc"]).unwrap());
        assert!(d.conditional_mutual_information(&["X"], &["Xc"], &[]).unwrap() > 1.5);
    }

    #[test]
    fn xor_gate_information() {
        let d = xor_gate();
        assert!(d.mutual_information(&["S"], &["X1"]).unwrap().abs() < TOL);
        assert!(
            (d.conditional_mutual_information(&["S"], &["X1"], &["X2"]).unwrap() - 1.0).abs() < TOL
        );
        assert!((d.coinformation(&["S"], &["X1"], &["X2"]).unwrap() + 1.0).abs() < TOL);
    }

    #[test]
    fn coinformation_of_duplicated_bit_is_one() {
        let d = JointDistribution::new(
            bits(&["S", "X", "Y"]),
            vec![(vec![0, 0, 0], 0.5), (vec![1, 1, 1], 0.5)],
        )
        .unwrap();
        assert!((d.coinformation(&["S"], &["X"], &["Y"]).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn independent_triple_is_silent() {
        let d = JointDistribution::uniform(bits(&["S", "X", "Y"])).unwrap();
        assert_eq!(d.mutual_information(&["X"], &["Y"]).unwrap(), 0.0);
        assert!(!d.is_function_of(&["X"], &["Y"]).unwrap());
        assert!(d.coinformation(&["S"], &["X"], &["Y"]).unwrap().abs() < TOL);
        assert!(d
            .conditional_mutual_information(&["S"], &["X"], &["Y"])
            .unwrap()
            .abs()
            < TOL);
    }

    #[test]
    fn overlapping_sets_are_argument_errors() {
        let d = xor_gate();
        assert!(matches!(
            d.mutual_information(&["S", "X1"], &["X1"]),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            d.conditional_mutual_information(&["S"], &["X1"], &["S"]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn invalid_tables_are_rejected() {
        let v = bits(&["X"]);
        assert!(JointDistribution::new(v.clone(), vec![(vec![0], 0.4)]).is_err());
        assert!(JointDistribution::new(v.clone(), vec![(vec![2], 1.0)]).is_err());
        assert!(JointDistribution::new(v.clone(), vec![(vec![0, 1], 1.0)]).is_err());
        assert!(JointDistribution::new(v.clone(), vec![(vec![0], -0.5), (vec![1], 1.5)]).is_err());
        let dup = vec![VariableSpec::new("X", 2), VariableSpec::new("X", 2)];
        assert!(JointDistribution::uniform(dup).is_err());
        let d = JointDistribution::normalized(v, vec![(vec![0], 0.5), (vec![1], 0.5000005)], 1e-6)
            .unwrap();
        let total: f64 = d.support().iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tabulate_repeats_overlapping_groups() {
        let d = xor_gate();
        let t = d.tabulate(&[&["X1"], &["X1", "X2"]]).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t[&vec![vec![1], vec![1, 0]]], 0.25);
    }
}
