//! Bivariate shared information `SI~`: maximize `H_Q(S|X,Y)` over the set
//! `Δ_P` of joint distributions that agree with `P` on the `(S,X)` and `(S,Y)`
//! marginals, then read off the co-information at the optimizer.

mod oracle;
mod solver;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{argument, Result};
use crate::lattice::Antichain;
use crate::measures::Sources;
use crate::prob::{Entropic, JointDistribution, Outcome, VariableSpec};

pub use oracle::{oracle_si_tilde, MAX_ORACLE_POINTS, MAX_ORACLE_BLOCK_DIM};
pub use solver::MAX_ITERATIONS;

/// Default optimality tolerance in bits.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Tolerance on the marginal constraints of a returned point.
pub const FEASIBILITY_TOL: f64 = 1e-7;

/// A target `s` and two sources `x`, `y` over one joint distribution.
///
/// The stored distribution has exactly the variables `s`, then `x`, then `y`.
/// A variable requested in more than one role is duplicated under a primed
/// name, so the three sets are always disjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariateInstance {
    dist: JointDistribution,
    s: Vec<String>,
    x: Vec<String>,
    y: Vec<String>,
}

impl BivariateInstance {
    pub fn new(dist: &dyn Entropic, s: &[&str], x: &[&str], y: &[&str]) -> Result<Self> {
        for (role, names) in [("target", s), ("first source", x), ("second source", y)] {
            if names.is_empty() {
                return Err(argument(format!("{role} variable set is empty")));
            }
        }
        let mut union: Vec<&str> = Vec::new();
        for n in s.iter().chain(x).chain(y) {
            if !union.contains(n) {
                union.push(n);
            }
        }
        let marginal = dist.marginal(&union)?;
        let table = marginal.tabulate(&[s, x, y])?;

        let mut used = BTreeSet::new();
        let mut variables = Vec::new();
        let mut roles: [Vec<String>; 3] = Default::default();
        for (group, role) in [s, x, y].into_iter().zip(roles.iter_mut()) {
            for &n in group {
                let mut name = n.to_string();
                while !used.insert(name.clone()) {
                    name.push('\'');
                }
                let card = marginal.variable(n).expect("marginal keeps names").cardinality;
                variables.push(VariableSpec::new(name.clone(), card));
                role.push(name);
            }
        }
        let entries = table.into_iter().map(|(key, p)| (key.concat(), p));
        let [s, x, y] = roles;
        Ok(Self {
            dist: JointDistribution::new(variables, entries)?,
            s,
            x,
            y,
        })
    }

    pub fn dist(&self) -> &JointDistribution {
        &self.dist
    }

    pub fn s(&self) -> Vec<&str> {
        as_strs(&self.s)
    }

    pub fn x(&self) -> Vec<&str> {
        as_strs(&self.x)
    }

    pub fn y(&self) -> Vec<&str> {
        as_strs(&self.y)
    }

    fn point(&self, q: JointDistribution) -> DeltaPPoint {
        DeltaPPoint {
            q,
            s: self.s.clone(),
            x: self.x.clone(),
            y: self.y.clone(),
        }
    }

    /// The distribution as a dense list of `(s, x, y, p)` over compact value
    /// indices, with the outcome tuples behind each index.
    pub(crate) fn cells(&self) -> Cells {
        let (ls, lx) = (self.s.len(), self.x.len());
        let split = |o: &Outcome| (o[..ls].to_vec(), o[ls..ls + lx].to_vec(), o[ls + lx..].to_vec());
        let mut s_vals = BTreeSet::new();
        let mut x_vals = BTreeSet::new();
        let mut y_vals = BTreeSet::new();
        for (o, _) in self.dist.support() {
            let (a, b, c) = split(o);
            s_vals.insert(a);
            x_vals.insert(b);
            y_vals.insert(c);
        }
        let s_vals: Vec<Outcome> = s_vals.into_iter().collect();
        let x_vals: Vec<Outcome> = x_vals.into_iter().collect();
        let y_vals: Vec<Outcome> = y_vals.into_iter().collect();
        let pos = |vals: &[Outcome], v: &Outcome| vals.binary_search(v).expect("value collected above");
        let entries = self
            .dist
            .support()
            .iter()
            .map(|(o, p)| {
                let (a, b, c) = split(o);
                (pos(&s_vals, &a), pos(&x_vals, &b), pos(&y_vals, &c), *p)
            })
            .collect();
        Cells {
            s_vals,
            x_vals,
            y_vals,
            entries,
        }
    }

    fn point_from_cells(&self, cells: &Cells, masses: impl IntoIterator<Item = (usize, usize, usize, f64)>) -> Result<DeltaPPoint> {
        let entries = masses.into_iter().map(|(s, x, y, p)| {
            let mut o = cells.s_vals[s].clone();
            o.extend_from_slice(&cells.x_vals[x]);
            o.extend_from_slice(&cells.y_vals[y]);
            (o, p)
        });
        let q = JointDistribution::new(self.dist.variables().to_vec(), entries)?;
        Ok(self.point(q))
    }
}

pub(crate) struct Cells {
    pub s_vals: Vec<Outcome>,
    pub x_vals: Vec<Outcome>,
    pub y_vals: Vec<Outcome>,
    pub entries: Vec<(usize, usize, usize, f64)>,
}

/// A distribution `Q` over the instance's variables, meant to lie in `Δ_P`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaPPoint {
    q: JointDistribution,
    s: Vec<String>,
    x: Vec<String>,
    y: Vec<String>,
}

impl DeltaPPoint {
    pub fn q(&self) -> &JointDistribution {
        &self.q
    }

    fn names(&self) -> (Vec<&str>, Vec<&str>, Vec<&str>) {
        (as_strs(&self.s), as_strs(&self.x), as_strs(&self.y))
    }

    /// `H_Q(s | x, y)`.
    pub fn conditional_entropy(&self) -> Result<f64> {
        let (s, x, y) = self.names();
        let xy: Vec<&str> = x.iter().chain(&y).copied().collect();
        self.q.conditional_entropy(&s, &xy)
    }

    /// `I_Q(s;x) − I_Q(s;x|y)`.
    pub fn coinformation(&self) -> Result<f64> {
        let (s, x, y) = self.names();
        self.q.coinformation(&s, &x, &y)
    }

    /// `I_Q(s;y) − I_Q(s;y|x)`; equal to [`Self::coinformation`] up to rounding.
    pub fn coinformation_swapped(&self) -> Result<f64> {
        let (s, x, y) = self.names();
        self.q.coinformation(&s, &y, &x)
    }

    /// Largest absolute deviation of the `(s,x)` and `(s,y)` marginals from
    /// those of `inst`.
    pub fn marginal_residual(&self, inst: &BivariateInstance) -> Result<f64> {
        let (s, x, y) = self.names();
        let mut worst: f64 = 0.0;
        for other in [&x, &y] {
            let a = self.q.tabulate(&[&s, other])?;
            let b = inst.dist.tabulate(&[&s, other])?;
            let keys: BTreeSet<&Vec<Outcome>> = a.keys().chain(b.keys()).collect();
            for k in keys {
                let d = a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0);
                worst = worst.max(d.abs());
            }
        }
        Ok(worst)
    }
}

fn as_strs(names: &[String]) -> Vec<&str> {
    names.iter().map(String::as_str).collect()
}

/// The conditional-independence coupling `Q*(s,x,y) = P(s,x) P(s,y) / P(s)`.
pub fn qstar_product(inst: &BivariateInstance) -> DeltaPPoint {
    let cells = inst.cells();
    let mut sx: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut sy: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut ps = vec![0.0; cells.s_vals.len()];
    for &(s, x, y, p) in &cells.entries {
        *sx.entry((s, x)).or_default() += p;
        *sy.entry((s, y)).or_default() += p;
        ps[s] += p;
    }
    let mut masses = Vec::new();
    for (&(s, x), &a) in &sx {
        for (&(_, y), &b) in sy.range((s, 0)..(s + 1, 0)) {
            masses.push((s, x, y, a * b / ps[s]));
        }
    }
    inst.point_from_cells(&cells, masses)
        .expect("Q* has the total mass of P")
}

/// Maximizes `H_Q(s|x,y)` over `Δ_P` by entropic mirror ascent started at
/// [`qstar_product`].
pub fn optimize_delta_p(inst: &BivariateInstance, tol: f64) -> Result<DeltaPPoint> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(argument(format!("tolerance must be positive, got {tol}")));
    }
    let cells = inst.cells();
    let problem = solver::Problem::new(&cells);
    let q = problem.maximize(tol)?;
    inst.point_from_cells(&cells, problem.entries(&q))
}

/// `SI~(s; x, y)`: the co-information at the optimizer of
/// [`optimize_delta_p`], with values in `[−tol, 0)` clamped to 0.
pub fn si_tilde(inst: &BivariateInstance, tol: f64) -> Result<f64> {
    let q = optimize_delta_p(inst, tol)?;
    let v = q.coinformation()?;
    Ok(if v < 0.0 && v >= -tol { 0.0 } else { v })
}

/// `SI~(target; X_A1, X_A2)` for a two-set lattice node.
pub fn si_tilde_node(
    dist: &dyn Entropic,
    target: &[&str],
    node: &Antichain,
    sources: &Sources,
    tol: f64,
) -> Result<f64> {
    let [a1, a2] = node.sets() else {
        return Err(argument(format!("{node} does not have exactly two sets")));
    };
    if node.n() != sources.n() {
        return Err(argument("node and sources disagree on the number of participants"));
    }
    let inst = BivariateInstance::new(dist, target, &sources.names(*a1), &sources.names(*a2))?;
    si_tilde(&inst, tol)
}
