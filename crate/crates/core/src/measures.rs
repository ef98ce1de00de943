//! Shared-information measures on the partial information lattice and the
//! secret-sharing-property checks.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{argument, Error, Result};
use crate::lattice::{check_monotone, moebius_invert, Antichain, LatticeValuation, PiLattice, Subset};
use crate::prob::{Entropic, JointDistribution};
use crate::secret::{check_perfect, reference_ssp_value, SchemeCombination, SecretSharingScheme};

/// Checker tolerance, looser than arithmetic tolerance to absorb rounding
/// accumulated across marginalizations.
pub const CHECK_TOL: f64 = 1e-6;

/// Participant `i` (1-based) → the variables making up its share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sources(Vec<Vec<String>>);

impl Sources {
    pub fn new(shares: Vec<Vec<String>>) -> Result<Self> {
        if shares.is_empty() {
            return Err(argument("no sources"));
        }
        let mut seen = BTreeSet::new();
        for (i, share) in shares.iter().enumerate() {
            if share.is_empty() {
                return Err(argument(format!("source {} has no variables", i + 1)));
            }
            for name in share {
                if !seen.insert(name.as_str()) {
                    return Err(argument(format!("variable `{name}` belongs to two sources")));
                }
            }
        }
        Ok(Self(shares))
    }

    /// One source per variable not in `target`, in distribution order.
    pub fn remaining(dist: &dyn Entropic, target: &[&str]) -> Result<Self> {
        Self::new(
            dist.variable_names()
                .into_iter()
                .filter(|v| !target.contains(v))
                .map(|v| vec![v.to_string()])
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn shares(&self) -> &[Vec<String>] {
        &self.0
    }

    /// Variables `X_A` of the participants in `subset`.
    pub fn names(&self, subset: Subset) -> Vec<&str> {
        subset
            .members()
            .filter(|&i| i <= self.0.len())
            .flat_map(|i| self.0[i - 1].iter().map(String::as_str))
            .collect()
    }

    fn check(&self, dist: &dyn Entropic, target: &[&str], node: &Antichain) -> Result<()> {
        if node.n() != self.n() {
            return Err(argument(format!(
                "{node} is over {} participants but there are {} sources",
                node.n(),
                self.n()
            )));
        }
        for name in self.0.iter().flatten() {
            if target.contains(&name.as_str()) {
                return Err(argument(format!("source variable `{name}` is also a target")));
            }
            if dist.variable(name).is_none() {
                return Err(Error::UnknownVariable(name.clone()));
            }
        }
        Ok(())
    }
}

impl From<&SecretSharingScheme> for Sources {
    fn from(s: &SecretSharingScheme) -> Self {
        Sources(s.participants().to_vec())
    }
}

impl From<&SchemeCombination> for Sources {
    fn from(c: &SchemeCombination) -> Self {
        Sources(c.participants().to_vec())
    }
}

/// Minimum over the node's sets of `I(target; X_A)`.
pub fn i_mmi(dist: &dyn Entropic, target: &[&str], node: &Antichain, sources: &Sources) -> Result<f64> {
    sources.check(dist, target, node)?;
    node.sets()
        .iter()
        .map(|a| dist.mutual_information(target, &sources.names(*a)))
        .try_fold(f64::INFINITY, |m, v| v.map(|v| m.min(v)))
}

/// `I_min`: the expected value over `s` of the minimum, over
/// the node's sets, of the specific information
/// `Ispec(s; A) = Σ_a p(a|s) log2(p(s|a) / p(s))`.
pub fn i_min(dist: &dyn Entropic, target: &[&str], node: &Antichain, sources: &Sources) -> Result<f64> {
    sources.check(dist, target, node)?;
    let target_marginal = dist.marginal(target)?;
    let p_s = target_marginal.tabulate(&[target])?;

    let mut best: Vec<f64> = vec![f64::INFINITY; p_s.len()];
    for a in node.sets() {
        let xa = sources.names(*a);
        let mut names = target.to_vec();
        names.extend(&xa);
        let joint: JointDistribution = dist.marginal(&names)?;
        let table = joint.tabulate(&[target, &xa])?;
        let mut p_a = std::collections::BTreeMap::new();
        for (key, p) in &table {
            *p_a.entry(&key[1]).or_insert(0.0) += *p;
        }
        for ((s, ps), slot) in p_s.iter().zip(best.iter_mut()) {
            let ps = *ps;
            let spec: f64 = table
                .range(vec![s[0].clone()]..)
                .take_while(|(key, _)| key[0] == s[0])
                .map(|(key, p_sa)| p_sa / ps * (p_sa / (ps * p_a[&key[1]])).log2())
                .sum();
            *slot = slot.min(spec);
        }
    }
    let value: f64 = p_s.values().zip(&best).map(|(p, m)| p * m).sum();
    Ok(value.max(0.0))
}

/// A measure of shared information.
#[derive(Clone, Copy, Debug)]
pub enum Measure<'a> {
    IMin,
    IMmi,
    /// The value a measure with the combined secret sharing property must
    /// assign; only defined on combinations of perfect schemes.
    Reference(&'a SchemeCombination),
}

impl Measure<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::IMin => "imin",
            Measure::IMmi => "immi",
            Measure::Reference(_) => "reference",
        }
    }

    pub fn value(
        &self,
        dist: &dyn Entropic,
        target: &[&str],
        node: &Antichain,
        sources: &Sources,
    ) -> Result<f64> {
        match self {
            Measure::IMin => i_min(dist, target, node, sources),
            Measure::IMmi => i_mmi(dist, target, node, sources),
            Measure::Reference(comb) => {
                let want: BTreeSet<&str> = comb.secret_names().into_iter().collect();
                let got: BTreeSet<&str> = target.iter().copied().collect();
                if want != got {
                    return Err(argument(
                        "the reference measure is only defined for the combination's own secrets",
                    ));
                }
                reference_ssp_value(comb, node)
            }
        }
    }
}

impl fmt::Display for Measure<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A full-lattice valuation with its monotonicity report.
#[derive(Clone, Debug)]
pub struct Decomposition<'a> {
    pub valuation: LatticeValuation<'a>,
    /// Comparable pairs `(lower, upper)` whose values decrease.
    pub monotonicity_violations: Vec<(usize, usize)>,
}

impl Decomposition<'_> {
    pub fn is_monotone(&self) -> bool {
        self.monotonicity_violations.is_empty()
    }
}

/// Evaluates `measure` on every node and Möbius-inverts the result.
pub fn evaluate_lattice<'a>(
    measure: Measure<'_>,
    dist: &dyn Entropic,
    target: &[&str],
    lattice: &'a PiLattice,
    sources: &Sources,
) -> Result<Decomposition<'a>> {
    if lattice.n() != sources.n() {
        return Err(argument(format!(
            "lattice over {} participants, {} sources given",
            lattice.n(),
            sources.n()
        )));
    }
    let cumulative = lattice
        .nodes()
        .iter()
        .map(|node| measure.value(dist, target, node, sources))
        .collect::<Result<Vec<_>>>()?;
    let monotonicity_violations = check_monotone(lattice, &cumulative);
    Ok(Decomposition {
        valuation: moebius_invert(lattice, &cumulative)?,
        monotonicity_violations,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeDeviation {
    pub node: Antichain,
    pub value: f64,
    pub expected: f64,
}

impl fmt::Display for NodeDeviation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {:.9} bits, expected {:.9}",
            self.node, self.value, self.expected
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SspReport {
    pub pass: bool,
    pub nodes_checked: usize,
    pub deviations: Vec<NodeDeviation>,
}

impl SspReport {
    fn from_deviations(nodes_checked: usize, deviations: Vec<NodeDeviation>) -> Self {
        Self {
            pass: deviations.is_empty(),
            nodes_checked,
            deviations,
        }
    }

    pub fn max_deviation(&self) -> f64 {
        self.deviations
            .iter()
            .map(|d| (d.value - d.expected).abs())
            .fold(0.0, f64::max)
    }
}

/// Secret sharing property on a perfect scheme: every node equals `H(S)` when
/// all its sets are authorized and 0 otherwise.
pub fn check_ssp(
    measure: Measure<'_>,
    scheme: &SecretSharingScheme,
    lattice: &PiLattice,
) -> Result<SspReport> {
    let perfect = check_perfect(scheme);
    if !perfect.perfect {
        return Err(Error::Precondition(format!(
            "scheme is not perfect ({} violating subsets)",
            perfect.violations.len()
        )));
    }
    if lattice.n() != scheme.n() {
        return Err(argument("lattice and scheme participant counts differ"));
    }
    let h = scheme.secret_entropy();
    let sources = Sources::from(scheme);
    let target = scheme.secret();
    let mut deviations = Vec::new();
    for node in lattice.nodes() {
        let value = measure.value(scheme.dist(), &target, node, &sources)?;
        let expected = if scheme.structure().authorizes_all(node) { h } else { 0.0 };
        if (value - expected).abs() > CHECK_TOL {
            deviations.push(NodeDeviation {
                node: node.clone(),
                value,
                expected,
            });
        }
    }
    Ok(SspReport::from_deviations(lattice.len(), deviations))
}

/// Pairwise secret sharing property on a combination of two schemes: every
/// node equals the entropy of the secrets for which all its sets are
/// authorized.
pub fn check_pairwise_ssp(
    measure: Measure<'_>,
    comb: &SchemeCombination,
    lattice: &PiLattice,
) -> Result<SspReport> {
    if comb.len() != 2 {
        return Err(argument(format!(
            "pairwise check needs exactly two schemes, got {}",
            comb.len()
        )));
    }
    if lattice.n() != comb.n() {
        return Err(argument("lattice and combination participant counts differ"));
    }
    let sources = Sources::from(comb);
    let target = comb.secret_names();
    let mut deviations = Vec::new();
    for node in lattice.nodes() {
        let value = measure.value(comb.dist(), &target, node, &sources)?;
        let expected = reference_ssp_value(comb, node)?;
        if (value - expected).abs() > CHECK_TOL {
            deviations.push(NodeDeviation {
                node: node.clone(),
                value,
                expected,
            });
        }
    }
    Ok(SspReport::from_deviations(lattice.len(), deviations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::VariableSpec;
    use crate::secret::{combine, construct_cyclic_example, construct_isn, prescribe_entropy, AccessStructure};
    use crate::TOL;

    fn ac(n: usize, t: &str) -> Antichain {
        Antichain::parse(n, t).unwrap()
    }

    /// S = (X1, X2, X3) encoded in one 8-valued variable, X3 = X1 ⊕ X2.
    fn xor_system() -> JointDistribution {
        let vars = vec![
            VariableSpec::new("S", 8),
            VariableSpec::new("X1", 2),
            VariableSpec::new("X2", 2),
            VariableSpec::new("X3", 2),
        ];
        let worlds = (0..4usize).map(|w| {
            let (a, b) = (w >> 1, w & 1);
            (vec![4 * a + 2 * b + (a ^ b), a, b, a ^ b], 0.25)
        });
        JointDistribution::new(vars, worlds).unwrap()
    }

    fn singles(n: usize) -> Sources {
        Sources::new((1..=n).map(|i| vec![format!("X{i}")]).collect()).unwrap()
    }

    /// S = (X1, X2) with X1, X2 independent fair bits.
    fn copy_pair() -> JointDistribution {
        let vars = vec![
            VariableSpec::new("S", 4),
            VariableSpec::new("X1", 2),
            VariableSpec::new("X2", 2),
        ];
        let worlds = (0..4usize).map(|w| (vec![w, w >> 1, w & 1], 0.25));
        JointDistribution::new(vars, worlds).unwrap()
    }

    fn solo_pair() -> SchemeCombination {
        let bit = prescribe_entropy(1.0).unwrap();
        let a = construct_isn(&AccessStructure::new(ac(2, "{1}")), &bit).unwrap();
        let b = construct_isn(&AccessStructure::new(ac(2, "{2}")), &bit).unwrap();
        combine(&[a, b]).unwrap()
    }

    #[test]
    fn immi_examples() {
        let d = xor_system();
        let src = singles(3);
        let mi = d.mutual_information(&["S"], &["X1", "X3"]).unwrap();
        assert!((i_mmi(&d, &["S"], &ac(3, "{13}"), &src).unwrap() - mi).abs() < TOL);
        assert!((i_mmi(&d, &["S"], &ac(3, "{1}{23}"), &src).unwrap() - 1.0).abs() < TOL);
        assert!((i_mmi(&d, &["S"], &ac(3, "{1}{2}"), &src).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn imin_examples() {
        let d = xor_system();
        let src = singles(3);
        for t in ["{1}", "{23}", "{123}"] {
            let node = ac(3, t);
            let mi = i_mmi(&d, &["S"], &node, &src).unwrap();
            assert!((i_min(&d, &["S"], &node, &src).unwrap() - mi).abs() < TOL, "{t}");
        }
        assert!((i_min(&d, &["S"], &ac(3, "{1}{2}"), &src).unwrap() - 1.0).abs() < TOL);

        let c = copy_pair();
        assert!((i_min(&c, &["S"], &ac(2, "{1}{2}"), &singles(2)).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn sources_must_not_overlap_target() {
        let d = xor_system();
        let bad = Sources::new(vec![vec!["S".into()], vec!["X2".into()], vec!["X3".into()]]).unwrap();
        assert!(i_mmi(&d, &["S"], &ac(3, "{1}"), &bad).is_err());
        assert!(i_min(&d, &["S"], &ac(3, "{1}"), &bad).is_err());
        assert!(Sources::new(vec![vec!["X1".into()], vec!["X1".into()]]).is_err());
        assert!(i_mmi(&d, &["S"], &ac(2, "{1}"), &singles(3)).is_err());
    }

    #[test]
    fn immi_on_xor_is_monotone() {
        let lattice = PiLattice::new(3).unwrap();
        for m in [Measure::IMmi, Measure::IMin] {
            let dec = evaluate_lattice(m, &xor_system(), &["S"], &lattice, &singles(3)).unwrap();
            assert!(dec.is_monotone(), "{m}");
            assert_eq!(dec.valuation.cumulative().len(), 18);
        }
    }

    #[test]
    fn reference_measure_on_single_scheme_has_one_partial() {
        let lattice = PiLattice::new(3).unwrap();
        let scheme = construct_cyclic_example();
        let comb = combine(std::slice::from_ref(&scheme)).unwrap();
        let dec = evaluate_lattice(
            Measure::Reference(&comb),
            comb.dist(),
            &comb.secret_names(),
            &lattice,
            &Sources::from(&comb),
        )
        .unwrap();
        let target = scheme.structure().minimal();
        for (node, _, partial) in dec.valuation.rows() {
            let want = if node == target { 1.0 } else { 0.0 };
            assert!((partial - want).abs() < TOL, "{node}: {partial}");
        }
    }

    #[test]
    fn reference_measure_on_solo_pair() {
        let lattice = PiLattice::new(2).unwrap();
        let comb = solo_pair();
        let dec = evaluate_lattice(
            Measure::Reference(&comb),
            comb.dist(),
            &comb.secret_names(),
            &lattice,
            &Sources::from(&comb),
        )
        .unwrap();
        for (node, _, partial) in dec.valuation.rows() {
            let want = match node.to_string().as_str() {
                "{1}" | "{2}" => 1.0,
                _ => 0.0,
            };
            assert!((partial - want).abs() < TOL, "{node}: {partial}");
        }
    }

    #[test]
    fn reference_measure_rejects_foreign_targets() {
        let comb = solo_pair();
        let d = xor_system();
        let r = Measure::Reference(&comb).value(&d, &["S"], &ac(2, "{1}"), &singles(2));
        assert!(r.is_err());
    }

    #[test]
    fn ssp_on_cyclic_example() {
        let lattice = PiLattice::new(3).unwrap();
        let scheme = construct_cyclic_example();
        let comb = combine(std::slice::from_ref(&scheme)).unwrap();
        for m in [Measure::IMmi, Measure::IMin, Measure::Reference(&comb)] {
            let r = check_ssp(m, &scheme, &lattice).unwrap();
            assert!(r.pass, "{m}: {:?}", r.deviations);
            assert_eq!(r.nodes_checked, 18);
        }
    }

    #[test]
    fn ssp_requires_a_perfect_scheme() {
        let lattice = PiLattice::new(3).unwrap();
        let scheme = construct_cyclic_example();
        let wrong = SecretSharingScheme::new(
            scheme.dist().clone(),
            vec!["S".into()],
            scheme.participants().to_vec(),
            AccessStructure::new(ac(3, "{1}")),
        )
        .unwrap();
        assert!(matches!(
            check_ssp(Measure::IMmi, &wrong, &lattice),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pairwise_ssp_on_solo_pair() {
        let lattice = PiLattice::new(2).unwrap();
        let comb = solo_pair();
        assert!(check_pairwise_ssp(Measure::Reference(&comb), &comb, &lattice).unwrap().pass);
        let bottom = ac(2, "{1}{2}");
        for m in [Measure::IMmi, Measure::IMin] {
            let r = check_pairwise_ssp(m, &comb, &lattice).unwrap();
            assert!(!r.pass);
            assert_eq!(r.deviations.len(), 1, "{m}");
            assert_eq!(r.deviations[0].node, bottom);
            assert!((r.deviations[0].value - 1.0).abs() < TOL);
            assert_eq!(r.deviations[0].expected, 0.0);
        }
    }

    #[test]
    fn pairwise_ssp_needs_two_schemes() {
        let lattice = PiLattice::new(3).unwrap();
        let comb = combine(&[construct_cyclic_example()]).unwrap();
        assert!(check_pairwise_ssp(Measure::IMmi, &comb, &lattice).is_err());
    }
}
