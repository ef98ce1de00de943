//! The named experiments: lattice listing, decompositions, the XOR
//! counterexample, the noisy-XOR sweep, prescribed partial terms and the
//! checks on pairs of combined schemes.

use std::collections::BTreeMap;
use std::fmt::Write;

use pid_secret::broja::{optimize_delta_p, qstar_product, si_tilde, si_tilde_node, BivariateInstance};
use pid_secret::lattice::{check_monotone, moebius_invert, Antichain, PiLattice, Subset};
use pid_secret::measures::{Measure, Sources};
use pid_secret::prob::{Entropic, JointDistribution, VariableSpec};
use pid_secret::secret::{
    combine, construct_isn, prescribe_entropy, prescribe_partials, reference_ssp_value, AccessStructure,
    SchemeCombination, SecretSharingScheme,
};
use pid_secret::{Error, TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::io::parse_antichain;
use crate::report::{bits, ExperimentReport, ValuationRow, Verdict, VALUATION_HEADER};
use crate::Result;

/// Largest participant count for the combined-scheme checks.
pub const MAX_PAIR_CATALOG_N: usize = 3;

/// Tolerance for `SI~` against its closed-form value.
pub const SI_TOL: f64 = 1e-4;

/// Tolerance on the marginals of `Q*`.
pub const QSTAR_TOL: f64 = 1e-7;

/// Allowed gap between the solver's conditional entropy and that of `Q*`.
pub const DOMINANCE_TOL: f64 = 2e-6;

/// Tolerance for recovered prescribed partial terms.
pub const PRESCRIBE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliMeasure {
    IMin,
    IMmi,
    Reference,
    BrojaPair,
}

impl CliMeasure {
    pub fn name(self) -> &'static str {
        match self {
            CliMeasure::IMin => "imin",
            CliMeasure::IMmi => "immi",
            CliMeasure::Reference => "reference",
            CliMeasure::BrojaPair => "broja-pair",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "imin" => Ok(CliMeasure::IMin),
            "immi" => Ok(CliMeasure::IMmi),
            "reference" => Ok(CliMeasure::Reference),
            "broja-pair" => Ok(CliMeasure::BrojaPair),
            other => Err(Error::Argument(format!(
                "unknown measure `{other}` (expected imin, immi, reference or broja-pair)"
            ))
            .into()),
        }
    }
}

fn map_indices<T, F>(len: usize, parallel: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if parallel {
        (0..len).into_par_iter().map(f).collect()
    } else {
        (0..len).map(f).collect()
    }
}

fn as_strs(names: &[String]) -> Vec<&str> {
    names.iter().map(String::as_str).collect()
}

/// `X1, X2` independent uniform bits, `X3 = X1 ⊕ X2`, and the target
/// `S = (X1, X2, X3)` encoded as `4·x1 + 2·x2 + x3`.
pub fn xor_system() -> JointDistribution {
    let variables = vec![
        VariableSpec::new("S", 8),
        VariableSpec::new("X1", 2),
        VariableSpec::new("X2", 2),
        VariableSpec::new("X3", 2),
    ];
    let worlds = (0..4usize).map(|w| {
        let (x1, x2) = (w >> 1, w & 1);
        let x3 = x1 ^ x2;
        (vec![4 * x1 + 2 * x2 + x3, x1, x2, x3], 0.25)
    });
    JointDistribution::new(variables, worlds).expect("valid world table")
}

/// The XOR system with `X3` flipped with probability `ε`.
pub fn noisy_xor(epsilon: f64) -> Result<JointDistribution> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Argument(format!("ε = {epsilon} is outside [0, 1]")).into());
    }
    let variables = vec![
        VariableSpec::new("S", 8),
        VariableSpec::new("X1", 2),
        VariableSpec::new("X2", 2),
        VariableSpec::new("X3", 2),
    ];
    let entries = (0..8usize).map(|w| {
        let (x1, x2, x3) = (w >> 2, (w >> 1) & 1, w & 1);
        let p = if x3 == x1 ^ x2 { 1.0 - epsilon } else { epsilon };
        (vec![4 * x1 + 2 * x2 + x3, x1, x2, x3], 0.25 * p)
    });
    Ok(JointDistribution::new(variables, entries)?)
}

/// Two one-bit ISN schemes on two participants: participant 1 alone holds
/// the first secret, participant 2 alone the second.
pub fn solo_pair() -> Vec<SecretSharingScheme> {
    let bit = prescribe_entropy(1.0).expect("one bit");
    ["{1}", "{2}"]
        .iter()
        .map(|a| {
            let structure = AccessStructure::new(Antichain::parse(2, a).expect("valid antichain"));
            construct_isn(&structure, &bit).expect("ISN scheme")
        })
        .collect()
}

/// `-ε log ε − (1−ε) log (1−ε)` in bits.
pub fn binary_entropy(epsilon: f64) -> f64 {
    [epsilon, 1.0 - epsilon]
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

pub fn cmd_lattice(n: usize, count_only: bool) -> Result<String> {
    let lattice = PiLattice::new(n)?;
    if count_only {
        return Ok(format!("{}\n", lattice.len()));
    }
    let mut out = String::new();
    writeln!(out, "# nodes: {}", lattice.len()).unwrap();
    for node in lattice.nodes() {
        writeln!(out, "{node}").unwrap();
    }
    let edges = lattice.cover_edges();
    writeln!(out, "# cover edges: {}", edges.len()).unwrap();
    for (lo, hi) in edges {
        writeln!(out, "{} -> {}", lattice.node(lo), lattice.node(hi)).unwrap();
    }
    Ok(out)
}

/// Input of a decomposition: a bare distribution, or schemes to combine.
pub enum DecomposeInput {
    Distribution(JointDistribution),
    Schemes(SchemeCombination),
}

impl DecomposeInput {
    pub fn schemes(schemes: &[SecretSharingScheme]) -> Result<Self> {
        Ok(DecomposeInput::Schemes(combine(schemes)?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub measure: CliMeasure,
    pub rows: Vec<ValuationRow>,
    /// Comparable node pairs `(lower, upper)` whose values decrease.
    pub violations: Vec<(String, String)>,
}

impl Decomposition {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn monotonicity_comment(&self) -> String {
        if self.violations.is_empty() {
            return "# monotone: yes".into();
        }
        let shown: Vec<String> = self
            .violations
            .iter()
            .take(3)
            .map(|(lo, hi)| format!("{lo} > {hi}"))
            .collect();
        format!("# monotone: no ({} violations: {})", self.violations.len(), shown.join(", "))
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{VALUATION_HEADER}").unwrap();
        for r in &self.rows {
            writeln!(out, "{}", r.csv()).unwrap();
        }
        writeln!(out, "{}", self.monotonicity_comment()).unwrap();
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn decompose_with<D: Entropic + Sync>(
    measure: CliMeasure,
    comb: Option<&SchemeCombination>,
    dist: &D,
    target: &[&str],
    lattice: &PiLattice,
    sources: &Sources,
    tol: f64,
    parallel: bool,
) -> Result<Decomposition> {
    let reference = match (measure, comb) {
        (CliMeasure::Reference, Some(c)) => Some(Measure::Reference(c)),
        (CliMeasure::Reference, None) => {
            return Err(Error::Argument("the reference measure needs a scheme file".into()).into())
        }
        _ => None,
    };
    let values = map_indices(lattice.len(), parallel, |i| {
        let node = lattice.node(i);
        let v = match measure {
            CliMeasure::IMin => Some(Measure::IMin.value(dist, target, node, sources)?),
            CliMeasure::IMmi => Some(Measure::IMmi.value(dist, target, node, sources)?),
            CliMeasure::Reference => Some(reference.expect("set above").value(dist, target, node, sources)?),
            CliMeasure::BrojaPair if node.len() == 2 => Some(si_tilde_node(dist, target, node, sources, tol)?),
            CliMeasure::BrojaPair => None,
        };
        Ok(v)
    })?;

    let name = |i: usize| lattice.node(i).to_string();
    let (partial, violations) = if values.iter().all(Option::is_some) {
        let cumulative: Vec<f64> = values.iter().map(|v| v.expect("all present")).collect();
        let valuation = moebius_invert(lattice, &cumulative)?;
        let violations = check_monotone(lattice, &cumulative)
            .into_iter()
            .map(|(i, j)| (name(i), name(j)))
            .collect();
        (valuation.partial().iter().map(|&p| Some(p)).collect(), violations)
    } else {
        let mut violations = Vec::new();
        for j in 0..lattice.len() {
            for i in 0..lattice.len() {
                if let (Some(a), Some(b)) = (values[i], values[j]) {
                    if i != j && lattice.leq_index(i, j) && a > b + TOL {
                        violations.push((name(i), name(j)));
                    }
                }
            }
        }
        (vec![None; lattice.len()], violations)
    };
    let rows = lattice
        .nodes()
        .iter()
        .zip(values.iter().zip(partial))
        .map(|(node, (&cumulative, partial))| ValuationRow {
            node: node.to_string(),
            cumulative,
            partial,
        })
        .collect();
    Ok(Decomposition {
        measure,
        rows,
        violations,
    })
}

/// Evaluates `measure` on every lattice node. The target defaults to the
/// combined secrets for scheme input and the sources to the participants'
/// shares, or to one source per remaining variable for a bare distribution.
/// `broja-pair` is evaluated on two-set nodes only.
pub fn cmd_decompose(
    input: &DecomposeInput,
    target: Option<&[String]>,
    sources: Option<Sources>,
    measure: CliMeasure,
    tol: f64,
    parallel: bool,
) -> Result<Decomposition> {
    match input {
        DecomposeInput::Distribution(dist) => {
            let Some(target) = target else {
                return Err(Error::Argument("a target is required for a distribution".into()).into());
            };
            let target = as_strs(target);
            let sources = match sources {
                Some(s) => s,
                None => Sources::remaining(dist, &target)?,
            };
            let lattice = PiLattice::new(sources.n())?;
            decompose_with(measure, None, dist, &target, &lattice, &sources, tol, parallel)
        }
        DecomposeInput::Schemes(comb) => {
            let default_target: Vec<String> = comb.secret_names().iter().map(|s| s.to_string()).collect();
            let target = as_strs(target.unwrap_or(&default_target));
            let sources = sources.unwrap_or_else(|| Sources::from(comb));
            let lattice = PiLattice::new(sources.n())?;
            decompose_with(measure, Some(comb), comb.dist(), &target, &lattice, &sources, tol, parallel)
        }
    }
}

/// The cumulative values forced by the pairwise secret sharing property on
/// the XOR system, for every node with one or two sets.
pub const PAIRWISE_SSP_VALUES: [(&str, f64); 16] = [
    ("{123}", 2.0),
    ("{12}", 2.0),
    ("{13}", 2.0),
    ("{23}", 2.0),
    ("{12}{13}", 2.0),
    ("{12}{23}", 2.0),
    ("{13}{23}", 2.0),
    ("{1}", 1.0),
    ("{2}", 1.0),
    ("{3}", 1.0),
    ("{1}{23}", 1.0),
    ("{2}{13}", 1.0),
    ("{3}{12}", 1.0),
    ("{1}{2}", 0.0),
    ("{1}{3}", 0.0),
    ("{2}{3}", 0.0),
];

/// The two three-set nodes, which the pairwise property leaves open.
pub const BOUND_FILLED_VALUES: [(&str, f64, &str); 2] = [
    ("{12}{13}{23}", 2.0, "its largest admissible value, 2 bits"),
    ("{1}{2}{3}", 0.0, "forced by monotonicity below {1}{2} = 0"),
];

pub const XOR_WITNESS_NODE: &str = "{12}{13}{23}";

/// Checks the ingredients of the XOR counterexample numerically and
/// Möbius-inverts the valuation the pairwise secret sharing property forces.
pub fn cmd_xor_counterexample(tol: f64) -> Result<ExperimentReport> {
    let dist = xor_system();
    let target = ["S"];
    let xs = ["X1", "X2", "X3"];
    let sources = Sources::remaining(&dist, &target)?;
    let lattice = PiLattice::new(3)?;
    let mut report = ExperimentReport::new("xor-counterexample");
    report.parameter("system", "X1, X2 uniform bits, X3 = X1 xor X2, S = (X1, X2, X3)");
    report.parameter("tol", tol);

    let mut dev: f64 = 0.0;
    for x in xs {
        dev = dev.max((dist.mutual_information(&target, &[x])? - 1.0).abs());
    }
    report.verdicts.push(Verdict::within("I(S;X_i) = 1 bit", dev, TOL, ""));

    let mut dev: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let others: Vec<&str> = xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &y)| y).collect();
        dev = dev.max(dist.conditional_entropy(&[x], &others)?);
    }
    report.verdicts.push(Verdict::within(
        "each X_i is a function of the other two",
        dev,
        TOL,
        "largest H(X_i | X_j, X_k)",
    ));

    let pair = BivariateInstance::new(&dist, &["X1", "X2"], &["X1"], &["X2"])?;
    let si = si_tilde(&pair, tol)?;
    report.verdicts.push(Verdict::within(
        "SI~((X1,X2);X1,X2) = 0",
        si.abs(),
        SI_TOL,
        format!("SI~ = {}", bits(si)),
    ));

    let mut cumulative = vec![f64::NAN; lattice.len()];
    let (mut dev_single, mut dev_pair): (f64, f64) = (0.0, 0.0);
    for (text, v) in PAIRWISE_SSP_VALUES {
        let node = Antichain::parse(3, text)?;
        cumulative[lattice.require_index(&node)?] = v;
        let [a] = node.sets() else {
            let computed = si_tilde_node(&dist, &target, &node, &sources, tol)?;
            dev_pair = dev_pair.max((computed - v).abs());
            continue;
        };
        let computed = dist.mutual_information(&target, &sources.names(*a))?;
        dev_single = dev_single.max((computed - v).abs());
    }
    for (text, v, why) in BOUND_FILLED_VALUES {
        let node = Antichain::parse(3, text)?;
        cumulative[lattice.require_index(&node)?] = v;
        report
            .notes
            .push(format!("{text} := {v} is bounds-derived, not forced: {why}"));
    }
    report.verdicts.push(Verdict::within(
        "single-set values equal I(S;X_A)",
        dev_single,
        TOL,
        "",
    ));
    report.verdicts.push(Verdict::within(
        "two-set values equal SI~(S;X_A1,X_A2)",
        dev_pair,
        SI_TOL,
        "",
    ));

    let mut drop: f64 = 0.0;
    for j in 0..lattice.len() {
        for i in 0..lattice.len() {
            if lattice.leq_index(i, j) {
                drop = drop.max(cumulative[i] - cumulative[j]);
            }
        }
    }
    report.verdicts.push(Verdict::within("valuation is monotone", drop, TOL, "largest decrease along the order"));

    let valuation = moebius_invert(&lattice, &cumulative)?;
    let witness = Antichain::parse(3, XOR_WITNESS_NODE)?;
    let p = valuation.partial_at(&witness).expect("node of the lattice");
    report.verdicts.push(Verdict::within(
        format!("partial at {XOR_WITNESS_NODE} = -1 bit"),
        (p + 1.0).abs(),
        TOL,
        format!("partial = {}", bits(p)),
    ));
    report.rows = valuation
        .rows()
        .map(|(node, c, p)| ValuationRow {
            node: node.to_string(),
            cumulative: Some(c),
            partial: Some(p),
        })
        .collect();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub row: ValuationRow,
    pub measure: CliMeasure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseCheck {
    pub epsilon: f64,
    /// `H(X3 | X1, X2)`.
    pub conditional_entropy: f64,
    pub binary_entropy: f64,
    /// `I(X3; X1, X2)`.
    pub mutual_information: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub checks: Vec<NoiseCheck>,
}

impl Sweep {
    pub fn render_csv(&self) -> String {
        let mut out = String::from("epsilon,measure,node,cumulative_bits,partial_bits\n");
        for r in &self.rows {
            writeln!(out, "{},{},{}", r.epsilon, r.measure.name(), r.row.csv()).unwrap();
        }
        for c in &self.checks {
            writeln!(
                out,
                "# epsilon {}: H(X3|X1,X2) = {}, binary entropy = {}, I(X3;X1,X2) = {}",
                c.epsilon,
                bits(c.conditional_entropy),
                bits(c.binary_entropy),
                bits(c.mutual_information)
            )
            .unwrap();
        }
        out
    }
}

pub fn parse_epsilons(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Argument(format!("bad ε `{}`: {e}", s.trim())).into())
        })
        .collect()
}

/// Decomposes the noisy XOR system for each `ε` under each measure.
pub fn cmd_epsilon_sweep(epsilons: &[f64], measures: &[CliMeasure], tol: f64, parallel: bool) -> Result<Sweep> {
    if epsilons.is_empty() || measures.is_empty() {
        return Err(Error::Argument("need at least one ε and one measure".into()).into());
    }
    if measures.contains(&CliMeasure::Reference) {
        return Err(Error::Argument("the reference measure is not defined on the noisy XOR system".into()).into());
    }
    let dists = epsilons.iter().map(|&e| noisy_xor(e)).collect::<Result<Vec<_>>>()?;
    let mut sweep = Sweep {
        rows: Vec::new(),
        checks: Vec::new(),
    };
    for (&epsilon, dist) in epsilons.iter().zip(&dists) {
        let input = DecomposeInput::Distribution(dist.clone());
        let target = ["S".to_string()];
        for &m in measures {
            let d = cmd_decompose(&input, Some(&target), None, m, tol, parallel)?;
            sweep.rows.extend(d.rows.into_iter().map(|row| SweepRow {
                epsilon,
                row,
                measure: m,
            }));
        }
        sweep.checks.push(NoiseCheck {
            epsilon,
            conditional_entropy: dist.conditional_entropy(&["X3"], &["X1", "X2"])?,
            binary_entropy: binary_entropy(epsilon),
            mutual_information: dist.mutual_information(&["X3"], &["X1", "X2"])?,
        });
    }
    Ok(sweep)
}

/// Every node gets `k/4` bits with `k` uniform in `0..=8`.
pub fn random_prescription(n: usize, seed: u64) -> Result<BTreeMap<Antichain, f64>> {
    let lattice = PiLattice::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h: BTreeMap<Antichain, f64> = lattice
        .nodes()
        .iter()
        .map(|a| (a.clone(), rng.gen_range(0..=8) as f64 / 4.0))
        .collect();
    if h.values().all(|&v| v == 0.0) {
        h.insert(Antichain::top(n)?, 1.0);
    }
    Ok(h)
}

pub fn parse_prescription_file(n: usize, text: &str) -> Result<BTreeMap<Antichain, f64>> {
    crate::io::parse_prescription(n, text)
}

/// Builds one ISN scheme per positive prescribed value, decomposes the
/// combination with the reference measure and compares partial terms.
pub fn cmd_prescribe(n: usize, h: &BTreeMap<Antichain, f64>) -> Result<ExperimentReport> {
    let comb = prescribe_partials(n, h)?;
    let lattice = PiLattice::new(n)?;
    let cumulative = lattice
        .nodes()
        .iter()
        .map(|a| reference_ssp_value(&comb, a))
        .collect::<pid_secret::Result<Vec<_>>>()?;
    let valuation = moebius_invert(&lattice, &cumulative)?;

    let mut report = ExperimentReport::new("prescribe");
    report.parameter("n", n);
    report.parameter("schemes", comb.len());
    let (mut dev_given, mut dev_other): (f64, f64) = (0.0, 0.0);
    let (mut worst_given, mut worst_other) = (String::new(), String::new());
    for (node, _, p) in valuation.rows() {
        let want = h.get(node).copied().unwrap_or(0.0);
        let d = (p - want).abs();
        if want > 0.0 {
            if d > dev_given || worst_given.is_empty() {
                dev_given = dev_given.max(d);
                worst_given = node.to_string();
            }
        } else if d > dev_other || worst_other.is_empty() {
            dev_other = dev_other.max(d);
            worst_other = node.to_string();
        }
    }
    report.verdicts.push(Verdict::within(
        "prescribed partials recovered",
        dev_given,
        PRESCRIBE_TOL,
        format!("worst at {worst_given}"),
    ));
    report.verdicts.push(Verdict::within(
        "other partials vanish",
        dev_other,
        PRESCRIBE_TOL,
        if worst_other.is_empty() {
            "every node is prescribed".to_string()
        } else {
            format!("worst at {worst_other}")
        },
    ));
    report.rows = valuation
        .rows()
        .map(|(node, c, p)| ValuationRow {
            node: node.to_string(),
            cumulative: Some(c),
            partial: Some(p),
        })
        .collect();
    Ok(report)
}

#[derive(Clone, Debug, Default)]
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || self.at.is_empty() || value.is_nan() {
            self.value = if value.is_nan() { f64::INFINITY } else { value.max(self.value) };
            self.at = at();
        }
    }

    fn merge(&mut self, other: &Worst) {
        if !other.at.is_empty() {
            self.update(other.value, || other.at.clone());
        }
    }

    fn describe(&self) -> String {
        if self.at.is_empty() {
            "nothing checked".into()
        } else {
            format!("worst at {}", self.at)
        }
    }
}

#[derive(Clone, Debug, Default)]
struct PairChecks {
    single_sets: usize,
    pair_nodes: usize,
    positive_targets: usize,
    mutual_information: Worst,
    si: Worst,
    qstar: Worst,
    dominance: Worst,
}

fn check_pair(a: &Antichain, b: &Antichain, lattice: &PiLattice, tol: f64) -> Result<PairChecks> {
    let bit = prescribe_entropy(1.0)?;
    let schemes = [
        construct_isn(&AccessStructure::new(a.clone()), &bit)?,
        construct_isn(&AccessStructure::new(b.clone()), &bit)?,
    ];
    let comb = combine(&schemes)?;
    let dist = comb.dist();
    let s = comb.secret_names();
    let label = |what: String| format!("{a} / {b}, {what}");
    let mut out = PairChecks::default();

    for bits in 1..(1u32 << lattice.n()) {
        let subset = Subset::from_bits(bits);
        let got = dist.mutual_information(&s, &comb.share_names(subset))?;
        let want = comb.secrets_entropy(&comb.secrets_known_to(subset))?;
        out.mutual_information.update((got - want).abs(), || label(format!("A = {subset}")));
        out.single_sets += 1;
    }

    for node in lattice.nodes().iter().filter(|n| n.len() == 2) {
        let [a1, a2] = node.sets() else { unreachable!() };
        let inst = BivariateInstance::new(dist, &s, &comb.share_names(*a1), &comb.share_names(*a2))?;
        let q = optimize_delta_p(&inst, tol)?;
        let mut si = q.coinformation()?;
        if si < 0.0 && si >= -tol {
            si = 0.0;
        }
        let want = reference_ssp_value(&comb, node)?;
        out.positive_targets += usize::from(want > 0.0);
        out.si.update((si - want).abs(), || label(format!("node {node}")));
        let qstar = qstar_product(&inst);
        out.qstar.update(qstar.marginal_residual(&inst)?, || label(format!("node {node}")));
        let gap = (q.conditional_entropy()? - qstar.conditional_entropy()?).abs();
        out.dominance.update(gap, || label(format!("node {node}")));
        out.pair_nodes += 1;
    }
    Ok(out)
}

/// Runs the combined-scheme checks over every ordered pair of distinct
/// access structures on `n` participants, each with a one-bit ISN scheme:
/// `I(S; X_A)` against the entropy of the secrets `A` knows, `SI~` against
/// the entropy of the secrets both sets know, the marginals of `Q*`, and
/// the solver's conditional entropy against that of `Q*`.
pub fn cmd_verify_pairs(n: usize, tol: f64, parallel: bool) -> Result<ExperimentReport> {
    if n == 0 || n > MAX_PAIR_CATALOG_N {
        return Err(Error::Capacity(format!(
            "the combined-scheme catalog supports 1..={MAX_PAIR_CATALOG_N} participants, got {n}"
        ))
        .into());
    }
    let lattice = PiLattice::new(n)?;
    let nodes = lattice.nodes();
    let mut pairs = Vec::new();
    let mut skipped = 0;
    for a in nodes {
        for b in nodes {
            if a == b {
                skipped += 1;
            } else {
                pairs.push((a, b));
            }
        }
    }
    let results = map_indices(pairs.len(), parallel, |i| check_pair(pairs[i].0, pairs[i].1, &lattice, tol))?;

    let mut total = PairChecks::default();
    for r in &results {
        total.single_sets += r.single_sets;
        total.pair_nodes += r.pair_nodes;
        total.positive_targets += r.positive_targets;
        total.mutual_information.merge(&r.mutual_information);
        total.si.merge(&r.si);
        total.qstar.merge(&r.qstar);
        total.dominance.merge(&r.dominance);
    }

    let mut report = ExperimentReport::new("verify-pairs");
    report.parameter("n", n);
    report.parameter("ordered pairs", pairs.len());
    report.parameter("participant-set checks", total.single_sets);
    report.parameter("two-set node checks", total.pair_nodes);
    report.parameter("two-set checks with a positive target", total.positive_targets);
    report.parameter("tol", tol);
    report.notes.push(format!(
        "skipped {skipped} pairs with identical structures (a combination has distinct structures)"
    ));
    report.verdicts.push(Verdict::within(
        "I(S;X_A) = H(secrets A knows)",
        total.mutual_information.value,
        TOL,
        total.mutual_information.describe(),
    ));
    report.verdicts.push(Verdict::within(
        "SI~ = H(secrets both sets know)",
        total.si.value,
        SI_TOL,
        total.si.describe(),
    ));
    report.verdicts.push(Verdict::within(
        "Q* marginal residual",
        total.qstar.value,
        QSTAR_TOL,
        total.qstar.describe(),
    ));
    report.verdicts.push(Verdict::within(
        "solver H(S|X,Y) matches Q*",
        total.dominance.value,
        DOMINANCE_TOL,
        total.dominance.describe(),
    ));
    if n >= 2 {
        let comb = combine(&solo_pair_over(n)?)?;
        let s = comb.secret_names();
        let x = comb.share_names(Subset::from_members([1])?);
        let y = comb.share_names(Subset::from_members([2])?);
        let si = si_tilde(&BivariateInstance::new(comb.dist(), &s, &x, &y)?, tol)?;
        report.verdicts.push(Verdict::within(
            "SI~ of the solo pair {1} / {2} at {1}{2} = 0",
            si.abs(),
            SI_TOL,
            format!("SI~ = {}", bits(si)),
        ));
    }
    Ok(report)
}

fn solo_pair_over(n: usize) -> Result<Vec<SecretSharingScheme>> {
    let bit = prescribe_entropy(1.0)?;
    ["{1}", "{2}"]
        .iter()
        .map(|a| Ok(construct_isn(&AccessStructure::new(parse_antichain(n, a)?), &bit)?))
        .collect()
}
