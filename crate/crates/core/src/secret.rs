//! Access structures, perfect secret sharing schemes and combinations of
//! independent schemes over the same participants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{argument, Error, Result};
use crate::lattice::{Antichain, Subset};
use crate::prob::{
    all_outcomes, shannon, Entropic, JointDistribution, ProductDistribution, VariableSpec,
    MAX_OUTCOMES,
};
use crate::TOL;

/// Schemes are checked over all `2^n` participant subsets, so `n` is capped.
pub const MAX_SCHEME_PARTICIPANTS: usize = 5;

/// An upward-closed family of authorized participant subsets, stored as its
/// inclusion-minimal members.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AccessStructure {
    minimal: Antichain,
}

impl AccessStructure {
    pub fn new(minimal: Antichain) -> Self {
        Self { minimal }
    }

    pub fn from_members<I, J>(n: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = usize>,
    {
        Ok(Self::new(Antichain::from_members(n, sets)?))
    }

    pub fn n(&self) -> usize {
        self.minimal.n()
    }

    pub fn minimal(&self) -> &Antichain {
        &self.minimal
    }

    pub fn is_authorized(&self, subset: Subset) -> Result<bool> {
        if subset.max_member() > self.n() {
            return Err(argument(format!(
                "{subset} is not a subset of {{1..{}}}",
                self.n()
            )));
        }
        Ok(self.minimal.covers(subset))
    }

    /// True iff every set of `node` is authorized.
    pub fn authorizes_all(&self, node: &Antichain) -> bool {
        node.sets().iter().all(|s| self.minimal.covers(*s))
    }
}

impl fmt::Display for AccessStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.minimal.fmt(f)
    }
}

/// Share variables of the participants in `subset`.
fn share_names(participants: &[Vec<String>], subset: Subset) -> Vec<&str> {
    subset
        .members()
        .filter(|&i| i <= participants.len())
        .flat_map(|i| participants[i - 1].iter().map(String::as_str))
        .collect()
}

fn as_strs(names: &[String]) -> Vec<&str> {
    names.iter().map(String::as_str).collect()
}

fn validate_roles(
    dist: &dyn Entropic,
    secrets: &[Vec<String>],
    participants: &[Vec<String>],
) -> Result<()> {
    let mut seen = BTreeSet::new();
    for name in secrets.iter().chain(participants).flatten() {
        if dist.variable(name).is_none() {
            return Err(Error::UnknownVariable(name.clone()));
        }
        if !seen.insert(name.as_str()) {
            return Err(argument(format!("variable `{name}` has more than one role")));
        }
    }
    for (i, s) in secrets.iter().enumerate() {
        if s.is_empty() {
            return Err(argument(format!("secret {} has no variables", i + 1)));
        }
    }
    if participants.is_empty() || participants.len() > MAX_SCHEME_PARTICIPANTS {
        return Err(Error::Capacity(format!(
            "schemes support 1..={MAX_SCHEME_PARTICIPANTS} participants, got {}",
            participants.len()
        )));
    }
    Ok(())
}

/// A joint distribution with a designated secret, participant shares and the
/// claimed access structure.
#[derive(Clone, Debug)]
pub struct SecretSharingScheme {
    dist: JointDistribution,
    secret: Vec<String>,
    participants: Vec<Vec<String>>,
    structure: AccessStructure,
}

impl SecretSharingScheme {
    pub fn new(
        dist: JointDistribution,
        secret: Vec<String>,
        participants: Vec<Vec<String>>,
        structure: AccessStructure,
    ) -> Result<Self> {
        validate_roles(&dist, std::slice::from_ref(&secret), &participants)?;
        if participants.len() != structure.n() {
            return Err(argument(format!(
                "{} participants but the access structure is over {}",
                participants.len(),
                structure.n()
            )));
        }
        let h = dist.entropy(&as_strs(&secret))?;
        if h <= TOL {
            return Err(argument("the secret has zero entropy"));
        }
        Ok(Self {
            dist,
            secret,
            participants,
            structure,
        })
    }

    pub fn dist(&self) -> &JointDistribution {
        &self.dist
    }

    pub fn secret(&self) -> Vec<&str> {
        as_strs(&self.secret)
    }

    pub fn participants(&self) -> &[Vec<String>] {
        &self.participants
    }

    pub fn structure(&self) -> &AccessStructure {
        &self.structure
    }

    pub fn n(&self) -> usize {
        self.participants.len()
    }

    pub fn share_names(&self, subset: Subset) -> Vec<&str> {
        share_names(&self.participants, subset)
    }

    pub fn secret_entropy(&self) -> f64 {
        self.dist.entropy(&self.secret()).expect("validated on construction")
    }
}

/// A subset whose conditional secret entropy breaks perfection.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub subset: Subset,
    pub authorized: bool,
    /// Observed `H(S | X_A)`.
    pub value: f64,
    /// 0 for authorized subsets, `H(S)` otherwise.
    pub expected: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}): H(S|X_A) = {:.9}, expected {:.9}",
            self.subset,
            if self.authorized { "authorized" } else { "unauthorized" },
            self.value,
            self.expected
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerfectReport {
    pub perfect: bool,
    pub violations: Vec<Violation>,
}

fn perfect_violations(
    dist: &dyn Entropic,
    secret: &[&str],
    participants: &[Vec<String>],
    structure: &AccessStructure,
) -> Result<Vec<Violation>> {
    let h = dist.entropy(secret)?;
    let mut violations = Vec::new();
    for bits in 0..(1u32 << participants.len()) {
        let subset = Subset::from_bits(bits);
        let authorized = structure.is_authorized(subset)?;
        let value = dist.conditional_entropy(secret, &share_names(participants, subset))?;
        let expected = if authorized { 0.0 } else { h };
        if (value - expected).abs() > TOL {
            violations.push(Violation {
                subset,
                authorized,
                value,
                expected,
            });
        }
    }
    Ok(violations)
}

/// Checks every participant subset: authorized subsets determine the secret,
/// unauthorized ones learn nothing about it.
pub fn check_perfect(scheme: &SecretSharingScheme) -> PerfectReport {
    let violations = perfect_violations(
        &scheme.dist,
        &scheme.secret(),
        &scheme.participants,
        &scheme.structure,
    )
    .expect("scheme roles validated on construction");
    PerfectReport {
        perfect: violations.is_empty(),
        violations,
    }
}

/// Ito–Saito–Nishizeki construction over `Z_k`.
///
/// For each minimal authorized set `{i_1 < … < i_m}` the first `m − 1` members
/// receive independent uniform pads and `i_m` receives the secret minus their
/// sum. Pads are uniform, so the scheme is perfect for any secret
/// distribution on `Z_k`. A participant outside every minimal set holds a
/// constant share.
pub fn construct_isn(
    structure: &AccessStructure,
    secret_dist: &JointDistribution,
) -> Result<SecretSharingScheme> {
    let [secret_var] = secret_dist.variables() else {
        return Err(argument("the secret distribution must have exactly one variable"));
    };
    let k = secret_var.cardinality;
    if k < 2 {
        return Err(argument("the secret alphabet needs at least two symbols"));
    }
    let n = structure.n();
    if n > MAX_SCHEME_PARTICIPANTS {
        return Err(Error::Capacity(format!("{n} participants")));
    }

    // One piece per (minimal set, member); pieces[i] lists participant i's.
    let mut piece_names: Vec<String> = Vec::new();
    let mut pieces: Vec<Vec<String>> = vec![Vec::new(); n];
    let mut layout: Vec<Vec<usize>> = Vec::new();
    for (j, set) in structure.minimal().sets().iter().enumerate() {
        let mut cols = Vec::new();
        for i in set.members() {
            let name = format!("X{i}_{}", j + 1);
            cols.push(piece_names.len());
            pieces[i - 1].push(name.clone());
            piece_names.push(name);
        }
        layout.push(cols);
    }
    let pad_count: usize = layout.iter().map(|c| c.len() - 1).sum();

    let mut variables = vec![secret_var.clone()];
    variables.extend(piece_names.iter().map(|p| VariableSpec::new(p.clone(), k)));
    for (i, share) in pieces.iter_mut().enumerate() {
        if share.is_empty() {
            let name = format!("X{}_0", i + 1);
            variables.push(VariableSpec::new(name.clone(), 1));
            share.push(name);
        }
    }
    let constant_count = variables.len() - 1 - piece_names.len();

    let pad_tuples = all_outcomes(&vec![k; pad_count])?;
    if pad_tuples.len().saturating_mul(secret_dist.support().len()) > MAX_OUTCOMES {
        return Err(Error::Capacity("ISN world table too large".into()));
    }
    let world_weight = 1.0 / pad_tuples.len() as f64;
    let mut worlds = Vec::with_capacity(pad_tuples.len() * secret_dist.support().len());
    for (s, ps) in secret_dist.support() {
        let s = s[0];
        for pads in &pad_tuples {
            let mut outcome = vec![0usize; variables.len()];
            outcome[0] = s;
            let mut next_pad = pads.iter();
            for cols in &layout {
                let (last, first) = cols.split_last().expect("minimal sets are nonempty");
                let mut sum = 0;
                for &c in first {
                    let pad = *next_pad.next().expect("pad count matches layout");
                    outcome[1 + c] = pad;
                    sum += pad;
                }
                outcome[1 + last] = (s + k - sum % k) % k;
            }
            debug_assert_eq!(outcome.len(), 1 + piece_names.len() + constant_count);
            worlds.push((outcome, ps * world_weight));
        }
    }
    let dist = JointDistribution::new(variables, worlds)?;
    SecretSharingScheme::new(dist, vec![secret_var.name.clone()], pieces, structure.clone())
}

/// The three-participant cyclic scheme: with `Y1, Y2, Y3, S` independent
/// uniform bits, `A = (Y1, Y2⊕S)`, `B = (Y2, Y3⊕S)`, `C = (Y3, Y1⊕S)`.
/// Any two participants recover `S`; a single one learns nothing.
pub fn construct_cyclic_example() -> SecretSharingScheme {
    let names = ["S", "A1", "A2", "B1", "B2", "C1", "C2"];
    let variables = names.iter().map(|n| VariableSpec::new(*n, 2)).collect();
    let worlds = (0..16usize).map(|w| {
        let (y1, y2, y3, s) = (w >> 3 & 1, w >> 2 & 1, w >> 1 & 1, w & 1);
        (vec![s, y1, y2 ^ s, y2, y3 ^ s, y3, y1 ^ s], 1.0 / 16.0)
    });
    let dist = JointDistribution::new(variables, worlds).expect("valid world table");
    let participants = vec![
        vec!["A1".to_string(), "A2".to_string()],
        vec!["B1".to_string(), "B2".to_string()],
        vec!["C1".to_string(), "C2".to_string()],
    ];
    let structure = AccessStructure::from_members(3, [vec![1, 2], vec![1, 3], vec![2, 3]])
        .expect("two-out-of-three antichain");
    SecretSharingScheme::new(dist, vec!["S".to_string()], participants, structure)
        .expect("valid scheme")
}

/// Several schemes over the same participants, with one secret per access
/// structure.
#[derive(Clone, Debug)]
pub struct SchemeCombination {
    dist: ProductDistribution,
    secrets: Vec<Vec<String>>,
    participants: Vec<Vec<String>>,
    structures: Vec<AccessStructure>,
}

impl SchemeCombination {
    /// Declares a combination without checking the information-theoretic
    /// conditions; see [`check_combination`].
    pub fn new(
        dist: ProductDistribution,
        secrets: Vec<Vec<String>>,
        participants: Vec<Vec<String>>,
        structures: Vec<AccessStructure>,
    ) -> Result<Self> {
        validate_roles(&dist, &secrets, &participants)?;
        if secrets.is_empty() || secrets.len() != structures.len() {
            return Err(argument(format!(
                "{} secrets for {} access structures",
                secrets.len(),
                structures.len()
            )));
        }
        for (i, a) in structures.iter().enumerate() {
            if a.n() != participants.len() {
                return Err(argument(format!(
                    "structure {a} is over {} participants, expected {}",
                    a.n(),
                    participants.len()
                )));
            }
            if structures[..i].contains(a) {
                return Err(argument(format!("access structure {a} appears twice")));
            }
        }
        Ok(Self {
            dist,
            secrets,
            participants,
            structures,
        })
    }

    pub fn dist(&self) -> &ProductDistribution {
        &self.dist
    }

    pub fn secrets(&self) -> &[Vec<String>] {
        &self.secrets
    }

    pub fn participants(&self) -> &[Vec<String>] {
        &self.participants
    }

    pub fn structures(&self) -> &[AccessStructure] {
        &self.structures
    }

    pub fn n(&self) -> usize {
        self.participants.len()
    }

    pub fn len(&self) -> usize {
        self.secrets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.secrets.is_empty()
    }

    /// All secret variables `(S_1, …, S_l)`.
    pub fn secret_names(&self) -> Vec<&str> {
        self.secrets.iter().flatten().map(String::as_str).collect()
    }

    pub fn secret(&self, i: usize) -> Vec<&str> {
        as_strs(&self.secrets[i])
    }

    pub fn share_names(&self, subset: Subset) -> Vec<&str> {
        share_names(&self.participants, subset)
    }

    /// Secrets for which every set of `node` is authorized.
    pub fn authorized_secrets(&self, node: &Antichain) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.structures[i].authorizes_all(node))
            .collect()
    }

    /// Secrets for which `subset` is authorized.
    pub fn secrets_known_to(&self, subset: Subset) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.structures[i].minimal().covers(subset))
            .collect()
    }

    /// Joint entropy of the listed secrets.
    pub fn secrets_entropy(&self, which: &[usize]) -> Result<f64> {
        let names: Vec<&str> = which.iter().flat_map(|&i| self.secret(i)).collect();
        self.dist.joint_entropy(&names)
    }
}

/// Independent product of schemes. Variables are prefixed `c{i}.` when more
/// than one scheme is combined; participant `j`'s combined share is the
/// concatenation of its per-scheme shares.
pub fn combine(schemes: &[SecretSharingScheme]) -> Result<SchemeCombination> {
    let Some(first) = schemes.first() else {
        return Err(argument("nothing to combine"));
    };
    let n = first.n();
    if schemes.iter().any(|s| s.n() != n) {
        return Err(argument("schemes have different participant counts"));
    }
    for (i, s) in schemes.iter().enumerate() {
        if schemes[..i].iter().any(|t| t.structure == s.structure) {
            return Err(argument(format!(
                "access structure {} appears twice; merge the secrets first",
                s.structure
            )));
        }
    }

    let tag = |i: usize, name: &str| {
        if schemes.len() == 1 {
            name.to_string()
        } else {
            format!("c{}.{name}", i + 1)
        }
    };
    let mut factors = Vec::with_capacity(schemes.len());
    let mut secrets = Vec::with_capacity(schemes.len());
    let mut participants: Vec<Vec<String>> = vec![Vec::new(); n];
    for (i, s) in schemes.iter().enumerate() {
        factors.push(s.dist.renamed(|v| tag(i, v))?);
        secrets.push(s.secret.iter().map(|v| tag(i, v)).collect());
        for (share, part) in participants.iter_mut().zip(&s.participants) {
            share.extend(part.iter().map(|v| tag(i, v)));
        }
    }
    SchemeCombination::new(
        ProductDistribution::new(factors)?,
        secrets,
        participants,
        schemes.iter().map(|s| s.structure.clone()).collect(),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub enum CombinationViolation {
    /// Scheme `scheme` (0-based) is not perfect for its structure.
    NotPerfect { scheme: usize, violation: Violation },
    /// `H(S_i | other secrets, X_A) ≠ H(S_i)` for an unauthorized `A`.
    OtherSecretsLeak {
        scheme: usize,
        subset: Subset,
        value: f64,
        expected: f64,
    },
    /// `I(S_i; S_j) > 0`.
    DependentPair { first: usize, second: usize, mi: f64 },
}

impl fmt::Display for CombinationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotPerfect { scheme, violation } => {
                write!(f, "scheme {} not perfect at {violation}", scheme + 1)
            }
            Self::OtherSecretsLeak {
                scheme,
                subset,
                value,
                expected,
            } => write!(
                f,
                "secret {} given the other secrets and {subset}: {value:.9} bits, expected {expected:.9}",
                scheme + 1
            ),
            Self::DependentPair { first, second, mi } => {
                write!(f, "secrets {} and {} share {mi:.9} bits", first + 1, second + 1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CombinationReport {
    pub valid: bool,
    pub violations: Vec<CombinationViolation>,
}

/// Verifies that each component is a perfect scheme for its structure, that
/// an unauthorized subset learns nothing about `S_i` even together with all
/// other secrets, and that the secrets are pairwise independent.
pub fn check_combination(comb: &SchemeCombination) -> Result<CombinationReport> {
    let dist = &comb.dist;
    let mut violations = Vec::new();
    for i in 0..comb.len() {
        let secret = comb.secret(i);
        for violation in perfect_violations(dist, &secret, &comb.participants, &comb.structures[i])? {
            violations.push(CombinationViolation::NotPerfect { scheme: i, violation });
        }
        let h = dist.entropy(&secret)?;
        let others: Vec<&str> = (0..comb.len())
            .filter(|&j| j != i)
            .flat_map(|j| comb.secret(j))
            .collect();
        for bits in 0..(1u32 << comb.n()) {
            let subset = Subset::from_bits(bits);
            if comb.structures[i].is_authorized(subset)? {
                continue;
            }
            let mut given = others.clone();
            given.extend(comb.share_names(subset));
            let value = dist.conditional_entropy(&secret, &given)?;
            if (value - h).abs() > TOL {
                violations.push(CombinationViolation::OtherSecretsLeak {
                    scheme: i,
                    subset,
                    value,
                    expected: h,
                });
            }
        }
        for j in i + 1..comb.len() {
            let mi = dist.mutual_information(&secret, &comb.secret(j))?;
            if mi > TOL {
                violations.push(CombinationViolation::DependentPair {
                    first: i,
                    second: j,
                    mi,
                });
            }
        }
    }
    Ok(CombinationReport {
        valid: violations.is_empty(),
        violations,
    })
}

/// A single-variable secret `S` with entropy `h` bits: alphabet size
/// `k = max(2, ⌈2^h⌉)` and masses `(p, (1−p)/(k−1), …)`, with `p` found by
/// bisection (uniform when `h = log2 k`).
pub fn prescribe_entropy(h: f64) -> Result<JointDistribution> {
    if !h.is_finite() || h <= 0.0 {
        return Err(argument(format!("secret entropy must be positive, got {h}")));
    }
    let k = (h.exp2().ceil() as usize).max(2);
    let spec = vec![VariableSpec::new("S", k)];
    let log_k = (k as f64).log2();
    if (log_k - h).abs() <= 1e-12 {
        return JointDistribution::uniform(spec);
    }
    let rest = (k - 1) as f64;
    let entropy_at = |p: f64| shannon(std::iter::once(p).chain((1..k).map(|_| (1.0 - p) / rest)));

    // Entropy falls from log2 k at p = 1/k to 0 at p = 1.
    let (mut lo, mut hi) = (1.0 / k as f64, 1.0);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if entropy_at(mid) > h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = if (entropy_at(lo) - h).abs() <= (entropy_at(hi) - h).abs() { lo } else { hi };
    let masses = std::iter::once(p).chain((1..k).map(|_| (1.0 - p) / rest));
    let dist = JointDistribution::normalized(
        spec,
        masses.enumerate().map(|(i, m)| (vec![i], m)),
        1e-12,
    )?;
    let got = dist.entropy(&["S"])?;
    if (got - h).abs() > TOL {
        return Err(Error::Consistency(format!(
            "prescribed entropy {h} but realized {got}"
        )));
    }
    Ok(dist)
}

/// One ISN scheme per antichain with a positive prescribed value, the secret
/// carrying exactly that many bits, all combined independently.
pub fn prescribe_partials(n: usize, h: &BTreeMap<Antichain, f64>) -> Result<SchemeCombination> {
    let mut schemes = Vec::new();
    for (node, &bits) in h {
        if node.n() != n {
            return Err(argument(format!("{node} is not an antichain over {n} participants")));
        }
        if !bits.is_finite() || bits < 0.0 {
            return Err(argument(format!("value {bits} at {node} is not a nonnegative number")));
        }
        if bits > 0.0 {
            let structure = AccessStructure::new(node.clone());
            schemes.push(construct_isn(&structure, &prescribe_entropy(bits)?)?);
        }
    }
    if schemes.is_empty() {
        return Err(argument(
            "every prescribed value is zero; there is no scheme to build",
        ));
    }
    combine(&schemes)
}

/// Entropy of the secrets for which every set of `node` is authorized.
pub fn reference_ssp_value(comb: &SchemeCombination, node: &Antichain) -> Result<f64> {
    if node.n() != comb.n() {
        return Err(argument(format!(
            "{node} is over {} participants, the combination over {}",
            node.n(),
            comb.n()
        )));
    }
    comb.secrets_entropy(&comb.authorized_secrets(node))
}
