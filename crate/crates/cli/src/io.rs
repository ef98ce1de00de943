//! JSON formats for distributions, access structures, schemes and sources.

use std::collections::BTreeMap;
use std::path::Path;

use pid_secret::lattice::Antichain;
use pid_secret::measures::Sources;
use pid_secret::prob::{Entropic, JointDistribution, VariableSpec};
use pid_secret::secret::{AccessStructure, SecretSharingScheme};
use pid_secret::{Error, TOL};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

/// Totals further than this from 1 are rejected; closer ones are rescaled.
pub const NORMALIZATION_SLACK: f64 = 1e-6;

#[derive(Serialize, Deserialize)]
struct VariableJson {
    name: String,
    cardinality: usize,
}

#[derive(Serialize, Deserialize)]
struct MassJson {
    outcome: Vec<usize>,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    variables: Vec<VariableJson>,
    probabilities: Vec<MassJson>,
}

#[derive(Serialize, Deserialize)]
struct StructureJson {
    n: usize,
    minimal: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct SchemeJson {
    variables: Vec<VariableJson>,
    probabilities: Vec<MassJson>,
    secret: Vec<String>,
    participants: Vec<Vec<String>>,
    structure: StructureJson,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    Many(Vec<T>),
    One(T),
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let message = e.to_string();
        let message = match message.rfind(" at line ") {
            Some(cut) => message[..cut].to_string(),
            None => message,
        };
        CliError::Json {
            line: e.line(),
            column: e.column(),
            message,
        }
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn build_distribution(variables: Vec<VariableJson>, probabilities: Vec<MassJson>) -> Result<JointDistribution> {
    let variables: Vec<VariableSpec> = variables
        .into_iter()
        .map(|v| VariableSpec::new(v.name, v.cardinality))
        .collect();
    let entries: Vec<_> = probabilities.into_iter().map(|m| (m.outcome, m.p)).collect();
    let total: f64 = entries.iter().map(|(_, p)| p).sum();
    // Totals already within TOL are kept as written so that a file round trip
    // reproduces every mass exactly.
    let dist = if (total - 1.0).abs() <= TOL {
        JointDistribution::new(variables, entries)?
    } else {
        JointDistribution::normalized(variables, entries, NORMALIZATION_SLACK)?
    };
    Ok(dist)
}

fn distribution_parts(dist: &JointDistribution) -> (Vec<VariableJson>, Vec<MassJson>) {
    let variables = dist
        .variables()
        .iter()
        .map(|v| VariableJson {
            name: v.name.clone(),
            cardinality: v.cardinality,
        })
        .collect();
    let probabilities = dist
        .support()
        .iter()
        .map(|(o, p)| MassJson {
            outcome: o.clone(),
            p: *p,
        })
        .collect();
    (variables, probabilities)
}

pub fn parse_distribution(text: &str) -> Result<JointDistribution> {
    let d: DistributionJson = parse(text)?;
    build_distribution(d.variables, d.probabilities)
}

pub fn distribution_to_json(dist: &JointDistribution) -> String {
    let (variables, probabilities) = distribution_parts(dist);
    to_json(&DistributionJson {
        variables,
        probabilities,
    })
}

pub fn parse_structure(text: &str) -> Result<AccessStructure> {
    let s: StructureJson = parse(text)?;
    Ok(AccessStructure::from_members(s.n, s.minimal)?)
}

fn structure_json(a: &AccessStructure) -> StructureJson {
    StructureJson {
        n: a.n(),
        minimal: a
            .minimal()
            .sets()
            .iter()
            .map(|s| s.members().collect())
            .collect(),
    }
}

pub fn structure_to_json(a: &AccessStructure) -> String {
    to_json(&structure_json(a))
}

fn build_scheme(s: SchemeJson) -> Result<SecretSharingScheme> {
    let dist = build_distribution(s.variables, s.probabilities)?;
    let structure = AccessStructure::from_members(s.structure.n, s.structure.minimal)?;
    Ok(SecretSharingScheme::new(dist, s.secret, s.participants, structure)?)
}

fn scheme_json(scheme: &SecretSharingScheme) -> SchemeJson {
    let (variables, probabilities) = distribution_parts(scheme.dist());
    SchemeJson {
        variables,
        probabilities,
        secret: scheme.secret().iter().map(|s| s.to_string()).collect(),
        participants: scheme.participants().to_vec(),
        structure: structure_json(scheme.structure()),
    }
}

/// One scheme object, or an array of them.
pub fn parse_schemes(text: &str) -> Result<Vec<SecretSharingScheme>> {
    match parse::<OneOrMany<SchemeJson>>(text)? {
        OneOrMany::One(s) => Ok(vec![build_scheme(s)?]),
        OneOrMany::Many(v) => v.into_iter().map(build_scheme).collect(),
    }
}

pub fn schemes_to_json(schemes: &[SecretSharingScheme]) -> String {
    to_json(&schemes.iter().map(scheme_json).collect::<Vec<_>>())
}

/// A list of shares, e.g. `[["X1"],["X2","X3"]]`.
pub fn parse_sources(text: &str) -> Result<Sources> {
    let shares: Vec<Vec<String>> = parse(text)?;
    Ok(Sources::new(shares)?)
}

/// Inline JSON when the argument starts with `[`, otherwise a file path.
pub fn sources_argument(arg: &str) -> Result<Sources> {
    if arg.trim_start().starts_with('[') {
        parse_sources(arg)
    } else {
        parse_sources(&read_file(Path::new(arg))?)
    }
}

/// Comma-separated variable names; every name must exist in `dist`.
pub fn parse_target(arg: &str, dist: &dyn Entropic) -> Result<Vec<String>> {
    let names: Vec<String> = arg
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(Error::Argument("empty target".into()).into());
    }
    for n in &names {
        if dist.variable(n).is_none() {
            return Err(Error::UnknownVariable(n.clone()).into());
        }
    }
    Ok(names)
}

pub fn parse_antichain(n: usize, text: &str) -> Result<Antichain> {
    Antichain::parse(n, text).map_err(|e| CliError::Antichain {
        text: text.to_string(),
        message: match e {
            Error::Argument(m) => m,
            other => other.to_string(),
        },
    })
}

/// A map from antichain text to bits, e.g. `{"{1}{23}": 1.0}`.
pub fn parse_prescription(n: usize, text: &str) -> Result<BTreeMap<Antichain, f64>> {
    let raw: BTreeMap<String, f64> = parse(text)?;
    let mut out = BTreeMap::new();
    for (k, v) in raw {
        let node = parse_antichain(n, &k)?;
        if out.insert(node, v).is_some() {
            return Err(Error::Argument(format!("antichain `{k}` is given twice")).into());
        }
    }
    Ok(out)
}
