//! Runs every acceptance criterion and prints one PASS/FAIL line each.

use std::time::{Duration, Instant};

use pid_secret::broja::{oracle_si_tilde, si_tilde, BivariateInstance, DEFAULT_TOL};
use pid_secret::lattice::{cumulate, moebius_invert, Antichain, PiLattice};
use pid_secret::measures::{check_ssp, Measure};
use pid_secret::prob::{all_outcomes, Entropic, JointDistribution, VariableSpec};
use pid_secret::secret::{
    check_perfect, combine, construct_cyclic_example, construct_isn, prescribe_entropy, AccessStructure,
};
use pid_secret_cli::experiments::{
    cmd_decompose, cmd_epsilon_sweep, cmd_prescribe, cmd_verify_pairs, cmd_xor_counterexample, random_prescription,
    solo_pair, xor_system, CliMeasure, DecomposeInput,
};
use pid_secret_cli::report::ExperimentReport;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:.2?}, limit {limit:?}"))
}

fn verdict(report: &ExperimentReport, check: &str, tol: f64) -> Result<f64, String> {
    let v = report
        .verdict(check)
        .ok_or_else(|| format!("report has no verdict `{check}`"))?;
    ensure(v.pass && v.deviation <= tol, format!("{check}: deviation {:e} ({})", v.deviation, v.detail))?;
    Ok(v.deviation)
}

fn xor_counterexample() -> Outcome {
    let start = Instant::now();
    let r = ok(cmd_xor_counterexample(DEFAULT_TOL))?;
    within_time(start, Duration::from_secs(1))?;
    let expected = [
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
    for (node, v) in expected {
        let row = r.row(node).ok_or_else(|| format!("no row {node}"))?;
        ensure(row.cumulative == Some(v), format!("{node}: {:?} != {v}", row.cumulative))?;
    }
    let p = r.row("{12}{13}{23}").and_then(|row| row.partial).ok_or("no witness row")?;
    ensure((p + 1.0).abs() <= 1e-9, format!("partial {p}"))?;
    ensure(r.passed(), r.render_text())?;
    Ok(format!("partial at {{12}}{{13}}{{23}} = {p}, 16 values matched"))
}

fn cyclic_example() -> Outcome {
    let start = Instant::now();
    let scheme = construct_cyclic_example();
    let report = check_perfect(&scheme);
    ensure(report.perfect && report.violations.is_empty(), format!("{:?}", report.violations))?;
    let hs = ok(scheme.dist().entropy(&scheme.secret()))?;
    ensure((hs - 1.0).abs() <= 1e-9, format!("H(S) = {hs}"))?;
    for share in scheme.participants() {
        let names: Vec<&str> = share.iter().map(String::as_str).collect();
        let h = ok(scheme.dist().entropy(&names))?;
        ensure((h - 2.0).abs() <= 1e-9, format!("H({names:?}) = {h}"))?;
    }
    within_time(start, Duration::from_secs(1))?;
    Ok("perfect, H(S) = 1, H(X_i) = 2".into())
}

fn lattice_counts() -> Outcome {
    let start = Instant::now();
    for (n, want) in [(1, 1), (2, 4), (3, 18), (4, 166)] {
        let got = ok(PiLattice::new(n))?.len();
        ensure(got == want, format!("n = {n}: {got} nodes"))?;
    }
    let labels = [
        "{123}", "{12}", "{13}", "{23}", "{12}{13}", "{12}{23}", "{13}{23}", "{1}", "{2}", "{3}",
        "{12}{13}{23}", "{1}{23}", "{2}{13}", "{3}{12}", "{1}{2}", "{1}{3}", "{2}{3}", "{1}{2}{3}",
    ];
    let mut want: Vec<&str> = labels.to_vec();
    want.sort();
    let l = ok(PiLattice::new(3))?;
    let texts: Vec<String> = l.nodes().iter().map(|a| a.to_string()).collect();
    let mut got: Vec<&str> = texts.iter().map(String::as_str).collect();
    got.sort();
    ensure(got == want, format!("{got:?}"))?;
    within_time(start, Duration::from_secs(5))?;
    Ok("1, 4, 18, 166".into())
}

fn authorized_iff_below() -> Outcome {
    let l = ok(PiLattice::new(3))?;
    let mut checked = 0;
    for minimal in l.nodes() {
        let a = AccessStructure::new(minimal.clone());
        for node in l.nodes() {
            let authorized = node
                .sets()
                .iter()
                .map(|s| a.is_authorized(*s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?
                .into_iter()
                .all(|x| x);
            ensure(authorized == ok(minimal.leq(node))?, format!("{minimal} vs {node}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs, no exceptions"))
}

fn measures_have_ssp() -> Outcome {
    let bit = ok(prescribe_entropy(1.0))?;
    let l = ok(PiLattice::new(3))?;
    let mut worst: f64 = 0.0;
    for minimal in l.nodes() {
        let scheme = ok(construct_isn(&AccessStructure::new(minimal.clone()), &bit))?;
        for m in [Measure::IMin, Measure::IMmi] {
            let r = ok(check_ssp(m, &scheme, &l))?;
            ensure(r.pass, format!("{m} on {minimal}: {:?}", r.deviations))?;
            worst = worst.max(r.max_deviation());
        }
    }
    Ok(format!("36 checks, max deviation {worst:e}"))
}

fn prescribe() -> Outcome {
    let h = ok(random_prescription(3, 20240917))?;
    let r = ok(cmd_prescribe(3, &h))?;
    let a = verdict(&r, "prescribed partials recovered", 1e-6)?;
    let b = verdict(&r, "other partials vanish", 1e-6)?;
    Ok(format!("{} positive nodes, deviations {a:e} / {b:e}", h.values().filter(|&&v| v > 0.0).count()))
}

fn combined_mutual_information(reports: &[ExperimentReport]) -> Outcome {
    let mut worst: f64 = 0.0;
    for r in reports {
        worst = worst.max(verdict(r, "I(S;X_A) = H(secrets A knows)", 1e-9)?);
    }
    Ok(format!("max deviation {worst:e}"))
}

fn combined_si_and_qstar(reports: &[ExperimentReport]) -> Outcome {
    let mut worst = [0.0f64; 3];
    for r in reports {
        worst[0] = worst[0].max(verdict(r, "SI~ = H(secrets both sets know)", 1e-4)?);
        worst[1] = worst[1].max(verdict(r, "Q* marginal residual", 1e-7)?);
        worst[2] = worst[2].max(verdict(r, "solver H(S|X,Y) matches Q*", 2e-6)?);
        let positive = r
            .parameters
            .iter()
            .find(|(k, _)| k == "two-set checks with a positive target")
            .map(|(_, v)| v.as_str());
        ensure(positive.is_some_and(|v| v != "0"), "no two-set check has a positive target")?;
    }
    Ok(format!("SI~ {:e}, Q* residual {:e}, entropy gap {:e}", worst[0], worst[1], worst[2]))
}

fn weak_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [2, 3, 4] {
        let d = ok(JointDistribution::uniform(vec![
            VariableSpec::new("X1", k),
            VariableSpec::new("X2", k),
        ]))?;
        let inst = ok(BivariateInstance::new(&d, &["X1", "X2"], &["X1"], &["X2"]))?;
        let si = ok(si_tilde(&inst, DEFAULT_TOL))?;
        ensure(si <= 1e-4, format!("k = {k}: {si}"))?;
        worst = worst.max(si);
    }
    Ok(format!("max SI~ {worst:e}"))
}

fn gate(f: impl Fn(usize, usize) -> usize) -> Result<JointDistribution, String> {
    let vars = vec![
        VariableSpec::new("S", 2),
        VariableSpec::new("X", 2),
        VariableSpec::new("Y", 2),
    ];
    ok(JointDistribution::new(
        vars,
        (0..4usize).map(|w| (vec![f(w >> 1, w & 1), w >> 1, w & 1], 0.25)),
    ))
}

fn random_binary(seed: u64) -> Result<JointDistribution, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..8).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let vars = vec![
        VariableSpec::new("S", 2),
        VariableSpec::new("X", 2),
        VariableSpec::new("Y", 2),
    ];
    ok(JointDistribution::new(
        vars,
        (0..8usize).map(|k| (vec![k >> 2, (k >> 1) & 1, k & 1], w[k] / total)),
    ))
}

fn solver_vs_oracle() -> Outcome {
    let mut instances = Vec::new();
    for d in [gate(|x, y| x ^ y)?, gate(|x, y| x & y)?, random_binary(101)?, random_binary(202)?, random_binary(303)?] {
        instances.push(ok(BivariateInstance::new(&d, &["S"], &["X"], &["Y"]))?);
    }
    let pair = ok(combine(&solo_pair()))?;
    let s = pair.secret_names();
    let x = pair.share_names(ok(pid_secret::lattice::Subset::from_members([1]))?);
    let y = pair.share_names(ok(pid_secret::lattice::Subset::from_members([2]))?);
    instances.push(ok(BivariateInstance::new(pair.dist(), &s, &x, &y))?);

    let mut worst: f64 = 0.0;
    for (i, inst) in instances.iter().enumerate() {
        let si = ok(si_tilde(inst, DEFAULT_TOL))?;
        let oracle = ok(oracle_si_tilde(inst, 101))?;
        ensure((si - oracle).abs() <= 2e-3, format!("instance {i}: {si} vs {oracle}"))?;
        worst = worst.max((si - oracle).abs());
    }
    Ok(format!("{} instances, max gap {worst:e}", instances.len()))
}

fn random_distribution(rng: &mut ChaCha8Rng) -> Result<JointDistribution, String> {
    let cards: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=3)).collect();
    let outcomes = ok(all_outcomes(&cards))?;
    let w: Vec<f64> = outcomes.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = w.iter().sum();
    let vars = ["A", "B", "C"]
        .iter()
        .zip(&cards)
        .map(|(n, &c)| VariableSpec::new(*n, c))
        .collect();
    ok(JointDistribution::new(vars, outcomes.into_iter().zip(w.iter().map(|p| p / total))))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lattices: Vec<PiLattice> = (1..=4).map(PiLattice::new).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let mut moebius: f64 = 0.0;
    for i in 0..100 {
        let l = &lattices[i % 4];
        let values: Vec<f64> = (0..l.len()).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let v = ok(moebius_invert(l, &values))?;
        let back = ok(cumulate(l, v.partial()))?;
        for (a, b) in back.iter().zip(&values) {
            moebius = moebius.max((a - b).abs());
        }
    }
    ensure(moebius <= 1e-9, format!("Möbius round trip error {moebius:e}"))?;

    let mut info: f64 = 0.0;
    for _ in 0..100 {
        let d = random_distribution(&mut rng)?;
        let chain = ok(d.entropy(&["A", "B"]))? - ok(d.entropy(&["A"]))? - ok(d.conditional_entropy(&["B"], &["A"]))?;
        let sym = ok(d.mutual_information(&["A"], &["B", "C"]))? - ok(d.mutual_information(&["B", "C"], &["A"]))?;
        info = info.max(chain.abs()).max(sym.abs());
    }
    ensure(info <= 1e-9, format!("entropy identity error {info:e}"))?;

    let l = &lattices[2];
    let nodes = l.nodes();
    for a in nodes {
        ensure(ok(a.leq(a))?, format!("{a} not reflexive"))?;
        for b in nodes {
            let ab = ok(a.leq(b))?;
            ensure(!(ab && ok(b.leq(a))? && a != b), format!("{a}, {b} not antisymmetric"))?;
            for c in nodes {
                ensure(!(ab && ok(b.leq(c))?) || ok(a.leq(c))?, format!("{a} {b} {c} not transitive"))?;
            }
        }
    }
    let bottom = ok(Antichain::bottom(3))?;
    let top = ok(Antichain::top(3))?;
    for a in nodes {
        ensure(ok(bottom.leq(a))? && ok(a.leq(&top))?, format!("{a} outside the bounds"))?;
    }
    Ok(format!("Möbius {moebius:e}, identities {info:e}, order axioms on 18 nodes"))
}

fn epsilon_sweep() -> Outcome {
    let measures = [CliMeasure::IMin, CliMeasure::IMmi, CliMeasure::BrojaPair];
    let eps = [0.0, 0.01, 0.1, 0.25, 0.5];
    let sweep = ok(cmd_epsilon_sweep(&eps, &measures, DEFAULT_TOL, false))?;
    let input = DecomposeInput::Distribution(xor_system());
    let target = ["S".to_string()];
    for m in measures {
        let exact = ok(cmd_decompose(&input, Some(&target), None, m, DEFAULT_TOL, false))?;
        let swept: Vec<_> = sweep
            .rows
            .iter()
            .filter(|r| r.epsilon == 0.0 && r.measure == m)
            .map(|r| &r.row)
            .collect();
        ensure(swept.len() == exact.rows.len(), format!("{}: row count", m.name()))?;
        for (a, b) in swept.iter().zip(&exact.rows) {
            let same = |x: Option<f64>, y: Option<f64>| x.map(f64::to_bits) == y.map(f64::to_bits);
            ensure(
                a.node == b.node && same(a.cumulative, b.cumulative) && same(a.partial, b.partial),
                format!("{}: {:?} vs {:?}", m.name(), a, b),
            )?;
        }
    }
    let mut worst: f64 = 0.0;
    for c in &sweep.checks {
        if c.epsilon == 0.5 {
            ensure(c.mutual_information <= 1e-9, format!("I(X3;X1,X2) = {}", c.mutual_information))?;
        }
        if [0.01, 0.1, 0.25].contains(&c.epsilon) {
            let d = (c.conditional_entropy - c.binary_entropy).abs();
            ensure(d <= 1e-9, format!("ε = {}: {d:e}", c.epsilon))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("ε = 0 rows identical, binary entropy gap {worst:e}"))
}

fn main() {
    let suite_start = Instant::now();
    let catalog: Result<Vec<ExperimentReport>, String> =
        [2, 3].iter().map(|&n| ok(cmd_verify_pairs(n, DEFAULT_TOL, true))).collect();
    let from_catalog = |f: fn(&[ExperimentReport]) -> Outcome| match &catalog {
        Ok(r) => f(r),
        Err(e) => Err(e.clone()),
    };

    let criteria: Vec<Criterion> = vec![
        ("XOR counterexample partial term", Box::new(xor_counterexample)),
        ("cyclic scheme is perfect", Box::new(cyclic_example)),
        ("lattice counts", Box::new(lattice_counts)),
        ("authorized iff above the minimal sets", Box::new(authorized_iff_below)),
        ("imin and immi have the secret sharing property", Box::new(measures_have_ssp)),
        ("prescribed partial terms are recovered", Box::new(prescribe)),
        ("combined-scheme mutual information", Box::new(|| from_catalog(combined_mutual_information))),
        ("combined-scheme SI~ and Q*", Box::new(|| from_catalog(combined_si_and_qstar))),
        ("weak identity", Box::new(weak_identity)),
        ("solver agrees with the grid oracle", Box::new(solver_vs_oracle)),
        ("property suites", Box::new(property_suites)),
        ("noisy XOR sweep", Box::new(epsilon_sweep)),
    ];

    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let t = start.elapsed();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({t:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({t:.2?}): {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.2?}",
        criteria.len() - failed,
        criteria.len(),
        suite_start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
