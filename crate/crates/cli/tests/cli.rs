use std::process::Command;

use pid_secret::prob::JointDistribution;
use pid_secret_cli::experiments::{
    cmd_decompose, cmd_epsilon_sweep, cmd_verify_pairs, cmd_xor_counterexample, noisy_xor, xor_system, CliMeasure,
    DecomposeInput,
};
use pid_secret_cli::io::{distribution_to_json, parse_distribution, parse_schemes, schemes_to_json};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pidss(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_pidss"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn distribution_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let w: Vec<f64> = (0..12).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = w.iter().sum();
        let vars = vec![
            pid_secret::prob::VariableSpec::new("A", 3),
            pid_secret::prob::VariableSpec::new("B", 4),
        ];
        let d = JointDistribution::new(vars, (0..12usize).map(|k| (vec![k / 4, k % 4], w[k] / total))).unwrap();
        let back = parse_distribution(&distribution_to_json(&d)).unwrap();
        assert_eq!(back, d);
    }
    for eps in [0.0, 0.1, 0.37] {
        let d = noisy_xor(eps).unwrap();
        assert_eq!(parse_distribution(&distribution_to_json(&d)).unwrap(), d);
    }
}

#[test]
fn scheme_round_trip() {
    let schemes = pid_secret_cli::experiments::solo_pair();
    let text = schemes_to_json(&schemes);
    let back = parse_schemes(&text).unwrap();
    assert_eq!(schemes_to_json(&back), text);
}

#[test]
fn outputs_are_deterministic() {
    assert_eq!(
        cmd_xor_counterexample(1e-6).unwrap().render_text(),
        cmd_xor_counterexample(1e-6).unwrap().render_text()
    );
    let eps = [0.0, 0.2];
    let m = [CliMeasure::IMin, CliMeasure::BrojaPair];
    let a = cmd_epsilon_sweep(&eps, &m, 1e-6, false).unwrap().render_csv();
    let b = cmd_epsilon_sweep(&eps, &m, 1e-6, true).unwrap().render_csv();
    assert_eq!(a, b);
    let a = cmd_verify_pairs(2, 1e-6, false).unwrap().render_text();
    let b = cmd_verify_pairs(2, 1e-6, true).unwrap().render_text();
    assert_eq!(a, b);
}

#[test]
fn immi_is_continuous_in_epsilon() {
    let target = ["S".to_string()];
    let values = |eps: f64| {
        let input = DecomposeInput::Distribution(noisy_xor(eps).unwrap());
        cmd_decompose(&input, Some(&target), None, CliMeasure::IMmi, 1e-6, false)
            .unwrap()
            .rows
            .into_iter()
            .map(|r| r.cumulative.unwrap())
            .collect::<Vec<_>>()
    };
    for base in [0.0, 0.1, 0.3, 0.5] {
        let v = values(base);
        let mut prev = f64::INFINITY;
        for step in [1e-2, 1e-4, 1e-6] {
            let w = values(base + step);
            let gap = v.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(gap <= prev + 1e-12, "ε = {base}: gap grew to {gap}");
            prev = gap;
        }
        assert!(prev < 1e-3, "ε = {base}: gap {prev}");
    }
}

#[test]
fn decompose_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("xor.json");
    std::fs::write(&dist, distribution_to_json(&xor_system())).unwrap();
    let out = pidss(&["decompose", "--dist", dist.to_str().unwrap(), "--target", "S", "--measure", "immi"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("node,cumulative_bits,partial_bits\n"));
    assert!(csv.contains("\n{1}{23},1.000000,"));
    assert!(csv.ends_with("# monotone: yes\n"));
    assert!(!csv.contains('\r'));

    let pair = dir.path().join("pair.json");
    let out = pidss(&["example", "solo-pair", "--out", pair.to_str().unwrap()]);
    assert!(out.status.success());
    let out = pidss(&["decompose", "--schemes", pair.to_str().unwrap(), "--measure", "reference"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.contains("{1},1.000000,1.000000\n{2},1.000000,1.000000\n"), "{csv}");
}

#[test]
fn errors_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"variables\": [\n    {\"name\": 3}\n  ]\n}\n").unwrap();
    let out = pidss(&["decompose", "--dist", bad.to_str().unwrap(), "--target", "S"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");

    let zeros = dir.path().join("zeros.json");
    std::fs::write(&zeros, r#"{"{1}": 0, "{12}": 0}"#).unwrap();
    let out = pidss(&["prescribe", "2", zeros.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("zero"));

    let out = pidss(&["epsilon-sweep", "--epsilon", "0.2,1.5"]);
    assert_eq!(out.status.code(), Some(2));

    let out = pidss(&["lattice", "6"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pidss(&["lattice", "4", "--count"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "166\n");

    let out = pidss(&["xor-counterexample"]);
    assert_eq!(out.status.code(), Some(0));
    let out = pidss(&["prescribe", "3", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
}
