//! End-to-end tests of the `nodsis` binary: exit codes, envelope layout,
//! determinism, config round-trips, and the preset experiments.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nodsis"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn nodsis");
    assert!(
        out.status.success(),
        "nodsis {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn graph_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("graphs").join(name)
}

/// CSV payload: everything after the end-of-config marker.
fn payload(text: &str) -> String {
    let marker = "# --- end resolved config ---\n";
    let idx = text.find(marker).expect("config marker present");
    text[idx + marker.len()..].to_string()
}

/// The resolved config block, with the comment prefix stripped.
fn embedded_config(text: &str) -> String {
    let begin = "# --- resolved config ---\n";
    let end = "# --- end resolved config ---";
    let a = text.find(begin).expect("config begin marker") + begin.len();
    let b = text.find(end).expect("config end marker");
    text[a..b]
        .lines()
        .map(|l| l.strip_prefix("# ").unwrap_or(l))
        .collect::<Vec<_>>()
        .join("\n")
}

fn meta_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    let prefix = format!("# {key} = ");
    text.lines()
        .find(|l| l.starts_with(&prefix))
        .map(|l| &l[prefix.len()..])
}

#[test]
fn usage_errors_exit_2_and_help_exits_0() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["simulate", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = bin().args(["simulate", "--help"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bad_parameters_and_configs_exit_2() {
    // Invalid model parameter.
    let out = bin()
        .args(["equilibria", "--beta", "-1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Unknown preset.
    let out = bin()
        .args(["simulate", "--preset", "fig99"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Unsupported format.
    let out = bin()
        .args(["equilibria", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Unknown key in a config file.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "[model]\nbeta = 0.5\nbogus = 1\n").unwrap();
    let out = bin()
        .args(["equilibria", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    // Missing graph file referenced by a config.
    let cfg = dir.path().join("missing.cfg");
    std::fs::write(
        &cfg,
        "[network]\ncontact = nowhere.txt\ncommunication = nowhere.txt\n",
    )
    .unwrap();
    let out = bin()
        .args(["network", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_fixed_point_yields_a_constant_run() {
    let out = run_ok(&[
        "simulate", "--beta", "0.25", "--p0", "0", "--x0", "0",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let body = payload(&text);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("t,p,x"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1, "fixed point converges immediately");
    assert!(rows[0].starts_with("0.0000000000000000e0,0.0000000000000000e0,"));
    assert_eq!(meta_value(&text, "run-0").unwrap(), "p0=0 x0=0 converged=true limit=IIFE");
}

#[test]
fn identical_config_and_seed_reproduce_the_payload_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, _) in [(&a, 0), (&b, 1)] {
        run_ok(&[
            "simulate",
            "--preset",
            "fig2",
            "--beta",
            "0.75",
            "--seed",
            "42",
            "--out",
            path.to_str().unwrap(),
        ]);
    }
    let ta = std::fs::read_to_string(&a).unwrap();
    let tb = std::fs::read_to_string(&b).unwrap();
    assert_eq!(payload(&ta), payload(&tb));
}

#[test]
fn embedded_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    run_ok(&[
        "simulate",
        "--preset",
        "fig2",
        "--beta",
        "0.44",
        "--seed",
        "7",
        "--out",
        first.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&first).unwrap();
    let cfg_path = dir.path().join("replay.cfg");
    std::fs::write(&cfg_path, embedded_config(&text)).unwrap();

    let second = dir.path().join("second.csv");
    run_ok(&[
        "simulate",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    let replay = std::fs::read_to_string(&second).unwrap();
    assert_eq!(payload(&text), payload(&replay));
}

#[test]
fn fig2_runs_split_their_limits_by_initial_opinion_sign() {
    let out = run_ok(&["simulate", "--preset", "fig2", "--beta", "0.75"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut seen = 0;
    for run in 0..12 {
        let meta = meta_value(&text, &format!("run-{run}")).expect("run meta line");
        let x0: f64 = meta
            .split_whitespace()
            .find_map(|f| f.strip_prefix("x0="))
            .unwrap()
            .parse()
            .unwrap();
        let limit = meta
            .split_whitespace()
            .find_map(|f| f.strip_prefix("limit="))
            .unwrap();
        assert!(meta.contains("converged=true"), "run {run}: {meta}");
        let expected = if x0 > 0.0 { "OEE_PLUS" } else { "OEE_MINUS" };
        assert_eq!(limit, expected, "run {run}: {meta}");
        seen += 1;
    }
    assert_eq!(seen, 12);
}

#[test]
fn fig3_averse_runs_eradicate_the_infection() {
    let out = run_ok(&["simulate", "--preset", "fig3", "--tend", "1500"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let body = payload(&text);
    let mut final_p = [f64::NAN; 12];
    for line in body.lines().skip(1) {
        let mut fields = line.split(',');
        let run: usize = fields.next().unwrap().parse().unwrap();
        let _t = fields.next().unwrap();
        let p: f64 = fields.next().unwrap().parse().unwrap();
        final_p[run] = p; // rows are time-ordered per run
    }
    let mut averse = 0;
    for run in 0..12 {
        let meta = meta_value(&text, &format!("run-{run}")).unwrap();
        let x0: f64 = meta
            .split_whitespace()
            .find_map(|f| f.strip_prefix("x0="))
            .unwrap()
            .parse()
            .unwrap();
        let limit = meta
            .split_whitespace()
            .find_map(|f| f.strip_prefix("limit="))
            .unwrap();
        if x0 < 0.0 {
            averse += 1;
            assert!(
                final_p[run] < 1e-6,
                "averse run {run} ended at p = {}",
                final_p[run]
            );
            assert_eq!(limit, "OIFE_MINUS", "run {run}: {meta}");
        } else {
            assert!(
                final_p[run] > 0.6,
                "seeking run {run} ended at p = {}",
                final_p[run]
            );
            assert_eq!(limit, "OEE_PLUS", "run {run}: {meta}");
        }
    }
    assert!(averse > 0, "the seeded fan contains averse starts");
}

#[test]
fn equilibria_row_counts_match_the_regimes() {
    let out = run_ok(&["equilibria", "--beta", "0.75"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(payload(&text).lines().count() - 1, 4);
    assert_eq!(meta_value(&text, "regime"), Some("BISTABLE_OPINIONATED"));

    let out = run_ok(&["equilibria", "--beta", "0.25"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(payload(&text).lines().count() - 1, 1);
    assert_eq!(meta_value(&text, "regime"), Some("PRE_TRANSCRITICAL"));
}

#[test]
fn equilibria_warns_when_the_urgency_assumption_fails() {
    let out = run_ok(&["equilibria", "--beta", "0.75", "--u0", "1.2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(meta_value(&text, "assumption1"), Some("false"));
    assert!(meta_value(&text, "warning").is_some());
    assert_eq!(meta_value(&text, "regime"), None);
    // The equilibrium table is still produced.
    assert!(payload(&text).lines().count() > 1);
}

#[test]
fn every_preset_finishes_well_inside_a_minute() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["bifurcate", "--preset", "fig1a"],
        &["bifurcate", "--preset", "fig1b"],
        &["simulate", "--preset", "fig2", "--beta", "0.75"],
        &["simulate", "--preset", "fig3"],
        &["network", "--preset", "fig4-coop"],
        &["network", "--preset", "fig4-ant"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let out = dir.path().join(format!("p{i}.csv"));
        let started = std::time::Instant::now();
        let mut args = case.to_vec();
        args.extend(["--out", out.to_str().unwrap()]);
        run_ok(&args);
        let elapsed = started.elapsed();
        assert!(
            elapsed.as_secs() < 60,
            "{case:?} took {elapsed:?}"
        );
    }
}

#[test]
fn bifurcate_presets_produce_the_expected_diagrams() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("fig1a.csv");
    run_ok(&["bifurcate", "--preset", "fig1a", "--out", out_a.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out_a).unwrap();
    assert_eq!(meta_value(&text, "branches"), Some("2"));
    assert_eq!(meta_value(&text, "events"), Some("1"));
    let events = std::fs::read_to_string(dir.path().join("fig1a.events.csv")).unwrap();
    let events_body = payload(&events);
    let event_rows: Vec<&str> = events_body.lines().skip(1).collect();
    assert_eq!(event_rows.len(), 1);
    assert!(event_rows[0].contains("transcritical,IIFE,IEE"));
    let first: f64 = event_rows[0].split(',').next().unwrap().parse().unwrap();
    assert!((first - 0.3).abs() < 2.5e-3);

    let out_b = dir.path().join("fig1b.csv");
    run_ok(&["bifurcate", "--preset", "fig1b", "--out", out_b.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out_b).unwrap();
    assert_eq!(meta_value(&text, "branches"), Some("4"));
    assert_eq!(meta_value(&text, "events"), Some("3"));
    let events = std::fs::read_to_string(dir.path().join("fig1b.events.csv")).unwrap();
    let events_body = payload(&events);
    let rows: Vec<&str> = events_body.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    // Payload rows are sorted by class then parameter.
    let body = payload(&text);
    let classes: Vec<&str> = body
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    let mut sorted = classes.clone();
    sorted.sort_by_key(|c| match *c {
        "IIFE" => 0,
        "IEE" => 1,
        "OEE_MINUS" => 2,
        "OEE_PLUS" => 3,
        "OIFE_MINUS" => 4,
        _ => 5,
    });
    assert_eq!(classes, sorted);
}

#[test]
fn degenerate_single_point_sweep_still_exports() {
    let out = run_ok(&[
        "bifurcate",
        "--sweep-min",
        "0.75",
        "--sweep-max",
        "0.75",
        "--sweep-points",
        "1",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(meta_value(&text, "branches"), Some("4"));
    assert_eq!(meta_value(&text, "events"), Some("0"));
}

#[test]
fn basin_command_counts_and_reproducibility() {
    let args = ["basin", "--beta", "0.75", "--samples", "24", "--seed", "9"];
    let a = String::from_utf8(run_ok(&args).stdout).unwrap();
    let b = String::from_utf8(run_ok(&args).stdout).unwrap();
    assert_eq!(payload(&a), payload(&b));
    let body = payload(&a);
    let rows: Vec<&str> = body.lines().skip(1).collect();
    assert_eq!(rows.len(), 24);
    let plus: usize = meta_value(&a, "count-OEE_PLUS").unwrap().parse().unwrap();
    let minus: usize = meta_value(&a, "count-OEE_MINUS").unwrap().parse().unwrap();
    assert_eq!(plus + minus, 24, "all samples land on an opinionated branch");
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        let x0: f64 = fields[2].parse().unwrap();
        let expected = if x0 > 0.0 { "OEE_PLUS" } else { "OEE_MINUS" };
        assert_eq!(fields[4], expected, "{row}");
    }
}

#[test]
fn network_presets_reach_the_expected_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let coop = dir.path().join("coop.csv");
    run_ok(&[
        "network",
        "--preset",
        "fig4-coop",
        "--x0-sign",
        "neg",
        "--out",
        coop.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&coop).unwrap();
    assert_eq!(meta_value(&text, "outcome"), Some("AGREEMENT_AVERSE"));
    let consensus = std::fs::read_to_string(dir.path().join("coop.consensus.csv")).unwrap();
    for row in payload(&consensus).lines().skip(1) {
        let diff: f64 = row.split(',').next_back().unwrap().parse().unwrap();
        assert!(diff < 0.0, "aversion undercuts the baseline: {row}");
    }

    let seeking = dir.path().join("seek.csv");
    run_ok(&[
        "network",
        "--preset",
        "fig4-coop",
        "--x0-sign",
        "pos",
        "--out",
        seeking.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&seeking).unwrap();
    assert_eq!(meta_value(&text, "outcome"), Some("AGREEMENT_SEEKING"));
    let consensus = std::fs::read_to_string(dir.path().join("seek.consensus.csv")).unwrap();
    for row in payload(&consensus).lines().skip(1) {
        let diff: f64 = row.split(',').next_back().unwrap().parse().unwrap();
        assert!(diff > 0.0, "risk seeking exceeds the baseline: {row}");
    }

    let ant = dir.path().join("ant.csv");
    run_ok(&[
        "network",
        "--preset",
        "fig4-ant",
        "--out",
        ant.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&ant).unwrap();
    assert_eq!(meta_value(&text, "outcome"), Some("DISSENSUS"));
}

#[test]
fn single_node_network_equals_the_scalar_run() {
    let single = graph_path("single_node.txt");
    let dir = tempfile::tempdir().unwrap();
    let net_out = dir.path().join("net.csv");
    run_ok(&[
        "network",
        "--contact",
        single.to_str().unwrap(),
        "--communication",
        single.to_str().unwrap(),
        "--p0",
        "0.1",
        "--x0",
        "0.3",
        "--out",
        net_out.to_str().unwrap(),
    ]);
    let net = std::fs::read_to_string(&net_out).unwrap();
    let scalar = String::from_utf8(
        run_ok(&["simulate", "--p0", "0.1", "--x0", "0.3"]).stdout,
    )
    .unwrap();
    let net_body = payload(&net);
    let scalar_body = payload(&scalar);
    let net_rows: Vec<Vec<&str>> = net_body
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let scalar_rows: Vec<Vec<&str>> = scalar_body
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(net_rows.len(), scalar_rows.len());
    for (n, s) in net_rows.iter().zip(&scalar_rows) {
        assert_eq!(n[0], s[0], "times agree");
        assert_eq!(n[1], "0", "single node id");
        assert_eq!(n[2], s[1], "infected fraction identical");
        assert_eq!(n[3], s[2], "opinion identical");
    }
}

#[test]
fn oversized_steps_exit_3() {
    let out = bin()
        .args([
            "simulate", "--beta", "40", "--p0", "0.9", "--x0", "0.9", "--dt", "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unconverged_network_runs_exit_4() {
    let out = bin()
        .args(["network", "--preset", "fig4-coop", "--tend", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
