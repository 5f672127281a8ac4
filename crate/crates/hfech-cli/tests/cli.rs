//! File formats, exit codes, determinism, caching, and the golden
//! corpus.

use std::path::{Path, PathBuf};

use hfech_cli::input::InputDocument;
use hfech_cli::report::ReportDocument;
use hfech_cli::{run, EXIT_FAIL, EXIT_INPUT, EXIT_NOT_STABILIZED, EXIT_OK};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(format!("{name}.json"))
}

fn run_cli(args: &[&str]) -> i32 {
    let mut argv = vec!["hfech".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    run(argv)
}

#[test]
fn input_documents_round_trip_bit_identically() {
    for name in ["trivial", "acyclic", "graded_p4", "h1_pair", "stress"] {
        let text = std::fs::read_to_string(corpus(name)).unwrap();
        let doc = InputDocument::parse(&text).unwrap();
        assert_eq!(doc.to_pretty_json(), text, "{name} round trip");
        // and the reparse agrees
        let again = InputDocument::parse(&doc.to_pretty_json()).unwrap();
        assert_eq!(doc, again);
    }
}

#[test]
fn parse_errors_carry_positions() {
    let err = InputDocument::parse("{\n  \"format\": \"hfech-input/1\",\n  broken\n}").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("line 3"), "missing position in {msg:?}");
}

#[test]
fn unknown_generator_reference_is_an_input_error() {
    let text = r#"{
  "format": "hfech-input/1",
  "p": 0,
  "generators": [{ "name": "x", "grading": 0 }],
  "differential": [{ "from": "x", "to": "ghost", "t_power": 0, "coeff": "1" }]
}"#;
    let doc = InputDocument::parse(text).unwrap();
    let err = doc.to_hf().unwrap_err().to_string();
    assert!(err.contains("ghost"), "{err}");
}

#[test]
fn negative_translation_power_is_rejected_with_the_edge() {
    let text = r#"{
  "format": "hfech-input/1",
  "p": 0,
  "generators": [{ "name": "x", "grading": 0 }, { "name": "y", "grading": 1 }],
  "differential": [{ "from": "x", "to": "y", "t_power": -1, "coeff": "1" }]
}"#;
    let doc = InputDocument::parse(text).unwrap();
    let err = doc.to_hf().unwrap_err().to_string();
    assert!(err.contains("x -> y"), "{err}");
    assert!(err.contains("negative"), "{err}");
}

#[test]
fn validate_exit_codes() {
    assert_eq!(
        run_cli(&["validate", corpus("trivial").to_str().unwrap()]),
        EXIT_OK
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run_cli(&["validate", bad.to_str().unwrap()]), EXIT_INPUT);
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run_cli(&["validate", missing.to_str().unwrap()]),
        EXIT_INPUT
    );

    // structurally broken data: differential entry with the wrong degree
    let text = r#"{
  "format": "hfech-input/1",
  "p": 0,
  "generators": [{ "name": "x", "grading": 0 }, { "name": "y", "grading": 0 }],
  "differential": [{ "from": "x", "to": "y", "t_power": 0, "coeff": "1" }]
}"#;
    let wrong = dir.path().join("wrong_degree.json");
    std::fs::write(&wrong, text).unwrap();
    assert_eq!(run_cli(&["validate", wrong.to_str().unwrap()]), EXIT_INPUT);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run_cli(&["verify", "lemma25", "--Lmax", "8"]), EXIT_OK);
    // an undersized tower budget cannot stabilize
    assert_eq!(
        run_cli(&["verify", "lemma25", "--Lmax", "2"]),
        EXIT_NOT_STABILIZED
    );
    // the corrupted-rule test hook must fail
    assert_eq!(
        run_cli(&[
            "verify",
            "collapse",
            corpus("trivial").to_str().unwrap(),
            "--g",
            "1",
            "--dstar-variant",
            "2",
        ]),
        EXIT_FAIL
    );
    // missing input for a statement that needs one
    assert_eq!(run_cli(&["verify", "thm24"]), EXIT_INPUT);
    assert_eq!(run_cli(&["verify", "nonsense"]), EXIT_INPUT);
}

#[test]
fn homology_not_stabilized_exit_code() {
    // at this budget the plus-flavor tower of the stress instance is
    // still moving
    assert_eq!(
        run_cli(&[
            "homology",
            corpus("stress").to_str().unwrap(),
            "--flavor",
            "plus",
            "--g",
            "2",
            "--L",
            "4",
            "--window",
            "-3:3",
        ]),
        EXIT_NOT_STABILIZED
    );
}

fn report_from(args: &[&str], path: &Path) -> ReportDocument {
    let mut argv: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    argv.push("--report");
    argv.push(&p);
    let code = run_cli(&argv);
    assert_eq!(code, EXIT_OK, "run failed: {args:?}");
    ReportDocument::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus("graded_p4");
    let args = [
        "homology",
        input.to_str().unwrap(),
        "--flavor",
        "inf",
        "--g",
        "1",
        "--L",
        "4",
        "--window",
        "-3:3",
    ];
    let a = report_from(&args, &dir.path().join("a.json"));
    let b = report_from(&args, &dir.path().join("b.json"));
    assert_eq!(a.canonical(), b.canonical());
    assert!(a.input_digest.is_some());
}

#[test]
fn cached_and_fresh_runs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let input = corpus("trivial");
    let args = [
        "homology",
        input.to_str().unwrap(),
        "--flavor",
        "inf",
        "--g",
        "1",
        "--L",
        "4",
        "--window",
        "-3:3",
        "--cache-dir",
        cache.to_str().unwrap(),
    ];
    let fresh = report_from(&args, &dir.path().join("fresh.json"));
    assert!(cache.read_dir().unwrap().count() > 0, "cache not populated");
    let cached = report_from(&args, &dir.path().join("cached.json"));
    assert_eq!(fresh.canonical(), cached.canonical());
}

#[test]
fn fresh_runs_match_the_checked_in_goldens() {
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/golden");
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, Vec<&str>)> = vec![
        (
            "trivial.inf",
            vec![
                "homology", "trivial", "--flavor", "inf", "--g", "1", "--L", "4", "--window",
                "-3:3",
            ],
        ),
        (
            "acyclic.inf",
            vec![
                "homology", "acyclic", "--flavor", "inf", "--g", "1", "--L", "4", "--window",
                "-4:4",
            ],
        ),
        (
            "h1_pair.minus",
            vec![
                "homology", "h1_pair", "--flavor", "minus", "--g", "1", "--L", "4", "--window",
                "-3:3",
            ],
        ),
        (
            "stress.plus",
            vec![
                "homology", "stress", "--flavor", "plus", "--g", "2", "--L", "6", "--window",
                "-3:3",
            ],
        ),
        (
            "graded_p4.inf.z",
            vec![
                "homology",
                "graded_p4",
                "--flavor",
                "inf",
                "--g",
                "1",
                "--L",
                "4",
                "--window",
                "-3:3",
                "--coeff",
                "z",
            ],
        ),
        (
            "graded_p4.inf.q",
            vec![
                "homology",
                "graded_p4",
                "--flavor",
                "inf",
                "--g",
                "1",
                "--L",
                "4",
                "--window",
                "-3:3",
                "--coeff",
                "q",
            ],
        ),
        (
            "graded_p4.inf.f2",
            vec![
                "homology",
                "graded_p4",
                "--flavor",
                "inf",
                "--g",
                "1",
                "--L",
                "4",
                "--window",
                "-3:3",
                "--coeff",
                "f2",
            ],
        ),
        (
            "trivial.verify_thm24",
            vec![
                "verify", "thm24", "trivial", "--g", "1", "--radius", "1", "--window", "-3:3",
            ],
        ),
    ];
    for (golden_name, args) in cases {
        // the corpus file name sits right after the subcommand (for
        // homology) or after the statement (for verify)
        let idx = if args[0] == "homology" { 1 } else { 2 };
        let input = corpus(args[idx]).to_str().unwrap().to_string();
        let mut args = args.clone();
        args[idx] = &input;
        let got = report_from(&args, &dir.path().join("out.json")).canonical();
        let want = ReportDocument::parse(
            &std::fs::read_to_string(golden_dir.join(format!("{golden_name}.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(got, want, "golden mismatch for {golden_name}");
    }
}
