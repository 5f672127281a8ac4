//! Regenerates the bundled corpus documents and their golden reports.
//! Run from the crate root:
//!   cargo run -p hfech-cli --example gen_corpus
use hfech_cli::input::InputDocument;
use hfech_cli::report::ReportDocument;
use hfech_core::instances;

fn run_golden(dir: &std::path::Path, name: &str, args: &[&str]) {
    let tmp = dir.join("tmp_report.json");
    let mut argv: Vec<String> = vec!["hfech".into()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--report".into());
    argv.push(tmp.display().to_string());
    let code = hfech_cli::run(argv);
    assert_eq!(code, 0, "golden run {name} failed");
    let text = std::fs::read_to_string(&tmp).unwrap();
    let rep = ReportDocument::parse(&text).unwrap().canonical();
    std::fs::remove_file(&tmp).unwrap();
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, rep.to_pretty_json()).unwrap();
    println!("wrote {}", path.display());
}

fn main() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    std::fs::create_dir_all(&dir).unwrap();
    let desc = [
        ("trivial", "one generator, zero differential"),
        (
            "acyclic",
            "two generators with x -> T y; interior homology vanishes",
        ),
        (
            "graded_p4",
            "mod-4 graded with 2-torsion and a translation-power tail",
        ),
        ("h1_pair", "exterior doubling carrying one degree -1 action"),
        ("stress", "six generators, mixed translation powers up to 2"),
    ];
    for (name, hf) in instances::bundled() {
        let d = desc.iter().find(|(n, _)| *n == name).map(|(_, d)| *d);
        let doc = InputDocument::from_hf(&hf, d);
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, doc.to_pretty_json()).unwrap();
        println!("wrote {}", path.display());
    }

    let golden = dir.join("golden");
    std::fs::create_dir_all(&golden).unwrap();
    let input = |n: &str| dir.join(format!("{n}.json")).display().to_string();

    run_golden(
        &golden,
        "trivial.inf",
        &[
            "homology",
            &input("trivial"),
            "--flavor",
            "inf",
            "--g",
            "1",
            "--L",
            "4",
            "--window",
            "-3:3",
        ],
    );
    run_golden(
        &golden,
        "acyclic.inf",
        &[
            "homology",
            &input("acyclic"),
            "--flavor",
            "inf",
            "--g",
            "1",
            "--L",
            "4",
            "--window",
            "-4:4",
        ],
    );
    run_golden(
        &golden,
        "h1_pair.minus",
        &[
            "homology",
            &input("h1_pair"),
            "--flavor",
            "minus",
            "--g",
            "1",
            "--L",
            "4",
            "--window",
            "-3:3",
        ],
    );
    run_golden(
        &golden,
        "stress.plus",
        &[
            "homology",
            &input("stress"),
            "--flavor",
            "plus",
            "--g",
            "2",
            "--L",
            "6",
            "--window",
            "-3:3",
        ],
    );
    for coeff in ["z", "q", "f2"] {
        run_golden(
            &golden,
            &format!("graded_p4.inf.{coeff}"),
            &[
                "homology",
                &input("graded_p4"),
                "--flavor",
                "inf",
                "--g",
                "1",
                "--L",
                "4",
                "--window",
                "-3:3",
                "--coeff",
                coeff,
            ],
        );
    }
    run_golden(
        &golden,
        "trivial.verify_thm24",
        &[
            "verify",
            "thm24",
            &input("trivial"),
            "--g",
            "1",
            "--radius",
            "1",
            "--window",
            "-3:3",
        ],
    );
}
