//! The acceptance suite: every exit criterion runs here, one pass/fail
//! line per criterion, with its stated budget pinned in code.
//!
//! Run with `cargo test -p hfech-cli --test acceptance -- --nocapture`
//! to see the per-criterion lines as they complete.

mod support;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use hfech_cli::report::ReportDocument;
use hfech_core::complex::ComplexHomology;
use hfech_core::ech::build_ech;
use hfech_core::hf::HfData;
use hfech_core::instances::{self, Rng};
use hfech_core::ocomplex::{self, DStarVariant};
use hfech_core::verifier::{
    check_collapse, check_collapse_with, check_lemma25, check_lemma25_with, check_thm24, Budgets,
    Coefficients, GroupRow,
};
use support::oracle_window_homology;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(format!("{name}.json"))
}

/// The randomized family shared by criteria 3 and 6: (instance, g).
fn random_family() -> Vec<(HfData, u32)> {
    let mut rng = Rng::new(20260809);
    (0..50u64)
        .map(|k| {
            let g = 1 + (k % 3) as u32;
            let hf = if k % 4 == 3 {
                instances::random_hf_with_h1(&mut rng, 6, 2, &[0, 2, 4])
            } else {
                instances::random_hf(&mut rng, 6, 2, &[0, 2, 4, 8])
            };
            (hf, g)
        })
        .collect()
}

struct Criterion {
    name: &'static str,
    outcome: Result<String, String>,
    elapsed: Duration,
}

fn run_criterion(
    name: &'static str,
    budget: Option<Duration>,
    f: impl FnOnce() -> Result<String, String>,
) -> Criterion {
    let t0 = Instant::now();
    let mut outcome = f();
    let elapsed = t0.elapsed();
    if let (Ok(_), Some(b)) = (&outcome, budget) {
        if elapsed > b {
            outcome = Err(format!(
                "runtime {:.2}s exceeds the {:.0}s budget",
                elapsed.as_secs_f64(),
                b.as_secs_f64()
            ));
        }
    }
    Criterion {
        name,
        outcome,
        elapsed,
    }
}

fn criterion_1() -> Result<String, String> {
    let rep = check_lemma25(8);
    if !rep.passed() {
        return Err(format!("verdict {:?}: {:?}", rep.verdict, rep.failure));
    }
    let find = |d: i64| -> &GroupRow {
        rep.groups
            .iter()
            .find(|g| g.grading == d)
            .expect("group row present")
    };
    for (d, rank) in [(0i64, 1usize), (1, 1), (2, 0)] {
        let g = &find(d).group;
        if g.free_rank != rank || !g.torsion.is_empty() {
            return Err(format!("grading {d}: got {g}"));
        }
    }
    let gens: Vec<&String> = rep
        .evidence
        .iter()
        .filter(|e| e.contains("generator"))
        .collect();
    if !gens.iter().any(|e| e.contains("(0,0)"))
        || !gens.iter().any(|e| e.contains("(0,+1) - (1,-1)"))
    {
        return Err(format!("unexpected generators: {gens:?}"));
    }
    Ok("limit homology is Z (gen (0,0)) and Z (gen (0,+1)-(1,-1)), nothing above".into())
}

fn criterion_2() -> Result<String, String> {
    let mut rng = Rng::new(0xacce5);
    let mut cells = 0usize;
    for k in 0..200u64 {
        let hf = if k % 5 == 4 {
            instances::random_hf_with_h1(&mut rng, 6, 2, &[0, 2, 4, 8])
        } else {
            instances::random_hf(&mut rng, 6, 2, &[0, 2, 4, 8])
        };
        let g = 1 + (k % 3) as u32;
        let l = 3 + (k % 4) as u32;
        let t = build_ech(&hf, g, l, -4, 4);
        cells += t.complex.dim();
        t.complex
            .verify()
            .map_err(|e| format!("instance {k} (g={g}, L={l}): {e}"))?;
    }
    Ok(format!(
        "200 assembled complexes verified ({cells} cells total)"
    ))
}

fn thm24_instance_set() -> Vec<(String, HfData, u32)> {
    let mut set = Vec::new();
    for (name, hf) in instances::bundled() {
        for g in [1u32, 2] {
            set.push((format!("{name} g={g}"), hf.clone(), g));
        }
    }
    for (k, (hf, g)) in random_family().into_iter().enumerate() {
        set.push((format!("random{k} g={g}"), hf, g));
    }
    set
}

fn criterion_3() -> Result<String, String> {
    let set = thm24_instance_set();
    for (name, hf, g) in &set {
        let rep = check_thm24(hf, *g, Coefficients::Z, Budgets::default());
        if !rep.passed() {
            return Err(format!("{name}: {:?}", rep.failure));
        }
    }
    Ok(format!("{} ladders verified", set.len()))
}

fn collapse_instance_set() -> Vec<(String, HfData, u32)> {
    let mut set = Vec::new();
    for (name, hf) in instances::bundled() {
        for g in [1u32, 2] {
            set.push((format!("{name} g={g}"), hf.clone(), g));
        }
    }
    set.push(("stress g=3".into(), instances::stress(), 3));
    set
}

fn criterion_4() -> Result<String, String> {
    let set = collapse_instance_set();
    for (name, hf, g) in &set {
        let rep = check_collapse(hf, *g, Budgets::default());
        if !rep.passed() {
            return Err(format!("{name}: {:?}", rep.failure));
        }
    }
    Ok(format!(
        "{} collapses equal the input differential tensor identity",
        set.len()
    ))
}

fn criterion_5() -> Result<String, String> {
    // frozen degree-0 ranks 1, 3, 3, ... with the rest of the table
    let frozen: [(u32, [usize; 3]); 6] = [
        (1, [1, 0, 0]),
        (2, [3, 0, 0]),
        (3, [3, 0, 0]),
        (4, [3, 2, 0]),
        (5, [3, 3, 0]),
        (6, [3, 3, 0]),
    ];
    for (l, expected) in frozen {
        let oracle = oracle_window_homology(l as i64);
        let engine = ComplexHomology::compute(&ocomplex::window(l))
            .map_err(|e| format!("window {l}: {e}"))?;
        for g in 0..3usize {
            let (orank, otors) = &oracle[g];
            if *orank != expected[g] || !otors.is_empty() {
                return Err(format!(
                    "oracle disagrees with the frozen table at L={l} grading {g}: \
                     rank {orank}, torsion {otors:?}"
                ));
            }
            let eng = engine.group(g as i64);
            if eng.free_rank != expected[g] || !eng.torsion.is_empty() {
                return Err(format!("engine disagrees at L={l} grading {g}: {eng}"));
            }
        }
    }
    Ok("window table L=1..6 matches the independent oracle exactly".into())
}

fn criterion_6() -> Result<String, String> {
    // criterion 1 at Lmax + 2
    let base = check_lemma25(8);
    let big = check_lemma25(10);
    if !big.passed() {
        return Err(format!("lemma25 at Lmax=10: {:?}", big.failure));
    }
    for (a, b) in base.groups.iter().zip(&big.groups) {
        if a.row != b.row || a.grading != b.grading || !a.group.same_iso_class(&b.group) {
            return Err("lemma25 groups changed under enlargement".into());
        }
    }
    let gen_lines = |r: &hfech_core::verifier::VerificationReport| -> Vec<String> {
        r.evidence
            .iter()
            .filter(|e| e.contains("generator"))
            .cloned()
            .collect()
    };
    if gen_lines(&base) != gen_lines(&big) {
        return Err("lemma25 generator classes changed under enlargement".into());
    }

    // criteria 3 and 4 at enlarged budgets: verdicts and stable-range
    // groups unchanged
    let enlarged = Budgets::default().enlarged();
    for (name, hf, g) in thm24_instance_set() {
        let small = check_thm24(&hf, g, Coefficients::Z, Budgets::default());
        let big = check_thm24(&hf, g, Coefficients::Z, enlarged);
        if !big.passed() {
            return Err(format!(
                "thm24 {name} at enlarged budgets: {:?}",
                big.failure
            ));
        }
        for row in &small.groups {
            let Some(other) = big
                .groups
                .iter()
                .find(|r| r.row == row.row && r.grading == row.grading)
            else {
                return Err(format!(
                    "thm24 {name}: stable row {} at grading {} missing after enlargement",
                    row.row, row.grading
                ));
            };
            if !row.group.same_iso_class(&other.group) {
                return Err(format!(
                    "thm24 {name}: group changed at {} grading {}: {} vs {}",
                    row.row, row.grading, row.group, other.group
                ));
            }
        }
    }
    for (name, hf, g) in collapse_instance_set() {
        let rep = check_collapse(&hf, g, enlarged);
        if !rep.passed() {
            return Err(format!(
                "collapse {name} at enlarged budgets: {:?}",
                rep.failure
            ));
        }
    }
    Ok("verdicts, groups, and generator classes survive enlarging every budget by 2".into())
}

fn criterion_7() -> Result<String, String> {
    for v in DStarVariant::MUTATIONS {
        let lemma = check_lemma25_with(8, v);
        let collapse = check_collapse_with(&instances::trivial(), 1, Budgets::default(), v);
        if lemma.passed() && collapse.passed() {
            return Err(format!("mutation {v:?} slipped through both checks"));
        }
    }
    Ok("all 6 single-term/sign mutations are caught".into())
}

fn criterion_8() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = corpus("graded_p4");
    let mut reports = Vec::new();
    for coeff in ["z", "q", "f2"] {
        let out = dir.path().join(format!("{coeff}.json"));
        let code = hfech_cli::run([
            "hfech",
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
            "--coeff",
            coeff,
            "--report",
            out.to_str().unwrap(),
        ]);
        if code != 0 {
            return Err(format!("homology --coeff {coeff} exited {code}"));
        }
        let rep = ReportDocument::parse(&std::fs::read_to_string(&out).unwrap())
            .map_err(|e| e.to_string())?;
        reports.push(rep);
    }
    let windowed = |rep: &ReportDocument| -> Vec<(i64, usize, usize)> {
        rep.groups
            .iter()
            .filter(|g| g.row == "windowed")
            .map(|g| {
                let t2 = g
                    .torsion
                    .iter()
                    .filter(|t| t.parse::<i64>().map(|v| v % 2 == 0).unwrap_or(false))
                    .count();
                (g.grading, g.rank, t2)
            })
            .collect()
    };
    let z = windowed(&reports[0]);
    let q = windowed(&reports[1]);
    let f2 = windowed(&reports[2]);
    if z.len() != 4 || q.len() != 4 || f2.len() != 4 {
        return Err(format!(
            "expected 4 residue classes, got {}/{}/{}",
            z.len(),
            q.len(),
            f2.len()
        ));
    }
    let t2_of = |d: i64| -> usize {
        z.iter()
            .find(|(g, _, _)| *g == d.rem_euclid(4))
            .map(|(_, _, t)| *t)
            .unwrap_or(0)
    };
    for (d, zrank, _) in &z {
        let qrank = q.iter().find(|(g, _, _)| g == d).unwrap().1;
        if qrank != *zrank {
            return Err(format!("grading {d}: Q rank {qrank} vs free rank {zrank}"));
        }
        let frank = f2.iter().find(|(g, _, _)| g == d).unwrap().1;
        let predicted = zrank + t2_of(*d) + t2_of(d - 1);
        if frank != predicted {
            return Err(format!(
                "grading {d}: F2 rank {frank}, universal coefficients predict {predicted}"
            ));
        }
    }
    Ok("F2 and Q ranks agree exactly with the integer groups under universal coefficients".into())
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs;
    let results = vec![
        run_criterion(
            "1 limit homology of the handle complex",
            Some(secs(1)),
            criterion_1,
        ),
        run_criterion(
            "2 squared differential on 200 assemblies",
            Some(secs(60)),
            criterion_2,
        ),
        run_criterion(
            "3 commutative ladder on corpus + 50 random",
            Some(secs(300)),
            criterion_3,
        ),
        run_criterion(
            "4 collapse realization on the corpus",
            Some(secs(60)),
            criterion_4,
        ),
        run_criterion("5 window table against the oracle", None, criterion_5),
        run_criterion(
            "6 stability of verdicts under enlargement",
            None,
            criterion_6,
        ),
        run_criterion(
            "7 mutation sensitivity of the boundary rules",
            None,
            criterion_7,
        ),
        run_criterion("8 field/integer coefficient consistency", None, criterion_8),
    ];
    let mut all_ok = true;
    for c in &results {
        match &c.outcome {
            Ok(msg) => println!(
                "criterion {}: PASS in {:.2}s - {}",
                c.name,
                c.elapsed.as_secs_f64(),
                msg
            ),
            Err(msg) => {
                all_ok = false;
                println!(
                    "criterion {}: FAIL in {:.2}s - {}",
                    c.name,
                    c.elapsed.as_secs_f64(),
                    msg
                );
            }
        }
    }
    assert!(
        all_ok,
        "one or more acceptance criteria failed (see lines above)"
    );
}
