//! Batch interface: read chain-data files, run computations and
//! verifications, emit human- and machine-readable reports, cache
//! results.

pub mod cache;
pub mod input;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hfech_core::ech::{ech_flavor_homology, StabStatus};
use hfech_core::hf::{Flavor, HfData};
use hfech_core::ocomplex::DStarVariant;
use hfech_core::verifier::{
    check_collapse_with, check_lemma25_with, check_module_structure, check_thm24, Budgets,
    Coefficients, Verdict, VerificationReport,
};

use input::InputDocument;
use report::{digest_bytes, GroupLine, ReportDocument, VerdictLine};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_NOT_STABILIZED: i32 = 3;
pub const EXIT_INPUT: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Parser)]
#[command(
    name = "hfech",
    version,
    about = "Exact-arithmetic homology and verification for filtered graded chain complexes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug)]
struct Window(i64, i64);

fn parse_window(s: &str) -> Result<Window, String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("window {s:?} is not of the form A:B"))?;
    let a: i64 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad window start {a:?}"))?;
    let b: i64 = b
        .trim()
        .parse()
        .map_err(|_| format!("bad window end {b:?}"))?;
    if a > b {
        return Err(format!("window {a}:{b} is empty"));
    }
    Ok(Window(a, b))
}

fn parse_coeff(s: &str) -> Result<Coefficients, String> {
    match s {
        "z" => Ok(Coefficients::Z),
        "q" => Ok(Coefficients::Q),
        _ => {
            let Some(p) = s.strip_prefix('f') else {
                return Err(format!("coefficients {s:?}: expected z, q, or f<prime>"));
            };
            let p: u64 = p.parse().map_err(|_| format!("bad characteristic {p:?}"))?;
            if p < 2 || (2..p).any(|d| d * d <= p && p.is_multiple_of(d)) {
                return Err(format!("{p} is not prime"));
            }
            Ok(Coefficients::Fp(p))
        }
    }
}

#[derive(Args, Clone)]
struct OutputOpts {
    /// Write the machine-readable report to this path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Cache directory (defaults to $HFECH_CACHE_DIR when set).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a chain-data file against the structural invariants.
    Validate { path: PathBuf },
    /// Windowed flavor homology with stabilization analysis.
    Homology {
        path: PathBuf,
        /// Flavor: inf, minus, or plus.
        #[arg(long, default_value = "inf")]
        flavor: String,
        /// Number of handle factors.
        #[arg(long, default_value_t = 1)]
        g: u32,
        /// Handle norm budget.
        #[arg(long = "L", default_value_t = 4)]
        l: u32,
        /// Translation window A:B.
        #[arg(long, value_parser = parse_window, default_value = "-3:3", allow_hyphen_values = true)]
        window: Window,
        /// Coefficients: z, q, or f<prime>.
        #[arg(long, default_value = "z")]
        coeff: String,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Verify a structural statement: lemma25, thm24, collapse, or
    /// modules.
    Verify {
        statement: String,
        /// Chain-data file (not needed for lemma25).
        path: Option<PathBuf>,
        /// Window budget for lemma25.
        #[arg(long = "Lmax", default_value_t = 8)]
        lmax: u32,
        /// Number of handle factors.
        #[arg(long, default_value_t = 1)]
        g: u32,
        /// Handle block radius.
        #[arg(long, default_value_t = 1)]
        radius: i64,
        /// Translation window A:B.
        #[arg(long, value_parser = parse_window, default_value = "-3:3", allow_hyphen_values = true)]
        window: Window,
        /// Coefficients for the ladder consistency layer: z, q, f<prime>.
        #[arg(long, default_value = "z")]
        coeff: String,
        /// Test hook: run with a mutated boundary rule (1..6).
        #[arg(long, hide = true, default_value_t = 0)]
        dstar_variant: u32,
        #[command(flatten)]
        out: OutputOpts,
    },
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap handles help/version with its own formatting
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Homology {
            path,
            flavor,
            g,
            l,
            window,
            coeff,
            out,
        } => cmd_homology(&path, &flavor, g, l, window, &coeff, &out),
        Command::Verify {
            statement,
            path,
            lmax,
            g,
            radius,
            window,
            coeff,
            dstar_variant,
            out,
        } => cmd_verify(
            &statement,
            path.as_deref(),
            lmax,
            g,
            radius,
            window,
            &coeff,
            dstar_variant,
            &out,
        ),
    }
}

fn load_input(path: &Path) -> Result<(InputDocument, HfData, String), String> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let digest = digest_bytes(&bytes);
    let text = String::from_utf8(bytes).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc = InputDocument::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let hf = doc
        .to_hf()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((doc, hf, digest))
}

fn cmd_validate(path: &Path) -> i32 {
    let (_, hf, _) = match load_input(path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    match hf.validate() {
        Ok(()) => {
            println!(
                "ok: {} generators, modulus {}, {} h1 actions",
                hf.names().len(),
                hf.p(),
                hf.h1_count()
            );
            EXIT_OK
        }
        Err(v) => {
            eprintln!("invalid: {v}");
            EXIT_INPUT
        }
    }
}

fn cache_dir(opts: &OutputOpts) -> Option<PathBuf> {
    opts.cache_dir
        .clone()
        .or_else(|| std::env::var_os(cache::CACHE_ENV).map(PathBuf::from))
}

fn emit(report: &ReportDocument, opts: &OutputOpts, key: Option<&str>) -> Result<(), String> {
    if let Some(path) = &opts.report {
        std::fs::write(path, report.to_pretty_json())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if let (Some(dir), Some(key)) = (cache_dir(opts), key) {
        cache::store(&dir, key, report).map_err(|e| format!("cache write failed: {e}"))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_homology(
    path: &Path,
    flavor: &str,
    g: u32,
    l: u32,
    window: Window,
    coeff: &str,
    out: &OutputOpts,
) -> i32 {
    let (_, hf, digest) = match load_input(path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if let Err(v) = hf.validate() {
        eprintln!("invalid: {v}");
        return EXIT_INPUT;
    }
    let flavor = match flavor {
        "inf" => Flavor::Infinity,
        "minus" => Flavor::Minus,
        "plus" => Flavor::Plus,
        other => {
            eprintln!("error: unknown flavor {other:?} (expected inf, minus, plus)");
            return EXIT_INPUT;
        }
    };
    let coefficients = match parse_coeff(coeff) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };

    let mut rep = ReportDocument::new("homology");
    rep.input_digest = Some(digest.clone());
    rep.param("flavor", flavor);
    rep.param("g", g);
    rep.param("L", l);
    rep.param("window", format!("{}:{}", window.0, window.1));
    rep.param("coeff", coefficients);
    let key = cache::cache_key("homology", Some(&digest), &rep.parameters);

    if let Some(dir) = cache_dir(out) {
        if let Some(cached) = cache::lookup(&dir, &key) {
            print_homology_report(&cached);
            if let Err(e) = emit(&cached, out, None) {
                eprintln!("error: {e}");
                return EXIT_INTERNAL;
            }
            return EXIT_OK;
        }
    }

    let t0 = Instant::now();
    match coefficients {
        Coefficients::Z => {
            let res = ech_flavor_homology(&hf, g, flavor, l, window.0, window.1);
            match res {
                Ok(h) => {
                    for (d, row) in &h.gradings {
                        rep.groups.push(GroupLine {
                            row: "windowed".into(),
                            grading: *d,
                            group: row.windowed.to_string(),
                            rank: row.windowed.free_rank,
                            torsion: row.windowed.torsion.iter().map(|t| t.to_string()).collect(),
                            status: None,
                            generators: Vec::new(),
                        });
                        rep.groups.push(GroupLine {
                            row: "stable".into(),
                            grading: *d,
                            group: row.stable.to_string(),
                            rank: row.stable.free_rank,
                            torsion: row.stable.torsion.iter().map(|t| t.to_string()).collect(),
                            status: Some(
                                match row.status {
                                    StabStatus::Stable => "stable",
                                    StabStatus::NormStableOnly => "norm-stable",
                                }
                                .to_string(),
                            ),
                            generators: row.generators.clone(),
                        });
                    }
                    rep.stabilization.push(format!(
                        "norm tower constant from budget {}",
                        h.stabilized_at_l
                    ));
                    if hf.p() > 0 {
                        rep.stabilization.push(format!(
                            "gradings are residues mod {}; windowed groups grow with the window",
                            hf.p()
                        ));
                    }
                }
                Err(e) => {
                    eprintln!("not stabilized: {e}");
                    eprintln!("advice: raise --L or widen --window and rerun");
                    return EXIT_NOT_STABILIZED;
                }
            }
        }
        Coefficients::Q | Coefficients::Fp(_) => {
            let characteristic = match coefficients {
                Coefficients::Fp(p) => p,
                _ => 0,
            };
            let trunc = hfech_core::ech::build_ech(&hf, g, l, window.0, window.1);
            let c = match hfech_core::ech::flavor_complex(&trunc, flavor) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("internal: {e}");
                    return EXIT_INTERNAL;
                }
            };
            for d in c.grading_keys() {
                let mid = c.indices_at(d);
                let up = c.indices_at(c.key_shift(d, 1));
                let down = c.indices_at(c.key_shift(d, -1));
                let d_in = c.differential().submatrix(&mid, &up);
                let d_out = c.differential().submatrix(&down, &mid);
                let dim =
                    match hfech_core::algebra::field_homology_pair(&d_in, &d_out, characteristic) {
                        Ok(v) => v,
                        Err(e) => {
                            eprintln!("internal: {e}");
                            return EXIT_INTERNAL;
                        }
                    };
                let fname = if characteristic == 0 {
                    "Q".to_string()
                } else {
                    format!("F{characteristic}")
                };
                rep.groups.push(GroupLine {
                    row: "windowed".into(),
                    grading: d,
                    group: if dim == 0 {
                        "0".into()
                    } else if dim == 1 {
                        fname
                    } else {
                        format!("{fname}^{dim}")
                    },
                    rank: dim,
                    torsion: Vec::new(),
                    status: None,
                    generators: Vec::new(),
                });
            }
            rep.stabilization
                .push("field coefficients: windowed dimensions only".into());
        }
    }
    rep.timing_ms = t0.elapsed().as_millis() as u64;
    print_homology_report(&rep);
    if let Err(e) = emit(&rep, out, Some(&key)) {
        eprintln!("error: {e}");
        return EXIT_INTERNAL;
    }
    EXIT_OK
}

fn print_homology_report(rep: &ReportDocument) {
    println!(
        "homology {}",
        rep.parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    );
    let has_stable = rep.groups.iter().any(|g| g.row == "stable");
    if has_stable {
        println!(
            "{:>8}  {:<18} {:<18} status",
            "grading", "stable", "windowed"
        );
        let gradings: Vec<i64> = {
            let mut v: Vec<i64> = rep.groups.iter().map(|g| g.grading).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        for d in gradings {
            let stable = rep
                .groups
                .iter()
                .find(|g| g.grading == d && g.row == "stable");
            let windowed = rep
                .groups
                .iter()
                .find(|g| g.grading == d && g.row == "windowed");
            println!(
                "{:>8}  {:<18} {:<18} {}",
                d,
                stable.map(|g| g.group.as_str()).unwrap_or("-"),
                windowed.map(|g| g.group.as_str()).unwrap_or("-"),
                stable.and_then(|g| g.status.as_deref()).unwrap_or("-")
            );
        }
    } else {
        println!("{:>8}  group", "grading");
        for g in &rep.groups {
            println!("{:>8}  {}", g.grading, g.group);
        }
    }
    for line in &rep.stabilization {
        println!("note: {line}");
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    statement: &str,
    path: Option<&Path>,
    lmax: u32,
    g: u32,
    radius: i64,
    window: Window,
    coeff: &str,
    dstar_variant: u32,
    out: &OutputOpts,
) -> i32 {
    let Some(variant) = DStarVariant::from_id(dstar_variant) else {
        eprintln!("error: no boundary-rule variant {dstar_variant}");
        return EXIT_INPUT;
    };
    let coefficients = match parse_coeff(coeff) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if radius < 1 {
        eprintln!("error: --radius must be at least 1");
        return EXIT_INPUT;
    }
    let budgets = Budgets {
        block_lo: -radius,
        block_hi: radius,
        i_min: window.0,
        i_max: window.1,
    };

    let needs_input = statement != "lemma25";
    let loaded = if needs_input {
        let Some(path) = path else {
            eprintln!("error: statement {statement:?} needs a chain-data file");
            return EXIT_INPUT;
        };
        match load_input(path) {
            Ok(v) => Some(v),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        }
    } else {
        None
    };
    let digest = loaded.as_ref().map(|(_, _, d)| d.clone());

    let mut rep = ReportDocument::new("verify");
    rep.input_digest = digest.clone();
    rep.param("statement", statement);
    match statement {
        "lemma25" => {
            rep.param("Lmax", lmax);
        }
        _ => {
            rep.param("g", g);
            rep.param("radius", radius);
            rep.param("window", format!("{}:{}", window.0, window.1));
        }
    }
    if statement == "thm24" {
        rep.param("coeff", coefficients);
    }
    if dstar_variant != 0 {
        rep.param("dstar_variant", dstar_variant);
    }
    let key = cache::cache_key("verify", digest.as_deref(), &rep.parameters);

    if let Some(dir) = cache_dir(out) {
        if let Some(cached) = cache::lookup(&dir, &key) {
            print_verify_report(&cached);
            if let Err(e) = emit(&cached, out, None) {
                eprintln!("error: {e}");
                return EXIT_INTERNAL;
            }
            return exit_of(&cached);
        }
    }

    let t0 = Instant::now();
    let result: VerificationReport = match statement {
        "lemma25" => check_lemma25_with(lmax, variant),
        "thm24" => {
            let (_, hf, _) = loaded.as_ref().unwrap();
            check_thm24(hf, g, coefficients, budgets)
        }
        "collapse" => {
            let (_, hf, _) = loaded.as_ref().unwrap();
            check_collapse_with(hf, g, budgets, variant)
        }
        "modules" => {
            let (_, hf, _) = loaded.as_ref().unwrap();
            check_module_structure(hf, g, budgets)
        }
        other => {
            eprintln!(
                "error: unknown statement {other:?} (expected lemma25, thm24, collapse, modules)"
            );
            return EXIT_INPUT;
        }
    };

    rep.verdicts.push(VerdictLine {
        statement: result.statement.clone(),
        verdict: result.verdict.to_string(),
        failure: result.failure.clone(),
        evidence: result.evidence.clone(),
    });
    for row in &result.groups {
        rep.groups.push(GroupLine {
            row: row.row.clone(),
            grading: row.grading,
            group: row.group.to_string(),
            rank: row.group.free_rank,
            torsion: row.group.torsion.iter().map(|t| t.to_string()).collect(),
            status: None,
            generators: Vec::new(),
        });
    }
    for (k, v) in &result.params {
        rep.param(&format!("engine.{k}"), v);
    }
    rep.timing_ms = t0.elapsed().as_millis() as u64;

    print_verify_report(&rep);
    if let Err(e) = emit(&rep, out, Some(&key)) {
        eprintln!("error: {e}");
        return EXIT_INTERNAL;
    }
    match result.verdict {
        Verdict::Pass => EXIT_OK,
        Verdict::Fail => EXIT_FAIL,
        Verdict::NotStabilized => EXIT_NOT_STABILIZED,
    }
}

fn exit_of(rep: &ReportDocument) -> i32 {
    match rep.verdicts.first().map(|v| v.verdict.as_str()) {
        Some("pass") => EXIT_OK,
        Some("not-stabilized") => EXIT_NOT_STABILIZED,
        Some(_) => EXIT_FAIL,
        None => EXIT_INTERNAL,
    }
}

fn print_verify_report(rep: &ReportDocument) {
    for v in &rep.verdicts {
        println!("{}: {}", v.statement, v.verdict);
        if let Some(f) = &v.failure {
            println!("  reason: {f}");
        }
        for e in &v.evidence {
            println!("  {e}");
        }
    }
}
