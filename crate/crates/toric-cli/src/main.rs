//! Command-line front end for the fan analyses.
//!
//! Reports go to stdout as single-line JSON with exact rationals as
//! strings; warnings and timings go to stderr. Exit codes: 0 success,
//! 1 domain failure, 2 I/O or parse failure, 3 internal invariant breach
//! (a witness that failed re-verification panics and lands here).

use clap::{ArgGroup, Parser, Subcommand};
use num::{Signed, Zero};
use serde::Serialize;
use toric_cli::reports::*;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use toric::fan::{Fan, FanData};
use toric::intersection::{all_wall_curves, is_nef, CurveClass, InvariantDivisor};
use toric::linalg::{rat_from_str, rat_to_string, Int, Rat};
use toric::positivity::{
    check_dagger, find_zero_sum_primitive_collection, primitive_collections, question4_scan,
    tangent_seshadri_sign_at_identity, verify_positive_relation, verify_theorem1,
    PositiveRelation, SeshadriSign, Theorem1Report,
};

#[derive(Parser)]
#[command(
    name = "toric",
    version,
    about = "Exact analyses of complete simplicial toric fans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a fan file against the validation rules.
    Validate { path: PathBuf },
    /// Full report: flags, class group, ray-count criterion, sign, walls.
    Classify { path: PathBuf },
    /// Decide the ray-count criterion for the tangent-sheaf sign.
    Dagger { path: PathBuf },
    /// Sign of the Seshadri constant of the tangent sheaf at the identity.
    Seshadri { path: PathBuf },
    /// List the primitive collections and a zero-sum one if present.
    Pcols { path: PathBuf },
    /// Decide nefness of an invariant divisor given per-ray coefficients.
    Nef {
        path: PathBuf,
        /// Comma-separated rational coefficients, one per ray.
        #[arg(long)]
        divisor: String,
    },
    /// List every wall with its invariant-curve intersection class.
    Walls { path: PathBuf },
    /// Generate a named fan family (pn N | wps Q0,Q1,... | hirzebruch R).
    Gen {
        family: String,
        params: String,
        /// Output file; stdout when omitted.
        out: Option<PathBuf>,
    },
    /// Write the bundled corpus fixtures into a directory.
    GenCorpus { dir: PathBuf },
    /// Run a harness over every fan file in a directory.
    #[command(group(ArgGroup::new("mode").required(true).args(["theorem1", "question4"])))]
    Corpus {
        dir: PathBuf,
        /// Check the positivity classification on each applicable fan.
        #[arg(long)]
        theorem1: bool,
        /// Scan for smooth complete non-projective-space fans that satisfy
        /// the ray-count criterion.
        #[arg(long)]
        question4: bool,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

/// A command failure: exit code plus the message for the "error" report.
/// `printed` marks failures that already wrote their own report.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
    printed: bool,
}

impl Failure {
    fn domain(message: impl Display) -> Failure {
        Failure { code: 1, message: message.to_string(), printed: false }
    }

    fn io(message: impl Display) -> Failure {
        Failure { code: 2, message: message.to_string(), printed: false }
    }

    fn already_printed(code: u8) -> Failure {
        Failure { code, message: String::new(), printed: true }
    }
}

fn emit<T: Serialize>(report: &T) {
    let line = serde_json::to_string(report).expect("reports serialize");
    println!("{line}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            if !failure.printed {
                emit(&ErrorJson { error: failure.message });
            }
            ExitCode::from(failure.code)
        }
        Err(_) => {
            eprintln!("internal invariant breach; see the panic message above");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Classify { path } => cmd_classify(&path),
        Command::Dagger { path } => cmd_dagger(&path),
        Command::Seshadri { path } => cmd_seshadri(&path),
        Command::Pcols { path } => cmd_pcols(&path),
        Command::Nef { path, divisor } => cmd_nef(&path, &divisor),
        Command::Walls { path } => cmd_walls(&path),
        Command::Gen { family, params, out } => cmd_gen(&family, &params, out.as_deref()),
        Command::GenCorpus { dir } => cmd_gen_corpus(&dir),
        Command::Corpus { dir, theorem1, question4: _, budget, seed } => {
            if theorem1 {
                cmd_corpus_theorem1(&dir)
            } else {
                cmd_corpus_question4(&dir, budget, seed)
            }
        }
    }
}

fn read_fan_data(path: &Path) -> Result<FanData, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    // serde_json errors carry line and column positions.
    serde_json::from_str(&text)
        .map_err(|e| Failure::io(format!("parse error in {}: {e}", path.display())))
}

fn build_fan(path: &Path, data: &FanData) -> Result<Fan, Failure> {
    let (normalized, changed) = data.primitivize();
    for i in &changed {
        eprintln!(
            "warning: {}: ray {i} was not primitive and was divided by its gcd",
            path.display()
        );
    }
    Fan::from_data(&normalized).map_err(Failure::domain)
}

fn load_fan(path: &Path) -> Result<Fan, Failure> {
    let data = read_fan_data(path)?;
    build_fan(path, &data)
}

fn fan_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn sign_label(sign: SeshadriSign) -> String {
    match sign {
        SeshadriSign::Positive => "positive".to_string(),
        SeshadriSign::Zero => "zero".to_string(),
    }
}

/// Re-verifies a criterion witness right before it is printed.
fn verified_witness_json(fan: &Fan, rel: &PositiveRelation) -> WitnessJson {
    assert!(
        verify_positive_relation(fan, rel) && rel.support.len() <= fan.dim(),
        "emitted witness must re-verify as a small positive relation"
    );
    WitnessJson::from_relation(rel)
}

/// Re-verifies a wall class right before it is printed.
fn verified_wall_json(fan: &Fan, wall: &toric::fan::Wall, class: &CurveClass) -> WallJson {
    for k in 0..fan.dim() {
        let s: Rat = class
            .intersections
            .iter()
            .zip(fan.rays())
            .map(|(c, v)| c * Rat::from_integer(v[k].clone()))
            .sum();
        assert!(s.is_zero(), "emitted wall class must pair to zero with the rays");
    }
    WallJson::new(wall, class)
}

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    let data = read_fan_data(path)?;
    match build_fan(path, &data) {
        Ok(_) => {
            emit(&ValidateJson { valid: true, error: None });
            Ok(())
        }
        Err(failure) => {
            emit(&ValidateJson { valid: false, error: Some(failure.message) });
            Err(Failure::already_printed(1))
        }
    }
}

fn cmd_classify(path: &Path) -> Result<(), Failure> {
    let started = Instant::now();
    let fan = load_fan(path)?;
    let loaded = started.elapsed();

    let complete = fan.is_complete();
    let dagger = if complete {
        let report = check_dagger(&fan).expect("fan is complete");
        Some(DaggerJson {
            holds: report.holds,
            witness: report.witness.as_ref().map(|w| verified_witness_json(&fan, w)),
        })
    } else {
        None
    };
    let seshadri_sign = if complete {
        Some(sign_label(
            tangent_seshadri_sign_at_identity(&fan).expect("fan is complete"),
        ))
    } else {
        None
    };
    let walls = if complete {
        let curves = all_wall_curves(&fan).expect("fan is complete");
        Some(
            curves
                .iter()
                .map(|(w, c)| verified_wall_json(&fan, w, c))
                .collect(),
        )
    } else {
        None
    };
    let report = AnalysisReport {
        fan: fan_name(path),
        valid: true,
        dim: fan.dim(),
        rays: fan.rays().len(),
        simplicial: true,
        smooth: fan.is_smooth(),
        complete,
        projective: if complete {
            Some(fan.is_projective().expect("fan is complete").projective)
        } else {
            None
        },
        class_group: fan.class_group().ok().map(|g| ClassGroupJson::new(&g)),
        dagger,
        seshadri_sign,
        walls,
    };
    eprintln!(
        "timing: load {}us, analyze {}us",
        loaded.as_micros(),
        started.elapsed().as_micros() - loaded.as_micros()
    );
    emit(&report);
    Ok(())
}

fn cmd_dagger(path: &Path) -> Result<(), Failure> {
    let fan = load_fan(path)?;
    let report = check_dagger(&fan).map_err(Failure::domain)?;
    emit(&DaggerJson {
        holds: report.holds,
        witness: report.witness.as_ref().map(|w| verified_witness_json(&fan, w)),
    });
    Ok(())
}

fn cmd_seshadri(path: &Path) -> Result<(), Failure> {
    let fan = load_fan(path)?;
    let sign = tangent_seshadri_sign_at_identity(&fan).map_err(Failure::domain)?;
    let witness = match sign {
        SeshadriSign::Positive => None,
        SeshadriSign::Zero => {
            let report = check_dagger(&fan).expect("sign exists, fan is complete");
            Some(verified_witness_json(
                &fan,
                report.witness.as_ref().expect("zero sign carries a witness"),
            ))
        }
    };
    emit(&SignJson { sign: sign_label(sign), witness });
    Ok(())
}

fn cmd_pcols(path: &Path) -> Result<(), Failure> {
    let fan = load_fan(path)?;
    emit(&PcolsJson {
        collections: primitive_collections(&fan),
        zero_sum: find_zero_sum_primitive_collection(&fan),
    });
    Ok(())
}

fn parse_divisor(fan: &Fan, text: &str) -> Result<InvariantDivisor, Failure> {
    let coefficients: Vec<Rat> = text
        .split(',')
        .map(|part| rat_from_str(part).map_err(|e| Failure::domain(format!("bad divisor: {}", e.0))))
        .collect::<Result<_, _>>()?;
    if coefficients.len() != fan.rays().len() {
        return Err(Failure::domain(format!(
            "divisor has {} coefficients but the fan has {} rays",
            coefficients.len(),
            fan.rays().len()
        )));
    }
    Ok(InvariantDivisor { coefficients })
}

fn cmd_nef(path: &Path, divisor_text: &str) -> Result<(), Failure> {
    let fan = load_fan(path)?;
    let divisor = parse_divisor(&fan, divisor_text)?;
    let report = is_nef(&fan, &divisor).map_err(Failure::domain)?;
    let json = match report.witness {
        None => NefJson { nef: report.nef, witness_wall: None, value: None },
        Some(witness) => {
            // Re-verify the failing pairing before printing it.
            let class = toric::intersection::wall_curve_class(&fan, &witness.wall)
                .expect("witness wall is a wall");
            let recomputed: Rat = class
                .intersections
                .iter()
                .zip(&divisor.coefficients)
                .map(|(c, d)| c * d)
                .sum();
            assert!(
                recomputed == witness.value && recomputed.is_negative(),
                "nef witness must re-verify as a negative pairing"
            );
            NefJson {
                nef: report.nef,
                witness_wall: Some(witness.wall.facet.clone()),
                value: Some(rat_to_string(&witness.value)),
            }
        }
    };
    emit(&json);
    Ok(())
}

fn cmd_walls(path: &Path) -> Result<(), Failure> {
    let fan = load_fan(path)?;
    let curves = all_wall_curves(&fan).map_err(Failure::domain)?;
    emit(&WallsJson {
        walls: curves
            .iter()
            .map(|(w, c)| verified_wall_json(&fan, w, c))
            .collect(),
    });
    Ok(())
}

fn parse_weights(params: &str) -> Result<Vec<i64>, Failure> {
    params
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|e| Failure::domain(format!("bad weight {p:?}: {e}")))
        })
        .collect()
}

fn cmd_gen(family: &str, params: &str, out: Option<&Path>) -> Result<(), Failure> {
    let fan = match family {
        "pn" => {
            let n: usize = params
                .parse()
                .map_err(|e| Failure::domain(format!("bad dimension {params:?}: {e}")))?;
            Fan::projective_space(n).map_err(Failure::domain)?
        }
        "wps" => {
            let weights = parse_weights(params)?;
            Fan::weighted_projective(&weights).map_err(Failure::domain)?
        }
        "hirzebruch" => {
            let r: i64 = params
                .parse()
                .map_err(|e| Failure::domain(format!("bad parameter {params:?}: {e}")))?;
            Fan::hirzebruch(r).map_err(Failure::domain)?
        }
        other => {
            return Err(Failure::domain(format!(
                "unknown family {other:?}; expected pn, wps, or hirzebruch"
            )))
        }
    };
    let data = fan.to_data().map_err(Failure::domain)?;
    let line = serde_json::to_string(&data).expect("fan data serializes");
    match out {
        Some(path) => std::fs::write(path, format!("{line}\n"))
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{line}");
            Ok(())
        }
    }
}

fn explicit_weighted_1123() -> Fan {
    let data = FanData {
        dim: 3,
        rays: vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![-1, -2, -3],
        ],
        max_cones: vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
    };
    Fan::from_data(&data).expect("fixture is a valid fan")
}

fn corpus_fixtures() -> Vec<(String, Fan)> {
    let p1 = Fan::projective_space(1).expect("valid dimension");
    let p2 = Fan::projective_space(2).expect("valid dimension");
    let p3 = Fan::projective_space(3).expect("valid dimension");
    let bl_p2 = p2
        .star_subdivision(&[Int::from(1), Int::from(1)])
        .expect("interior point");
    let bl_p3 = p3
        .star_subdivision(&[Int::from(1), Int::from(1), Int::from(1)])
        .expect("interior point");
    let bl2_p2 = bl_p2
        .star_subdivision(&[Int::from(0), Int::from(-1)])
        .expect("interior point of an untouched cone");

    let mut fixtures = vec![
        ("p1".to_string(), p1.clone()),
        ("p2".to_string(), p2.clone()),
        ("p3".to_string(), p3.clone()),
        ("p4".to_string(), Fan::projective_space(4).expect("valid dimension")),
        ("p1123".to_string(), explicit_weighted_1123()),
        ("p1xp1".to_string(), Fan::product(&p1, &p1).expect("product fan")),
        ("p1xp2".to_string(), Fan::product(&p1, &p2).expect("product fan")),
        ("bl_p2".to_string(), bl_p2),
        ("bl_p3".to_string(), bl_p3),
        ("bl2_p2".to_string(), bl2_p2),
    ];
    for r in 0..=5 {
        fixtures.push((
            format!("hirzebruch_{r}"),
            Fan::hirzebruch(r).expect("nonnegative parameter"),
        ));
    }
    fixtures.sort_by(|a, b| a.0.cmp(&b.0));
    fixtures
}

fn cmd_gen_corpus(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for (name, fan) in corpus_fixtures() {
        let data = fan.to_data().expect("fixtures have small coordinates");
        let line = serde_json::to_string(&data).expect("fan data serializes");
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, format!("{line}\n"))
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
        written.push(name);
    }
    emit(&GenCorpusJson { dir: dir.display().to_string(), written });
    Ok(())
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort_by_key(|p| p.file_name().map(|n| n.to_os_string()));
    if files.is_empty() {
        return Err(Failure::domain("no fans found"));
    }
    Ok(files)
}

fn cmd_corpus_theorem1(dir: &Path) -> Result<(), Failure> {
    let files = corpus_files(dir)?;
    let mut results = Vec::new();
    let mut applicable = 0usize;
    let mut passed = 0usize;
    let mut hard_failure = false;
    for path in &files {
        let name = fan_name(path);
        match load_fan(path) {
            Err(failure) => {
                hard_failure = true;
                results.push(CorpusEntryJson {
                    fan: name,
                    outcome: "error".to_string(),
                    sign: None,
                    projective_space: None,
                    zero_sum_collection: None,
                    error: Some(failure.message),
                });
            }
            Ok(fan) => match verify_theorem1(&fan) {
                Theorem1Report::NotApplicable { .. } => results.push(CorpusEntryJson {
                    fan: name,
                    outcome: "not_applicable".to_string(),
                    sign: None,
                    projective_space: None,
                    zero_sum_collection: None,
                    error: None,
                }),
                Theorem1Report::Checked {
                    sign,
                    projective_space_fan,
                    equivalence_holds,
                    zero_sum_collection,
                    passed: fan_passed,
                } => {
                    applicable += 1;
                    if fan_passed {
                        passed += 1;
                    } else {
                        hard_failure = true;
                    }
                    assert!(
                        equivalence_holds || !fan_passed,
                        "a passing fan must satisfy the equivalence"
                    );
                    results.push(CorpusEntryJson {
                        fan: name,
                        outcome: if fan_passed { "passed" } else { "failed" }.to_string(),
                        sign: Some(sign_label(sign)),
                        projective_space: Some(projective_space_fan),
                        zero_sum_collection,
                        error: None,
                    });
                }
            },
        }
    }
    emit(&Theorem1Json { checked: files.len(), applicable, passed, results });
    if hard_failure {
        Err(Failure::already_printed(1))
    } else {
        Ok(())
    }
}

fn cmd_corpus_question4(dir: &Path, budget: usize, seed: u64) -> Result<(), Failure> {
    let files = corpus_files(dir)?;
    let mut fans = Vec::new();
    for path in &files {
        fans.push(load_fan(path).map_err(|failure| {
            Failure::domain(format!("{}: {}", fan_name(path), failure.message))
        })?);
    }
    let report = question4_scan(&fans, budget, seed);
    for finding in &report.findings {
        eprintln!(
            "FINDING: smooth complete fan satisfying the criterion away from \
             projective space: {}",
            serde_json::to_string(finding).expect("fan data serializes")
        );
    }
    emit(&ScanJson {
        seed: report.seed,
        budget: report.budget,
        corpus_size: report.corpus_size,
        candidates: report.candidates,
        skipped: report.skipped,
        findings: report.findings,
    });
    Ok(())
}
