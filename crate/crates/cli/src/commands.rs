use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use povmquad::povm::{
    default_test_directions, exact_score, operator_completeness_residual, optimal_score,
    povm_from_quadrature, scalar_completeness_residual, FinitePovm, DEFAULT_OPERATOR_CAP,
};
use povmquad::quadrature::{
    certify, product_rule, read_pointset_file, IngestedPointSet, WeightMode, FOUR_PI,
};
use povmquad::simulator::{run_game, score_by_direction};
use povmquad::table::{build_table, Count, GridCatalog, TableRow};
use povmquad::Error;
use serde::Serialize;

use crate::status;
use crate::{Command, PovmFormat, ReportFormat, TableFormat, Weights};

/// Residual threshold for `construct` to report success.
const CONSTRUCT_TOL: f64 = 1e-9;
/// Simulations with fewer trials report but exit with INSUFFICIENT.
const MIN_TRIALS: u64 = 100;
const SIGMA_BUDGET: f64 = 5.0;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } => status::IO,
            Error::Parse { .. }
            | Error::AtLine { .. }
            | Error::DuplicatePoint { .. }
            | Error::Weight { .. }
            | Error::WeightSum { .. }
            | Error::ZeroVector
            | Error::NotUnit { .. }
            | Error::Json(_)
            | Error::InvalidPovm(_) => status::PARSE,
            Error::NotNormalized { .. } | Error::InsufficientStrength { .. } => {
                status::VERIFICATION
            }
            _ => status::USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Construct {
            copies,
            out,
            format,
        } => construct(copies as usize, out.as_deref(), format),
        Command::Certify {
            file,
            l_max,
            tol,
            expect,
            weights,
            format,
        } => certify_cmd(&file, l_max as usize, tol, expect, weights, format),
        Command::Strength {
            file,
            cap,
            tol,
            weights,
        } => strength_cmd(&file, cap as usize, tol, weights),
        Command::Simulate {
            povm,
            trials,
            seed,
            format,
        } => simulate(&povm, trials, seed, format),
        Command::Score {
            povm,
            directions,
            format,
        } => score(&povm, directions.as_deref(), format),
        Command::Table {
            nmax,
            grids,
            format,
        } => table(nmax as usize, grids.as_deref(), format),
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::new(status::IO, format!("{}: {e}", path.display()))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(status::IO, e.to_string())),
    }
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::new(
            status::USAGE,
            format!("--tol must be positive, got {tol}"),
        ))
    }
}

pub fn povm_csv(p: &FinitePovm) -> String {
    let mut s = String::from("c,theta,phi\n");
    for e in p.elements() {
        let _ = writeln!(s, "{},{},{}", e.c, e.direction.theta(), e.direction.phi());
    }
    s
}

fn construct(copies: usize, out: Option<&Path>, format: PovmFormat) -> CmdResult {
    let q = product_rule(copies);
    let report = certify(&q, copies, povmquad::quadrature::DEFAULT_TOLERANCE)?;
    let p = povm_from_quadrature(&q, copies)?;
    let scalar = scalar_completeness_residual(&p, &default_test_directions(&p));
    let operator = operator_completeness_residual(&p, DEFAULT_OPERATOR_CAP.max(copies))?;
    let body = match format {
        PovmFormat::Json => {
            let mut s = p.to_json()?;
            s.push('\n');
            s
        }
        PovmFormat::Csv => povm_csv(&p),
    };
    write_output(out, &body)?;

    let mut summary = String::new();
    let _ = writeln!(summary, "N: {copies}");
    let _ = writeln!(summary, "elements: {}", p.len());
    let _ = writeln!(
        summary,
        "strength: {} (certified up to {copies})",
        report.strength
    );
    let _ = writeln!(
        summary,
        "score_exact: {} (optimal {})",
        exact_score(&p),
        optimal_score(copies)
    );
    let _ = writeln!(summary, "scalar_residual: {scalar:e}");
    let _ = writeln!(summary, "operator_residual: {operator:e}");
    let harmonic = report.max_exact_residual();
    let _ = writeln!(summary, "harmonic_residual: {harmonic:e}");
    // the POVM itself occupies stdout when no file is given
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    let ok = report.strength >= copies
        && scalar < CONSTRUCT_TOL
        && operator < CONSTRUCT_TOL
        && harmonic < CONSTRUCT_TOL;
    Ok(if ok { status::OK } else { status::VERIFICATION })
}

fn load_pointset(file: &Path, weights: Weights) -> Result<IngestedPointSet, Failure> {
    let mode = match weights {
        Weights::Auto => None,
        Weights::Uniform => Some(WeightMode::Uniform),
        Weights::Explicit => Some(WeightMode::Explicit),
    };
    Ok(read_pointset_file(file, mode)?)
}

#[derive(Serialize)]
struct CertifyOutput<'a> {
    file: String,
    n: usize,
    weight_scale: f64,
    #[serde(flatten)]
    report: &'a povmquad::CertificationReport,
}

fn certify_cmd(
    file: &Path,
    l_max: usize,
    tol: f64,
    expect: Option<usize>,
    weights: Weights,
    format: ReportFormat,
) -> CmdResult {
    check_tol(tol)?;
    let set = load_pointset(file, weights)?;
    let q = &set.quadrature;
    let report = certify(q, l_max, tol)?;
    let text = match format {
        ReportFormat::Json => {
            let out = CertifyOutput {
                file: file.display().to_string(),
                n: q.len(),
                weight_scale: set.weight_scale,
                report: &report,
            };
            serde_json::to_string_pretty(&out)
                .map_err(|e| Failure::new(status::IO, e.to_string()))?
                + "\n"
        }
        ReportFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "file: {}", file.display());
            let _ = writeln!(s, "points: {}", q.len());
            let _ = writeln!(s, "equal weights: {}", q.is_equal_weight());
            let _ = writeln!(s, "weight scale: {}", set.weight_scale);
            let _ = writeln!(s, "{:>4}  {:>12}  exact", "l", "residual");
            let _ = writeln!(
                s,
                "{:>4}  {:>12.3e}  {}",
                0,
                report.weight_sum_residual,
                mark(report.weight_sum_residual <= tol * FOUR_PI)
            );
            for (i, r) in report.residual_per_l.iter().enumerate() {
                let _ = writeln!(s, "{:>4}  {:>12.3e}  {}", i + 1, r, mark(*r <= tol));
            }
            let _ = writeln!(
                s,
                "strength: {} (tol {:e}, tested to l = {})",
                report.strength, tol, l_max
            );
            s
        }
    };
    write_output(None, &text)?;
    match expect {
        Some(want) if report.strength < want => {
            eprintln!("strength {} is below the expected {want}", report.strength);
            Ok(status::VERIFICATION)
        }
        _ => Ok(status::OK),
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "yes"
    } else {
        "no"
    }
}

fn strength_cmd(file: &Path, cap: usize, tol: f64, weights: Weights) -> CmdResult {
    check_tol(tol)?;
    let set = load_pointset(file, weights)?;
    let strength = povmquad::detect_strength(&set.quadrature, cap, tol)?;
    write_output(None, &format!("{strength}\n"))?;
    Ok(status::OK)
}

fn read_povm(path: &Path) -> Result<FinitePovm, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(FinitePovm::from_json(&text)?)
}

fn simulate(povm: &Path, trials: u64, seed: u64, format: ReportFormat) -> CmdResult {
    let p = read_povm(povm)?;
    let report = run_game(&p, trials as usize, seed)?;
    let text = match format {
        ReportFormat::Json => report.to_json()? + "\n",
        ReportFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "N: {}", report.copies);
            let _ = writeln!(s, "trials: {}", report.trials);
            let _ = writeln!(s, "seed: {}", report.seed);
            let _ = writeln!(s, "chunks: {}", report.chunks);
            let _ = writeln!(s, "mean_score: {}", report.mean_score);
            let _ = writeln!(s, "std_error: {}", report.std_error);
            let _ = writeln!(s, "expected: {}", report.expected);
            let _ = writeln!(s, "deviation: {:.3} sigma", report.z_score());
            s
        }
    };
    write_output(None, &text)?;
    if trials < MIN_TRIALS {
        eprintln!("insufficient trials: at least {MIN_TRIALS} are needed for a verdict");
        return Ok(status::INSUFFICIENT);
    }
    Ok(if report.z_score() < SIGMA_BUDGET {
        status::OK
    } else {
        status::VERIFICATION
    })
}

#[derive(Serialize)]
struct ScoreOutput {
    #[serde(rename = "N")]
    copies: usize,
    score_exact: f64,
    optimal: f64,
    /// Conditional score averaged with a rule exact through degree N + 1.
    score_quadrature: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    directions: Vec<DirectionScore>,
}

#[derive(Serialize)]
struct DirectionScore {
    theta: f64,
    phi: f64,
    score: f64,
}

fn score(povm: &Path, directions: Option<&Path>, format: ReportFormat) -> CmdResult {
    let p = read_povm(povm)?;
    let q = product_rule(p.copies() + 1);
    let nodes: Vec<_> = q.directions().collect();
    let conditional = score_by_direction(&p, &nodes);
    let averaged = q
        .points()
        .iter()
        .zip(&conditional)
        .map(|(pt, s)| pt.weight * s)
        .sum::<f64>()
        / FOUR_PI;
    let probes = match directions {
        Some(file) => {
            let set = load_pointset(file, Weights::Uniform)?;
            let dirs: Vec<_> = set.quadrature.directions().collect();
            let scores = score_by_direction(&p, &dirs);
            dirs.iter()
                .zip(scores)
                .map(|(d, score)| DirectionScore {
                    theta: d.theta(),
                    phi: d.phi(),
                    score,
                })
                .collect()
        }
        None => Vec::new(),
    };
    let out = ScoreOutput {
        copies: p.copies(),
        score_exact: exact_score(&p),
        optimal: optimal_score(p.copies()),
        score_quadrature: averaged,
        directions: probes,
    };
    let text = match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(&out)
                .map_err(|e| Failure::new(status::IO, e.to_string()))?
                + "\n"
        }
        ReportFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "N: {}", out.copies);
            let _ = writeln!(s, "score_exact: {}", out.score_exact);
            let _ = writeln!(s, "score_quadrature: {}", out.score_quadrature);
            let _ = writeln!(s, "optimal: {}", out.optimal);
            if !out.directions.is_empty() {
                let _ = writeln!(s, "theta phi score");
                for d in &out.directions {
                    let _ = writeln!(s, "{} {} {}", d.theta, d.phi, d.score);
                }
            }
            s
        }
    };
    write_output(None, &text)?;
    Ok(status::OK)
}

fn cell(c: Option<Count>) -> String {
    c.map(|c| c.value.to_string()).unwrap_or_default()
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut s = String::from("N,reference,legendre,lebedev,design,legendre_mixed,lebedev_mixed\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.copies,
            cell(r.reference),
            r.legendre.value,
            cell(r.lebedev),
            cell(r.design),
            r.legendre_mixed.value,
            cell(r.lebedev_mixed)
        );
    }
    s
}

fn table_text(rows: &[TableRow]) -> String {
    let mut s = format!(
        "{:>4} {:>9} {:>9} {:>8} {:>7} {:>15} {:>14}\n",
        "N", "reference", "legendre", "lebedev", "design", "legendre_mixed", "lebedev_mixed"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>4} {:>9} {:>9} {:>8} {:>7} {:>15} {:>14}",
            r.copies,
            cell(r.reference),
            r.legendre.value,
            cell(r.lebedev),
            cell(r.design),
            r.legendre_mixed.value,
            cell(r.lebedev_mixed)
        );
    }
    s.push_str("reference: minimal counts from exhaustive search, N <= 7 (not computed here)\n");
    s
}

fn table(nmax: usize, grids: Option<&Path>, format: TableFormat) -> CmdResult {
    let catalog = match grids {
        Some(dir) => {
            if !dir.is_dir() {
                eprintln!(
                    "grid directory {} not found; Lebedev and design columns omitted",
                    dir.display()
                );
            }
            GridCatalog::load(dir, nmax + 1)?
        }
        None => GridCatalog::default(),
    };
    for (path, reason) in &catalog.rejected {
        eprintln!("skipped {}: {reason}", path.display());
    }
    let rows = build_table(nmax, &catalog)?;
    let text = match format {
        TableFormat::Text => table_text(&rows),
        TableFormat::Csv => table_csv(&rows),
        TableFormat::Json => {
            serde_json::to_string_pretty(&rows)
                .map_err(|e| Failure::new(status::IO, e.to_string()))?
                + "\n"
        }
    };
    write_output(None, &text)?;
    Ok(status::OK)
}
