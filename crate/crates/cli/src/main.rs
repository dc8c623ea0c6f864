//! Command-line front end for certified eigenvalue bounds of self-similar
//! weight problems.
//!
//! Exit codes: 0 on success with all requested brackets certified, 2 when
//! any bracket could not be certified (search or refinement exhausted),
//! 1 on invalid input with a diagnostic naming the violated invariant.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use selfsim_sturm::certify::max_refinement_level;
use selfsim_sturm::selfsim::presets;
use selfsim_sturm::{
    approx_eigenvalues, assemble, bracket_eigenvalue, counting_bounds, inertia,
    negative_eigenvalues, parse_scalar, BracketStatus, EigenvalueBracket, MomentData,
    ParameterDoc, Rational, SimilaritySet,
};

#[derive(Parser)]
#[command(name = "selfsim-sturm", version, about = "Certified eigenvalue bounds for self-similar weights")]
struct Cli {
    #[command(flatten)]
    source: Source,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// JSON parameter file: {"a": [...], "d": [...], "beta": [...]} with
    /// exact scalar literals ("1/3", "0.5", "2").
    #[arg(long, global = true)]
    params: Option<std::path::PathBuf>,

    /// Built-in parameter set.
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Lebesgue,
    Cantor,
    Indefinite,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Certified two-sided brackets for eigenvalues by index.
    Bounds {
        /// Index or inclusive index range, e.g. "2" or "1..3".
        #[arg(long, default_value = "1")]
        n: String,
        /// Bracket width tolerance (exact scalar).
        #[arg(long, default_value = "1/1000")]
        tol: String,
        /// Upper end of the search interval (exact scalar).
        #[arg(long, default_value = "4096")]
        lambda_max: String,
        /// Refinement level ceiling; defaults to the size-cap maximum.
        #[arg(long)]
        m_max: Option<usize>,
        /// Bracket negative eigenvalues instead of positive ones.
        #[arg(long)]
        negative: bool,
    },
    /// Exact inertia of the pencil matrix at one test point.
    Inertia {
        /// Spectral parameter (exact scalar, positive).
        #[arg(long)]
        lambda: String,
        /// Refinement level.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Shift; defaults to 0 (unshifted matrix).
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Exact moments of the fixed point.
    Moments,
    /// Float approximation of the fixed point on a uniform grid.
    Sample {
        #[arg(long, default_value_t = 12)]
        iterations: usize,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Non-certified float eigenvalue estimates (sanity check only).
    Oracle {
        /// Index or inclusive index range, e.g. "2" or "1..3".
        #[arg(long, default_value = "1")]
        n: String,
        #[arg(long, default_value_t = 8)]
        mesh_level: usize,
        #[arg(long, default_value_t = 1e6)]
        lambda_max: f64,
    },
}

fn load_set(source: &Source) -> Result<SimilaritySet, String> {
    if let Some(preset) = source.preset {
        return Ok(match preset {
            Preset::Lebesgue => presets::lebesgue(),
            Preset::Cantor => presets::cantor(),
            Preset::Indefinite => presets::indefinite(),
        });
    }
    let path = source.params.as_ref().expect("clap enforces the group");
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let doc: ParameterDoc =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    SimilaritySet::from_doc(&doc).map_err(|e| e.to_string())
}

fn parse_index_range(text: &str) -> Result<(usize, usize), String> {
    let parse_one = |s: &str| {
        s.trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| format!("invalid eigenvalue index {s:?}"))
    };
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse_one(a)?, parse_one(b)?),
        None => {
            let n = parse_one(text)?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(format!("empty index range {text:?}"));
    }
    Ok((lo, hi))
}

fn scalar(text: &str) -> Result<Rational, String> {
    parse_scalar(text).map_err(|e| e.to_string())
}

/// 12-significant-digit decimal for table output.
fn dec(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Serialize)]
struct BoundsReport<'a> {
    side: &'a str,
    tolerance: Rational,
    brackets: Vec<EigenvalueBracket>,
}

fn run_bounds(
    s: &SimilaritySet,
    mom: &MomentData,
    format: Format,
    n: &str,
    tol: &str,
    lambda_max: &str,
    m_max: Option<usize>,
    negative: bool,
) -> Result<ExitCode, String> {
    let (n_lo, n_hi) = parse_index_range(n)?;
    let tol = scalar(tol)?;
    if !tol.is_positive() {
        return Err(format!("tolerance must be positive, got {tol}"));
    }
    let lambda_max = scalar(lambda_max)?;
    if !lambda_max.is_positive() {
        return Err(format!("lambda-max must be positive, got {lambda_max}"));
    }
    let m_max = m_max.unwrap_or_else(|| max_refinement_level(s));
    if m_max < 1 {
        return Err("m-max must be at least 1".into());
    }

    let mut brackets = Vec::new();
    for n in n_lo..=n_hi {
        let br = if negative {
            negative_eigenvalues(s, mom, n, &tol, &lambda_max, m_max)
        } else {
            bracket_eigenvalue(s, mom, n, &tol, &lambda_max, m_max)
        }
        .map_err(|e| e.to_string())?;
        brackets.push(br);
    }
    let all_certified = brackets
        .iter()
        .all(|b| b.status == BracketStatus::Certified);

    match format {
        Format::Json => {
            let report = BoundsReport {
                side: if negative { "negative" } else { "positive" },
                tolerance: tol,
                brackets,
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
        Format::Csv => {
            println!("n,lo,hi,status");
            for b in &brackets {
                println!("{},{},{},{}", b.n, b.lo, b.hi, status_word(&b.status));
            }
        }
        Format::Table => {
            println!("{:>3}  {:>20}  {:>20}  {:>18}  {:>18}  status", "n", "lo", "hi", "lo~", "hi~");
            for b in &brackets {
                println!(
                    "{:>3}  {:>20}  {:>20}  {:>18}  {:>18}  {}",
                    b.n,
                    b.lo.to_string(),
                    b.hi.to_string(),
                    dec(b.lo.to_f64()),
                    dec(b.hi.to_f64()),
                    status_word(&b.status)
                );
            }
        }
    }
    Ok(if all_certified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn status_word(s: &BracketStatus) -> String {
    match s {
        BracketStatus::Certified => "certified".into(),
        BracketStatus::NotFoundUpTo(l) => format!("not_found_up_to {l}"),
        BracketStatus::RefinementExhausted => "refinement_exhausted".into(),
    }
}

#[derive(Serialize)]
struct InertiaReport {
    lambda: Rational,
    m: usize,
    epsilon: Rational,
    dim: usize,
    negatives: usize,
    zeros: usize,
    positives: usize,
    counting_lower: Option<usize>,
    counting_upper: Option<usize>,
    conclusive_margin: bool,
}

fn run_inertia(
    s: &SimilaritySet,
    mom: &MomentData,
    format: Format,
    lambda: &str,
    m: usize,
    epsilon: Option<&str>,
) -> Result<ExitCode, String> {
    let lambda = scalar(lambda)?;
    if !lambda.is_positive() {
        return Err(format!("lambda must be positive, got {lambda}"));
    }
    if m < 1 {
        return Err("refinement level must be at least 1".into());
    }
    let refined = s.iterate(m).map_err(|e| e.to_string())?;
    let epsilon = match epsilon {
        Some(text) => {
            let e = scalar(text)?;
            if e.is_negative() {
                return Err(format!("epsilon must be nonnegative, got {e}"));
            }
            e
        }
        None => Rational::zero(),
    };
    let res = inertia(&assemble(&refined, mom, &lambda, &epsilon));
    let cb = counting_bounds(s, mom, &lambda, m).map_err(|e| e.to_string())?;
    let report = InertiaReport {
        lambda,
        m,
        epsilon,
        dim: refined.n_pieces() - 1,
        negatives: res.negatives,
        zeros: res.zeros,
        positives: res.positives,
        counting_lower: cb.conclusive_margin.then_some(cb.lower),
        counting_upper: cb.conclusive_margin.then_some(cb.upper),
        conclusive_margin: cb.conclusive_margin,
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => {
            println!("lambda,m,epsilon,dim,negatives,zeros,positives");
            println!(
                "{},{},{},{},{},{},{}",
                report.lambda,
                report.m,
                report.epsilon,
                report.dim,
                report.negatives,
                report.zeros,
                report.positives
            );
        }
        Format::Table => {
            println!("lambda   = {} ({})", report.lambda, dec(report.lambda.to_f64()));
            println!("level    = {} (dim {})", report.m, report.dim);
            println!("epsilon  = {}", report.epsilon);
            println!(
                "inertia  = {} negative / {} zero / {} positive",
                report.negatives, report.zeros, report.positives
            );
            if report.conclusive_margin {
                println!(
                    "counting = {} <= N(lambda) <= {}",
                    report.counting_lower.unwrap(),
                    report.counting_upper.unwrap()
                );
            } else {
                println!("counting = inconclusive margin at this level");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct MomentsReport {
    p0: Rational,
    p1: Rational,
    norm_sq: Rational,
    theta_sq: Rational,
}

fn run_moments(
    s: &SimilaritySet,
    mom: &MomentData,
    format: Format,
) -> Result<ExitCode, String> {
    let report = MomentsReport {
        p0: mom.p0.clone(),
        p1: mom.p1.clone(),
        norm_sq: mom.norm_sq.clone(),
        theta_sq: s.theta_sq().clone(),
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => {
            println!("name,value");
            println!("p0,{}", report.p0);
            println!("p1,{}", report.p1);
            println!("norm_sq,{}", report.norm_sq);
            println!("theta_sq,{}", report.theta_sq);
        }
        Format::Table => {
            println!("p0       = {:>12} ({})", report.p0.to_string(), dec(report.p0.to_f64()));
            println!("p1       = {:>12} ({})", report.p1.to_string(), dec(report.p1.to_f64()));
            println!("norm_sq  = {:>12} ({})", report.norm_sq.to_string(), dec(report.norm_sq.to_f64()));
            println!("theta_sq = {:>12} ({})", report.theta_sq.to_string(), dec(report.theta_sq.to_f64()));
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SampleReport {
    iterations: usize,
    grid: usize,
    sup_error_bound: f64,
    breakpoints: Vec<Rational>,
    values: Vec<f64>,
}

fn run_sample(
    s: &SimilaritySet,
    format: Format,
    iterations: usize,
    grid: usize,
) -> Result<ExitCode, String> {
    if iterations < 1 {
        return Err("need at least one iteration".into());
    }
    if grid < 2 {
        return Err("need at least two grid cells".into());
    }
    let sf = s.sample(iterations, grid).map_err(|e| e.to_string())?;
    match format {
        Format::Json => {
            let report = SampleReport {
                iterations,
                grid,
                sup_error_bound: sf.sup_error_bound,
                breakpoints: sf.breakpoints,
                values: sf.values,
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
        Format::Csv | Format::Table => {
            println!("x_left,x_right,value");
            for (i, v) in sf.values.iter().enumerate() {
                println!("{},{},{v}", sf.breakpoints[i], sf.breakpoints[i + 1]);
            }
            eprintln!("sup error bound: {:.3e}", sf.sup_error_bound);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_oracle(
    s: &SimilaritySet,
    mom: &MomentData,
    format: Format,
    n: &str,
    mesh_level: usize,
    lambda_max: f64,
) -> Result<ExitCode, String> {
    let (n_lo, n_hi) = parse_index_range(n)?;
    if mesh_level < 1 {
        return Err("mesh level must be at least 1".into());
    }
    if !(lambda_max > 0.0) {
        return Err("lambda-max must be positive".into());
    }
    let estimates = approx_eigenvalues(s, mom, n_hi, mesh_level, lambda_max)
        .map_err(|e| e.to_string())?;
    let window: Vec<_> = estimates
        .into_iter()
        .filter(|e| e.n >= n_lo)
        .collect();
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&window).unwrap()),
        Format::Csv => {
            println!("n,value,mesh_level");
            for e in &window {
                println!("{},{},{}", e.n, e.value, e.mesh_level);
            }
        }
        Format::Table => {
            println!("{:>3}  {:>18}  mesh_level", "n", "value");
            for e in &window {
                println!("{:>3}  {:>18}  {}", e.n, dec(e.value), e.mesh_level);
            }
            if window.len() < n_hi - n_lo + 1 {
                eprintln!("note: spectrum exhausted below lambda_max = {lambda_max}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let s = load_set(&cli.source)?;
    let mom = s.moments().map_err(|e| e.to_string())?;
    match &cli.command {
        Command::Bounds {
            n,
            tol,
            lambda_max,
            m_max,
            negative,
        } => run_bounds(&s, &mom, cli.format, n, tol, lambda_max, *m_max, *negative),
        Command::Inertia { lambda, m, epsilon } => {
            run_inertia(&s, &mom, cli.format, lambda, *m, epsilon.as_deref())
        }
        Command::Moments => run_moments(&s, &mom, cli.format),
        Command::Sample { iterations, grid } => {
            run_sample(&s, cli.format, *iterations, *grid)
        }
        Command::Oracle {
            n,
            mesh_level,
            lambda_max,
        } => run_oracle(&s, &mom, cli.format, n, *mesh_level, *lambda_max),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
