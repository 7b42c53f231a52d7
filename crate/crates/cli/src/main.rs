//! `unitwit`: build witness sets, check maps against them, and run the
//! identity and property suites.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 a capacity guard
//! tripped, 64 bad usage or unreadable input.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use unitwit::cayley_menger::{check_lemma, Lemma};
use unitwit::density::approximate_distance;
use unitwit::field::codec::parse_rational;
use unitwit::trials::{self, Proposition};
use unitwit::verifier::{check_map, PointMap, PointMapJson, VerificationReport};
use unitwit::witness::{Builder, Role, DEFAULT_DEPTH_LIMIT};
use unitwit::{DensityError, DistanceWord, TowerElement, VerifyError, WitnessError, WitnessSet};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_GUARD: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "unitwit", version, about = "Exact witness sets for unit-distance preserving maps R² → C²")]
struct Cli {
    /// Output format; dot and svg apply to `build` only.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Seed for every randomized suite.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    /// Largest word depth `build` will construct.
    #[arg(long, env = "UNITWIT_DEPTH_LIMIT", default_value_t = DEFAULT_DEPTH_LIMIT, global = true)]
    depth_limit: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Svg,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the canonical witness set for the distance (2√2/3)^k·(√3)^l.
    Build {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
    },
    /// Check a point map (JSON) against a witness set (JSON).
    Verify { set: PathBuf, map: PathBuf },
    /// Recompute the lemma determinants and compare with their factored forms.
    Identities {
        /// 1, 3, 4, 6 or all.
        #[arg(long, default_value = "all", value_parser = parse_lemma)]
        lemma: LemmaChoice,
    },
    /// Find the shortest (2√2/3)^k·(√3)^l within eps of a rational target.
    Approx {
        /// Rational `N/D` or integer.
        #[arg(long)]
        target: String,
        #[arg(long)]
        eps: String,
        /// Bound on each of k and l.
        #[arg(long, default_value_t = 40)]
        max_exp: u32,
    },
    /// Run the seeded randomized suites for the propositions.
    Props {
        /// 1, 2, 3a, 3b, 4 or all.
        #[arg(long, default_value = "all", value_parser = parse_prop)]
        prop: PropChoice,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
}

#[derive(Clone, Debug)]
struct LemmaChoice(Vec<Lemma>);

#[derive(Clone, Debug)]
struct PropChoice(Vec<Proposition>);

fn parse_lemma(s: &str) -> Result<LemmaChoice, String> {
    if s == "all" {
        return Ok(LemmaChoice(Lemma::ALL.to_vec()));
    }
    s.parse::<u8>()
        .ok()
        .and_then(Lemma::from_number)
        .map(|l| LemmaChoice(vec![l]))
        .ok_or_else(|| format!("no lemma {:?} (expected 1, 3, 4, 6 or all)", s))
}

fn parse_prop(s: &str) -> Result<PropChoice, String> {
    if s == "all" {
        return Ok(PropChoice(Proposition::ALL.to_vec()));
    }
    s.parse::<Proposition>().map(|p| PropChoice(vec![p]))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Failure {
        Failure::new(EXIT_USAGE, message)
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("unitwit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if !matches!(cli.command, Command::Build { .. }) && matches!(cli.format, Format::Dot | Format::Svg) {
        return Err(Failure::usage("--format dot and svg are only available for build"));
    }
    match &cli.command {
        Command::Build { k, l } => cmd_build(*k, *l, cli.format, cli.depth_limit),
        Command::Verify { set, map } => cmd_verify(set, map, cli.format),
        Command::Identities { lemma } => cmd_identities(&lemma.0, cli.format),
        Command::Approx { target, eps, max_exp } => cmd_approx(target, eps, *max_exp, cli.format),
        Command::Props { prop, trials } => cmd_props(&prop.0, *trials as usize, cli.seed, cli.format),
    }
}

fn cmd_build(k: u32, l: u32, format: Format, depth_limit: usize) -> Outcome {
    let word = DistanceWord::power(k, l);
    let mut builder = Builder::new().with_depth_limit(depth_limit);
    let set = builder.build_canonical(&word).map_err(|e| match e {
        WitnessError::DepthExceeded { .. } => Failure::new(EXIT_GUARD, e.to_string()),
        other => Failure::new(EXIT_CHECK_FAILED, other.to_string()),
    })?;
    let st = set.stats();
    eprintln!(
        "{}: {} points, {} unit pairs, {} derived pairs, tower height {}, max coefficient bits {}",
        word, st.point_count, st.unit_pair_count, st.derived_pair_count, st.tower_height, st.max_coefficient_bits
    );
    let out = match format {
        Format::Json => set.to_json().map_err(|e| Failure::new(EXIT_CHECK_FAILED, e.to_string()))?,
        Format::Dot => set.to_dot(),
        Format::Svg => set.to_svg(),
        Format::Text => describe_set(&set),
    };
    emit(&out);
    Ok(0)
}

fn describe_set(s: &WitnessSet) -> String {
    let mut out = String::new();
    let (x, y) = s.endpoint_points();
    let _ = writeln!(out, "word {}", s.word());
    let _ = writeln!(out, "endpoints {:?} and {:?}", x, y);
    let _ = writeln!(out, "points ({}):", s.len());
    for (label, p) in s.points() {
        let _ = writeln!(out, "  {}  {:?}  ≈ ({:.6}, {:.6})", label, p, p.x.to_f64(), p.y.to_f64());
    }
    let _ = writeln!(out, "pairs ({}):", s.pairs().len());
    for p in s.pairs() {
        let role = match p.role {
            Role::Unit => "unit",
            Role::Derived => "derived",
        };
        let _ = writeln!(out, "  {} {}  {:<7}  d² = {}", p.a, p.b, role, p.dist2);
    }
    out
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {}", path.display(), e)))
}

fn cmd_verify(set_path: &Path, map_path: &Path, format: Format) -> Outcome {
    let set = WitnessSet::from_json(&read(set_path)?)
        .map_err(|e| Failure::usage(format!("{}: {}", set_path.display(), e)))?;
    let map_json: PointMapJson =
        serde_json::from_str(&read(map_path)?).map_err(|e| Failure::usage(format!("{}: {}", map_path.display(), e)))?;
    let map =
        PointMap::from_json_value(&map_json).map_err(|e| Failure::usage(format!("{}: {}", map_path.display(), e)))?;
    let report = check_map(&set, &map).map_err(|e| match e {
        VerifyError::MissingLabel(_) => Failure::usage(e.to_string()),
        other => Failure::new(EXIT_CHECK_FAILED, other.to_string()),
    })?;
    match format {
        Format::Json => emit(&to_json(&report)?),
        _ => emit(&describe_report(&report)),
    }
    Ok(if report.consistent() { 0 } else { EXIT_CHECK_FAILED })
}

fn describe_report(r: &VerificationReport) -> String {
    let failed = r.failed_pairs().count();
    let mut out = String::new();
    let _ = writeln!(out, "unit pairs preserved: {}", if r.unit_ok { "yes" } else { "no" });
    let _ = writeln!(out, "pairs not preserved: {} of {}", failed, r.pair_results.len());
    for p in r.failed_pairs().take(10) {
        let _ = writeln!(out, "  {} {}: declared {}, got {}", p.a, p.b, p.declared, p.computed);
    }
    if failed > 10 {
        let _ = writeln!(out, "  ...");
    }
    let e = &r.endpoint_result;
    let _ = writeln!(
        out,
        "endpoints: expected {}, got {} ({})",
        e.expected,
        e.computed,
        if e.matches { "match" } else { "differ" }
    );
    let _ = writeln!(out, "{}", if r.consistent() { "CONSISTENT" } else { "INCONSISTENT" });
    out
}

fn cmd_identities(lemmas: &[Lemma], format: Format) -> Outcome {
    let mut all_passed = true;
    let mut json_out = Vec::new();
    let mut text = String::new();
    for &lemma in lemmas {
        let instances = check_lemma(lemma).map_err(|e| Failure::new(EXIT_CHECK_FAILED, e.to_string()))?;
        let passed = instances.iter().filter(|i| i.passed).count();
        all_passed &= passed == instances.len();
        let verdict = if passed == instances.len() { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{}: {} {} ({}/{})", lemma, lemma.formula(), verdict, passed, instances.len());
        for inst in &instances {
            let param = if lemma == Lemma::Four {
                format!("b = {}, a = {}", inst.d, inst.a)
            } else {
                format!("d = {}", inst.d)
            };
            let _ = writeln!(text, "  {}: {}  {}", param, inst.polynomial, if inst.passed { "ok" } else { "MISMATCH" });
        }
        json_out.push(json!({
            "lemma": lemma.number(),
            "formula": lemma.formula(),
            "passed": passed == instances.len(),
            "instances": instances.iter().map(|i| json!({
                "d": i.d,
                "a": i.a,
                "polynomial": i.polynomial.coeffs(),
                "display": i.polynomial.to_string(),
                "passed": i.passed,
            })).collect::<Vec<_>>(),
        }));
    }
    match format {
        Format::Json => emit(&to_json(&json_out)?),
        _ => emit(&text),
    }
    Ok(if all_passed { 0 } else { EXIT_CHECK_FAILED })
}

fn cmd_approx(target: &str, eps: &str, max_exp: u32, format: Format) -> Outcome {
    let target = parse_rational(target).map_err(|e| Failure::usage(format!("--target: {}", e)))?;
    let eps = parse_rational(eps).map_err(|e| Failure::usage(format!("--eps: {}", e)))?;
    let r = approximate_distance(&TowerElement::from_rational(&target), &eps, max_exp).map_err(|e| match e {
        DensityError::NonPositive => Failure::usage(e.to_string()),
        DensityError::SearchExhausted(_) => Failure::new(EXIT_GUARD, e.to_string()),
        other => Failure::new(EXIT_CHECK_FAILED, other.to_string()),
    })?;
    let j = r.to_json_value();
    match format {
        Format::Json => emit(&to_json(&j)?),
        _ => {
            emit(&format!(
                "k = {}, l = {}: (2√2/3)^{}·(√3)^{} = {} ≈ {:.6}\n|value − target| ≤ {} ≈ {:.6}",
                j.k, j.l, j.k, j.l, r.value_exact, j.value_approx, j.error_bound, j.error_bound_approx
            ));
        }
    }
    Ok(0)
}

fn cmd_props(props: &[Proposition], count: usize, seed: u64, format: Format) -> Outcome {
    let mut reports = Vec::new();
    for &p in props {
        reports.extend(trials::run(p, count, seed).map_err(|e| Failure::new(EXIT_CHECK_FAILED, e.to_string()))?);
    }
    match format {
        Format::Json => emit(&to_json(&reports)?),
        _ => {
            let mut text = String::new();
            for r in &reports {
                let _ = writeln!(text, "{}", r);
                if let Some(c) = &r.counterexample {
                    let _ = writeln!(text, "  counterexample: {}", serde_json::to_string(c).unwrap_or_default());
                }
            }
            emit(&text);
        }
    }
    Ok(if reports.iter().all(|r| r.ok()) { 0 } else { EXIT_CHECK_FAILED })
}

/// Write to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    let _ = writeln!(out, "{}", text.trim_end());
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::new(EXIT_CHECK_FAILED, e.to_string()))
}
