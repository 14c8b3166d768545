use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use wedgesq::combinat::{Pair, Quad};
use wedgesq::diagram::{self, build_diagram, diagram_exterior_number, Highlights};
use wedgesq::exalg::{wedge, Indexing, SquareMatrix};
use wedgesq::io::{format_matrix, matrix_to_json, parse_matrix, FileError};
use wedgesq::random::{random_invertible, random_matrix, random_member, rng_from_seed, PRNG_ID};
use wedgesq::scalar::{RingTag, Scalar};
use wedgesq::scheme::{
    congruence_membership_with, exterior_number, membership_with, second_form_membership, ExtNumberKey,
    MembershipOptions, Observer,
};
use wedgesq::selftest::{run_selftest, Level};
use wedgesq::transvect::{decompose_wedge2, random_elementary, verify_decomposition};

const EXIT_REJECT: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_DISAGREE: u8 = 4;

#[derive(Parser)]
#[command(name = "wedgesq", version, about = "Exterior squares of GL_n: wedge powers, membership, diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compound matrix of a plain-indexed matrix file.
    Wedge {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        power: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether a wedge2 matrix lies in the exterior-square scheme.
    Membership {
        input: PathBuf,
        /// Test the equations modulo m (integer input only).
        #[arg(long = "mod")]
        modulus: Option<u64>,
        /// Also run the B-matrix system and compare verdicts.
        #[arg(long)]
        second_form: bool,
        /// Skip the invertibility check.
        #[arg(long)]
        equations_only: bool,
        /// Report every violation instead of the first.
        #[arg(long)]
        full_report: bool,
        /// Print every checked key to stderr.
        #[arg(long)]
        trace: bool,
        /// Record det θ on acceptance.
        #[arg(long)]
        theta_det: bool,
        /// Split the sweep across threads.
        #[arg(long)]
        parallel: bool,
    },
    /// A single exterior number a^H_{A,C}.
    ExteriorNumber {
        input: PathBuf,
        #[arg(long = "a")]
        a: String,
        #[arg(long = "c")]
        c: String,
        #[arg(long = "h")]
        h: String,
        #[arg(long, value_enum, default_value_t = Via::Direct)]
        via: Via,
    },
    /// Factor ∧²t_{i,j}(ξ) into elementary transvections.
    Decompose {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, default_value = "z")]
        ring: String,
    },
    /// Draw the weight diagram.
    Diagram {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = DiagramFormat::Ascii)]
        format: DiagramFormat,
        /// Highlight the path of vertex labels containing i (repeatable).
        #[arg(long = "path")]
        paths: Vec<usize>,
        /// Highlight the elementary square of a 4-set, e.g. 1,2,4,6.
        #[arg(long)]
        square: Option<String>,
        /// Annotate the square's pairings with their signs.
        #[arg(long)]
        signs: bool,
    },
    /// Run the invariant suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = SelftestLevel::Quick)]
        level: SelftestLevel,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a seeded test matrix.
    Random {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = RandomKind::Member)]
        kind: RandomKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of transvections for --kind elementary.
        #[arg(long, default_value_t = 20)]
        length: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Via {
    Direct,
    Diagram,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagramFormat {
    Ascii,
    Dot,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelftestLevel {
    Quick,
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RandomKind {
    /// Uniform entries, plain indexing.
    Matrix,
    /// Invertible, plain indexing.
    Invertible,
    /// Product of random transvections, plain indexing.
    Elementary,
    /// ∧² of a random invertible matrix.
    Member,
}

impl RandomKind {
    fn name(self) -> &'static str {
        match self {
            RandomKind::Matrix => "matrix",
            RandomKind::Invertible => "invertible",
            RandomKind::Elementary => "elementary",
            RandomKind::Member => "member",
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl ToString) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: message.to_string(),
        }
    }

    fn domain(message: impl ToString) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            message: message.to_string(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read_matrix(path: &Path) -> Result<SquareMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| match e {
        FileError::Matrix(wedgesq::exalg::MatrixError::RingMismatch(..)) => Failure::domain(e),
        other => Failure::parse(other),
    })
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::domain(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn parse_ring(text: &str) -> Result<RingTag, Failure> {
    text.parse().map_err(Failure::parse)
}

fn cmd_wedge(input: &Path, power: usize, output: Option<&Path>) -> CmdResult {
    let x = read_matrix(input)?;
    if !matches!(x.indexing(), Indexing::Plain(_)) {
        return Err(Failure::domain(format!("expected plain indexing, got {}", x.indexing())));
    }
    let w = wedge(power, &x).map_err(Failure::domain)?;
    emit(output, &format_matrix(&w))?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_membership(
    input: &Path,
    modulus: Option<u64>,
    second_form: bool,
    equations_only: bool,
    full_report: bool,
    trace: bool,
    theta_det: bool,
    parallel: bool,
) -> CmdResult {
    let g = read_matrix(input)?;
    let opts = MembershipOptions {
        require_invertible: !equations_only,
        full_report,
        parallel,
        theta_determinant: theta_det,
    };
    let n = g.indexing().base_rank();
    let stderr = std::io::stderr();
    let mut lock = stderr.lock();
    let mut observer = |k: &ExtNumberKey, v: &Scalar, ok: bool| {
        let _ = writeln!(
            lock,
            "{} A={} C={} H={} value={v}",
            if ok { "ok" } else { "VIOLATED" },
            k.a.label(n),
            k.c.label(n),
            k.h.label(n)
        );
    };
    let trace_fn: Option<&mut Observer> =
        if trace { Some(&mut observer) } else { None };
    let report = match modulus {
        Some(m) => congruence_membership_with(&g, m, &opts, trace_fn),
        None => membership_with(&g, &opts, trace_fn),
    }
    .map_err(Failure::domain)?;
    let mut out = report.to_json();
    out["n"] = json!(n);
    out["ring"] = json!(g.ring().to_string());
    if second_form {
        let target = match modulus {
            Some(m) => g
                .convert(RingTag::modulo(m).map_err(Failure::domain)?)
                .map_err(Failure::domain)?,
            None => g.clone(),
        };
        let second = second_form_membership(&target).map_err(Failure::domain)?;
        out["second_form"] = second.to_json();
        if second.accepted() != report.accepted() {
            print_json(&out);
            return Err(Failure {
                code: EXIT_DISAGREE,
                message: "membership and second-form verdicts disagree".into(),
            });
        }
    }
    print_json(&out);
    Ok(if report.accepted() { 0 } else { EXIT_REJECT })
}

fn cmd_exterior_number(input: &Path, a: &str, c: &str, h: &str, via: Via) -> CmdResult {
    let g = read_matrix(input)?;
    let n = g.indexing().base_rank();
    let a = Pair::parse(a, n).map_err(Failure::domain)?;
    let c = Pair::parse(c, n).map_err(Failure::domain)?;
    let h = Quad::parse(h, n).map_err(Failure::domain)?;
    let (value, route) = match via {
        Via::Direct => (exterior_number(&g, a, c, h), "direct"),
        Via::Diagram => (diagram_exterior_number(&g, a, c, h), "diagram"),
    };
    let value = value.map_err(Failure::domain)?;
    print_json(&json!({
        "A": a.label(n),
        "C": c.label(n),
        "H": h.label(n),
        "value": value.to_string(),
        "via": route,
    }));
    Ok(0)
}

fn cmd_decompose(n: usize, i: usize, j: usize, xi: &str, ring: &str) -> CmdResult {
    let ring = parse_ring(ring)?;
    let xi = Scalar::parse(ring, xi).map_err(Failure::parse)?;
    let factors = decompose_wedge2(n, i, j, &xi).map_err(Failure::domain)?;
    print_json(&json!({
        "n": n,
        "i": i,
        "j": j,
        "xi": xi.to_string(),
        "ring": ring.to_string(),
        "factors": factors.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
        "verified": verify_decomposition(n, i, j, &xi),
    }));
    Ok(0)
}

fn cmd_diagram(n: usize, format: DiagramFormat, paths: Vec<usize>, square: Option<&str>, signs: bool) -> CmdResult {
    let d = build_diagram(n).map_err(Failure::domain)?;
    let square = square
        .map(|s| Quad::parse(s, n))
        .transpose()
        .map_err(Failure::domain)?;
    let format = match format {
        DiagramFormat::Ascii => diagram::Format::Ascii,
        DiagramFormat::Dot => diagram::Format::Dot,
        DiagramFormat::Svg => diagram::Format::Svg,
    };
    let hl = Highlights { paths, square, signs };
    print!("{}", diagram::render(&d, format, &hl).map_err(Failure::domain)?);
    Ok(0)
}

fn cmd_selftest(level: SelftestLevel, seed: u64) -> CmdResult {
    let level = match level {
        SelftestLevel::Quick => Level::Quick,
        SelftestLevel::Full => Level::Full,
    };
    let report = run_selftest(level, seed);
    print!("{}", report.summary());
    Ok(if report.passed() { 0 } else { EXIT_REJECT })
}

fn cmd_random(ring: &str, n: usize, kind: RandomKind, seed: u64, length: usize, output: Option<&Path>) -> CmdResult {
    let ring = parse_ring(ring)?;
    if kind == RandomKind::Member && n < 2 {
        return Err(Failure::domain("member matrices need n >= 2"));
    }
    let mut rng = rng_from_seed(seed);
    let m = match kind {
        RandomKind::Matrix => random_matrix(&mut rng, ring, Indexing::Plain(n)),
        RandomKind::Invertible => {
            if n == 0 {
                SquareMatrix::identity(ring, Indexing::Plain(0))
            } else {
                random_invertible(&mut rng, ring, n)
            }
        }
        RandomKind::Elementary => random_elementary(n, length, ring, seed),
        RandomKind::Member => random_member(&mut rng, ring, n).1,
    };
    let mut v = matrix_to_json(&m);
    v["meta"] = json!({ "prng": PRNG_ID, "seed": seed, "kind": kind.name() });
    let mut text = serde_json::to_string(&v).expect("json values serialize");
    text.push('\n');
    emit(output, &text)?;
    Ok(0)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Wedge { input, power, output } => cmd_wedge(&input, power, output.as_deref()),
        Command::Membership {
            input,
            modulus,
            second_form,
            equations_only,
            full_report,
            trace,
            theta_det,
            parallel,
        } => cmd_membership(&input, modulus, second_form, equations_only, full_report, trace, theta_det, parallel),
        Command::ExteriorNumber { input, a, c, h, via } => cmd_exterior_number(&input, &a, &c, &h, via),
        Command::Decompose { n, i, j, xi, ring } => cmd_decompose(n, i, j, &xi, &ring),
        Command::Diagram {
            n,
            format,
            paths,
            square,
            signs,
        } => cmd_diagram(n, format, paths, square.as_deref(), signs),
        Command::Selftest { level, seed } => cmd_selftest(level, seed),
        Command::Random {
            ring,
            n,
            kind,
            seed,
            length,
            output,
        } => cmd_random(&ring, n, kind, seed, length, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
