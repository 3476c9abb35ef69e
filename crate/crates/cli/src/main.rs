use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use wildkit::lie::{derived_subalgebra, iso_from_similarity, lie_build, similarity_from_iso, verify_lie_iso};
use wildkit::pencil::{are_weakly_similar, spaces_similar};
use wildkit::random::{gen_random, RandomMode, RandomSpec};
use wildkit::reduction::{build_m_pair, default_lambda, full_reduce, gp_reduce};
use wildkit::similarity::are_similar;
use wildkit::suite::{run_suite, SuiteParams, SUITES};
use wildkit::{
    CertificateKind, Decision, Error, Field, LieAlgebra, LieIso, Matrix, MatrixPair, PencilTransform, Scalar,
    SearchBudget, TwoDimSpace, Verdict,
};

const EXIT_INTERNAL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NO: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(name = "wildkit", version, about = "Reductions and deciders for matrix pairs, pencils and bordered Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a reduction from an input pair.
    Reduce(ReduceArgs),
    /// Decide an equivalence between two inputs.
    Check(CheckArgs),
    /// Lie algebras of two-dimensional commuting spaces.
    #[command(subcommand)]
    Lie(LieCommand),
    /// Generate seeded random instances.
    Gen(GenArgs),
    /// Run a verification suite.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceKind {
    /// (X, Y) to the commuting nilpotent pair (J, K_XY).
    Gp,
    /// (A, B) to (M1(A), M2(B)).
    Weak,
    /// (X, Y) to (M1(λI + J), M2(K_XY)).
    Full,
}

#[derive(Args)]
struct ReduceArgs {
    kind: ReduceKind,
    /// Input pair JSON {"a", "b"}.
    #[arg(long = "in")]
    input: PathBuf,
    /// `auto` or a field element.
    #[arg(long, default_value = "auto")]
    lambda: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Similar,
    WeakSimilar,
    SpaceSimilar,
    LieIso,
}

#[derive(Args)]
struct BudgetArgs {
    /// Largest candidate count searched exhaustively.
    #[arg(long, default_value_t = SearchBudget::default().enumeration_limit)]
    budget: u64,
    /// Random candidates drawn beyond the exhaustive regime.
    #[arg(long, default_value_t = SearchBudget::default().samples)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            enumeration_limit: self.budget,
            samples: self.samples,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    kind: CheckKind,
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    /// JSON array of 2x2 transforms tried by `weak-similar`.
    #[arg(long)]
    candidates: Option<PathBuf>,
    /// Coordinate map for `lie-iso`.
    #[arg(long)]
    phi: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LieCommand {
    /// L(V) from a space JSON.
    Build {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derived subalgebra of a Lie algebra (or space) JSON.
    Derived {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Isomorphism L(V) -> L(V') induced by S and P with S·V·S⁻¹ = P·V'.
    Iso {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover (S, P) from an isomorphism L(V) -> L(V').
    Extract {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    field: Field,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "arbitrary-pair")]
    mode: RandomMode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Suite name; `list` prints the published names.
    name: String,
    #[arg(long, default_value_t = SuiteParams::default().seed)]
    seed: u64,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_internal() { EXIT_INTERNAL } else { EXIT_INPUT },
            message: e.to_string(),
        }
    }
}

impl From<wildkit::MatrixError> for Failure {
    fn from(e: wildkit::MatrixError) -> Self {
        Error::from(e).into()
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn internal_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

/// A Lie algebra document, or a space document built on the fly.
fn read_lie(path: &Path) -> Result<LieAlgebra, Failure> {
    let value: Value = read_json(path)?;
    if value.get("structure").is_some() {
        serde_json::from_value(value).map_err(|e| input_error(format!("{}: {e}", path.display())))
    } else {
        let v: TwoDimSpace =
            serde_json::from_value(value).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
        Ok(lie_build(&v)?)
    }
}

fn emit(value: &impl Serialize, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| internal_error(e.to_string()))?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Yes => 0,
        Verdict::No => EXIT_NO,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn parse_lambda(text: &str, field: Field) -> Result<Scalar, Failure> {
    if text == "auto" {
        Ok(default_lambda(field))
    } else {
        field
            .parse(text)
            .map_err(|e| input_error(format!("--lambda {text:?}: {e}")))
    }
}

fn ensure(cond: bool, what: &str) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(internal_error(format!("invariant failed: {what}")))
    }
}

fn cmd_reduce(args: &ReduceArgs) -> CmdResult {
    let input: MatrixPair = read_json(&args.input)?;
    let field = input.field();
    let (x, y) = (input.a(), input.b());
    let doc = match args.kind {
        ReduceKind::Gp => {
            let gp = gp_reduce(x, y)?;
            let (j, k) = (gp.pair.a(), gp.pair.b());
            let commuting = gp.pair.commutes();
            let j4 = j.pow(4)?.is_zero();
            let k3 = k.pow(3)?.is_zero();
            ensure(commuting && j4 && k3, "J, K_XY commute, J⁴ = 0, K³ = 0")?;
            json!({
                "reduction": "gp",
                "n": gp.n,
                "pair": &gp.pair,
                "provenance": { "x": &gp.x, "y": &gp.y },
                "invariants": {
                    "commuting": commuting,
                    "j4_zero": j4,
                    "k3_zero": k3,
                    "nilpotency_j": j.nilpotency_index()?,
                    "nilpotency_k": k.nilpotency_index()?,
                    "rank_j": j.rank(),
                    "rank_k": k.rank(),
                },
            })
        }
        ReduceKind::Weak => {
            let lambda = parse_lambda(&args.lambda, field)?;
            let w = build_m_pair(x, y, &lambda)?;
            let (m1, m2) = (w.pair.a(), w.pair.b());
            let (r1, r2) = (m1.rank(), m2.rank());
            ensure(r1 <= 4 * w.m + 3 && r2 <= 5 * w.m + 4, "rank M1 ≤ 4m+3, rank M2 ≤ 5m+4")?;
            json!({
                "reduction": "weak",
                "m": w.m,
                "lambda": &w.lambda,
                "pair": &w.pair,
                "provenance": { "a": &w.a, "b": &w.b },
                "invariants": {
                    "commuting": w.pair.commutes(),
                    "rank_m1": r1,
                    "rank_m2": r2,
                },
                "warnings": &w.warnings,
            })
        }
        ReduceKind::Full => {
            let lambda = parse_lambda(&args.lambda, field)?;
            let w = full_reduce(x, y, &lambda)?;
            let commuting = w.pair.commutes();
            let nonsingular = w.sum_is_nonsingular();
            ensure(commuting, "full reduction commutes")?;
            ensure(nonsingular || field.is_gf2(), "M1(λI+J) + M2(K_XY) nonsingular")?;
            json!({
                "reduction": "full",
                "n": x.rows(),
                "lambda": &w.lambda,
                "pair": &w.pair,
                "provenance": { "x": x, "y": y },
                "invariants": {
                    "commuting": commuting,
                    "rank_m1": w.pair.a().rank(),
                    "rank_m2": w.pair.b().rank(),
                },
                "nonsingular_sum": nonsingular,
                "warnings": &w.warnings,
            })
        }
    };
    emit(&doc, args.out.as_deref())?;
    Ok(0)
}

fn emit_decision<W: Serialize>(d: &Decision<W>, out: Option<&Path>) -> CmdResult {
    emit(d, out)?;
    Ok(verdict_code(d.verdict))
}

fn cmd_check(args: &CheckArgs) -> CmdResult {
    let budget = args.budget.budget();
    let out = args.out.as_deref();
    match args.kind {
        CheckKind::Similar => {
            let l: MatrixPair = read_json(&args.left)?;
            let r: MatrixPair = read_json(&args.right)?;
            emit_decision(&are_similar(&l, &r, &budget)?, out)
        }
        CheckKind::WeakSimilar => {
            let l: MatrixPair = read_json(&args.left)?;
            let r: MatrixPair = read_json(&args.right)?;
            let candidates: Option<Vec<PencilTransform>> =
                args.candidates.as_deref().map(read_json).transpose()?;
            emit_decision(&are_weakly_similar(&l, &r, &budget, candidates.as_deref())?, out)
        }
        CheckKind::SpaceSimilar => {
            let v: TwoDimSpace = read_json(&args.left)?;
            let w: TwoDimSpace = read_json(&args.right)?;
            emit_decision(&spaces_similar(&v, &w, &budget)?, out)
        }
        CheckKind::LieIso => {
            let phi_path = args.phi.as_deref().ok_or_else(|| input_error("lie-iso requires --phi"))?;
            let l = read_lie(&args.left)?;
            let l2 = read_lie(&args.right)?;
            let phi: LieIso = read_json(phi_path)?;
            let budget = Default::default();
            let d = if verify_lie_iso(&l, &l2, &phi) {
                Decision::yes(phi, CertificateKind::DeterministicPolynomial, budget)
            } else {
                Decision::no(CertificateKind::DeterministicPolynomial, budget)
            };
            emit_decision(&d, out)
        }
    }
}

fn cmd_lie(cmd: &LieCommand) -> CmdResult {
    match cmd {
        LieCommand::Build { input, out } => {
            let v: TwoDimSpace = read_json(input)?;
            let l = lie_build(&v)?;
            if l.warnings().is_empty() {
                emit(&l, out.as_deref())?;
            } else {
                let mut doc = serde_json::to_value(&l).map_err(|e| internal_error(e.to_string()))?;
                doc["warnings"] = json!(l.warnings());
                emit(&doc, out.as_deref())?;
            }
        }
        LieCommand::Derived { input, out } => {
            let l = read_lie(input)?;
            let (dim, basis) = derived_subalgebra(&l);
            emit(&json!({ "dim": dim, "basis": basis }), out.as_deref())?;
        }
        LieCommand::Iso { left, right, s, p, out } => {
            let v: TwoDimSpace = read_json(left)?;
            let v2: TwoDimSpace = read_json(right)?;
            let s: Matrix = read_json(s)?;
            let p: Matrix = read_json(p)?;
            emit(&iso_from_similarity(&v, &v2, &s, &p)?, out.as_deref())?;
        }
        LieCommand::Extract { left, right, phi, out } => {
            let l = read_lie(left)?;
            let l2 = read_lie(right)?;
            let phi: LieIso = read_json(phi)?;
            let (s, p) = similarity_from_iso(&l, &l2, &phi)?;
            emit(&json!({ "s": s, "p": p }), out.as_deref())?;
        }
    }
    Ok(0)
}

fn cmd_gen(args: &GenArgs) -> CmdResult {
    let spec = RandomSpec {
        field: args.field,
        n: args.n,
        count: args.count,
        seed: args.seed,
        mode: args.mode,
    };
    emit(&gen_random(&spec)?, args.out.as_deref())?;
    Ok(0)
}

fn cmd_suite(args: &SuiteArgs) -> CmdResult {
    if args.name == "list" {
        let names: Vec<&str> = SUITES.iter().map(|(n, _)| *n).collect();
        emit(&names, args.out.as_deref())?;
        return Ok(0);
    }
    if !SUITES.iter().any(|(n, _)| *n == args.name) {
        let names: Vec<&str> = SUITES.iter().map(|(n, _)| *n).collect();
        return Err(input_error(format!(
            "unknown suite {:?}; available: {}",
            args.name,
            names.join(", ")
        )));
    }
    let params = SuiteParams {
        seed: args.seed,
        count: args.count,
        ..SuiteParams::default()
    };
    let report = run_suite(&args.name, &params)?;
    emit(&report, args.out.as_deref())?;
    Ok(if report.all_passed() { 0 } else { EXIT_INTERNAL })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Reduce(a) => cmd_reduce(a),
        Command::Check(a) => cmd_check(a),
        Command::Lie(c) => cmd_lie(c),
        Command::Gen(a) => cmd_gen(a),
        Command::Suite(a) => cmd_suite(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
