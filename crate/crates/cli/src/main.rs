use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qform_core::bounds::{
    invariant_generators, norm_generators, stability_bound, verify_fg_module, FgReport, GeneratorsCertificate,
    StabilityBound, VirtuallyAbelianInput, DEFAULT_DEGREE_BOUND,
};
use qform_core::factorization::VerificationReport;
use qform_core::pairs::{
    complete_pair, transport, CoefficientDomain, Family, HyperbolicPair, SearchLimits, StabilizedSpace,
    TransitivityReport, TransportOutcome, TransportReport,
};
use qform_core::sampling::Sampler;
use qform_core::transvection::verify_isometry_with;
use qform_core::{
    factorize, verify_certificate, FactorizationCertificate, FactorizationInput, Group, IsometryReport, ModuleVector,
    QuadraticModule, RingElement, SearchBounds, Transvection, Unimodularity, UnitaryRing,
};

#[derive(Parser)]
#[command(name = "qform", version, about = "Quadratic modules over group rings with involution")]
struct Cli {
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the JSON report to this file
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check any JSON artifact, printing its canonical form
    Validate(ValidateArgs),
    /// The hyperbolic module H(A^k)
    Hyperbolic {
        #[arg(long)]
        context: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Apply a transvection to a vector
    Apply {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        transvection: PathBuf,
        /// Vector to map
        #[arg(long)]
        input: PathBuf,
    },
    /// Check that a transvection preserves the form and the refinement
    VerifyIsometry {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        transvection: PathBuf,
        /// Random vectors checked in addition to the basis
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Factor a stabilized transvection into elementary ones
    Factorize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Recheck a factorization certificate from scratch
    VerifyCert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Complete a unimodular isotropic vector to a hyperbolic pair
    CompletePair {
        /// {"module", "p", "y"?}
        #[arg(long)]
        input: PathBuf,
    },
    /// Search for a word of elementary transvections moving one pair to another
    Transport {
        /// {"v", "p_rank", "source", "target"?}
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        modulus: u32,
        #[arg(long, default_value_t = SearchLimits::default().max_depth)]
        max_depth: usize,
        #[arg(long, default_value_t = SearchLimits::default().node_budget)]
        node_budget: usize,
        /// Comma-separated generator families; all by default
        #[arg(long, value_delimiter = ',')]
        families: Vec<String>,
        /// Also compare the full orbit of the standard pair with all pairs
        #[arg(long)]
        orbit: bool,
    },
    /// Stability bound for a virtually abelian group
    Bound {
        #[arg(long)]
        group: PathBuf,
    },
    /// Generators of the invariant ring R
    Invariants {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND)]
        degree: u64,
    },
    /// Generators of the norm subring R0
    Norms {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND)]
        degree: u64,
    },
    /// Check finite generation of A0 over given ring generators up to a degree
    VerifyFg {
        /// {"group" | virtually abelian input fields, "ring_generators"?, "candidates"}
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND)]
        degree: u64,
    },
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Artifact kind; detected from the keys when omitted
    #[arg(long)]
    kind: Option<Kind>,
    /// Module against which vectors and transvections are checked
    #[arg(long)]
    module: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
enum Kind {
    Group,
    Context,
    Module,
    Vector,
    Transvection,
    FactorizationInput,
    Certificate,
    VerificationReport,
    Pair,
    CompletionInput,
    TransportInput,
    TransportReport,
    TransitivityReport,
    IsometryReport,
    VirtuallyAbelian,
    Bound,
    Generators,
    FgInput,
    FgReport,
    Validation,
}

const EXIT_MALFORMED: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;
const EXIT_FAILED: u8 = 4;

struct Outcome {
    report: Value,
    summary: String,
    code: u8,
}

impl Outcome {
    fn ok(report: impl Serialize, summary: impl Into<String>) -> anyhow::Result<Self> {
        Self::with_code(report, summary, 0)
    }

    fn with_code(report: impl Serialize, summary: impl Into<String>, code: u8) -> anyhow::Result<Self> {
        Ok(Outcome {
            report: serde_json::to_value(report)?,
            summary: summary.into(),
            code,
        })
    }
}

#[derive(Deserialize)]
struct CompletionInput {
    module: QuadraticModule,
    p: ModuleVector,
    #[serde(default)]
    y: Option<ModuleVector>,
}

#[derive(Deserialize)]
struct TransportInput {
    v: QuadraticModule,
    p_rank: usize,
    source: PairInput,
    #[serde(default)]
    target: Option<PairInput>,
}

#[derive(Deserialize)]
struct PairInput {
    p: ModuleVector,
    q: ModuleVector,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BoundsGroup {
    Explicit(VirtuallyAbelianInput),
    Group { group: Group },
    Bare(Group),
}

impl BoundsGroup {
    fn input(self) -> anyhow::Result<VirtuallyAbelianInput> {
        Ok(match self {
            BoundsGroup::Explicit(va) => va,
            BoundsGroup::Group { group } | BoundsGroup::Bare(group) => VirtuallyAbelianInput::from_group(&group)?,
        })
    }
}

#[derive(Deserialize)]
struct FgInput {
    #[serde(flatten)]
    group: BoundsGroup,
    #[serde(default)]
    ring_generators: Option<Vec<RingElement>>,
    candidates: Vec<RingElement>,
}

fn read_value(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    from_value(read_value(path)?, path)
}

fn from_value<T: DeserializeOwned>(value: Value, path: &Path) -> anyhow::Result<T> {
    serde_json::from_value(value).with_context(|| format!("decoding {}", path.display()))
}

/// Reads `{v0, v1, target}` in two steps, so that the structural checks
/// (exit 1) are separate from the preconditions on the target (exit 2).
fn read_factorization_input(path: &Path) -> anyhow::Result<FactorizationInput> {
    #[derive(Deserialize)]
    struct Parts {
        v0: QuadraticModule,
        v1: QuadraticModule,
        target: Transvection,
    }
    let parts: Parts = read(path)?;
    Ok(FactorizationInput::new(parts.v0, parts.v1, parts.target)?)
}

fn detect(value: &Value) -> anyhow::Result<Kind> {
    let Some(obj) = value.as_object() else {
        bail!("expected a JSON object");
    };
    let has = |keys: &[&str]| keys.iter().all(|k| obj.contains_key(*k));
    let kind = if has(&["valid", "kind", "value"]) {
        Kind::Validation
    } else if has(&["v0", "v1", "target"]) {
        Kind::FactorizationInput
    } else if has(&["factors"]) {
        Kind::Certificate
    } else if has(&["passed", "factors_checked"]) {
        Kind::VerificationReport
    } else if has(&["passed", "pairs_checked"]) {
        Kind::IsometryReport
    } else if has(&["passed", "per_degree"]) {
        Kind::FgReport
    } else if has(&["status", "nodes_explored"]) {
        Kind::TransportReport
    } else if has(&["total_pairs", "unreachable"]) {
        Kind::TransitivityReport
    } else if has(&["v", "p_rank", "source"]) {
        Kind::TransportInput
    } else if has(&["module", "p"]) {
        Kind::CompletionInput
    } else if has(&["candidates"]) {
        Kind::FgInput
    } else if has(&["generators", "construction"]) {
        Kind::Generators
    } else if has(&["n", "action"]) {
        Kind::VirtuallyAbelian
    } else if has(&["d", "summands"]) {
        Kind::Bound
    } else if has(&["gram"]) {
        Kind::Module
    } else if has(&["coords"]) {
        Kind::Vector
    } else if has(&["u", "a", "v"]) {
        Kind::Transvection
    } else if has(&["p", "q"]) {
        Kind::Pair
    } else if has(&["kind"]) {
        Kind::Group
    } else if has(&["group"]) {
        Kind::Context
    } else {
        bail!("cannot tell what kind of artifact this is; pass --kind");
    };
    Ok(kind)
}

/// Parses `value` as `kind` and returns its canonical serialization.
fn canonical(kind: Kind, value: Value, path: &Path, module: Option<&QuadraticModule>) -> anyhow::Result<Value> {
    fn round<T: DeserializeOwned + Serialize>(value: Value, path: &Path) -> anyhow::Result<Value> {
        Ok(serde_json::to_value(from_value::<T>(value, path)?)?)
    }
    match kind {
        Kind::Group => round::<Group>(value, path),
        Kind::Context => round::<UnitaryRing>(value, path),
        Kind::Module => round::<QuadraticModule>(value, path),
        Kind::Vector => {
            let x: ModuleVector = from_value(value, path)?;
            if let Some(m) = module {
                m.check_vector(&x)?;
            }
            Ok(serde_json::to_value(x)?)
        }
        Kind::Transvection => {
            let t: Transvection = from_value(value, path)?;
            if let Some(m) = module {
                t.validate(m)?;
            }
            Ok(serde_json::to_value(t)?)
        }
        Kind::FactorizationInput => {
            let v: FactorizationInput = from_value(value, path)?;
            Ok(serde_json::to_value(v)?)
        }
        Kind::Certificate => round::<FactorizationCertificate>(value, path),
        Kind::VerificationReport => round::<VerificationReport>(value, path),
        Kind::Pair => {
            let pair: HyperbolicPair = from_value(value, path)?;
            if let Some(m) = module {
                let pair = HyperbolicPair::new(m, pair.p, pair.q)?;
                return Ok(serde_json::to_value(pair)?);
            }
            Ok(serde_json::to_value(pair)?)
        }
        Kind::CompletionInput => {
            let input: CompletionInput = from_value(value.clone(), path)?;
            input.module.check_vector(&input.p)?;
            if let Some(y) = &input.y {
                input.module.check_vector(y)?;
            }
            Ok(value)
        }
        Kind::TransportInput => {
            let input: TransportInput = from_value(value.clone(), path)?;
            let n = input.v.rank() + 2 * input.p_rank;
            for x in [Some(&input.source), input.target.as_ref()].into_iter().flatten() {
                for c in [&x.p, &x.q] {
                    if c.dim() != n {
                        bail!(qform_core::Error::DimensionMismatch { expected: n, found: c.dim() });
                    }
                }
            }
            Ok(value)
        }
        Kind::TransportReport => round::<TransportReport>(value, path),
        Kind::TransitivityReport => round::<TransitivityReport>(value, path),
        Kind::IsometryReport => round::<IsometryReport>(value, path),
        Kind::VirtuallyAbelian => round::<VirtuallyAbelianInput>(value, path),
        Kind::Bound => round::<StabilityBound>(value, path),
        Kind::Generators => round::<GeneratorsCertificate>(value, path),
        Kind::FgInput => {
            from_value::<FgInput>(value.clone(), path)?.group.input()?;
            Ok(value)
        }
        Kind::FgReport => round::<FgReport>(value, path),
        Kind::Validation => {
            let inner: Kind = from_value(value["kind"].clone(), path)?;
            let value = canonical(inner, value["value"].clone(), path, module)?;
            Ok(json!({ "kind": inner, "valid": true, "value": value }))
        }
    }
}

fn validate(args: &ValidateArgs) -> anyhow::Result<Outcome> {
    let value = read_value(&args.input)?;
    let kind = match args.kind {
        Some(k) => k,
        None => detect(&value)?,
    };
    let module = args.module.as_deref().map(read::<QuadraticModule>).transpose()?;
    let value = canonical(kind, value, &args.input, module.as_ref())?;
    let name = serde_json::to_value(kind)?;
    let summary = format!("valid {}", name.as_str().unwrap_or("artifact"));
    Outcome::ok(json!({ "kind": kind, "valid": true, "value": value }), summary)
}

fn hyperbolic(context: &Path, k: usize) -> anyhow::Result<Outcome> {
    let ring: UnitaryRing = read(context)?;
    let m = QuadraticModule::hyperbolic(&ring, k)?;
    Outcome::ok(m, format!("hyperbolic module of rank {}", 2 * k))
}

fn apply(module: &Path, transvection: &Path, input: &Path) -> anyhow::Result<Outcome> {
    let m: QuadraticModule = read(module)?;
    let t: Transvection = read(transvection)?;
    let x: ModuleVector = read(input)?;
    t.validate(&m)?;
    let y = t.apply(&m, &x)?;
    Outcome::ok(y, "applied transvection")
}

fn verify_isometry(module: &Path, transvection: &Path, samples: usize, seed: u64) -> anyhow::Result<Outcome> {
    let m: QuadraticModule = read(module)?;
    let t: Transvection = read(transvection)?;
    let failed = t.failed_condition(&m)?;
    let mut sampler = Sampler::new(seed);
    let vectors: Vec<ModuleVector> = (0..samples).map(|_| sampler.vector(m.ring(), m.rank())).collect();
    let report = verify_isometry_with(&m, |x| t.apply(&m, x), &vectors)?;
    let passed = report.passed && failed.is_none();
    let summary = match (&failed, &report.counterexample) {
        (Some(c), _) => format!("invalid transvection: requires {c}"),
        (None, Some(e)) => format!("not an isometry: {e}"),
        (None, None) => format!(
            "isometry verified on {} vectors and {} pairs",
            report.vectors_checked, report.pairs_checked
        ),
    };
    let json = json!({
        "passed": passed,
        "pairs_checked": report.pairs_checked,
        "vectors_checked": report.vectors_checked,
        "counterexample": report.counterexample.clone().or(failed.map(|c| format!("requires {c}"))),
    });
    Outcome::with_code(json, summary, if passed { 0 } else { EXIT_FAILED })
}

fn factorize_cmd(input: &Path) -> anyhow::Result<Outcome> {
    let input = read_factorization_input(input)?;
    let cert = factorize(&input)?;
    let check = verify_certificate(&input, &cert);
    if !check.passed {
        let msg = check.first_discrepancy.unwrap_or_default();
        return Outcome::with_code(cert, format!("certificate failed self-check: {msg}"), EXIT_FAILED);
    }
    let summary = format!(
        "{} elementary factors ({} for v, {:?} for p), verified",
        cert.factors.len(),
        cert.v_split,
        cert.p_split
    );
    Outcome::ok(cert, summary)
}

fn verify_cert(input: &Path, cert: &Path) -> anyhow::Result<Outcome> {
    let input = read_factorization_input(input)?;
    let cert: FactorizationCertificate = read(cert)?;
    let report = verify_certificate(&input, &cert);
    let (summary, code) = match &report.first_discrepancy {
        None => (format!("certificate verified ({} factors)", report.factors_checked), 0),
        Some(d) => (format!("certificate rejected: {d}"), EXIT_FAILED),
    };
    Outcome::with_code(report, summary, code)
}

fn complete(input: &Path) -> anyhow::Result<Outcome> {
    let input: CompletionInput = read(input)?;
    let m = &input.module;
    let y = match input.y {
        Some(y) => y,
        None => match m.is_unimodular(&input.p, None, &SearchBounds::default())? {
            Unimodularity::Unimodular(y) => y,
            _ => {
                return Outcome::with_code(
                    json!({ "status": "exhausted", "reason": "no dual vector found within the search bounds" }),
                    "no y with <p, y> = 1 found",
                    EXIT_EXHAUSTED,
                );
            }
        },
    };
    let pair = complete_pair(m, &input.p, &y)?;
    if m.inner(&pair.p, &pair.q)? != m.ring().one() || !m.is_isotropic(&pair.q)? {
        return Outcome::with_code(pair, "completed pair failed its check", EXIT_FAILED);
    }
    Outcome::ok(pair, "completed to a hyperbolic pair")
}

struct TransportArgs<'a> {
    input: &'a Path,
    modulus: u32,
    limits: SearchLimits,
    families: &'a [String],
    orbit: bool,
}

fn transport_cmd(args: TransportArgs) -> anyhow::Result<Outcome> {
    let input: TransportInput = read(args.input)?;
    let space = StabilizedSpace::new(&input.v, input.p_rank, CoefficientDomain::Modular(args.modulus))?;
    let families = if args.families.is_empty() {
        Family::ALL.to_vec()
    } else {
        args.families.iter().map(|f| Family::parse(f)).collect::<Result<_, _>>()?
    };
    let gens = space.enumerate_generators(&families, args.limits.node_budget)?;
    let source = HyperbolicPair { p: input.source.p, q: input.source.q };
    let target = match input.target {
        Some(t) => HyperbolicPair { p: t.p, q: t.q },
        None => space.standard_pair(),
    };
    let report = transport(&space, &gens.generators, &source, &target, args.limits)?;
    let mut code = 0;
    let mut summary = match &report.outcome {
        TransportOutcome::Found { word } => {
            let reached = space.apply_word(word, &source)?;
            if reached != space.apply_word(&Default::default(), &target)? {
                code = EXIT_FAILED;
                "the word found does not reach the target".to_string()
            } else {
                format!("target reached with {} generators", word.steps.len())
            }
        }
        TransportOutcome::Exhausted { depth } => {
            code = EXIT_EXHAUSTED;
            format!("no word of length at most {depth}")
        }
        TransportOutcome::BudgetExceeded { nodes } => {
            code = EXIT_EXHAUSTED;
            format!("node budget exhausted after {nodes} states")
        }
    };
    let mut json = serde_json::to_value(&report)?;
    if args.orbit {
        let orbit = qform_core::pairs::check_transitivity(&space, &gens.generators, args.limits, args.limits.node_budget)?;
        summary.push_str(&format!(
            "; orbit of the standard pair: {} of {} pairs",
            orbit.reachable, orbit.total_pairs
        ));
        json["orbit"] = serde_json::to_value(&orbit)?;
    }
    report.warnings.iter().for_each(|w| eprintln!("warning: {w}"));
    Outcome::with_code(json, summary, code)
}

fn bound(path: &Path) -> anyhow::Result<Outcome> {
    let value = read_value(path)?;
    let b = match from_value::<BoundsGroup>(value, path)? {
        BoundsGroup::Explicit(va) => va.stability_bound(),
        BoundsGroup::Group { group } | BoundsGroup::Bare(group) => stability_bound(&group),
    };
    Outcome::ok(b, format!("stable after {} hyperbolic summands (d = {})", b.summands, b.d))
}

fn invariants(path: &Path, degree: u64, norms: bool) -> anyhow::Result<Outcome> {
    let input = read::<BoundsGroup>(path)?.input()?;
    let r = invariant_generators(&input, degree)?;
    let cert = if norms { norm_generators(&input, &r, degree)? } else { r };
    let summary = format!(
        "{} generators up to degree {}",
        cert.generators.len(),
        cert.degree_bound
    );
    let code = if cert.all_invariant { 0 } else { EXIT_FAILED };
    Outcome::with_code(cert, summary, code)
}

fn verify_fg(path: &Path, degree: u64) -> anyhow::Result<Outcome> {
    let input: FgInput = read(path)?;
    let va = input.group.input()?;
    let gens = match input.ring_generators {
        Some(g) => g,
        None => invariant_generators(&va, degree)?.generators,
    };
    let report = verify_fg_module(va.ring(), &gens, &input.candidates, degree)?;
    let failing: usize = report.per_degree.iter().map(|d| d.failures.len()).sum();
    let (summary, code) = if report.passed {
        (format!("all monomials up to degree {degree} are covered"), 0)
    } else {
        (format!("{failing} monomials up to degree {degree} are not covered"), EXIT_FAILED)
    };
    Outcome::with_code(report, summary, code)
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Validate(args) => validate(args),
        Command::Hyperbolic { context, k } => hyperbolic(context, *k),
        Command::Apply { module, transvection, input } => apply(module, transvection, input),
        Command::VerifyIsometry { module, transvection, samples } => {
            verify_isometry(module, transvection, *samples, cli.seed)
        }
        Command::Factorize { input } => factorize_cmd(input),
        Command::VerifyCert { input, cert } => verify_cert(input, cert),
        Command::CompletePair { input } => complete(input),
        Command::Transport { input, modulus, max_depth, node_budget, families, orbit } => transport_cmd(TransportArgs {
            input,
            modulus: *modulus,
            limits: SearchLimits { max_depth: *max_depth, node_budget: *node_budget },
            families,
            orbit: *orbit,
        }),
        Command::Bound { group } => bound(group),
        Command::Invariants { input, degree } => invariants(input, *degree, false),
        Command::Norms { input, degree } => invariants(input, *degree, true),
        Command::VerifyFg { input, degree } => verify_fg(input, *degree),
    }
}

/// Exit code and error name for a failed command.
fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    use qform_core::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::PreconditionViolation(_) => (EXIT_PRECONDITION, "precondition_violation"),
                E::Unsupported(_) => (EXIT_PRECONDITION, "unsupported"),
                E::BudgetExceeded { .. } => (EXIT_EXHAUSTED, "budget_exceeded"),
                E::InternalCheckFailed(_) => (EXIT_FAILED, "internal_check_failed"),
                E::InvalidGroup(_) => (EXIT_MALFORMED, "invalid_group"),
                E::InvalidElement { .. } => (EXIT_MALFORMED, "invalid_element"),
                E::InvalidModule(_) => (EXIT_MALFORMED, "invalid_module"),
                E::ContextMismatch => (EXIT_MALFORMED, "context_mismatch"),
                E::DimensionMismatch { .. } => (EXIT_MALFORMED, "dimension_mismatch"),
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return (EXIT_MALFORMED, "malformed_json");
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return (EXIT_MALFORMED, "io");
        }
    }
    (EXIT_MALFORMED, "error")
}

fn emit(cli: &Cli, report: &Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    println!("{text}");
    if let Some(path) = &cli.out {
        fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, summary, code) = match run(&cli) {
        Ok(o) => (o.report, o.summary, o.code),
        Err(e) => {
            let (code, name) = classify(&e);
            let message = format!("{e:#}");
            (json!({ "error": name, "message": message }), format!("error: {message}"), code)
        }
    };
    eprintln!("{summary}");
    if let Err(e) = emit(&cli, &report) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_MALFORMED);
    }
    ExitCode::from(code)
}
