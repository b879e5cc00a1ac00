//! Command implementations behind the `torusmix` binary.
//!
//! Every command returns a serializable report; [`run`] turns a parsed
//! command line into pretty JSON text, and [`main_with_args`] adds the exit
//! code contract (0 report, 2 invalid input, 1 internal error).

use std::ffi::OsString;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use torusmix_core::mixing::{circle_root_samples, orbit_root_samples, TorusCriterion};
use torusmix_core::rational::parse_ratio;
use torusmix_core::{
    classify_map, criterion_check, empirical_mixing, torus_shift, ArcProduct, CriterionOptions, CriterionReport,
    EndoMap, ExponentMatrix, FiniteSupportSeq, MapSpec, MixingReport, MixingVerdict, ShrinkBound, TorusPoint,
};

pub const THREADS_ENV: &str = "TORUSMIX_THREADS";

/// Largest `r` accepted by `iterate --exponents`; entries of `A^r` grow like `|A|^r`.
pub const MAX_EXPONENT_POWER: u64 = 4096;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "invalid_input",
            CliError::Internal(_) => "internal",
        }
    }

    pub fn to_json(&self) -> String {
        let body = ErrorBody {
            error: ErrorDetail {
                kind: self.kind().to_string(),
                message: self.to_string(),
            },
        };
        to_json(&body).unwrap_or_else(|_| "{\"error\":{\"kind\":\"internal\"}}\n".into())
    }
}

impl From<torusmix_core::Error> for CliError {
    fn from(e: torusmix_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub kind: String,
    pub message: String,
}

pub type CliResult<T> = std::result::Result<T, CliError>;

const AFTER_HELP: &str = "\
Numbers cross the JSON boundary as strings: angles and tolerances as \"p/q\" \
turns, big integers as decimal strings. Permutations are read in 1-indexed \
cycle notation (\"sigma_cycles\": [[1,3,5,2,4]]); arrays in reports are \
0-indexed. Set TORUSMIX_THREADS to cap the worker pool.";

#[derive(Debug, Parser)]
#[command(name = "torusmix", version, about = "Exact mixing checks for torus endomorphisms", after_help = AFTER_HELP)]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide mixing for a map from its structure.
    Classify(MapArg),
    /// Exact r-th iterate of a point, optionally with the exponent matrix A^r.
    Iterate(IterateArgs),
    /// Search for f^n(U) ∩ V ≠ ∅ on a grid of U for n = 1..=n_max.
    MixVerify(MixVerifyArgs),
    /// Finite-horizon check of the mixing criterion with a witness family.
    Criterion(CriterionArgs),
    /// Run shift-extension operations on a finitely supported sequence.
    ProductSim(ProductSimArgs),
}

#[derive(Debug, Args)]
pub struct MapArg {
    /// JSON map specification file.
    #[arg(long, value_name = "FILE")]
    pub map: PathBuf,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[command(flatten)]
    pub map: MapArg,
    /// Point as a JSON list of "p/q" angles.
    #[arg(long, value_name = "JSON")]
    pub point: Option<String>,
    #[arg(long)]
    pub r: u64,
    /// Include the exponent matrix of f^r.
    #[arg(long)]
    pub exponents: bool,
}

#[derive(Debug, Args)]
pub struct MixVerifyArgs {
    #[command(flatten)]
    pub map: MapArg,
    /// Arc product file for U.
    #[arg(long, value_name = "FILE")]
    pub u: PathBuf,
    /// Arc product file for V.
    #[arg(long, value_name = "FILE")]
    pub v: PathBuf,
    #[arg(long = "n-max")]
    pub n_max: u64,
    /// Grid points per arc, minus one.
    #[arg(long, default_value_t = 64)]
    pub resolution: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    /// Root-of-unity family with sections t ↦ t/n^r (circle power maps).
    Prop1,
    /// Orbit-gcd root family with exact right-inverse sections (perm-power maps).
    Prop2,
    /// Sampled C̃ for the shift extension over the map, sections Ψ^n.
    ProductExtension,
}

#[derive(Debug, Args)]
pub struct CriterionArgs {
    #[command(flatten)]
    pub map: MapArg,
    /// Built-in witness family; inferred from the map when only --samples is given.
    #[arg(long, value_enum)]
    pub witness: Option<Witness>,
    /// Explicit sample points (JSON list) used as both F and H.
    #[arg(long, value_name = "JSON")]
    pub samples: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub horizon: u64,
    #[arg(long, default_value = "1/1000")]
    pub tolerance: String,
    /// Deepest root level (or C̃ support) sampled; defaults to min(8, horizon).
    #[arg(long)]
    pub levels: Option<u32>,
    /// Enumeration order of the C̃ samples.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ProductSimArgs {
    #[command(flatten)]
    pub map: MapArg,
    /// Sequence as a JSON list of points.
    #[arg(long, value_name = "JSON")]
    pub sequence: String,
    /// Comma-separated: phi, psi, phi-psi, psi-phi, iterate-K, shrink-bound-K, c-tilde-N.
    #[arg(long)]
    pub ops: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub map: MapSpec,
    #[serde(flatten)]
    pub verdict: MixingVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterateReport {
    pub map: MapSpec,
    pub r: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<TorusPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<TorusPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent_matrix: Option<ExponentMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixVerifyReport {
    pub map: MapSpec,
    pub report: MixingReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionRunReport {
    pub map: MapSpec,
    pub witness: Witness,
    pub samples: usize,
    pub report: CriterionReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductStep {
    pub op: String,
    pub input: FiniteSupportSeq<TorusPoint>,
    pub output: FiniteSupportSeq<TorusPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shrink_bound: Option<ShrinkBound>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSimReport {
    pub map: MapSpec,
    pub sequence: FiniteSupportSeq<TorusPoint>,
    pub steps: Vec<ProductStep>,
    pub result: FiniteSupportSeq<TorusPoint>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid {what}: {e}")))
}

pub fn load_map(path: &Path) -> CliResult<(MapSpec, EndoMap)> {
    let spec: MapSpec = parse_json("map specification", &read_file(path)?)?;
    let map = spec.build()?;
    Ok((spec, map))
}

fn positive(name: &str, v: u64) -> CliResult<u64> {
    if v == 0 {
        return Err(CliError::Input(format!("{name} must be positive")));
    }
    Ok(v)
}

pub fn parse_tolerance(s: &str) -> CliResult<BigRational> {
    let t = parse_ratio(s)?;
    if !t.is_positive() {
        return Err(CliError::Input(format!("tolerance must be positive, got {s}")));
    }
    Ok(t)
}

pub fn cmd_classify(spec: MapSpec, map: &EndoMap) -> ClassifyReport {
    ClassifyReport {
        map: spec,
        verdict: classify_map(map),
    }
}

pub fn cmd_iterate(
    spec: MapSpec,
    map: &EndoMap,
    point: Option<TorusPoint>,
    r: u64,
    exponents: bool,
) -> CliResult<IterateReport> {
    if point.is_none() && !exponents {
        return Err(CliError::Input("iterate needs --point, --exponents, or both".into()));
    }
    let result = point.as_ref().map(|p| map.iterate(p, r)).transpose()?;
    let exponent_matrix = if exponents {
        if r > MAX_EXPONENT_POWER {
            return Err(CliError::Input(format!(
                "--exponents supports r <= {MAX_EXPONENT_POWER}, got {r}"
            )));
        }
        Some(map.as_matrix().pow(r))
    } else {
        None
    };
    Ok(IterateReport {
        map: spec,
        r,
        point,
        result,
        exponent_matrix,
    })
}

pub fn cmd_mix_verify(
    spec: MapSpec,
    map: &EndoMap,
    u: &ArcProduct,
    v: &ArcProduct,
    n_max: u64,
    resolution: u64,
) -> CliResult<MixVerifyReport> {
    positive("--n-max", n_max)?;
    let report = empirical_mixing(map, u, v, n_max, resolution)?;
    Ok(MixVerifyReport { map: spec, report })
}

/// Which samples feed the criterion.
#[derive(Clone, Debug)]
pub enum SampleSource {
    BuiltIn { levels: u32, seed: u64 },
    Explicit(String),
}

fn infer_witness(map: &EndoMap) -> CliResult<Witness> {
    match map {
        EndoMap::CirclePower { .. } => Ok(Witness::Prop1),
        EndoMap::PermPower { .. } => Ok(Witness::Prop2),
        EndoMap::ExponentMatrix(_) => Err(CliError::Input(
            "no section family is known for a general matrix; pass --witness product-extension".into(),
        )),
    }
}

fn torus_system(map: &EndoMap, witness: Witness) -> CliResult<TorusCriterion> {
    match (witness, map) {
        (Witness::Prop1, EndoMap::CirclePower { n }) => {
            let base = if n.abs() >= 2.into() { n.abs() } else { 2.into() };
            Ok(TorusCriterion::with_circle_roots(map.clone(), base)?)
        }
        (Witness::Prop1, _) => Err(CliError::Input("witness prop1 needs a circle_power map".into())),
        (Witness::Prop2, EndoMap::PermPower { .. }) => Ok(TorusCriterion::with_perm_roots(map.clone())?),
        (Witness::Prop2, _) => Err(CliError::Input("witness prop2 needs a perm_power map".into())),
        (Witness::ProductExtension, _) => unreachable!("handled by the caller"),
    }
}

/// Base sampler for the shift extension: `{0, 1/3, 2/3}^d`, at most 729 points.
fn base_points(dim: usize) -> CliResult<Vec<TorusPoint>> {
    const CAP: usize = 729;
    let mut out = Vec::new();
    let mut digits = vec![0u32; dim];
    while out.len() < CAP {
        out.push(TorusPoint::parse(
            &digits.iter().map(|d| format!("{d}/3")).collect::<Vec<_>>(),
        )?);
        let Some(i) = digits.iter().position(|&d| d < 2) else {
            break;
        };
        digits[..i].iter_mut().for_each(|d| *d = 0);
        digits[i] += 1;
    }
    Ok(out)
}

pub fn cmd_criterion(
    spec: MapSpec,
    map: &EndoMap,
    witness: Option<Witness>,
    source: SampleSource,
    horizon: u64,
    tolerance: BigRational,
) -> CliResult<CriterionRunReport> {
    positive("--horizon", horizon)?;
    let witness = match witness {
        Some(w) => w,
        None => infer_witness(map)?,
    };
    let explicit = matches!(source, SampleSource::Explicit(_));
    let opts = CriterionOptions {
        horizon,
        tolerance,
        exact_witnesses: !explicit,
    };
    let (samples, report) = if witness == Witness::ProductExtension {
        let system = torus_shift(map.clone())?;
        let samples = match source {
            SampleSource::BuiltIn { levels, seed } => {
                system.c_tilde_samples(&base_points(map.dim())?, u64::from(levels), 3, seed)?
            }
            SampleSource::Explicit(text) => parse_json::<Vec<FiniteSupportSeq<TorusPoint>>>("samples", &text)?
                .into_iter()
                .map(|g| system.canonical(g))
                .collect::<Result<_, _>>()?,
        };
        (samples.len(), criterion_check(&system, &samples, &samples, &opts)?)
    } else {
        let system = torus_system(map, witness)?;
        let samples = match source {
            SampleSource::BuiltIn { levels, .. } => match witness {
                Witness::Prop1 => {
                    let base = match map {
                        EndoMap::CirclePower { n } if n.abs() >= 2.into() => n.abs(),
                        _ => 2.into(),
                    };
                    circle_root_samples(&base, levels)?
                }
                _ => orbit_root_samples(map, levels)?,
            },
            SampleSource::Explicit(text) => parse_json::<Vec<TorusPoint>>("samples", &text)?,
        };
        (samples.len(), criterion_check(&system, &samples, &samples, &opts)?)
    };
    Ok(CriterionRunReport {
        map: spec,
        witness,
        samples,
        report,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductOp {
    Phi,
    Psi,
    PhiPsi,
    PsiPhi,
    Iterate(u64),
    ShrinkBound(u64),
    CTilde(u64),
}

impl std::str::FromStr for ProductOp {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let s = s.trim();
        let num = |prefix: &str| -> Option<CliResult<u64>> {
            s.strip_prefix(prefix).map(|k| {
                k.parse()
                    .map_err(|_| CliError::Input(format!("bad count in product op {s:?}")))
            })
        };
        Ok(match s {
            "phi" => ProductOp::Phi,
            "psi" => ProductOp::Psi,
            "phi-psi" => ProductOp::PhiPsi,
            "psi-phi" => ProductOp::PsiPhi,
            _ => {
                if let Some(k) = num("iterate-") {
                    ProductOp::Iterate(k?)
                } else if let Some(k) = num("shrink-bound-") {
                    ProductOp::ShrinkBound(k?)
                } else if let Some(k) = num("c-tilde-") {
                    ProductOp::CTilde(k?)
                } else {
                    return Err(CliError::Input(format!("unknown product op {s:?}")));
                }
            }
        })
    }
}

impl std::fmt::Display for ProductOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProductOp::Phi => f.write_str("phi"),
            ProductOp::Psi => f.write_str("psi"),
            ProductOp::PhiPsi => f.write_str("phi-psi"),
            ProductOp::PsiPhi => f.write_str("psi-phi"),
            ProductOp::Iterate(k) => write!(f, "iterate-{k}"),
            ProductOp::ShrinkBound(k) => write!(f, "shrink-bound-{k}"),
            ProductOp::CTilde(n) => write!(f, "c-tilde-{n}"),
        }
    }
}

pub fn parse_ops(s: &str) -> CliResult<Vec<ProductOp>> {
    let ops = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<CliResult<Vec<_>>>()?;
    if ops.is_empty() {
        return Err(CliError::Input("--ops lists no operations".into()));
    }
    Ok(ops)
}

/// Applies `ops` in order; each transforming op feeds the next, `shrink-bound`
/// reports on its input and passes it through.
pub fn cmd_product_sim(
    spec: MapSpec,
    map: &EndoMap,
    sequence: FiniteSupportSeq<TorusPoint>,
    ops: &[ProductOp],
) -> CliResult<ProductSimReport> {
    let x = torus_shift(map.clone())?;
    let sequence = x.canonical(sequence)?;
    let mut cur = sequence.clone();
    let mut steps = Vec::with_capacity(ops.len());
    for op in ops {
        let mut shrink_bound = None;
        let output = match *op {
            ProductOp::Phi => x.phi(&cur),
            ProductOp::Psi => x.psi(&cur),
            ProductOp::PhiPsi => x.phi(&x.psi(&cur)),
            ProductOp::PsiPhi => x.psi(&x.phi(&cur)),
            ProductOp::Iterate(k) => {
                let closed = x.phi_iterate_closed_form(&cur, k)?;
                if closed != x.phi_pow(&cur, k) {
                    return Err(CliError::Internal(format!(
                        "closed form disagrees with iteration at k = {k}"
                    )));
                }
                closed
            }
            ProductOp::ShrinkBound(k) => {
                shrink_bound = Some(x.shrink_bound_check(&cur, k)?);
                cur.clone()
            }
            ProductOp::CTilde(n) => x.c_tilde_element(&cur, n)?,
        };
        steps.push(ProductStep {
            op: op.to_string(),
            input: cur,
            output: output.clone(),
            shrink_bound,
        });
        cur = output;
    }
    Ok(ProductSimReport {
        map: spec,
        sequence,
        steps,
        result: cur,
    })
}

/// Executes a parsed command line and returns the report text.
pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Classify(a) => {
            let (spec, map) = load_map(&a.map)?;
            to_json(&cmd_classify(spec, &map))
        }
        Command::Iterate(a) => {
            let (spec, map) = load_map(&a.map.map)?;
            let point = a.point.as_deref().map(|p| parse_json("point", p)).transpose()?;
            to_json(&cmd_iterate(spec, &map, point, a.r, a.exponents)?)
        }
        Command::MixVerify(a) => {
            let (spec, map) = load_map(&a.map.map)?;
            let u: ArcProduct = parse_json("arc product U", &read_file(&a.u)?)?;
            let v: ArcProduct = parse_json("arc product V", &read_file(&a.v)?)?;
            to_json(&cmd_mix_verify(spec, &map, &u, &v, a.n_max, a.resolution)?)
        }
        Command::Criterion(a) => {
            let (spec, map) = load_map(&a.map.map)?;
            let tolerance = parse_tolerance(&a.tolerance)?;
            let source = match &a.samples {
                Some(s) => SampleSource::Explicit(s.clone()),
                None => {
                    let levels = a.levels.unwrap_or_else(|| a.horizon.min(8) as u32);
                    if levels == 0 {
                        return Err(CliError::Input("--levels must be positive".into()));
                    }
                    SampleSource::BuiltIn { levels, seed: a.seed }
                }
            };
            to_json(&cmd_criterion(spec, &map, a.witness, source, a.horizon, tolerance)?)
        }
        Command::ProductSim(a) => {
            let (spec, map) = load_map(&a.map.map)?;
            let sequence = parse_json("sequence", &a.sequence)?;
            let ops = parse_ops(&a.ops)?;
            to_json(&cmd_product_sim(spec, &map, sequence, &ops)?)
        }
    }
}

fn thread_count() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Input(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn run_in_pool(cli: &Cli) -> CliResult<String> {
    match thread_count()? {
        None => run(cli),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?
            .install(|| run(cli)),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
/// Errors are reported as a JSON body on stdout.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let err = CliError::Input(e.render().to_string().trim_end().to_string());
            print!("{}", err.to_json());
            return err.exit_code();
        }
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        run_in_pool(&cli).and_then(|text| emit(cli.out.as_deref(), &text))
    }))
    .unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unexpected failure".into());
        Err(CliError::Internal(msg))
    });
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            print!("{}", err.to_json());
            err.exit_code()
        }
    }
}
