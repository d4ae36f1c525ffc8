//! Command-line front end: loads Frobenius datasets, runs the library's
//! checks, and emits deterministic JSON (or, for tabular commands, TSV)
//! reports.
//!
//! Exit codes: 0 when every check passes (or the command is pure
//! computation), 1 when any check fails its verdict, 2 on usage or data
//! errors.  Diagnostics go to standard error; the report body goes to
//! standard output or `--out`.  Identical inputs and flags produce
//! byte-identical bodies; `--stamp` prepends a timestamp line outside the
//! comparable body.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use isoslope::analysis::{
    companion_check, generic_polygon, jumping_locus, koshikawa_probe, semicontinuity_check,
    slope_gap_report, GenericPolygon,
};
use isoslope::frobdata::{self, FrobeniusDataset, GeometryMeta};
use isoslope::ingest::{build_legendre_dataset, build_trivial_dataset};
use isoslope::lfunction::{
    euler_product, gos_check, pole_order_at_qd, rational_reconstruct,
    slope_product_consistency,
};
use isoslope::newton::{newton_polygon, NewtonPolygon};
use isoslope::padic::{lift, slope_factorization, unit_root};
use isoslope::poly::Poly;
use isoslope::report::{
    companion_value, dataset_digest, gos_value, koshikawa_value, generic_polygon_value,
    plainness_value, polygon_value, purity_value, rational_function_value, semicontinuity_value,
    series_value, slope_bound_value, slope_consistency_value, slope_gap_value, strata_value,
    weight_table_value, Check, Report, ReportHeader, Verdict,
};
use isoslope::weights::{check_p_plain, check_purity, check_slope_bound, weight_multiset};
use isoslope::{Error, Place, Rational};

#[derive(Parser)]
#[command(
    name = "isoslope",
    version,
    about = "Newton polygons, weights, L-functions, and strata of Frobenius datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a dataset by exhaustive point counting and emit canonical JSON.
    Ingest(IngestArgs),
    /// Per-point Newton polygons at a finite place.
    Newton(NewtonArgs),
    /// Certified archimedean root moduli: purity and optional plainness.
    Weights(WeightsArgs),
    /// Euler product, rational reconstruction, Euler characteristic.
    Lfunc(LfuncArgs),
    /// Generic polygon, jumping locus, semicontinuity, and slope gaps.
    Strata(StrataArgs),
    /// p-adic slope factorizations, unit roots, and slope L-consistency.
    Slopes(SlopesArgs),
    /// Decide whether two datasets carry identical (or conjugate) data.
    Companion(CompanionArgs),
    /// Combined battery of checks at one place.
    Report(ReportArgs),
}

/// Options every report-emitting command shares; defaults are echoed into
/// the report header.
#[derive(Args)]
struct CommonOpts {
    /// Truncation order for series computations.
    #[arg(long, default_value_t = 12)]
    trunc: usize,
    /// p-adic working precision, as a power of the place's prime.
    #[arg(long, default_value_t = 10)]
    precision: u32,
    /// Tolerance for certified floating-point comparisons.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Write the report body to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Prepend a timestamp line outside the comparable report body.
    #[arg(long)]
    stamp: bool,
}

/// A finite place of the coefficient field, as prime plus factor index.
#[derive(Args)]
struct PlaceOpts {
    /// Residue characteristic of the place.
    #[arg(long)]
    prime: u64,
    /// Which place above the prime (split quadratic primes have two).
    #[arg(long, default_value_t = 0)]
    factor_index: usize,
}

impl PlaceOpts {
    fn place(&self) -> Place {
        Place::new(self.prime, self.factor_index)
    }

    fn label(&self) -> String {
        self.place().to_string()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// The Legendre pencil of elliptic curves over the lambda-line.
    Legendre,
    /// The trivial rank-one system on the projective line minus 0, 1, inf.
    Trivial,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Args)]
struct IngestArgs {
    /// Which family of datasets to build.
    #[arg(long, value_enum)]
    family: Family,
    /// Characteristic of the base field (an odd prime for legendre).
    #[arg(long)]
    p: u64,
    /// Count closed points of degree up to this bound.
    #[arg(long)]
    max_degree: u32,
    /// Write the dataset here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NewtonArgs {
    /// Dataset file produced by ingest.
    file: PathBuf,
    #[command(flatten)]
    place: PlaceOpts,
    /// Report body format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct WeightsArgs {
    /// Dataset file produced by ingest.
    file: PathBuf,
    /// Target weight: root moduli should all be q(x)^(weight/2).
    #[arg(long)]
    weight: f64,
    /// Also check the eigenvalues are ell-adic units at these primes.
    #[arg(long = "ell")]
    ell: Vec<u64>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct LfuncArgs {
    /// Dataset file produced by ingest.
    file: PathBuf,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct StrataArgs {
    /// Dataset file produced by ingest.
    file: PathBuf,
    #[command(flatten)]
    place: PlaceOpts,
    /// Report body format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct SlopesArgs {
    /// Dataset file produced by ingest.
    file: PathBuf,
    #[command(flatten)]
    place: PlaceOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct CompanionArgs {
    /// First dataset file.
    left: PathBuf,
    /// Second dataset file.
    right: PathBuf,
    /// Compare against the Galois conjugate of the second dataset.
    #[arg(long)]
    conjugate: bool,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct ReportArgs {
    /// Dataset file produced by ingest.
    file: PathBuf,
    #[command(flatten)]
    place: PlaceOpts,
    #[command(flatten)]
    common: CommonOpts,
}

fn main() -> ExitCode {
    if let Ok(raw) = std::env::var("ISOSLOPE_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                // Ignore failure: the pool can only be configured once.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring ISOSLOPE_THREADS={raw:?} (expected a positive integer)"),
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> isoslope::Result<bool> {
    match command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Newton(a) => cmd_newton(a),
        Command::Weights(a) => cmd_weights(a),
        Command::Lfunc(a) => cmd_lfunc(a),
        Command::Strata(a) => cmd_strata(a),
        Command::Slopes(a) => cmd_slopes(a),
        Command::Companion(a) => cmd_companion(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Writes the body to `--out` or standard output, optionally preceded by a
/// stamp line that comparisons must skip.
fn emit(body: &str, out: Option<&Path>, stamp: bool) -> isoslope::Result<()> {
    let text = if stamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("stamp unix={secs}\n{body}")
    } else {
        body.to_string()
    };
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn header(
    command: &str,
    digest: Option<String>,
    place: Option<String>,
    trunc: usize,
    common: &CommonOpts,
) -> ReportHeader {
    ReportHeader {
        command: command.to_string(),
        dataset_digest: digest,
        place,
        truncation: trunc,
        precision: common.precision,
        tolerance: common.tolerance,
    }
}

fn emit_report(report: &Report, common: &CommonOpts) -> isoslope::Result<bool> {
    emit(&report.render_json(), common.out.as_deref(), common.stamp)?;
    Ok(report.pass())
}

/// Series work on a dataset complete only through degree `c` is capped at
/// `c`: beyond it the Euler product is missing factors and every downstream
/// comparison would be against garbage.
fn effective_trunc(d: &FrobeniusDataset, requested: usize) -> usize {
    match d.meta().complete_through_degree {
        Some(c) => requested.min(c as usize),
        None => requested,
    }
}

fn load(path: &Path) -> isoslope::Result<FrobeniusDataset> {
    frobdata::load(path)
}

fn cmd_ingest(a: IngestArgs) -> isoslope::Result<bool> {
    let dataset = match a.family {
        Family::Legendre => build_legendre_dataset(a.p, a.max_degree)?,
        Family::Trivial => {
            build_trivial_dataset(a.p, a.max_degree, &GeometryMeta::new(a.p, 0, 3, 1))?
        }
    };
    let body = frobdata::to_json_string(&dataset)?;
    eprintln!(
        "ingest: {} points through degree {}, digest {}",
        dataset.len(),
        a.max_degree,
        dataset_digest(&dataset)?
    );
    emit(&format!("{body}\n"), a.out.as_deref(), false)?;
    Ok(true)
}

/// Comment header shared by the TSV emitters; everything after it is data
/// rows, and the whole body is part of the deterministic output.
fn tsv_preamble(command: &str, digest: &str, place: &str, common: &CommonOpts, trunc: usize) -> String {
    format!(
        "# command={command} place={place} digest={digest}\n\
         # trunc={trunc} precision={} tolerance={:e}\n",
        common.precision, common.tolerance
    )
}

fn slopes_field(p: &NewtonPolygon) -> String {
    let slopes: Vec<String> = p.slope_multiset().iter().map(|s| s.to_string()).collect();
    slopes.join(",")
}

fn vertices_field(p: &NewtonPolygon) -> String {
    let vs: Vec<String> = p
        .vertices()
        .iter()
        .map(|(x, y)| format!("{x}:{y}"))
        .collect();
    vs.join(",")
}

fn cmd_newton(a: NewtonArgs) -> isoslope::Result<bool> {
    let d = load(&a.file)?;
    let place = a.place.place();
    let digest = dataset_digest(&d)?;
    let mut rows = Vec::new();
    for pt in d.points() {
        let polygon = newton_polygon(pt.poly(), &d.meta().field, &place, pt.degree())?;
        rows.push((pt.id().to_string(), pt.degree(), polygon));
    }
    match a.format {
        Format::Json => {
            let data = Value::Array(
                rows.iter()
                    .map(|(id, degree, polygon)| {
                        json!({
                            "id": id,
                            "degree": degree,
                            "polygon": polygon_value(polygon),
                        })
                    })
                    .collect(),
            );
            let report = Report {
                header: header("newton", Some(digest), Some(a.place.label()), a.common.trunc, &a.common),
                checks: vec![Check::new("newton-polygons", Verdict::Info, data)],
            };
            emit_report(&report, &a.common)
        }
        Format::Tsv => {
            let mut body = tsv_preamble("newton", &digest, &a.place.label(), &a.common, a.common.trunc);
            body.push_str("id\tdegree\tslopes\tvertices\n");
            for (id, degree, polygon) in &rows {
                body.push_str(&format!(
                    "{id}\t{degree}\t{}\t{}\n",
                    slopes_field(polygon),
                    vertices_field(polygon)
                ));
            }
            emit(&body, a.common.out.as_deref(), a.common.stamp)?;
            Ok(true)
        }
    }
}

fn cmd_weights(a: WeightsArgs) -> isoslope::Result<bool> {
    let d = load(&a.file)?;
    let digest = dataset_digest(&d)?;
    let purity = check_purity(&d, a.weight, a.common.tolerance)?;
    let mut checks = vec![
        Check::new("purity", Verdict::from_pass(purity.pure), purity_value(&purity)),
        Check::new("weight-table", Verdict::Info, weight_table_value(&purity)),
    ];
    if !a.ell.is_empty() {
        let plain = check_p_plain(&d, &a.ell)?;
        checks.push(Check::new(
            "plainness",
            Verdict::from_pass(plain.pass),
            plainness_value(&plain),
        ));
    }
    let report = Report {
        header: header("weights", Some(digest), None, a.common.trunc, &a.common),
        checks,
    };
    emit_report(&report, &a.common)
}

fn cmd_lfunc(a: LfuncArgs) -> isoslope::Result<bool> {
    let d = load(&a.file)?;
    let digest = dataset_digest(&d)?;
    let trunc = effective_trunc(&d, a.common.trunc);
    let series = euler_product(&d, trunc)?;
    let mut checks = vec![Check::new(
        "euler-product",
        Verdict::Info,
        json!({ "order": trunc, "coefficients": series_value(&series) }),
    )];
    let reconstructed = rational_reconstruct(&series, trunc / 2)?;
    match &reconstructed {
        Some(f) => {
            let meta = d.meta();
            let pole = pole_order_at_qd(f, meta.q, meta.dim)?;
            checks.push(Check::new(
                "rational-reconstruction",
                Verdict::Pass,
                json!({
                    "function": rational_function_value(f),
                    "pole_order_at_inverse_qd": pole,
                }),
            ));
            let gos = gos_check(&d, trunc)?;
            checks.push(Check::new(
                "euler-characteristic",
                Verdict::from_pass(gos.pass),
                gos_value(&gos),
            ));
        }
        None => {
            checks.push(Check::new(
                "rational-reconstruction",
                Verdict::Fail,
                json!({ "detail": format!("no rational function of degree <= {} matches through T^{}", trunc / 2, trunc) }),
            ));
            checks.push(Check::new(
                "euler-characteristic",
                Verdict::Info,
                json!({ "detail": "skipped: no rational reconstruction at this truncation" }),
            ));
        }
    }
    let report = Report {
        header: header("lfunc", Some(digest), None, trunc, &a.common),
        checks,
    };
    emit_report(&report, &a.common)
}

fn cmd_strata(a: StrataArgs) -> isoslope::Result<bool> {
    let d = load(&a.file)?;
    let place = a.place.place();
    let digest = dataset_digest(&d)?;
    let strata = jumping_locus(&d, &place)?;
    let semi = semicontinuity_check(&d, &place)?;
    let gaps = slope_gap_report(&d, &place)?;
    let pass = strata.pass() && semi.pass && gaps.pass();
    match a.format {
        Format::Json => {
            let report = Report {
                header: header("strata", Some(digest), Some(a.place.label()), a.common.trunc, &a.common),
                checks: vec![
                    Check::new("jumping-locus", Verdict::from_pass(strata.pass()), strata_value(&strata)),
                    Check::new("semicontinuity", Verdict::from_pass(semi.pass), semicontinuity_value(&semi)),
                    Check::new("slope-gap", Verdict::from_pass(gaps.pass()), slope_gap_value(&gaps)),
                ],
            };
            emit_report(&report, &a.common)
        }
        Format::Tsv => {
            let mut body = tsv_preamble("strata", &digest, &a.place.label(), &a.common, a.common.trunc);
            body.push_str(&format!(
                "# generic_slopes={} jumping_degree={} linear_bound={} exterior_bound={} pass={}\n",
                slopes_field(&strata.generic),
                strata.jumping_degree,
                strata.linear_bound,
                strata.exterior_bound,
                pass
            ));
            body.push_str("id\tdegree\tslopes\tvertices\tgeneric\n");
            for pt in d.points() {
                let polygon = newton_polygon(pt.poly(), &d.meta().field, &place, pt.degree())?;
                let generic = polygon == strata.generic;
                body.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    pt.id(),
                    pt.degree(),
                    slopes_field(&polygon),
                    vertices_field(&polygon),
                    u8::from(generic)
                ));
            }
            emit(&body, a.common.out.as_deref(), a.common.stamp)?;
            Ok(pass)
        }
    }
}

fn cmd_slopes(a: SlopesArgs) -> isoslope::Result<bool> {
    let d = load(&a.file)?;
    let place = a.place.place();
    let digest = dataset_digest(&d)?;
    let trunc = effective_trunc(&d, a.common.trunc);
    let bound = check_slope_bound(&d, &place)?;
    let factor_rows = factorization_rows(&d, trunc, a.common.precision)?;
    let consistency = slope_product_consistency(&d, trunc, a.common.precision)?;
    let report = Report {
        header: header("slopes", Some(digest), Some(a.place.label()), trunc, &a.common),
        checks: vec![
            Check::new("slope-bound", Verdict::from_pass(bound.pass), slope_bound_value(&bound)),
            Check::new("slope-factorization", Verdict::Info, factor_rows),
            Check::new(
                "slope-consistency",
                Verdict::from_pass(consistency.pass),
                slope_consistency_value(&consistency),
            ),
        ],
    };
    emit_report(&report, &a.common)
}

/// Lifts each point (through the truncation degree) to the p-adics, factors
/// by slope, and tabulates the slopes with the unit root's residue when the
/// point has one.
fn factorization_rows(
    d: &FrobeniusDataset,
    trunc: usize,
    precision: u32,
) -> isoslope::Result<Value> {
    let meta = d.meta();
    let p = smallest_prime_factor(meta.q);
    let a = prime_power_exponent(meta.q, p)?;
    let mut rows = Vec::new();
    for pt in d.points() {
        if pt.degree() as usize > trunc {
            continue;
        }
        let rational: isoslope::Result<Vec<Rational>> = pt
            .poly()
            .coeffs()
            .iter()
            .map(|c| {
                c.as_rational().cloned().ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "point {}: slope factorization needs rational coefficients",
                        pt.id()
                    ))
                })
            })
            .collect();
        let lifted = lift(&Poly::from_coeffs(rational?), p, precision)?;
        let scale = Rational::from(num_bigint::BigInt::from(i64::from(a) * i64::from(pt.degree())));
        let factors = slope_factorization(&lifted)?;
        let slopes: Vec<String> = factors
            .iter()
            .map(|(s, _)| (s / &scale).to_string())
            .collect();
        let unit = match unit_root(&lifted) {
            Ok(u) => Some(u.residue(precision)?.to_string()),
            Err(Error::NotUnitRootRankOne(_)) => None,
            Err(e) => return Err(e),
        };
        rows.push(json!({
            "id": pt.id(),
            "degree": pt.degree(),
            "slopes": slopes,
            "unit_root_residue": unit,
        }));
    }
    Ok(Value::Array(rows))
}

fn smallest_prime_factor(q: u64) -> u64 {
    let mut f = 2;
    while f * f <= q {
        if q % f == 0 {
            return f;
        }
        f += 1;
    }
    q
}

fn prime_power_exponent(q: u64, p: u64) -> isoslope::Result<u32> {
    let mut m = q;
    let mut a = 0;
    while m > 1 && m % p == 0 {
        m /= p;
        a += 1;
    }
    if m != 1 || a == 0 {
        return Err(Error::InvalidArgument(format!(
            "base field size {q} is not a prime power"
        )));
    }
    Ok(a)
}

fn cmd_companion(a: CompanionArgs) -> isoslope::Result<bool> {
    let left = load(&a.left)?;
    let right = load(&a.right)?;
    let result = companion_check(&left, &right, a.conjugate)?;
    if let Some(m) = &result.mismatch {
        eprintln!("companion: first mismatch at point {}", m.id);
    }
    let digest = format!("{},{}", dataset_digest(&left)?, dataset_digest(&right)?);
    let report = Report {
        header: header("companion", Some(digest), None, a.common.trunc, &a.common),
        checks: vec![Check::new(
            "companion",
            Verdict::from_pass(result.pass),
            companion_value(&result),
        )],
    };
    emit_report(&report, &a.common)
}

/// The battery: everything that can run from a dataset and a place with the
/// default configuration.  The roots-of-unity probe is reported as
/// information — failing its hypotheses is a classification, not a defect.
fn cmd_report(a: ReportArgs) -> isoslope::Result<bool> {
    let d = load(&a.file)?;
    let place = a.place.place();
    let digest = dataset_digest(&d)?;
    let trunc = effective_trunc(&d, a.common.trunc);
    let meta = d.meta();
    let mut checks = vec![Check::new(
        "dataset",
        Verdict::Info,
        json!({
            "points": d.len(),
            "rank": meta.rank,
            "q": meta.q,
            "field": if meta.field.is_rationals() {
                "rationals".to_string()
            } else {
                meta.field.min_poly().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
            },
            "complete_through_degree": meta.complete_through_degree,
        }),
    )];

    let generic = generic_polygon(&d, &place)?;
    checks.push(Check::new(
        "generic-polygon",
        Verdict::Info,
        generic_polygon_value(&generic),
    ));
    if matches!(generic, GenericPolygon::Determinate(_)) {
        let strata = jumping_locus(&d, &place)?;
        checks.push(Check::new(
            "jumping-locus",
            Verdict::from_pass(strata.pass()),
            strata_value(&strata),
        ));
        let semi = semicontinuity_check(&d, &place)?;
        checks.push(Check::new(
            "semicontinuity",
            Verdict::from_pass(semi.pass),
            semicontinuity_value(&semi),
        ));
        let gaps = slope_gap_report(&d, &place)?;
        checks.push(Check::new(
            "slope-gap",
            Verdict::from_pass(gaps.pass()),
            slope_gap_value(&gaps),
        ));
    }

    let weight = infer_weight(&d, a.common.tolerance)?;
    let purity = check_purity(&d, weight, a.common.tolerance)?;
    checks.push(Check::new(
        "purity",
        Verdict::from_pass(purity.pure),
        purity_value(&purity),
    ));

    match gos_check(&d, trunc) {
        Ok(gos) => checks.push(Check::new(
            "euler-characteristic",
            Verdict::from_pass(gos.pass),
            gos_value(&gos),
        )),
        Err(Error::CannotDetermine(detail)) => checks.push(Check::new(
            "euler-characteristic",
            Verdict::Info,
            json!({ "detail": format!("skipped: {detail}") }),
        )),
        Err(e) => return Err(e),
    }

    let probe = koshikawa_probe(&d, a.common.tolerance)?;
    checks.push(Check::new(
        "roots-of-unity-probe",
        Verdict::Info,
        koshikawa_value(&probe),
    ));

    let report = Report {
        header: header("report", Some(digest), Some(a.place.label()), trunc, &a.common),
        checks,
    };
    emit_report(&report, &a.common)
}

/// Rounds the mean certified weight of the lowest-degree point to the
/// nearest integer — the natural purity target when none is given.
fn infer_weight(d: &FrobeniusDataset, tol: f64) -> isoslope::Result<f64> {
    let pt = d
        .points()
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty dataset".into()))?;
    let q_x = d
        .meta()
        .q
        .checked_pow(pt.degree())
        .ok_or_else(|| Error::InvalidArgument("residue field too large for weight inference".into()))?;
    let weights = weight_multiset(pt.poly(), q_x, tol)?;
    if weights.is_empty() {
        return Ok(0.0);
    }
    let mean: f64 = weights.iter().map(|w| w.value).sum::<f64>() / weights.len() as f64;
    Ok(mean.round())
}
