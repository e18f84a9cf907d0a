use clap::{Args, Parser, Subcommand, ValueEnum};
use ptcurves_core::factor::Budget;
use ptcurves_core::rational::parse_rational;
use ptcurves_core::{
    canonical_height, certify_positive_rank, construct, enumerate_ppts, naive_height,
    nagell_lutz_torsion, point_order, regulator, reproduce, Curve, Error, FamilyId,
    Int, OrderVerdict, Param, Point, PythTriple, Rational, Result,
};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "ptcurves",
    version,
    about = "Elliptic curves from Pythagorean triples: construction, torsion \
certificates, canonical heights, and rank lower bounds"
)]
struct Cli {
    /// Decimal digits of height precision
    #[arg(long, global = true, default_value_t = 50)]
    precision: u32,

    /// Independence threshold for Gram determinants
    #[arg(long, global = true, default_value = "1e-4")]
    epsilon: String,

    /// Output format (tabular commands honor csv; object outputs are json)
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for sweep
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a family instance from one parameter
    Construct(ConstructArgs),
    /// Certify positive rank for primitive Pythagorean triples
    Certify(CertifyArgs),
    /// Order of one point, or the full torsion subgroup of a curve
    Torsion(TorsionArgs),
    /// Canonical height of a point
    Height(HeightArgs),
    /// Gram determinant and rank lower bound for a point list
    Regulator(RegulatorArgs),
    /// Recompute the reference determinant table
    Reproduce,
    /// Evaluate a family across a parameter range
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ParamFlags {
    /// Rational parameter t (direct construction)
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,

    /// Rational parameter alpha (t = (alpha^2-1)/(4 alpha))
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,

    /// Rational parameter T (t = 4T^3)
    #[arg(long = "T", allow_hyphen_values = true)]
    big_t: Option<String>,

    /// Rational parameter m (t = 1/m - m/2)
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,

    /// Rational parameter u (t = (u^2-2u-1)/(u^2+1))
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,

    /// Pythagorean triple a,b,c
    #[arg(long)]
    triple: Option<String>,
}

impl ParamFlags {
    fn to_param(&self) -> Result<Param> {
        let mut found: Vec<Param> = Vec::new();
        if let Some(s) = &self.t {
            found.push(Param::T(parse_rational(s)?));
        }
        if let Some(s) = &self.alpha {
            found.push(Param::Alpha(parse_rational(s)?));
        }
        if let Some(s) = &self.big_t {
            found.push(Param::BigT(parse_rational(s)?));
        }
        if let Some(s) = &self.m {
            found.push(Param::M(parse_rational(s)?));
        }
        if let Some(s) = &self.u {
            found.push(Param::U(parse_rational(s)?));
        }
        if let Some(s) = &self.triple {
            found.push(Param::Triple(parse_triple(s)?));
        }
        match found.len() {
            1 => Ok(found.pop().unwrap()),
            0 => Err(Error::DegenerateParameter(
                "exactly one of --t/--alpha/--T/--m/--u/--triple is required".into(),
            )),
            _ => Err(Error::DegenerateParameter(
                "parameter flags are mutually exclusive".into(),
            )),
        }
    }
}

#[derive(Args)]
struct ConstructArgs {
    /// Family name (F1_a2c2 .. F7_frey_bc, or F1 .. F7)
    #[arg(long)]
    family: String,

    #[command(flatten)]
    param: ParamFlags,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    family: String,

    /// One primitive triple a,b,c
    #[arg(long)]
    triple: Option<String>,

    /// Certify every primitive triple with hypotenuse at most this bound
    #[arg(long = "all-ppt-up-to")]
    all_ppt_up_to: Option<i64>,
}

#[derive(Args)]
struct CurveFlags {
    /// Coefficient of x^2
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    a2: String,

    /// Coefficient of x
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    a4: String,

    /// Constant coefficient
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    a6: String,
}

impl CurveFlags {
    fn to_curve(&self) -> Result<Curve> {
        Curve::new(
            parse_rational(&self.a2)?,
            parse_rational(&self.a4)?,
            parse_rational(&self.a6)?,
        )
    }
}

#[derive(Args)]
struct TorsionArgs {
    #[command(flatten)]
    curve: CurveFlags,

    /// x-coordinate (with --y: classify this one point)
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,

    /// y-coordinate
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
}

#[derive(Args)]
struct HeightArgs {
    #[command(flatten)]
    curve: CurveFlags,

    #[arg(long, allow_hyphen_values = true)]
    x: String,

    #[arg(long, allow_hyphen_values = true)]
    y: String,
}

#[derive(Args)]
struct RegulatorArgs {
    #[command(flatten)]
    curve: CurveFlags,

    /// Semicolon-separated points: "x1,y1;x2,y2;..."
    #[arg(long, allow_hyphen_values = true)]
    points: String,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    family: String,

    /// Inclusive rational range lo..hi for t
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,

    /// Inclusive rational range lo..hi for alpha
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,

    /// Inclusive rational range lo..hi for T
    #[arg(long = "T", allow_hyphen_values = true)]
    big_t: Option<String>,

    /// Inclusive rational range lo..hi for m
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,

    /// Inclusive rational range lo..hi for u
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,

    /// Sweep all primitive triples with hypotenuse at most this bound
    #[arg(long = "triples-up-to")]
    triples_up_to: Option<i64>,

    /// Range step (rational, > 0)
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    step: String,
}

fn parse_triple(s: &str) -> Result<PythTriple> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::DegenerateParameter(format!(
            "triple must be a,b,c — got {s:?}"
        )));
    }
    let ints: Vec<Int> = parts
        .iter()
        .map(|p| {
            p.parse::<Int>()
                .map_err(|_| Error::ParseRational((*p).to_string()))
        })
        .collect::<Result<_>>()?;
    PythTriple::new(ints[0].clone(), ints[1].clone(), ints[2].clone())
}

fn parse_point(s: &str) -> Result<Point> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("infinity") {
        return Ok(Point::Infinity);
    }
    let (x, y) = s.split_once(',').ok_or_else(|| {
        Error::DegenerateParameter(format!("point must be x,y or infinity — got {s:?}"))
    })?;
    Ok(Point::affine(parse_rational(x)?, parse_rational(y)?))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn order_verdict_json(v: &OrderVerdict) -> Value {
    match v {
        OrderVerdict::Finite(n) => json!({"verdict": "finite", "order": n}),
        OrderVerdict::Infinite(k) => {
            json!({"verdict": "infinite", "certificate": k.as_str()})
        }
    }
}

fn cmd_construct(args: &ConstructArgs) -> Result<ExitCode> {
    let family = FamilyId::parse(&args.family)?;
    let inst = construct(family, args.param.to_param()?)?;
    print_json(&inst.to_json());
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(args: &CertifyArgs) -> Result<ExitCode> {
    let family = FamilyId::parse(&args.family)?;
    let triples = match (&args.triple, args.all_ppt_up_to) {
        (Some(t), None) => vec![parse_triple(t)?],
        (None, Some(c)) => enumerate_ppts(&Int::from(c))?,
        _ => {
            return Err(Error::DegenerateParameter(
                "exactly one of --triple/--all-ppt-up-to is required".into(),
            ))
        }
    };
    let single = triples.len() == 1;
    let mut failures = 0usize;
    for t in &triples {
        match certify_positive_rank(family, t) {
            Ok(cert) => {
                println!(
                    "{}",
                    serde_json::to_string(&cert.to_json()).expect("serializable")
                );
            }
            Err(e) if single => return Err(e),
            Err(e) => {
                eprintln!("certification failed for {t}: {e}");
                failures += 1;
            }
        }
    }
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn cmd_torsion(args: &TorsionArgs, _precision: u32) -> Result<ExitCode> {
    let e = args.curve.to_curve()?;
    match (&args.x, &args.y) {
        (Some(x), Some(y)) => {
            let p = e.point(parse_rational(x)?, parse_rational(y)?)?;
            let v = point_order(&e, &p)?;
            print_json(&order_verdict_json(&v));
        }
        (None, None) => {
            let model = e.integralize()?;
            let pts = nagell_lutz_torsion(&model, &Budget::default())?;
            let mapped: Vec<Point> = pts
                .iter()
                .map(|p| model.unmap_point(p))
                .collect::<Result<_>>()?;
            print_json(&json!({
                "curve": e.to_json(),
                "points": mapped.iter().map(Point::to_json).collect::<Vec<_>>(),
                "order": mapped.len(),
            }));
        }
        _ => {
            return Err(Error::DegenerateParameter(
                "--x and --y must be given together".into(),
            ))
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_height(args: &HeightArgs, precision: u32, format: Format) -> Result<ExitCode> {
    let e = args.curve.to_curve()?;
    let p = e.point(parse_rational(&args.x)?, parse_rational(&args.y)?)?;
    let h = canonical_height(&e, &p, precision)?;
    let sig = precision.max(15) as usize;
    let canonical = h.value.to_sig_string(sig);
    let naive = naive_height(&p, precision)?.to_sig_string(sig);
    match format {
        Format::Json => print_json(&json!({
            "height": canonical,
            "naive": naive,
            "precision": precision,
        })),
        Format::Csv => {
            println!("height,naive,precision");
            println!("{canonical},{naive},{precision}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_regulator(
    args: &RegulatorArgs,
    precision: u32,
    epsilon: &str,
    format: Format,
) -> Result<ExitCode> {
    let e = args.curve.to_curve()?;
    let points: Vec<Point> = args
        .points
        .split(';')
        .map(parse_point)
        .collect::<Result<_>>()?;
    let report = regulator(&e, &points, precision, epsilon)?;
    match format {
        Format::Json => print_json(&report.to_json()),
        Format::Csv => {
            println!("det,precision,epsilon,independent,rank_lower_bound");
            println!(
                "{},{},{},{},{}",
                report.det.to_sig_string(precision.max(15) as usize),
                report.precision,
                report.epsilon_display,
                report.independent(),
                report.rank_lower_bound
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reproduce(precision: u32, format: Format) -> Result<ExitCode> {
    let table = reproduce(precision)?;
    match format {
        Format::Json => print_json(&table.to_json()),
        Format::Csv => print!("{}", table.to_csv()),
    }
    for row in &table.rows {
        if let Some(note) = &row.note {
            eprintln!("note [{} {} {}]: {note}", row.section, row.instance, row.points);
        }
    }
    Ok(if table.all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

/// Default certificate point set per family and parameter kind: the largest
/// catalogued set whose Gram determinant is not forced to vanish by an
/// exact group relation.
fn sweep_point_set(family: FamilyId, param: &Param) -> Vec<&'static str> {
    match param {
        Param::Alpha(_) => vec!["P", "Q", "R"],
        Param::BigT(_) | Param::M(_) => vec!["P2", "P3", "P4"],
        Param::U(_) => vec!["P1", "P2", "P4"],
        Param::T(_) if family == FamilyId::F5B2C2 => vec!["P3", "P4"],
        Param::T(_) => vec!["P1", "P2"],
        Param::Triple(_) if family.is_frey() => vec!["P1"],
        Param::Triple(_) => vec!["P1", "P2"],
    }
}

enum SweepRecord {
    Done {
        label: String,
        det: String,
        verdict: &'static str,
        bound: usize,
        points: String,
    },
    Skipped {
        label: String,
        reason: String,
    },
    Failed {
        label: String,
        reason: String,
    },
}

fn sweep_values(range: &str, step: &Rational) -> Result<Vec<Rational>> {
    let (lo, hi) = range.split_once("..").ok_or_else(|| {
        Error::DegenerateParameter(format!("range must be lo..hi — got {range:?}"))
    })?;
    let lo = parse_rational(lo)?;
    let hi = parse_rational(hi)?;
    if *step <= Rational::from_integer(Int::from(0)) {
        return Err(Error::DegenerateParameter("step must be positive".into()));
    }
    if lo > hi {
        return Err(Error::DegenerateParameter(
            "range lower endpoint exceeds upper endpoint".into(),
        ));
    }
    let span = (&hi - &lo) / step;
    if span > Rational::from_integer(Int::from(100_000)) {
        return Err(Error::DegenerateParameter(
            "range contains more than 100000 steps".into(),
        ));
    }
    let mut vals = Vec::new();
    let mut v = lo;
    while v <= hi {
        vals.push(v.clone());
        v += step;
    }
    Ok(vals)
}

fn cmd_sweep(
    args: &SweepArgs,
    precision: u32,
    epsilon: &str,
    format: Format,
) -> Result<ExitCode> {
    let family = FamilyId::parse(&args.family)?;
    let step = parse_rational(&args.step)?;

    let ranges = [
        (&args.t, Param::T as fn(Rational) -> Param, "t"),
        (&args.alpha, Param::Alpha as fn(Rational) -> Param, "alpha"),
        (&args.big_t, Param::BigT as fn(Rational) -> Param, "T"),
        (&args.m, Param::M as fn(Rational) -> Param, "m"),
        (&args.u, Param::U as fn(Rational) -> Param, "u"),
    ];
    let mut params: Vec<Param> = Vec::new();
    let mut kind = "";
    let mut sources = 0usize;
    for (flag, make, name) in &ranges {
        if let Some(range) = flag {
            params = sweep_values(range, &step)?.into_iter().map(make).collect();
            kind = name;
            sources += 1;
        }
    }
    if let Some(c) = args.triples_up_to {
        params = enumerate_ppts(&Int::from(c))?
            .into_iter()
            .map(Param::Triple)
            .collect();
        kind = "triple";
        sources += 1;
    }
    if sources != 1 {
        return Err(Error::DegenerateParameter(
            "exactly one of --t/--alpha/--T/--m/--u/--triples-up-to is required".into(),
        ));
    }

    let records: Vec<SweepRecord> = params
        .par_iter()
        .map(|param| {
            let label = param.to_string();
            let inst = match construct(family, param.clone()) {
                Ok(i) => i,
                Err(e) if e.is_usage() => {
                    return SweepRecord::Skipped { label, reason: e.to_string() }
                }
                Err(e) => return SweepRecord::Failed { label, reason: e.to_string() },
            };
            let set = sweep_point_set(family, param);
            let pts: Vec<Point> = set
                .iter()
                .filter_map(|n| inst.point(n).cloned())
                .collect();
            if pts.len() != set.len() {
                return SweepRecord::Failed {
                    label,
                    reason: "catalog missing expected points".into(),
                };
            }
            match regulator(&inst.curve, &pts, precision, epsilon) {
                Ok(rep) => SweepRecord::Done {
                    label,
                    det: rep.det.to_sig_string(15),
                    verdict: rep.verdict.as_str(),
                    bound: rep.rank_lower_bound,
                    points: set.join(","),
                },
                Err(e) => SweepRecord::Failed { label, reason: e.to_string() },
            }
        })
        .collect();

    let mut done = 0usize;
    let mut failed = 0usize;
    let mut skipped = 0usize;
    for r in &records {
        match r {
            SweepRecord::Done { .. } => done += 1,
            SweepRecord::Failed { .. } => failed += 1,
            SweepRecord::Skipped { .. } => skipped += 1,
        }
    }
    if done + failed == 0 {
        return Err(Error::DegenerateParameter(format!(
            "empty effective range ({skipped} degenerate parameters skipped)"
        )));
    }

    match format {
        Format::Json => {
            let rows: Vec<Value> = records
                .iter()
                .map(|r| match r {
                    SweepRecord::Done { label, det, verdict, bound, points } => json!({
                        "param": label,
                        "points": points,
                        "det": det,
                        "verdict": verdict,
                        "rank_lower_bound": bound,
                    }),
                    SweepRecord::Skipped { label, reason } => {
                        json!({"param": label, "skipped": reason})
                    }
                    SweepRecord::Failed { label, reason } => {
                        json!({"param": label, "error": reason})
                    }
                })
                .collect();
            print_json(&json!({
                "family": family.name(),
                "kind": kind,
                "count": done,
                "skipped": skipped,
                "failed": failed,
                "records": rows,
            }));
        }
        Format::Csv => {
            println!("param,points,det,verdict,rank_lower_bound");
            for r in &records {
                match r {
                    SweepRecord::Done { label, det, verdict, bound, points } => {
                        println!(
                            "{},\"{points}\",{det},{verdict},{bound}",
                            csv_escape(label)
                        );
                    }
                    SweepRecord::Skipped { label, reason } => {
                        eprintln!("skipped {label}: {reason}");
                    }
                    SweepRecord::Failed { label, reason } => {
                        eprintln!("failed {label}: {reason}");
                    }
                }
            }
        }
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Construct(a) => cmd_construct(a),
        Cmd::Certify(a) => cmd_certify(a),
        Cmd::Torsion(a) => cmd_torsion(a, cli.precision),
        Cmd::Height(a) => cmd_height(a, cli.precision, cli.format),
        Cmd::Regulator(a) => cmd_regulator(a, cli.precision, &cli.epsilon, cli.format),
        Cmd::Reproduce => cmd_reproduce(cli.precision, cli.format),
        Cmd::Sweep(a) => cmd_sweep(a, cli.precision, &cli.epsilon, cli.format),
    }
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes early (e.g. `| head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 3 })
        }
    }
}
