//! Command-line front end.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value as Json};
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::analytic;
use crate::checks;
use crate::error::{Error, Result};
use crate::mechanisms::{MarkupMixture, Mechanism, ReserveSpa};
use crate::oracle;
use crate::paradigms;
use crate::revcurve::{QuadParams, RevenueCurve, TriangleParams};
use crate::solver::{self, CertifyConfig, Region, Tolerances};
use crate::symmetrize::{ScaledAverage, DEFAULT_PANELS};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "scale-robust", version, about = "Scale-robust two-bidder auctions")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected revenue of a markup mixture on a distribution.
    Revenue(RevenueArgs),
    /// Approximation ratio of a mixture, or of the best single markup (`--star`).
    Apx(ApxArgs),
    /// Solve for the equilibrium (q*, r*, alpha*, beta).
    Solve(SolveArgs),
    /// Replay the grid certificates.
    Certify(CertifyArgs),
    /// Monte Carlo revenue estimate.
    Simulate(SimulateArgs),
    /// Robust single-buyer pricing table.
    Paradigms(ParadigmsArgs),
    /// Scale-averaging defects of a base mechanism.
    Symmetrize(SymmetrizeArgs),
    /// Emit plot data as CSV files.
    Plotdata(PlotdataArgs),
    /// Run the quick invariant suite.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct RevenueArgs {
    /// triangle:Q | quad:Q,QP,R | curve:@file.json | pointmass:V
    #[arg(long)]
    pub dist: String,
    /// w:r[,w:r...]
    #[arg(long, default_value = "1:1")]
    pub mixture: String,
    /// Use quadrature even when a closed form exists.
    #[arg(long)]
    pub quadrature: bool,
}

#[derive(Debug, Args)]
pub struct ApxArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long, default_value = "1:1")]
    pub mixture: String,
    /// Ratio of the best single markup on a triangle instead.
    #[arg(long)]
    pub star: bool,
    #[arg(long, default_value_t = analytic::R_CAP)]
    pub r_cap: f64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Tolerance of the post-solve equilibrium checks.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Final bracket width of the bisections (at least 1e-9).
    #[arg(long, default_value_t = 1e-9)]
    pub bracket: f64,
    /// Also run the certificate at epsilon 1e-6.
    #[arg(long)]
    pub certify: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// a | b | c | all
    #[arg(long, default_value = "all")]
    pub region: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long, default_value = "1:1")]
    pub mixture: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ParadigmsArgs {
    /// Upper end of the value range.
    #[arg(long = "H", alias = "h", default_value_t = 100.0)]
    pub h: f64,
}

#[derive(Debug, Args)]
pub struct SymmetrizeArgs {
    /// reserve-spa:RHO | mixture:w:r[,w:r...]
    #[arg(long, default_value = "reserve-spa:1")]
    pub base: String,
    #[arg(long = "L", alias = "l", default_value_t = 10.0)]
    pub l: f64,
    /// v1,v2
    #[arg(long, default_value = "0.5,0.8")]
    pub v: String,
    #[arg(long, default_value_t = 2.0)]
    pub scale: f64,
    #[arg(long, default_value_t = DEFAULT_PANELS)]
    pub panels: usize,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    #[arg(long, default_value = "rev-approx")]
    pub figure: String,
    /// Directory receiving the CSV files.
    #[arg(long, default_value = ".")]
    pub dir: PathBuf,
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

/// A parsed `--dist` argument.
#[derive(Debug, Clone, PartialEq)]
pub enum DistSpec {
    Triangle(TriangleParams),
    Quad(QuadParams),
    Curve(RevenueCurve),
    PointMass(f64),
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{t}`: {e}"))))
        .collect()
}

impl DistSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("distribution `{spec}` has no `kind:` prefix")))?;
        match kind {
            "triangle" => match numbers(rest)?.as_slice() {
                [q] => Ok(DistSpec::Triangle(TriangleParams::new(*q)?)),
                _ => Err(Error::Parse("triangle:Q takes one number".into())),
            },
            "quad" => match numbers(rest)?.as_slice() {
                [q, qp, r] => Ok(DistSpec::Quad(QuadParams::new(*q, *qp, *r)?)),
                _ => Err(Error::Parse("quad:Q,QP,R takes three numbers".into())),
            },
            "pointmass" => match numbers(rest)?.as_slice() {
                [v] if *v > 0.0 => Ok(DistSpec::PointMass(*v)),
                _ => Err(Error::Parse("pointmass:V takes one positive number".into())),
            },
            "curve" => {
                let path = rest
                    .strip_prefix('@')
                    .ok_or_else(|| Error::Parse("curve spec must be curve:@file".into()))?;
                let text = std::fs::read_to_string(path)?;
                let c = if path.ends_with(".csv") {
                    RevenueCurve::from_csv(&text)?
                } else {
                    RevenueCurve::from_json(&text)?
                };
                Ok(DistSpec::Curve(c))
            }
            _ => Err(Error::Parse(format!("unknown distribution kind `{kind}`"))),
        }
    }

    pub fn curve(&self) -> Result<RevenueCurve> {
        match self {
            DistSpec::Triangle(p) => p.curve(),
            DistSpec::Quad(p) => p.curve(),
            DistSpec::Curve(c) => Ok(c.clone()),
            DistSpec::PointMass(v) => RevenueCurve::new(vec![[0.0, 0.0], [1.0, *v]]),
        }
    }

    fn describe(&self) -> Json {
        match self {
            DistSpec::Triangle(p) => json!({"kind": "triangle", "q_bar": p.q_bar()}),
            DistSpec::Quad(p) => {
                json!({"kind": "quad", "q_bar": p.q_bar(), "q_bar_prime": p.q_bar_prime(), "r": p.r()})
            }
            DistSpec::Curve(c) => json!({"kind": "curve", "vertices": c.vertices()}),
            DistSpec::PointMass(v) => json!({"kind": "pointmass", "value": v}),
        }
    }
}

/// Mixture revenue, preferring a closed form. Returns the value and method.
pub fn revenue_of(m: &MarkupMixture, d: &DistSpec, force_quadrature: bool) -> Result<(f64, &'static str)> {
    if !force_quadrature {
        match d {
            DistSpec::Triangle(p) => return Ok((analytic::mixture_revenue_triangle(m, p.q_bar())?, "closed_form")),
            DistSpec::PointMass(v) => {
                let w: f64 = m.atoms().iter().filter(|a| a.r == 1.0).map(|a| a.w).sum();
                return Ok((w * v, "closed_form"));
            }
            DistSpec::Quad(p) if m.atoms().iter().all(|a| a.r == 1.0) => {
                return Ok((analytic::spa_revenue_quad(p), "closed_form"))
            }
            _ => {}
        }
    }
    Ok((analytic::mixture_revenue(m, &d.curve()?)?, "quadrature"))
}

struct Output {
    json: Json,
    text: String,
    csv: String,
    status: i32,
}

fn with_schema(mut j: Json) -> Json {
    if let Json::Object(map) = &mut j {
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    j
}

/// Leaf values keyed by dotted path; arrays stay whole as JSON text. `sci`
/// prints floats with 17 significant digits.
fn flatten(j: &Json, sci: bool) -> Vec<(String, String, bool)> {
    fn walk(prefix: &str, j: &Json, sci: bool, out: &mut Vec<(String, String, bool)>) {
        let leaf = match j {
            Json::Object(m) => {
                for (k, v) in m {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, v, sci, out);
                }
                return;
            }
            Json::Array(_) => (j.to_string(), true),
            Json::Number(n) => match n.as_f64() {
                Some(x) if sci && n.is_f64() => (format!("{x:.16e}"), false),
                _ => (n.to_string(), false),
            },
            Json::String(s) => (s.clone(), false),
            Json::Bool(b) => (b.to_string(), false),
            Json::Null => (String::new(), false),
        };
        out.push((prefix.to_string(), leaf.0, leaf.1));
    }
    let mut out = Vec::new();
    walk("", j, sci, &mut out);
    out
}

fn scalar_csv(j: &Json) -> String {
    let fields = flatten(j, true);
    let keys: Vec<&str> = fields.iter().map(|f| f.0.as_str()).collect();
    let vals: Vec<String> = fields
        .iter()
        .map(|(_, v, quoted)| {
            if *quoted {
                format!("\"{}\"", v.replace('"', "\"\""))
            } else {
                v.clone()
            }
        })
        .collect();
    format!("{}\n{}\n", keys.join(","), vals.join(","))
}

fn text_of(j: &Json) -> String {
    let mut s = String::new();
    for (k, v, _) in flatten(j, false) {
        if k != "schema_version" {
            writeln!(s, "{k} = {v}").unwrap();
        }
    }
    s
}

fn simple(j: Json) -> Output {
    let j = with_schema(j);
    Output {
        text: text_of(&j),
        csv: scalar_csv(&j),
        json: j,
        status: 0,
    }
}

fn to_json<T: Serialize>(t: &T) -> Json {
    serde_json::to_value(t).expect("serializable")
}

fn cmd_revenue(a: &RevenueArgs) -> Result<Output> {
    let d = DistSpec::parse(&a.dist)?;
    let m = MarkupMixture::parse(&a.mixture)?;
    let (value, method) = revenue_of(&m, &d, a.quadrature)?;
    Ok(simple(json!({
        "input": {"dist": d.describe(), "mixture": to_json(&m)},
        "value": value,
        "method": method,
    })))
}

fn cmd_apx(a: &ApxArgs) -> Result<Output> {
    let d = DistSpec::parse(&a.dist)?;
    if a.star {
        let DistSpec::Triangle(p) = d else {
            return Err(Error::Parse("--star needs a triangle distribution".into()));
        };
        let (ratio, r) = analytic::apx_star(p.q_bar(), a.r_cap)?;
        return Ok(simple(json!({
            "input": {"dist": d.describe(), "r_cap": a.r_cap},
            "value": ratio,
            "best_r": r,
            "method": "closed_form",
        })));
    }
    let m = MarkupMixture::parse(&a.mixture)?;
    let (rev, method) = revenue_of(&m, &d, false)?;
    let opt = match &d {
        DistSpec::Triangle(p) => analytic::opt_revenue_truncated(p.q_bar()),
        DistSpec::PointMass(v) => *v,
        _ => analytic::opt_revenue_curve(&d.curve()?),
    };
    let value = if rev > 0.0 { opt / rev } else { f64::INFINITY };
    Ok(simple(json!({
        "input": {"dist": d.describe(), "mixture": to_json(&m)},
        "value": if value.is_finite() { json!(value) } else { json!("inf") },
        "opt": opt,
        "revenue": rev,
        "method": method,
    })))
}

fn certify_output(report: &solver::CertificateReport) -> Output {
    let j = with_schema(to_json(report));
    let mut text = format!("epsilon {}\n", report.epsilon);
    let mut csv =
        String::from("region,certified,grid_extreme,margin,max_slack,base_cells,refined_cells,uncertified_cells\n");
    for v in &report.regions {
        writeln!(
            text,
            "region {}: {}  extreme {:.12}  margin {:.3e}  max slack {:.3e}  refined {}  uncertified {}\n  claim: {}\n  bound: {}",
            v.region,
            if v.certified { "CERTIFIED" } else { "UNCERTIFIED" },
            v.grid_extreme,
            v.margin,
            v.max_slack,
            v.refined_cells,
            v.uncertified_cells,
            v.claim,
            v.bound
        )
        .unwrap();
        writeln!(
            csv,
            "{},{},{:.16e},{:.16e},{:.16e},{},{},{}",
            v.region,
            v.certified,
            v.grid_extreme,
            v.margin,
            v.max_slack,
            v.base_cells,
            v.refined_cells,
            v.uncertified_cells
        )
        .unwrap();
    }
    Output {
        json: j,
        text,
        csv,
        status: if report.certified { 0 } else { 2 },
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<Output> {
    let tol = Tolerances {
        bracket: a.bracket,
        validation: a.tol,
        ..Tolerances::default()
    };
    let mut sol = solver::solve_equilibrium(&tol)?;
    let mut status = 0;
    let mut report = None;
    if a.certify {
        let rep = solver::certify(&Region::ALL, &CertifyConfig::new(1e-6, &sol))?;
        sol.certified = Some(rep.certified);
        status = if rep.certified { 0 } else { 2 };
        report = Some(rep);
    }
    let mut j = to_json(&sol);
    if let Some(rep) = report {
        j["certificate"] = to_json(&rep);
    }
    let mut out = simple(j);
    out.status = status;
    out.text = format!(
        "q* = {:.10}\nr* = {:.10}\nalpha* = {:.10}\nbeta = {:.10}\ncertified = {}\n",
        sol.q_star,
        sol.r_star,
        sol.alpha_star,
        sol.beta,
        match sol.certified {
            Some(c) => c.to_string(),
            None => "not run".into(),
        }
    );
    Ok(out)
}

fn cmd_certify(a: &CertifyArgs) -> Result<Output> {
    let regions = Region::parse_list(&a.region)?;
    let sol = solver::solve_equilibrium(&Tolerances::default())?;
    let rep = solver::certify(&regions, &CertifyConfig::new(a.epsilon, &sol))?;
    Ok(certify_output(&rep))
}

fn cmd_simulate(a: &SimulateArgs) -> Result<Output> {
    let d = DistSpec::parse(&a.dist)?;
    let m = MarkupMixture::parse(&a.mixture)?;
    let est = oracle::mc_revenue(&m, &d.curve()?, a.n, a.seed)?;
    let mut j = to_json(&est);
    j["input"] = json!({"dist": d.describe(), "mixture": to_json(&m)});
    Ok(simple(j))
}

fn cmd_paradigms(a: &ParadigmsArgs) -> Result<Output> {
    let rows = paradigms::paradigm_table(a.h)?;
    let closed: Vec<_> = paradigms::PricingRule::ALL
        .iter()
        .map(|r| paradigms::closed_form_row(*r, a.h))
        .collect();
    let j = with_schema(json!({"H": a.h, "rows": to_json(&rows), "closed_form": to_json(&closed)}));
    let mut csv = String::from("mechanism,min_revenue,max_approximation,max_regret\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{:.16e},{},{:.16e}",
            r.rule.name(),
            r.min_revenue,
            r.max_approximation,
            r.max_regret
        )
        .unwrap();
    }
    Ok(Output {
        text: paradigms::render_table(a.h, &rows),
        csv,
        json: j,
        status: 0,
    })
}

fn defect_report<M: Mechanism>(avg: &ScaledAverage<M>, v: [f64; 2], s: f64) -> Result<Json> {
    let d = avg.invariance_defect(v, s)?;
    let o = avg.averaged_outcome(v);
    Ok(json!({
        "base": avg.base().label(),
        "L": avg.half_width(),
        "v": v,
        "scale": s,
        "averaged_outcome": to_json(&o),
        "defect": to_json(&d),
        "within_bounds": d.within(1e-8),
    }))
}

fn cmd_symmetrize(a: &SymmetrizeArgs) -> Result<Output> {
    let v = match numbers(&a.v)?.as_slice() {
        [x, y] if *x >= 0.0 && *y >= 0.0 => [*x, *y],
        _ => return Err(Error::Parse("--v takes two non-negative numbers v1,v2".into())),
    };
    let j = if let Some(rho) = a.base.strip_prefix("reserve-spa:") {
        let rho = rho.parse::<f64>().map_err(|e| Error::Parse(format!("reserve: {e}")))?;
        defect_report(
            &ScaledAverage::with_panels(ReserveSpa { reserve: rho }, a.l, a.panels)?,
            v,
            a.scale,
        )?
    } else if let Some(spec) = a.base.strip_prefix("mixture:") {
        defect_report(
            &ScaledAverage::with_panels(MarkupMixture::parse(spec)?, a.l, a.panels)?,
            v,
            a.scale,
        )?
    } else {
        return Err(Error::Parse(format!("unknown base `{}`", a.base)));
    };
    let mut out = simple(j);
    if out.json["within_bounds"] != json!(true) {
        out.status = 2;
    }
    Ok(out)
}

/// The two series of the revenue/approximation figure.
pub struct RevApproxData {
    /// `q, APX_1(q), APX_*(q)`.
    pub apx: Vec<[f64; 3]>,
    /// `r, M_r(T_{q*})`.
    pub markup: Vec<[f64; 2]>,
    pub q_star: f64,
}

pub fn rev_approx_data(points: usize) -> Result<RevApproxData> {
    let points = points.max(10);
    let q_star = solver::find_crossing(1e-9)?;
    let mut apx = Vec::with_capacity(points);
    for i in 1..points {
        let q = i as f64 / points as f64;
        apx.push([
            q,
            analytic::opt_revenue_truncated(q),
            analytic::apx_star(q, analytic::R_CAP)?.0,
        ]);
    }
    let markup = (0..=points)
        .map(|i| {
            let r = 1.0 + 9.0 * i as f64 / points as f64;
            let m = if i == 0 {
                1.0
            } else {
                analytic::markup_revenue_triangle(r, q_star).unwrap()
            };
            [r, m]
        })
        .collect();
    Ok(RevApproxData { apx, markup, q_star })
}

fn cmd_plotdata(a: &PlotdataArgs) -> Result<Output> {
    if a.figure != "rev-approx" {
        return Err(Error::Parse(format!("unknown figure `{}`", a.figure)));
    }
    let data = rev_approx_data(a.points)?;
    let mut apx_csv = String::from("q,apx_1,apx_star\n");
    for [q, a1, s] in &data.apx {
        writeln!(apx_csv, "{q:.16e},{a1:.16e},{s:.16e}").unwrap();
    }
    let mut m_csv = String::from("r,markup_revenue\n");
    for [r, m] in &data.markup {
        writeln!(m_csv, "{r:.16e},{m:.16e}").unwrap();
    }
    std::fs::create_dir_all(&a.dir)?;
    let p1 = a.dir.join("rev_approx_apx.csv");
    let p2 = a.dir.join("rev_approx_markup.csv");
    std::fs::write(&p1, &apx_csv)?;
    std::fs::write(&p2, &m_csv)?;
    Ok(simple(json!({
        "figure": a.figure,
        "files": [p1.display().to_string(), p2.display().to_string()],
        "crossing_q": data.q_star,
    })))
}

fn cmd_check(a: &CheckArgs) -> Result<Output> {
    let results = checks::run_all(a.seed);
    let ok = results.iter().all(|c| c.passed);
    let mut text = String::new();
    let mut csv = String::from("check,passed,detail\n");
    for c in &results {
        writeln!(
            text,
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        )
        .unwrap();
        writeln!(csv, "{},{},\"{}\"", c.name, c.passed, c.detail).unwrap();
    }
    Ok(Output {
        json: with_schema(json!({"checks": to_json(&results), "passed": ok})),
        text,
        csv,
        status: if ok { 0 } else { 2 },
    })
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Revenue(a) => cmd_revenue(a),
        Command::Apx(a) => cmd_apx(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Paradigms(a) => cmd_paradigms(a),
        Command::Symmetrize(a) => cmd_symmetrize(a),
        Command::Plotdata(a) => cmd_plotdata(a),
        Command::Check(a) => cmd_check(a),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status: 0 on success, 1 on bad input, 2 when a certificate or
/// property check fails.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let out = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let body = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&out.json).expect("json renders")),
        Format::Csv => out.csv,
        Format::Text => out.text,
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: writing {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{body}"),
    }
    out.status
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dist_specs() {
        assert!(matches!(
            DistSpec::parse("triangle:0.3").unwrap(),
            DistSpec::Triangle(_)
        ));
        assert!(matches!(DistSpec::parse("quad:0.2,0.4,2").unwrap(), DistSpec::Quad(_)));
        assert!(matches!(
            DistSpec::parse("pointmass:2").unwrap(),
            DistSpec::PointMass(_)
        ));
        assert!(DistSpec::parse("quad:0.5,0.9,1.5").is_err());
        assert!(DistSpec::parse("normal:0,1").is_err());
        assert!(DistSpec::parse("triangle").is_err());
        assert!(DistSpec::parse("curve:missing.json").is_err());
    }

    #[test]
    fn closed_form_and_quadrature_agree() {
        let m = MarkupMixture::parse("0.8:1,0.2:2.5").unwrap();
        let d = DistSpec::parse("triangle:0.2").unwrap();
        let (a, ma) = revenue_of(&m, &d, false).unwrap();
        let (b, mb) = revenue_of(&m, &d, true).unwrap();
        assert_eq!((ma, mb), ("closed_form", "quadrature"));
        assert!((a - b).abs() < 1e-9);
        let (p, _) = revenue_of(&m, &DistSpec::PointMass(2.0), false).unwrap();
        assert!((p - 1.6).abs() < 1e-15);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["scale-robust", "--help"]), 0);
        assert_eq!(run(["scale-robust", "bogus"]), 1);
        assert_eq!(run(["scale-robust", "revenue", "--dist", "nope:1"]), 1);
        assert_eq!(
            run([
                "scale-robust",
                "revenue",
                "--dist",
                "triangle:0.3",
                "--mixture",
                "0.5:1"
            ]),
            1
        );
    }

    #[test]
    fn csv_flattening() {
        let csv = scalar_csv(&json!({"a": 1, "b": {"c": 0.5}, "d": "x"}));
        assert_eq!(csv, "a,b.c,d\n1,5.0000000000000000e-1,x\n");
    }
}
