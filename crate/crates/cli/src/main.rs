//! Command-line front end: limiting laws, exhaustive and sampled scans,
//! lemma verification suites and the trigonal contrast table.
//!
//! Exit codes: 0 on success, 1 when a verification or gate fails, 2 on a
//! usage or configuration error.

use std::ops::RangeInclusive;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use superell::harness::{
    self, convergence_scan, decimal_12, run_exhaustive, run_montecarlo, verify_counting_lemmas, verify_local_lemma,
    ConvergenceReport, CountingReport, ExperimentConfig, HarnessError, InterpolationSpec, LocalLemmaReport,
};
use superell::theorydist::{rational_json, total_dist, trigonal_contrast, tv_distance};
use superell::{ExactDist, Rational, TheoremParams};

#[derive(Parser)]
#[command(name = "superell", version, about = "Point-count statistics of superelliptic curves over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the limiting per-site law (or the total-count law).
    Theory(TheoryArgs),
    /// Exhaustive scan of every admitted polynomial of degree d.
    Scan(ScanArgs),
    /// Monte Carlo scan with seeded sharded sampling.
    Sample(SampleArgs),
    /// Run a lemma verification suite.
    Verify(VerifyArgs),
    /// Compare the trigonal laws for growing degree and growing signature.
    Contrast(ContrastArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Singular,
    Normalization,
}

impl From<VariantArg> for superell::Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Singular => superell::Variant::Singular,
            VariantArg::Normalization => superell::Variant::Normalization,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatisticArg {
    Total,
    Joint,
    Marginal,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    All,
    GeometricallyIrreducible,
    Irreducible,
}

impl From<FilterArg> for harness::Filter {
    fn from(f: FilterArg) -> Self {
        match f {
            FilterArg::All => harness::Filter::All,
            FilterArg::GeometricallyIrreducible => harness::Filter::GeometricallyIrreducible,
            FilterArg::Irreducible => harness::Filter::Irreducible,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Counting,
    Local,
    Interpolation,
}

/// Accepts `a..b` or `a..=b`, both inclusive.
fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: u32 = lo.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let hi: u32 = hi.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}

#[derive(Args)]
struct FieldArgs {
    /// Characteristic.
    #[arg(long)]
    p: u32,
    /// Extension degree, q = p^k.
    #[arg(long, default_value_t = 1)]
    k: u32,
}

impl FieldArgs {
    fn q(&self) -> Result<u32, Failure> {
        self.p.checked_pow(self.k).ok_or_else(|| Failure::Usage(format!("p^k = {}^{} overflows", self.p, self.k)))
    }
}

#[derive(Args)]
struct TheoryArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value = "singular")]
    variant: VariantArg,
    /// `total` prints the law of the sum over all q sites; default is one site.
    #[arg(long, value_enum)]
    statistic: Option<StatisticArg>,
    #[arg(long, value_enum, default_value = "json")]
    out: OutArg,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value = "singular")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "total")]
    statistic: StatisticArg,
    /// Site for the marginal statistic, as a canonical element value.
    #[arg(long)]
    x: Option<u32>,
    #[arg(long, value_enum, default_value = "all")]
    filter: FilterArg,
    /// Exhaustive enumeration budget; defaults to SUPERELL_BUDGET or 10^7.
    #[arg(long)]
    budget: Option<u128>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value = "json")]
    out: OutArg,
}

impl ExperimentArgs {
    fn config(&self, d: u32) -> Result<ExperimentConfig, Failure> {
        let statistic = match (self.statistic, self.x) {
            (StatisticArg::Marginal, Some(x)) => harness::Statistic::Marginal { x },
            (StatisticArg::Marginal, None) => return Err(Failure::Usage("--statistic marginal needs --x".into())),
            (_, Some(_)) => return Err(Failure::Usage("--x only applies to --statistic marginal".into())),
            (StatisticArg::Total, None) => harness::Statistic::Total,
            (StatisticArg::Joint, None) => harness::Statistic::Joint,
        };
        let mut config = ExperimentConfig::new(self.field.p, self.field.k, self.m, self.n, self.variant.into(), d)
            .with_statistic(statistic)
            .with_filter(self.filter.into())
            .with_threads(self.threads);
        if let Some(budget) = self.budget {
            config = config.with_budget(budget);
        }
        Ok(config)
    }
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, conflicts_with = "d_range", required_unless_present = "d_range")]
    d: Option<u32>,
    /// Degrees `a..b` (inclusive) for a convergence table.
    #[arg(long, value_parser = parse_range)]
    d_range: Option<RangeInclusive<u32>>,
    /// TV ceiling at the largest degree of a range; failing it exits 1.
    #[arg(long, requires = "d_range")]
    gate: Option<f64>,
    /// Relative slack allowed when checking that TV does not increase.
    #[arg(long, default_value_t = 0.1, requires = "d_range")]
    band: f64,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[command(flatten)]
    field: FieldArgs,
    /// Power-freeness exponents, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    n: Vec<u32>,
    #[arg(long, conflicts_with = "d_range")]
    d: Option<u32>,
    #[arg(long, value_parser = parse_range)]
    d_range: Option<RangeInclusive<u32>>,
    /// Cyclic degrees for the local suite.
    #[arg(long, value_parser = parse_range, default_value = "2..8")]
    m_range: RangeInclusive<u32>,
    /// Valuations for the local suite.
    #[arg(long, value_parser = parse_range, default_value = "0..8")]
    s_range: RangeInclusive<u32>,
    /// Largest splitting-field size the local orbit oracle may build.
    #[arg(long, default_value_t = 1u128 << 40)]
    bound: u128,
    /// Numbers of prescribed points for the interpolation suite.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    ls: Vec<u32>,
    #[arg(long, default_value_t = 20)]
    tuples: usize,
    #[arg(long, default_value_t = harness::DEFAULT_INTERPOLATION_CONSTANT)]
    constant: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    budget: Option<u128>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value = "json")]
    out: OutArg,
}

#[derive(Args)]
struct ContrastArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum, default_value = "json")]
    out: OutArg,
}

/// A usage or configuration problem; always exit code 2.
enum Failure {
    Usage(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<superell::theorydist::TheoryError> for Failure {
    fn from(e: superell::theorydist::TheoryError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Printed output plus whether the run met its checks.
struct Emitted {
    text: String,
    passed: bool,
}

fn ok(text: String) -> Result<Emitted, Failure> {
    Ok(Emitted { text, passed: true })
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn pmf_csv(law: &ExactDist) -> String {
    let mut out = String::from("outcome,probability,num,den\n");
    for (k, p) in law.iter() {
        out.push_str(&format!("{k},{},{},{}\n", decimal_12(p), p.numer(), p.denom()));
    }
    out
}

fn theory(args: &TheoryArgs) -> Result<Emitted, Failure> {
    let q = args.field.q()?;
    let params = TheoremParams::new(q, args.m, args.n, args.variant.into())?;
    let site: ExactDist = params.distribution();
    let law = match args.statistic {
        None | Some(StatisticArg::Marginal) => site,
        Some(StatisticArg::Total) => total_dist(&site, q),
        Some(StatisticArg::Joint) => {
            return Err(Failure::Usage("the joint law is the q-fold product of the per-site law; omit --statistic".into()))
        }
    };
    ok(match args.out {
        OutArg::Json => pretty(&law.to_json()),
        OutArg::Csv => pmf_csv(&law),
    })
}

fn convergence_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from("d,trials,tv,tv_num,tv_den,geometrically_reducible\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.d,
            row.trials,
            decimal_12(&row.tv.to_rational()),
            row.tv.num,
            row.tv.den,
            row.geometrically_reducible
        ));
    }
    out
}

fn scan(args: &ScanArgs) -> Result<Emitted, Failure> {
    let exp = &args.experiment;
    if let Some(d) = args.d {
        let report = run_exhaustive(&exp.config(d)?)?;
        return ok(match exp.out {
            OutArg::Json => report.to_json_string() + "\n",
            OutArg::Csv => report.to_csv(),
        });
    }
    let range = args.d_range.clone().expect("clap requires --d or --d-range");
    let base = exp.config(*range.start())?;
    let report = convergence_scan(&base, range, args.gate.unwrap_or(f64::INFINITY), args.band)?;
    let text = match exp.out {
        OutArg::Json => pretty(&report),
        OutArg::Csv => convergence_csv(&report),
    };
    Ok(Emitted { text, passed: args.gate.is_none() || report.passed })
}

fn sample(args: &SampleArgs) -> Result<Emitted, Failure> {
    let exp = &args.experiment;
    let report = run_montecarlo(&exp.config(args.d)?.montecarlo(args.samples, args.seed))?;
    ok(match exp.out {
        OutArg::Json => report.to_json_string() + "\n",
        OutArg::Csv => report.to_csv(),
    })
}

fn counting_csv(report: &CountingReport) -> String {
    let mut out = String::from("q,n,d,count,expected,pass\n");
    for c in &report.exact {
        out.push_str(&format!("{},{},{},{},{},{}\n", c.q, c.n, c.d, c.count, c.expected, c.pass));
    }
    out
}

fn interpolation_csv(report: &CountingReport) -> String {
    let mut out = String::from("q,n,d,l,xs,values,count,main_term,bound,ratio,pass\n");
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(";");
    for c in &report.interpolation {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            c.q,
            c.n,
            c.d,
            c.l,
            join(&c.xs),
            join(&c.values),
            c.count,
            decimal_12(&c.main_term.to_rational()),
            c.bound,
            c.ratio,
            c.pass
        ));
    }
    out
}

fn local_csv(report: &LocalLemmaReport) -> String {
    let mut out = String::from("q,m,s,a,normalization,orbit,closed_form,pass\n");
    let opt = |v: Option<u32>| v.map_or(String::new(), |v| v.to_string());
    for c in &report.cases {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.q,
            c.m,
            c.s,
            c.a,
            opt(c.normalization),
            opt(c.orbit),
            c.closed_form,
            c.pass
        ));
    }
    out
}

fn verify(args: &VerifyArgs) -> Result<Emitted, Failure> {
    let fields = [(args.field.p, args.field.k)];
    let q = args.field.q()?;
    let degrees = || -> Result<RangeInclusive<u32>, Failure> {
        match (args.d, &args.d_range) {
            (Some(d), None) => Ok(d..=d),
            (None, Some(r)) => Ok(r.clone()),
            _ => Err(Failure::Usage("this suite needs --d or --d-range".into())),
        }
    };
    if args.n.iter().any(|&n| n < 2) {
        return Err(Failure::Usage("--n values must be at least 2".into()));
    }
    let budget = args.budget.unwrap_or_else(harness::default_budget);
    match args.suite {
        Suite::Counting => {
            let report = verify_counting_lemmas(&fields, &args.n, degrees()?, budget, None, args.threads)?;
            if report.exact.is_empty() {
                return Err(Failure::Usage("every requested degree exceeds the budget".into()));
            }
            let text = match args.out {
                OutArg::Json => pretty(&report),
                OutArg::Csv => counting_csv(&report),
            };
            Ok(Emitted { text, passed: report.passed })
        }
        Suite::Interpolation => {
            if !args.constant.is_finite() || args.constant <= 0.0 {
                return Err(Failure::Usage("--constant must be positive".into()));
            }
            let spec = InterpolationSpec {
                ls: args.ls.clone(),
                tuples_per_case: args.tuples,
                constant: args.constant,
                seed: args.seed,
            };
            let report = verify_counting_lemmas(&fields, &args.n, degrees()?, budget, Some(&spec), args.threads)?;
            if report.interpolation.is_empty() {
                return Err(Failure::Usage(format!("no interpolation cases for q = {q} (value tables or budget too large)")));
            }
            let text = match args.out {
                OutArg::Json => pretty(&report),
                OutArg::Csv => interpolation_csv(&report),
            };
            Ok(Emitted { text, passed: report.passed })
        }
        Suite::Local => {
            let report = verify_local_lemma(&fields, args.m_range.clone(), args.s_range.clone(), args.bound)?;
            if report.cases.is_empty() {
                return Err(Failure::Usage(format!("no m in the range is coprime to q = {q}")));
            }
            let text = match args.out {
                OutArg::Json => pretty(&report),
                OutArg::Csv => local_csv(&report),
            };
            Ok(Emitted { text, passed: report.passed })
        }
    }
}

fn contrast(args: &ContrastArgs) -> Result<Emitted, Failure> {
    let q = args.field.q()?;
    let (degree_limit, signature_limit) = trigonal_contrast::<Rational>(q)?;
    let tv = tv_distance(&degree_limit, &signature_limit);
    ok(match args.out {
        OutArg::Json => {
            let v: Value = json!({
                "q": q,
                "degree_limit": degree_limit.to_json(),
                "signature_limit": signature_limit.to_json(),
                "tv": rational_json(&tv),
            });
            pretty(&v)
        }
        OutArg::Csv => {
            let mut out = String::from("outcome,degree_limit,signature_limit\n");
            for k in degree_limit.support().chain(signature_limit.support()).collect::<std::collections::BTreeSet<_>>() {
                out.push_str(&format!(
                    "{k},{},{}\n",
                    decimal_12(&degree_limit.mass(k)),
                    decimal_12(&signature_limit.mass(k))
                ));
            }
            out
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Theory(a) => theory(a),
        Command::Scan(a) => scan(a),
        Command::Sample(a) => sample(a),
        Command::Verify(a) => verify(a),
        Command::Contrast(a) => contrast(a),
    };
    match result {
        Ok(Emitted { text, passed }) => {
            print!("{text}");
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
