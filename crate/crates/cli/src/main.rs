use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cue_dpp::counting::{count_distribution, sine_comparison, DistanceReport, SineComparison, CHAIN_SLACK};
use cue_dpp::intensity::{audit, random_queries, IntensityAudit, IntensityQuery};
use cue_dpp::operator::{spectrum, Quadrature};
use cue_dpp::sampler::{counts_csv, sample_cue};
use cue_dpp::stats::{exact_gaussian_ks, reproduce_figure1, CltReport, Figure1Config};
use cue_dpp::variance::{variance_bounds, variance_by_formula, variance_difference, variance_difference_bound};
use cue_dpp::{distance_report, ArcSet, Error, KernelSpec};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const INTENSITY_SLACK: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "cue-dpp",
    version,
    about = "Counting statistics of CUE eigenvalues and their dilated sub-arcs"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 2016)]
    seed: u64,
    /// Write the CSV table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Gauss-Legendre order per interval, overriding the default.
    #[arg(long = "quad-order", global = true)]
    quad_order: Option<usize>,
    /// Print a JSON summary on stdout.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args)]
struct WindowArgs {
    /// Symmetric window [-theta, theta).
    #[arg(long, conflicts_with = "set")]
    theta: Option<f64>,
    /// Window as a JSON list of half-open intervals, e.g. '[[-0.3,-0.1],[0.1,0.3]]'.
    #[arg(long)]
    set: Option<String>,
}

impl WindowArgs {
    fn window(&self, default_theta: f64) -> Result<ArcSet, Failure> {
        match &self.set {
            Some(s) => Ok(ArcSet::from_json(s)?),
            None => Ok(ArcSet::symmetric(self.theta.unwrap_or(default_theta))?),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact TV and W1 between the two window counts, with every bound of the chain.
    Distance {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Variance by integral formula and by PMF, closed-form bounds, and the gap to the dilated count.
    Variance {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 5, 20, 100])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.2, 0.5])]
        theta: Vec<f64>,
        /// Also report the dilated count for this m.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Exact Kolmogorov distance of the standardised count to N(0, 1).
    Clt {
        #[arg(long, value_delimiter = ',', default_values_t = vec![50usize, 100, 500])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25])]
        theta: Vec<f64>,
    },
    /// Monte Carlo comparison of the two counts; emits empirical CDF curves.
    Figure1 {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0.2)]
        theta: f64,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// Audit of joint intensities at random or given points.
    Intensity {
        #[arg(long, default_value_t = 1000)]
        queries: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 5, 10, 50])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 5])]
        m: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 2, 3, 4])]
        k: Vec<usize>,
        /// Evaluate a single query at these points (JSON list), using the first n and m.
        #[arg(long)]
        points: Option<String>,
    },
    /// Dilated CUE count against the sine-kernel count over a sweep of n.
    Sine {
        #[arg(long, value_delimiter = ',', default_values_t = vec![100usize, 200, 400])]
        n: Vec<usize>,
        /// Window on the real line, JSON list of intervals.
        #[arg(long, default_value = "[[-1,1]]")]
        set: String,
    },
    /// Raw Haar eigenangles, or per-trial window counts with --theta/--set.
    Sample {
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[command(flatten)]
        window: WindowArgs,
    },
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SpectrumOutOfRange { .. }
            | Error::QuadratureNotConverged { .. }
            | Error::Eigensolver(_)
            | Error::Violation(_) => Failure::Internal(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

struct Output {
    csv: String,
    summary: Value,
    violations: Vec<String>,
}

fn parse_intervals(s: &str) -> Result<Vec<(f64, f64)>, Failure> {
    let raw: Vec<[f64; 2]> = serde_json::from_str(s).map_err(|e| Failure::Invalid(format!("window JSON: {e}")))?;
    Ok(raw.into_iter().map(|[a, b]| (a, b)).collect())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_default()
}

fn distance(n: usize, m: usize, window: &ArcSet, hint: Option<usize>) -> Result<Output, Failure> {
    let r: DistanceReport = distance_report(n, m, window, hint)?;
    let mut violations = r.chain_violations();
    if window.diameter() <= PI && r.w1_exact > r.closed_form_bound + CHAIN_SLACK {
        violations.push(format!(
            "w1 = {:.6e} > closed_form = {:.6e}",
            r.w1_exact, r.closed_form_bound
        ));
    }
    Ok(Output {
        csv: format!("{}\n{}\n", DistanceReport::CSV_HEADER, r.csv_row()),
        summary: json!({
            "config": { "n": n, "m": m, "A": window, "quad_order": hint },
            "tv": r.tv_exact,
            "w1": r.w1_exact,
            "coupling": r.coupling_bound,
            "cs": r.cs_bound,
            "hs": r.hs_bound,
            "closed_form": r.closed_form_bound,
            "trace_gap": r.trace_gap,
            "quadrature_nodes": r.quadrature_nodes,
            "chain_holds": violations.is_empty(),
        }),
        violations,
    })
}

fn variance(ns: &[usize], thetas: &[f64], m: Option<usize>, hint: Option<usize>) -> Result<Output, Failure> {
    let mut csv = String::from("n,theta,var_formula,var_pmf,lower,upper");
    if m.is_some() {
        csv.push_str(",m,var_formula_m,var_gap,gap_bound");
    }
    csv.push('\n');
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &n in ns {
        for &theta in thetas {
            let window = ArcSet::symmetric(theta)?;
            let formula = variance_by_formula(n, theta)?;
            let kernel = KernelSpec::cue(n, 1);
            let quad = Quadrature::for_kernel(&window, &kernel, hint)?;
            let pmf = count_distribution(&spectrum(&kernel, &window, Some(quad))?)?.pmf_variance();
            let b = variance_bounds(n, m.unwrap_or(1), theta)?;
            let mut check = |label: &str, v: f64| {
                if b.lower.is_some_and(|lo| lo > v) || v > b.upper {
                    violations.push(format!("{label} variance {v:.6} outside bounds at n={n}, θ={theta}"));
                }
            };
            check("count", formula);
            write!(
                csv,
                "{n},{theta},{formula:.12e},{pmf:.12e},{},{:.12e}",
                fmt_opt(b.lower),
                b.upper
            )
            .unwrap();
            let mut row = json!({
                "n": n, "theta": theta, "var_formula": formula, "var_pmf": pmf,
                "lower": b.lower, "upper": b.upper,
            });
            if let Some(m) = m {
                let var_m = variance_by_formula(m * n, theta / m as f64)?;
                check("dilated", var_m);
                let gap = variance_difference(n, m, &window)?;
                let bound = variance_difference_bound(&window);
                if gap < -CHAIN_SLACK || gap > bound + CHAIN_SLACK {
                    violations.push(format!(
                        "variance gap {gap:.3e} outside [0, {bound:.3e}] at n={n}, θ={theta}"
                    ));
                }
                write!(csv, ",{m},{var_m:.12e},{gap:.12e},{bound:.12e}").unwrap();
                row["m"] = json!(m);
                row["var_formula_m"] = json!(var_m);
                row["var_gap"] = json!(gap);
                row["gap_bound"] = json!(bound);
            }
            csv.push('\n');
            rows.push(row);
        }
    }
    Ok(Output {
        csv,
        summary: json!({ "config": { "n": ns, "theta": thetas, "m": m, "quad_order": hint }, "rows": rows }),
        violations,
    })
}

fn clt(ns: &[usize], thetas: &[f64], hint: Option<usize>) -> Result<Output, Failure> {
    let mut csv = format!("{}\n", CltReport::CSV_HEADER);
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &n in ns {
        for &theta in thetas {
            let r = exact_gaussian_ks(n, theta, hint)?;
            if r.in_hypothesis && !r.sandwich_holds() {
                violations.push(format!("sandwich fails at n={n}, θ={theta}: ks = {:.6}", r.exact_ks));
            }
            csv.push_str(&r.csv_row());
            csv.push('\n');
            rows.push(r);
        }
    }
    Ok(Output {
        csv,
        summary: json!({ "config": { "n": ns, "theta": thetas, "quad_order": hint }, "rows": rows }),
        violations,
    })
}

fn figure1(config: Figure1Config) -> Result<Output, Failure> {
    let r = reproduce_figure1(&config)?;
    let mut summary = r.summary_json();
    summary["reports"] = json!(r.ks_reports());
    Ok(Output {
        csv: r.curves_csv(),
        summary,
        violations: Vec::new(),
    })
}

fn intensity(
    seed: u64,
    queries: usize,
    ns: &[usize],
    ms: &[usize],
    ks: &[usize],
    points: Option<&str>,
) -> Result<Output, Failure> {
    if ns.is_empty() || ms.is_empty() || ks.is_empty() {
        return Err(Failure::Invalid("n, m and k menus must be non-empty".into()));
    }
    let qs = match points {
        Some(p) => {
            let pts: Vec<f64> = serde_json::from_str(p).map_err(|e| Failure::Invalid(format!("points JSON: {e}")))?;
            vec![IntensityQuery::new(ns[0], ms[0], pts)?]
        }
        None => {
            // validate the menus once before drawing
            for &n in ns {
                for &m in ms {
                    for &k in ks {
                        IntensityQuery::new(n, m, vec![0.0; k])?;
                    }
                }
            }
            random_queries(seed, queries, ns, ms, ks)
        }
    };
    let rows = audit(qs);
    let mut csv = format!("{}\n", IntensityAudit::CSV_HEADER);
    let mut violations = Vec::new();
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
        if r.pair.margin() < -INTENSITY_SLACK {
            violations.push(format!("margin {:.3e} at {:?}", r.pair.margin(), r.query));
        }
    }
    let min_margin = rows.iter().map(|r| r.pair.margin()).fold(f64::INFINITY, f64::min);
    Ok(Output {
        csv,
        summary: json!({
            "config": { "seed": seed, "queries": rows.len(), "n": ns, "m": ms, "k": ks },
            "min_margin": min_margin,
        }),
        violations,
    })
}

fn sine(ns: &[usize], set: &str, hint: Option<usize>) -> Result<Output, Failure> {
    let window = ArcSet::on_line(&parse_intervals(set)?)?;
    let mut csv = format!("{}\n", SineComparison::CSV_HEADER);
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &n in ns {
        let c = sine_comparison(n, &window, hint)?;
        if c.w1 > c.bound + CHAIN_SLACK {
            violations.push(format!("w1 = {:.6e} > bound = {:.6e} at n={n}", c.w1, c.bound));
        }
        csv.push_str(&c.csv_row());
        csv.push('\n');
        rows.push(json!({
            "n": n, "w1": c.w1, "tv": c.tv, "bound": c.bound, "ratio": c.ratio(),
            "trace_cue": c.trace_cue, "trace_sine": c.trace_sine,
        }));
    }
    Ok(Output {
        csv,
        summary: json!({ "config": { "n": ns, "A": window, "quad_order": hint }, "rows": rows }),
        violations,
    })
}

fn sample(seed: u64, n: usize, trials: usize, m: usize, window: &WindowArgs) -> Result<Output, Failure> {
    let batch = sample_cue(n, trials, seed)?;
    let mut summary = json!({ "config": batch.meta() });
    let csv = if window.theta.is_some() || window.set.is_some() {
        let a = window.window(0.0)?;
        let counts = batch.count_in_window(&a, m)?;
        let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
        summary["config"]["A"] = json!(a);
        summary["config"]["m"] = json!(m);
        summary["mean_count"] = json!(mean);
        counts_csv(&counts)
    } else {
        batch.to_csv()
    };
    Ok(Output {
        csv,
        summary,
        violations: Vec::new(),
    })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let c = &cli.common;
    let hint = c.quad_order;
    if hint == Some(0) {
        return Err(Failure::Invalid("--quad-order must be positive".into()));
    }
    match &cli.command {
        Command::Distance { n, m, window } => distance(*n, *m, &window.window(0.2)?, hint),
        Command::Variance { n, theta, m } => variance(n, theta, *m, hint),
        Command::Clt { n, theta } => clt(n, theta, hint),
        Command::Figure1 { n, theta, m, trials } => figure1(Figure1Config {
            n: *n,
            theta: *theta,
            m: *m,
            trials: *trials,
            seed: c.seed,
        }),
        Command::Intensity {
            queries,
            n,
            m,
            k,
            points,
        } => intensity(c.seed, *queries, n, m, k, points.as_deref()),
        Command::Sine { n, set } => sine(n, set, hint),
        Command::Sample { n, trials, m, window } => sample(c.seed, *n, *trials, *m, window),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Distance { .. } => "distance",
        Command::Variance { .. } => "variance",
        Command::Clt { .. } => "clt",
        Command::Figure1 { .. } => "figure1",
        Command::Intensity { .. } => "intensity",
        Command::Sine { .. } => "sine",
        Command::Sample { .. } => "sample",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(out) => out,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::FAILURE;
        }
    };
    if let Some(path) = &cli.common.out {
        if let Err(e) = std::fs::write(path, &out.csv) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::FAILURE;
        }
    }
    if cli.common.json {
        let mut summary = out.summary;
        summary["command"] = json!(command_name(&cli.command));
        summary["version"] = json!(VERSION);
        summary["violations"] = json!(out.violations);
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).expect("summary serializes")
        );
    } else if cli.common.out.is_none() {
        print!("{}", out.csv);
    }
    if out.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        for v in &out.violations {
            eprintln!("violation: {v}");
        }
        ExitCode::from(3)
    }
}
