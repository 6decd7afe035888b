use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use assortment_core::analysis::{self, Method, SuiteSpec};
use assortment_core::instances::{generate_multicat_instance, LoadedInstance};
use assortment_core::{
    expected_revenue, expected_revenue_multicat, generate_category_instance, generate_instance,
    purchase_distribution_general, purchase_distribution_robust, worst_case, Assortment, CategoryTag, Constraint,
    InstanceFile, PlubOptions, SolutionFile, SolveStatus,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const EXIT_VALIDATION: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_TIME_LIMIT: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "assortment", version, about = "Robust assortment planning with unavailability-sensitive customers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance.
    Gen(GenArgs),
    /// Solve an instance and print the solution as JSON.
    Solve(SolveArgs),
    /// Evaluate an assortment (`1,3`, `{}`) or a solution file on an instance.
    Eval {
        instance: PathBuf,
        assortment: String,
    },
    /// Compare the optimum against planning without unavailability effects
    /// (or, for category mixes, against planning for one category).
    CompareMnl { instance: PathBuf },
    /// Run a benchmark suite.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    ubar: usize,
    /// Cardinality limit; omit for an unconstrained instance.
    #[arg(long, conflicts_with = "mu")]
    cbar: Option<usize>,
    /// Knapsack capacity; requires --gamma.
    #[arg(long, requires = "gamma")]
    mu: Option<f64>,
    /// Comma-separated knapsack sizes, one per product.
    #[arg(long, value_delimiter = ',', requires = "mu")]
    gamma: Option<Vec<f64>>,
    /// Category tag such as `3` or `1,2`; mixes products across ranges.
    #[arg(long, conflicts_with = "categories")]
    category: Option<String>,
    /// Semicolon-separated tags for a multi-category instance, e.g. `1;3`.
    #[arg(long, requires = "weights")]
    categories: Option<String>,
    /// Comma-separated category weights.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WarmStart {
    Greedy,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (single or multi-category).
    #[arg(required_unless_present = "multicat")]
    instance: Option<PathBuf>,
    /// Multi-category instance file.
    #[arg(long, conflicts_with = "instance")]
    multicat: Option<PathBuf>,
    #[arg(long, default_value = "plub")]
    method: String,
    #[arg(long)]
    pi_bounds: bool,
    #[arg(long)]
    supervalid: bool,
    #[arg(long, value_enum)]
    warm_start: Option<WarmStart>,
    #[arg(long, default_value_t = assortment_core::plub::DEFAULT_TOL)]
    tol: f64,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Also write the solution here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    suite: PathBuf,
    /// Write the per-cell table as CSV.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write per-run performance-profile rows as CSV.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Write assortment-variation rows as CSV.
    #[arg(long)]
    variation: Option<PathBuf>,
    /// Print the per-cell table as CSV instead of the JSON report.
    #[arg(long)]
    csv: bool,
    /// Override the suite's worker count.
    #[arg(long)]
    workers: Option<usize>,
}

fn read_instance(path: &Path) -> anyhow::Result<(InstanceFile, LoadedInstance)> {
    let file = InstanceFile::read(path).with_context(|| format!("reading {}", path.display()))?;
    let loaded = file.load()?;
    Ok((file, loaded))
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn gen(args: GenArgs) -> anyhow::Result<()> {
    let constraint = match (args.cbar, args.mu, args.gamma) {
        (Some(c_bar), None, None) => Constraint::Cardinality { c_bar },
        (None, Some(mu), Some(gamma)) => Constraint::Knapsack { gamma, mu },
        (None, None, None) => Constraint::Unconstrained,
        _ => bail!(assortment_core::Error::Validation("use either --cbar or --mu with --gamma".into())),
    };
    let file = if let Some(list) = &args.categories {
        let tags = list.split(';').map(str::parse).collect::<Result<Vec<CategoryTag>, _>>()?;
        let weights = args.weights.unwrap_or_default();
        InstanceFile::from_multicat(&generate_multicat_instance(args.seed, args.n, constraint, args.ubar, &tags, &weights)?)
    } else {
        let inst = match &args.category {
            Some(tag) => generate_category_instance(args.seed, args.n, constraint, args.ubar, &tag.parse()?)?,
            None => generate_instance(args.seed, args.n, constraint, args.ubar)?,
        };
        InstanceFile::from_instance(&inst)
    };
    match args.output {
        Some(path) => file.write(&path)?,
        None => print!("{}", file.to_json()?),
    }
    Ok(())
}

fn solve(args: SolveArgs) -> anyhow::Result<u8> {
    let path = args.instance.or(args.multicat).expect("clap requires an instance");
    let method: Method = args.method.parse()?;
    let method = match (method, args.warm_start) {
        (Method::Plub, Some(WarmStart::Greedy)) => Method::GPlub,
        (m, None) => m,
        (m, Some(_)) => bail!(assortment_core::Error::Validation(format!("--warm-start applies to plub, not {m}"))),
    };
    let options = PlubOptions {
        use_pi_bounds: args.pi_bounds,
        use_supervalid: args.supervalid,
        warm_start: None,
        tol: args.tol,
        time_limit: args.time_limit.map(Duration::try_from_secs_f64).transpose()?,
    };
    let (file, loaded) = read_instance(&path)?;
    let result = match &loaded {
        LoadedInstance::Single { instance, .. } => analysis::solve_with(method, instance, &options)?,
        LoadedInstance::Multi(mci) => analysis::solve_multicat_with(method, mci, &options)?,
    };
    let solution = SolutionFile::new(file.digest()?, method.name(), &result);
    if let Some(out) = args.output {
        std::fs::write(&out, serde_json::to_string_pretty(&solution)? + "\n")?;
    }
    print_json(&solution)?;
    Ok(if result.status == SolveStatus::TimeLimit { EXIT_TIME_LIMIT } else { 0 })
}

fn parse_assortment(text: &str) -> anyhow::Result<Assortment> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    let ids = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| assortment_core::Error::Validation(format!("bad product id {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Assortment::new(ids)?)
}

#[derive(Serialize)]
struct Evaluation {
    assortment: Assortment,
    objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    robust_distribution: Option<BTreeMap<usize, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    general_distribution: Option<BTreeMap<usize, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stored_objective: Option<f64>,
}

fn eval(instance: &Path, target: &str) -> anyhow::Result<()> {
    let (file, loaded) = read_instance(instance)?;
    let (assortment, stored) = if Path::new(target).is_file() {
        let text = std::fs::read_to_string(target).with_context(|| format!("reading {target}"))?;
        let solution: SolutionFile = serde_json::from_str(&text).context("parsing solution file")?;
        if solution.instance_ref != file.digest()? {
            bail!(assortment_core::Error::Validation(format!("{target} was solved on a different instance")));
        }
        (solution.assortment, Some(solution.objective))
    } else {
        (parse_assortment(target)?, None)
    };
    let out = match &loaded {
        LoadedInstance::Single { instance, scenario } => {
            let wc = worst_case(instance, &assortment)?;
            let general = scenario
                .as_ref()
                .map(|s| purchase_distribution_general(instance, s, instance.u_bar(), &assortment))
                .transpose()?;
            Evaluation {
                objective: expected_revenue(instance, &assortment)?,
                pi: Some(wc.pi),
                theta: Some(wc.theta),
                worst_list: Some(wc.worst_list),
                robust_distribution: Some(purchase_distribution_robust(instance, &assortment)?),
                general_distribution: general,
                stored_objective: stored,
                assortment,
            }
        }
        LoadedInstance::Multi(mci) => Evaluation {
            objective: expected_revenue_multicat(mci, &assortment)?,
            pi: None,
            theta: None,
            worst_list: None,
            robust_distribution: None,
            general_distribution: None,
            stored_objective: stored,
            assortment,
        },
    };
    print_json(&out)
}

fn compare(instance: &Path) -> anyhow::Result<()> {
    match read_instance(instance)?.1 {
        LoadedInstance::Single { instance, .. } => print_json(&analysis::compare_mnl(&instance)?),
        LoadedInstance::Multi(mci) => print_json(&analysis::compare_multicat(&mci)?),
    }
}

fn bench(args: BenchArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.suite).with_context(|| format!("reading {}", args.suite.display()))?;
    let mut spec: SuiteSpec = serde_json::from_str(&text).context("parsing suite")?;
    if let Some(w) = args.workers {
        spec.workers = w;
    }
    let report = analysis::bench(&spec)?;
    if let Some(path) = &args.output {
        std::fs::write(path, report.cells_csv()?)?;
    }
    if let Some(path) = &args.profile {
        std::fs::write(path, report.profile_csv()?)?;
    }
    if let Some(path) = &args.variation {
        std::fs::write(path, report.variation_csv()?)?;
    }
    if args.csv {
        print!("{}", report.cells_csv()?);
        Ok(())
    } else {
        print_json(&report)
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use assortment_core::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::Infeasible(_)) => EXIT_INFEASIBLE,
        _ => EXIT_VALIDATION,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Gen(args) => gen(args).map(|_| 0),
        Command::Solve(args) => solve(args),
        Command::Eval { instance, assortment } => eval(&instance, &assortment).map(|_| 0),
        Command::CompareMnl { instance } => compare(&instance).map(|_| 0),
        Command::Bench(args) => bench(args).map(|_| 0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
