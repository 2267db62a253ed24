use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use descm::{
    builtin, compare_methods, convergence_study, map_catalog, parse_problem_config, pre_plateau,
    rate_fit, write_csv, DecayKind, Error, Method, StudyRecord, SturmLiouvilleProblem,
};

const BUILTINS: [&str; 3] = ["bessel", "laguerre", "singular"];

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Se,
    De,
}

/// Convergence studies for Sinc collocation eigenvalue solvers.
#[derive(Debug, Parser)]
#[command(name = "slsolve", version)]
struct Args {
    /// Built-in problem (bessel, laguerre, singular) or path to a problem file
    #[arg(long)]
    problem: String,

    /// Problem parameter, e.g. n=7 or alpha=3 (repeatable)
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,

    /// Variable transformation; defaults to the problem's preferred map
    #[arg(long, value_enum)]
    method: Option<MethodArg>,

    /// Balance the left and right truncation of the DE mesh
    #[arg(long)]
    balanced: bool,

    /// Scale of the real-line sinh map
    #[arg(long)]
    kappa: Option<f64>,

    #[arg(long, default_value_t = 1)]
    n_min: usize,

    #[arg(long, default_value_t = 40)]
    n_max: usize,

    /// 1-based index of the eigenvalue to track
    #[arg(long, default_value_t = 1)]
    eig_index: usize,

    /// Run every applicable method and merge the series
    #[arg(long)]
    compare: bool,

    /// Fit the convergence rate over the pre-plateau records
    #[arg(long)]
    rate_fit: bool,

    /// CSV destination
    #[arg(long)]
    output: PathBuf,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let value: f64 = value.trim().parse().map_err(|_| {
        format!(
            "parameter '{}' has non-numeric value '{value}'",
            name.trim()
        )
    })?;
    Ok((name.trim().to_string(), value))
}

fn load_problem(args: &Args) -> descm::Result<SturmLiouvilleProblem> {
    let mut params: BTreeMap<String, f64> = args.params.iter().cloned().collect();
    if BUILTINS.contains(&args.problem.as_str()) {
        if let Some(kappa) = args.kappa {
            if args.problem != "singular" {
                return Err(Error::Config(format!(
                    "--kappa does not apply to '{}'",
                    args.problem
                )));
            }
            params.insert("kappa".into(), kappa);
        }
        return builtin(&args.problem, &params);
    }
    if !params.is_empty() {
        return Err(Error::Config(
            "--param applies to built-in problems; declare parameters in the problem file".into(),
        ));
    }
    let text = std::fs::read_to_string(&args.problem)
        .map_err(|e| Error::Config(format!("cannot read problem file '{}': {e}", args.problem)))?;
    let mut problem = parse_problem_config(&text).map_err(|e| match e {
        Error::Parse { .. } => Error::Config(format!("{}:{e}", args.problem)),
        other => other,
    })?;
    if let Some(kappa) = args.kappa {
        problem.de_map = map_catalog(problem.interval, DecayKind::De, kappa)?;
    }
    Ok(problem)
}

fn resolve_method(args: &Args, problem: &SturmLiouvilleProblem) -> descm::Result<Method> {
    let kind = match args.method {
        Some(MethodArg::Se) => DecayKind::Se,
        Some(MethodArg::De) => DecayKind::De,
        None => problem.default_method,
    };
    match (kind, args.balanced) {
        (DecayKind::Se, true) => Err(Error::Config(
            "--balanced only applies to the DE method".into(),
        )),
        (DecayKind::Se, false) => Ok(Method::Se),
        (DecayKind::De, true) => Ok(Method::DeBalanced),
        (DecayKind::De, false) => Ok(Method::De),
    }
}

fn report_rate_fits(records: &[StudyRecord]) -> descm::Result<()> {
    let mut methods: Vec<Method> = records.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    let mut first_error = None;
    for method in methods {
        let series: Vec<StudyRecord> = records
            .iter()
            .filter(|r| r.method == method)
            .cloned()
            .collect();
        match rate_fit(pre_plateau(&series)) {
            Ok(fit) => println!(
                "rate fit {method}: kappa_hat = {:.6}, r_squared = {:.6}, records = {}",
                fit.kappa_hat, fit.r_squared, fit.used
            ),
            Err(e) => {
                eprintln!("slsolve: rate fit {method}: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    first_error.map_or(Ok(()), Err)
}

fn run(args: &Args) -> descm::Result<()> {
    if args.n_min == 0 || args.n_min > args.n_max {
        return Err(Error::Config(format!(
            "need 1 <= --n-min <= --n-max, got {} and {}",
            args.n_min, args.n_max
        )));
    }
    if args.eig_index == 0 {
        return Err(Error::Config("--eig-index must be at least 1".into()));
    }
    let problem = load_problem(args)?;
    let n_values: Vec<usize> = (args.n_min..=args.n_max).collect();
    let records = if args.compare {
        if args.method.is_some() || args.balanced {
            eprintln!("slsolve: --compare runs every method; --method and --balanced are ignored");
        }
        compare_methods(&problem, &n_values, args.eig_index)?
    } else {
        let method = resolve_method(args, &problem)?;
        convergence_study(&problem, method, &n_values, &[args.eig_index])?
    };
    write_csv(&records, &args.output)?;
    eprintln!(
        "slsolve: wrote {} records to {}",
        records.len(),
        args.output.display()
    );
    if args.rate_fit {
        report_rate_fits(&records)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slsolve: {e}");
            ExitCode::from(if e.is_configuration() { 2 } else { 3 })
        }
    }
}
