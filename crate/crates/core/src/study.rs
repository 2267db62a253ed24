//! Convergence studies, method comparison, rate fitting and CSV records.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::eigen::{assemble, solve_generalized, Spectrum};
use crate::error::{Error, Result};
use crate::mesh::{de_mesh, de_mesh_symmetric, se_mesh, MeshConfig};
use crate::problems::{builtin_singular, singular_default_kappa, SturmLiouvilleProblem};
use crate::transform::{DecayKind, IntervalKind};

/// Errors below this are treated as the double-precision floor.
pub const ERROR_FLOOR: f64 = 1e-13;

/// Minimum number of usable records for [`rate_fit`].
pub const MIN_FIT_RECORDS: usize = 5;

/// Discretization used for one series of a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Se,
    /// DE map with `M = N`.
    De,
    /// DE map with the left/right truncation balanced by the decay constants.
    DeBalanced,
    /// Balanced DE on a problem whose map scale was adapted to its singularities.
    DeAdapted,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Se => "se",
            Method::De => "de",
            Method::DeBalanced => "de-balanced",
            Method::DeAdapted => "de-adapted",
        }
    }

    pub fn decay(self) -> DecayKind {
        match self {
            Method::Se => DecayKind::Se,
            _ => DecayKind::De,
        }
    }

    fn mesh(self, problem: &SturmLiouvilleProblem, n: usize) -> Result<MeshConfig> {
        let profile = problem.profile(self.decay())?;
        match self {
            Method::Se => se_mesh(&profile, n),
            Method::De => de_mesh_symmetric(&profile, n),
            Method::DeBalanced | Method::DeAdapted => de_mesh(&profile, n),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "se" => Ok(Method::Se),
            "de" => Ok(Method::De),
            "de-balanced" => Ok(Method::DeBalanced),
            "de-adapted" => Ok(Method::DeAdapted),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// One eigenvalue approximation from one discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRecord {
    pub method: Method,
    pub problem: String,
    /// Governing truncation index.
    pub n: usize,
    pub m_left: usize,
    pub n_right: usize,
    pub h: f64,
    pub size: usize,
    pub eig_index: usize,
    pub mu: f64,
    pub abs_error: Option<f64>,
    pub succ_error: Option<f64>,
    pub runtime_ms: f64,
}

impl StudyRecord {
    /// The available error estimate, absolute error first.
    pub fn error(&self) -> Option<f64> {
        self.abs_error.or(self.succ_error)
    }
}

/// Mesh and spectrum of `problem` discretized by `method` at governing index `n`.
pub fn solve_problem(
    problem: &SturmLiouvilleProblem,
    method: Method,
    n: usize,
    vectors: bool,
) -> Result<(MeshConfig, Spectrum)> {
    let tp = problem.transformed(method.decay())?;
    let mesh = method.mesh(problem, n)?;
    let sys = assemble(&tp, &mesh)?;
    Ok((mesh, solve_generalized(&sys, vectors)?))
}

struct Solve {
    n: usize,
    mesh: MeshConfig,
    eigenvalues: Vec<f64>,
    runtime_ms: f64,
}

/// Solve `problem` for every `n` in `n_values` (strictly ascending) and
/// report the eigenvalues listed in `eig_indices` (1-based, ascending order
/// of the spectrum).
///
/// Each record carries `abs_error` when the problem has a reference
/// eigenvalue and otherwise `succ_error` against the previous `n` for the
/// same index. An index beyond the matrix size at some `n` produces no
/// record for that `n`. Solves for distinct `n` run in parallel.
pub fn convergence_study(
    problem: &SturmLiouvilleProblem,
    method: Method,
    n_values: &[usize],
    eig_indices: &[usize],
) -> Result<Vec<StudyRecord>> {
    if n_values.is_empty() {
        return Err(Error::domain("n range is empty"));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("n values must be strictly ascending"));
    }
    if eig_indices.is_empty() || eig_indices.contains(&0) {
        return Err(Error::domain("eigenvalue indices must be >= 1"));
    }
    let tp = problem.transformed(method.decay())?;
    let annotate = |n: usize| {
        let problem = problem.name.clone();
        move |source: Error| Error::Study {
            problem,
            method: method.label().to_string(),
            n,
            source: Box::new(source),
        }
    };

    let solves: Vec<Solve> = n_values
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let mesh = method.mesh(problem, n).map_err(annotate(n))?;
            let sys = assemble(&tp, &mesh).map_err(annotate(n))?;
            let spectrum = solve_generalized(&sys, false).map_err(annotate(n))?;
            Ok(Solve {
                n,
                mesh,
                eigenvalues: spectrum.eigenvalues,
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect::<Result<_>>()?;

    let references: Vec<Option<f64>> = eig_indices
        .iter()
        .map(|&i| problem.reference_eigenvalue(i))
        .collect();
    let mut previous: Vec<Option<f64>> = vec![None; eig_indices.len()];
    let mut records = Vec::with_capacity(solves.len() * eig_indices.len());
    for solve in &solves {
        for (slot, &index) in eig_indices.iter().enumerate() {
            let Some(&mu) = solve.eigenvalues.get(index - 1) else {
                continue;
            };
            let (abs_error, succ_error) = match references[slot] {
                Some(reference) => (Some((mu - reference).abs()), None),
                None => (None, previous[slot].map(|p: f64| (mu - p).abs())),
            };
            previous[slot] = Some(mu);
            records.push(StudyRecord {
                method,
                problem: problem.name.clone(),
                n: solve.n,
                m_left: solve.mesh.m,
                n_right: solve.mesh.n,
                h: solve.mesh.h,
                size: solve.mesh.size(),
                eig_index: index,
                mu,
                abs_error,
                succ_error,
                runtime_ms: solve.runtime_ms,
            });
        }
    }
    Ok(records)
}

/// Series compared for a problem: the problem itself under each method.
fn comparison_series(
    problem: &SturmLiouvilleProblem,
) -> Result<Vec<(Method, SturmLiouvilleProblem)>> {
    let adaptable = problem.name == "singular"
        && problem.interval == IntervalKind::RealLine
        && problem.params.contains_key("kappa");
    if adaptable {
        let kappa = problem.de_map.kappa();
        let adapted = if kappa != 1.0 {
            problem.clone()
        } else {
            builtin_singular(singular_default_kappa())?
        };
        return Ok(vec![
            (Method::Se, problem.clone()),
            (Method::De, builtin_singular(1.0)?),
            (Method::DeAdapted, adapted),
        ]);
    }
    let mut series = Vec::new();
    if problem.se_profile.is_some() {
        series.push((Method::Se, problem.clone()));
    }
    series.push((Method::De, problem.clone()));
    series.push((Method::DeBalanced, problem.clone()));
    Ok(series)
}

/// Run every applicable method on `problem` and merge the records ordered
/// by matrix size. Each series keeps only the first record of a given size.
///
/// Series: `se`, `de` and `de-balanced`; for the built-in singular problem
/// `se`, `de` (unit map scale) and `de-adapted` (scaled map).
pub fn compare_methods(
    problem: &SturmLiouvilleProblem,
    n_values: &[usize],
    eig_index: usize,
) -> Result<Vec<StudyRecord>> {
    let mut merged = Vec::new();
    for (method, variant) in comparison_series(problem)? {
        let mut records = convergence_study(&variant, method, n_values, &[eig_index])?;
        records.dedup_by_key(|r| r.size);
        merged.extend(records);
    }
    merged.sort_by_key(|r| (r.size, r.method));
    Ok(merged)
}

/// Smallest error of each series over matrix sizes every series reached.
pub fn errors_at_common_size(records: &[StudyRecord]) -> Vec<(Method, f64)> {
    let mut methods: Vec<Method> = records.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    let common = methods
        .iter()
        .map(|&m| {
            records
                .iter()
                .filter(|r| r.method == m)
                .map(|r| r.size)
                .max()
                .unwrap_or(0)
        })
        .min()
        .unwrap_or(0);
    methods
        .into_iter()
        .filter_map(|m| {
            records
                .iter()
                .filter(|r| r.method == m && r.size <= common)
                .filter_map(StudyRecord::error)
                .min_by(f64::total_cmp)
                .map(|e| (m, e))
        })
        .collect()
}

/// Least-squares fit of `ln(error)` against `n / ln(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Negated slope: the fitted decay rate.
    pub kappa_hat: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Number of records that entered the fit.
    pub used: usize,
}

/// Fit the decay rate of the errors in `records`. Records without an error,
/// with `n < 2`, or with an error below [`ERROR_FLOOR`] are skipped.
pub fn rate_fit(records: &[StudyRecord]) -> Result<RateFit> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.n >= 2)
        .filter_map(|r| {
            let e = r.error()?;
            (e >= ERROR_FLOOR && e.is_finite()).then(|| {
                let n = r.n as f64;
                (n / n.ln(), e.ln())
            })
        })
        .collect();
    if points.len() < MIN_FIT_RECORDS {
        return Err(Error::InsufficientData {
            usable: points.len(),
            needed: MIN_FIT_RECORDS,
        });
    }
    let k = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData {
            usable: 1,
            needed: MIN_FIT_RECORDS,
        });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        0.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        kappa_hat: -slope,
        intercept,
        r_squared,
        used: points.len(),
    })
}

/// Leading part of a series before its errors reach their noise floor: up to
/// and including the first record within a factor 10 of the smallest error
/// (or of [`ERROR_FLOOR`], whichever is larger).
pub fn pre_plateau(records: &[StudyRecord]) -> &[StudyRecord] {
    let Some(min) = records
        .iter()
        .filter_map(StudyRecord::error)
        .min_by(f64::total_cmp)
    else {
        return &records[..0];
    };
    let level = 10.0 * min.max(ERROR_FLOOR);
    match records
        .iter()
        .position(|r| r.error().is_some_and(|e| e <= level))
    {
        Some(i) => &records[..=i],
        None => records,
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "method",
    "problem",
    "n",
    "M",
    "N",
    "h",
    "size",
    "eig_index",
    "mu",
    "abs_error",
    "succ_error",
    "runtime_ms",
];

fn float_field(v: f64) -> String {
    format!("{v:.16e}")
}

fn optional_field(v: Option<f64>) -> String {
    v.map(float_field).unwrap_or_default()
}

/// Write `records` as CSV with 17 significant digits per float.
pub fn emit_csv<W: Write>(records: &[StudyRecord], destination: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(destination);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.method.label().to_string(),
            r.problem.clone(),
            r.n.to_string(),
            r.m_left.to_string(),
            r.n_right.to_string(),
            float_field(r.h),
            r.size.to_string(),
            r.eig_index.to_string(),
            float_field(r.mu),
            optional_field(r.abs_error),
            optional_field(r.succ_error),
            float_field(r.runtime_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// [`emit_csv`] to a file, replacing any existing content.
pub fn write_csv(records: &[StudyRecord], path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    emit_csv(records, std::io::BufWriter::new(file))
}

fn field<T: FromStr>(row: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = row.get(i).unwrap_or_default();
    raw.parse().map_err(|_| Error::Parse {
        line,
        column: i + 1,
        message: format!("invalid {} value '{raw}'", CSV_HEADER[i]),
    })
}

fn optional(row: &csv::StringRecord, i: usize, line: usize) -> Result<Option<f64>> {
    if row.get(i).unwrap_or_default().is_empty() {
        Ok(None)
    } else {
        field(row, i, line).map(Some)
    }
}

/// Read records written by [`emit_csv`]. Column positions in the error refer
/// to CSV fields.
pub fn read_csv<R: Read>(source: R) -> Result<Vec<StudyRecord>> {
    let mut reader = csv::Reader::from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "unexpected CSV header".into(),
        });
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        out.push(StudyRecord {
            method: row
                .get(0)
                .unwrap_or_default()
                .parse()
                .map_err(|_| Error::Parse {
                    line,
                    column: 1,
                    message: "invalid method".into(),
                })?,
            problem: row.get(1).unwrap_or_default().to_string(),
            n: field(&row, 2, line)?,
            m_left: field(&row, 3, line)?,
            n_right: field(&row, 4, line)?,
            h: field(&row, 5, line)?,
            size: field(&row, 6, line)?,
            eig_index: field(&row, 7, line)?,
            mu: field(&row, 8, line)?,
            abs_error: optional(&row, 9, line)?,
            succ_error: optional(&row, 10, line)?,
            runtime_ms: field(&row, 11, line)?,
        });
    }
    Ok(out)
}
