//! Parameter sweeps over `(x, y, ρ)` cells.

use std::path::{Path, PathBuf};

use serde::Serialize;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use smooth_moments::exponents::rational_from_f64;
use smooth_moments::moments::alias_free_grid;
use smooth_moments::{
    arc_decompose, classify_theta, compare, cor_energy_bound, even_moment_exact, exponent_params,
    harper_mvt_bound, moment_quadrature, moment_refined, optimal_q, saddle_alpha, sieve_smooth,
    skeleton_baker, skeleton_ft, skeleton_harper, sunit_bound, thm1_bound, thm2_bound, trivial_bound,
    y_from_k, BoundId, BoundReport, Error, ExactParams, Moment64, Rational, Skeleton64, SmoothSet,
};

use crate::config::{ArcSplitSpec, ExperimentConfig, Format, GridPolicy, QRule, Smoothness, AUTO_REL_TOL};
use crate::error::{HarnessError, Result};
use crate::number::{fmt17, RationalValue};
use crate::rows::{self, ArcRow, Flags, ResultRow, SkeletonRow, SCHEMA_VERSION};

/// Overrides the number of worker threads.
pub const THREADS_ENV: &str = "SMOOTH_MOMENTS_THREADS";

#[derive(Clone, Debug, Default)]
pub struct SweepOutput {
    pub results: Vec<ResultRow>,
    pub arcs: Vec<ArcRow>,
    pub skeletons: Vec<SkeletonRow>,
}

/// Thread count requested through [`THREADS_ENV`], if any.
pub fn thread_override() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(HarnessError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Runs `f` on a pool sized by [`THREADS_ENV`], or on the global pool.
pub fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    match thread_override()? {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Computes every row and writes the requested files under `config.output`.
pub fn run_config(config: &ExperimentConfig) -> Result<SweepOutput> {
    let out = compute(config)?;
    write_outputs(config, &out)?;
    Ok(out)
}

/// Computes every row without touching the filesystem.
///
/// Cells run in parallel; rows come back in `(x, smoothness, ρ, bound)`
/// order regardless of scheduling.
pub fn compute(config: &ExperimentConfig) -> Result<SweepOutput> {
    config.validate()?;
    let columns = columns(config);
    let parts: Vec<SweepOutput> =
        with_pool(|| columns.par_iter().enumerate().map(|(i, c)| run_column(config, i, c)).collect())?;
    let mut out = SweepOutput::default();
    for part in parts {
        out.results.extend(part.results);
        out.arcs.extend(part.arcs);
        out.skeletons.extend(part.skeletons);
    }
    Ok(out)
}

/// Writes the output files and returns their paths.
pub fn write_outputs(config: &ExperimentConfig, out: &SweepOutput) -> Result<Vec<PathBuf>> {
    let dir = &config.output;
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::new();
    let resolved = serde_json::to_string_pretty(config).expect("config serializes") + "\n";
    let path = dir.join("config.json");
    std::fs::write(&path, resolved).map_err(|e| HarnessError::io(&path, e))?;
    written.push(path);

    for format in [Format::Csv, Format::Jsonl] {
        if !config.formats.contains(&format) {
            continue;
        }
        written.push(emit(&out.results, dir, "results", format)?);
        if !config.arc_splits.is_empty() {
            written.push(emit(&out.arcs, dir, "arcs", format)?);
        }
        if config.theta_samples > 0 {
            written.push(emit(&out.skeletons, dir, "skeletons", format)?);
        }
    }
    if config.formats.contains(&Format::Svg) {
        let source = if config.formats.contains(&Format::Csv) {
            dir.join("results.csv")
        } else {
            dir.join("results.jsonl")
        };
        let persisted = rows::read_rows(&source)?;
        let path = dir.join("figure.svg");
        std::fs::write(&path, crate::plot::render_svg(&persisted)).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn emit<R: Serialize>(rows: &[R], dir: &Path, stem: &str, format: Format) -> Result<PathBuf> {
    let path = match format {
        Format::Jsonl => dir.join(format!("{stem}.jsonl")),
        _ => dir.join(format!("{stem}.csv")),
    };
    match format {
        Format::Jsonl => rows::write_jsonl(rows, &path)?,
        _ => rows::write_csv(rows, &path)?,
    }
    Ok(path)
}

/// One `(x, y)` pair and the `K` it came from.
#[derive(Clone, Debug)]
struct Column {
    x: u64,
    y: u64,
    k: KSource,
}

#[derive(Clone, Debug)]
enum KSource {
    Given(RationalValue),
    /// `ln y / ln ln x`, for configs that fix `y` directly.
    Derived(f64),
    Unknown,
}

impl KSource {
    fn text(&self) -> String {
        match self {
            KSource::Given(k) => k.to_string(),
            KSource::Derived(k) => fmt17(*k),
            KSource::Unknown => String::new(),
        }
    }

    fn rational(&self) -> Option<Rational> {
        match self {
            KSource::Given(k) => Some(k.0.clone()),
            KSource::Derived(k) => rational_from_f64(*k).ok(),
            KSource::Unknown => None,
        }
    }
}

fn columns(config: &ExperimentConfig) -> Vec<Column> {
    let mut out = Vec::new();
    for &x in &config.x_values {
        match &config.smoothness {
            Smoothness::YValues(ys) => out.extend(ys.iter().map(|&y| Column { x, y, k: derived_k(x, y) })),
            Smoothness::KValues(ks) => out.extend(ks.iter().map(|k| Column {
                x,
                y: y_from_k(x, k.approx()),
                k: KSource::Given(k.clone()),
            })),
        }
    }
    out
}

fn derived_k(x: u64, y: u64) -> KSource {
    let lnln = (x as f64).ln().ln();
    if y >= 2 && lnln > 0.0 {
        KSource::Derived((y as f64).ln() / lnln)
    } else {
        KSource::Unknown
    }
}

/// Everything attached to one `(x, y)` column.
fn run_column(config: &ExperimentConfig, index: usize, col: &Column) -> SweepOutput {
    let start = Instant::now();
    let set = sieve_smooth(col.x, col.y);
    let sieve_ms = start.elapsed().as_secs_f64() * 1e3;
    let parts: Vec<(Vec<ResultRow>, Vec<ArcRow>)> = config
        .rho_values
        .par_iter()
        .map(|rho| match &set {
            Ok(set) => run_cell(config, col, set, rho, sieve_ms),
            Err(e) => (failed_cell(config, col, rho, e), Vec::new()),
        })
        .collect();
    let mut out = SweepOutput::default();
    for (results, arcs) in parts {
        out.results.extend(results);
        out.arcs.extend(arcs);
    }
    if let Ok(set) = &set {
        out.skeletons = skeletons(config, index, col, set);
    }
    out
}

fn base_row(col: &Column, rho: &RationalValue) -> ResultRow {
    ResultRow {
        schema_version: SCHEMA_VERSION,
        x: col.x,
        y: col.y,
        k: col.k.text(),
        alpha: saddle_alpha(col.x as f64, col.y as f64).unwrap_or(f64::NAN),
        psi: 0,
        rho: rho.to_string(),
        moment: f64::NAN,
        moment_exact: String::new(),
        method: String::new(),
        grid_n: 0,
        error_estimate: f64::NAN,
        x_exponent: f64::NAN,
        psi_exponent: f64::NAN,
        bound_id: String::new(),
        bound_total: f64::NAN,
        bound_x_exponent: f64::NAN,
        ratio: f64::NAN,
        valid: false,
        nontrivial: None,
        flags: String::new(),
        timing_ms: 0.0,
    }
}

fn base_flags(col: &Column) -> Flags {
    let mut flags = Flags::default();
    match col.k {
        KSource::Derived(_) => flags.push("k_derived"),
        KSource::Unknown => flags.push("k_unknown"),
        KSource::Given(_) => {}
    }
    flags
}

fn error_flag(e: &Error) -> String {
    let kind = match e {
        Error::Capacity { .. } => "capacity",
        Error::Domain(_) => "domain",
        Error::Argument(_) => "argument",
        Error::Validity(_) => "validity",
        Error::Convergence { .. } => "convergence",
    };
    format!("error:{kind}: {e}")
}

fn failed_cell(config: &ExperimentConfig, col: &Column, rho: &RationalValue, e: &Error) -> Vec<ResultRow> {
    config
        .bounds
        .iter()
        .map(|b| {
            let mut row = base_row(col, rho);
            row.bound_id = b.as_str().to_string();
            let mut flags = base_flags(col);
            flags.push(error_flag(e));
            row.finish(flags);
            row
        })
        .collect()
}

/// The moment under the configured grid policy, and whether the exact path
/// had to fall back to a grid.
fn compute_moment(set: &SmoothSet, rho: &RationalValue, policy: GridPolicy) -> (smooth_moments::Result<Moment64>, bool) {
    let r = rho.approx();
    match (policy, rho.even_half()) {
        (GridPolicy::Auto, Some(s)) => match even_moment_exact(set, s) {
            Err(Error::Capacity { .. }) => (moment_quadrature(set, r, alias_free_grid(set.x(), u64::from(s))), true),
            other => (other, false),
        },
        (GridPolicy::Exact, Some(s)) => (even_moment_exact(set, s), false),
        (GridPolicy::Exact, None) => (Err(Error::Argument(format!("exact moment needs even rho, got {rho}"))), false),
        (GridPolicy::Auto, None) => (moment_refined(set, r, AUTO_REL_TOL), false),
        (GridPolicy::Fixed(n), _) => (moment_quadrature(set, r, n), false),
        (GridPolicy::Refined(tol), _) => (moment_refined(set, r, tol), false),
    }
}

fn log_ratio(v: f64, base: u64) -> f64 {
    if base > 1 && v > 0.0 {
        v.ln() / (base as f64).ln()
    } else {
        f64::NAN
    }
}

fn run_cell(
    config: &ExperimentConfig,
    col: &Column,
    set: &SmoothSet,
    rho: &RationalValue,
    sieve_ms: f64,
) -> (Vec<ResultRow>, Vec<ArcRow>) {
    let start = Instant::now();
    let psi = set.count();
    let params: Option<smooth_moments::Result<ExactParams>> =
        col.k.rational().map(|k| exponent_params(k, rho.0.clone(), config.epsilon));
    let (moment, fell_back) = compute_moment(set, rho, config.grid_policy);
    let timing = if config.record_timing {
        sieve_ms + start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };

    let mut template = base_row(col, rho);
    template.psi = psi;
    template.timing_ms = timing;
    let mut cell_flags = base_flags(col);
    if fell_back {
        cell_flags.push("exact_capacity_fallback_grid");
    }
    match &moment {
        Ok(m) => {
            template.moment = m.value;
            template.moment_exact = m.exact.map(|e| e.to_string()).unwrap_or_default();
            template.method = m.method.as_str().to_string();
            template.grid_n = m.grid as u64;
            template.error_estimate = m.error_estimate;
            template.x_exponent = log_ratio(m.value, col.x);
            template.psi_exponent = log_ratio(m.value, psi);
        }
        Err(e) => cell_flags.push(error_flag(e)),
    }
    if let Some(Ok(p)) = &params {
        if !p.in_theory() {
            cell_flags.push("out_of_theory");
        }
    }

    let mut results = Vec::with_capacity(config.bounds.len());
    for &bound in &config.bounds {
        let mut row = template.clone();
        row.bound_id = bound.as_str().to_string();
        let mut flags = cell_flags.clone();
        let report = evaluate_bound(config, col, psi, rho, bound, params.as_ref(), &mut flags);
        if let Some(report) = report {
            let report = match &moment {
                Ok(m) => match compare(&report, m) {
                    Ok(with_ratio) => with_ratio,
                    Err(e) => {
                        flags.push(if matches!(e, Error::Validity(_)) {
                            "trivial_exceeded".to_string()
                        } else {
                            error_flag(&e)
                        });
                        report
                    }
                },
                Err(_) => report,
            };
            row.bound_total = report.total;
            row.bound_x_exponent = report.x_exponent.unwrap_or_else(|| log_ratio(report.total, col.x));
            row.ratio = report.ratio.unwrap_or(f64::NAN);
            row.valid = report.valid;
            row.nontrivial = report.nontrivial;
            if report.overflow {
                flags.push("overflow");
            }
            for reason in &report.reasons {
                flags.push(reason.clone());
            }
        }
        row.finish(flags);
        results.push(row);
    }

    let arcs = config
        .arc_splits
        .iter()
        .map(|spec| arc_row(col, set, rho, params.as_ref(), spec))
        .collect();
    (results, arcs)
}

fn evaluate_bound(
    config: &ExperimentConfig,
    col: &Column,
    psi: u64,
    rho: &RationalValue,
    bound: BoundId,
    params: Option<&smooth_moments::Result<ExactParams>>,
    flags: &mut Flags,
) -> Option<BoundReport> {
    let r = rho.approx();
    let with_params = |flags: &mut Flags, f: &dyn Fn(&ExactParams) -> BoundReport| match params {
        None => {
            flags.push("not_applicable:k_unknown");
            None
        }
        Some(Err(e)) => {
            flags.push(error_flag(e));
            None
        }
        Some(Ok(p)) => Some(f(p)),
    };
    match bound {
        BoundId::Trivial => Some(trivial_bound(r, psi)),
        BoundId::HarperMvt => Some(harper_mvt_bound(r, psi, col.x, Some(col.y), config.harper_k)),
        BoundId::SUnit => match rho.even_half() {
            Some(s) => Some(sunit_bound(s, psi, col.y, config.sunit_c)),
            None => {
                flags.push("not_applicable:rho_not_even");
                None
            }
        },
        BoundId::Thm1 => with_params(flags, &|p| thm1_bound(col.x, psi, p)),
        BoundId::Thm2 => with_params(flags, &|p| thm2_bound(col.x, psi, p)),
        BoundId::CorEnergy => {
            if rho.even_half() != Some(2) {
                flags.push("not_applicable:rho_not_4");
                return None;
            }
            with_params(flags, &|p| cor_energy_bound(psi, p))
        }
    }
}

fn arc_row(
    col: &Column,
    set: &SmoothSet,
    rho: &RationalValue,
    params: Option<&smooth_moments::Result<ExactParams>>,
    spec: &ArcSplitSpec,
) -> ArcRow {
    let r = rho.approx();
    let grid = spec
        .grid
        .unwrap_or_else(|| alias_free_grid(col.x, (r / 2.0).ceil().max(1.0) as u64));
    let mut row = ArcRow {
        schema_version: SCHEMA_VERSION,
        x: col.x,
        y: col.y,
        k: col.k.text(),
        psi: set.count(),
        rho: rho.to_string(),
        split: spec.split.as_str().to_string(),
        big_q: f64::NAN,
        split_q: f64::NAN,
        grid_n: grid as u64,
        total: f64::NAN,
        part1: f64::NAN,
        part2: f64::NAN,
        sharp_part: f64::NAN,
        flat_part: f64::NAN,
        arcs: 0,
        top_a: 0,
        top_q: 0,
        top_share: f64::NAN,
        flags: String::new(),
    };
    let mut flags = base_flags(col);
    let outcome = match params {
        None => Err(Error::Argument("K is unknown".into())),
        Some(Err(e)) => Err(e.clone()),
        Some(Ok(p)) => {
            let big_q = match spec.q {
                QRule::Optimal => optimal_q(col.x, p, spec.split),
                QRule::Fixed(q) => Ok(q),
            };
            big_q.and_then(|q| {
                row.big_q = q;
                arc_decompose::<f64, Rational>(set, r, q, grid, p, spec.split)
            })
        }
    };
    match outcome {
        Ok(d) => {
            row.split_q = d.split_q;
            row.total = d.total;
            row.part1 = d.part1;
            row.part2 = d.part2;
            row.sharp_part = d.sharp_part;
            row.flat_part = d.flat_part;
            row.arcs = d.per_arc.len() as u64;
            if let Some(top) = d
                .per_arc
                .iter()
                .reduce(|best, a| if a.contribution > best.contribution { a } else { best })
            {
                row.top_a = top.a;
                row.top_q = top.q;
                row.top_share = top.contribution / d.total;
            }
        }
        Err(e) => flags.push(error_flag(&e)),
    }
    flags.nonfinite(&[
        ("big_q", row.big_q),
        ("split_q", row.split_q),
        ("total", row.total),
        ("part1", row.part1),
        ("part2", row.part2),
        ("sharp_part", row.sharp_part),
        ("flat_part", row.flat_part),
        ("top_share", row.top_share),
    ]);
    row.flags = flags.join();
    row
}

/// Pointwise skeletons at `theta_samples` seeded random points, classified
/// with `Q = x^{1/2+ε}`. Column `i` draws from stream `i` of the seed.
fn skeletons(config: &ExperimentConfig, index: usize, col: &Column, set: &SmoothSet) -> Vec<SkeletonRow> {
    if config.theta_samples == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let big_q = (col.x as f64).powf(0.5 + config.epsilon);
    let params = col
        .k
        .rational()
        .and_then(|k| exponent_params(k, config.rho_values[0].0.clone(), config.epsilon).ok());
    let mut out = Vec::new();
    for sample in 0..config.theta_samples as u64 {
        let theta: f64 = rng.gen();
        let mut reports: Vec<smooth_moments::Result<Skeleton64>> = Vec::new();
        let label = classify_theta(theta, big_q, col.x);
        match &label {
            Ok(l) => {
                let a = l.a as i64;
                reports.push(skeleton_ft(theta, a, l.q, set));
                if let Some(p) = &params {
                    reports.push(skeleton_harper(theta, a, l.q, set, p));
                    reports.push(skeleton_baker(theta, a, l.q, set, p));
                }
            }
            Err(e) => reports.push(Err(e.clone())),
        }
        for report in reports {
            let mut flags = base_flags(col);
            let mut row = SkeletonRow {
                schema_version: SCHEMA_VERSION,
                x: col.x,
                y: col.y,
                k: col.k.text(),
                psi: set.count(),
                sample,
                theta,
                a: 0,
                q: 0,
                big_q,
                l: f64::NAN,
                lemma: String::new(),
                value: f64::NAN,
                modulus: f64::NAN,
                ratio: f64::NAN,
                valid: false,
                out_of_theory: false,
                flags: String::new(),
            };
            match report {
                Ok(s) => {
                    row.a = s.a;
                    row.q = s.q;
                    row.l = s.l;
                    row.lemma = s.lemma.as_str().to_string();
                    row.value = s.value;
                    row.modulus = s.modulus;
                    row.ratio = s.ratio;
                    row.valid = s.valid;
                    row.out_of_theory = s.out_of_theory;
                }
                Err(e) => flags.push(error_flag(&e)),
            }
            flags.nonfinite(&[("l", row.l), ("value", row.value), ("modulus", row.modulus), ("ratio", row.ratio)]);
            row.flags = flags.join();
            out.push(row);
        }
    }
    out
}
