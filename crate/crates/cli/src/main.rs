use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use smooth_moments::exponents::rational_from_f64;
use smooth_moments::moments::alias_free_grid;
use smooth_moments::{
    arc_decompose, classify_theta, compare, cor_energy_bound, corollary_consistency_check, energy, eval_s,
    even_moment_exact, exponent_params, harper_mvt_bound, moment_quadrature, moment_refined, optimal_q,
    parse_rational, psi, sieve_smooth, sunit_bound, thm1_bound, thm2_bound, trivial_bound, BoundId,
    BoundReport, Error, ExactParams, Exponent, Moment64, Rational, SmoothSet, SplitRule,
};
use smooth_moments_cli::config::AUTO_REL_TOL;
use smooth_moments_cli::number::{fmt17, RationalValue};
use smooth_moments_cli::{plot, read_rows, run_config, ExperimentConfig, HarnessError};

type Result<T> = std::result::Result<T, HarnessError>;

/// Appends a line to the output buffer, which `main` writes in one go.
macro_rules! say {
    ($out:expr, $($arg:tt)*) => {{
        let _ = writeln!($out, $($arg)*);
    }};
}

/// Smooth numbers, exponential sums over them, and their moments.
#[derive(Parser)]
#[command(name = "smooth-moments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the y-smooth integers in [1, x], one per line.
    Sieve { x: u64, y: u64 },
    /// Count the y-smooth integers in [1, x].
    Psi { x: u64, y: u64 },
    /// Evaluate S(theta) over the y-smooth integers up to x.
    Expsum { theta: String, x: u64, y: u64 },
    /// Moment of |S|^rho; exact for even rho, refined quadrature otherwise.
    Moment {
        x: u64,
        y: u64,
        rho: String,
        /// Riemann sum on N equispaced nodes.
        #[arg(long, value_name = "N", group = "method")]
        grid: Option<usize>,
        /// Exact count of additive solutions (even rho only).
        #[arg(long, group = "method")]
        exact: bool,
        /// Double the grid until successive values agree to this relative tolerance.
        #[arg(long, value_name = "TOL", group = "method")]
        refined: Option<f64>,
    },
    /// Additive energy, the exact fourth moment.
    Energy { x: u64, y: u64 },
    /// Dirichlet arcs.
    #[command(subcommand)]
    Arcs(ArcsCommand),
    /// Mean-value bounds.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Exact exponent system for (K, rho) and the corollary identities.
    Identities {
        k: String,
        rho: String,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
    },
    /// Run a JSON-configured sweep.
    Sweep {
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot persisted result rows (CSV or JSONL).
    Plot {
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Emit a gnuplot script instead of SVG (implied by a .gp or .gnuplot extension).
        #[arg(long)]
        gnuplot: bool,
    },
}

#[derive(Subcommand)]
enum ArcsCommand {
    /// Smallest q with |theta - a/q| < 1/(qQ).
    Classify { theta: String, q: f64, x: u64 },
    /// Split the grid moment by arc.
    Decompose {
        x: u64,
        y: u64,
        rho: String,
        /// A number, or `opt` for the split's own choice.
        q: String,
        #[arg(long)]
        split: SplitRule,
        /// Defaults to ln y / ln ln x.
        #[arg(long)]
        k: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Defaults to the alias-free size for ceil(rho/2).
        #[arg(long)]
        grid: Option<usize>,
        /// Also list every arc's contribution.
        #[arg(long)]
        per_arc: bool,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Evaluate bounds against the computed moment.
    Report {
        x: u64,
        y: u64,
        rho: String,
        k: String,
        /// Exit 3 if K <= 3 or any evaluated bound fails its validity predicates.
        #[arg(long)]
        strict: bool,
        /// Restrict to these bounds (repeatable); defaults to all that apply.
        #[arg(long = "bound", value_name = "ID")]
        bounds: Vec<BoundId>,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        harper_k: f64,
        #[arg(long, default_value_t = 1.0)]
        sunit_c: f64,
    },
}

fn rational(text: &str) -> Result<Rational> {
    Ok(parse_rational(text)?)
}

fn real(text: &str) -> Result<f64> {
    Ok(rational(text)?.approx())
}

fn sieve(x: u64, y: u64) -> Result<SmoothSet> {
    Ok(sieve_smooth(x, y)?)
}

fn print_moment(out: &mut String, m: &Moment64) {
    match m.exact {
        Some(e) => say!(out, "{e}"),
        None => say!(out, "{}", fmt17(m.value)),
    }
    say!(out, "method = {}", m.method.as_str());
    say!(out, "grid = {}", m.grid);
    say!(out, "error_estimate = {}", fmt17(m.error_estimate));
    say!(out, "psi = {}", m.psi);
}

fn auto_moment(set: &SmoothSet, rho: &RationalValue) -> Result<Moment64> {
    let r = rho.approx();
    Ok(match rho.even_half() {
        Some(s) => match even_moment_exact(set, s) {
            Err(Error::Capacity { .. }) => moment_quadrature(set, r, alias_free_grid(set.x(), u64::from(s)))?,
            other => other?,
        },
        None => moment_refined(set, r, AUTO_REL_TOL)?,
    })
}

fn derived_k(x: u64, y: u64) -> Result<Rational> {
    let lnln = (x as f64).ln().ln();
    if !(y >= 2 && lnln > 0.0) {
        return Err(Error::Argument("cannot derive K from y; pass --k".into()).into());
    }
    Ok(rational_from_f64((y as f64).ln() / lnln)?)
}

fn print_report(out: &mut String, r: &BoundReport) {
    let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_else(|| "-".into());
    let nontrivial = r.nontrivial.map_or("-", |b| if b { "true" } else { "false" });
    say!(out, 
        "{}\t{}\t{}\t{}\t{}\t{}",
        r.bound_id.as_str(),
        fmt17(r.total),
        opt(r.ratio),
        r.valid,
        nontrivial,
        r.reasons.join("; ")
    );
}

fn run(cli: Cli, out: &mut String) -> Result<()> {
    match cli.command {
        Command::Sieve { x, y } => {
            let set = sieve(x, y)?;
            out.reserve(set.members().len() * 8);
            for n in set.members() {
                say!(out, "{n}");
            }
        }
        Command::Psi { x, y } => say!(out, "{}", psi(x, y)?),
        Command::Expsum { theta, x, y } => {
            let set = sieve(x, y)?;
            let v = eval_s(real(&theta)?, &set);
            say!(out, "re = {}", fmt17(v.re));
            say!(out, "im = {}", fmt17(v.im));
            say!(out, "modulus = {}", fmt17(v.modulus));
            say!(out, "psi = {}", set.count());
        }
        Command::Moment { x, y, rho, grid, exact, refined } => {
            let rho = RationalValue(rational(&rho)?);
            let set = sieve(x, y)?;
            let m = if exact {
                let s = rho
                    .even_half()
                    .ok_or_else(|| Error::Argument(format!("--exact needs even rho, got {rho}")))?;
                even_moment_exact(&set, s)?
            } else if let Some(n) = grid {
                moment_quadrature(&set, rho.approx(), n)?
            } else if let Some(tol) = refined {
                moment_refined(&set, rho.approx(), tol)?
            } else {
                auto_moment(&set, &rho)?
            };
            print_moment(out, &m);
        }
        Command::Energy { x, y } => {
            let m = energy::<f64>(&sieve(x, y)?)?;
            print_moment(out, &m);
        }
        Command::Arcs(ArcsCommand::Classify { theta, q, x }) => {
            let label = classify_theta(real(&theta)?, q, x)?;
            say!(out, "{}/{}", label.a, label.q);
            say!(out, "distance = {}", fmt17(label.distance));
            say!(out, "halfwidth = {}", fmt17(label.halfwidth));
            say!(out, "sharp = {}", label.sharp);
            say!(out, "L = {}", fmt17(label.l));
        }
        Command::Arcs(ArcsCommand::Decompose { x, y, rho, q, split, k, epsilon, grid, per_arc }) => {
            let rho_q = rational(&rho)?;
            let k = match k {
                Some(k) => rational(&k)?,
                None => derived_k(x, y)?,
            };
            let params: ExactParams = exponent_params(k, rho_q.clone(), epsilon)?;
            let big_q = if q.eq_ignore_ascii_case("opt") || q.eq_ignore_ascii_case("optimal") {
                optimal_q(x, &params, split)?
            } else {
                real(&q)?
            };
            let r = rho_q.approx();
            let n = grid.unwrap_or_else(|| alias_free_grid(x, (r / 2.0).ceil().max(1.0) as u64));
            let set = sieve(x, y)?;
            let d = arc_decompose::<f64, Rational>(&set, r, big_q, n, &params, split)?;
            say!(out, "split = {}", d.split.as_str());
            say!(out, "Q = {}", fmt17(d.big_q));
            say!(out, "split_q = {}", fmt17(d.split_q));
            say!(out, "grid = {}", d.grid);
            say!(out, "total = {}", fmt17(d.total));
            say!(out, "part1 = {}", fmt17(d.part1));
            say!(out, "part2 = {}", fmt17(d.part2));
            say!(out, "sharp = {}", fmt17(d.sharp_part));
            say!(out, "flat = {}", fmt17(d.flat_part));
            say!(out, "arcs = {}", d.per_arc.len());
            if per_arc {
                say!(out, "q\ta\tcontribution\tsharp\tflat");
                for a in &d.per_arc {
                    say!(out, "{}\t{}\t{}\t{}\t{}", a.q, a.a, fmt17(a.contribution), fmt17(a.sharp), fmt17(a.flat));
                }
            }
        }
        Command::Bounds(BoundsCommand::Report { x, y, rho, k, strict, bounds, epsilon, harper_k, sunit_c }) => {
            let rho = RationalValue(rational(&rho)?);
            let params: ExactParams = exponent_params(rational(&k)?, rho.0.clone(), epsilon)?;
            let set = sieve(x, y)?;
            let moment = auto_moment(&set, &rho)?;
            let psi = set.count();
            let r = rho.approx();
            let wanted = if bounds.is_empty() { BoundId::ALL.to_vec() } else { bounds };
            say!(out, "x = {x}\ny = {y}\npsi = {psi}\nrho = {rho}\nK = {}", params.k);
            say!(out, "moment = {}\nmethod = {}", fmt17(moment.value), moment.method.as_str());
            say!(out, "bound\ttotal\tratio\tvalid\tnontrivial\tnotes");
            let mut reports = Vec::new();
            for id in wanted {
                let report = match id {
                    BoundId::Trivial => trivial_bound(r, psi),
                    BoundId::HarperMvt => harper_mvt_bound(r, psi, x, Some(y), harper_k),
                    BoundId::SUnit => match rho.even_half() {
                        Some(s) => sunit_bound(s, psi, y, sunit_c),
                        None => continue,
                    },
                    BoundId::Thm1 => thm1_bound(x, psi, &params),
                    BoundId::Thm2 => thm2_bound(x, psi, &params),
                    BoundId::CorEnergy if rho.even_half() == Some(2) => cor_energy_bound(psi, &params),
                    BoundId::CorEnergy => continue,
                };
                let report = compare(&report, &moment)?;
                print_report(out, &report);
                reports.push(report);
            }
            if strict {
                if !params.in_theory() {
                    return Err(Error::Validity(format!("K = {} is out of theory (K <= 3)", params.k)).into());
                }
                for report in reports {
                    report.strict()?;
                }
            }
        }
        Command::Identities { k, rho, epsilon } => {
            let params: ExactParams = exponent_params(rational(&k)?, rational(&rho)?, epsilon)?;
            let check = corollary_consistency_check(&params);
            let or_undefined = |v: &Option<Rational>| v.as_ref().map_or("undefined".to_string(), ToString::to_string);
            say!(out, "K = {}", params.k);
            say!(out, "rho = {}", params.rho);
            say!(out, "kappa = {}", params.kappa);
            say!(out, "beta = {}", params.beta);
            say!(out, "gamma = {}", params.gamma);
            say!(out, "eta = {}", params.eta);
            say!(out, "xi = {}", params.xi);
            say!(out, "zeta = {}", or_undefined(&params.zeta));
            say!(out, "3 - zeta = {}", or_undefined(&params.zeta.as_ref().map(|z| Rational::from_integer(3.into()) - z)));
            say!(out, "eta(rho=4) = {}", check.eta4);
            for f in &check.failures {
                say!(out, "failure: {f}");
            }
            if check.passed {
                say!(out, "PASS");
            } else {
                say!(out, "FAIL");
                return Err(Error::Validity("corollary identities fail".into()).into());
            }
        }
        Command::Sweep { config, out } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(out) = out {
                config.output = out;
            }
            let result = run_config(&config)?;
            eprintln!(
                "{} result rows, {} arc rows, {} skeleton rows written to {}",
                result.results.len(),
                result.arcs.len(),
                result.skeletons.len(),
                config.output.display()
            );
        }
        Command::Plot { results, out, gnuplot } => {
            let rows = read_rows(&results)?;
            let gnuplot = gnuplot || out.extension().is_some_and(|e| e == "gp" || e == "gnuplot");
            let text = if gnuplot {
                let target = out.with_extension("svg");
                plot::render_gnuplot(&rows, &target.to_string_lossy())
            } else {
                plot::render_svg(&rows)
            };
            std::fs::write(&out, text).map_err(|e| HarnessError::Io { path: out.clone(), source: e })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let mut out = String::new();
    let result = run(Cli::parse(), &mut out);
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(out.as_bytes()).and_then(|()| stdout.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
