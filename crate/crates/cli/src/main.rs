//! Command-line surface: evaluate bounds, trace enclosure boundaries,
//! classify boundary topology, compute truncated spectra, run the
//! verification suites, and probe the resolvent oracle.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/validation,
//! 3 numerical failure.

mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{merge, required, Config};
use dirac_spectra::enclosures::{
    classify_topology, f_q, g_p, h_q, holder_conjugate, in_l1_enclosure, in_region_d,
    l1_prefactor, psi_q, topology_thresholds, EnclosureKind, EnclosureSpec,
};
use dirac_spectra::linalg::mat2::Mat2C;
use dirac_spectra::operator::{build_truncated_dirac_banded, Potential};
use dirac_spectra::resolvent::{t_matrix, truncated_free_resolvent};
use dirac_spectra::spectral_map::{dist_to_spectrum, k_from_lambda, MassParam};
use dirac_spectra::tracer::{trace_enclosure_boundary, Grid};
use dirac_spectra::verify::{
    bs_equivalence_suite, gamma_optimality_samples, genuine_eigenvalues, optimal_potential_with_n,
    run_containment,
};
use dirac_spectra::{c64, Complex64, Error};

#[derive(Parser)]
#[command(
    name = "dirac-spectra",
    about = "Spectral enclosures for non-self-adjoint discrete Dirac operators",
    version
)]
struct Cli {
    /// Optional key = value config file; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a bound function at one spectral point; JSON on stdout.
    Eval {
        #[arg(long)]
        m: Option<f64>,
        /// complex number as `re,im`
        #[arg(long)]
        lambda: Option<String>,
        /// one of l1, stein, young, young-hs, stein-improved
        #[arg(long)]
        bound: Option<String>,
        /// potential-norm exponent; `inf` accepted
        #[arg(long)]
        p: Option<String>,
        /// Hoelder-conjugate exponent, alternative to --p
        #[arg(long)]
        q: Option<String>,
        /// potential budget; adds the membership field to the output
        #[arg(long = "Q")]
        budget: Option<f64>,
    },
    /// Trace an enclosure boundary to a JSON or CSV file.
    Trace {
        #[arg(long)]
        m: Option<f64>,
        #[arg(long = "Q")]
        budget: Option<f64>,
        #[arg(long)]
        bound: Option<String>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
        /// evaluation box as `x0,x1,y0,y1`
        #[arg(long = "box")]
        bbox: Option<String>,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// json or csv
        #[arg(long)]
        format: Option<String>,
        /// attach dominance-region membership flags to every point
        #[arg(long)]
        flag_region_d: bool,
    },
    /// Classify the l^1 boundary shape and print the two thresholds.
    Classify {
        #[arg(long)]
        m: Option<f64>,
        #[arg(long = "Q")]
        budget: Option<f64>,
    },
    /// Eigenvalues of a truncated perturbed operator as CSV with genuine
    /// flags.
    Spectrum {
        #[arg(long)]
        m: Option<f64>,
        /// potential file: `n re11 im11 re12 im12 re21 im21 re22 im22`
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long = "N")]
        n_sites: Option<usize>,
    },
    /// Run a verification suite; prints a JSON report, exit 1 on failure.
    Verify {
        /// containment, optimality, or bs
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long = "Q")]
        budget: Option<f64>,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long = "N")]
        n_sites: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// number of boundary points for the optimality suite
        #[arg(long)]
        count: Option<usize>,
    },
    /// Compare truncated resolvent blocks against the closed forms.
    Probe {
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long = "N")]
        n_sites: Option<usize>,
        #[arg(long)]
        jmax: Option<i64>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: msg.into(),
        }
    }

    fn from_core(e: Error) -> Self {
        let code = match e {
            Error::NonFinite | Error::NoConvergence | Error::Singular => 3,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("bad number `{s}`"))
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.trim().parse().map_err(|_| format!("bad integer `{s}`"))
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim().parse().map_err(|_| format!("bad integer `{s}`"))
}

fn parse_exponent(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    parse_f64(t)
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `re,im`, got `{s}`"))?;
    Ok(c64(parse_f64(re)?, parse_f64(im)?))
}

fn parse_box(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected `x0,x1,y0,y1`, got `{s}`"));
    }
    let mut out = [0.0; 4];
    for (o, p) in out.iter_mut().zip(parts.iter()) {
        *o = parse_f64(p)?;
    }
    Ok(out)
}

fn parse_kind(s: &str) -> Result<EnclosureKind, String> {
    match s {
        "l1" => Ok(EnclosureKind::L1),
        "stein" => Ok(EnclosureKind::Stein),
        "young" => Ok(EnclosureKind::Young),
        "young-hs" => Ok(EnclosureKind::YoungHs),
        "stein-improved" => Ok(EnclosureKind::SteinImproved),
        other => Err(format!(
            "unknown bound `{other}` (expected l1, stein, young, young-hs, stein-improved)"
        )),
    }
}

/// Resolve the (p, q) exponent pair from whichever flag was given; the
/// conversion runs exactly once, so a user-supplied q is used verbatim.
fn resolve_exponents(p: Option<f64>, q: Option<f64>, kind: EnclosureKind) -> Result<(f64, f64), String> {
    let (p, q) = match (p, q) {
        (Some(p), None) => (p, holder_conjugate(p)),
        (None, Some(q)) => (holder_conjugate(q), q),
        (Some(_), Some(_)) => return Err("give either --p or --q, not both".into()),
        (None, None) => match kind {
            EnclosureKind::L1 => (1.0, f64::INFINITY),
            _ => return Err("missing exponent --p or --q".into()),
        },
    };
    if !(p >= 1.0) {
        return Err(format!("exponent p must satisfy p >= 1, got {p}"));
    }
    let admissible = match kind {
        EnclosureKind::L1 => p == 1.0,
        EnclosureKind::Stein | EnclosureKind::YoungHs => p > 1.0,
        EnclosureKind::Young | EnclosureKind::SteinImproved => true,
    };
    if !admissible {
        return Err(format!("exponent p={p} not admissible for this bound"));
    }
    Ok((p, q))
}

fn mass(m: Option<f64>) -> Result<MassParam, Failure> {
    let v = required(m, "m").map_err(Failure::usage)?;
    MassParam::new(v).map_err(Failure::from_core)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p).map_err(Failure::usage)?,
        None => Config::empty(),
    };
    match cli.cmd {
        Cmd::Eval { m, lambda, bound, p, q, budget } => {
            let m = merge(m, &cfg, "m", parse_f64).map_err(Failure::usage)?;
            let lambda = merge(lambda, &cfg, "lambda", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let bound = merge(bound, &cfg, "bound", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let p = merge(p, &cfg, "p", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let q = merge(q, &cfg, "q", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let budget = merge(budget, &cfg, "Q", parse_f64).map_err(Failure::usage)?;
            cmd_eval(m, lambda, bound, p, q, budget)
        }
        Cmd::Trace { m, budget, bound, p, q, bbox, nx, ny, out, format, flag_region_d } => {
            let m = merge(m, &cfg, "m", parse_f64).map_err(Failure::usage)?;
            let budget = merge(budget, &cfg, "Q", parse_f64).map_err(Failure::usage)?;
            let bound = merge(bound, &cfg, "bound", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let p = merge(p, &cfg, "p", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let q = merge(q, &cfg, "q", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let bbox = merge(bbox, &cfg, "box", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let nx = merge(nx, &cfg, "nx", parse_usize).map_err(Failure::usage)?;
            let ny = merge(ny, &cfg, "ny", parse_usize).map_err(Failure::usage)?;
            let out = merge(out, &cfg, "out", |s| Ok(PathBuf::from(s))).map_err(Failure::usage)?;
            let format = merge(format, &cfg, "format", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let flag_d = flag_region_d
                || cfg.raw("flag-region-d").map(|s| s == "true" || s == "1").unwrap_or(false);
            cmd_trace(m, budget, bound, p, q, bbox, nx, ny, out, format, flag_d)
        }
        Cmd::Classify { m, budget } => {
            let m = merge(m, &cfg, "m", parse_f64).map_err(Failure::usage)?;
            let budget = merge(budget, &cfg, "Q", parse_f64).map_err(Failure::usage)?;
            cmd_classify(m, budget)
        }
        Cmd::Spectrum { m, potential, n_sites } => {
            let m = merge(m, &cfg, "m", parse_f64).map_err(Failure::usage)?;
            let potential = merge(potential, &cfg, "potential", |s| Ok(PathBuf::from(s)))
                .map_err(Failure::usage)?;
            let n_sites = merge(n_sites, &cfg, "N", parse_usize).map_err(Failure::usage)?;
            cmd_spectrum(m, potential, n_sites)
        }
        Cmd::Verify { suite, m, p, budget, kind, trials, n_sites, seed, count } => {
            let suite = merge(suite, &cfg, "suite", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let m = merge(m, &cfg, "m", parse_f64).map_err(Failure::usage)?;
            let p = merge(p, &cfg, "p", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let budget = merge(budget, &cfg, "Q", parse_f64).map_err(Failure::usage)?;
            let kind = merge(kind, &cfg, "kind", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let trials = merge(trials, &cfg, "trials", parse_usize).map_err(Failure::usage)?;
            let n_sites = merge(n_sites, &cfg, "N", parse_usize).map_err(Failure::usage)?;
            let seed = merge(seed, &cfg, "seed", parse_u64).map_err(Failure::usage)?;
            let count = merge(count, &cfg, "count", parse_usize).map_err(Failure::usage)?;
            cmd_verify(suite, m, p, budget, kind, trials, n_sites, seed, count)
        }
        Cmd::Probe { m, lambda, n_sites, jmax } => {
            let m = merge(m, &cfg, "m", parse_f64).map_err(Failure::usage)?;
            let lambda = merge(lambda, &cfg, "lambda", |s| Ok(s.to_string())).map_err(Failure::usage)?;
            let n_sites = merge(n_sites, &cfg, "N", parse_usize).map_err(Failure::usage)?;
            let jmax = merge(jmax, &cfg, "jmax", |s| {
                s.parse::<i64>().map_err(|_| format!("bad integer `{s}`"))
            })
            .map_err(Failure::usage)?;
            cmd_probe(m, lambda, n_sites, jmax)
        }
    }
}

fn cmd_eval(
    m: Option<f64>,
    lambda: Option<String>,
    bound: Option<String>,
    p: Option<String>,
    q: Option<String>,
    budget: Option<f64>,
) -> Result<(), Failure> {
    let m = mass(m)?;
    let lambda = parse_complex(&required(lambda, "lambda").map_err(Failure::usage)?)
        .map_err(Failure::usage)?;
    let kind = parse_kind(&required(bound, "bound").map_err(Failure::usage)?)
        .map_err(Failure::usage)?;
    let p = p.as_deref().map(parse_exponent).transpose().map_err(Failure::usage)?;
    let q = q.as_deref().map(parse_exponent).transpose().map_err(Failure::usage)?;
    let (pv, qv) = resolve_exponents(p, q, kind).map_err(Failure::usage)?;
    let kp = k_from_lambda(lambda, m).map_err(Failure::from_core)?;
    let bound_value = match kind {
        EnclosureKind::L1 => l1_prefactor(lambda, m),
        EnclosureKind::Stein => g_p(lambda, m, pv).map_err(Failure::from_core)?,
        EnclosureKind::Young => h_q(lambda, m, qv).map_err(Failure::from_core)?,
        EnclosureKind::YoungHs => f_q(lambda, m, qv).map_err(Failure::from_core)?,
        EnclosureKind::SteinImproved => psi_q(lambda, m, qv).map_err(Failure::from_core)?,
    };
    let dist = dist_to_spectrum(lambda, m);
    let in_d = in_region_d(lambda, m).map_err(Failure::from_core)?;
    let mut out = format!(
        "{{\"bound_value\":{},\"k\":{},\"dist\":{},\"in_region_d\":{}",
        emit::f(bound_value),
        emit::complex_obj(kp.k),
        emit::f(dist),
        in_d
    );
    if let Some(qbudget) = budget {
        let member = match kind {
            EnclosureKind::L1 => in_l1_enclosure(lambda, m, qbudget),
            _ => bound_value * qbudget >= 1.0,
        };
        out.push_str(&format!(",\"member_given_Q\":{member}"));
    }
    out.push('}');
    println!("{out}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_trace(
    m: Option<f64>,
    budget: Option<f64>,
    bound: Option<String>,
    p: Option<String>,
    q: Option<String>,
    bbox: Option<String>,
    nx: Option<usize>,
    ny: Option<usize>,
    out: Option<PathBuf>,
    format: Option<String>,
    flag_region_d: bool,
) -> Result<(), Failure> {
    let m = mass(m)?;
    let budget = required(budget, "Q").map_err(Failure::usage)?;
    let kind = parse_kind(&required(bound, "bound").map_err(Failure::usage)?)
        .map_err(Failure::usage)?;
    let p = p.as_deref().map(parse_exponent).transpose().map_err(Failure::usage)?;
    let q = q.as_deref().map(parse_exponent).transpose().map_err(Failure::usage)?;
    let (pv, _qv) = resolve_exponents(p, q, kind).map_err(Failure::usage)?;
    let out_path = required(out, "out").map_err(Failure::usage)?;
    let format = format.unwrap_or_else(|| "json".to_string());
    if format != "json" && format != "csv" {
        return Err(Failure::usage(format!("unknown format `{format}`")));
    }
    let grid = match bbox {
        Some(s) => {
            let b = parse_box(&s).map_err(Failure::usage)?;
            Grid::new(b[0], b[1], b[2], b[3], nx.unwrap_or(800), ny.unwrap_or(400))
                .map_err(Failure::from_core)?
        }
        None => Grid::default_for_mass(m, nx.unwrap_or(800), ny.unwrap_or(400))
            .map_err(Failure::from_core)?,
    };
    let spec = EnclosureSpec::new(kind, m, pv, budget).map_err(Failure::from_core)?;
    let mut curves = trace_enclosure_boundary(spec, &grid, 1e-9).map_err(Failure::from_core)?;
    if flag_region_d {
        curves = curves.with_flags(|z| in_region_d(z, m).unwrap_or(false));
    }
    let payload = match format.as_str() {
        "json" => emit::curveset_json(&curves, m.value(), budget, kind.as_str()),
        _ => emit::curveset_csv(&curves),
    };
    std::fs::write(&out_path, payload).map_err(|e| Failure {
        code: 3,
        message: format!("cannot write {}: {e}", out_path.display()),
    })?;
    println!("{}", curves.component_count());
    Ok(())
}

fn cmd_classify(m: Option<f64>, budget: Option<f64>) -> Result<(), Failure> {
    let m = mass(m)?;
    let budget = required(budget, "Q").map_err(Failure::usage)?;
    let class = classify_topology(m, budget).map_err(Failure::from_core)?;
    let (t1, t2) = topology_thresholds(m);
    println!("{}", class.as_str());
    println!("thresholds {} {}", emit::f(t1), emit::f(t2));
    Ok(())
}

fn cmd_spectrum(
    m: Option<f64>,
    potential: Option<PathBuf>,
    n_sites: Option<usize>,
) -> Result<(), Failure> {
    let m = mass(m)?;
    let path = required(potential, "potential").map_err(Failure::usage)?;
    let n_sites = required(n_sites, "N").map_err(Failure::usage)?;
    let text = std::fs::read_to_string(&path).map_err(|e| {
        Failure::usage(format!("cannot read potential {}: {e}", path.display()))
    })?;
    let v = Potential::parse_text(&text).map_err(Failure::from_core)?;
    let banded = build_truncated_dirac_banded(m, &v, n_sites).map_err(Failure::from_core)?;
    let dense = banded.to_dense();
    let (eigs, genuine) =
        genuine_eigenvalues(&banded, &dense, n_sites, 0).map_err(Failure::from_core)?;
    let mut rows: Vec<(Complex64, bool)> = eigs.into_iter().zip(genuine).collect();
    rows.sort_by(|a, b| (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap());
    println!("re,im,genuine");
    for (e, g) in rows {
        println!("{},{},{}", emit::f(e.re), emit::f(e.im), u8::from(g));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: Option<String>,
    m: Option<f64>,
    p: Option<String>,
    budget: Option<f64>,
    kind: Option<String>,
    trials: Option<usize>,
    n_sites: Option<usize>,
    seed: Option<u64>,
    count: Option<usize>,
) -> Result<(), Failure> {
    let suite = required(suite, "suite").map_err(Failure::usage)?;
    match suite.as_str() {
        "containment" => {
            let m = mass(m)?;
            let p = parse_exponent(&p.unwrap_or_else(|| "1".into())).map_err(Failure::usage)?;
            let budget = required(budget, "Q").map_err(Failure::usage)?;
            let kind = parse_kind(&kind.unwrap_or_else(|| "l1".into())).map_err(Failure::usage)?;
            let trials = trials.unwrap_or(100);
            let n_sites = n_sites.unwrap_or(300);
            let seed = seed.unwrap_or(7);
            let report = run_containment(m, p, budget, kind, trials, n_sites, seed)
                .map_err(Failure::from_core)?;
            println!("{}", emit::containment_json(&report));
            if report.violations > 0 {
                return Err(Failure {
                    code: 1,
                    message: format!("{} containment violations", report.violations),
                });
            }
            Ok(())
        }
        "bs" => {
            let trials = trials.unwrap_or(50);
            let n_sites = n_sites.unwrap_or(300);
            let seed = seed.unwrap_or(7);
            let report =
                bs_equivalence_suite(trials, n_sites, seed).map_err(Failure::from_core)?;
            println!("{}", emit::bs_json(&report));
            if !report.all_pass() {
                return Err(Failure {
                    code: 1,
                    message: format!(
                        "equivalence failures: eig side {}/{}, control side {}/{}",
                        report.eig_side_passes, report.trials, report.control_side_passes, report.trials
                    ),
                });
            }
            Ok(())
        }
        "optimality" => {
            let m = mass(m)?;
            let budget = required(budget, "Q").map_err(Failure::usage)?;
            let count = count.unwrap_or(20);
            let n_sites = n_sites.unwrap_or(500);
            let grid = Grid::default_for_mass(m, 500, 260).map_err(Failure::from_core)?;
            let points = gamma_optimality_samples(m, budget, &grid, count, 0.98)
                .map_err(Failure::from_core)?;
            let witnesses: Vec<_> = points
                .into_iter()
                .map(|z| optimal_potential_with_n(m, budget, z, n_sites))
                .collect::<Result<_, _>>()
                .map_err(Failure::from_core)?;
            println!("{}", emit::optimality_json(m.value(), budget, &witnesses));
            let bad = witnesses
                .iter()
                .filter(|w| {
                    (w.upsilon0_norm - budget).abs() > 1e-10
                        || w.det_residual > 1e-10
                        || w.eig_gap > 1e-6
                })
                .count();
            if bad > 0 {
                return Err(Failure {
                    code: 1,
                    message: format!("{bad} optimality witnesses out of tolerance"),
                });
            }
            Ok(())
        }
        other => Err(Failure::usage(format!(
            "unknown suite `{other}` (expected containment, optimality, bs)"
        ))),
    }
}

fn cmd_probe(
    m: Option<f64>,
    lambda: Option<String>,
    n_sites: Option<usize>,
    jmax: Option<i64>,
) -> Result<(), Failure> {
    let m = mass(m)?;
    let lambda = parse_complex(&required(lambda, "lambda").map_err(Failure::usage)?)
        .map_err(Failure::usage)?;
    let n_sites = required(n_sites, "N").map_err(Failure::usage)?;
    let jmax = required(jmax, "jmax").map_err(Failure::usage)?;
    if jmax < 0 || jmax as usize > n_sites {
        return Err(Failure::usage("jmax must satisfy 0 <= jmax <= N"));
    }
    let kp = k_from_lambda(lambda, m).map_err(Failure::from_core)?;
    let r = truncated_free_resolvent(lambda, m, n_sites).map_err(Failure::from_core)?;
    let center = n_sites;
    let mut dev: f64 = 0.0;
    for j in -jmax..=jmax {
        let col = (center as i64 + j) as usize;
        let got = r.block2(center, col);
        let want: Mat2C = t_matrix(j, &kp);
        dev = dev.max(got.max_abs_diff(&want));
    }
    println!("{}", emit::f(dev));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(fail) => {
            eprintln!("{}", fail.message);
            ExitCode::from(fail.code)
        }
    }
}
