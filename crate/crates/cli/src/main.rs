//! `nblab` — experiment front end for the Nyman-Beurling laboratory.
//!
//! Subcommands cover the deterministic distance scan (`dist`), the
//! Mobius-damped residuals (`nu`), randomized distances (`gnb`, `pnb`),
//! the time-domain vs Mellin-domain cross-check (`crosscheck`), the Muntz
//! identity Monte Carlo (`muntz-check`), direct zeta evaluation (`zeta`),
//! hypothesis checkers (`hypotheses`), and the V_n diagnostic profile
//! (`vn`). A full run is reproducible from its JSON config: identical
//! config (seed and thread count included) gives identical output.
//!
//! Exit codes: 0 success, 2 usage error, 3 numeric/resource error (with a
//! machine-readable error JSON on stderr).

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use nblab_core::bracket::{k_const, EULER_GAMMA};
use nblab_core::criteria::{self, BasisMode, BasisSpec, Preset, Target};
use nblab_core::families::Distribution;
use nblab_core::gram;
use nblab_core::muntz::identity_gap;
use nblab_core::plancherel::{plancherel_residual, vn_profile, CriticalLineGrid};
use nblab_core::rng::RngStream;
use nblab_core::zeta::zeta_eval;
use nblab_core::Error as CoreError;

use output::{num, Format, Report};

#[derive(Parser)]
#[command(name = "nblab", version, about = "Nyman-Beurling numerical laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deterministic distance scan over the dilation basis 1/k.
    Dist(DistArgs),
    /// Mobius-damped residual nu_{n,eps} (defaults to the eps grid).
    Nu(NuArgs),
    /// gNB distance for a random basis.
    Gnb(RandomArgs),
    /// pNB distance for an independent random basis.
    Pnb(RandomArgs),
    /// Time-domain vs Mellin-domain residual cross-check.
    Crosscheck(CrosscheckArgs),
    /// Monte Carlo check of the Muntz identity E{X/t} = -Pf(t).
    MuntzCheck(MuntzCheckArgs),
    /// Evaluate zeta(1/2 + it).
    Zeta(ZetaArgs),
    /// Hypothesis checkers for a named family preset.
    Hypotheses(HypothesesArgs),
    /// Monte Carlo profile of E V_n(t) on the critical line.
    Vn(VnArgs),
    /// Execute a run described entirely by a JSON config file.
    Run(RunArgs),
}

#[derive(Args, Clone, Default)]
struct CommonOpts {
    /// JSON config file; explicit flags override its values.
    #[arg(long, global = false)]
    config: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<Format>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (never changes numeric output).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Clone)]
struct DistArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Basis preset; the deterministic scan supports `bd`.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// Certified tolerance per Gram entry.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Clone)]
struct NuArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long)]
    n: Option<usize>,
    /// Single eps; omitted = the default grid 0.3, 0.2, 0.1, 0.05.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Clone)]
struct RandomArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Comma-separated distribution literals, e.g. `exp:1,exp:2`.
    #[arg(long, value_delimiter = ',')]
    basis: Option<Vec<String>>,
    /// Optional fixed coefficients (otherwise the optimal projection).
    #[arg(long, value_delimiter = ',')]
    coeffs: Option<Vec<f64>>,
    /// Target: `chi` (default) or `survival:<literal>`.
    #[arg(long)]
    target: Option<String>,
    /// Declare the family mutually independent (required for pnb).
    #[arg(long)]
    independent: Option<bool>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Clone)]
struct CrosscheckArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long)]
    n: Option<usize>,
    /// Critical-line truncation T.
    #[arg(long = "T")]
    t_max: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    /// Cache file for the zeta grid (loaded if present, else written).
    #[arg(long = "grid-cache")]
    grid_cache: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Clone)]
struct MuntzCheckArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Distribution literal, e.g. `exp:1` or `gamma:2:3`.
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "t-min")]
    t_min: Option<f64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Clone)]
struct ZetaArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Imaginary part: evaluates zeta(1/2 + it).
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Args, Clone)]
struct HypothesesArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Preset: bd | exp-dilated | gamma-kn | concentrated.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Gamma rate for gamma-kn (defaults to n).
    #[arg(long)]
    scale: Option<f64>,
    /// Concentration exponent for the concentrated preset.
    #[arg(long)]
    vartheta: Option<f64>,
    /// Mobius damping for the condition-(C) coefficients.
    #[arg(long)]
    eps: Option<f64>,
    /// Monte Carlo sample count for the minimum-dilation bound.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct VnArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Family preset (default concentrated).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    vartheta: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON config with a `subcommand` field plus that command's keys.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

/// Errors at the CLI layer: usage problems exit 2, numeric problems 3.
enum CliError {
    Usage(String),
    Core(CoreError),
    Io(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Load the JSON config file, if any.
fn load_config(path: Option<&PathBuf>) -> CliResult<Option<Value>> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", p.display())))?;
            let v = serde_json::from_str(&text)
                .map_err(|e| usage(format!("config {} is not valid JSON: {e}", p.display())))?;
            Ok(Some(v))
        }
    }
}

/// Flag value if present, else the config-file value, else none.
fn merge<T: serde::de::DeserializeOwned>(
    flag: Option<T>,
    file: Option<&Value>,
    key: &str,
) -> CliResult<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.and_then(|f| f.get(key)) {
        None => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| usage(format!("config key `{key}`: {e}"))),
    }
}

fn require<T>(v: Option<T>, key: &str) -> CliResult<T> {
    v.ok_or_else(|| usage(format!("missing required option --{key} (or config key `{key}`)")))
}

fn parse_preset(name: &str, n: usize, scale: Option<f64>, vartheta: Option<f64>) -> CliResult<Preset> {
    match name {
        "bd" => Ok(Preset::Bd),
        "exp-dilated" => Ok(Preset::ExpDilated),
        "gamma-kn" => Ok(Preset::GammaKn { scale: scale.unwrap_or(n as f64) }),
        "concentrated" => Ok(Preset::Concentrated { vartheta: vartheta.unwrap_or(1.0) }),
        other => Err(usage(format!(
            "unknown preset `{other}` (expected bd, exp-dilated, gamma-kn, concentrated)"
        ))),
    }
}

fn parse_target(spec: Option<&str>) -> CliResult<Target> {
    match spec {
        None | Some("chi") => Ok(Target::Chi),
        Some(s) => match s.strip_prefix("survival:") {
            Some(lit) => Ok(Target::SurvivalOf(
                Distribution::from_str(lit).map_err(|e| usage(e.to_string()))?,
            )),
            None => Err(usage(format!("unknown target `{s}` (expected chi or survival:<literal>)"))),
        },
    }
}

fn parse_basis(lits: &[String]) -> CliResult<Vec<Distribution>> {
    lits.iter()
        .map(|l| Distribution::from_str(l).map_err(|e| usage(e.to_string())))
        .collect()
}

fn burnol_c() -> f64 {
    2.0 + EULER_GAMMA - (4.0 * std::f64::consts::PI).ln()
}

fn cmd_dist(a: &DistArgs, file: Option<&Value>) -> CliResult<Report> {
    let preset = merge(a.preset.clone(), file, "preset")?.unwrap_or_else(|| "bd".into());
    if preset != "bd" {
        return Err(usage(format!("dist supports the deterministic `bd` preset, got `{preset}`")));
    }
    let n_max = require(merge(a.n_max, file, "n_max")?, "n-max")?;
    let tol = merge(a.tol, file, "tol")?.unwrap_or(1e-6);
    let config = json!({"subcommand": "dist", "preset": preset, "n_max": n_max, "tol": tol});

    let thetas: Vec<f64> = (1..=n_max).map(|k| 1.0 / k as f64).collect();
    let sys = gram::assemble_deterministic(&thetas, tol)?;
    let c = burnol_c();
    let mut report = Report::new(
        "dist",
        config,
        &["n", "d_n_sq", "slack", "dn_sq_times_log_n", "C_over_log_n"],
    );
    report.meta("K", num(k_const().value));
    report.meta("K_err", num(k_const().err));
    report.meta("C", num(c));
    for n in 1..=n_max {
        let rep = gram::solve(&sys.prefix(n)?, gram::DEFAULT_REL_CUTOFF)?;
        let ln_n = (n as f64).ln();
        report.row(vec![
            json!(n),
            num(rep.distance_sq),
            num(rep.certified_slack),
            num(rep.distance_sq * ln_n),
            num(c / ln_n),
        ]);
    }
    Ok(report)
}

fn cmd_nu(a: &NuArgs, file: Option<&Value>) -> CliResult<Report> {
    let n = require(merge(a.n, file, "n")?, "n")?;
    let eps = merge(a.eps, file, "eps")?;
    let tol = merge(a.tol, file, "tol")?.unwrap_or(1e-6);
    let grid: Vec<f64> = match eps {
        Some(e) => vec![e],
        None => vec![0.3, 0.2, 0.1, 0.05],
    };
    let config = json!({"subcommand": "nu", "n": n, "eps": grid, "tol": tol});

    let thetas: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
    let sys = gram::assemble_deterministic(&thetas, tol)?;
    let mut report = Report::new("nu", config, &["n", "eps", "nu"]);
    for &e in &grid {
        let coeffs = criteria::mobius_coeffs(n, e);
        let nu = gram::residual_with_coeffs(&sys, &coeffs)?;
        report.row(vec![json!(n), num(e), num(nu)]);
    }
    Ok(report)
}

fn cmd_random(mode: BasisMode, a: &RandomArgs, file: Option<&Value>) -> CliResult<Report> {
    let name = if mode == BasisMode::Gnb { "gnb" } else { "pnb" };
    let lits = require(merge(a.basis.clone(), file, "basis")?, "basis")?;
    let coeffs = merge(a.coeffs.clone(), file, "coeffs")?;
    let target_spec = merge(a.target.clone(), file, "target")?;
    let independent = merge(a.independent, file, "independent")?.unwrap_or(true);
    let tol = merge(a.tol, file, "tol")?.unwrap_or(1e-6);
    let config = json!({
        "subcommand": name, "basis": lits, "coeffs": coeffs,
        "target": target_spec.clone().unwrap_or_else(|| "chi".into()),
        "independent": independent, "tol": tol,
    });

    let elements = parse_basis(&lits)?;
    let target = parse_target(target_spec.as_deref())?;
    let basis = BasisSpec::new(elements, mode, independent, target)?;
    let rep = match mode {
        BasisMode::Gnb => criteria::gnb_distance(&basis, coeffs.as_deref(), tol)?,
        BasisMode::Pnb => criteria::pnb_distance(&basis, coeffs.as_deref(), tol)?,
        BasisMode::Deterministic => unreachable!(),
    };

    let mut report = Report::new(name, config, &["k", "element", "coeff"]);
    report.meta("distance_sq", num(rep.distance_sq));
    report.meta("certified_slack", num(rep.certified_slack));
    report.meta("reg_cutoff", num(rep.reg_cutoff));
    report.meta("dropped_modes", json!(rep.dropped_modes));
    report.meta("condition_estimate", num(rep.condition_estimate));
    report.meta("clamped", json!(rep.clamped));
    for (k, c) in rep.coeffs.iter().enumerate() {
        report.row(vec![json!(k + 1), json!(basis.elements[k].to_string()), num(*c)]);
    }
    Ok(report)
}

fn cmd_crosscheck(a: &CrosscheckArgs, file: Option<&Value>) -> CliResult<Report> {
    let n_max = require(merge(a.n, file, "n")?, "n")?;
    let t_max = merge(a.t_max, file, "T")?.unwrap_or(nblab_core::plancherel::DEFAULT_T_MAX);
    let step = merge(a.step, file, "step")?.unwrap_or(nblab_core::plancherel::DEFAULT_STEP);
    let tol = merge(a.tol, file, "tol")?.unwrap_or(1e-6);
    let cache = merge(a.grid_cache.clone(), file, "grid_cache")?;
    let config = json!({
        "subcommand": "crosscheck", "n": n_max, "T": t_max, "step": step, "tol": tol,
        "grid_cache": cache.as_ref().map(|p| p.display().to_string()),
    });

    let grid = match &cache {
        Some(path) if path.exists() => CriticalLineGrid::load_csv(path)?,
        _ => {
            let g = CriticalLineGrid::build(t_max, step)?;
            if let Some(path) = &cache {
                g.save_csv(path)?;
            }
            g
        }
    };

    let thetas: Vec<f64> = (1..=n_max).map(|k| 1.0 / k as f64).collect();
    let sys = gram::assemble_deterministic(&thetas, tol)?;
    let mut report = Report::new(
        "crosscheck",
        config,
        &["n", "time_domain", "mellin", "abs_diff", "tail_bound", "agrees"],
    );
    report.meta("grid_points", json!(grid.len()));
    for n in 1..=n_max {
        let prefix = sys.prefix(n)?;
        let solved = gram::solve(&prefix, gram::DEFAULT_REL_CUTOFF)?;
        let time_domain = gram::residual_with_coeffs(&prefix, &solved.coeffs)?;
        let basis = BasisSpec::new(
            (1..=n).map(|k| Distribution::PointMass(1.0 / k as f64)).collect(),
            BasisMode::Deterministic,
            true,
            Target::Chi,
        )?;
        let (mellin, tail) = plancherel_residual(&basis, &solved.coeffs, &grid)?;
        let diff = (time_domain - mellin).abs();
        report.row(vec![
            json!(n),
            num(time_domain),
            num(mellin),
            num(diff),
            num(tail),
            json!(u8::from(diff <= 1e-2 + tail)),
        ]);
    }
    Ok(report)
}

fn cmd_muntz_check(a: &MuntzCheckArgs, file: Option<&Value>) -> CliResult<(Report, bool)> {
    let lit = require(merge(a.dist.clone(), file, "dist")?, "dist")?;
    let samples = merge(a.samples, file, "samples")?.unwrap_or(1_000_000);
    let seed = require(merge(a.seed, file, "seed")?, "seed")?;
    let t_min = merge(a.t_min, file, "t_min")?.unwrap_or(1e-2);
    let t_max = merge(a.t_max, file, "t_max")?.unwrap_or(1e2);
    let points = merge(a.points, file, "points")?.unwrap_or(20);
    let config = json!({
        "subcommand": "muntz-check", "dist": lit, "samples": samples, "seed": seed,
        "t_min": t_min, "t_max": t_max, "points": points,
    });

    let d = Distribution::from_str(&lit).map_err(|e| usage(e.to_string()))?;
    if points < 2 || t_min <= 0.0 || t_max <= t_min || t_min.is_nan() || t_max.is_nan() {
        return Err(usage("need points >= 2 and 0 < t-min < t-max"));
    }
    let grid: Vec<f64> = (0..points)
        .map(|i| t_min * (t_max / t_min).powf(i as f64 / (points - 1) as f64))
        .collect();
    let rows = identity_gap(&d, &grid, samples, RngStream::new(seed, 0))?;

    let mut report = Report::new("muntz-check", config, &["t", "gap", "mc_stderr", "pass"]);
    let mut all_pass = true;
    let mut max_ratio: f64 = 0.0;
    for p in &rows {
        let ok = p.gap <= 4.0 * p.mc_stderr.max(1e-12);
        all_pass &= ok;
        max_ratio = max_ratio.max(p.gap / p.mc_stderr.max(1e-12));
        report.row(vec![num(p.t), num(p.gap), num(p.mc_stderr), json!(u8::from(ok))]);
    }
    report.meta("max_gap_over_stderr", num(max_ratio));
    report.meta("all_within_4_stderr", json!(all_pass));
    Ok((report, all_pass))
}

fn cmd_zeta(a: &ZetaArgs, file: Option<&Value>) -> CliResult<Report> {
    let t = require(merge(a.t, file, "t")?, "t")?;
    let config = json!({"subcommand": "zeta", "t": t});
    let v = zeta_eval(Complex64::new(0.5, t))?;
    let mut report = Report::new("zeta", config, &["t", "re", "im"]);
    report.meta(
        "method_gap",
        v.method_gap.map(num).unwrap_or(json!(null)),
    );
    report.meta("degraded", json!(v.degraded));
    report.row(vec![num(t), num(v.value.re), num(v.value.im)]);
    Ok(report)
}

fn cmd_hypotheses(a: &HypothesesArgs, file: Option<&Value>) -> CliResult<Report> {
    let preset_name =
        merge(a.preset.clone(), file, "preset")?.unwrap_or_else(|| "exp-dilated".into());
    let n = merge(a.n, file, "n")?.unwrap_or(16);
    let scale = merge(a.scale, file, "scale")?;
    let vartheta = merge(a.vartheta, file, "vartheta")?;
    let eps = merge(a.eps, file, "eps")?.unwrap_or(0.1);
    let samples = merge(a.samples, file, "samples")?.unwrap_or(100_000);
    let seed = merge(a.seed, file, "seed")?;
    let preset = parse_preset(&preset_name, n, scale, vartheta)?;
    let family = criteria::preset_family(preset, n)?;
    let needs_mc = !matches!(preset, Preset::Bd);
    if needs_mc && seed.is_none() {
        return Err(usage("--seed is mandatory for Monte Carlo presets"));
    }
    let config = json!({
        "subcommand": "hypotheses", "preset": preset_name, "n": n, "scale": scale,
        "vartheta": vartheta, "eps": eps, "samples": samples, "seed": seed,
    });

    let basis = BasisSpec::new(family.clone(), BasisMode::Pnb, true, Target::Chi)?;
    let mut report = Report::new("hypotheses", config, &["check", "param", "value"]);

    let p = criteria::assumption_p(&basis)?;
    report.row(vec![json!("assumption_p"), json!("P(all Z_k <= 1)"), num(p)]);

    for row in criteria::moment_growth(&family, &[1.0, 2.0, 3.0], n)? {
        report.row(vec![
            json!("moment_growth"),
            json!(format!("alpha={}", row.alpha)),
            num(row.sup),
        ]);
        report.row(vec![
            json!("moment_growth_rising"),
            json!(format!("alpha={}", row.alpha)),
            json!(u8::from(row.rising)),
        ]);
    }

    let coeff_sets: Vec<Vec<f64>> = (1..=n).map(|m| criteria::mobius_coeffs(m, eps)).collect();
    for beta in [1.5, 2.0] {
        let v = criteria::condition_c(&coeff_sets, beta)?;
        report.row(vec![
            json!("condition_c"),
            json!(format!("beta={beta} mobius_eps={eps}")),
            num(v),
        ]);
    }

    let m_grid = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    for (m, v) in criteria::t2_check(&Target::Chi, &m_grid)? {
        report.row(vec![json!("t2_chi"), json!(format!("M={m}")), num(v)]);
    }
    for (m, v) in criteria::t2_check(&Target::SurvivalOf(family[0].clone()), &m_grid)? {
        report.row(vec![
            json!("t2_survival_of_first"),
            json!(format!("M={m}")),
            num(v),
        ]);
    }

    let sb = criteria::suffi_bound(&basis, samples, RngStream::new(seed.unwrap_or(0), 0))?;
    report.row(vec![
        json!("suffi_bound"),
        json!("1/(log 2 + E|log min Z|)"),
        num(sb),
    ]);
    Ok(report)
}

fn cmd_vn(a: &VnArgs, file: Option<&Value>) -> CliResult<Report> {
    let n = require(merge(a.n, file, "n")?, "n")?;
    let eps = merge(a.eps, file, "eps")?.unwrap_or(0.1);
    let preset_name =
        merge(a.preset.clone(), file, "preset")?.unwrap_or_else(|| "concentrated".into());
    let vartheta = merge(a.vartheta, file, "vartheta")?;
    let scale = merge(a.scale, file, "scale")?;
    let samples = merge(a.samples, file, "samples")?.unwrap_or(10_000);
    let seed = require(merge(a.seed, file, "seed")?, "seed")?;
    let t_max = merge(a.t_max, file, "t_max")?.unwrap_or(30.0);
    let points = merge(a.points, file, "points")?.unwrap_or(25);
    let preset = parse_preset(&preset_name, n, scale, vartheta)?;
    let config = json!({
        "subcommand": "vn", "n": n, "eps": eps, "preset": preset_name,
        "vartheta": vartheta, "scale": scale, "samples": samples, "seed": seed,
        "t_max": t_max, "points": points,
    });

    if points < 2 || t_max <= 0.0 || t_max.is_nan() {
        return Err(usage("need points >= 2 and t-max > 0"));
    }
    let family = criteria::preset_family(preset, n)?;
    let grid: Vec<f64> = (0..points)
        .map(|i| 0.25 + (t_max - 0.25) * i as f64 / (points - 1) as f64)
        .collect();
    let rows = vn_profile(n, eps, &family, &grid, samples, RngStream::new(seed, 0))?;

    let mut report = Report::new("vn", config, &["t", "e_vn"]);
    let max = rows.iter().fold(0.0_f64, |m, &(_, v)| m.max(v));
    report.meta("max_e_vn", num(max));
    for (t, v) in rows {
        report.row(vec![num(t), num(v)]);
    }
    Ok(report)
}

/// Dispatch a fully-file-described run.
fn cmd_run(a: &RunArgs) -> CliResult<(Report, bool)> {
    let file = load_config(Some(&a.config))?.expect("config path given");
    let sub = file
        .get("subcommand")
        .and_then(|v| v.as_str())
        .ok_or_else(|| usage("config must contain a `subcommand` string"))?
        .to_string();
    let f = Some(&file);
    let empty = CommonOpts::default();
    match sub.as_str() {
        "dist" => cmd_dist(
            &DistArgs { common: empty, preset: None, n_max: None, tol: None },
            f,
        )
        .map(|r| (r, true)),
        "nu" => cmd_nu(&NuArgs { common: empty, n: None, eps: None, tol: None }, f)
            .map(|r| (r, true)),
        "gnb" | "pnb" => {
            let mode = if sub == "gnb" { BasisMode::Gnb } else { BasisMode::Pnb };
            cmd_random(
                mode,
                &RandomArgs {
                    common: empty,
                    basis: None,
                    coeffs: None,
                    target: None,
                    independent: None,
                    tol: None,
                },
                f,
            )
            .map(|r| (r, true))
        }
        "crosscheck" => cmd_crosscheck(
            &CrosscheckArgs {
                common: empty,
                n: None,
                t_max: None,
                step: None,
                grid_cache: None,
                tol: None,
            },
            f,
        )
        .map(|r| (r, true)),
        "muntz-check" => cmd_muntz_check(
            &MuntzCheckArgs {
                common: empty,
                dist: None,
                samples: None,
                seed: None,
                t_min: None,
                t_max: None,
                points: None,
            },
            f,
        ),
        "zeta" => cmd_zeta(&ZetaArgs { common: empty, t: None }, f).map(|r| (r, true)),
        "hypotheses" => cmd_hypotheses(
            &HypothesesArgs {
                common: empty,
                preset: None,
                n: None,
                scale: None,
                vartheta: None,
                eps: None,
                samples: None,
                seed: None,
            },
            f,
        )
        .map(|r| (r, true)),
        "vn" => cmd_vn(
            &VnArgs {
                common: empty,
                n: None,
                eps: None,
                preset: None,
                vartheta: None,
                scale: None,
                samples: None,
                seed: None,
                t_max: None,
                points: None,
            },
            f,
        )
        .map(|r| (r, true)),
        other => Err(usage(format!("unknown subcommand `{other}` in config"))),
    }
}

fn execute(cli: &Cli) -> CliResult<(Report, CommonOpts, bool)> {
    let (common, result): (CommonOpts, CliResult<(Report, bool)>) = match &cli.command {
        Command::Dist(a) => {
            let f = load_config(a.common.config.as_ref())?;
            (a.common.clone(), cmd_dist(a, f.as_ref()).map(|r| (r, true)))
        }
        Command::Nu(a) => {
            let f = load_config(a.common.config.as_ref())?;
            (a.common.clone(), cmd_nu(a, f.as_ref()).map(|r| (r, true)))
        }
        Command::Gnb(a) => {
            let f = load_config(a.common.config.as_ref())?;
            (a.common.clone(), cmd_random(BasisMode::Gnb, a, f.as_ref()).map(|r| (r, true)))
        }
        Command::Pnb(a) => {
            let f = load_config(a.common.config.as_ref())?;
            (a.common.clone(), cmd_random(BasisMode::Pnb, a, f.as_ref()).map(|r| (r, true)))
        }
        Command::Crosscheck(a) => {
            let f = load_config(a.common.config.as_ref())?;
            (a.common.clone(), cmd_crosscheck(a, f.as_ref()).map(|r| (r, true)))
        }
        Command::MuntzCheck(a) => {
            let f = load_config(a.common.config.as_ref())?;
            (a.common.clone(), cmd_muntz_check(a, f.as_ref()))
        }
        Command::Zeta(a) => {
            let f = load_config(a.common.config.as_ref())?;
            (a.common.clone(), cmd_zeta(a, f.as_ref()).map(|r| (r, true)))
        }
        Command::Hypotheses(a) => {
            let f = load_config(a.common.config.as_ref())?;
            (a.common.clone(), cmd_hypotheses(a, f.as_ref()).map(|r| (r, true)))
        }
        Command::Vn(a) => {
            let f = load_config(a.common.config.as_ref())?;
            (a.common.clone(), cmd_vn(a, f.as_ref()).map(|r| (r, true)))
        }
        Command::Run(a) => {
            let common = CommonOpts {
                config: None,
                format: a.format,
                out: a.out.clone(),
                threads: a.threads,
            };
            (common, cmd_run(a))
        }
    };
    result.map(|(report, ok)| (report, common, ok))
}

fn error_json(e: &CliError) -> Value {
    match e {
        CliError::Usage(m) => json!({"error": {"kind": "usage", "message": m}}),
        CliError::Io(m) => json!({"error": {"kind": "io", "message": m}}),
        CliError::Core(c) => {
            let mut obj = json!({"kind": c.kind(), "message": c.to_string()});
            if let CoreError::Resource { achievable_tol, .. } = c {
                obj["achievable_tol"] = num(*achievable_tol);
            }
            json!({"error": obj})
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // One work pool per process; size only affects scheduling, never the
    // numbers (all reductions are in fixed order).
    let threads = match &cli.command {
        Command::Dist(a) => a.common.threads,
        Command::Nu(a) => a.common.threads,
        Command::Gnb(a) | Command::Pnb(a) => a.common.threads,
        Command::Crosscheck(a) => a.common.threads,
        Command::MuntzCheck(a) => a.common.threads,
        Command::Zeta(a) => a.common.threads,
        Command::Hypotheses(a) => a.common.threads,
        Command::Vn(a) => a.common.threads,
        Command::Run(a) => a.threads,
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .ok();
    }

    match execute(&cli) {
        Ok((report, common, ok)) => {
            let format = common.format.unwrap_or(Format::Csv);
            if let Err(e) = report.write(format, common.out.as_ref()) {
                eprintln!("{}", json!({"error": {"kind": "io", "message": e.to_string()}}));
                return ExitCode::from(3);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!(
                    "{}",
                    json!({"error": {"kind": "numeric", "message": "stochastic acceptance bound exceeded; see report"}})
                );
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
