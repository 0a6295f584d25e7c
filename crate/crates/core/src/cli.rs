//! The `hyperpoly` command line.
//!
//! Machine output (JSON, CSV) goes to stdout, human text to stderr. Exit
//! codes: 0 success, 1 a verification suite failed, 2 sampling failed or the
//! input is off the level set, 3 malformed input or configuration, 4 a
//! stability question asked in approximate mode.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Error;
use crate::higgs::{
    all_invariant_lines, check_strong_parabolicity, residues_sum_to_zero, stability,
    stability_with_lines, to_higgs, MarkedPoints,
};
use crate::hyperpolygon::{
    act, act_tangent, is_in_level_set, random_group_element, sample_collinear_level_set,
    sample_level_set, tangent_basis, HyperpolygonPoint, WeightVector,
};
use crate::io::{higgs_to_json, point_from_str, point_to_json, to_pretty, PointFile};
use crate::linalg::{Covector2, Vector2};
use crate::scalar::{parse_rational, set_tolerance, GaussRat, Mode, RandomScalar, Scalar};
use crate::symplectic::{
    dimension_counts, invariance_defect, pair_scale, random_tangent, reduced_gram_rank,
    verify_theorem1, Residual,
};

pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_SAMPLING: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_APPROX_STABILITY: i32 = 4;

const DEFAULT_N: usize = 4;
const DEFAULT_TRIALS: usize = 100;
const VERIFY_POINTS: usize = 4;
const STABLE_ATTEMPTS: usize = 50;
const GROUP_SAMPLES: usize = 25;
const MAX_SCAN_ROWS: usize = 100_000;

#[derive(Parser, Debug)]
#[command(
    name = "hyperpoly",
    version,
    about = "Hyperpolygon spaces and parabolic Higgs bundles on P^1"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a point of the moment-map level set (JSON on stdout).
    Sample(Common),
    /// Report level-set membership, parabolicity and stability of a point.
    Check {
        /// Point file, or `-` for stdin.
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Convert a point into its parabolic Higgs data.
    Map {
        /// Point file, or `-` for stdin.
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sample stable points and run the symplectic identity suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Add this amount to the first coordinate of y_1 of every sampled point.
        #[arg(long, allow_hyphen_values = true)]
        perturb: Option<f64>,
    },
    /// Count stable samples over a grid of weight vectors (CSV on stdout).
    Scan {
        #[command(flatten)]
        common: Common,
        /// Grid points per weight axis; weights are j/(grid+1).
        #[arg(long, default_value_t = 3)]
        grid: usize,
        /// Sample points whose z_i are all proportional.
        #[arg(long)]
        collinear: bool,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Number of marked points.
    #[arg(long)]
    n: Option<usize>,
    /// Weights, comma separated; a single value applies to every point.
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<String>,
    /// Marked points in the affine chart, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    points: Vec<String>,
    /// exact | approx.
    #[arg(long, env = "HYPERPOLY_MODE")]
    mode: Option<Mode>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for approximate zero tests.
    #[arg(long)]
    tol: Option<f64>,
    /// Trials (verify) or samples per weight vector (scan).
    #[arg(long)]
    trials: Option<usize>,
}

/// Resolved settings shared by every command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub alpha: WeightVector,
    pub marked_points: Vec<BigRational>,
    pub mode: Mode,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub trials: usize,
}

impl RunConfig {
    fn resolve(
        c: &Common,
        n_from_input: Option<usize>,
        mode_from_input: Option<Mode>,
    ) -> Result<Self, Failure> {
        let n = match (n_from_input, c.n) {
            (Some(f), Some(flag)) if f != flag => {
                return Err(Failure::input(format!(
                    "--n {flag} disagrees with the input, which has n = {f}"
                )))
            }
            (Some(f), _) => f,
            (None, flag) => flag.unwrap_or(DEFAULT_N),
        };
        if n < 3 {
            return Err(Failure::input(format!("n must be at least 3, got {n}")));
        }
        let alpha = match c.alpha.len() {
            0 => WeightVector::uniform(n, 1, 3),
            1 => WeightVector::new(vec![parse_arg(&c.alpha[0])?; n]),
            _ if c.alpha.len() == n => WeightVector::new(
                c.alpha
                    .iter()
                    .map(|a| parse_arg(a))
                    .collect::<Result<_, _>>()?,
            ),
            len => {
                return Err(Failure::input(format!(
                    "--alpha has {len} entries, expected 1 or {n}"
                )))
            }
        }
        .map_err(Failure::from_error_input)?;
        let marked_points = if c.points.is_empty() {
            (0..n as i64)
                .map(|i| BigRational::from_integer(i.into()))
                .collect()
        } else if c.points.len() == n {
            c.points
                .iter()
                .map(|x| parse_arg(x))
                .collect::<Result<_, _>>()?
        } else {
            return Err(Failure::input(format!(
                "--points has {} entries, expected {n}",
                c.points.len()
            )));
        };
        if let Some(t) = c.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(Failure::input(format!("--tol must be positive, got {t}")));
            }
        }
        Ok(RunConfig {
            n,
            alpha,
            marked_points,
            mode: c.mode.or(mode_from_input).unwrap_or(Mode::Exact),
            seed: c.seed,
            tolerance: c.tol,
            trials: c.trials.unwrap_or(DEFAULT_TRIALS),
        })
    }

    pub fn marked<F: Scalar>(&self) -> Result<MarkedPoints<F>, Error> {
        MarkedPoints::new(self.marked_points.iter().map(F::from_rational).collect())
    }

    fn alpha_json(&self) -> Value {
        json!(self
            .alpha
            .as_slice()
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>())
    }
}

fn parse_arg(s: &str) -> Result<BigRational, Failure> {
    parse_rational(s).map_err(Failure::input)
}

/// A command outcome other than success.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Self::new(EXIT_INPUT, message)
    }

    fn from_error_input(e: Error) -> Self {
        Self::input(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Sample(c) => cmd_sample(&RunConfig::resolve(&c, None, None)?, out, err),
        Command::Check { input, common } => {
            let file = read_point(&input)?;
            let cfg = RunConfig::resolve(&common, Some(file.n()), Some(file.mode()))?;
            cmd_check(&cfg, &file, out, err)
        }
        Command::Map { input, common } => {
            let file = read_point(&input)?;
            let cfg = RunConfig::resolve(&common, Some(file.n()), Some(file.mode()))?;
            cmd_map(&cfg, file, out, err)
        }
        Command::Verify { common, perturb } => {
            cmd_verify(&RunConfig::resolve(&common, None, None)?, perturb, out, err)
        }
        Command::Scan {
            common,
            grid,
            collinear,
        } => cmd_scan(
            &RunConfig::resolve(&common, None, None)?,
            grid,
            collinear,
            out,
            err,
        ),
    }
}

fn apply_tolerance(cfg: &RunConfig) {
    if let Some(t) = cfg.tolerance {
        set_tolerance(t);
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::new(EXIT_INPUT, format!("writing output: {e}")))
}

fn read_point(path: &PathBuf) -> Result<PointFile, Failure> {
    let mut text = String::new();
    let read = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    read.map_err(|e| Failure::input(format!("reading {}: {e}", path.display())))?;
    point_from_str(&text).map_err(Failure::from_error_input)
}

fn to_approx(p: &HyperpolygonPoint<GaussRat>) -> HyperpolygonPoint<Complex64> {
    HyperpolygonPoint::new(
        p.ys()
            .iter()
            .map(|y| Covector2::new(y.0[0].to_complex(), y.0[1].to_complex()))
            .collect(),
        p.zs()
            .iter()
            .map(|z| Vector2::new(z.0[0].to_complex(), z.0[1].to_complex()))
            .collect(),
    )
    .expect("a nonzero Gaussian rational stays nonzero as a float")
}

fn cmd_sample(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    apply_tolerance(cfg);
    if cfg.n < 4 {
        return Err(Failure::new(
            EXIT_SAMPLING,
            format!(
                "cannot sample n = {}: the level set has no points with y != 0 and distinct lines",
                cfg.n
            ),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let json = match cfg.mode {
        Mode::Exact => sample_level_set::<GaussRat, _>(cfg.n, &mut rng).map(|p| point_to_json(&p)),
        Mode::Approx => {
            sample_level_set::<Complex64, _>(cfg.n, &mut rng).map(|p| point_to_json(&p))
        }
    }
    .map_err(|e| Failure::new(EXIT_SAMPLING, e.to_string()))?;
    emit(out, &to_pretty(&json))?;
    let _ = writeln!(
        err,
        "sampled n = {} ({} mode, seed {})",
        cfg.n, cfg.mode, cfg.seed
    );
    Ok(())
}

fn cmd_check(
    cfg: &RunConfig,
    file: &PointFile,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    apply_tolerance(cfg);
    let p = match (cfg.mode, file) {
        (Mode::Exact, PointFile::Exact(p)) => p,
        _ => {
            return Err(Failure::new(
                EXIT_APPROX_STABILITY,
                "stability is only decided in exact mode (input and --mode must both be exact)",
            ))
        }
    };
    let mut report = json!({
        "mode": "exact",
        "n": p.n(),
        "alpha": cfg.alpha_json(),
        "level_set": is_in_level_set(p),
        "convention": "strict slope: every invariant line subbundle L has pardeg(L) < pardeg(E)/2",
    });
    let h = match to_higgs(
        p,
        &cfg.marked().map_err(Failure::from_error_input)?,
        &cfg.alpha,
    ) {
        Ok(h) => h,
        Err(Error::NotOnLevelSet) => {
            for key in [
                "residue_sum_zero",
                "strongly_parabolic",
                "stable",
                "semistable",
            ] {
                report[key] = Value::Null;
            }
            emit(out, &to_pretty(&report))?;
            let _ = writeln!(err, "point is not on the level set");
            return Ok(());
        }
        Err(e) => return Err(Failure::from_error_input(e)),
    };
    report["residue_sum_zero"] = json!(residues_sum_to_zero(&h));
    report["strongly_parabolic"] = json!(check_strong_parabolicity(&h));
    let s = stability(&h).map_err(Failure::from_error_input)?;
    report["stable"] = json!(s.stable);
    report["semistable"] = json!(s.semistable);
    report["strictly_semistable"] = json!(s.strictly_semistable());
    report["max_pardeg"] = s
        .max_pardeg
        .as_ref()
        .map_or(Value::Null, |d| json!(d.to_string()));
    report["threshold"] = json!(s.threshold.to_string());
    report["k_max"] = json!(s.k_max);
    report["case"] = json!(s.case.as_str());
    report["witness"] = s.witness.as_ref().map_or(
        Value::Null,
        |(k, incidences)| json!({"degree": -(*k as i64), "incidences": incidences}),
    );
    emit(out, &to_pretty(&report))?;
    let verdict = if s.stable {
        "stable"
    } else if s.semistable {
        "strictly semistable"
    } else {
        "unstable"
    };
    let _ = writeln!(err, "{verdict}");
    Ok(())
}

fn cmd_map(
    cfg: &RunConfig,
    file: PointFile,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    apply_tolerance(cfg);
    let json = match (cfg.mode, file) {
        (Mode::Exact, PointFile::Exact(p)) => map_point(cfg, &p)?,
        (Mode::Approx, PointFile::Exact(p)) => map_point(cfg, &to_approx(&p))?,
        (Mode::Approx, PointFile::Approx(p)) => map_point(cfg, &p)?,
        (Mode::Exact, PointFile::Approx(_)) => {
            return Err(Failure::input(
                "an approximate point cannot be mapped in exact mode",
            ))
        }
    };
    emit(out, &to_pretty(&json))?;
    let _ = writeln!(err, "mapped n = {} ({} mode)", cfg.n, cfg.mode);
    Ok(())
}

fn map_point<F: Scalar>(cfg: &RunConfig, p: &HyperpolygonPoint<F>) -> Result<Value, Failure> {
    let points = cfg.marked().map_err(Failure::from_error_input)?;
    let h = to_higgs(p, &points, &cfg.alpha).map_err(|e| match e {
        Error::NotOnLevelSet => Failure::new(EXIT_SAMPLING, "point is not on the level set"),
        e => Failure::from_error_input(e),
    })?;
    higgs_to_json(&h).map_err(Failure::from_error_input)
}

/// Merged outcome of the verification suites.
struct VerifyOutcome {
    report: Value,
    failed: Vec<&'static str>,
}

fn cmd_verify(
    cfg: &RunConfig,
    perturb: Option<f64>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    apply_tolerance(cfg);
    if cfg.n < 4 {
        return Err(Failure::new(
            EXIT_SAMPLING,
            format!("verify needs n >= 4, got {}", cfg.n),
        ));
    }
    let outcome = match cfg.mode {
        Mode::Exact => verify_suites::<GaussRat>(cfg, perturb),
        Mode::Approx => verify_suites::<Complex64>(cfg, perturb),
    }?;
    emit(out, &to_pretty(&outcome.report))?;
    if outcome.failed.is_empty() {
        let _ = writeln!(err, "verify: pass");
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_VERIFY_FAILED,
            format!("verify failed: {}", outcome.failed.join(", ")),
        ))
    }
}

fn residual_json(r: &Residual) -> Value {
    json!({"max_residual": r.to_string(), "pass": r.pass()})
}

fn verify_suites<F: RandomScalar>(
    cfg: &RunConfig,
    perturb: Option<f64>,
) -> Result<VerifyOutcome, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let marked = cfg.marked::<F>().map_err(Failure::from_error_input)?;
    let mut failed = Vec::new();
    let mut report = json!({
        "mode": F::MODE.as_str(),
        "n": cfg.n,
        "seed": cfg.seed,
        "alpha": cfg.alpha_json(),
        "points": VERIFY_POINTS,
        "stability_checked": F::MODE == Mode::Exact,
    });

    let mut points = Vec::with_capacity(VERIFY_POINTS);
    for _ in 0..VERIFY_POINTS {
        points.push(sample_stable::<F>(cfg, &marked, &mut rng)?);
    }
    if let Some(eps) = perturb {
        let eps = F::from_rational(
            &BigRational::from_float(eps)
                .ok_or_else(|| Failure::input("--perturb must be finite"))?,
        );
        points = points
            .into_iter()
            .map(|p| {
                let y = p.y(0);
                p.with_y(
                    0,
                    Covector2::new(y.0[0].clone() + eps.clone(), y.0[1].clone()),
                )
            })
            .collect();
    }

    let on_level_set = points.iter().all(is_in_level_set);
    report["level_set"] = json!({"pass": on_level_set});
    if !on_level_set {
        failed.push("level-set");
        for key in [
            "theorem1",
            "two_form",
            "descent",
            "gauge",
            "equivariance",
            "dimension",
            "rank",
        ] {
            report[key] = json!("skipped");
        }
        report["pass"] = json!(false);
        report["failed"] = json!(failed);
        return Ok(VerifyOutcome { report, failed });
    }

    let per_point = cfg.trials.div_ceil(VERIFY_POINTS);
    let mode = F::MODE;
    let (mut one, mut two, mut descent, mut gauge) = (
        Residual::zero(mode),
        Residual::zero(mode),
        Residual::zero(mode),
        Residual::zero(mode),
    );
    for p in &points {
        let r = verify_theorem1(p, &marked, &cfg.alpha, per_point, &mut rng)
            .map_err(|e| Failure::new(EXIT_VERIFY_FAILED, e.to_string()))?;
        one = one.merge(r.one_form);
        two = two.merge(r.two_form);
        descent = descent.merge(r.descent);
        gauge = gauge.merge(r.gauge);
    }
    let mut theorem1 = residual_json(&one);
    theorem1["trials"] = json!(per_point * VERIFY_POINTS);
    report["theorem1"] = theorem1;
    report["two_form"] = residual_json(&two);
    report["descent"] = residual_json(&descent);
    report["gauge"] = residual_json(&gauge);
    for (name, r) in [
        ("theorem1", &one),
        ("two-form", &two),
        ("descent", &descent),
        ("gauge", &gauge),
    ] {
        if !r.pass() {
            failed.push(name);
        }
    }

    let mut invariance = Residual::zero(mode);
    let mut orbit_stays = true;
    let mut verdict_invariant = true;
    for p in &points {
        let basis = tangent_basis(p);
        let verdict = exact_verdict(p, &marked, &cfg.alpha);
        for _ in 0..GROUP_SAMPLES {
            let g = random_group_element::<F, _>(cfg.n, &mut rng);
            let s = random_tangent(&basis, cfg.n, &mut rng);
            let t = random_tangent(&basis, cfg.n, &mut rng);
            let scale = pair_scale(&s, &t) + pair_scale(&act_tangent(&g, &s), &act_tangent(&g, &t));
            invariance.record(&invariance_defect(&g, &s, &t), scale);
            let q = act(&g, p);
            orbit_stays &= is_in_level_set(&q);
            verdict_invariant &= exact_verdict(&q, &marked, &cfg.alpha) == verdict;
        }
    }
    let equivariance_pass = invariance.pass() && orbit_stays && verdict_invariant;
    report["equivariance"] = json!({
        "group_elements": GROUP_SAMPLES * VERIFY_POINTS,
        "max_residual": invariance.to_string(),
        "level_set_preserved": orbit_stays,
        "stability_invariant": verdict_invariant,
        "pass": equivariance_pass,
    });
    if !equivariance_pass {
        failed.push("equivariance");
    }

    let dims: Vec<_> = points.iter().map(dimension_counts).collect();
    let dims_pass = dims.iter().all(|d| d.pass());
    let worst = dims.iter().find(|d| !d.pass()).unwrap_or(&dims[0]);
    report["dimension"] = json!({
        "tangent": worst.tangent,
        "orbit": worst.orbit,
        "reduced": worst.reduced(),
        "expected": {"tangent": 3 * cfg.n - 3, "orbit": cfg.n + 3, "reduced": 2 * cfg.n - 6},
        "pass": dims_pass,
    });
    if !dims_pass {
        failed.push("dimension");
    }

    let ranks: Vec<_> = points.iter().map(reduced_gram_rank).collect();
    let rank_pass = ranks.iter().all(|r| r.pass());
    let worst = ranks.iter().find(|r| !r.pass()).unwrap_or(&ranks[0]);
    report["rank"] = json!({"expected": worst.expected, "got": worst.reduced, "full_tangent": worst.full_tangent, "pass": rank_pass});
    if !rank_pass {
        failed.push("rank");
    }

    report["pass"] = json!(failed.is_empty());
    report["failed"] = json!(failed);
    Ok(VerifyOutcome { report, failed })
}

/// Stability verdict when it can be decided, `None` in approximate mode.
fn exact_verdict<F: Scalar>(
    p: &HyperpolygonPoint<F>,
    marked: &MarkedPoints<F>,
    alpha: &WeightVector,
) -> Option<bool> {
    if F::MODE == Mode::Approx {
        return None;
    }
    to_higgs(p, marked, alpha)
        .and_then(|h| stability(&h))
        .ok()
        .map(|s| s.stable)
}

/// A sampled level-set point, stable for the configured weights in exact
/// mode. Approximate samples are used as drawn.
fn sample_stable<F: RandomScalar>(
    cfg: &RunConfig,
    marked: &MarkedPoints<F>,
    rng: &mut ChaCha8Rng,
) -> Result<HyperpolygonPoint<F>, Failure> {
    for _ in 0..STABLE_ATTEMPTS {
        let p = sample_level_set::<F, _>(cfg.n, rng)
            .map_err(|e| Failure::new(EXIT_SAMPLING, e.to_string()))?;
        if F::MODE == Mode::Approx || exact_verdict(&p, marked, &cfg.alpha) == Some(true) {
            return Ok(p);
        }
    }
    Err(Failure::new(
        EXIT_SAMPLING,
        format!("no stable point found in {STABLE_ATTEMPTS} samples for the given weights"),
    ))
}

fn cmd_scan(
    cfg: &RunConfig,
    grid: usize,
    collinear: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    apply_tolerance(cfg);
    if cfg.mode == Mode::Approx {
        return Err(Failure::new(
            EXIT_APPROX_STABILITY,
            "scan decides stability and needs exact mode",
        ));
    }
    if grid == 0 {
        return Err(Failure::input("--grid must be at least 1"));
    }
    let rows = (0..cfg.n)
        .try_fold(1usize, |acc, _| acc.checked_mul(grid))
        .filter(|r| *r <= MAX_SCAN_ROWS);
    let Some(rows) = rows else {
        return Err(Failure::input(format!(
            "grid^n exceeds {MAX_SCAN_ROWS} rows"
        )));
    };
    if !collinear && cfg.n < 4 {
        return Err(Failure::new(
            EXIT_SAMPLING,
            format!("generic samples need n >= 4, got {}", cfg.n),
        ));
    }
    let marked = cfg
        .marked::<GaussRat>()
        .map_err(Failure::from_error_input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::with_capacity(cfg.trials);
    for _ in 0..cfg.trials {
        let p = if collinear {
            sample_collinear_level_set::<GaussRat, _>(cfg.n, &mut rng)
        } else {
            sample_level_set::<GaussRat, _>(cfg.n, &mut rng)
        }
        .map_err(|e| Failure::new(EXIT_SAMPLING, e.to_string()))?;
        let h = to_higgs(&p, &marked, &cfg.alpha).map_err(Failure::from_error_input)?;
        let lines = all_invariant_lines(&h).map_err(Failure::from_error_input)?;
        samples.push((h, lines));
    }

    let mut csv = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = (1..=cfg.n)
        .map(|i| format!("alpha_{i}"))
        .chain(["samples".into(), "stable_count".into()])
        .collect();
    csv.write_record(&header)
        .map_err(|e| Failure::input(e.to_string()))?;
    let axis: Vec<BigRational> = (1..=grid)
        .map(|j| BigRational::new((j as i64).into(), (grid as i64 + 1).into()))
        .collect();
    for row in 0..rows {
        let mut index = row;
        let mut alpha = vec![axis[0].clone(); cfg.n];
        for a in alpha.iter_mut().rev() {
            *a = axis[index % grid].clone();
            index /= grid;
        }
        let weights = WeightVector::new(alpha.clone()).map_err(Failure::from_error_input)?;
        let mut stable = 0;
        for (h, lines) in &samples {
            let h = h
                .with_weights(weights.clone())
                .map_err(Failure::from_error_input)?;
            if stability_with_lines(&h, lines)
                .map_err(Failure::from_error_input)?
                .stable
            {
                stable += 1;
            }
        }
        let record: Vec<String> = alpha
            .iter()
            .map(ToString::to_string)
            .chain([samples.len().to_string(), stable.to_string()])
            .collect();
        csv.write_record(&record)
            .map_err(|e| Failure::input(e.to_string()))?;
    }
    let bytes = csv
        .into_inner()
        .map_err(|e| Failure::input(e.to_string()))?;
    emit(out, &String::from_utf8(bytes).expect("csv of ASCII fields"))?;
    let _ = writeln!(
        err,
        "scanned {rows} weight vectors over {} samples",
        samples.len()
    );
    Ok(())
}
