//! `freemult`: densities, supports and boundaries of `μ ⊠ λ_t` and `ν ⊠ σ_t`.
//!
//! Exit codes: 0 on success, 2 for bad input or configuration, 3 when the
//! numerics fail (singular kernel, no convergence, degenerate series).

mod output;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freemult::circle::CircleEngine;
use freemult::closed_forms::{
    lambda_density, lambda_support, lambda_u_halfwidth, sigma_density, sigma_support,
};
use freemult::halfline::HalfLineEngine;
use freemult::selftest::{run_criterion, run_selftest, SelftestReport, Status, CRITERIA};
use freemult::series::{convolution_moments, DEFAULT_ORDER};
use freemult::{CircleMeasure, Error, HalfLineMeasure, Measure, SolverConfig};
use serde_json::{json, Value};

use output::{num, Table};

#[derive(Parser)]
#[command(
    name = "freemult",
    version,
    about = "Free multiplicative convolution with the free normal laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Measure file (JSON).
    #[arg(long, global = true)]
    measure: Option<PathBuf>,
    /// Time parameter, or a comma-separated ladder such as 0.5,1,2,4.
    #[arg(
        long = "t",
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    t: Vec<f64>,
    /// Grid size (at least 64; circle densities need 128).
    #[arg(long, global = true, default_value_t = 512)]
    grid: usize,
    #[arg(long, global = true)]
    tol_root: Option<f64>,
    #[arg(long, global = true)]
    tol_quad: Option<f64>,
    /// Output file; a t-ladder writes one file per t with a `_t<value>` suffix.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Density of μ ⊠ λ_t along the boundary: theta, v, phi, density.
    CircleDensity,
    /// Density of ν ⊠ σ_t along the boundary: r, u, x, density.
    HalflineDensity,
    /// Connected components of the support.
    Support,
    /// Boundary of the subordination domain.
    Boundary,
    /// Moments from the power-series oracle.
    Moments {
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
    },
    /// λ_t or σ_t from their closed forms.
    ClosedForm {
        /// Taken from --measure when given, which must then be δ_1.
        #[arg(long, value_enum)]
        space: Option<Space>,
    },
    /// Admissibility check of a measure file.
    Validate,
    /// Acceptance checks.
    Selftest {
        /// Run a single criterion (1-13).
        #[arg(long)]
        criterion: Option<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    Circle,
    Halfline,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            msg: msg.into(),
        }
    }

    fn numeric(msg: impl Into<String>) -> Self {
        Failure {
            code: 3,
            msg: msg.into(),
        }
    }

    fn from_core(op: &str, t: Option<f64>, e: Error) -> Self {
        let at = t.map(|t| format!(" (t = {t})")).unwrap_or_default();
        let msg = format!("{op}{at}: {e}");
        if e.is_numerical() {
            Failure::numeric(msg)
        } else {
            Failure::input(msg)
        }
    }
}

/// `(lo, hi)` or `(coordinate, value)` pairs.
type Pairs = Vec<(f64, f64)>;

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("freemult: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Outcome<u8> {
    init_threads()?;
    let opts = &cli.opts;
    let cfg = solver_config(opts)?;
    match &cli.command {
        Command::CircleDensity => {
            let m = circle_measure(opts, "circle-density")?;
            per_t(opts, "circle-density", Format::Csv, |t, fmt| {
                circle_density(&m, t, opts.grid, cfg, fmt)
            })
        }
        Command::HalflineDensity => {
            let m = halfline_measure(opts, "halfline-density")?;
            per_t(opts, "halfline-density", Format::Csv, |t, fmt| {
                halfline_density(&m, t, opts.grid, cfg, fmt)
            })
        }
        Command::Support => {
            let m = admissible_measure(opts, "support")?;
            per_t(opts, "support", Format::Json, |t, fmt| {
                support(&m, t, opts.grid, cfg, fmt)
            })
        }
        Command::Boundary => {
            let m = admissible_measure(opts, "boundary")?;
            per_t(opts, "boundary", Format::Csv, |t, fmt| {
                boundary(&m, t, opts.grid, cfg, fmt)
            })
        }
        Command::Moments { order } => {
            if *order == 0 {
                return Err(Failure::input("moments: --order must be positive"));
            }
            let m = admissible_measure(opts, "moments")?;
            per_t(opts, "moments", Format::Json, |t, fmt| {
                moments(&m, t, *order, fmt)
            })
        }
        Command::ClosedForm { space } => {
            let space = closed_form_space(opts, *space)?;
            per_t(opts, "closed-form", Format::Csv, |t, fmt| {
                closed_form(space, t, opts.grid, fmt)
            })
        }
        Command::Validate => validate(opts),
        Command::Selftest { criterion } => selftest(opts, cfg, *criterion),
    }
}

fn init_threads() -> Outcome<()> {
    let Ok(raw) = std::env::var("FREEMULT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::input(format!(
            "FREEMULT_THREADS = {raw:?} is not a positive integer"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::input(format!("FREEMULT_THREADS: {e}")))
}

fn solver_config(opts: &Opts) -> Outcome<SolverConfig> {
    let mut cfg = SolverConfig::default();
    for (name, val, slot) in [
        ("--tol-root", opts.tol_root, &mut cfg.tol_root),
        ("--tol-quad", opts.tol_quad, &mut cfg.tol_quad),
    ] {
        if let Some(v) = val {
            if !(v > 0.0 && v <= 1e-3) {
                return Err(Failure::input(format!(
                    "{name} = {v} must lie in (0, 1e-3]"
                )));
            }
            *slot = v;
        }
    }
    if opts.grid < 64 {
        return Err(Failure::input(format!(
            "--grid = {} must be at least 64",
            opts.grid
        )));
    }
    Ok(cfg)
}

fn load_measure(opts: &Opts, op: &str) -> Outcome<Measure> {
    let path = opts
        .measure
        .as_ref()
        .ok_or_else(|| Failure::input(format!("{op}: --measure is required")))?;
    Measure::from_path(path).map_err(|e| Failure::input(format!("{op}: {e}")))
}

fn admissible_measure(opts: &Opts, op: &str) -> Outcome<Measure> {
    let m = load_measure(opts, op)?;
    m.validate()
        .into_result()
        .map_err(|e| Failure::from_core(op, None, e))?;
    Ok(m)
}

fn circle_measure(opts: &Opts, op: &str) -> Outcome<CircleMeasure> {
    match admissible_measure(opts, op)? {
        Measure::Circle(m) => Ok(m),
        Measure::HalfLine(_) => Err(Failure::input(format!("{op}: needs a circle measure"))),
    }
}

fn halfline_measure(opts: &Opts, op: &str) -> Outcome<HalfLineMeasure> {
    match admissible_measure(opts, op)? {
        Measure::HalfLine(m) => Ok(m),
        Measure::Circle(_) => Err(Failure::input(format!("{op}: needs a half-line measure"))),
    }
}

/// Runs `body` once per t and writes each artifact.
fn per_t(
    opts: &Opts,
    op: &str,
    default: Format,
    body: impl Fn(f64, Format) -> Result<String, Error>,
) -> Outcome<u8> {
    if opts.t.is_empty() {
        return Err(Failure::input(format!("{op}: --t is required")));
    }
    if let Some(&t) = opts.t.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Failure::input(format!("{op}: t = {t} must be positive")));
    }
    let fmt = opts.format.unwrap_or(default);
    let ladder = opts.t.len() > 1;
    if ladder && opts.out.is_none() && fmt == Format::Csv {
        return Err(Failure::input(format!(
            "{op}: a t-ladder with csv output needs --out"
        )));
    }
    for &t in &opts.t {
        let body = body(t, fmt).map_err(|e| Failure::from_core(op, Some(t), e))?;
        let dest = opts.out.as_deref().map(|p| {
            if ladder {
                output::ladder_path(p, t)
            } else {
                p.to_path_buf()
            }
        });
        write_artifact(op, dest.as_deref(), &body)?;
    }
    Ok(0)
}

fn write_artifact(op: &str, dest: Option<&Path>, body: &str) -> Outcome<()> {
    output::write(dest, body).map_err(|e| {
        let to = dest
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "stdout".into());
        Failure::input(format!("{op}: writing {to}: {e}"))
    })
}

fn arcs_json(lo_hi: impl Iterator<Item = (f64, f64)>) -> Value {
    Value::Array(lo_hi.map(|(lo, hi)| json!({"lo": lo, "hi": hi})).collect())
}

fn support_table(lo_hi: impl Iterator<Item = (f64, f64)>) -> String {
    let mut tab = Table::new(&["lo", "hi"]);
    for (lo, hi) in lo_hi {
        tab.push(vec![num(lo), num(hi)]);
    }
    tab.render()
}

fn circle_density(
    m: &CircleMeasure,
    t: f64,
    n: usize,
    cfg: SolverConfig,
    fmt: Format,
) -> Result<String, Error> {
    let e = CircleEngine::new(m, t, cfg)?;
    let p = e.density_profile(n)?;
    Ok(match fmt {
        Format::Csv => {
            let mut tab = Table::new(&["theta", "v", "phi", "density"]);
            for s in &p.samples {
                tab.push(vec![num(s.theta), num(s.v), num(s.phi), num(s.density)]);
            }
            tab.render()
        }
        Format::Json => {
            let s = e.support_components(n)?;
            let top = p.max().expect("profile has samples");
            output::json(&json!({
                "source": "engine",
                "t": t,
                "support": arcs_json(s.arcs.iter().map(|a| (a.lo, a.hi))),
                "count": s.count(),
                "max_density": top.density,
                "max_density_phi": top.phi,
            }))
        }
    })
}

fn halfline_density(
    m: &HalfLineMeasure,
    t: f64,
    n: usize,
    cfg: SolverConfig,
    fmt: Format,
) -> Result<String, Error> {
    let e = HalfLineEngine::new(m, t, cfg)?;
    let p = e.density_profile(n)?;
    Ok(match fmt {
        Format::Csv => {
            let mut tab = Table::new(&["r", "u", "x", "density"]);
            for s in &p.samples {
                tab.push(vec![num(s.r), num(s.u), num(s.x), num(s.density)]);
            }
            tab.render()
        }
        Format::Json => {
            let s = e.support_components(n)?;
            let top = p.max().expect("profile has samples");
            output::json(&json!({
                "source": "engine",
                "t": t,
                "support": arcs_json(s.intervals.iter().map(|i| (i.lo, i.hi))),
                "count": s.count(),
                "max_density": top.density,
                "max_density_x": top.x,
            }))
        }
    })
}

fn support(m: &Measure, t: f64, n: usize, cfg: SolverConfig, fmt: Format) -> Result<String, Error> {
    let comps: Vec<(f64, f64)> = match m {
        Measure::Circle(m) => {
            let s = CircleEngine::new(m, t, cfg)?.support_components(n)?;
            s.arcs.iter().map(|a| (a.lo, a.hi)).collect()
        }
        Measure::HalfLine(m) => {
            let s = HalfLineEngine::new(m, t, cfg)?.support_components(n)?;
            s.intervals.iter().map(|i| (i.lo, i.hi)).collect()
        }
    };
    Ok(match fmt {
        Format::Csv => support_table(comps.iter().copied()),
        Format::Json => output::json(&json!({
            "t": t,
            "support": arcs_json(comps.iter().copied()),
            "count": comps.len(),
        })),
    })
}

fn boundary(
    m: &Measure,
    t: f64,
    n: usize,
    cfg: SolverConfig,
    fmt: Format,
) -> Result<String, Error> {
    // (angle or radius, radius or angle) pairs plus the set they bound
    let (cols, points, set): ([&'static str; 2], Pairs, Pairs) = match m {
        Measure::Circle(m) => {
            let e = CircleEngine::new(m, t, cfg)?;
            let curve = e.boundary_curve(n)?;
            let pts = curve
                .iter()
                .enumerate()
                .map(|(k, z)| (-PI + 2.0 * PI * k as f64 / n as f64, z.norm()))
                .collect();
            let u = e.u_set(n)?;
            (
                ["theta", "v"],
                pts,
                u.arcs.iter().map(|a| (a.lo, a.hi)).collect(),
            )
        }
        Measure::HalfLine(m) => {
            let e = HalfLineEngine::new(m, t, cfg)?;
            let pts = e
                .boundary_curve(n)?
                .iter()
                .map(|z| (z.norm(), z.arg()))
                .collect();
            let v = e.v_set(n)?;
            (
                ["r", "u"],
                pts,
                v.intervals.iter().map(|i| (i.lo, i.hi)).collect(),
            )
        }
    };
    Ok(match fmt {
        Format::Csv => {
            let mut tab = Table::new(&cols);
            for (a, b) in points {
                tab.push(vec![num(a), num(b)]);
            }
            tab.render()
        }
        Format::Json => {
            let pts: Vec<Value> = points
                .iter()
                .map(|&(a, b)| json!({cols[0]: a, cols[1]: b}))
                .collect();
            let set_key = if cols[0] == "theta" { "u_set" } else { "v_set" };
            output::json(&json!({
                "t": t,
                set_key: arcs_json(set.into_iter()),
                "boundary": pts,
            }))
        }
    })
}

fn moments(m: &Measure, t: f64, order: usize, fmt: Format) -> Result<String, Error> {
    let mom = convolution_moments(m, t, order)?;
    Ok(match fmt {
        Format::Csv => {
            let mut tab = Table::new(&["n", "re", "im"]);
            for (k, z) in mom.iter().enumerate() {
                tab.push(vec![(k + 1).to_string(), num(z.re), num(z.im)]);
            }
            tab.render()
        }
        Format::Json => {
            let list: Vec<Value> = mom
                .iter()
                .enumerate()
                .map(|(k, z)| json!({"n": k + 1, "re": z.re, "im": z.im}))
                .collect();
            output::json(&json!({"t": t, "moments": list}))
        }
    })
}

fn closed_form_space(opts: &Opts, space: Option<Space>) -> Outcome<Space> {
    let Some(_) = opts.measure else {
        return Ok(space.unwrap_or(Space::Circle));
    };
    let m = admissible_measure(opts, "closed-form")?;
    let (found, unit) = match &m {
        Measure::Circle(c) => (
            Space::Circle,
            c.ac().is_none() && c.atoms().len() == 1 && c.atoms()[0].loc == 0.0,
        ),
        Measure::HalfLine(h) => (
            Space::Halfline,
            h.ac().is_none() && h.atoms().len() == 1 && h.atoms()[0].loc == 1.0,
        ),
    };
    if !unit {
        return Err(Failure::input(
            "closed-form: the measure must be a point mass at 1",
        ));
    }
    if space.is_some_and(|s| s != found) {
        return Err(Failure::input(
            "closed-form: --space disagrees with the measure file",
        ));
    }
    Ok(found)
}

fn closed_form(space: Space, t: f64, n: usize, fmt: Format) -> Result<String, Error> {
    match space {
        Space::Circle => {
            let sup = lambda_support(t)?;
            let a = lambda_u_halfwidth(t);
            let pts = (0..n)
                .map(|k| {
                    let th = if sup.full_circle {
                        -PI + 2.0 * PI * k as f64 / n as f64
                    } else {
                        -a + 2.0 * a * k as f64 / (n - 1) as f64
                    };
                    lambda_density(t, th)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(match fmt {
                Format::Csv => {
                    let mut tab = Table::new(&["theta", "v", "phi", "density", "source"]);
                    for p in &pts {
                        tab.push(vec![
                            num(p.theta),
                            num(p.v),
                            num(p.phi),
                            num(p.density),
                            "closed_form".into(),
                        ]);
                    }
                    tab.render()
                }
                Format::Json => {
                    let support = match sup.endpoint {
                        Some(e) => vec![(-e, e)],
                        None => vec![(-PI, PI)],
                    };
                    let top = lambda_density(t, 0.0)?;
                    output::json(&json!({
                        "source": "closed_form",
                        "t": t,
                        "support": arcs_json(support.into_iter()),
                        "count": 1,
                        "max_density": top.density,
                        "max_density_phi": top.phi,
                    }))
                }
            })
        }
        Space::Halfline => {
            let sup = sigma_support(t)?;
            let span = (sup.x4 / sup.x3).ln();
            let pts = (0..n)
                .map(|k| sigma_density(t, sup.x3 * (span * k as f64 / (n - 1) as f64).exp()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(match fmt {
                Format::Csv => {
                    let mut tab = Table::new(&["r", "u", "x", "density", "source"]);
                    for p in &pts {
                        tab.push(vec![
                            num(p.r),
                            num(p.u),
                            num(p.x),
                            num(p.density),
                            "closed_form".into(),
                        ]);
                    }
                    tab.render()
                }
                Format::Json => {
                    let top = pts
                        .iter()
                        .max_by(|a, b| a.density.total_cmp(&b.density))
                        .expect("grid is nonempty");
                    output::json(&json!({
                        "source": "closed_form",
                        "t": t,
                        "support": arcs_json(std::iter::once((sup.x3, sup.x4))),
                        "count": 1,
                        "max_density": top.density,
                        "max_density_x": top.x,
                    }))
                }
            })
        }
    }
}

fn validate(opts: &Opts) -> Outcome<u8> {
    let m = load_measure(opts, "validate")?;
    let report = m.validate();
    let fmt = opts.format.unwrap_or(Format::Json);
    let body = match fmt {
        Format::Csv => {
            let mut tab = Table::new(&["issue", "detail"]);
            for i in &report.issues {
                tab.push(vec![i.code().into(), i.to_string()]);
            }
            tab.render()
        }
        Format::Json => {
            let space = match m.space() {
                freemult::measure::Space::Circle => "circle",
                freemult::measure::Space::Halfline => "halfline",
            };
            let issues: Vec<Value> = report
                .issues
                .iter()
                .map(|i| json!({"issue": i.code(), "detail": i.to_string()}))
                .collect();
            output::json(&json!({
                "space": space,
                "admissible": report.is_admissible(),
                "mass_defect": report.mass_defect,
                "issues": issues,
            }))
        }
    };
    write_artifact("validate", opts.out.as_deref(), &body)?;
    if report.is_admissible() {
        Ok(0)
    } else {
        let list: Vec<String> = report.issues.iter().map(|i| i.to_string()).collect();
        Err(Failure::input(format!(
            "validate: inadmissible measure: {}",
            list.join("; ")
        )))
    }
}

fn selftest(opts: &Opts, cfg: SolverConfig, criterion: Option<usize>) -> Outcome<u8> {
    let report = match criterion {
        Some(id) if (1..=CRITERIA.len()).contains(&id) => SelftestReport {
            tol_root: cfg.tol_root,
            tol_quad: cfg.tol_quad,
            results: vec![run_criterion(id, &cfg)],
        },
        Some(id) => {
            return Err(Failure::input(format!(
                "selftest: no criterion {id} (1-{})",
                CRITERIA.len()
            )))
        }
        None => run_selftest(&cfg),
    };
    let body = match opts.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut tab = Table::new(&[
                "id",
                "name",
                "status",
                "measured",
                "tolerance",
                "seconds",
                "detail",
            ]);
            for r in &report.results {
                let status = match r.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                    Status::Degraded => "degraded",
                };
                tab.push(vec![
                    r.id.to_string(),
                    r.name.into(),
                    status.into(),
                    num(r.measured),
                    num(r.tolerance),
                    num(r.seconds),
                    r.detail.clone(),
                ]);
            }
            tab.render()
        }
        Format::Json => output::json(&serde_json::to_value(&report).expect("report serializes")),
    };
    write_artifact("selftest", opts.out.as_deref(), &body)?;
    let failed: Vec<String> = report
        .results
        .iter()
        .filter(|r| r.status == Status::Fail)
        .map(|r| format!("{} ({})", r.id, r.name))
        .collect();
    if failed.is_empty() {
        Ok(0)
    } else {
        Err(Failure::numeric(format!(
            "selftest: failed criteria {}",
            failed.join(", ")
        )))
    }
}
