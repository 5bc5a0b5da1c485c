//! Subcommand implementations, generic over the working precision.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use siegel_renorm::arithmetic::{fib_q, RotationNumber};
use siegel_renorm::cache::{read_pyramid, write_pyramid};
use siegel_renorm::geometry::{
    geometry_ratio, probe, qs_constant, tune_search, universal_constants, GeometryRatio,
    GeometryReport, ProbePoints, QsEstimate, TuneConfig, TuneResult, UniversalConstants,
};
use siegel_renorm::linearize::{boundary_trace, render_siegel, CurveSample};
use siegel_renorm::renorm::oned::{fixed_point_1d, FixedPoint1D};
use siegel_renorm::renorm::LevelSummary;
use siegel_renorm::scalar::{from_c64, golden, to_c64};
use siegel_renorm::universality::{
    chi_at_one, default_grid, universal_functions, UniversalFunctions,
};
use siegel_renorm::{Error, HenonParams, Pyramid, QuadParams, Real};

use crate::error::CliError;
use crate::output::{f17, Session};

/// `golden` or a decimal rotation number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Theta {
    Golden,
    Value(f64),
}

impl Theta {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("golden") {
            return Ok(Theta::Golden);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| CliError::Arg(format!("bad rotation number {s:?}")))?;
        if !v.is_finite() {
            return Err(CliError::Arg(format!("bad rotation number {s:?}")));
        }
        Ok(Theta::Value(v))
    }

    pub fn value<T: Real>(self) -> T {
        match self {
            Theta::Golden => golden(),
            Theta::Value(v) => T::of(v),
        }
    }

    fn require_golden(self, what: &str) -> Result<(), CliError> {
        match self {
            Theta::Golden => Ok(()),
            Theta::Value(v) if (v - golden::<f64>()).abs() < 1e-15 => Ok(()),
            Theta::Value(_) => Err(CliError::Arg(format!(
                "{what} is implemented for the golden mean only"
            ))),
        }
    }
}

/// `re,im` or a bare real part.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Arg(format!("expected re,im but got {s:?}"));
    let mut it = s.split(',').map(str::trim);
    let re: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let im: f64 = match it.next() {
        Some(v) => v.parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if it.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

pub fn parse_size(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Arg(format!("expected WxH but got {s:?}"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

pub fn parse_window(s: &str) -> Result<(Complex64, f64), CliError> {
    let bad = || CliError::Arg(format!("expected cx,cy,w but got {s:?}"));
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if v.len() != 3 || v[2].is_nan() || v[2] <= 0.0 {
        return Err(bad());
    }
    Ok((Complex64::new(v[0], v[1]), v[2]))
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), CliError> {
    let c = parse_complex(s)?;
    Ok((c.re, c.im))
}

fn params<T: Real>(s: &Session, theta: Theta, b: Complex64) -> Result<HenonParams<T>, CliError> {
    Ok(HenonParams::from_rotation(
        theta.value::<T>(),
        from_c64(b),
        s.config.epsilon_bar,
    )?)
}

fn build<T: Real>(
    s: &Session,
    theta: Theta,
    b: Complex64,
    depth: usize,
) -> Result<Pyramid<T>, CliError> {
    let p = params::<T>(s, theta, b)?;
    if p.outside_epsilon_bar {
        eprintln!(
            "warning: |b| = {} exceeds epsilon_bar = {}",
            b.norm(),
            s.config.epsilon_bar
        );
    }
    Ok(Pyramid::build(p, depth, s.config.pyramid_options::<T>())?)
}

fn fixed_point<T: Real>(s: &Session) -> Result<FixedPoint1D<T>, CliError> {
    Ok(fixed_point_1d::<T>(s.config.fixed_point_tol, 80)?)
}

fn constants<T: Real>(
    s: &Session,
    fp: &FixedPoint1D<T>,
    pyr: &Pyramid<T>,
) -> Result<UniversalConstants, CliError> {
    let n = s.config.chi_level.min(pyr.depth().saturating_sub(1));
    Ok(universal_constants(fp, chi_at_one(pyr, n)?)?)
}

#[derive(Serialize)]
struct CfOut {
    theta: f64,
    coeffs: Vec<u64>,
    convergents: Vec<(u64, u64)>,
}

pub fn cf<T: Real>(
    s: &mut Session,
    theta: Theta,
    terms: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let r = match theta {
        Theta::Golden => RotationNumber::golden(terms),
        Theta::Value(_) => RotationNumber::new(theta.value::<T>(), terms)?,
    };
    let path = s.path(out, "cf.json");
    s.write_json(
        &path,
        &CfOut {
            theta: r.theta,
            coeffs: r.coeffs,
            convergents: r.convergents,
        },
    )
}

#[derive(Serialize)]
struct HenonOut {
    theta: f64,
    b: Complex64,
    c: Complex64,
    mu: Complex64,
    nu: Complex64,
    x_fix: Complex64,
    outside_epsilon_bar: bool,
    eigenvalues: [Complex64; 2],
    multiplier_residual: [f64; 2],
    fixed_point_residual: f64,
}

pub fn henon_solve<T: Real>(
    s: &mut Session,
    theta: Theta,
    b: Complex64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let p = params::<T>(s, theta, b)?;
    let (m, n) = p.fixed_point_eigenvalues();
    let (rm, rn) = p.multiplier_residual();
    let o = HenonOut {
        theta: p.theta.to_f64(),
        b: to_c64(p.b),
        c: to_c64(p.c),
        mu: to_c64(p.mu),
        nu: to_c64(p.nu),
        x_fix: to_c64(p.x_fix),
        outside_epsilon_bar: p.outside_epsilon_bar,
        eigenvalues: [to_c64(m), to_c64(n)],
        multiplier_residual: [rm, rn],
        fixed_point_residual: p.fixed_point_residual(),
    };
    let path = s.path(out, "henon.json");
    s.write_json(&path, &o)
}

pub fn render(
    s: &mut Session,
    theta: Theta,
    size: (usize, usize),
    window: (Complex64, f64),
    iters: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let q = QuadParams::<f64>::from_rotation(theta.value::<f64>());
    let img = render_siegel(&q, size.0, size.1, window.0, window.1, iters)?;
    let mut buf = Vec::new();
    img.write_ppm(&mut buf)?;
    let path = s.path(out, "render.ppm");
    s.write_bytes(&path, &buf)
}

fn trace_rows(c: &CurveSample) -> Vec<Vec<String>> {
    c.points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            vec![
                i.to_string(),
                f17(c.index_angle(i)),
                f17(p[0].re),
                f17(p[0].im),
                f17(p[1].re),
                f17(p[1].im),
            ]
        })
        .collect()
}

pub const TRACE_HEADER: [&str; 6] = ["index", "angle", "re_x", "im_x", "re_y", "im_y"];

pub fn trace_with<T: Real>(
    s: &mut Session,
    params: &HenonParams<T>,
    pyr: Option<&Pyramid<T>>,
    count: usize,
    path: &Path,
) -> Result<CurveSample, CliError> {
    let c = boundary_trace(params, pyr, count)?;
    s.write_csv(path, &TRACE_HEADER, &trace_rows(&c))?;
    Ok(c)
}

pub fn trace_boundary<T: Real>(
    s: &mut Session,
    theta: Theta,
    b: Complex64,
    depth: usize,
    count: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if count < 2 {
        return Err(CliError::Arg("count must be at least 2".into()));
    }
    let p = params::<T>(s, theta, b)?;
    let pyr = if b.norm() == 0.0 {
        None
    } else {
        Some(build::<T>(s, theta, b, depth)?)
    };
    let path = s.path(out, "trace.csv");
    trace_with(s, &p, pyr.as_ref(), count, &path)?;
    Ok(())
}

pub fn read_trace(s: &mut Session, path: &Path) -> Result<CurveSample, CliError> {
    let bytes = s.read_input(path)?;
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Arg(format!("{}: missing column {name}", path.display())))
    };
    let cols = [col("re_x")?, col("im_x")?, col("re_y")?, col("im_y")?];
    let mut pts = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut v = [0f64; 4];
        for (k, &c) in cols.iter().enumerate() {
            let f = rec.get(c).unwrap_or("");
            v[k] = f.trim().parse().map_err(|_| {
                CliError::Arg(format!(
                    "{}: row {}: bad number {f:?}",
                    path.display(),
                    line + 2
                ))
            })?;
        }
        pts.push([Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])]);
    }
    let mut c = CurveSample::ordered(pts);
    c.theta = golden::<f64>();
    Ok(c)
}

#[derive(Serialize)]
struct PyramidOut {
    theta: f64,
    b: Complex64,
    precision: &'static str,
    outside_epsilon_bar: bool,
    lambda_star: Option<Complex64>,
    levels: Vec<LevelSummary>,
    cache: PathBuf,
}

pub fn renorm<T: Real>(
    s: &mut Session,
    theta: Theta,
    b: Complex64,
    depth: usize,
    out: Option<&Path>,
    cache: Option<&Path>,
) -> Result<Pyramid<T>, CliError> {
    let pyr = build::<T>(s, theta, b, depth)?;
    let lambda_star = if matches!(theta, Theta::Golden) {
        Some(to_c64(fixed_point::<T>(s)?.lambda()))
    } else {
        None
    };
    let mut bin = Vec::new();
    write_pyramid(&pyr, &mut bin)?;
    let cache_path = s.path(cache, "pyramid.srnm");
    s.write_bytes(&cache_path, &bin)?;
    let o = PyramidOut {
        theta: pyr.params.theta.to_f64(),
        b,
        precision: T::NAME,
        outside_epsilon_bar: pyr.params.outside_epsilon_bar,
        lambda_star,
        levels: pyr.summaries(),
        cache: cache_path,
    };
    let path = s.path(out, "pyramid.json");
    s.write_json(&path, &o)?;
    Ok(pyr)
}

pub fn load_or_build<T: Real>(
    s: &mut Session,
    theta: Theta,
    b: Complex64,
    depth: usize,
    cache: Option<&Path>,
) -> Result<Pyramid<T>, CliError> {
    if let Some(path) = cache {
        let bytes = s.read_input(path)?;
        let pyr: Pyramid<T> = read_pyramid(&mut bytes.as_slice())?;
        if pyr.depth() < depth {
            return Err(Error::DepthExceeded {
                need: depth,
                have: pyr.depth(),
            }
            .into());
        }
        return Ok(pyr);
    }
    build::<T>(s, theta, b, depth)
}

const UNIV_HEADER: [&str; 18] = [
    "n",
    "re_x",
    "im_x",
    "re_beta",
    "im_beta",
    "re_alpha",
    "im_alpha",
    "re_chi",
    "im_chi",
    "re_u_n",
    "im_u_n",
    "re_lambda_n",
    "im_lambda_n",
    "re_t_n",
    "im_t_n",
    "beta_gap",
    "alpha_ratio_gap",
    "chi_form_gap",
];

fn opt_c(z: Option<Complex64>) -> [String; 2] {
    match z {
        Some(z) => [f17(z.re), f17(z.im)],
        None => [String::new(), String::new()],
    }
}

fn opt_f(v: Option<f64>) -> String {
    v.map(f17).unwrap_or_default()
}

fn universality_rows(u: &UniversalFunctions) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for be in &u.beta {
        let al = u.alpha.iter().find(|a| a.n == be.n);
        let ch = u.chi.iter().find(|c| c.n == be.n);
        let cap = u.caps.iter().find(|c| c.n == be.n);
        for (i, x) in be.x.iter().enumerate() {
            let mut r = vec![
                be.n.to_string(),
                f17(x.re),
                f17(x.im),
                f17(be.beta[i].re),
                f17(be.beta[i].im),
            ];
            r.extend(opt_c(al.map(|a| a.alpha[i])));
            r.extend(opt_c(ch.map(|c| c.chi[i])));
            r.extend(opt_c(cap.map(|c| c.u)));
            r.extend(opt_c(cap.map(|c| c.lambda)));
            r.extend(opt_c(cap.and_then(|c| c.t)));
            r.push(opt_f(be.gap));
            r.push(opt_f(al.map(|a| a.ratio_gap)));
            r.push(opt_f(ch.map(|c| c.form_gap)));
            rows.push(r);
        }
    }
    rows
}

pub fn universality<T: Real>(
    s: &mut Session,
    pyr: &Pyramid<T>,
    out: Option<&Path>,
    json: Option<&Path>,
) -> Result<UniversalFunctions, CliError> {
    let fp = fixed_point::<T>(s)?;
    let grid = default_grid::<T>();
    let u = universal_functions(pyr, &fp, 0..=pyr.depth(), &grid)?;
    let path = s.path(out, "universality.csv");
    s.write_csv(&path, &UNIV_HEADER, &universality_rows(&u))?;
    let jpath = match json {
        Some(p) => p.to_path_buf(),
        None => path.with_extension("json"),
    };
    s.write_json(&jpath, &u)?;
    Ok(u)
}

#[derive(Serialize)]
pub struct ProbeOut {
    pub constants: UniversalConstants,
    pub points: ProbePoints,
    pub report: GeometryReport,
    pub ratio: GeometryRatio,
}

pub fn probe_run<T: Real>(
    s: &mut Session,
    pyr: &Pyramid<T>,
    n: usize,
    k: usize,
    out: Option<&Path>,
) -> Result<ProbeOut, CliError> {
    let fp = fixed_point::<T>(s)?;
    let consts = constants(s, &fp, pyr)?;
    let (points, report) = probe(pyr, n, k, &consts)?;
    let ratio = geometry_ratio(pyr, n, k, &consts)?;
    let o = ProbeOut {
        constants: consts,
        points,
        report,
        ratio,
    };
    let path = s.path(out, "probe.json");
    s.write_json(&path, &o)?;
    Ok(o)
}

#[derive(Serialize)]
struct TuneOut<'a> {
    theta: f64,
    arg_b: f64,
    config: &'a TuneConfig,
    constants: &'a UniversalConstants,
    closed_form_modulus: f64,
    result: &'a TuneResult,
    diagnostic: Option<String>,
}

/// Runs the tuning search and records the result; the returned flag is the
/// membership test.
#[allow(clippy::too_many_arguments)]
pub fn tune<T: Real>(
    s: &mut Session,
    theta: Theta,
    n: usize,
    k: usize,
    arg_b: f64,
    cfg: &TuneConfig,
    b_ref: f64,
    out: Option<&Path>,
) -> Result<TuneResult, CliError> {
    theta.require_golden("tune-b")?;
    let fp = fixed_point::<T>(s)?;
    let reference = build::<T>(
        s,
        theta,
        Complex64::from_polar(b_ref, arg_b),
        s.config.chi_level + 1,
    )?;
    let consts = constants(s, &fp, &reference)?;
    let opts = s.config.pyramid_options::<T>();
    let r = tune_search(
        theta.value::<T>(),
        n,
        k,
        arg_b,
        cfg,
        &opts,
        s.config.epsilon_bar,
        &consts,
    )?;
    let diagnostic = (!r.passed).then(|| {
        Error::NoCancellation {
            achieved: r.achieved,
            required: r.required,
            detail: format!(
                "(n, k) = ({n}, {k}), closed-form |b| = {:.4}",
                consts.seed_modulus(n, k)
            ),
        }
        .to_string()
    });
    let o = TuneOut {
        theta: theta.value::<f64>(),
        arg_b,
        config: cfg,
        constants: &consts,
        closed_form_modulus: consts.seed_modulus(n, k),
        result: &r,
        diagnostic,
    };
    let path = s.path(out, "tune.json");
    s.write_json(&path, &o)?;
    Ok(r)
}

pub fn qs(
    s: &mut Session,
    input: &Path,
    budget: usize,
    out: Option<&Path>,
) -> Result<QsEstimate, CliError> {
    let c = read_trace(s, input)?;
    let q = qs_constant(&c, budget)?;
    let path = s.path(out, "qs.json");
    s.write_json(&path, &q)?;
    Ok(q)
}

/// `renorm -> universality -> tune-b -> probe -> trace-boundary -> qs`.
#[allow(clippy::too_many_arguments)]
pub fn all<T: Real>(
    s: &mut Session,
    theta: Theta,
    b: Complex64,
    n: usize,
    k: usize,
    depth: Option<usize>,
    cfg: &TuneConfig,
    budget: usize,
) -> Result<(), CliError> {
    theta.require_golden("all")?;
    let depth = depth.unwrap_or((n + k + 1).max(s.config.chi_level + 1));
    let pyr = renorm::<T>(s, theta, b, depth, None, None)?;
    universality(s, &pyr, None, None)?;
    let arg = if b.norm() > 0.0 { b.arg() } else { 0.0 };
    let b_ref = if b.norm() > 0.0 { b.norm() } else { 0.05 };
    let tuned = tune::<T>(s, theta, n, k, arg, cfg, b_ref, None)?;
    if !tuned.passed {
        eprintln!(
            "note: no cancellation in the bracket (achieved {:e}, required {:e}); probing at the given b",
            tuned.achieved, tuned.required
        );
    }
    probe_run(s, &pyr, n, k, None)?;
    let count = fib_q(2 * (n + k) + 5) as usize;
    let trace_path = s.path(None, "trace.csv");
    let c = trace_with(s, &pyr.params, Some(&pyr), count, &trace_path)?;
    let q = qs_constant(&c, budget)?;
    let path = s.path(None, "qs.json");
    s.write_json(&path, &q)?;
    Ok(())
}
