//! Three-scale probe of the Siegel boundary, tuning of the Jacobian to the
//! cancellation locus, and quasisymmetry estimates of sampled curves.
//!
//! For a pyramid of depth at least `n + k + 1` the probe builds
//!
//! * deep scale: `q = (kappa_{n+k}, 0)`, `p = A_{n+k}(q)`,
//!   `q_check = Phi_{n+k+1} A_{n+k+1}(kappa_{n+k+1}, 0)`;
//! * middle scale: the images of these under `A_n o Phi_n^{n+k}`;
//! * ambient scale: the middle points pushed through `Phi_0^n` and `Phi_0`,
//!   which are points of the orbit of the level-0 cap under `H`.
//!
//! With `Delta = q - p` at each scale, the predicted middle-scale values are
//! `Delta x = lambda*^{2k-1} Delta* x` and
//! `Delta y = lambda*^{k-1} (lambda*^k C1 - b^{q_{2n+1}} C2)`.

pub mod qs;

use num_complex::Complex64;
use serde::Serialize;

use crate::arithmetic::fib_q;
use crate::error::{Error, Result};
use crate::maps::HenonParams;
use crate::renorm::{FixedPoint1D, Point, Pyramid, PyramidOptions};
use crate::scalar::{abs, from_c64, re, to_c64, Real};

pub use qs::{arc_diameter, qs_constant, QsEstimate};

/// Limits of the deep-scale displacements and the constants of the
/// vertical displacement law.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UniversalConstants {
    pub lambda: Complex64,
    /// `1 - lambda*`.
    pub delta_x: Complex64,
    /// `-h*(1)` with `h*(x) = eta*(lambda* x) / lambda*`.
    pub delta_y: Complex64,
    /// `(xi*^{-1})'(lambda*)` on the branch of the second coordinate of `A* o Phi*`.
    pub xi_inv_slope: Complex64,
    /// The measured profile `Jac(A_n o Phi_{n+1}) / (b^{q_{2n+1}} lambda^2)` at `x = 1`.
    pub chi1: Complex64,
    /// `(xi*^{-1})'(lambda*) Delta* x`.
    pub c1: Complex64,
    /// `-lambda* chi1 Delta* y`: the `y`-slope of `A_n o Phi_{n+1}` is
    /// `+b^{q_{2n+1}} lambda chi1`.
    pub c2: Complex64,
}

impl UniversalConstants {
    /// Closed-form cancellation points: the `q_{2n+1}` roots of
    /// `b^{q_{2n+1}} = (C1 / C2) lambda*^k`, all of modulus `self.seed_modulus(n, k)`.
    pub fn seed_modulus(&self, n: usize, k: usize) -> f64 {
        let q = fib_q(2 * n + 1) as f64;
        (self.c1 / self.c2 * self.lambda.powi(k as i32))
            .norm()
            .powf(1.0 / q)
    }

    /// The root whose argument is nearest to `arg_b`.
    pub fn seed(&self, n: usize, k: usize, arg_b: f64) -> Complex64 {
        let q = fib_q(2 * n + 1) as f64;
        let target = (self.c1 / self.c2 * self.lambda.powi(k as i32)).arg();
        let tau = std::f64::consts::TAU;
        let m = ((arg_b * q - target) / tau).round();
        let arg = (target + m * tau) / q;
        Complex64::from_polar(self.seed_modulus(n, k), arg)
    }

    /// `lambda*^{k-1} (lambda*^k C1 - bq C2)`.
    pub fn predicted_dy(&self, k: usize, bq: Complex64) -> Complex64 {
        let l = self.lambda;
        l.powi(k as i32 - 1) * (l.powi(k as i32) * self.c1 - bq * self.c2)
    }

    pub fn predicted_dx(&self, k: usize) -> Complex64 {
        self.lambda.powi(2 * k as i32 - 1) * self.delta_x
    }
}

pub fn universal_constants<T: Real>(
    fp: &FixedPoint1D<T>,
    chi1: Complex64,
) -> Result<UniversalConstants> {
    let lam = fp.lambda();
    if !(abs(lam) < 1.0) {
        return Err(Error::NoConvergence {
            iterations: fp.iterations,
            residual: fp.last_change,
        });
    }
    let l = to_c64(lam);
    let delta_x = Complex64::new(1.0, 0.0) - l;
    let delta_y = -to_c64(fp.h_star(re(1.0)));
    let xi_inv_slope = to_c64(fp.xi_inv_slope());
    let c1 = xi_inv_slope * delta_x;
    let c2 = -l * chi1 * delta_y;
    if c1.norm() < 1e-8 || c2.norm() < 1e-8 {
        return Err(Error::IllConditioned(
            "a displacement constant vanishes".into(),
        ));
    }
    Ok(UniversalConstants {
        lambda: l,
        delta_x,
        delta_y,
        xi_inv_slope,
        chi1,
        c1,
        c2,
    })
}

fn pt<T: Real>(p: Point<T>) -> [Complex64; 2] {
    [to_c64(p[0]), to_c64(p[1])]
}

fn diff(a: [Complex64; 2], b: [Complex64; 2]) -> [Complex64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm2(v: [Complex64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// The nine probe points, as `[q, p, q_check]` at each scale.
#[derive(Clone, Debug, Serialize)]
pub struct ProbePoints {
    pub n: usize,
    pub k: usize,
    pub deep: [[Complex64; 2]; 3],
    pub middle: [[Complex64; 2]; 3],
    pub ambient: [[Complex64; 2]; 3],
    /// Orbit times `i` with `ambient[m] = H^i(cap_0)`.
    pub orbit_index: [u64; 3],
    /// `|q_middle - A_n(kappa_n, 0)|`.
    pub transport_residual: f64,
    /// `max_m |ambient[m] - H^{i_m}(cap_0)|`.
    pub orbit_residual: f64,
}

/// One row of the geometry table.
#[derive(Clone, Debug, Serialize)]
pub struct GeometryReport {
    pub n: usize,
    pub k: usize,
    pub b: Complex64,
    pub delta_deep: [Complex64; 2],
    pub delta_middle: [Complex64; 2],
    pub delta_ambient: [Complex64; 2],
    pub check_deep: [Complex64; 2],
    pub check_middle: [Complex64; 2],
    pub check_ambient: [Complex64; 2],
    /// `lambda*^{2k-1} Delta* x`.
    pub predicted_dx: Complex64,
    /// `lambda*^{k-1} (lambda*^k C1 - b^{q_{2n+1}} C2)`.
    pub predicted_dy: Complex64,
    /// `|Delta_n^{n+k} y|`, the quantity driven to zero by tuning.
    pub cancellation: f64,
    /// `|lambda*|^{n+2k}`.
    pub cancellation_scale: f64,
    /// `dist(q_check, q) / dist(q, p)` at the ambient scale.
    pub ratio: f64,
    pub dist_qp: f64,
    pub dist_check: f64,
    /// Relative error of `lambda_0 D Delta_middle` as a prediction of
    /// `Delta_ambient`, with `D` the derivative of `Phi_0^n` at `q_middle`.
    pub transport_gap: f64,
}

/// Builds the probe points and the report row for `(n, k)`.
pub fn probe<T: Real>(
    pyr: &Pyramid<T>,
    n: usize,
    k: usize,
    consts: &UniversalConstants,
) -> Result<(ProbePoints, GeometryReport)> {
    let top = n + k + 1;
    if top > pyr.depth() {
        return Err(Error::DepthExceeded {
            need: top,
            have: pyr.depth(),
        });
    }
    let lnk = pyr.level(n + k)?;
    let ln = pyr.level(n)?;
    let q = pyr.caps[n + k];
    let p = lnk.apply_a(q);
    let qc = pyr.phi(top, pyr.level(top)?.apply_a(pyr.caps[top]))?;
    let up = |z: Point<T>| -> Result<Point<T>> { Ok(ln.apply_a(pyr.chain(n, n + k, z)?)) };
    let mid = [up(q)?, up(p)?, up(qc)?];
    let amb = |z: Point<T>| -> Result<Point<T>> { Ok(pyr.to_ambient(pyr.chain(0, n, z)?)) };
    let ambient = [amb(mid[0])?, amb(mid[1])?, amb(mid[2])?];
    let transport = {
        let a = ln.apply_a(pyr.caps[n]);
        abs(a[0] - mid[0][0]).max(abs(a[1] - mid[0][1]))
    };
    let q1 = fib_q(2 * n + 1);
    let orbit_index = [q1, q1 + fib_q(2 * (n + k) + 1), q1 + fib_q(2 * (n + k) + 3)];
    let cap0 = pyr.to_ambient(pyr.caps[0]);
    let mut orbit_residual: f64 = 0.0;
    let mut z = cap0;
    let mut done = 0u64;
    for (m, &i) in orbit_index.iter().enumerate() {
        z = pyr.params.iterate(z, i - done)?;
        done = i;
        orbit_residual = orbit_residual
            .max(abs(z[0] - ambient[m][0]))
            .max(abs(z[1] - ambient[m][1]));
    }
    let deep = [pt(q), pt(p), pt(qc)];
    let middle = [pt(mid[0]), pt(mid[1]), pt(mid[2])];
    let ambient = [pt(ambient[0]), pt(ambient[1]), pt(ambient[2])];
    let bq = to_c64(ln.bq_a.value());
    let dmid = diff(middle[0], middle[1]);
    let ls = consts.lambda.norm();
    let transport_gap = {
        let d = pyr.microscope(0, n)?.derivative(mid[0])?;
        let l0 = to_c64(pyr.levels[0].lambda);
        let d = d.map(|row| row.map(to_c64));
        let pred = [
            l0 * (d[0][0] * dmid[0] + d[0][1] * dmid[1]),
            l0 * (d[1][0] * dmid[0] + d[1][1] * dmid[1]),
        ];
        let act = diff(ambient[0], ambient[1]);
        norm2(diff(pred, act)) / norm2(act)
    };
    let report = GeometryReport {
        n,
        k,
        b: to_c64(pyr.params.b),
        delta_deep: diff(deep[0], deep[1]),
        delta_middle: dmid,
        delta_ambient: diff(ambient[0], ambient[1]),
        check_deep: diff(deep[2], deep[0]),
        check_middle: diff(middle[2], middle[0]),
        check_ambient: diff(ambient[2], ambient[0]),
        predicted_dx: consts.predicted_dx(k),
        predicted_dy: consts.predicted_dy(k, bq),
        cancellation: dmid[1].norm(),
        cancellation_scale: ls.powi((n + 2 * k) as i32),
        ratio: norm2(diff(ambient[2], ambient[0])) / norm2(diff(ambient[0], ambient[1])),
        dist_qp: norm2(diff(ambient[0], ambient[1])),
        dist_check: norm2(diff(ambient[2], ambient[0])),
        transport_gap,
    };
    let points = ProbePoints {
        n,
        k,
        deep,
        middle,
        ambient,
        orbit_index,
        transport_residual: transport,
        orbit_residual,
    };
    Ok((points, report))
}

/// `R(n, k)` together with the quantities of its bound chain.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GeometryRatio {
    pub ratio: f64,
    pub dist_qp: f64,
    pub dist_check: f64,
    /// `dist(q, p) / |lambda*|^{2n+2k}`.
    pub dist_qp_scaled: f64,
    /// `dist(q_check, q) / |lambda*|^{n+2k}`.
    pub dist_check_scaled: f64,
    /// Predicted growth `|lambda*|^{-n}`.
    pub predicted_growth: f64,
}

pub fn geometry_ratio<T: Real>(
    pyr: &Pyramid<T>,
    n: usize,
    k: usize,
    consts: &UniversalConstants,
) -> Result<GeometryRatio> {
    let (_, r) = probe(pyr, n, k, consts)?;
    let l = consts.lambda.norm();
    Ok(GeometryRatio {
        ratio: r.ratio,
        dist_qp: r.dist_qp,
        dist_check: r.dist_check,
        dist_qp_scaled: r.dist_qp / l.powi((2 * n + 2 * k) as i32),
        dist_check_scaled: r.dist_check / l.powi((n + 2 * k) as i32),
        predicted_growth: l.powi(-(n as i32)),
    })
}

/// Search strategy of [`tune_b`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum TuneMode {
    /// Golden-section search of `|Delta y|` in `|b|` along a ray.
    #[default]
    Ray,
    /// Complex secant iteration on `Delta y(b) = 0` from the closed-form seed.
    Complex,
}

/// Search parameters of [`tune_b`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TuneConfig {
    /// Interval of `|b|`, inside `(0, epsilon_bar]`.
    pub bracket: (f64, f64),
    /// Membership constant: success when `|Delta y| <= tol |lambda*|^{n+2k}`.
    pub tol: f64,
    pub mode: TuneMode,
    /// Cells of the coarse scan preceding the golden-section search.
    pub cells: usize,
    pub max_iter: usize,
}

impl Default for TuneConfig {
    fn default() -> Self {
        TuneConfig {
            bracket: (0.005, 0.125),
            tol: 0.1,
            mode: TuneMode::Ray,
            cells: 8,
            max_iter: 40,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TuneResult {
    pub n: usize,
    pub k: usize,
    pub b: Complex64,
    pub seed: Complex64,
    /// `|Delta_n^{n+k} y|` at `b`.
    pub achieved: f64,
    /// `tol |lambda*|^{n+2k}`.
    pub required: f64,
    pub passed: bool,
    /// `|b|^{q_{2n+1}} / |lambda*|^k`.
    pub scale_ratio: f64,
    pub evaluations: usize,
    /// The seed lies outside the bracket and was clamped.
    pub seed_clamped: bool,
}

/// Measures `Delta_n^{n+k} y` at `b` with a fresh pyramid.
pub fn measured_dy<T: Real>(
    theta: T,
    b: Complex64,
    n: usize,
    k: usize,
    opts: &PyramidOptions,
    eps_bar: f64,
    consts: &UniversalConstants,
) -> Result<Complex64> {
    let params = HenonParams::from_rotation(theta, from_c64(b), eps_bar)?;
    let pyr = Pyramid::build(params, n + k + 1, opts.clone())?;
    let (_, r) = probe(&pyr, n, k, consts)?;
    Ok(r.delta_middle[1])
}

fn golden_section(
    g: &mut impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut c: f64,
    max_iter: usize,
) -> Result<(f64, f64)> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = c - phi * (c - a);
    let mut x2 = a + phi * (c - a);
    let (mut f1, mut f2) = (g(x1)?, g(x2)?);
    for _ in 0..max_iter {
        if (c - a) < 1e-12 * c.abs() {
            break;
        }
        if f1 < f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - phi * (c - a);
            f1 = g(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (c - a);
            f2 = g(x2)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

/// Searches for `b` cancelling the vertical middle-scale displacement of the
/// `(n, k)` probe and reports the best point found, whether or not it passes
/// the membership test.
///
/// In [`TuneMode::Ray`] the search runs over `|b|` on the ray through the
/// closed-form seed nearest to `arg_b`; the seed modulus is part of the
/// coarse scan when it lies in the bracket. Bracket points where the pyramid
/// cannot be built count as infeasible.
#[allow(clippy::too_many_arguments)]
pub fn tune_search<T: Real>(
    theta: T,
    n: usize,
    k: usize,
    arg_b: f64,
    cfg: &TuneConfig,
    opts: &PyramidOptions,
    eps_bar: f64,
    consts: &UniversalConstants,
) -> Result<TuneResult> {
    let (lo, hi) = cfg.bracket;
    if !(0.0 < lo && lo < hi && hi <= eps_bar) {
        return Err(Error::InvalidInput(format!(
            "bracket ({lo}, {hi}) must lie in (0, {eps_bar}]"
        )));
    }
    if !(cfg.tol > 0.0) || cfg.cells == 0 {
        return Err(Error::InvalidInput(
            "tune tolerance and cell count must be positive".into(),
        ));
    }
    let seed = consts.seed(n, k, arg_b);
    let ray = Complex64::from_polar(1.0, seed.arg());
    let required = cfg.tol * consts.lambda.norm().powi((n + 2 * k) as i32);
    let q = fib_q(2 * n + 1) as f64;
    let mut evals = 0usize;
    let mut f = |b: Complex64| -> Result<Complex64> {
        evals += 1;
        measured_dy(theta, b, n, k, opts, eps_bar, consts)
    };
    let seed_clamped = !(lo..=hi).contains(&seed.norm());
    let (b, achieved) = match cfg.mode {
        TuneMode::Ray => {
            let mut last_err = None;
            let mut g = |r: f64| -> Result<f64> {
                match f(ray * r) {
                    Ok(d) => Ok(d.norm()),
                    Err(e) if !matches!(e, Error::InvalidInput(_)) => {
                        last_err = Some(e);
                        Ok(f64::INFINITY)
                    }
                    Err(e) => Err(e),
                }
            };
            let mut grid: Vec<f64> = (0..=cfg.cells)
                .map(|i| lo + (hi - lo) * i as f64 / cfg.cells as f64)
                .collect();
            if !seed_clamped {
                grid.push(seed.norm());
                grid.sort_by(f64::total_cmp);
            }
            let mut vals = Vec::with_capacity(grid.len());
            for &r in &grid {
                vals.push(g(r)?);
            }
            let best = (0..grid.len())
                .min_by(|&i, &j| vals[i].total_cmp(&vals[j]))
                .unwrap();
            let a = grid[best.saturating_sub(1)];
            let c = grid[(best + 1).min(grid.len() - 1)];
            let (r, v) = golden_section(&mut g, a, c, cfg.max_iter)?;
            let (r, v) = if vals[best] <= v {
                (grid[best], vals[best])
            } else {
                (r, v)
            };
            if !v.is_finite() {
                return Err(last_err.unwrap_or_else(|| Error::InvalidInput("empty bracket".into())));
            }
            (ray * r, v)
        }
        TuneMode::Complex => {
            let clamp = |b: Complex64| Complex64::from_polar(b.norm().clamp(lo, hi), b.arg());
            let mut b0 = clamp(seed);
            let mut b1 = clamp(seed * 1.01);
            let (mut f0, mut f1) = (f(b0)?, f(b1)?);
            for _ in 0..cfg.max_iter {
                if f1.norm() <= required * 1e-3 || (b1 - b0).norm() < 1e-14 {
                    break;
                }
                let den = f1 - f0;
                if den.norm() == 0.0 {
                    break;
                }
                let b2 = clamp(b1 - f1 * (b1 - b0) / den);
                b0 = b1;
                f0 = f1;
                b1 = b2;
                f1 = f(b1)?;
            }
            if f0.norm() < f1.norm() {
                (b0, f0.norm())
            } else {
                (b1, f1.norm())
            }
        }
    };
    Ok(TuneResult {
        n,
        k,
        b,
        seed,
        achieved,
        required,
        passed: achieved <= required,
        scale_ratio: b.norm().powf(q) / consts.lambda.norm().powi(k as i32),
        evaluations: evals,
        seed_clamped,
    })
}

/// [`tune_search`] that fails with [`Error::NoCancellation`] when the best
/// point misses the membership test.
#[allow(clippy::too_many_arguments)]
pub fn tune_b<T: Real>(
    theta: T,
    n: usize,
    k: usize,
    arg_b: f64,
    cfg: &TuneConfig,
    opts: &PyramidOptions,
    eps_bar: f64,
    consts: &UniversalConstants,
) -> Result<TuneResult> {
    let r = tune_search(theta, n, k, arg_b, cfg, opts, eps_bar, consts)?;
    if !r.passed {
        return Err(Error::NoCancellation {
            achieved: r.achieved,
            required: r.required,
            detail: format!(
                "(n, k) = ({n}, {k}), best b = {:.6}{:+.6}i, closed-form |b| = {:.4}",
                r.b.re,
                r.b.im,
                r.seed.norm()
            ),
        });
    }
    Ok(r)
}

/// Constants with `chi1` measured on level `n_chi` of `pyr`.
pub fn constants_from<T: Real>(
    fp: &FixedPoint1D<T>,
    pyr: &Pyramid<T>,
    n_chi: usize,
) -> Result<UniversalConstants> {
    let chi1 = crate::universality::chi_at_one(pyr, n_chi)?;
    universal_constants(fp, chi1)
}
