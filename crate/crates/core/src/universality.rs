//! Measurement of the universal first-order profiles of the pyramid.
//!
//! With `b^q` the relevant power of the Jacobian,
//!
//! * `beta(x)  = Jac B_n(x, 0) / b^{q_{2n}} = -d_y b_n(x, 0) / b^{q_{2n}}`,
//! * `alpha(x) = -d_y a_n(x, 0) / b^{q_{2n}}`,
//! * `chi(x)   = Jac(A_n o Phi_{n+1})(x, 0) / (b^{q_{2n+1}} lambda_{n+1}^2)`,
//!
//! and the cap derivative `D_n = [[1, t_n b^{q_{2(n-1)}}], [0, 1]] diag(u_n, lambda_n)`.
//! Every comparison with the one-dimensional fixed point is reported as a
//! relative gap; nothing is asserted here.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::renorm::{FixedPoint1D, Mat2, PairLevel, Pyramid};
use crate::scalar::{abs, cx, re, to_c64, LogC, Real, C};

/// Smallest `log(|b|^q)` for which `b^q`-sized coefficients are trusted.
const LOG_FLOOR: f64 = -690.0;

/// 17 points on `[-0.2, 1.2]` and 8 on the circle `|x - 0.5| = 0.3`.
pub fn default_grid<T: Real>() -> Vec<C<T>> {
    let mut g: Vec<C<T>> = (0..17).map(|i| re(-0.2 + 1.4 * i as f64 / 16.0)).collect();
    for k in 0..8 {
        let t = std::f64::consts::TAU * (k as f64 + 0.5) / 8.0;
        g.push(cx(0.5 + 0.3 * t.cos(), 0.3 * t.sin()));
    }
    g
}

fn rel_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let d = a
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max);
    d / scale
}

/// Maximum pointwise relative difference.
fn pointwise_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm() / q.norm())
        .fold(0.0, f64::max)
}

fn guard<T: Real>(bq: LogC<T>, what: &str, n: usize) -> Result<()> {
    if bq.log.re.to_f64() < LOG_FLOOR {
        return Err(Error::UnderflowGuard(format!(
            "{what} at level {n}: log10|b^q| = {:.1} is below the scalar range",
            bq.log10_abs()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaEstimate {
    pub n: usize,
    pub x: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    /// `sup |beta_n - beta_{n+1}| / sup |beta_{n+1}|`, when level `n + 1` exists.
    pub gap: Option<f64>,
    pub min_abs: f64,
    pub max_abs: f64,
    /// Worst relative size of the `y^2, y^3, ...` part of `b_n(x, y) - b_n(x, 0)`
    /// against its linear part for `|y| <= 0.3`; `None` when `b^{q_{2n}}`
    /// underflows.
    pub nonlinearity: Option<f64>,
    /// `sup |d_y b_n / b^{q_{2n}} + beta| / |beta|`: consistency of the stored
    /// normalized Jacobian with the `y`-slope.
    pub slope_mismatch: Option<f64>,
}

fn beta_values<T: Real>(l: &PairLevel<T>, grid: &[C<T>]) -> Vec<Complex64> {
    grid.par_iter().map(|&x| to_c64(l.jb(x, re(0.0)))).collect()
}

pub fn estimate_beta<T: Real>(pyr: &Pyramid<T>, n: usize, grid: &[C<T>]) -> Result<BetaEstimate> {
    let l = pyr.level(n)?;
    let beta = beta_values(l, grid);
    let gap = pyr
        .levels
        .get(n + 1)
        .map(|m| rel_gap(&beta, &beta_values(m, grid)));
    let (min_abs, max_abs) = beta.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), z| {
        (lo.min(z.norm()), hi.max(z.norm()))
    });
    let (nonlinearity, slope_mismatch) = if l.bq_b.log.re.to_f64() < LOG_FLOOR {
        (None, None)
    } else {
        let ys = [re::<T>(0.3), re(-0.3), cx(0.0, 0.3)];
        let (mut nl, mut sm) = (0.0f64, 0.0f64);
        for (x, bh) in grid.iter().zip(&beta) {
            let ch = l.bchart(*x);
            let c1 = ch.b.coef_at(1, *x);
            for &y in &ys {
                let mut high = C::new(T::zero(), T::zero());
                for k in (2..=ch.b.deg_y()).rev() {
                    high = (high + ch.b.coef_at(k, *x)) * y;
                }
                nl = nl.max(abs(high * y) / abs(c1 * y));
            }
            sm = sm.max((to_c64(l.bq_b.divide(-c1)) - bh).norm() / bh.norm());
        }
        (Some(nl), Some(sm))
    };
    Ok(BetaEstimate {
        n,
        x: grid.iter().map(|z| to_c64(*z)).collect(),
        beta,
        gap,
        min_abs,
        max_abs,
        nonlinearity,
        slope_mismatch,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaEstimate {
    pub n: usize,
    pub alpha: Vec<Complex64>,
    /// `alpha_n(x) / beta_n(x)` against `eta*'(x) / xi*'(x)`, worst relative gap.
    pub ratio_gap: f64,
    /// `sup |alpha_n - alpha_{n+1}| / sup |alpha_{n+1}|`.
    pub gap: Option<f64>,
    /// `-d_y h_n(x, 0) / b^{q_{2n}}` against `alpha_check(x) = eta*'(lambda* x) / eta*'(x) alpha(x)`.
    pub h_slope_gap: f64,
    /// `h_n(x, 0)` against `eta_{n-1}(lambda_n x) / lambda_n`, for `n >= 1`.
    pub h_slice_gap: Option<f64>,
    /// `sup |Jac A_n(x, 0)| / |b|^{q_{2n}}`, small since the first order cancels.
    pub jac_ratio: f64,
}

fn alpha_values<T: Real>(l: &PairLevel<T>, grid: &[C<T>]) -> Result<Vec<Complex64>> {
    guard(l.bq_b, "alpha", l.n)?;
    Ok(grid
        .par_iter()
        .map(|&x| to_c64(l.bq_b.divide(-l.a_y(x, re(0.0)))))
        .collect())
}

pub fn estimate_alpha<T: Real>(
    pyr: &Pyramid<T>,
    n: usize,
    grid: &[C<T>],
    fp: &FixedPoint1D<T>,
) -> Result<AlphaEstimate> {
    let l = pyr.level(n)?;
    let alpha = alpha_values(l, grid)?;
    let beta = beta_values(l, grid);
    let lam = fp.lambda();
    let pair = &fp.pair;
    let ratio: Vec<Complex64> = alpha.iter().zip(&beta).map(|(a, b)| a / b).collect();
    let want: Vec<Complex64> = grid
        .iter()
        .map(|&x| to_c64(pair.eta_d(x) / pair.xi_d(x)))
        .collect();
    let gap = match pyr.levels.get(n + 1) {
        Some(m) => alpha_values(m, grid).ok().map(|a1| rel_gap(&alpha, &a1)),
        None => None,
    };
    let hs: Vec<Complex64> = grid
        .iter()
        .map(|&x| to_c64(l.bq_b.divide(-l.h_y(x, re(0.0)))))
        .collect();
    let check: Vec<Complex64> = grid
        .iter()
        .zip(&alpha)
        .map(|(&x, a)| to_c64(pair.eta_d(lam * x) / pair.eta_d(x)) * a)
        .collect();
    let h_slice_gap = if n >= 1 {
        let prev = pyr.level(n - 1)?;
        let got: Vec<Complex64> = grid.iter().map(|&x| to_c64(l.h(x, re(0.0)))).collect();
        let want: Vec<Complex64> = grid
            .iter()
            .map(|&x| to_c64(prev.eta(l.lambda * x) / l.lambda))
            .collect();
        Some(rel_gap(&got, &want))
    } else {
        None
    };
    let shift = l.bq_a.div(l.bq_b).log.re.to_f64().exp();
    let jac_ratio = grid
        .iter()
        .map(|&x| abs(l.ja(x, re(0.0))) * shift)
        .fold(0.0, f64::max);
    Ok(AlphaEstimate {
        n,
        ratio_gap: pointwise_gap(&ratio, &want),
        alpha,
        gap,
        h_slope_gap: rel_gap(&hs, &check),
        h_slice_gap,
        jac_ratio,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChiEstimate {
    pub n: usize,
    /// `Jac(A_n o Phi_{n+1})(x, 0) / (b^{q_{2n+1}} lambda_{n+1}^2)` from the pyramid.
    pub chi: Vec<Complex64>,
    /// `xi*'(lambda* x) / xi*'(x) * beta(x) / beta(lambda* x)` with `beta = beta_n`.
    pub xi_form: Vec<Complex64>,
    /// `eta*'(lambda* x) / eta*'(x) * alpha(x) / alpha(lambda* x)` with `alpha = alpha_n`.
    pub eta_form: Vec<Complex64>,
    /// Worst relative gap between the two forms.
    pub form_gap: f64,
    /// Worst relative gap between the measured profile and the `xi`-form.
    pub measured_gap: f64,
    /// `sup |first coordinate of A_n o Phi_{n+1} - (lambda_{n+1} x + c_{n+1})|`.
    pub affine_residual: f64,
    /// `log10 |Jac(A_n o Phi_{n+1})(1, 0)|`.
    pub log10_jac: f64,
}

fn chi_measured<T: Real>(
    pyr: &Pyramid<T>,
    n: usize,
    grid: &[C<T>],
) -> Result<(Vec<Complex64>, f64)> {
    let l = pyr.level(n)?;
    let next = pyr.level(n + 1)?;
    let pts: Vec<Result<(Complex64, f64)>> = grid
        .par_iter()
        .map(|&x| {
            let [u, y] = pyr.phi(n + 1, [x, re(0.0)])?;
            let chi = l.ja(u, y) / l.a_x(u, y);
            let aff = abs(l.a(u, y) - (next.lambda * x + next.c));
            Ok((to_c64(chi), aff))
        })
        .collect();
    let mut chi = Vec::with_capacity(grid.len());
    let mut aff: f64 = 0.0;
    for p in pts {
        let (c, a) = p?;
        chi.push(c);
        aff = aff.max(a);
    }
    Ok((chi, aff))
}

pub fn estimate_chi<T: Real>(
    pyr: &Pyramid<T>,
    n: usize,
    grid: &[C<T>],
    fp: &FixedPoint1D<T>,
) -> Result<ChiEstimate> {
    let l = pyr.level(n)?;
    let next = pyr.level(n + 1)?;
    let (chi, affine_residual) = chi_measured(pyr, n, grid)?;
    let lam = fp.lambda();
    let pair = &fp.pair;
    let scaled: Vec<C<T>> = grid.iter().map(|&x| lam * x).collect();
    let beta = beta_values(l, grid);
    let beta_s = beta_values(l, &scaled);
    let alpha = alpha_values(l, grid)?;
    let alpha_s = alpha_values(l, &scaled)?;
    let mut xi_form = Vec::with_capacity(grid.len());
    let mut eta_form = Vec::with_capacity(grid.len());
    for (i, &x) in grid.iter().enumerate() {
        let xr = to_c64(pair.xi_d(lam * x) / pair.xi_d(x));
        let er = to_c64(pair.eta_d(lam * x) / pair.eta_d(x));
        xi_form.push(xr * beta[i] / beta_s[i]);
        eta_form.push(er * alpha[i] / alpha_s[i]);
    }
    let one = re::<T>(1.0);
    let [u, y] = pyr.phi(n + 1, [one, re(0.0)])?;
    let jac1 = LogC::from_value(l.ja(u, y) * next.lambda * next.lambda / l.a_x(u, y)).mul(l.bq_a);
    Ok(ChiEstimate {
        n,
        form_gap: pointwise_gap(&eta_form, &xi_form),
        measured_gap: pointwise_gap(&chi, &xi_form),
        chi,
        xi_form,
        eta_form,
        affine_residual,
        log10_jac: jac1.log10_abs(),
    })
}

/// Shear-diagonal factors of the cap derivative.
#[derive(Clone, Debug, Serialize)]
pub struct CapFactors {
    pub n: usize,
    pub k: usize,
    pub u: Complex64,
    pub lambda: Complex64,
    /// `t` with the shear entry equal to `t b^q`; `None` if `b^q` underflows.
    pub t: Option<Complex64>,
}

fn factor<T: Real>(d: &Mat2<T>, bq: LogC<T>) -> (Complex64, Complex64, Option<Complex64>) {
    let l = d[1][1];
    let t = if bq.log.re.to_f64() < LOG_FLOOR {
        None
    } else {
        Some(to_c64(bq.divide(d[0][1] / l)))
    };
    (to_c64(d[0][0]), to_c64(l), t)
}

fn check_factor<T: Real>(d: &Mat2<T>, n: usize) -> Result<()> {
    let scale = d.iter().flatten().map(|z| abs(*z)).fold(0.0, f64::max);
    if !(abs(d[1][0]) <= 1e-8 * scale) || abs(d[0][0]) == 0.0 || abs(d[1][1]) == 0.0 {
        return Err(Error::IllConditioned(format!(
            "cap derivative at level {n} is not shear-diagonal"
        )));
    }
    Ok(())
}

/// `(u_n, lambda_n, t_n)` from `D_n = D Phi_n` at the cap `(kappa_n, 0)`.
pub fn cap_derivative<T: Real>(pyr: &Pyramid<T>, n: usize) -> Result<CapFactors> {
    if n == 0 {
        return Err(Error::InvalidInput("cap derivative needs n >= 1".into()));
    }
    let d = pyr.phi_derivative(
        n,
        pyr.caps.get(n).copied().ok_or(Error::DepthExceeded {
            need: n,
            have: pyr.depth(),
        })?,
    )?;
    check_factor(&d, n)?;
    let (u, lambda, t) = factor(&d, pyr.level(n - 1)?.bq_b);
    Ok(CapFactors {
        n,
        k: 1,
        u,
        lambda,
        t,
    })
}

/// Factors of `D_n^{n+k} = D_{n+1} ... D_{n+k}`, the shear entry scaled by `b^{q_{2n}}`.
pub fn cap_derivative_composed<T: Real>(
    pyr: &Pyramid<T>,
    n: usize,
    k: usize,
) -> Result<CapFactors> {
    if n + k > pyr.depth() {
        return Err(Error::DepthExceeded {
            need: n + k,
            have: pyr.depth(),
        });
    }
    let d = pyr.microscope(n, k)?.derivative(pyr.caps[n + k])?;
    check_factor(&d, n)?;
    let (u, lambda, t) = factor(&d, pyr.level(n)?.bq_b);
    Ok(CapFactors { n, k, u, lambda, t })
}

/// The tables behind the universality report, for levels `levels`.
#[derive(Clone, Debug, Serialize)]
pub struct UniversalFunctions {
    pub lambda_star: Complex64,
    pub beta: Vec<BetaEstimate>,
    pub alpha: Vec<AlphaEstimate>,
    pub chi: Vec<ChiEstimate>,
    pub caps: Vec<CapFactors>,
    /// `lambda* alpha_n(1)` for the deepest level with an `alpha` table.
    pub t_star: Option<Complex64>,
    pub u_star: Complex64,
}

/// Runs all estimators for `n` in `levels`, skipping those that need
/// unavailable depth or underflow.
pub fn universal_functions<T: Real>(
    pyr: &Pyramid<T>,
    fp: &FixedPoint1D<T>,
    levels: std::ops::RangeInclusive<usize>,
    grid: &[C<T>],
) -> Result<UniversalFunctions> {
    let lam = fp.lambda();
    let mut out = UniversalFunctions {
        lambda_star: to_c64(lam),
        beta: vec![],
        alpha: vec![],
        chi: vec![],
        caps: vec![],
        t_star: None,
        u_star: to_c64(lam * lam),
    };
    for n in levels.clone() {
        if n > pyr.depth() {
            break;
        }
        out.beta.push(estimate_beta(pyr, n, grid)?);
        match estimate_alpha(pyr, n, grid, fp) {
            Ok(a) => out.alpha.push(a),
            Err(Error::UnderflowGuard(_)) => {}
            Err(e) => return Err(e),
        }
        if n < pyr.depth() {
            match estimate_chi(pyr, n, grid, fp) {
                Ok(c) => out.chi.push(c),
                Err(Error::UnderflowGuard(_)) => {}
                Err(e) => return Err(e),
            }
        }
        if n >= 1 {
            out.caps.push(cap_derivative(pyr, n)?);
        }
    }
    if let Some(a) = out.alpha.last() {
        out.t_star = Some(to_c64(lam) * alpha_at_one(pyr, a.n)?);
    }
    Ok(out)
}

/// `alpha_n(1)`.
pub fn alpha_at_one<T: Real>(pyr: &Pyramid<T>, n: usize) -> Result<Complex64> {
    let l = pyr.level(n)?;
    guard(l.bq_b, "alpha", n)?;
    Ok(to_c64(l.bq_b.divide(-l.a_y(re(1.0), re(0.0)))))
}

/// `chi` at `x = 1` measured at level `n`.
pub fn chi_at_one<T: Real>(pyr: &Pyramid<T>, n: usize) -> Result<Complex64> {
    let (c, _) = chi_measured(pyr, n, &[re(1.0)])?;
    Ok(c[0])
}
