//! Renormalization of one-dimensional commuting pairs `(eta, xi)`, the
//! degenerate `b = 0` limit of the two-dimensional pyramid.
//!
//! `xi'(x) = (eta(xi(lambda x + c)) - c) / lambda`,
//! `eta'(x) = (eta(xi(eta(lambda x + c))) - c) / lambda`.

use crate::cheb::{Cheb, Segment};
use crate::error::{Error, Result};
use crate::maps::QuadParams;
use crate::scalar::{abs, re, Real, C};

use super::level::fmt_c;

#[derive(Clone, Debug)]
pub struct Pair1D<T: Real> {
    pub n: usize,
    pub lambda: C<T>,
    pub c: C<T>,
    pub eta: Cheb<T>,
    /// Charts of `xi`: `W` then the real segment `Z`.
    pub xi: Vec<Cheb<T>>,
    eta_d: Cheb<T>,
    xi_d: Vec<Cheb<T>>,
}

fn best<T: Real>(charts: &[Cheb<T>], x: C<T>) -> usize {
    let mut k = 0;
    let mut r = charts[0].seg.rho(x);
    for (i, ch) in charts.iter().enumerate().skip(1) {
        let ri = ch.seg.rho(x);
        if ri < r {
            r = ri;
            k = i;
        }
    }
    k
}

impl<T: Real> Pair1D<T> {
    fn assemble(n: usize, lambda: C<T>, c: C<T>, eta: Cheb<T>, xi: Vec<Cheb<T>>) -> Self {
        let eta_d = eta.deriv();
        let xi_d = xi.iter().map(|f| f.deriv()).collect();
        Pair1D {
            n,
            lambda,
            c,
            eta,
            xi,
            eta_d,
            xi_d,
        }
    }

    /// The pair `(f, f)` of the quadratic map with rotation number `theta`,
    /// rescaled so that `f(x) = c_theta x^2 + 1`.
    pub fn quadratic(theta: T, margin: f64, nodes: usize, chop_tol: f64) -> Self {
        Self::quadratic_on(theta, margin, margin, nodes, chop_tol)
    }

    /// As [`Self::quadratic`] with `Z = [-margin, 1 + right]`.
    pub fn quadratic_on(theta: T, margin: f64, right: f64, nodes: usize, chop_tol: f64) -> Self {
        let q = QuadParams::from_rotation(theta);
        let cq = q.c;
        let f = move |x: C<T>| cq * x * x + re(1.0);
        let z = Segment::new(re(-margin), re(1.0 + right));
        let w = Segment::new(re(1.0 + margin), re(-margin));
        let eta = Cheb::from_fn(z, nodes, chop_tol, f);
        let xi = vec![
            Cheb::from_fn(w, nodes, chop_tol, f),
            Cheb::from_fn(z, nodes, chop_tol, f),
        ];
        Self::assemble(0, cq, re(0.0), eta, xi)
    }

    pub fn eta(&self, x: C<T>) -> C<T> {
        self.eta.eval(x)
    }
    pub fn eta_d(&self, x: C<T>) -> C<T> {
        self.eta_d.eval(x)
    }
    pub fn xi(&self, x: C<T>) -> C<T> {
        self.xi[best(&self.xi, x)].eval(x)
    }
    pub fn xi_d(&self, x: C<T>) -> C<T> {
        self.xi_d[best(&self.xi, x)].eval(x)
    }

    /// `eta^{-1}(x)` on the branch through `eta^{-1}(eta(1)) = 1`.
    pub fn eta_inv(&self, x: C<T>) -> Result<C<T>> {
        newton_path(|u| self.eta(u), |u| self.eta_d(u), re(1.0), x, self.n)
    }

    /// Solves `xi(u) = x` from `seed` by continuation along `xi(seed) -> x`.
    pub fn xi_inv(&self, x: C<T>, seed: C<T>) -> Result<C<T>> {
        newton_path(|u| self.xi(u), |u| self.xi_d(u), seed, x, self.n)
    }

    pub fn step(&self, nodes: usize, margin: f64, window: f64, chop_tol: f64) -> Result<Self> {
        self.step_on(None, nodes, margin, window, chop_tol)
    }

    /// One step; with `wseg` given, `xi'` is sampled on that segment instead
    /// of the one determined by `eta'(0)`.
    pub fn step_on(
        &self,
        wseg: Option<Segment<T>>,
        nodes: usize,
        margin: f64,
        window: f64,
        chop_tol: f64,
    ) -> Result<Self> {
        let g = |x: C<T>| self.eta(self.xi(x));
        let seg = Segment::new(re(-window), re(window));
        let gc = Cheb::from_fn(seg, 24, chop_tol, g);
        let (dg, ddg) = (gc.deriv(), gc.deriv().deriv());
        let mut c = re(0.0);
        for _ in 0..60 {
            let dz = dg.eval(c) / ddg.eval(c);
            c = c - dz;
            if !(abs(dz) >= T::unit_roundoff() * 64.0) {
                break;
            }
        }
        let lam = g(c) - c;
        if !(abs(c) < window) || !(abs(lam) > 1e-6 && abs(lam) < 1.0) {
            return Err(Error::NormalizationFailure {
                level: self.n,
                detail: format!("critical point {} / scaling {}", fmt_c(c), fmt_c(lam)),
            });
        }
        let il = lam.inv();
        let z = self.eta.seg;
        let eta = Cheb::from_fn(z, nodes, chop_tol, |x| (g(self.eta(lam * x + c)) - c) * il);
        let w = wseg.unwrap_or_else(|| {
            let e0 = eta.eval(re(0.0));
            Segment::new(e0.scale(T::of(1.0 + margin)), e0.scale(T::of(-margin)))
        });
        let xi = [w, z]
            .into_iter()
            .map(|s| Cheb::from_fn(s, nodes, chop_tol, |x| (g(lam * x + c) - c) * il))
            .collect();
        Ok(Self::assemble(self.n + 1, lam, c, eta, xi))
    }

    /// Values at the nodes of the three charts (`eta` on `Z`, `xi` on `W`, `Z`).
    fn node_values(&self, nodes: usize) -> Vec<C<T>> {
        let mut v: Vec<C<T>> = self
            .eta
            .seg
            .nodes(nodes)
            .into_iter()
            .map(|x| self.eta(x))
            .collect();
        for ch in &self.xi {
            v.extend(ch.seg.nodes(nodes).into_iter().map(|x| ch.eval(x)));
        }
        v
    }

    fn with_node_values(&self, v: &[C<T>], nodes: usize, chop_tol: f64) -> Self {
        let eta = Cheb::fit(self.eta.seg, &v[..nodes], chop_tol);
        let xi = self
            .xi
            .iter()
            .enumerate()
            .map(|(i, ch)| Cheb::fit(ch.seg, &v[(i + 1) * nodes..(i + 2) * nodes], chop_tol))
            .collect();
        Self::assemble(self.n, self.lambda, self.c, eta, xi)
    }

    /// Sup distance to `other` on sample points of `[0, 1]` (both maps).
    pub fn distance(&self, other: &Self) -> f64 {
        (0..=16)
            .map(|i| re::<T>(i as f64 / 16.0))
            .map(|x| abs(self.eta(x) - other.eta(x)).max(abs(self.xi(x) - other.xi(x))))
            .fold(0.0, f64::max)
    }
}

fn newton_path<T: Real>(
    f: impl Fn(C<T>) -> C<T>,
    df: impl Fn(C<T>) -> C<T>,
    seed: C<T>,
    target: C<T>,
    level: usize,
) -> Result<C<T>> {
    let x0 = f(seed);
    let steps = ((abs(target - x0) / 0.02).ceil() as usize).clamp(1, 200);
    let mut u = seed;
    for s in 1..=steps {
        let t = x0 + (target - x0).scale(T::of(s as f64 / steps as f64));
        let mut done = false;
        for _ in 0..50 {
            let du = (f(u) - t) / df(u);
            u = u - du;
            if abs(du) <= T::unit_roundoff() * 64.0 * (1.0 + abs(u)) {
                done = true;
                break;
            }
        }
        if !done && abs(f(u) - t) > T::unit_roundoff().sqrt() {
            return Err(Error::InversionFailure {
                level,
                detail: format!("1D inverse stalled at {}", fmt_c(t)),
            });
        }
    }
    Ok(u)
}

/// The renormalization fixed point `(eta*, xi*)` with its scaling `lambda*`.
#[derive(Clone, Debug)]
pub struct FixedPoint1D<T: Real> {
    pub pair: Pair1D<T>,
    pub iterations: usize,
    pub last_change: f64,
    pub lambda_history: Vec<C<T>>,
    /// Geometric-tail estimate of `|lambda_m - lambda*|`.
    pub lambda_error: f64,
}

impl<T: Real> FixedPoint1D<T> {
    pub fn lambda(&self) -> C<T> {
        self.pair.lambda
    }

    /// `phi*(x) = eta*^{-1}(lambda* x)`.
    pub fn phi_star(&self, x: C<T>) -> Result<C<T>> {
        self.pair.eta_inv(self.pair.lambda * x)
    }

    /// `(xi*^{-1})'(lambda*)` on the branch continuing the second coordinate
    /// of `A* o Phi*`, which reduces to `eta*'(lambda*) / eta*'(1)`.
    pub fn xi_inv_slope(&self) -> C<T> {
        let l = self.pair.lambda;
        self.pair.eta_d(l) / self.pair.eta_d(re(1.0))
    }

    /// Limiting second coordinate `h*(x) = eta*(lambda* x) / lambda*`.
    pub fn h_star(&self, x: C<T>) -> C<T> {
        let l = self.pair.lambda;
        self.pair.eta(l * x) / l
    }
}

/// The 1D renormalization fixed point.
///
/// Iterates renormalization from the golden quadratic pair while successive
/// pairs approach each other. The operator has an expanding direction
/// (changes of rotation number), so rounding errors eventually grow; from the
/// closest iterate the fixed-point equation is then solved by Newton's method
/// on node values with the charts held fixed, until the change on `[0, 1]`
/// is below `tol` or stops decreasing. The values at the chart ends carry a
/// truncation floor near `1e-8` with the default node counts, so `tol`
/// should not be set below that.
pub fn fixed_point_1d<T: Real>(tol: f64, max_iter: usize) -> Result<FixedPoint1D<T>> {
    let extended = T::unit_roundoff() < 1e-20;
    let nodes = if extended { 72 } else { 48 };
    let chop = T::unit_roundoff() * 20.0;
    let (margin, window) = (0.25, 0.05);
    let mut p = Pair1D::quadratic(crate::scalar::golden::<T>(), margin, nodes, chop);
    let mut hist = Vec::new();
    let mut best: Option<Pair1D<T>> = None;
    let mut prev_change = f64::INFINITY;
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        let q = p.step(nodes, margin, window, chop)?;
        iterations += 1;
        change = q.distance(&p).max(abs(q.lambda - p.lambda));
        hist.push(q.lambda);
        if change < tol {
            p = q;
            break;
        }
        if change > prev_change && iterations > 4 {
            break;
        }
        prev_change = change;
        best = Some(q.clone());
        p = q;
    }
    if change >= tol {
        p = best.unwrap_or(p);
        let step = |v: &[C<T>], base: &Pair1D<T>| -> Result<Vec<C<T>>> {
            let w = base.xi[0].seg;
            let q = base.with_node_values(v, nodes, 0.0).step_on(
                Some(w),
                nodes,
                margin,
                window,
                0.0,
            )?;
            Ok(q.node_values(nodes))
        };
        let h = if extended { 1e-14 } else { 1e-7 };
        let mut stalled = 0;
        prev_change = f64::INFINITY;
        for _ in 0..10 {
            if iterations >= max_iter {
                break;
            }
            let v = p.node_values(nodes);
            let rv = step(&v, &p)?;
            let f: Vec<C<T>> = rv.iter().zip(&v).map(|(a, b)| a - b).collect();
            let fmax = f.iter().map(|z| abs(*z)).fold(0.0, f64::max);
            iterations += 1;
            if fmax < tol {
                change = fmax;
                break;
            }
            use rayon::prelude::*;
            let cols: Vec<Vec<C<T>>> = (0..v.len())
                .into_par_iter()
                .map(|j| {
                    let mut vj = v.clone();
                    let hj = T::of(h * (1.0 + abs(v[j])));
                    vj[j].re = vj[j].re + hj;
                    let rj = step(&vj, &p)?;
                    Ok(rj
                        .iter()
                        .zip(&vj)
                        .zip(&f)
                        .map(|((a, b), f0)| ((a - b) - f0).unscale(hj))
                        .collect())
                })
                .collect::<Result<_>>()?;
            let n = v.len();
            let jac: Vec<Vec<C<T>>> = (0..n)
                .map(|i| (0..n).map(|j| cols[j][i]).collect())
                .collect();
            let rhs: Vec<C<T>> = f.iter().map(|z| -z).collect();
            let dv = crate::linalg::solve(jac, rhs)?;
            let nv: Vec<C<T>> = v.iter().zip(&dv).map(|(a, b)| a + b).collect();
            let q = p.with_node_values(&nv, nodes, 0.0);
            // Refresh lambda and c from one more application on the same charts.
            let lam_new = q.step_on(Some(q.xi[0].seg), nodes, margin, window, 0.0)?;
            let q = Pair1D {
                n: lam_new.n,
                lambda: lam_new.lambda,
                c: lam_new.c,
                ..q
            };
            change = q.distance(&p).max(abs(q.lambda - p.lambda));
            hist.push(q.lambda);
            p = q;
            if change < tol {
                break;
            }
            // The extreme chart nodes have a truncation floor that Newton
            // cannot beat; stop once the interior change stops shrinking.
            stalled = if change > 0.5 * prev_change {
                stalled + 1
            } else {
                0
            };
            prev_change = prev_change.min(change);
            if stalled >= 2 {
                break;
            }
        }
    }
    if !(change < tol) {
        return Err(Error::NoConvergence {
            iterations,
            residual: change,
        });
    }
    let lambda_error = tail_estimate(&hist).max(change);
    Ok(FixedPoint1D {
        pair: p,
        iterations,
        last_change: change,
        lambda_history: hist,
        lambda_error,
    })
}

fn tail_estimate<T: Real>(h: &[C<T>]) -> f64 {
    let n = h.len();
    if n < 3 {
        return f64::INFINITY;
    }
    let d1 = abs(h[n - 1] - h[n - 2]);
    let d0 = abs(h[n - 2] - h[n - 3]);
    if d0 == 0.0 {
        return d1;
    }
    let r = (d1 / d0).min(0.9);
    d1 * r / (1.0 - r)
}
