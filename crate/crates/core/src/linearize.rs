//! Siegel linearization of the quadratic and Hénon maps, boundary tracing
//! through the cap orbit, and raster images of the quadratic Siegel disk.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{HenonParams, QuadParams};
use crate::renorm::{Point, Pyramid};
use crate::scalar::{abs, cexp, re, to_c64, Real, C};

fn divisor_floor<T: Real>() -> f64 {
    T::unit_roundoff() * 1e3
}

/// `psi(z) = x_fix + sum_{k >= 1} c_k z^k` with `psi(mu z) = f(psi(z))`, `c_1 = 1`.
#[derive(Clone, Debug)]
pub struct Series1D<T: Real> {
    pub center: C<T>,
    pub mu: C<T>,
    /// `coeffs[k - 1] = c_k`.
    pub coeffs: Vec<C<T>>,
}

impl<T: Real> Series1D<T> {
    pub fn eval(&self, z: C<T>) -> C<T> {
        let mut s = C::new(T::zero(), T::zero());
        for c in self.coeffs.iter().rev() {
            s = (s + c) * z;
        }
        s + self.center
    }

    /// Ratio-test estimate of the radius of convergence from the upper
    /// half of the coefficients.
    pub fn conformal_radius(&self) -> f64 {
        let n = self.coeffs.len();
        let mut est: Vec<f64> = (n / 2..n)
            .filter_map(|i| {
                let a = abs(self.coeffs[i]);
                (a > 0.0).then(|| a.powf(-1.0 / (i + 1) as f64))
            })
            .collect();
        if est.is_empty() {
            return f64::INFINITY;
        }
        est.sort_by(f64::total_cmp);
        est[est.len() / 2]
    }

    /// `sup_{|z| = r} |psi(mu z) - f(psi(z))|` over `samples` points.
    pub fn residual(&self, c: C<T>, r: f64, samples: usize) -> f64 {
        (0..samples)
            .into_par_iter()
            .map(|i| {
                let t = T::of(std::f64::consts::TAU * i as f64 / samples as f64);
                let z = cexp(C::new(T::zero(), t)).scale(T::of(r));
                let p = self.eval(z);
                abs(self.eval(self.mu * z) - (p * p + c))
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Solves the conjugacy order by order: `c_k (mu^k - mu) = sum_{i+j=k} c_i c_j`.
pub fn siegel_series_1d<T: Real>(params: &QuadParams<T>, order: usize) -> Result<Series1D<T>> {
    let mu = params.mu;
    if order < 2 {
        return Err(Error::InvalidInput(
            "series order must be at least 2".into(),
        ));
    }
    if (abs(mu) - 1.0).abs() > 1e-12 || mu.im.to_f64().abs() < 1e-12 {
        return Err(Error::InvalidInput(format!(
            "multiplier {} is not a non-real point of the unit circle",
            to_c64(mu)
        )));
    }
    let mut c = vec![re::<T>(1.0)];
    let mut muk = mu;
    for k in 2..=order {
        muk = muk * mu;
        let d = muk - mu;
        if abs(d) < divisor_floor::<T>() {
            return Err(Error::SmallDivisorBreakdown {
                order: k,
                divisor: abs(d),
            });
        }
        let mut s = C::new(T::zero(), T::zero());
        for i in 1..k {
            s = s + c[i - 1] * c[k - i - 1];
        }
        c.push(s / d);
    }
    Ok(Series1D {
        center: params.x_fix,
        mu,
        coeffs: c,
    })
}

/// `P(x, y) = sum p_{jk} x^j y^k` with `P(mu x, nu y) = P^2 + c - b P(x/mu, y/nu)`;
/// `Psi = (P, Q)`, `Q(x, y) = P(x/mu, y/nu)`, conjugates `H` to `(mu x, nu y)`.
#[derive(Clone, Debug)]
pub struct Series2D<T: Real> {
    pub nx: usize,
    pub ny: usize,
    pub mu: C<T>,
    pub nu: C<T>,
    /// `p[j][k]`, `j <= nx`, `k <= ny`.
    pub p: Vec<Vec<C<T>>>,
}

impl<T: Real> Series2D<T> {
    pub fn eval_p(&self, x: C<T>, y: C<T>) -> C<T> {
        let mut s = C::new(T::zero(), T::zero());
        for row in self.p.iter().rev() {
            let mut r = C::new(T::zero(), T::zero());
            for c in row.iter().rev() {
                r = r * y + c;
            }
            s = s * x + r;
        }
        s
    }

    pub fn eval(&self, x: C<T>, y: C<T>) -> Point<T> {
        let q = if abs(self.nu) > 0.0 {
            self.eval_p(x / self.mu, y / self.nu)
        } else {
            self.eval_p(x / self.mu, re(0.0))
        };
        [self.eval_p(x, y), q]
    }

    /// Componentwise `sup |H(Psi) - Psi(mu x, nu y)|` on the torus
    /// `|x| = rx, |y| = ry`.
    pub fn residual(&self, params: &HenonParams<T>, rx: f64, ry: f64, samples: usize) -> f64 {
        let m = samples.max(4);
        (0..m * m)
            .into_par_iter()
            .map(|i| {
                let (a, b) = (i / m, i % m);
                let tau = std::f64::consts::TAU;
                let x = cexp(C::new(T::zero(), T::of(tau * a as f64 / m as f64))).scale(T::of(rx));
                let y = cexp(C::new(T::zero(), T::of(tau * (b as f64 + 0.5) / m as f64)))
                    .scale(T::of(ry));
                let h = params.apply_unchecked(self.eval(x, y));
                let l = self.eval(self.mu * x, self.nu * y);
                abs(h[0] - l[0]).max(abs(h[1] - l[1]))
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Solves for `p_{jk}` in order of total degree. The linear part is the pair
/// of eigenvectors `(1, 1/mu)`, `(1, 1/nu)` of the differential at the fixed
/// point. With `nu = 0` only `ny = 0` is meaningful.
pub fn henon_series_2d<T: Real>(
    params: &HenonParams<T>,
    nx: usize,
    ny: usize,
) -> Result<Series2D<T>> {
    let (mu, nu) = (params.mu, params.nu);
    if abs(nu) == 0.0 && ny > 0 {
        return Err(Error::OutOfRegime(
            "b = 0 has no stable direction; use ny = 0".into(),
        ));
    }
    if nx < 1 {
        return Err(Error::InvalidInput("nx must be at least 1".into()));
    }
    let zero = C::new(T::zero(), T::zero());
    let mut p = vec![vec![zero; ny + 1]; nx + 1];
    p[0][0] = params.x_fix;
    p[1][0] = re(1.0);
    if ny >= 1 {
        p[0][1] = re(1.0);
    }
    let one = re::<T>(1.0);
    let pow = |z: C<T>, e: i64| -> C<T> {
        let mut r = one;
        let base = if e < 0 { z.inv() } else { z };
        for _ in 0..e.unsigned_abs() {
            r = r * base;
        }
        r
    };
    for deg in 2..=nx + ny {
        for j in 0..=deg.min(nx) {
            let k = deg - j;
            if k > ny {
                continue;
            }
            let mut s = zero;
            for a in 0..=j {
                for bb in 0..=k {
                    let (c, d) = (j - a, k - bb);
                    if (a, bb) == (0, 0) || (c, d) == (0, 0) {
                        continue;
                    }
                    s = s + p[a][bb] * p[c][d];
                }
            }
            let (ji, ki) = (j as i64, k as i64);
            let tail = if abs(nu) > 0.0 {
                pow(mu, 1 - ji) * pow(nu, 1 - ki)
            } else {
                zero
            };
            let div = pow(mu, ji) * pow(nu, ki) - mu - nu + tail;
            let scale = 1.0 + abs(tail) + abs(pow(mu, ji) * pow(nu, ki));
            if abs(div) < divisor_floor::<T>() * scale {
                if abs(pow(mu, ji) * pow(nu, ki) - mu) < 1e-12
                    || abs(pow(mu, ji) * pow(nu, ki) - nu) < 1e-12
                {
                    return Err(Error::ResonanceDetected {
                        j,
                        k,
                        divisor: abs(div),
                    });
                }
                return Err(Error::SmallDivisorBreakdown {
                    order: deg,
                    divisor: abs(div),
                });
            }
            p[j][k] = s / div;
        }
    }
    Ok(Series2D { nx, ny, mu, nu, p })
}

/// Rotation-ordered samples of a closed curve in `C^2`
/// (planar curves use a zero second coordinate).
#[derive(Clone, Debug, Serialize)]
pub struct CurveSample {
    pub points: Vec<[Complex64; 2]>,
    /// Combinatorial rotation number: sample `i` sits at angle `frac(i theta)`.
    pub theta: f64,
    pub closed: bool,
}

impl CurveSample {
    /// Samples listed in their natural order around the curve
    /// (`theta = 1 / N`).
    pub fn ordered(points: Vec<[Complex64; 2]>) -> Self {
        let n = points.len().max(1);
        CurveSample {
            points,
            theta: 1.0 / n as f64,
            closed: true,
        }
    }

    pub fn index_angle(&self, i: usize) -> f64 {
        (i as f64 * self.theta).fract()
    }

    /// Indices sorted by angle: the circular order of the samples.
    pub fn circular_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&a, &b| self.index_angle(a).total_cmp(&self.index_angle(b)));
        idx
    }
}

/// `{H^i(cap_0) : 0 <= i < count}` in the coordinates of `H`. For `b = 0`
/// the cap is the critical value `(c, 0)` and no pyramid is needed.
pub fn boundary_trace<T: Real>(
    params: &HenonParams<T>,
    pyr: Option<&Pyramid<T>>,
    count: usize,
) -> Result<CurveSample> {
    let cap: Point<T> = if abs(params.b) == 0.0 {
        [params.c, re(0.0)]
    } else {
        let pyr =
            pyr.ok_or_else(|| Error::InvalidInput("b != 0 needs a pyramid for the cap".into()))?;
        pyr.to_ambient(pyr.caps[0])
    };
    let mut pts = Vec::with_capacity(count);
    let mut p = cap;
    for i in 0..count {
        if i > 0 {
            p = params.apply(p).map_err(|_| Error::Overflow {
                step: i,
                bound: params.escape,
            })?;
        }
        pts.push([to_c64(p[0]), to_c64(p[1])]);
    }
    Ok(CurveSample {
        points: pts,
        theta: params.theta.to_f64(),
        closed: true,
    })
}

/// Pixel classes of [`render_siegel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PixelClass {
    /// Escaped `|x| > 2` after the given number of steps.
    Escape(u32),
    Bounded,
    /// Bounded with an orbit returning close to its start: the Siegel disk.
    Siegel,
}

#[derive(Clone, Debug)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Window center and width in the plane.
    pub center: Complex64,
    pub span: f64,
    pub pixels: Vec<PixelClass>,
}

impl Image {
    pub fn pixel_point(&self, i: usize, j: usize) -> Complex64 {
        let h = self.span / self.width as f64;
        let x = self.center.re + (i as f64 + 0.5 - self.width as f64 / 2.0) * h;
        let y = self.center.im - (j as f64 + 0.5 - self.height as f64 / 2.0) * h;
        Complex64::new(x, y)
    }

    pub fn locate(&self, z: Complex64) -> Option<(usize, usize)> {
        let h = self.span / self.width as f64;
        let i = ((z.re - self.center.re) / h + self.width as f64 / 2.0).floor();
        let j = ((self.center.im - z.im) / h + self.height as f64 / 2.0).floor();
        (i >= 0.0 && j >= 0.0 && (i as usize) < self.width && (j as usize) < self.height)
            .then_some((i as usize, j as usize))
    }

    pub fn get(&self, i: usize, j: usize) -> PixelClass {
        self.pixels[j * self.width + i]
    }

    fn rgb(c: PixelClass) -> [u8; 3] {
        match c {
            PixelClass::Siegel => [236, 146, 32],
            PixelClass::Bounded => [24, 24, 40],
            PixelClass::Escape(k) => {
                let t = ((k as f64 + 1.0).ln() / 6.0).min(1.0);
                let v = (255.0 * (1.0 - t)) as u8;
                [v / 2 + 40, v / 2 + 60, v]
            }
        }
    }

    /// Binary PPM (P6), 8-bit RGB.
    pub fn write_ppm(&self, mut w: impl std::io::Write) -> Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        let mut buf = Vec::with_capacity(3 * self.pixels.len());
        for &p in &self.pixels {
            buf.extend_from_slice(&Self::rgb(p));
        }
        w.write_all(&buf)?;
        Ok(())
    }
}

/// Classifies each pixel of the window by escape, and bounded orbits by
/// whether they return within 1.5 pixels of their start.
pub fn render_siegel(
    params: &QuadParams<f64>,
    width: usize,
    height: usize,
    center: Complex64,
    span: f64,
    iters: usize,
) -> Result<Image> {
    if width == 0 || height == 0 || !(span > 0.0) {
        return Err(Error::InvalidInput("empty render window".into()));
    }
    let mut img = Image {
        width,
        height,
        center,
        span,
        pixels: vec![],
    };
    let close = 1.5 * span / width as f64;
    let c = params.c;
    img.pixels = (0..width * height)
        .into_par_iter()
        .map(|idx| {
            let z0 = img.pixel_point(idx % width, idx / width);
            let mut z = z0;
            let mut ret = f64::INFINITY;
            for k in 0..iters {
                z = z * z + c;
                if z.norm_sqr() > 4.0 {
                    return PixelClass::Escape(k as u32);
                }
                ret = ret.min((z - z0).norm());
            }
            if ret <= close {
                PixelClass::Siegel
            } else {
                PixelClass::Bounded
            }
        })
        .collect();
    Ok(img)
}
