//! Renormalization of commuting pairs of two-dimensional maps.

pub mod level;
pub mod oned;
pub mod step;

use serde::Serialize;

pub use level::{AMaps, BChart, PairLevel, PyramidOptions};
pub use oned::{fixed_point_1d, FixedPoint1D, Pair1D};
pub use step::{normalize, renorm_step};

use crate::arithmetic::fib_q;
use crate::error::{Error, Result};
use crate::maps::HenonParams;
use crate::scalar::{abs, re, to_c64, Real, C};

pub type Point<T> = [C<T>; 2];
pub type Mat2<T> = [[C<T>; 2]; 2];

/// The tower `Sigma_0, ..., Sigma_depth` with the caps transported down from
/// the deepest level.
#[derive(Clone, Debug)]
pub struct Pyramid<T: Real> {
    pub params: HenonParams<T>,
    pub opts: PyramidOptions,
    pub levels: Vec<PairLevel<T>>,
    /// `caps[n] = Phi_{n+1} o ... o Phi_depth (1, 0)`.
    pub caps: Vec<Point<T>>,
    /// `|caps(depth) - caps(depth - 1)|` per level; infinite when unavailable.
    pub cap_errors: Vec<f64>,
}

/// Short per-level summary for reports.
#[derive(Clone, Debug, Serialize)]
pub struct LevelSummary {
    pub n: usize,
    pub lambda: [f64; 2],
    pub c: [f64; 2],
    pub log10_bq_a: f64,
    pub log10_bq_b: f64,
    pub residual: f64,
    pub degraded: bool,
    pub sup_dy: f64,
    pub cap: [f64; 4],
    pub cap_error: f64,
}

impl<T: Real> Pyramid<T> {
    /// Builds `depth` renormalization levels above `Sigma_0`.
    pub fn build(params: HenonParams<T>, depth: usize, opts: PyramidOptions) -> Result<Self> {
        let mut levels = vec![PairLevel::initial(&params, &opts)?];
        for _ in 0..depth {
            let next = renorm_step(levels.last().unwrap(), &opts)?;
            levels.push(next);
        }
        Self::from_levels(params, opts, levels)
    }

    /// Assembles a pyramid from precomputed levels (e.g. a cache).
    pub fn from_levels(
        params: HenonParams<T>,
        opts: PyramidOptions,
        levels: Vec<PairLevel<T>>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidInput(
                "pyramid needs at least one level".into(),
            ));
        }
        let mut p = Pyramid {
            params,
            opts,
            levels,
            caps: vec![],
            cap_errors: vec![],
        };
        let depth = p.depth();
        let top = [re(1.0), re(0.0)];
        let mut caps = Vec::with_capacity(depth + 1);
        let mut errs = Vec::with_capacity(depth + 1);
        for n in 0..=depth {
            let k = p.chain(n, depth, top)?;
            let err = if depth > n {
                let k1 = p.chain(n, depth - 1, top)?;
                abs(k[0] - k1[0]).max(abs(k[1] - k1[1]))
            } else {
                f64::INFINITY
            };
            caps.push(k);
            errs.push(err);
        }
        p.caps = caps;
        p.cap_errors = errs;
        Ok(p)
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> Result<&PairLevel<T>> {
        self.levels.get(n).ok_or(Error::DepthExceeded {
            need: n,
            have: self.depth(),
        })
    }

    /// `Phi_m(p) = (u, lambda_m y + c_m)` with `a_{m-1}(u, .) = lambda_m x + c_m`.
    pub fn phi(&self, m: usize, p: Point<T>) -> Result<Point<T>> {
        if m == 0 || m > self.depth() {
            return Err(Error::DepthExceeded {
                need: m,
                have: self.depth(),
            });
        }
        let (l, prev) = (&self.levels[m], &self.levels[m - 1]);
        let x = l.lambda * p[0] + l.c;
        let y = l.lambda * p[1] + l.c;
        let u = prev.invert_a_path(x, y, &self.opts)?;
        Ok([u, y])
    }

    pub fn phi_inv(&self, m: usize, p: Point<T>) -> Result<Point<T>> {
        if m == 0 || m > self.depth() {
            return Err(Error::DepthExceeded {
                need: m,
                have: self.depth(),
            });
        }
        let (l, prev) = (&self.levels[m], &self.levels[m - 1]);
        let il = l.lambda.inv();
        Ok([(prev.a(p[0], p[1]) - l.c) * il, (p[1] - l.c) * il])
    }

    /// `D Phi_m` at `p`.
    pub fn phi_derivative(&self, m: usize, p: Point<T>) -> Result<Mat2<T>> {
        let q = self.phi(m, p)?;
        let (l, prev) = (&self.levels[m], &self.levels[m - 1]);
        let ax = prev.a_x(q[0], q[1]);
        let ay = prev.a_y(q[0], q[1]);
        if abs(ax) == 0.0 {
            return Err(Error::IllConditioned(format!("a_x vanishes in Phi_{m}")));
        }
        let lam = l.lambda;
        let zero = re(0.0);
        Ok([[lam / ax, -(lam * ay) / ax], [zero, lam]])
    }

    /// `Phi_{n+1} o ... o Phi_k (p)`.
    pub fn chain(&self, n: usize, k: usize, p: Point<T>) -> Result<Point<T>> {
        if k > self.depth() {
            return Err(Error::DepthExceeded {
                need: k,
                have: self.depth(),
            });
        }
        let mut q = p;
        for m in (n + 1..=k).rev() {
            q = self.phi(m, q)?;
        }
        Ok(q)
    }

    /// Inverse of [`Self::chain`].
    pub fn chain_inv(&self, n: usize, k: usize, p: Point<T>) -> Result<Point<T>> {
        let mut q = p;
        for m in n + 1..=k {
            q = self.phi_inv(m, q)?;
        }
        Ok(q)
    }

    pub fn microscope(&self, n: usize, k: usize) -> Result<Microscope<'_, T>> {
        if n + k > self.depth() {
            return Err(Error::DepthExceeded {
                need: n + k,
                have: self.depth(),
            });
        }
        Ok(Microscope { pyr: self, n, k })
    }

    /// `Phi_0(p) = lambda_0 p` into the coordinates of the original map.
    pub fn to_ambient(&self, p: Point<T>) -> Point<T> {
        let l0 = self.levels[0].lambda;
        [l0 * p[0], l0 * p[1]]
    }

    pub fn from_ambient(&self, p: Point<T>) -> Point<T> {
        let il = self.levels[0].lambda.inv();
        [p[0] * il, p[1] * il]
    }

    pub fn lambda_sequence(&self) -> Vec<C<T>> {
        self.levels.iter().skip(1).map(|l| l.lambda).collect()
    }

    pub fn summaries(&self) -> Vec<LevelSummary> {
        self.levels
            .iter()
            .enumerate()
            .map(|(n, l)| {
                let lam = to_c64(l.lambda);
                let c = to_c64(l.c);
                let k = [to_c64(self.caps[n][0]), to_c64(self.caps[n][1])];
                LevelSummary {
                    n,
                    lambda: [lam.re, lam.im],
                    c: [c.re, c.im],
                    log10_bq_a: l.bq_a.log10_abs(),
                    log10_bq_b: l.bq_b.log10_abs(),
                    residual: l.residual,
                    degraded: l.degraded,
                    sup_dy: l.sup_dy,
                    cap: [k[0].re, k[0].im, k[1].re, k[1].im],
                    cap_error: self.cap_errors[n],
                }
            })
            .collect()
    }

    /// Reference value of `A_n(p)` computed directly from iterates of the
    /// Hénon map conjugated by `Phi_0 o Phi_0^n`.
    pub fn exact_pair_oracle(&self, n: usize, p: Point<T>) -> Result<(Point<T>, Point<T>)> {
        let amb = self.to_ambient(self.chain(0, n, p)?);
        let qa = fib_q(2 * n + 1);
        let qb = fib_q(2 * n);
        let back = |z: Point<T>| self.chain_inv(0, n, self.from_ambient(z));
        let a = back(self.params.iterate(amb, qa)?)?;
        let b = back(self.params.iterate(amb, qb)?)?;
        Ok((a, b))
    }
}

/// `Phi_n^{n+k} = Phi_{n+1} o ... o Phi_{n+k}`, mapping level `n + k`
/// coordinates into level `n` coordinates.
pub struct Microscope<'a, T: Real> {
    pyr: &'a Pyramid<T>,
    pub n: usize,
    pub k: usize,
}

impl<'a, T: Real> Microscope<'a, T> {
    pub fn apply(&self, p: Point<T>) -> Result<Point<T>> {
        self.pyr.chain(self.n, self.n + self.k, p)
    }

    pub fn apply_inv(&self, p: Point<T>) -> Result<Point<T>> {
        self.pyr.chain_inv(self.n, self.n + self.k, p)
    }

    /// Derivative of the composition at `p` (level `n + k` coordinates).
    pub fn derivative(&self, p: Point<T>) -> Result<Mat2<T>> {
        let mut q = p;
        let mut d = identity::<T>();
        for m in (self.n + 1..=self.n + self.k).rev() {
            let dm = self.pyr.phi_derivative(m, q)?;
            d = mat_mul(&dm, &d);
            q = self.pyr.phi(m, q)?;
        }
        Ok(d)
    }

    /// Diameter of the image of `(Z x V) u (Gamma x V)` at level `n + k`,
    /// estimated on boundary samples.
    pub fn image_diameter(&self, samples: usize) -> Result<f64> {
        let top = self.pyr.level(self.n + self.k)?;
        let v = self.pyr.opts.v_radius;
        let ys = [
            re(0.0),
            re(v),
            re(-v),
            crate::scalar::cx(0.0, v),
            crate::scalar::cx(0.0, -v),
        ];
        let mut pts = Vec::new();
        let mut segs = vec![top.amap.seg];
        segs.extend(top.bcharts.iter().map(|c| c.seg));
        for seg in segs {
            for i in 0..samples {
                let x = seg.lerp(i as f64 / (samples.max(2) - 1) as f64);
                for &y in &ys {
                    pts.push(self.apply([x, y])?);
                }
            }
        }
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.max(dist(pts[i], pts[j]));
            }
        }
        Ok(d)
    }
}

pub fn identity<T: Real>() -> Mat2<T> {
    [[re(1.0), re(0.0)], [re(0.0), re(1.0)]]
}

pub fn mat_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut r = [[re(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

pub fn mat_apply<T: Real>(a: &Mat2<T>, v: Point<T>) -> Point<T> {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

/// Euclidean distance in `C^2`.
pub fn dist<T: Real>(p: Point<T>, q: Point<T>) -> f64 {
    let (a, b) = (abs(p[0] - q[0]), abs(p[1] - q[1]));
    (a * a + b * b).sqrt()
}
