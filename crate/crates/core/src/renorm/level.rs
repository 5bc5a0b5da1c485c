use serde::Serialize;

use crate::approx::YSeries;
use crate::cheb::Segment;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::maps::HenonParams;
use crate::scalar::{abs, re, LogC, Real, C};

/// Numerical knobs of the pyramid.
#[derive(Clone, Debug, Serialize)]
pub struct PyramidOptions {
    /// Chebyshev nodes on the `Z` chart of `A_n`.
    pub nodes_z: usize,
    /// Chebyshev nodes on each chart of `B_n`.
    pub nodes_w: usize,
    /// Degree of the `y`-jets.
    pub jet_degree: usize,
    /// Chart overhang beyond `[0, 1]` (resp. `[0, eta_n(0)]`).
    pub margin: f64,
    /// Half-width of the window in which the normalization is solved.
    pub norm_halfwidth: f64,
    pub norm_nodes: usize,
    /// Held-out residual above which a level is marked degraded.
    pub residual_tol: f64,
    /// Relative threshold for dropping Chebyshev tails.
    pub chop_tol: f64,
    pub newton_max_iter: usize,
    /// Radius of the `y`-disk `V` used for truncation estimates and diameters.
    pub v_radius: f64,
}

impl PyramidOptions {
    pub fn for_scalar<T: Real>() -> Self {
        let extended = T::unit_roundoff() < 1e-20;
        PyramidOptions {
            nodes_z: if extended { 104 } else { 64 },
            nodes_w: if extended { 80 } else { 48 },
            jet_degree: if extended { 14 } else { 10 },
            margin: 0.25,
            norm_halfwidth: 0.05,
            norm_nodes: if extended { 36 } else { 24 },
            residual_tol: if extended { 1e-18 } else { 1e-9 },
            chop_tol: T::unit_roundoff() * 20.0,
            newton_max_iter: 40,
            v_radius: 0.6,
        }
    }

    pub(crate) fn newton_tol<T: Real>(&self) -> f64 {
        T::unit_roundoff() * 64.0
    }
}

/// First component maps of `A_n = (a_n, h_n)` and its normalized Jacobian
/// `Jac A_n / b^{q_{2n+1}}`, on the chart `Z x V`.
#[derive(Clone, Debug)]
pub struct AMaps<T: Real> {
    pub seg: Segment<T>,
    pub a: YSeries<T>,
    pub h: YSeries<T>,
    pub ja: YSeries<T>,
}

/// `b_n` and `Jac B_n / b^{q_{2n}}` on one chart of `Gamma`.
#[derive(Clone, Debug)]
pub struct BChart<T: Real> {
    pub seg: Segment<T>,
    pub b: YSeries<T>,
    pub jb: YSeries<T>,
}

/// The renormalized pair `Sigma_n = (A_n, B_n)`, `B_n(x, y) = (b_n(x, y), x)`.
#[derive(Clone, Debug)]
pub struct PairLevel<T: Real> {
    pub n: usize,
    /// `lambda_n`, `c_n` of `Lambda_n(x, y) = (lambda_n x + c_n, lambda_n y + c_n)`;
    /// for `n = 0` this is the initial scaling `lambda_0 = c_b`, `c_0 = 0`.
    pub lambda: C<T>,
    pub c: C<T>,
    pub amap: AMaps<T>,
    /// Charts of `B_n`; evaluation picks the one with the smallest Bernstein
    /// parameter at the query point.
    pub bcharts: Vec<BChart<T>>,
    /// `b^{q_{2n+1}}` and `b^{q_{2n}}`.
    pub bq_a: LogC<T>,
    pub bq_b: LogC<T>,
    /// Held-out approximation error of this level's fits.
    pub residual: f64,
    pub degraded: bool,
    /// `sup |d_y|` of the components over the chart nodes.
    pub sup_dy: f64,
}

impl<T: Real> PairLevel<T> {
    /// `Sigma_0 = Phi_0^{-1} H_b Phi_0` with `Phi_0 = c_b * id`:
    /// `a_0(x, y) = c_b x^2 + 1 - b y`, `h_0(x, y) = x`.
    pub fn initial(params: &HenonParams<T>, opts: &PyramidOptions) -> Result<Self> {
        if params.outside_epsilon_bar {
            // Allowed, but flagged by the caller; the construction itself is exact.
        }
        if abs(params.c) == 0.0 {
            return Err(Error::OutOfRegime("c_b vanishes".into()));
        }
        let m = opts.margin;
        let d = opts.jet_degree;
        let cb = params.c;
        let b = params.b;
        let zseg = Segment::new(re(-m), re(1.0 + m));
        let wseg = Segment::new(re(1.0 + m), re(-m));
        let one = re::<T>(1.0);
        let quad = move |x: C<T>| cb * x * x + one;
        let minus_b = move |_x: C<T>| -b;
        let ident = |x: C<T>| x;
        let unit = move |_x: C<T>| one;
        let tol = opts.chop_tol;
        let mk = |seg: Segment<T>, n: usize, fs: &[&dyn Fn(C<T>) -> C<T>]| {
            YSeries::from_fns(seg, n, d, tol, fs)
        };
        let amap = AMaps {
            seg: zseg,
            a: mk(zseg, 8, &[&quad, &minus_b]),
            h: mk(zseg, 8, &[&ident]),
            ja: mk(zseg, 8, &[&unit]),
        };
        let bcharts = [wseg, zseg]
            .into_iter()
            .map(|s| BChart {
                seg: s,
                b: mk(s, 8, &[&quad, &minus_b]),
                jb: mk(s, 8, &[&unit]),
            })
            .collect();
        Ok(PairLevel {
            n: 0,
            lambda: cb,
            c: re(0.0),
            amap,
            bcharts,
            bq_a: LogC::pow(b, 1),
            bq_b: LogC::pow(b, 1),
            residual: 0.0,
            degraded: false,
            sup_dy: abs(b),
        })
    }

    /// The chart of `B_n` used at `x`.
    pub fn bchart(&self, x: C<T>) -> &BChart<T> {
        let mut best = &self.bcharts[0];
        let mut rho = best.seg.rho(x);
        for ch in &self.bcharts[1..] {
            let r = ch.seg.rho(x);
            if r < rho {
                rho = r;
                best = ch;
            }
        }
        best
    }

    /// Bernstein parameter of `x` in the best `B` chart and in `Z`.
    pub fn chart_rho(&self, x: C<T>) -> (f64, f64) {
        (self.amap.seg.rho(x), self.bchart(x).seg.rho(x))
    }

    pub fn a(&self, x: C<T>, y: C<T>) -> C<T> {
        self.amap.a.eval(x, y)
    }
    pub fn a_x(&self, x: C<T>, y: C<T>) -> C<T> {
        self.amap.a.eval_dx(x, y, 1)
    }
    pub fn a_y(&self, x: C<T>, y: C<T>) -> C<T> {
        self.amap.a.eval_dy(x, y)
    }
    pub fn h(&self, x: C<T>, y: C<T>) -> C<T> {
        self.amap.h.eval(x, y)
    }
    pub fn h_x(&self, x: C<T>, y: C<T>) -> C<T> {
        self.amap.h.eval_dx(x, y, 1)
    }
    pub fn h_y(&self, x: C<T>, y: C<T>) -> C<T> {
        self.amap.h.eval_dy(x, y)
    }
    /// `Jac A_n / b^{q_{2n+1}}`.
    pub fn ja(&self, x: C<T>, y: C<T>) -> C<T> {
        self.amap.ja.eval(x, y)
    }
    pub fn b(&self, x: C<T>, y: C<T>) -> C<T> {
        self.bchart(x).b.eval(x, y)
    }
    pub fn b_x(&self, x: C<T>, y: C<T>) -> C<T> {
        self.bchart(x).b.eval_dx(x, y, 1)
    }
    pub fn b_y(&self, x: C<T>, y: C<T>) -> C<T> {
        self.bchart(x).b.eval_dy(x, y)
    }
    /// `Jac B_n / b^{q_{2n}}`.
    pub fn jb(&self, x: C<T>, y: C<T>) -> C<T> {
        self.bchart(x).jb.eval(x, y)
    }

    /// `eta_n(x) = a_n(x, 0)`.
    pub fn eta(&self, x: C<T>) -> C<T> {
        self.a(x, re(0.0))
    }
    /// `xi_n(x) = b_n(x, 0)`.
    pub fn xi(&self, x: C<T>) -> C<T> {
        self.b(x, re(0.0))
    }

    pub fn apply_a(&self, p: [C<T>; 2]) -> [C<T>; 2] {
        [self.a(p[0], p[1]), self.h(p[0], p[1])]
    }

    pub fn apply_b(&self, p: [C<T>; 2]) -> [C<T>; 2] {
        [self.b(p[0], p[1]), p[0]]
    }

    pub fn a_jet(&self, x: &Jet<T>, y: &Jet<T>) -> Jet<T> {
        self.amap.a.eval_jet(x, y, false)
    }
    pub fn ax_jet(&self, x: &Jet<T>, y: &Jet<T>) -> Jet<T> {
        self.amap.a.eval_jet(x, y, true)
    }
    pub fn h_jet(&self, x: &Jet<T>, y: &Jet<T>) -> Jet<T> {
        self.amap.h.eval_jet(x, y, false)
    }
    pub fn ja_jet(&self, x: &Jet<T>, y: &Jet<T>) -> Jet<T> {
        self.amap.ja.eval_jet(x, y, false)
    }
    pub fn b_jet(&self, x: &Jet<T>, y: &Jet<T>) -> Jet<T> {
        self.bchart(x.value()).b.eval_jet(x, y, false)
    }
    pub fn jb_jet(&self, x: &Jet<T>, y: &Jet<T>) -> Jet<T> {
        self.bchart(x.value()).jb.eval_jet(x, y, false)
    }

    /// Solves `a_n(u, y) = x` by Newton's method from `seed`.
    pub fn invert_a(&self, x: C<T>, y: C<T>, seed: C<T>, opts: &PyramidOptions) -> Result<C<T>> {
        let tol = opts.newton_tol::<T>();
        let mut u = seed;
        let mut last = f64::INFINITY;
        for _ in 0..opts.newton_max_iter {
            let f = self.a(u, y) - x;
            let df = self.a_x(u, y);
            if abs(df) == 0.0 || !abs(f).is_finite() {
                break;
            }
            let du = f / df;
            u = u - du;
            last = abs(du);
            if last <= tol * (1.0 + abs(u)) {
                return Ok(u);
            }
        }
        let f = abs(self.a(u, y) - x);
        if f.is_finite() && f <= (T::unit_roundoff()).sqrt() * 1e-2 && last < 1e-6 {
            return Ok(u);
        }
        Err(Error::InversionFailure {
            level: self.n,
            detail: format!(
                "Newton from seed {} for x = {} stalled (|f| = {f:e}, rho = {:.3})",
                fmt_c(seed),
                fmt_c(x),
                self.amap.seg.rho(u)
            ),
        })
    }

    /// Inverse branch obtained by continuation from `a_n(1, y)`, where the
    /// branch through `u = 1` is the one near the cap.
    pub fn invert_a_path(&self, x: C<T>, y: C<T>, opts: &PyramidOptions) -> Result<C<T>> {
        let one = re::<T>(1.0);
        let x0 = self.a(one, y);
        let dist = abs(x - x0);
        let steps = ((dist / 0.02).ceil() as usize).clamp(1, 200);
        let mut u = one;
        for s in 1..=steps {
            let t = T::of(s as f64 / steps as f64);
            let target = x0 + (x - x0).scale(t);
            u = self.invert_a(target, y, u, opts)?;
        }
        Ok(u)
    }

    /// Inverts at each target by walking outward from a known solution
    /// `(x_start, u_start)`; `keys` order the targets along their segment.
    #[allow(clippy::too_many_arguments)]
    pub fn continue_inverse(
        &self,
        targets: &[C<T>],
        keys: &[f64],
        y: C<T>,
        x_start: C<T>,
        key_start: f64,
        u_start: C<T>,
        opts: &PyramidOptions,
    ) -> Result<Vec<C<T>>> {
        let mut order: Vec<usize> = (0..targets.len()).collect();
        order.sort_by(|&i, &j| keys[i].total_cmp(&keys[j]));
        let mut out = vec![C::new(T::zero(), T::zero()); targets.len()];
        let up: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&i| keys[i] >= key_start)
            .collect();
        let down: Vec<usize> = order
            .iter()
            .rev()
            .copied()
            .filter(|&i| keys[i] < key_start)
            .collect();
        for walk in [up, down] {
            let (mut u, mut prev) = (u_start, x_start);
            for i in walk {
                let sub = ((abs(targets[i] - prev) / 0.01).ceil() as usize).clamp(1, 50);
                for s in 1..=sub {
                    let t = T::of(s as f64 / sub as f64);
                    u = self.invert_a(prev + (targets[i] - prev).scale(t), y, u, opts)?;
                }
                out[i] = u;
                prev = targets[i];
            }
        }
        Ok(out)
    }

    /// Points of the `Z` chart at which to sample `sup |d_y|`.
    pub fn z_samples(&self, n: usize) -> Vec<C<T>> {
        self.amap.seg.nodes(n)
    }

    /// `sup |d_y|` over `a_n`, `h_n`, `b_n` on chart nodes (y = 0).
    pub fn measure_sup_dy(&self, n: usize) -> f64 {
        let mut s: f64 = 0.0;
        for x in self.amap.seg.nodes(n) {
            s = s
                .max(abs(self.a_y(x, re(0.0))))
                .max(abs(self.h_y(x, re(0.0))));
        }
        for ch in &self.bcharts {
            for x in ch.seg.nodes(n) {
                s = s.max(abs(ch.b.eval_dy(x, re(0.0))));
            }
        }
        s
    }

    /// `sup |B_n A_n - A_n B_n|` at deterministic points of the shared domain.
    pub fn commutation_residual(&self, npts: usize) -> f64 {
        let g = crate::scalar::golden::<f64>();
        let mut worst: f64 = 0.0;
        for i in 0..npts {
            let s1 = ((i as f64 + 0.5) * g).fract();
            let s2 = ((i as f64 + 0.5) * g * g).fract();
            let s3 = ((i as f64 + 0.5) * 0.7548776662466927).fract();
            let p = [
                crate::scalar::cx(0.3 * s1, 0.1 * (s2 - 0.5)),
                crate::scalar::cx(0.1 * (s3 - 0.5), 0.1 * (s2 - s1)),
            ];
            let ba = self.apply_b(self.apply_a(p));
            let ab = self.apply_a(self.apply_b(p));
            worst = worst.max(abs(ba[0] - ab[0])).max(abs(ba[1] - ab[1]));
        }
        worst
    }
}

pub(crate) fn fmt_c<T: Real>(z: C<T>) -> String {
    format!("{:.6e}{:+.6e}i", z.re.to_f64(), z.im.to_f64())
}
