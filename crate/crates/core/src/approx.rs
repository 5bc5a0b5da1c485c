//! Bivariate approximants `f(x, y) = sum_k f_k(x) y^k` with Chebyshev
//! coefficient functions `f_k` on a segment.
//!
//! The `y`-dependence of renormalized maps is tiny and analytic, so it is
//! carried as a truncated power series; the `x`-dependence is resolved by
//! Chebyshev series on straight segments.

use crate::cheb::{Cheb, Segment};
use crate::jet::Jet;
use crate::scalar::{abs, Real, C};

#[derive(Clone, Debug)]
pub struct YSeries<T: Real> {
    pub seg: Segment<T>,
    /// `coef[k] = f_k`.
    pub coef: Vec<Cheb<T>>,
    /// `taylor[k][m] = f_k^{(m)} / m!`.
    taylor: Vec<Vec<Cheb<T>>>,
}

impl<T: Real> YSeries<T> {
    pub fn new(coef: Vec<Cheb<T>>) -> Self {
        assert!(!coef.is_empty());
        let seg = coef[0].seg;
        let deg = coef.len() - 1;
        let taylor = coef
            .iter()
            .map(|f| {
                let mut row = Vec::with_capacity(deg + 2);
                row.push(f.clone());
                for m in 1..=deg + 1 {
                    let mut d = row[m - 1].deriv();
                    let inv = T::from_usize(m).unwrap();
                    for c in d.coef.iter_mut() {
                        *c = c.unscale(inv);
                    }
                    row.push(d);
                }
                row
            })
            .collect();
        YSeries { seg, coef, taylor }
    }

    /// Fits each `y`-coefficient of jets sampled at the nodes of `seg`.
    pub fn from_jets(seg: Segment<T>, jets: &[Jet<T>], chop_tol: f64) -> Self {
        let deg = jets[0].deg();
        let coef = (0..=deg)
            .map(|k| {
                let v: Vec<C<T>> = jets.iter().map(|j| j.c[k]).collect();
                Cheb::fit(seg, &v, chop_tol)
            })
            .collect();
        Self::new(coef)
    }

    /// Builds from closures for each power of `y`.
    pub fn from_fns(
        seg: Segment<T>,
        n: usize,
        deg: usize,
        chop_tol: f64,
        fs: &[&dyn Fn(C<T>) -> C<T>],
    ) -> Self {
        let coef = (0..=deg)
            .map(|k| match fs.get(k) {
                Some(f) => Cheb::from_fn(seg, n, chop_tol, f),
                None => Cheb::zero(seg),
            })
            .collect();
        Self::new(coef)
    }

    #[inline]
    pub fn deg_y(&self) -> usize {
        self.coef.len() - 1
    }

    pub fn eval(&self, x: C<T>, y: C<T>) -> C<T> {
        let t = self.seg.to_ref(x);
        let mut r = C::new(T::zero(), T::zero());
        for f in self.coef.iter().rev() {
            r = r * y + f.eval_ref(t);
        }
        r
    }

    /// `partial_x^m f / m!` at `(x, y)`.
    pub fn eval_dx(&self, x: C<T>, y: C<T>, m: usize) -> C<T> {
        let t = self.seg.to_ref(x);
        let mut r = C::new(T::zero(), T::zero());
        for row in self.taylor.iter().rev() {
            r = r * y + row[m].eval_ref(t);
        }
        r
    }

    pub fn eval_dy(&self, x: C<T>, y: C<T>) -> C<T> {
        let t = self.seg.to_ref(x);
        let mut r = C::new(T::zero(), T::zero());
        for (k, f) in self.coef.iter().enumerate().skip(1).rev() {
            r = r * y + f.eval_ref(t).scale(T::from_usize(k).unwrap());
        }
        r
    }

    /// Coefficient function `f_k` at `x`.
    pub fn coef_at(&self, k: usize, x: C<T>) -> C<T> {
        self.coef
            .get(k)
            .map_or(C::new(T::zero(), T::zero()), |f| f.eval(x))
    }

    /// Composition `f(X(y), Y(y))` for jets `X`, `Y`; with `dx = true` the
    /// partial derivative `f_x` is composed instead.
    pub fn eval_jet(&self, xj: &Jet<T>, yj: &Jet<T>, dx: bool) -> Jet<T> {
        let d = xj.deg().min(yj.deg());
        let t = self.seg.to_ref(xj.value());
        let delta = xj.nilpotent();
        let mut powers: Vec<Jet<T>> = vec![Jet::constant(C::new(T::one(), T::zero()), d)];
        let mut r = Jet::zero(d);
        for (k, row) in self.taylor.iter().enumerate().rev() {
            // g_k(y) = sum_m row[m + s](X0) * weight * delta^m
            let mut g = Jet::zero(d);
            let top = if dx { row.len() - 1 } else { row.len() };
            for m in 0..top.min(d + 1) {
                if powers.len() <= m {
                    let next = powers[m - 1].mul_jet(&delta);
                    powers.push(next);
                }
                let coef = if dx {
                    row[m + 1].eval_ref(t).scale(T::from_usize(m + 1).unwrap())
                } else {
                    row[m].eval_ref(t)
                };
                if coef.re == T::zero() && coef.im == T::zero() {
                    continue;
                }
                for (gi, pi) in g.c.iter_mut().zip(&powers[m].c) {
                    *gi = *gi + coef * pi;
                }
                if powers[m].max_abs() == 0.0 {
                    break;
                }
            }
            r = if k + 1 == self.taylor.len() {
                g
            } else {
                &r.mul_jet(yj) + &g
            };
        }
        r
    }

    /// Largest magnitude of `f_k` over the given points.
    pub fn sup_coef(&self, k: usize, xs: &[C<T>]) -> f64 {
        xs.iter()
            .map(|&x| abs(self.coef_at(k, x)))
            .fold(0.0, f64::max)
    }

    pub fn tail_ratio(&self) -> f64 {
        self.coef[0].tail_ratio()
    }

    pub fn max_len(&self) -> usize {
        self.coef.iter().map(|c| c.coef.len()).max().unwrap_or(0)
    }
}
