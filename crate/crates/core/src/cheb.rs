//! Chebyshev series on straight complex segments.
//!
//! A segment `[a, b]` in the plane is mapped affinely onto `[-1, 1]`. The
//! series converges inside the Bernstein ellipse through the nearest
//! singularity, so evaluating slightly off the segment is legitimate as long
//! as the ellipse parameter `rho` stays well inside that ellipse.

use crate::scalar::{abs, Real, C};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<T: Real> {
    pub a: C<T>,
    pub b: C<T>,
}

impl<T: Real> Segment<T> {
    pub fn new(a: C<T>, b: C<T>) -> Self {
        Segment { a, b }
    }

    #[inline]
    pub fn to_ref(&self, x: C<T>) -> C<T> {
        let two = T::of(2.0);
        (x.scale(two) - self.a - self.b) / (self.b - self.a)
    }

    #[inline]
    pub fn from_ref(&self, t: C<T>) -> C<T> {
        let half = T::of(0.5);
        (self.a + self.b).scale(half) + (self.b - self.a).scale(half) * t
    }

    /// Point at real parameter `s` in `[0, 1]` from `a` to `b`.
    pub fn lerp(&self, s: f64) -> C<T> {
        self.a + (self.b - self.a).scale(T::of(s))
    }

    /// Chebyshev points of the first kind, `t_k = cos(pi (k + 1/2) / n)`.
    pub fn nodes(&self, n: usize) -> Vec<C<T>> {
        ref_nodes::<T>(n)
            .into_iter()
            .map(|t| self.from_ref(C::new(t, T::zero())))
            .collect()
    }

    /// Bernstein ellipse parameter of `x` (1 on the segment itself).
    pub fn rho(&self, x: C<T>) -> f64 {
        let t = self.to_ref(x);
        let one = C::new(T::one(), T::zero());
        let w = t + crate::scalar::csqrt(t * t - one);
        let r = abs(w);
        if r < 1.0 {
            1.0 / r
        } else {
            r
        }
    }

    /// Real part of the reference coordinate, used to order points.
    pub fn param(&self, x: C<T>) -> f64 {
        self.to_ref(x).re.to_f64()
    }

    pub fn length(&self) -> f64 {
        abs(self.b - self.a)
    }
}

pub fn ref_nodes<T: Real>(n: usize) -> Vec<T> {
    let nn = T::from_usize(n).unwrap();
    (0..n)
        .map(|k| {
            let kk = T::from_usize(k).unwrap() + T::of(0.5);
            (T::PI() * kk / nn).sin_cos_r().1
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cheb<T: Real> {
    pub seg: Segment<T>,
    pub coef: Vec<C<T>>,
}

impl<T: Real> Cheb<T> {
    pub fn zero(seg: Segment<T>) -> Self {
        Cheb {
            seg,
            coef: vec![C::new(T::zero(), T::zero())],
        }
    }

    /// Interpolant through values at the `values.len()` first-kind nodes of
    /// `seg`, with trailing coefficients below `chop_tol * max|c|` removed.
    pub fn fit(seg: Segment<T>, values: &[C<T>], chop_tol: f64) -> Self {
        let n = values.len();
        assert!(n > 0, "need at least one node");
        // cos(pi j (2k+1) / 2n) through a table of multiples of pi/2n.
        let nn = T::from_usize(2 * n).unwrap();
        let table: Vec<T> = (0..4 * n)
            .map(|m| (T::PI() * T::from_usize(m).unwrap() / nn).sin_cos_r().1)
            .collect();
        let scale = T::of(2.0) / T::from_usize(n).unwrap();
        let mut coef: Vec<C<T>> = (0..n)
            .map(|j| {
                let mut s = C::new(T::zero(), T::zero());
                for (k, v) in values.iter().enumerate() {
                    let m = (j * (2 * k + 1)) % (4 * n);
                    s = s + v.scale(table[m]);
                }
                s.scale(scale)
            })
            .collect();
        coef[0] = coef[0].scale(T::of(0.5));
        chop(&mut coef, chop_tol);
        Cheb { seg, coef }
    }

    pub fn from_fn(seg: Segment<T>, n: usize, chop_tol: f64, f: impl Fn(C<T>) -> C<T>) -> Self {
        let vals: Vec<C<T>> = seg.nodes(n).into_iter().map(f).collect();
        Self::fit(seg, &vals, chop_tol)
    }

    #[inline]
    pub fn eval(&self, x: C<T>) -> C<T> {
        self.eval_ref(self.seg.to_ref(x))
    }

    /// Clenshaw recurrence in the reference coordinate.
    pub fn eval_ref(&self, t: C<T>) -> C<T> {
        let zero = C::new(T::zero(), T::zero());
        let n = self.coef.len();
        if n == 1 {
            return self.coef[0];
        }
        let two_t = t.scale(T::of(2.0));
        let (mut b1, mut b2) = (zero, zero);
        for c in self.coef[1..].iter().rev() {
            let b0 = two_t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coef[0]
    }

    /// Derivative with respect to the original (unscaled) variable.
    pub fn deriv(&self) -> Self {
        let n = self.coef.len();
        let zero = C::new(T::zero(), T::zero());
        if n <= 1 {
            return Cheb {
                seg: self.seg,
                coef: vec![zero],
            };
        }
        let mut d = vec![zero; n];
        for k in (1..n).rev() {
            let next = if k + 1 < n { d[k + 1] } else { zero };
            d[k - 1] = next + self.coef[k].scale(T::from_usize(2 * k).unwrap());
        }
        d[0] = d[0].scale(T::of(0.5));
        d.truncate(n - 1);
        let factor = C::new(T::of(2.0), T::zero()) / (self.seg.b - self.seg.a);
        for c in d.iter_mut() {
            *c = *c * factor;
        }
        Cheb {
            seg: self.seg,
            coef: d,
        }
    }

    pub fn max_coef(&self) -> f64 {
        self.coef.iter().map(|c| abs(*c)).fold(0.0, f64::max)
    }

    /// Size of the last retained coefficient relative to the largest one;
    /// a cheap a-posteriori truncation error indicator.
    pub fn tail_ratio(&self) -> f64 {
        let m = self.max_coef();
        if m == 0.0 || self.coef.len() < 2 {
            return 0.0;
        }
        let k = self.coef.len();
        abs(self.coef[k - 1]).max(abs(self.coef[k - 2])) / m
    }
}

/// Drops trailing coefficients below `tol` times the largest magnitude.
///
/// The tolerance is floored at the rounding-noise level of the transform,
/// since noise coefficients grow like `rho^k` off the segment.
pub fn chop<T: Real>(c: &mut Vec<C<T>>, tol: f64) {
    let tol = tol.max(16.0 * T::unit_roundoff());
    let m = c.iter().map(|z| abs(*z)).fold(0.0, f64::max);
    if m == 0.0 {
        c.truncate(1);
        return;
    }
    let mut k = c.len();
    while k > 1 && abs(c[k - 1]) <= tol * m {
        k -= 1;
    }
    c.truncate(k);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx, re, TwoFloat};

    fn seg() -> Segment<f64> {
        Segment::new(re(-0.25), re(1.25))
    }

    #[test]
    fn reproduces_polynomials_exactly() {
        let s = seg();
        let f = |x: C<f64>| x * x * x - x.scale(2.0) + re(0.5);
        let ch = Cheb::from_fn(s, 12, 1e-15, f);
        assert!(ch.coef.len() <= 4);
        for x in [re(0.1), cx(0.3, 0.2), re(1.2)] {
            assert!((ch.eval(x) - f(x)).norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_matches_analytic() {
        let s = Segment::new(cx::<f64>(0.1, -0.2), cx(-0.3, 0.9));
        let ch = Cheb::from_fn(s, 40, 1e-16, crate::scalar::cexp);
        let d = ch.deriv();
        for u in [0.0, 0.3, 0.77] {
            let x = s.lerp(u);
            assert!((d.eval(x) - crate::scalar::cexp(x)).norm() < 1e-12);
        }
    }

    #[test]
    fn off_segment_within_ellipse() {
        let ch = Cheb::from_fn(seg(), 48, 1e-16, |x| (x + re(2.0)).inv());
        let x = cx(0.5, 0.3);
        assert!(seg().rho(x) > 1.0);
        let e = (ch.eval(x) - (x + re(2.0)).inv()).norm();
        assert!(e < 1e-12, "{e} {:?}", ch.coef.len());
    }

    #[test]
    fn extended_precision_fit() {
        let s: Segment<TwoFloat> = Segment::new(re(-0.25), re(1.25));
        let ch = Cheb::from_fn(s, 64, 1e-31, crate::scalar::cexp);
        let x = re::<TwoFloat>(0.4);
        let e = (ch.eval(x) - crate::scalar::cexp(x)).norm().to_f64();
        assert!(e < 1e-29, "{e}");
    }
}
