//! Truncated power series in one variable (`y`), a.k.a. jets.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{abs, Real, C};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T: Real> {
    pub c: Vec<C<T>>,
}

impl<T: Real> Jet<T> {
    pub fn zero(deg: usize) -> Self {
        Jet {
            c: vec![C::new(T::zero(), T::zero()); deg + 1],
        }
    }

    pub fn constant(v: C<T>, deg: usize) -> Self {
        let mut j = Self::zero(deg);
        j.c[0] = v;
        j
    }

    /// `shift + scale * y`.
    pub fn affine(shift: C<T>, scale: C<T>, deg: usize) -> Self {
        let mut j = Self::constant(shift, deg);
        if deg >= 1 {
            j.c[1] = scale;
        }
        j
    }

    #[inline]
    pub fn deg(&self) -> usize {
        self.c.len() - 1
    }

    #[inline]
    pub fn value(&self) -> C<T> {
        self.c[0]
    }

    pub fn eval(&self, y: C<T>) -> C<T> {
        let mut r = C::new(T::zero(), T::zero());
        for c in self.c.iter().rev() {
            r = r * y + c;
        }
        r
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Jet {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add_const(&self, s: C<T>) -> Self {
        let mut r = self.clone();
        r.c[0] = r.c[0] + s;
        r
    }

    /// The part without constant term.
    pub fn nilpotent(&self) -> Self {
        let mut r = self.clone();
        r.c[0] = C::new(T::zero(), T::zero());
        r
    }

    pub fn mul_jet(&self, o: &Self) -> Self {
        let d = self.deg().min(o.deg());
        let mut r = Self::zero(d);
        for (i, a) in self.c.iter().enumerate().take(d + 1) {
            if a.re == T::zero() && a.im == T::zero() {
                continue;
            }
            for (k, b) in o.c.iter().enumerate().take(d + 1 - i) {
                r.c[i + k] = r.c[i + k] + a * b;
            }
        }
        r
    }

    pub fn div_jet(&self, o: &Self) -> Self {
        let d = self.deg().min(o.deg());
        let mut r = Self::zero(d);
        let inv0 = o.c[0].inv();
        for k in 0..=d {
            let mut s = self.c[k];
            for i in 0..k {
                s = s - r.c[i] * o.c[k - i];
            }
            r.c[k] = s * inv0;
        }
        r
    }

    /// Antiderivative with the given constant term.
    pub fn integrate(&self, c0: C<T>) -> Self {
        let d = self.deg();
        let mut r = Self::zero(d);
        r.c[0] = c0;
        for k in 0..d {
            r.c[k + 1] = self.c[k].unscale(T::from_usize(k + 1).unwrap());
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|v| abs(*v)).fold(0.0, f64::max)
    }
}

impl<T: Real> Add for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, o: &Jet<T>) -> Jet<T> {
        Jet {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, o: &Jet<T>) -> Jet<T> {
        Jet {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, o: &Jet<T>) -> Jet<T> {
        self.mul_jet(o)
    }
}

impl<T: Real> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet {
            c: self.c.iter().map(|a| -a).collect(),
        }
    }
}
