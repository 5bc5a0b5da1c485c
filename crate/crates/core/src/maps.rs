//! Quadratic and Hénon families parametrized by fixed-point multipliers.

use crate::error::{Error, Result};
use crate::scalar::{abs, unit_circle, Real, C};

pub const DEFAULT_EPSILON_BAR: f64 = 0.125;
pub const DEFAULT_ESCAPE: f64 = 1e8;

/// `f_c(x) = x^2 + c` with multiplier `mu` at `x_fix`.
#[derive(Clone, Copy, Debug)]
pub struct QuadParams<T: Real> {
    pub c: C<T>,
    pub mu: C<T>,
    pub x_fix: C<T>,
}

impl<T: Real> QuadParams<T> {
    pub fn from_multiplier(mu: C<T>) -> Result<Self> {
        if mu.norm() == T::zero() {
            return Err(Error::InvalidInput("multiplier must be nonzero".into()));
        }
        let half = T::of(0.5);
        let quarter = T::of(0.25);
        Ok(QuadParams {
            c: mu.scale(half) - mu * mu.scale(quarter),
            mu,
            x_fix: mu.scale(half),
        })
    }

    pub fn from_rotation(theta: T) -> Self {
        Self::from_multiplier(unit_circle(theta)).expect("|mu| = 1")
    }

    #[inline]
    pub fn apply(&self, x: C<T>) -> C<T> {
        x * x + self.c
    }
}

/// `H(x, y) = (x^2 + c - b y, x)` with fixed point `(x_fix, x_fix)` whose
/// eigenvalues are `mu` (neutral) and `nu` (attracting), `b = mu nu`.
#[derive(Clone, Copy, Debug)]
pub struct HenonParams<T: Real> {
    pub theta: T,
    pub c: C<T>,
    pub b: C<T>,
    pub mu: C<T>,
    pub nu: C<T>,
    pub x_fix: C<T>,
    /// Set when `|b|` exceeds the configured smallness threshold.
    pub outside_epsilon_bar: bool,
    pub escape: f64,
}

impl<T: Real> HenonParams<T> {
    pub fn from_rotation(theta: T, b: C<T>, epsilon_bar: f64) -> Result<Self> {
        let nb = abs(b);
        if !(nb < 1.0) {
            return Err(Error::OutOfRegime(format!("|b| = {nb} must be below 1")));
        }
        let mu = unit_circle(theta);
        let nu = b / mu;
        let s = (mu + nu).scale(T::of(0.5));
        let one = C::new(T::one(), T::zero());
        let c = (one + mu * nu) * s - s * s;
        Ok(HenonParams {
            theta,
            c,
            b,
            mu,
            nu,
            x_fix: s,
            outside_epsilon_bar: nb > epsilon_bar,
            escape: DEFAULT_ESCAPE,
        })
    }

    #[inline]
    pub fn apply_unchecked(&self, p: [C<T>; 2]) -> [C<T>; 2] {
        let [x, y] = p;
        [x * x + self.c - self.b * y, x]
    }

    pub fn apply(&self, p: [C<T>; 2]) -> Result<[C<T>; 2]> {
        let q = self.apply_unchecked(p);
        self.check(q, 1)?;
        Ok(q)
    }

    fn check(&self, p: [C<T>; 2], step: usize) -> Result<()> {
        let m = abs(p[0]).max(abs(p[1]));
        if m.is_finite() && m <= self.escape {
            Ok(())
        } else {
            Err(Error::Overflow {
                step,
                bound: self.escape,
            })
        }
    }

    pub fn iterate(&self, mut p: [C<T>; 2], m: u64) -> Result<[C<T>; 2]> {
        for i in 0..m {
            p = self.apply_unchecked(p);
            self.check(p, i as usize + 1)?;
        }
        Ok(p)
    }

    pub fn inverse(&self, p: [C<T>; 2]) -> [C<T>; 2] {
        let [x, y] = p;
        [y, (y * y + self.c - x) / self.b]
    }

    /// Differential at `p`: `[[2x, -b], [1, 0]]`.
    pub fn jacobian(&self, p: [C<T>; 2]) -> [[C<T>; 2]; 2] {
        let one = C::new(T::one(), T::zero());
        let zero = C::new(T::zero(), T::zero());
        [[p[0].scale(T::of(2.0)), -self.b], [one, zero]]
    }

    /// Eigenvalues of the differential at the fixed point.
    pub fn fixed_point_eigenvalues(&self) -> (C<T>, C<T>) {
        let tr = self.x_fix.scale(T::of(2.0));
        let det = self.b;
        let disc = crate::scalar::csqrt(tr * tr - det.scale(T::of(4.0)));
        let half = T::of(0.5);
        let (l1, l2) = ((tr + disc).scale(half), (tr - disc).scale(half));
        if (l1 - self.mu).norm() <= (l2 - self.mu).norm() {
            (l1, l2)
        } else {
            (l2, l1)
        }
    }

    /// Relative errors of the eigenvalues against `(mu, nu)`.
    pub fn multiplier_residual(&self) -> (f64, f64) {
        let (m, n) = self.fixed_point_eigenvalues();
        let rn = if abs(self.nu) > 0.0 {
            abs(n - self.nu) / abs(self.nu)
        } else {
            abs(n)
        };
        (abs(m - self.mu) / abs(self.mu), rn)
    }

    /// Fixed-point residual `|H(x_fix, x_fix) - (x_fix, x_fix)|`.
    pub fn fixed_point_residual(&self) -> f64 {
        let p = self.apply_unchecked([self.x_fix, self.x_fix]);
        abs(p[0] - self.x_fix).max(abs(p[1] - self.x_fix))
    }
}
