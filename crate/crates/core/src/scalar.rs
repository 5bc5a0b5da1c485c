//! Floating scalar abstraction shared by every numeric path.
//!
//! All algorithms are generic over [`Real`]; `f64` is the default and
//! [`TwoFloat`] (double-double, ~106 significand bits) is the extended mode.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use serde::{Deserialize, Serialize};
pub use twofloat::TwoFloat;

use crate::error::Error;

/// Complex number over the working scalar.
pub type C<T> = Complex<T>;

/// Working real scalar.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Short name used in manifests and logs.
    const NAME: &'static str;

    fn of(x: f64) -> Self;

    fn to_f64(self) -> f64;

    /// Unit roundoff, as an `f64`.
    fn unit_roundoff() -> f64;

    /// Lossless `(hi, lo)` split; `lo` is zero for binary64.
    fn to_pair(self) -> (f64, f64) {
        (self.to_f64(), 0.0)
    }
    fn from_pair(hi: f64, lo: f64) -> Self {
        Self::of(hi + lo)
    }

    // Elementary functions at full working precision. `Float`'s versions are
    // used for binary64; the double-double ones are replaced.
    fn sqrt_r(self) -> Self {
        self.sqrt()
    }
    fn exp_r(self) -> Self {
        self.exp()
    }
    fn ln_r(self) -> Self {
        self.ln()
    }
    fn sin_cos_r(self) -> (Self, Self) {
        self.sin_cos()
    }
    fn atan2_r(self, x: Self) -> Self {
        self.atan2(x)
    }
}

impl Real for f64 {
    const NAME: &'static str = "double";

    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }

    fn unit_roundoff() -> f64 {
        f64::EPSILON / 2.0
    }
}

impl Real for TwoFloat {
    const NAME: &'static str = "extended";

    #[inline]
    fn of(x: f64) -> Self {
        TwoFloat::from(x)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }

    fn sqrt_r(self) -> Self {
        crate::ddmath::sqrt(self)
    }
    fn exp_r(self) -> Self {
        crate::ddmath::exp(self)
    }
    fn ln_r(self) -> Self {
        crate::ddmath::ln(self)
    }
    fn sin_cos_r(self) -> (Self, Self) {
        crate::ddmath::sin_cos(self)
    }
    fn atan2_r(self, x: Self) -> Self {
        crate::ddmath::atan2(self, x)
    }

    fn to_pair(self) -> (f64, f64) {
        (self.hi(), self.lo())
    }
    fn from_pair(hi: f64, lo: f64) -> Self {
        TwoFloat::new_add(hi, lo)
    }

    fn unit_roundoff() -> f64 {
        // 2^-104: twofloat's operations are accurate to a few ulps of the pair.
        4.93e-32
    }
}

#[inline]
pub fn re<T: Real>(x: f64) -> C<T> {
    C::new(T::of(x), T::zero())
}

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> C<T> {
    C::new(T::of(re), T::of(im))
}

/// Converts a complex value to binary64 components.
#[inline]
pub fn to_c64<T: Real>(z: C<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

#[inline]
pub fn from_c64<T: Real>(z: Complex<f64>) -> C<T> {
    cx(z.re, z.im)
}

#[inline]
pub fn abs<T: Real>(z: C<T>) -> f64 {
    z.norm().to_f64()
}

/// `e^{2 pi i theta}` evaluated in the working precision.
pub fn unit_circle<T: Real>(theta: T) -> C<T> {
    let (s, c) = (T::TAU() * theta).sin_cos_r();
    C::new(c, s)
}

pub fn cexp<T: Real>(z: C<T>) -> C<T> {
    let (s, c) = z.im.sin_cos_r();
    C::new(c, s).scale(z.re.exp_r())
}

/// Principal logarithm, safe for moduli far outside the squared range.
pub fn cln<T: Real>(z: C<T>) -> C<T> {
    let (a, b) = (z.re.abs(), z.im.abs());
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    let r = small / big;
    let lm = big.ln_r() + (T::one() + r * r).ln_r() * T::of(0.5);
    C::new(lm, z.im.atan2_r(z.re))
}

/// Principal square root.
pub fn csqrt<T: Real>(z: C<T>) -> C<T> {
    let zero = T::zero();
    if z.re == zero && z.im == zero {
        return z;
    }
    let (a, b) = (z.re.abs(), z.im.abs());
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    let r = small / big;
    let m = big * (T::one() + r * r).sqrt_r();
    let half = T::of(0.5);
    let t = ((m + a) * half).sqrt_r();
    if z.re >= zero {
        C::new(t, z.im / (t * T::of(2.0)))
    } else {
        let s = if z.im >= zero { T::one() } else { -T::one() };
        C::new(b / (t * T::of(2.0)), s * t)
    }
}

/// The golden mean rotation number `(sqrt 5 - 1)/2`.
pub fn golden<T: Real>() -> T {
    (T::of(5.0).sqrt_r() - T::one()) / T::of(2.0)
}

/// Precision mode selectable at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl Precision {
    pub const ENV: &'static str = "SIEGEL_RENORM_PRECISION";

    /// Reads the override from the environment, if set.
    pub fn from_env() -> Result<Option<Self>, Error> {
        match std::env::var(Self::ENV) {
            Ok(v) => v.parse().map(Some),
            Err(_) => Ok(None),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Precision::Double => f64::NAME,
            Precision::Extended => TwoFloat::NAME,
        }
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" | "f64" => Ok(Precision::Double),
            "extended" | "dd" | "double-double" => Ok(Precision::Extended),
            other => Err(Error::InvalidInput(format!(
                "unknown precision mode `{other}`"
            ))),
        }
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A complex number stored through its logarithm.
///
/// Used for `b^q` with large integer `q`, which underflows binary64 long
/// before it stops mattering. The imaginary part of the logarithm is not
/// reduced, so `q * arg(b)` is exact up to the precision of `arg(b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogC<T: Real> {
    pub log: C<T>,
}

impl<T: Real> LogC<T> {
    pub fn one() -> Self {
        LogC {
            log: C::new(T::zero(), T::zero()),
        }
    }

    pub fn from_value(z: C<T>) -> Self {
        LogC { log: cln(z) }
    }

    /// `z^q` for a non-negative integer `q`.
    pub fn pow(z: C<T>, q: u64) -> Self {
        let l = cln(z);
        let q = T::from_u64(q).unwrap_or_else(T::infinity);
        LogC {
            log: C::new(l.re * q, l.im * q),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: Self) -> Self {
        LogC {
            log: self.log + o.log,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, o: Self) -> Self {
        LogC {
            log: self.log - o.log,
        }
    }

    /// `log10 |z|`.
    pub fn log10_abs(self) -> f64 {
        self.log.re.to_f64() / std::f64::consts::LN_10
    }

    /// The value; underflows to zero when `|z|` is below the scalar range.
    pub fn value(self) -> C<T> {
        cexp(self.log)
    }

    /// The value if it is representable with margin, else `None`.
    pub fn checked_value(self) -> Option<C<T>> {
        if self.log.re.to_f64() < -690.0 {
            None
        } else {
            Some(self.value())
        }
    }

    /// Divides `w` by this power without forming the power itself.
    pub fn divide(self, w: C<T>) -> C<T> {
        if w == C::new(T::zero(), T::zero()) {
            return w;
        }
        cexp(cln(w) - self.log)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twofloat_trig_is_accurate() {
        let z = unit_circle(golden::<TwoFloat>());
        let n = (z.re * z.re + z.im * z.im - TwoFloat::from(1.0)).abs();
        assert!(n.to_f64() < 1e-29, "{n}");
        let c = (TwoFloat::PI() / TwoFloat::from(3.0)).sin_cos_r().1 - TwoFloat::from(0.5);
        assert!(c.abs().to_f64() < 1e-29);
    }

    #[test]
    fn golden_is_fixed_by_gauss_map() {
        let g = golden::<TwoFloat>();
        let r = (TwoFloat::from(1.0) / g - TwoFloat::from(1.0)) - g;
        assert!(r.abs().to_f64() < 1e-30);
    }

    #[test]
    fn logc_avoids_underflow() {
        let b: C<f64> = cx(0.05, 0.0);
        let p = LogC::pow(b, 610);
        assert!(p.value().norm() == 0.0);
        assert!((p.log10_abs() - 610.0 * 0.05f64.log10()).abs() < 1e-9);
        let w = cx::<f64>(3.0e-300, 0.0);
        let r = LogC::pow(b, 200).divide(w);
        let expect = 3.0e-300 / 0.05f64.powi(200);
        assert!((r.re / expect - 1.0).abs() < 1e-10);
    }

    #[test]
    fn precision_parses() {
        assert_eq!(
            "extended".parse::<Precision>().unwrap(),
            Precision::Extended
        );
        assert_eq!("Double".parse::<Precision>().unwrap(), Precision::Double);
        assert!("quad".parse::<Precision>().is_err());
    }
}
