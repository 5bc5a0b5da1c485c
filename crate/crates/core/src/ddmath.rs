//! Elementary functions for [`TwoFloat`] accurate to a few units of its
//! roundoff.
//!
//! `twofloat` provides exact double-double arithmetic but its `exp`, `ln`
//! and trigonometric functions lose 10 or more digits on ordinary arguments.
//! These replacements use argument reduction and Taylor series in
//! double-double arithmetic, or one Newton step from the binary64 value.

use twofloat::consts::{FRAC_PI_2, LN_2};
use twofloat::TwoFloat as D;

fn d(x: f64) -> D {
    D::from(x)
}

pub fn sqrt(a: D) -> D {
    if !(a.hi() > 0.0) || !a.hi().is_finite() {
        return d(a.hi().sqrt());
    }
    let x = d(a.hi().sqrt());
    x + (a - x * x) / (x * 2.0)
}

/// `e^s - 1` for `|s| <= 2^-8 ln 2`.
fn expm1_small(s: D) -> D {
    let mut term = s;
    let mut sum = s;
    for k in 2..=14 {
        term = term * s / (k as f64);
        sum += term;
    }
    sum
}

pub fn exp(x: D) -> D {
    let h = x.hi();
    if h.is_nan() {
        return x;
    }
    if h < -745.2 {
        return d(0.0);
    }
    if h > 709.78 {
        return d(f64::INFINITY);
    }
    let k = (h / std::f64::consts::LN_2).round();
    let r = x - LN_2 * k;
    let mut m = expm1_small(r / 256.0);
    for _ in 0..8 {
        m = m * (m + 2.0);
    }
    let e = m + 1.0;
    // Scale by 2^k in two exact steps so subnormal results are reached.
    let k = k as i32;
    let (k1, k2) = (k / 2, k - k / 2);
    e * 2f64.powi(k1) * 2f64.powi(k2)
}

pub fn ln(a: D) -> D {
    let h = a.hi();
    if !(h > 0.0) || !h.is_finite() {
        return d(h.ln());
    }
    let mut y = d(h.ln());
    for _ in 0..2 {
        y = y + a * exp(-y) - 1.0;
    }
    y
}

/// `(sin x, cos x)` for `|x|` up to about `1e6`.
pub fn sin_cos(x: D) -> (D, D) {
    let h = x.hi();
    if !h.is_finite() {
        return (d(f64::NAN), d(f64::NAN));
    }
    let k = (h / std::f64::consts::FRAC_PI_2).round();
    let r = x - FRAC_PI_2 * k;
    let r2 = r * r;
    let (mut s, mut c) = (r, d(1.0));
    let (mut ts, mut tc) = (r, d(1.0));
    for n in 1..=13 {
        let n = n as f64;
        ts = -ts * r2 / ((2.0 * n) * (2.0 * n + 1.0));
        tc = -tc * r2 / ((2.0 * n - 1.0) * (2.0 * n));
        s += ts;
        c += tc;
    }
    match (k as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

pub fn atan2(y: D, x: D) -> D {
    let mut t = d(y.hi().atan2(x.hi()));
    if !t.hi().is_finite() || (y.hi() == 0.0 && x.hi() == 0.0) {
        return t;
    }
    for _ in 0..2 {
        let (s, c) = sin_cos(t);
        let num = y * c - x * s;
        let den = x * c + y * s;
        t += num / den;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(hi: f64, lo: f64) -> D {
        D::new_add(hi, lo)
    }

    fn close(a: D, b: D, tol: f64) -> bool {
        let e = (a - b).abs();
        e.hi() <= tol * b.abs().hi().max(1e-300)
    }

    #[test]
    fn exp_matches_reference() {
        // Reference values to 300 bits, split into (hi, lo).
        let cases = [
            (0.3, 1.3498588075760032, -9.447314673432387e-17),
            (1.0, std::f64::consts::E, 1.4456468917292502e-16),
            (2.5, 12.182493960703473, 2.0334002173348147e-16),
            (-7.0, 0.0009118819655545162, -3.574480397859321e-20),
        ];
        for (x, hi, lo) in cases {
            assert!(close(exp(d(x)), pair(hi, lo), 1e-30), "exp({x})");
        }
        assert_eq!(exp(d(-800.0)).hi(), 0.0);
        let tiny = exp(d(-700.0));
        assert!(tiny.hi() > 0.0 && tiny.hi() < 1e-300);
    }

    #[test]
    fn ln_matches_reference() {
        let v = ln(d(0.05));
        assert!(close(
            v,
            pair(-2.995732273553991, -8.367060195652719e-17),
            1e-30
        ));
        let e = pair(std::f64::consts::E, 1.4456468917292502e-16);
        assert!((ln(e) - 1.0).abs().hi() < 1e-30);
    }

    #[test]
    fn trig_matches_reference() {
        let g = pair(0.6180339887498949, -5.432115203682506e-17);
        let (s, c) = sin_cos(g * twofloat::consts::TAU);
        assert!(close(
            c,
            pair(-0.7373688780783199, -4.5545063126585355e-17),
            1e-30
        ));
        assert!(close(
            s,
            pair(-0.6754902942615236, -1.5138241005361214e-17),
            1e-30
        ));
        let (_, c3) = sin_cos(twofloat::consts::PI / 3.0);
        assert!((c3 - 0.5).abs().hi() < 1e-31);
        let t = atan2(s, c);
        assert!(close(
            t + twofloat::consts::TAU,
            g * twofloat::consts::TAU,
            1e-30
        ));
    }

    #[test]
    fn sqrt_is_accurate() {
        let r = sqrt(d(5.0));
        assert!((r * r - 5.0).abs().hi() < 1e-30);
        assert_eq!(sqrt(d(0.0)).hi(), 0.0);
    }
}
