//! Continued fractions and closest return moments.
//!
//! Convention: `theta = 1/(a0 + 1/(a1 + ...))` with `theta` in `(0, 1)`, and
//! `q0 = 1`, `q1 = a0`, `q_{n+1} = a_n q_n + q_{n-1}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize)]
pub struct RotationNumber {
    pub theta: f64,
    pub coeffs: Vec<u64>,
    /// `(p_n, q_n)` for `n = 0..=coeffs.len()`.
    pub convergents: Vec<(u64, u64)>,
}

impl RotationNumber {
    pub fn new<T: Real>(theta: T, n_terms: usize) -> Result<Self> {
        let coeffs = cf_expand(theta, n_terms)?;
        let convergents = convergents(&coeffs)?;
        Ok(RotationNumber {
            theta: theta.to_f64(),
            coeffs,
            convergents,
        })
    }

    pub fn golden(n_terms: usize) -> Self {
        let coeffs = vec![1; n_terms];
        let convergents = convergents(&coeffs).expect("golden convergents fit u64 for n <= 90");
        RotationNumber {
            theta: crate::scalar::golden::<f64>(),
            coeffs,
            convergents,
        }
    }

    pub fn q(&self, n: usize) -> u64 {
        self.convergents[n].1
    }
}

/// Expands `theta` (reduced mod 1) into `n_terms` partial quotients.
pub fn cf_expand<T: Real>(theta: T, n_terms: usize) -> Result<Vec<u64>> {
    if n_terms == 0 {
        return Err(Error::InvalidInput("n_terms must be at least 1".into()));
    }
    let mut x = theta - theta.floor();
    // Remainders below this are indistinguishable from a rational endpoint.
    let floor = T::of(T::unit_roundoff() * 2f64.powi(40)).min(T::of(1e-3));
    let mut out = Vec::with_capacity(n_terms);
    // Each step multiplies the rounding error by roughly 1/x^2; track it.
    let mut err = T::unit_roundoff();
    for _ in 0..n_terms {
        if x <= floor || x <= T::of(err * 16.0) {
            return Err(Error::TerminatedExpansion { coeffs: out });
        }
        let inv = x.recip();
        let a = inv.floor();
        let frac = inv - a;
        let a_u = a
            .to_u64()
            .ok_or(Error::IntegerOverflow { index: out.len() })?;
        out.push(a_u);
        err = (err / (x * x).to_f64()).max(T::unit_roundoff());
        x = frac;
    }
    Ok(out)
}

/// `(p_n, q_n)` with `p0 = 0`, `q0 = 1`, `p1 = 1`, `q1 = a0`.
pub fn convergents(coeffs: &[u64]) -> Result<Vec<(u64, u64)>> {
    if coeffs.is_empty() {
        return Err(Error::InvalidInput("empty coefficient sequence".into()));
    }
    if coeffs.contains(&0) {
        return Err(Error::InvalidInput("coefficients must be positive".into()));
    }
    let mut out = Vec::with_capacity(coeffs.len() + 1);
    out.push((0u64, 1u64));
    out.push((1u64, coeffs[0]));
    for n in 1..coeffs.len() {
        let (pm, qm) = out[n - 1];
        let (p, q) = out[n];
        let a = coeffs[n];
        let step = |x: u64, xm: u64| a.checked_mul(x).and_then(|v| v.checked_add(xm));
        let p1 = step(p, pm).ok_or(Error::IntegerOverflow { index: n + 1 })?;
        let q1 = step(q, qm).ok_or(Error::IntegerOverflow { index: n + 1 })?;
        out.push((p1, q1));
    }
    Ok(out)
}

/// `q_0, ..., q_{n_max}` for the golden mean.
pub fn fibonacci_return_times(n_max: usize) -> Result<Vec<u64>> {
    if n_max == 0 {
        return Ok(vec![1]);
    }
    Ok(convergents(&vec![1; n_max])?
        .into_iter()
        .map(|(_, q)| q)
        .collect())
}

/// Golden-mean return time `q_n` (panics past `u64`, i.e. `n > 92`).
pub fn fib_q(n: usize) -> u64 {
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 0..n {
        let c = a.checked_add(b).expect("q_n exceeds u64");
        a = b;
        b = c;
    }
    a
}

/// Smallest `C` with `q_{n+1} <= C q_n^{d-1}` over the stored convergents.
pub fn diophantine_order_witness(coeffs: &[u64], d: f64) -> Result<f64> {
    let cv = convergents(coeffs)?;
    if cv.len() < 2 {
        return Err(Error::InvalidInput("need at least two convergents".into()));
    }
    Ok(cv
        .windows(2)
        .map(|w| w[1].1 as f64 / (w[0].1 as f64).powf(d - 1.0))
        .fold(f64::NEG_INFINITY, f64::max))
}
