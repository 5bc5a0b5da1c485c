//! Dense complex linear solves over the working scalar.
//!
//! `nalgebra` needs `ComplexField`, which `Complex<TwoFloat>` does not
//! implement, so the small systems of the 1D Newton polish use this.

use crate::error::{Error, Result};
use crate::scalar::{abs, Real, C};

/// Solves `a x = b` by Gaussian elimination with partial pivoting;
/// `a` is row-major and consumed.
pub fn solve<T: Real>(mut a: Vec<Vec<C<T>>>, mut b: Vec<C<T>>) -> Result<Vec<C<T>>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("solve: dimension mismatch".into()));
    }
    let scale = a.iter().flatten().map(|z| abs(*z)).fold(0.0, f64::max);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| abs(a[i][col]).total_cmp(&abs(a[j][col])))
            .unwrap();
        if !(abs(a[piv][col]) > scale * T::unit_roundoff() * 4.0) {
            return Err(Error::IllConditioned(format!(
                "singular pivot in column {col}"
            )));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].inv();
        for row in col + 1..n {
            let f = a[row][col] * inv;
            if f.re == T::zero() && f.im == T::zero() {
                continue;
            }
            let (top, bottom) = a.split_at_mut(row);
            for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = *x - f * y;
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = vec![C::new(T::zero(), T::zero()); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s = s - a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx, re};

    #[test]
    fn solves_small_complex_system() {
        let a = vec![
            vec![cx(0.0, 1.0), re(2.0), re(0.0)],
            vec![re(1.0), re(1.0), cx(0.0, -1.0)],
            vec![re(3.0), re(0.0), re(1.0)],
        ];
        let x = vec![cx(1.0, 2.0), re(-1.0), cx(0.5, 0.0)];
        let b: Vec<C<f64>> = a
            .iter()
            .map(|r| r.iter().zip(&x).map(|(p, q)| p * q).sum())
            .collect();
        let got = solve(a, b).unwrap();
        for (g, w) in got.iter().zip(&x) {
            assert!((g - w).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_singular() {
        let a = vec![vec![re::<f64>(1.0), re(2.0)], vec![re(2.0), re(4.0)]];
        assert!(matches!(
            solve(a, vec![re(1.0), re(1.0)]),
            Err(Error::IllConditioned(_))
        ));
    }
}
