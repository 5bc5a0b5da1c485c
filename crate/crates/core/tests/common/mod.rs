//! Reference computations shared by the oracle and acceptance targets.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use siegel_renorm::arithmetic::fib_q;
use siegel_renorm::renorm::{dist, Point};
use siegel_renorm::scalar::{from_c64, C};
use siegel_renorm::{Pyramid, Real};

fn henon<T: Real>(p: Point<T>, b: C<T>, c: C<T>) -> Point<T> {
    [p[0] * p[0] + c - b * p[1], p[0]]
}

pub fn sample_points<T: Real>(rng: &mut ChaCha8Rng, count: usize) -> Vec<Point<T>> {
    (0..count)
        .map(|_| {
            let x = Complex64::new(rng.gen_range(0.1..0.9), rng.gen_range(-0.05..0.05));
            let y = Complex64::from_polar(
                rng.gen_range(0.0..0.05),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            [from_c64(x), from_c64(y)]
        })
        .collect()
}

/// Worst error of `(A_n, B_n)` against `Phi^{-1} o H^q o Phi` with a
/// hand-written Hénon iterate.
pub fn pair_oracle_error<T: Real>(pyr: &Pyramid<T>, n: usize, pts: &[Point<T>]) -> f64 {
    let (b, c) = (pyr.params.b, pyr.params.c);
    let l = &pyr.levels[n];
    let (qa, qb) = (fib_q(2 * n + 1), fib_q(2 * n));
    let mut worst: f64 = 0.0;
    for &p in pts {
        let mut z = pyr.to_ambient(pyr.chain(0, n, p).unwrap());
        let mut images = [z, z];
        for i in 1..=qa.max(qb) {
            z = henon(z, b, c);
            if i == qa {
                images[0] = z;
            }
            if i == qb {
                images[1] = z;
            }
        }
        let back = |z: Point<T>| pyr.chain_inv(0, n, pyr.from_ambient(z)).unwrap();
        worst = worst
            .max(dist(back(images[0]), l.apply_a(p)))
            .max(dist(back(images[1]), l.apply_b(p)));
    }
    worst
}

/// Exhaustive `max diam(arc) / dist` over all sample pairs of an ordered
/// closed curve, the arc being the one of smaller diameter.
pub fn brute_force_qs(pts: &[[Complex64; 2]]) -> f64 {
    let n = pts.len();
    let d = |a: &[Complex64; 2], b: &[Complex64; 2]| {
        ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt()
    };
    // diam[s][len]: arc of len + 1 samples from s.
    let mut diam = vec![vec![0.0f64; n]; n];
    for s in 0..n {
        for len in 1..n {
            let end = &pts[(s + len) % n];
            let far = (0..len)
                .map(|u| d(&pts[(s + u) % n], end))
                .fold(0.0, f64::max);
            diam[s][len] = diam[s][len - 1].max(far);
        }
    }
    let mut k: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let arc = diam[i][j - i].min(diam[j][n - (j - i)]);
            k = k.max(arc / d(&pts[i], &pts[j]));
        }
    }
    k
}
