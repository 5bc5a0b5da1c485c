//! Fixtures shared by the kernel benchmarks.

use num_complex::Complex64;
use siegel_renorm::linearize::CurveSample;
use siegel_renorm::scalar::{from_c64, golden};
use siegel_renorm::{HenonParams, Pyramid, PyramidOptions, Real};

/// Golden-mean Hénon pyramid of the given depth.
pub fn pyramid<T: Real>(b: Complex64, depth: usize) -> Pyramid<T> {
    let p = HenonParams::<T>::from_rotation(golden(), from_c64(b), 0.125).expect("parameters");
    Pyramid::build(p, depth, PyramidOptions::for_scalar::<T>()).expect("pyramid")
}

/// `n` samples of the ellipse with semi-axes `(a, 1)`.
pub fn ellipse(n: usize, a: f64) -> CurveSample {
    let pts = (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            [
                Complex64::new(a * t.cos(), t.sin()),
                Complex64::new(0.0, 0.0),
            ]
        })
        .collect();
    CurveSample::ordered(pts)
}
