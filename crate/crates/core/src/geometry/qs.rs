//! Quasisymmetry constant of a sampled closed curve.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linearize::CurveSample;

/// All pairs are scanned exactly up to this many samples.
pub const EXACT_LIMIT: usize = 2048;

#[derive(Clone, Debug, Serialize)]
pub struct QsEstimate {
    pub k_hat: f64,
    /// Sample indices (into the input) of the maximizing pair.
    pub witness: (usize, usize),
    pub witness_points: [[Complex64; 2]; 2],
    pub pairs_scanned: usize,
    /// Samples kept after thinning a curve longer than [`EXACT_LIMIT`].
    pub samples_used: usize,
}

fn dist(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt()
}

/// `diam[len][s]` of the arc of `len + 1` consecutive samples starting at
/// circular position `s`, for `len < n`.
fn arc_diameters(pts: &[[Complex64; 2]]) -> Vec<Vec<f32>> {
    let n = pts.len();
    let mut rows: Vec<Vec<f32>> = Vec::with_capacity(n);
    rows.push(vec![0.0; n]);
    for len in 1..n {
        let prev = &rows[len - 1];
        let row: Vec<f32> = (0..n)
            .into_par_iter()
            .map(|s| {
                let d = dist(&pts[s], &pts[(s + len) % n]) as f32;
                d.max(prev[s]).max(prev[(s + 1) % n])
            })
            .collect();
        rows.push(row);
    }
    rows
}

/// `K^ = max diam([x, y]) / dist(x, y)` over sample pairs, where `[x, y]` is
/// the arc between them of smaller diameter (fewer samples on ties).
///
/// Arc diameters are exact over the retained samples. When the number of
/// pairs exceeds `pair_budget`, pairs are drawn on a deterministic lattice in
/// (start, separation) with separations spread evenly in log scale.
pub fn qs_constant(curve: &CurveSample, pair_budget: usize) -> Result<QsEstimate> {
    let order = curve.circular_order();
    if !curve.closed || order.len() < 16 {
        return Err(Error::InvalidInput(
            "qs_constant needs a closed curve with at least 16 samples".into(),
        ));
    }
    let stride = order.len().div_ceil(EXACT_LIMIT);
    let kept: Vec<usize> = order.iter().copied().step_by(stride).collect();
    let pts: Vec<[Complex64; 2]> = kept.iter().map(|&i| curve.points[i]).collect();
    let n = pts.len();
    let diam = arc_diameters(&pts);
    let total = n * (n - 1) / 2;
    let pairs: Vec<(usize, usize)> = if total <= pair_budget {
        (0..n)
            .flat_map(|s| (1..n - s).map(move |l| (s, l)))
            .collect()
    } else {
        let seps = (pair_budget / n).clamp(1, n / 2);
        let mut ls: Vec<usize> = (0..seps)
            .map(|i| {
                let t = i as f64 / (seps.max(2) - 1) as f64;
                ((n as f64 / 2.0).powf(t).round() as usize).clamp(1, n / 2)
            })
            .collect();
        ls.dedup();
        let per = (pair_budget / ls.len()).clamp(1, n);
        ls.iter()
            .flat_map(|&l| (0..per).map(move |i| (i * n / per, l)))
            .collect()
    };
    let scanned = pairs.len();
    let best = pairs
        .par_iter()
        .map(|&(s, l)| {
            let t = (s + l) % n;
            let d = dist(&pts[s], &pts[t]);
            if d == 0.0 {
                return Err(Error::DegenerateCurve {
                    i: kept[s],
                    j: kept[t],
                });
            }
            let inner = diam[l][s] as f64;
            let outer = diam[n - l][t] as f64;
            let arc = if inner < outer || (inner == outer && l <= n - l) {
                inner
            } else {
                outer
            };
            Ok((arc / d, s, t))
        })
        .try_reduce(|| (0.0, 0, 0), |a, b| Ok(if b.0 > a.0 { b } else { a }))?;
    let (k_hat, s, t) = best;
    Ok(QsEstimate {
        k_hat,
        witness: (kept[s], kept[t]),
        witness_points: [pts[s], pts[t]],
        pairs_scanned: scanned,
        samples_used: n,
    })
}

/// Diameter of the smaller-diameter arc between samples `i` and `j`.
pub fn arc_diameter(curve: &CurveSample, i: usize, j: usize) -> f64 {
    let order = curve.circular_order();
    let n = order.len();
    let mut pos = vec![0; n];
    for (k, &idx) in order.iter().enumerate() {
        pos[idx] = k;
    }
    let (a, b) = (pos[i], pos[j]);
    let arc = |from: usize, len: usize| {
        let mut d: f64 = 0.0;
        for u in 0..=len {
            for v in u + 1..=len {
                d = d.max(dist(
                    &curve.points[order[(from + u) % n]],
                    &curve.points[order[(from + v) % n]],
                ));
            }
        }
        d
    };
    let l = (b + n - a) % n;
    arc(a, l).min(arc(b, n - l))
}
