//! One renormalization step `Sigma_n -> Sigma_{n+1}`.
//!
//! With `Phi = A_n o Lambda` restricted by the inverse branch of `a_n` and
//! `Lambda(x, y) = (lambda x + c, lambda y + c)`:
//! `A_{n+1} = Phi^{-1} B_n A_n A_n Phi`, `B_{n+1} = Phi^{-1} B_n A_n Phi`.
//! The translation acts on both coordinates so that `B_{n+1}` keeps the form
//! `(b(x, y), x)`.

use rayon::prelude::*;

use crate::approx::YSeries;
use crate::cheb::{Cheb, Segment};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{abs, re, Real, C};

use super::level::{fmt_c, AMaps, BChart, PairLevel, PyramidOptions};

/// `A_n o Phi` at one chart point, as `y`-jets.
struct PhiJets<T: Real> {
    x: Jet<T>,
    ht: Jet<T>,
    jphi: Jet<T>,
}

/// Solves the normalization `xi_{n+1}(0) = 1`, `xi_{n+1}'(0) = 0` for
/// `(lambda, c)`: `c` is the critical point of `g(X) = a(b(X, h~(X)), X)`
/// nearest the previous estimate and `lambda = g(c) - c`.
pub fn normalize<T: Real>(l: &PairLevel<T>, opts: &PyramidOptions) -> Result<(C<T>, C<T>)> {
    let r = opts.norm_halfwidth;
    let mut c: C<T> = re(0.0);
    let mut lam = re(0.0);
    let tol = opts.newton_tol::<T>() * 16.0;
    for rep in 0..10 {
        let seg = Segment::new(c - re(r), c + re(r));
        let xs = seg.nodes(opts.norm_nodes);
        let keys: Vec<f64> = xs.iter().map(|&x| seg.param(x)).collect();
        let u0 = l.invert_a_path(c, c, opts)?;
        let us = l.continue_inverse(&xs, &keys, c, c, 0.0, u0, opts)?;
        let gv: Vec<C<T>> = xs
            .iter()
            .zip(&us)
            .map(|(&x, &u)| l.a(l.b(x, l.h(u, c)), x))
            .collect();
        let g = Cheb::fit(seg, &gv, opts.chop_tol);
        let dg = g.deriv();
        let ddg = dg.deriv();
        let mut z = c;
        let mut ok = false;
        for _ in 0..60 {
            let d2 = ddg.eval(z);
            if abs(d2) == 0.0 {
                break;
            }
            let dz = dg.eval(z) / d2;
            z = z - dz;
            if !(abs(z - c) < 2.0 * r) {
                break;
            }
            if abs(dz) <= tol {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::NormalizationFailure {
                level: l.n,
                detail: format!("no critical point of g near {}", fmt_c(c)),
            });
        }
        lam = g.eval(z) - z;
        let moved = abs(z - c);
        c = z;
        if moved <= tol && rep > 0 {
            break;
        }
    }
    if !(abs(lam) > 1e-6 && abs(lam) < 1.0) {
        return Err(Error::NormalizationFailure {
            level: l.n,
            detail: format!("degenerate scaling lambda = {}", fmt_c(lam)),
        });
    }
    Ok((lam, c))
}

/// Runs `A_n o Phi` through the chart points `xs` by continuation from
/// `start_x`, returning node jets in the order of `xs`.
fn phi_jets<T: Real>(
    l: &PairLevel<T>,
    lam: C<T>,
    c: C<T>,
    seg: &Segment<T>,
    xs: &[C<T>],
    start_x: C<T>,
    opts: &PyramidOptions,
) -> Result<Vec<PhiJets<T>>> {
    let d = opts.jet_degree;
    let targets: Vec<C<T>> = xs.iter().map(|&x| lam * x + c).collect();
    let keys: Vec<f64> = xs.iter().map(|&x| seg.param(x)).collect();
    let x_start = lam * start_x + c;
    let u_start = l.invert_a_path(x_start, c, opts)?;
    let us = l.continue_inverse(
        &targets,
        &keys,
        c,
        x_start,
        seg.param(start_x),
        u_start,
        opts,
    )?;
    let bqa = l.bq_a.value();
    let lam2 = lam * lam;
    let newton_rounds = (usize::BITS - d.leading_zeros()) as usize + 2;
    Ok(targets
        .par_iter()
        .zip(us.par_iter())
        .map(|(&xv, &u0)| {
            let y = Jet::affine(c, lam, d);
            let xj = Jet::constant(xv, d);
            let mut u = Jet::constant(u0, d);
            for _ in 0..newton_rounds {
                let f = &l.a_jet(&u, &y) - &xj;
                u = &u - &f.div_jet(&l.ax_jet(&u, &y));
            }
            let q = l.ja_jet(&u, &y).div_jet(&l.ax_jet(&u, &y));
            let ht = q.scale(lam * bqa).integrate(l.h(u0, c));
            PhiJets {
                x: xj,
                ht,
                jphi: q.scale(lam2),
            }
        })
        .collect())
}

fn held_out<T: Real>(seg: &Segment<T>, n: usize) -> Vec<C<T>> {
    // Extrema of T_n lie between the fitting nodes.
    [1usize, 3, 5, 7]
        .iter()
        .map(|&k| {
            let j = (k * n + 4) / 8;
            let t = (T::PI() * T::of(j as f64 / n as f64)).sin_cos_r().1;
            seg.from_ref(C::new(t, T::zero()))
        })
        .collect()
}

fn fit_checked<T: Real>(
    seg: Segment<T>,
    jets: &[Jet<T>],
    n_fit: usize,
    held: &[C<T>],
    opts: &PyramidOptions,
    residual: &mut f64,
) -> YSeries<T> {
    let s = YSeries::from_jets(seg, &jets[..n_fit], opts.chop_tol);
    for (x, j) in held.iter().zip(&jets[n_fit..]) {
        *residual = residual.max(abs(s.eval(*x, re(0.0)) - j.value()));
    }
    // Truncation of the y-series on |y| <= v_radius.
    let top = jets[..n_fit]
        .iter()
        .map(|j| abs(j.c[j.deg()]))
        .fold(0.0, f64::max);
    *residual = residual.max(top * opts.v_radius.powi(opts.jet_degree as i32));
    s
}

/// Computes `Sigma_{n+1}` from `Sigma_n`.
pub fn renorm_step<T: Real>(l: &PairLevel<T>, opts: &PyramidOptions) -> Result<PairLevel<T>> {
    if l.degraded {
        return Err(Error::DegradedLevel {
            level: l.n,
            residual: l.residual,
        });
    }
    let (lam, c) = normalize(l, opts)?;
    let m = opts.margin;
    let inv_lam = lam.inv();
    let mut residual: f64 = 0.0;

    let zseg = l.amap.seg;
    let mut xz = zseg.nodes(opts.nodes_z);
    let hz = held_out(&zseg, opts.nodes_z);
    xz.extend(&hz);
    let pz = phi_jets(l, lam, c, &zseg, &xz, re(1.0), opts)?;
    let comps: Vec<[Jet<T>; 3]> = pz
        .par_iter()
        .map(|p| {
            let x2 = l.a_jet(&p.x, &p.ht);
            let y2 = l.h_jet(&p.x, &p.ht);
            let x3 = l.b_jet(&x2, &y2);
            let an = l.a_jet(&x3, &x2).add_const(-c).scale(inv_lam);
            let hn = x2.add_const(-c).scale(inv_lam);
            let ja = l
                .ax_jet(&x3, &x2)
                .mul_jet(&l.jb_jet(&x2, &y2))
                .mul_jet(&l.ja_jet(&p.x, &p.ht))
                .mul_jet(&p.jphi)
                .scale(inv_lam * inv_lam);
            [an, hn, ja]
        })
        .collect();
    let split = |k: usize| comps.iter().map(|c| c[k].clone()).collect::<Vec<_>>();
    let nz = opts.nodes_z;
    let amap = AMaps {
        seg: zseg,
        a: fit_checked(zseg, &split(0), nz, &hz, opts, &mut residual),
        h: fit_checked(zseg, &split(1), nz, &hz, opts, &mut residual),
        ja: fit_checked(zseg, &split(2), nz, &hz, opts, &mut residual),
    };

    let e0 = amap.a.eval(re(0.0), re(0.0));
    let wseg = Segment::new(e0.scale(T::of(1.0 + m)), e0.scale(T::of(-m)));
    let mut bcharts = Vec::with_capacity(2);
    for seg in [wseg, zseg] {
        let mut xs = seg.nodes(opts.nodes_w);
        let hw = held_out(&seg, opts.nodes_w);
        xs.extend(&hw);
        let pw = phi_jets(l, lam, c, &seg, &xs, re(0.0), opts)?;
        let comps: Vec<[Jet<T>; 2]> = pw
            .par_iter()
            .map(|p| {
                let bv = l.b_jet(&p.x, &p.ht);
                let bn = l.a_jet(&bv, &p.x).add_const(-c).scale(inv_lam);
                let jb = l
                    .ax_jet(&bv, &p.x)
                    .mul_jet(&l.jb_jet(&p.x, &p.ht))
                    .mul_jet(&p.jphi)
                    .scale(inv_lam * inv_lam);
                [bn, jb]
            })
            .collect();
        let split = |k: usize| comps.iter().map(|c| c[k].clone()).collect::<Vec<_>>();
        let nw = opts.nodes_w;
        bcharts.push(BChart {
            seg,
            b: fit_checked(seg, &split(0), nw, &hw, opts, &mut residual),
            jb: fit_checked(seg, &split(1), nw, &hw, opts, &mut residual),
        });
    }

    let mut next = PairLevel {
        n: l.n + 1,
        lambda: lam,
        c,
        amap,
        bcharts,
        bq_a: l.bq_a.mul(l.bq_a).mul(l.bq_b),
        bq_b: l.bq_a.mul(l.bq_b),
        residual,
        degraded: !(residual <= opts.residual_tol),
        sup_dy: 0.0,
    };
    next.sup_dy = next.measure_sup_dy(opts.nodes_w);
    Ok(next)
}
