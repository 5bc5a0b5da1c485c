//! Binary cache of a pyramid's approximant coefficients.
//!
//! Layout (little endian): magic `SRNM`, `u32` version, `u8` precision code
//! (0 double, 1 extended), the map parameters, the pyramid options, a `u32`
//! level count and one record per level. Reals are stored as `(hi, lo)`
//! pairs of `f64` so extended-precision data round-trips exactly.

use std::io::{Read, Write};

use crate::approx::YSeries;
use crate::cheb::{Cheb, Segment};
use crate::error::{Error, Result};
use crate::maps::HenonParams;
use crate::renorm::level::{AMaps, BChart, PairLevel};
use crate::renorm::{Pyramid, PyramidOptions};
use crate::scalar::{LogC, Real, C};

pub const MAGIC: &[u8; 4] = b"SRNM";
pub const VERSION: u32 = 1;

fn precision_code<T: Real>() -> u8 {
    if T::unit_roundoff() < 1e-20 {
        1
    } else {
        0
    }
}

struct W<'a, S: Write>(&'a mut S);

impl<S: Write> W<'_, S> {
    fn bytes(&mut self, b: &[u8]) -> Result<()> {
        self.0.write_all(b)?;
        Ok(())
    }
    fn u32(&mut self, v: u32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }
    fn u64(&mut self, v: u64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }
    fn len(&mut self, v: usize) -> Result<()> {
        let v = u32::try_from(v).map_err(|_| Error::CacheFormat("length exceeds u32".into()))?;
        self.u32(v)
    }
    fn f64(&mut self, v: f64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }
    fn real<T: Real>(&mut self, v: T) -> Result<()> {
        let (hi, lo) = v.to_pair();
        self.f64(hi)?;
        self.f64(lo)
    }
    fn c<T: Real>(&mut self, z: C<T>) -> Result<()> {
        self.real(z.re)?;
        self.real(z.im)
    }
    fn seg<T: Real>(&mut self, s: &Segment<T>) -> Result<()> {
        self.c(s.a)?;
        self.c(s.b)
    }
    fn cheb<T: Real>(&mut self, f: &Cheb<T>) -> Result<()> {
        self.seg(&f.seg)?;
        self.len(f.coef.len())?;
        f.coef.iter().try_for_each(|&z| self.c(z))
    }
    fn yseries<T: Real>(&mut self, f: &YSeries<T>) -> Result<()> {
        self.len(f.coef.len())?;
        f.coef.iter().try_for_each(|g| self.cheb(g))
    }
}

struct R<'a, S: Read>(&'a mut S);

impl<S: Read> R<'_, S> {
    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0
            .read_exact(&mut b)
            .map_err(|e| Error::CacheFormat(format!("truncated: {e}")))?;
        Ok(b)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.array::<1>()?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }
    fn len(&mut self, max: usize) -> Result<usize> {
        let n = self.u32()? as usize;
        if n > max {
            return Err(Error::CacheFormat(format!("length {n} exceeds {max}")));
        }
        Ok(n)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }
    fn real<T: Real>(&mut self) -> Result<T> {
        let hi = self.f64()?;
        let lo = self.f64()?;
        Ok(T::from_pair(hi, lo))
    }
    fn c<T: Real>(&mut self) -> Result<C<T>> {
        Ok(C::new(self.real()?, self.real()?))
    }
    fn seg<T: Real>(&mut self) -> Result<Segment<T>> {
        let a = self.c()?;
        let b = self.c()?;
        Ok(Segment::new(a, b))
    }
    fn cheb<T: Real>(&mut self) -> Result<Cheb<T>> {
        let seg = self.seg()?;
        let n = self.len(1 << 16)?;
        let coef = (0..n).map(|_| self.c()).collect::<Result<Vec<_>>>()?;
        Ok(Cheb { seg, coef })
    }
    fn yseries<T: Real>(&mut self) -> Result<YSeries<T>> {
        let n = self.len(1 << 10)?;
        if n == 0 {
            return Err(Error::CacheFormat("empty y-series".into()));
        }
        let coef = (0..n).map(|_| self.cheb()).collect::<Result<Vec<_>>>()?;
        Ok(YSeries::new(coef))
    }
}

fn write_options<S: Write>(w: &mut W<S>, o: &PyramidOptions) -> Result<()> {
    for v in [
        o.nodes_z,
        o.nodes_w,
        o.jet_degree,
        o.norm_nodes,
        o.newton_max_iter,
    ] {
        w.u64(v as u64)?;
    }
    for v in [
        o.margin,
        o.norm_halfwidth,
        o.residual_tol,
        o.chop_tol,
        o.v_radius,
    ] {
        w.f64(v)?;
    }
    Ok(())
}

fn read_options<S: Read>(r: &mut R<S>) -> Result<PyramidOptions> {
    let mut u = [0usize; 5];
    for v in &mut u {
        *v = r.u64()? as usize;
    }
    let mut f = [0f64; 5];
    for v in &mut f {
        *v = r.f64()?;
    }
    Ok(PyramidOptions {
        nodes_z: u[0],
        nodes_w: u[1],
        jet_degree: u[2],
        norm_nodes: u[3],
        newton_max_iter: u[4],
        margin: f[0],
        norm_halfwidth: f[1],
        residual_tol: f[2],
        chop_tol: f[3],
        v_radius: f[4],
    })
}

/// Writes `pyr` in the cache format.
pub fn write_pyramid<T: Real, S: Write>(pyr: &Pyramid<T>, out: &mut S) -> Result<()> {
    let mut w = W(out);
    w.bytes(MAGIC)?;
    w.u32(VERSION)?;
    w.bytes(&[precision_code::<T>()])?;
    let p = &pyr.params;
    w.real(p.theta)?;
    for z in [p.c, p.b, p.mu, p.nu, p.x_fix] {
        w.c(z)?;
    }
    w.bytes(&[p.outside_epsilon_bar as u8])?;
    w.f64(p.escape)?;
    write_options(&mut w, &pyr.opts)?;
    w.len(pyr.levels.len())?;
    for l in &pyr.levels {
        w.u64(l.n as u64)?;
        w.c(l.lambda)?;
        w.c(l.c)?;
        w.c(l.bq_a.log)?;
        w.c(l.bq_b.log)?;
        w.f64(l.residual)?;
        w.bytes(&[l.degraded as u8])?;
        w.f64(l.sup_dy)?;
        w.seg(&l.amap.seg)?;
        w.yseries(&l.amap.a)?;
        w.yseries(&l.amap.h)?;
        w.yseries(&l.amap.ja)?;
        w.len(l.bcharts.len())?;
        for b in &l.bcharts {
            w.seg(&b.seg)?;
            w.yseries(&b.b)?;
            w.yseries(&b.jb)?;
        }
    }
    Ok(())
}

/// Reads a pyramid written by [`write_pyramid`] with the same scalar type.
pub fn read_pyramid<T: Real, S: Read>(input: &mut S) -> Result<Pyramid<T>> {
    let mut r = R(input);
    if &r.array::<4>()? != MAGIC {
        return Err(Error::CacheFormat("bad magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::CacheFormat(format!("unsupported version {version}")));
    }
    let code = r.u8()?;
    if code != precision_code::<T>() {
        return Err(Error::CacheFormat(format!(
            "precision code {code} does not match {}",
            T::NAME
        )));
    }
    let theta = r.real()?;
    let [c, b, mu, nu, x_fix] = [r.c()?, r.c()?, r.c()?, r.c()?, r.c()?];
    let outside_epsilon_bar = r.u8()? != 0;
    let escape = r.f64()?;
    let params = HenonParams {
        theta,
        c,
        b,
        mu,
        nu,
        x_fix,
        outside_epsilon_bar,
        escape,
    };
    let opts = read_options(&mut r)?;
    let count = r.len(1 << 10)?;
    let mut levels = Vec::with_capacity(count);
    for _ in 0..count {
        let n = r.u64()? as usize;
        let lambda = r.c()?;
        let c = r.c()?;
        let bq_a = LogC { log: r.c()? };
        let bq_b = LogC { log: r.c()? };
        let residual = r.f64()?;
        let degraded = r.u8()? != 0;
        let sup_dy = r.f64()?;
        let seg = r.seg()?;
        let amap = AMaps {
            seg,
            a: r.yseries()?,
            h: r.yseries()?,
            ja: r.yseries()?,
        };
        let nb = r.len(64)?;
        let mut bcharts = Vec::with_capacity(nb);
        for _ in 0..nb {
            let seg = r.seg()?;
            bcharts.push(BChart {
                seg,
                b: r.yseries()?,
                jb: r.yseries()?,
            });
        }
        if bcharts.is_empty() {
            return Err(Error::CacheFormat(format!("level {n} has no B charts")));
        }
        levels.push(PairLevel {
            n,
            lambda,
            c,
            amap,
            bcharts,
            bq_a,
            bq_b,
            residual,
            degraded,
            sup_dy,
        });
    }
    let mut extra = [0u8; 1];
    if r.0.read(&mut extra)? != 0 {
        return Err(Error::CacheFormat("trailing bytes".into()));
    }
    Pyramid::from_levels(params, opts, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx, golden, re};

    fn small() -> Pyramid<f64> {
        let p = HenonParams::from_rotation(golden(), cx(0.03, 0.01), 0.125).unwrap();
        Pyramid::build(p, 2, PyramidOptions::for_scalar::<f64>()).unwrap()
    }

    #[test]
    fn roundtrip_is_exact() {
        let pyr = small();
        let mut buf = Vec::new();
        write_pyramid(&pyr, &mut buf).unwrap();
        let back: Pyramid<f64> = read_pyramid(&mut buf.as_slice()).unwrap();
        assert_eq!(back.levels.len(), pyr.levels.len());
        for (a, b) in pyr.levels.iter().zip(&back.levels) {
            assert_eq!(a.lambda, b.lambda);
            assert_eq!(a.bq_a, b.bq_a);
            let z = [cx(0.3, 0.1), re(0.05)];
            assert_eq!(a.apply_a(z), b.apply_a(z));
            assert_eq!(a.apply_b(z), b.apply_b(z));
        }
        assert_eq!(pyr.caps, back.caps);
        let mut again = Vec::new();
        write_pyramid(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn rejects_corruption() {
        let pyr = small();
        let mut buf = Vec::new();
        write_pyramid(&pyr, &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_pyramid::<f64, _>(&mut bad.as_slice()),
            Err(Error::CacheFormat(_))
        ));
        let mut v2 = buf.clone();
        v2[4] = 2;
        assert!(matches!(
            read_pyramid::<f64, _>(&mut v2.as_slice()),
            Err(Error::CacheFormat(_))
        ));
        let cut = &buf[..buf.len() / 2];
        assert!(matches!(
            read_pyramid::<f64, _>(&mut &cut[..]),
            Err(Error::CacheFormat(_))
        ));
        assert!(matches!(
            read_pyramid::<crate::TwoFloat, _>(&mut buf.as_slice()),
            Err(Error::CacheFormat(_))
        ));
    }
}
