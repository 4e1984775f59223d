//! Common zeros of two plane curves by resultant elimination.
//!
//! After a generic shear `x -> x + k y` both affine polynomials are monic-like
//! in `y`, so `Res_y(F, G)` is a polynomial in `x` alone. It is recovered by
//! evaluating Sylvester determinants on the unit circle and interpolating with
//! an inverse DFT, its roots come from the companion matrix, and each root is
//! lifted back, polished by Newton's method and deduplicated. Common points on
//! the infinity line are found separately from the top-degree forms.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::{HPoly, Poly1};
use crate::projective::PPoint;
use crate::C64;

const SHEAR: C64 = C64::new(0.371_904_8, 0.211_337_6);
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Points closer than this (relative) are reported once.
const DEDUP: f64 = 1e-6;
/// Relative residual a polished point must reach to be accepted.
const ACCEPT: f64 = 1e-9;

fn sylvester_det(f: &[C64], g: &[C64]) -> C64 {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return ONE;
    }
    let mut s = DMatrix::<C64>::zeros(size, size);
    // rows hold descending coefficients
    for r in 0..n {
        for (k, &c) in f.iter().rev().enumerate() {
            s[(r, r + k)] = c;
        }
    }
    for r in 0..m {
        for (k, &c) in g.iter().rev().enumerate() {
            s[(n + r, r + k)] = c;
        }
    }
    s.determinant()
}

fn normalized(f: &HPoly) -> HPoly {
    let s = f.scale();
    HPoly::from_terms(
        f.degree(),
        &f.terms()
            .iter()
            .map(|&(i, j, c)| (i, j, c / s))
            .collect::<Vec<_>>(),
    )
    .expect("same degree")
}

/// Relative size of `F` at an affine point.
pub(crate) fn rel_value(f: &HPoly, x: C64, y: C64) -> f64 {
    let w = 1.0 + (x.norm_sqr() + y.norm_sqr()).sqrt();
    f.eval_affine(x, y).norm() / (f.scale() * w.powi(f.degree() as i32))
}

fn newton2(f: &HPoly, g: &HPoly, mut x: C64, mut y: C64) -> (C64, C64) {
    let (fx, fy, gx, gy) = (f.d_x(), f.d_y(), g.d_x(), g.d_y());
    let err = |x: C64, y: C64| rel_value(f, x, y).max(rel_value(g, x, y));
    let mut e = err(x, y);
    for _ in 0..60 {
        if e < 1e-15 {
            break;
        }
        let a = fx.eval_affine(x, y);
        let b = fy.eval_affine(x, y);
        let c = gx.eval_affine(x, y);
        let d = gy.eval_affine(x, y);
        let det = a * d - b * c;
        if det.norm() == 0.0 {
            break;
        }
        let fv = f.eval_affine(x, y);
        let gv = g.eval_affine(x, y);
        let dx = (d * fv - b * gv) / det;
        let dy = (a * gv - c * fv) / det;
        let (nx, ny) = (x - dx, y - dy);
        let ne = err(nx, ny);
        if !(ne < e) {
            break;
        }
        x = nx;
        y = ny;
        e = ne;
    }
    (x, y)
}

fn push_unique(out: &mut Vec<PPoint>, p: PPoint) {
    if out.iter().all(|q| q.chordal(&p) > DEDUP) {
        out.push(p);
    }
}

/// Affine roots of the resultant after shear, lifted to common zeros.
fn finite_common_zeros(f: &HPoly, g: &HPoly) -> Result<Vec<PPoint>> {
    let fs = f.shear_x(SHEAR);
    let gs = g.shear_x(SHEAR);
    let (df, dg) = (f.degree(), g.degree());
    let n = df * dg + 1;
    let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
    let vals: Vec<C64> = (0..n)
        .map(|m| {
            let x = w.powu(m as u32);
            sylvester_det(&fs.in_y_at(x).coeffs, &gs.in_y_at(x).coeffs)
        })
        .collect();
    let vmax = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if vmax < 1e-11 {
        return Err(Error::Elimination(
            "resultant vanishes identically: the curves share a component".into(),
        ));
    }
    let coeffs: Vec<C64> = (0..n)
        .map(|k| {
            vals.iter().enumerate().fold(ZERO, |acc, (m, v)| {
                acc + v * w.powu(((m * k) % n) as u32).inv()
            }) / n as f64
        })
        .collect();
    let res = Poly1::new(coeffs);
    let mut out = Vec::new();
    for xs in res.roots() {
        for ys in fs.in_y_at(xs).roots() {
            // undo the shear, then polish on the original system
            let (x, y) = newton2(f, g, xs + SHEAR * ys, ys);
            if rel_value(f, x, y) < ACCEPT && rel_value(g, x, y) < ACCEPT {
                push_unique(&mut out, PPoint::affine(x, y));
            }
        }
    }
    Ok(out)
}

/// Roots of the top-degree form of `f` as points at infinity.
pub(crate) fn points_at_infinity(f: &HPoly) -> Vec<PPoint> {
    let top = f.top_form();
    if top.scale() == 0.0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for r in top.roots() {
        push_unique(&mut out, PPoint::new(r, ONE, ZERO));
    }
    let deg = top.degree_rel(1e-13).unwrap_or(0);
    if deg < f.degree() {
        push_unique(&mut out, PPoint::new(ONE, ZERO, ZERO));
    }
    out
}

fn vanishes_at(f: &HPoly, p: &PPoint) -> bool {
    let q = p.normalize();
    f.eval(&q.coords).norm() < ACCEPT * f.scale()
}

/// All common zeros of `F` and `G` in CP², without multiplicities.
///
/// Errors when the resultant vanishes identically (a shared component) or a
/// polynomial is zero. A nonzero constant has no zeros.
pub fn common_zeros(f: &HPoly, g: &HPoly) -> Result<Vec<PPoint>> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::Elimination("zero polynomial".into()));
    }
    if f.degree() == 0 || g.degree() == 0 {
        return Ok(Vec::new());
    }
    let f = normalized(f);
    let g = normalized(g);
    let mut out = finite_common_zeros(&f, &g)?;
    for p in points_at_infinity(&f) {
        if vanishes_at(&g, &p) {
            push_unique(&mut out, p);
        }
    }
    Ok(out)
}
