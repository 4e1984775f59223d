//! Gauss–Newton solver for periodic orbits over local curve charts.
//!
//! Each vertex moves in a one-dimensional complex chart of its mirror: the
//! rational parameter when the mirror has one and the point is well inside its
//! range, otherwise an implicit chart `P0 + d tau + w(d) n` with `w` found by
//! Newton's method. The residual used for derivatives keeps the normalizing
//! Hermitian norms frozen at the current iterate, which makes it holomorphic
//! in the chart coordinates, so the Jacobian is computed exactly (up to
//! rounding) by the Cauchy integral formula on a small circle.

use nalgebra::{DMatrix, DVector};

use super::{check_distinct, law_entry, law_norm, Billiard, Orbit};
use crate::error::{Error, Result};
use crate::mirrors::{CurvePoint, Mirror};
use crate::projective::{is_isotropic_direction, PPoint};
use crate::tol;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const CAUCHY_NODES: usize = 8;
const CAUCHY_RADIUS: f64 = 1e-3;
/// Vertices farther than this from the origin count as escaping to infinity.
const FAR: f64 = 1e8;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub max_iter: usize,
    pub max_halvings: usize,
    pub converged: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iter: 60,
            max_halvings: 20,
            converged: tol::RESIDUAL_CONVERGED,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Chart {
    Param {
        s0: C64,
    },
    Implicit {
        p0: [C64; 2],
        tau: [C64; 2],
        n: [C64; 2],
    },
}

fn norm2(v: [C64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

fn chart_at(m: &Mirror, p: [C64; 2]) -> Result<Chart> {
    if let Some(par) = m.param() {
        if let Some(s) = par.locate(&PPoint::affine(p[0], p[1])) {
            if s.norm() <= 1e3 {
                if let Some((_, d)) = par.affine_jet(s) {
                    if norm2(d) > 1e-6 {
                        return Ok(Chart::Param { s0: s });
                    }
                }
            }
        }
    }
    let g = m.gradient(&PPoint::affine(p[0], p[1]));
    let gn = (g[0].norm_sqr() + g[1].norm_sqr()).sqrt();
    if gn < tol::SINGULAR_GUARD * m.poly().scale() {
        return Err(Error::SingularPoint);
    }
    Ok(Chart::Implicit {
        p0: p,
        tau: [-g[1] / gn, g[0] / gn],
        n: [g[0].conj() / gn, g[1].conj() / gn],
    })
}

fn chart_point(m: &Mirror, c: &Chart, d: C64) -> Result<[C64; 2]> {
    match *c {
        Chart::Param { s0 } => {
            let (p, _) = m
                .param()
                .expect("param chart")
                .affine_jet(s0 + d)
                .ok_or(Error::Divergence)?;
            Ok(p)
        }
        Chart::Implicit { p0, tau, n } => {
            let f = m.poly();
            let (fx, fy) = (f.d_x(), f.d_y());
            let base = [p0[0] + d * tau[0], p0[1] + d * tau[1]];
            let mut w = ZERO;
            for _ in 0..40 {
                let q = [base[0] + w * n[0], base[1] + w * n[1]];
                let g = f.eval_affine(q[0], q[1]);
                let dg = fx.eval_affine(q[0], q[1]) * n[0] + fy.eval_affine(q[0], q[1]) * n[1];
                let step = g / dg;
                if !step.re.is_finite() || !step.im.is_finite() {
                    return Err(Error::Divergence);
                }
                w -= step;
                if step.norm() <= 1e-16 * (1.0 + w.norm() + norm2(base)) {
                    return Ok([base[0] + w * n[0], base[1] + w * n[1]]);
                }
            }
            let q = [base[0] + w * n[0], base[1] + w * n[1]];
            if m.residual(&PPoint::affine(q[0], q[1])) < 1e-13 {
                Ok(q)
            } else {
                Err(Error::Divergence)
            }
        }
    }
}

/// True normalized residual at affine points; `None` if a vertex has an
/// isotropic tangent or two consecutive vertices coincide.
fn residual_at(b: &Billiard, pts: &[[C64; 2]]) -> Option<Vec<C64>> {
    check_distinct(pts).ok()?;
    (0..pts.len())
        .map(|j| {
            let v = b.tangent_dir(j, pts[j]);
            (!is_isotropic_direction(v)).then(|| law_entry(pts, v, j, None))
        })
        .collect()
}

fn max_abs(r: &[C64]) -> f64 {
    r.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn l2(r: &[C64]) -> f64 {
    r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

struct Frame<'a> {
    b: &'a Billiard,
    pts: Vec<[C64; 2]>,
    charts: Vec<Chart>,
    norms: Vec<f64>,
}

impl<'a> Frame<'a> {
    fn new(b: &'a Billiard, pts: Vec<[C64; 2]>, free: &[bool]) -> Result<Frame<'a>> {
        let charts = pts
            .iter()
            .enumerate()
            .map(|(j, p)| {
                if free[j] {
                    chart_at(b.mirror(j), *p)
                } else {
                    Ok(Chart::Param { s0: ZERO })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let norms = (0..pts.len())
            .map(|j| law_norm(&pts, b.tangent_dir(j, pts[j]), j))
            .collect();
        Ok(Frame {
            b,
            pts,
            charts,
            norms,
        })
    }

    /// Points after moving the vertices in `cols` by `delta`.
    fn moved(&self, cols: &[usize], delta: &[C64]) -> Result<Vec<[C64; 2]>> {
        let mut pts = self.pts.clone();
        for (&j, &d) in cols.iter().zip(delta) {
            pts[j] = chart_point(self.b.mirror(j), &self.charts[j], d)?;
        }
        Ok(pts)
    }

    fn frozen(&self, pts: &[[C64; 2]]) -> Vec<C64> {
        (0..pts.len())
            .map(|j| law_entry(pts, self.b.tangent_dir(j, pts[j]), j, Some(self.norms[j])))
            .collect()
    }

    fn jacobian(&self, cols: &[usize]) -> Result<DMatrix<C64>> {
        let k = self.pts.len();
        let mut jac = DMatrix::<C64>::zeros(k, cols.len());
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / CAUCHY_NODES as f64);
        for c in 0..cols.len() {
            let mut delta = vec![ZERO; cols.len()];
            for m in 0..CAUCHY_NODES {
                let z = w.powu(m as u32);
                delta[c] = z * CAUCHY_RADIUS;
                let r = self.frozen(&self.moved(cols, &delta)?);
                let zinv = z.inv();
                for i in 0..k {
                    jac[(i, c)] += r[i] * zinv;
                }
            }
        }
        Ok(jac / C64::new(CAUCHY_NODES as f64 * CAUCHY_RADIUS, 0.0))
    }
}

/// Minimum-norm least-squares solution of `J x = rhs`.
fn min_norm_solve(jac: &DMatrix<C64>, rhs: &DVector<C64>) -> DVector<C64> {
    let svd = jac.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = 1e-10 * smax;
    let u = svd.u.as_ref().expect("u");
    let vt = svd.v_t.as_ref().expect("v_t");
    let mut x = DVector::<C64>::zeros(jac.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cut {
            let coef = u.column(i).dotc(rhs) / s;
            x += vt.row(i).adjoint() * coef;
        }
    }
    x
}

/// Complex Jacobian of the residual with respect to the vertex charts at a
/// configuration, together with its singular values in decreasing order.
pub(crate) fn jacobian_at(b: &Billiard, pts: &[[C64; 2]]) -> Result<(DMatrix<C64>, Vec<f64>)> {
    let k = pts.len();
    let frame = Frame::new(b, pts.to_vec(), &vec![true; k])?;
    let cols: Vec<usize> = (0..k).collect();
    let jac = frame.jacobian(&cols)?;
    let mut sv: Vec<f64> = jac.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((jac, sv))
}

#[derive(Debug, Clone)]
pub(crate) struct GnOutcome {
    pub pts: Vec<[C64; 2]>,
    pub max_residual: f64,
    pub converged: bool,
}

/// Damped Gauss–Newton on the vertices marked `free`; the others stay put.
pub(crate) fn gauss_newton(
    b: &Billiard,
    pts: Vec<[C64; 2]>,
    free: &[bool],
    opts: &SolveOptions,
) -> Result<GnOutcome> {
    let cols: Vec<usize> = (0..pts.len()).filter(|&j| free[j]).collect();
    let mut pts = pts;
    let mut r = residual_at(b, &pts).ok_or(Error::Tangential)?;
    let mut it = 0;
    while it < opts.max_iter {
        if max_abs(&r) < opts.converged || cols.is_empty() {
            break;
        }
        it += 1;
        let frame = Frame::new(b, pts.clone(), free)?;
        let jac = frame.jacobian(&cols)?;
        let f0 = frame.frozen(&pts);
        let rhs = DVector::from_iterator(f0.len(), f0.iter().map(|z| -z));
        let step = min_norm_solve(&jac, &rhs);
        let current = l2(&r);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let delta: Vec<C64> = step.iter().map(|z| z * lambda).collect();
            if let Ok(cand) = frame.moved(&cols, &delta) {
                if cand.iter().all(|p| norm2(*p) < FAR) {
                    if let Some(rc) = residual_at(b, &cand) {
                        if l2(&rc) < current {
                            accepted = Some((cand, rc));
                            break;
                        }
                    }
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((p, rc)) => {
                pts = p;
                r = rc;
            }
            None => break,
        }
    }
    let max_residual = max_abs(&r);
    Ok(GnOutcome {
        pts,
        max_residual,
        converged: max_residual < opts.converged,
    })
}

/// Solves for a `k`-periodic orbit near `init` (vertex `j` on mirror
/// `j mod m`). Fails with [`Error::NotConverged`] when the residual does not
/// drop below the convergence threshold, and with
/// [`Error::VertexAtInfinity`] when a vertex escapes.
pub fn solve_periodic(
    b: &Billiard,
    k: usize,
    init: &[CurvePoint],
    opts: &SolveOptions,
) -> Result<Orbit> {
    if k < 2 || init.len() != k {
        return Err(Error::InvalidArgument(format!(
            "need k >= 2 initial vertices, got k = {k} and {} vertices",
            init.len()
        )));
    }
    let pts = init
        .iter()
        .enumerate()
        .map(|(j, v)| {
            v.point
                .to_affine()
                .map(|(x, y)| [x, y])
                .map_err(|_| Error::VertexAtInfinity(j))
        })
        .collect::<Result<Vec<_>>>()?;
    let out = gauss_newton(b, pts, &vec![true; k], opts)?;
    if let Some(j) = out.pts.iter().position(|p| norm2(*p) >= FAR) {
        return Err(Error::VertexAtInfinity(j));
    }
    if !out.converged {
        return Err(Error::NotConverged(out.max_residual));
    }
    orbit_from_points(b, &out.pts)
}

/// Moves vertex `j` by `d` in the local chart of its mirror at `p`.
pub(crate) fn move_vertex(b: &Billiard, j: usize, p: [C64; 2], d: C64) -> Result<[C64; 2]> {
    let m = b.mirror(j);
    chart_point(m, &chart_at(m, p)?, d)
}

pub(crate) fn orbit_from_points(b: &Billiard, pts: &[[C64; 2]]) -> Result<Orbit> {
    let vertices = pts
        .iter()
        .enumerate()
        .map(|(j, p)| b.mirror(j).curve_point(PPoint::affine(p[0], p[1])))
        .collect::<Result<Vec<_>>>()?;
    let residual = super::orbit_residual(b, &vertices)?.values;
    Ok(Orbit { vertices, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> Mirror {
        Mirror::circle("c", 0.0, 0.0, 1.0).unwrap()
    }

    fn on_circle(m: &Mirror, angles: &[f64]) -> Vec<CurvePoint> {
        angles
            .iter()
            .map(|a| m.curve_point(PPoint::real(a.cos(), a.sin())).unwrap())
            .collect()
    }

    fn angle(p: &PPoint) -> f64 {
        let [x, y] = p.to_real().unwrap();
        y.atan2(x)
    }

    fn wrap(a: f64) -> f64 {
        (a + PI).rem_euclid(2.0 * PI) - PI
    }

    #[test]
    fn circle_triangle_converges_to_equilateral() {
        let b = Billiard::repeated(unit(), 3).unwrap();
        let o = solve_periodic(
            &b,
            3,
            &on_circle(&unit(), &[0.1, 2.2, 4.1]),
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(o.max_residual() < 1e-11);
        let a: Vec<f64> = o.vertices.iter().map(|v| angle(&v.point)).collect();
        for j in 0..3 {
            let gap = wrap(a[(j + 1) % 3] - a[j]).abs();
            assert!((gap - 2.0 * PI / 3.0).abs() < 1e-8, "gap {gap}");
        }
    }

    #[test]
    fn circle_diameter() {
        let b = Billiard::repeated(unit(), 2).unwrap();
        let o = solve_periodic(
            &b,
            2,
            &on_circle(&unit(), &[0.2, 3.0]),
            &SolveOptions::default(),
        )
        .unwrap();
        let a: Vec<f64> = o.vertices.iter().map(|v| angle(&v.point)).collect();
        assert!((wrap(a[1] - a[0]).abs() - PI).abs() < 1e-8);
    }

    #[test]
    fn parallel_lines_give_vertical_bounce() {
        let b = Billiard::new(vec![
            Mirror::real_line("y0", 0.0, 1.0, 0.0).unwrap(),
            Mirror::real_line("y1", 0.0, 1.0, -1.0).unwrap(),
        ])
        .unwrap();
        let init = vec![
            b.mirror(0).curve_point(PPoint::real(0.0, 0.0)).unwrap(),
            b.mirror(1).curve_point(PPoint::real(0.3, 1.0)).unwrap(),
        ];
        let o = solve_periodic(&b, 2, &init, &SolveOptions::default()).unwrap();
        let [x0, _] = o.vertices[0].point.to_real().unwrap();
        let [x1, _] = o.vertices[1].point.to_real().unwrap();
        assert!((x0 - x1).abs() < 1e-11);
        assert!(o.max_residual() < 1e-11);
    }

    #[test]
    fn converged_orbit_is_a_fixed_point() {
        let b = Billiard::repeated(unit(), 3).unwrap();
        let o = solve_periodic(
            &b,
            3,
            &on_circle(&unit(), &[0.1, 2.2, 4.1]),
            &SolveOptions::default(),
        )
        .unwrap();
        let o2 = solve_periodic(&b, 3, &o.vertices, &SolveOptions::default()).unwrap();
        for (a, c) in o.vertices.iter().zip(&o2.vertices) {
            assert!(a.point.chordal(&c.point) < 1e-11);
        }
    }

    #[test]
    fn cauchy_jacobian_matches_central_differences() {
        let b = Billiard::repeated(unit(), 3).unwrap();
        let pts: Vec<[C64; 2]> = [0.3f64, 1.9, 4.4]
            .iter()
            .map(|a| [C64::new(a.cos(), 0.0), C64::new(a.sin(), 0.0)])
            .collect();
        let frame = Frame::new(&b, pts.clone(), &[true; 3]).unwrap();
        let jac = frame.jacobian(&[0, 1, 2]).unwrap();
        let h = 1e-6;
        for c in 0..3 {
            let mut dp = vec![ZERO; 3];
            let mut dm = vec![ZERO; 3];
            dp[c] = C64::new(h, 0.0);
            dm[c] = C64::new(-h, 0.0);
            let rp = frame.frozen(&frame.moved(&[0, 1, 2], &dp).unwrap());
            let rm = frame.frozen(&frame.moved(&[0, 1, 2], &dm).unwrap());
            for i in 0..3 {
                let fd = (rp[i] - rm[i]) / (2.0 * h);
                assert!((fd - jac[(i, c)]).norm() < 1e-7);
            }
        }
    }
}
