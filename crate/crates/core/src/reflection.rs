//! Complex symmetry with respect to a non-isotropic line.
//!
//! For an axis with direction `v`, `<v,v> != 0`, the linear part of the
//! symmetry is `u -> 2<u,v>/<v,v> v - u`. It fixes the axis pointwise and
//! preserves the bilinear form. Isotropic axes have no symmetry; the limit
//! rule for them lives in [`is_symmetric_pair`].

use crate::error::{Error, Result};
use crate::projective::{
    bilinear_form, is_isotropic_direction_tol, is_isotropic_line, Dir2, PLine, PPoint,
};
use crate::tol;
use crate::C64;

/// Incidence tolerance for "x lies on the line" preconditions.
const INCIDENCE: f64 = 1e-9;

/// The symmetry with respect to a finite non-isotropic line.
#[derive(Debug, Clone, Copy)]
pub struct Involution {
    pub axis: PLine,
    pub base_point: PPoint,
    pub dir: Dir2,
}

impl Involution {
    /// Symmetry across the given line.
    pub fn from_axis(axis: PLine) -> Result<Self> {
        if axis.is_infinity() {
            return Err(Error::IsotropicAxis);
        }
        let dir = axis.direction();
        check_axis_dir(dir)?;
        let [a, b, c] = axis.coeffs;
        // the point -c (a, b) / (a² + b²) lies on the axis; a² + b² = <dir,dir> != 0
        let s = -c / (a * a + b * b);
        let base_point = PPoint::affine(a * s, b * s);
        Ok(Involution {
            axis,
            base_point,
            dir,
        })
    }

    /// Symmetry across the line through a finite point with direction `dir`.
    pub fn from_point_dir(p: PPoint, dir: Dir2) -> Result<Self> {
        check_axis_dir(dir)?;
        if !p.is_finite() {
            return Err(Error::PointAtInfinity);
        }
        let axis = PLine::through(&p, dir)?;
        Ok(Involution {
            axis,
            base_point: p,
            dir,
        })
    }
}

fn check_axis_dir(v: Dir2) -> Result<()> {
    if v.is_zero() || is_isotropic_direction_tol(v, tol::ISOTROPY) {
        return Err(Error::IsotropicAxis);
    }
    Ok(())
}

fn sigma(u: Dir2, v: Dir2) -> Dir2 {
    let k = C64::new(2.0, 0.0) * bilinear_form(u, v) / bilinear_form(v, v);
    Dir2::new(k * v.dx - u.dx, k * v.dy - u.dy)
}

/// Linear part of the symmetry applied to a direction.
pub fn reflect_direction(u: Dir2, inv: &Involution) -> Result<Dir2> {
    check_axis_dir(inv.dir)?;
    Ok(sigma(u, inv.dir))
}

/// Symmetry applied to a finite point: `p + sigma(x - p)`.
pub fn reflect_point(x: &PPoint, inv: &Involution) -> Result<PPoint> {
    check_axis_dir(inv.dir)?;
    let (x0, y0) = x.to_affine()?;
    let (px, py) = inv.base_point.to_affine()?;
    let r = sigma(Dir2::new(x0 - px, y0 - py), inv.dir);
    Ok(PPoint::affine(px + r.dx, py + r.dy))
}

/// Image of a line through a point `x` of the axis under the symmetry at `x`.
pub fn reflect_line_at(m: &PLine, x: &PPoint, inv: &Involution) -> Result<PLine> {
    check_axis_dir(inv.dir)?;
    if !x.is_finite() {
        return Err(Error::PointAtInfinity);
    }
    if !x.lies_on(m, INCIDENCE) || !x.lies_on(&inv.axis, INCIDENCE) {
        return Err(Error::NotIncident);
    }
    if m.is_infinity() {
        return Err(Error::NotIncident);
    }
    let w = sigma(m.direction(), inv.dir);
    PLine::through(x, w)
}

/// Whether `(l1, l2)` is a symmetric pair of lines through `x` with respect
/// to `axis`. For an isotropic axis this is the limit rule: one of the two
/// lines must coincide with the axis.
pub fn is_symmetric_pair(l1: &PLine, l2: &PLine, axis: &PLine, x: &PPoint) -> bool {
    is_symmetric_pair_tol(l1, l2, axis, x, INCIDENCE)
}

pub fn is_symmetric_pair_tol(l1: &PLine, l2: &PLine, axis: &PLine, x: &PPoint, tol: f64) -> bool {
    if is_isotropic_line(axis) {
        return l1.chordal(axis) < tol || l2.chordal(axis) < tol;
    }
    let Ok(inv) = Involution::from_axis(*axis) else {
        return false;
    };
    match reflect_line_at(l1, x, &inv) {
        Ok(img) => img.chordal(l2) < tol,
        Err(_) => false,
    }
}
