//! Complex projective plane CP² with homogeneous coordinates `(x : y : t)`.
//!
//! The affine chart is `t != 0`; the line `t = 0` is the infinity line. The
//! complexified Euclidean form `dz1² + dz2²` is the plain bilinear pairing
//! without conjugation, see [`bilinear_form`]. Its null directions are the
//! isotropic points `I1 = (1 : i : 0)` and `I2 = (1 : -i : 0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;
use crate::C64;

pub const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Plain (non-Hermitian) cross product of complex triples.
pub(crate) fn cross(a: &[C64; 3], b: &[C64; 3]) -> [C64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn herm_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Chordal (Fubini-Study sine) distance between two nonzero complex vectors of
/// equal length. Zero iff they are proportional; at most 1.
///
/// Uses Lagrange's identity `|a|²|b|² - |<a,b>|² = sum |a_i b_j - a_j b_i|²`
/// so that nearly-equal inputs do not lose precision to cancellation.
pub fn chordal(a: &[C64], b: &[C64]) -> f64 {
    let na = herm_norm(a);
    let nb = herm_norm(b);
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            s += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    (s.sqrt() / (na * nb)).min(1.0)
}

fn normalize3(v: [C64; 3]) -> [C64; 3] {
    let mut best = 0;
    for i in 1..3 {
        // strict comparison keeps the first index among ties
        if v[i].norm() > v[best].norm() * (1.0 + 1e-14) {
            best = i;
        }
    }
    let s = v[best];
    [v[0] / s, v[1] / s, v[2] / s]
}

/// A point of CP². The derived `==` compares raw coordinates; use
/// [`PPoint::proj_eq`] for projective equality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PPoint {
    pub coords: [C64; 3],
}

/// A line `a x + b y + c t = 0` of CP².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PLine {
    pub coeffs: [C64; 3],
}

/// Affine direction `(dx, dy)`; its point at infinity is `(dx : dy : 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dir2 {
    pub dx: C64,
    pub dy: C64,
}

/// `u.dx v.dx + u.dy v.dy`, no conjugation.
pub fn bilinear_form(u: Dir2, v: Dir2) -> C64 {
    u.dx * v.dx + u.dy * v.dy
}

impl Dir2 {
    pub fn new(dx: C64, dy: C64) -> Self {
        Dir2 { dx, dy }
    }

    pub fn real(dx: f64, dy: f64) -> Self {
        Dir2::new(C64::new(dx, 0.0), C64::new(dy, 0.0))
    }

    /// Direction of `I1`.
    pub fn iso1() -> Self {
        Dir2::new(ONE, I)
    }

    /// Direction of `I2`.
    pub fn iso2() -> Self {
        Dir2::new(ONE, -I)
    }

    pub fn norm(&self) -> f64 {
        (self.dx.norm_sqr() + self.dy.norm_sqr()).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.dx == ZERO && self.dy == ZERO
    }

    pub fn scale(&self, s: C64) -> Dir2 {
        Dir2::new(self.dx * s, self.dy * s)
    }

    /// `det [self | other]`.
    pub fn det(&self, other: &Dir2) -> C64 {
        self.dx * other.dy - self.dy * other.dx
    }

    /// Projective (chordal) distance between the two directions.
    pub fn chordal(&self, other: &Dir2) -> f64 {
        chordal(&[self.dx, self.dy], &[other.dx, other.dy])
    }

    pub fn at_infinity(&self) -> PPoint {
        PPoint::new(self.dx, self.dy, ZERO)
    }
}

/// Isotropy of a direction under the relative test `|u.u| < tol |u|²`.
pub fn is_isotropic_direction(u: Dir2) -> bool {
    is_isotropic_direction_tol(u, tol::ISOTROPY)
}

pub fn is_isotropic_direction_tol(u: Dir2, tol: f64) -> bool {
    let n2 = u.dx.norm_sqr() + u.dy.norm_sqr();
    bilinear_form(u, u).norm() < tol * n2
}

impl PPoint {
    pub fn new(x: C64, y: C64, t: C64) -> Self {
        PPoint { coords: [x, y, t] }
    }

    /// Affine point `(x, y)`.
    pub fn affine(x: C64, y: C64) -> Self {
        PPoint::new(x, y, ONE)
    }

    pub fn real(x: f64, y: f64) -> Self {
        PPoint::affine(C64::new(x, 0.0), C64::new(y, 0.0))
    }

    pub fn i1() -> Self {
        PPoint::new(ONE, I, ZERO)
    }

    pub fn i2() -> Self {
        PPoint::new(ONE, -I, ZERO)
    }

    /// Rescaled copy whose largest-modulus coordinate equals 1.
    pub fn normalize(&self) -> PPoint {
        PPoint {
            coords: normalize3(self.coords),
        }
    }

    pub fn scaled(&self, s: C64) -> PPoint {
        PPoint {
            coords: self.coords.map(|z| z * s),
        }
    }

    pub fn chordal(&self, other: &PPoint) -> f64 {
        chordal(&self.coords, &other.coords)
    }

    /// Projective equality within [`tol::PROJ_EQ`].
    pub fn proj_eq(&self, other: &PPoint) -> bool {
        self.chordal(other) < tol::PROJ_EQ
    }

    pub fn is_finite(&self) -> bool {
        let n = herm_norm(&self.coords);
        self.coords[2].norm() > 1e-12 * n
    }

    /// Affine coordinates; errors for points at infinity.
    pub fn to_affine(&self) -> Result<(C64, C64)> {
        if !self.is_finite() {
            return Err(Error::PointAtInfinity);
        }
        let t = self.coords[2];
        Ok((self.coords[0] / t, self.coords[1] / t))
    }

    /// Real parts of the affine coordinates (for the real slice).
    pub fn to_real(&self) -> Result<[f64; 2]> {
        let (x, y) = self.to_affine()?;
        Ok([x.re, y.re])
    }

    /// Incidence value `l . p` (zero iff the point lies on the line).
    pub fn incidence(&self, l: &PLine) -> C64 {
        l.coeffs[0] * self.coords[0] + l.coeffs[1] * self.coords[1] + l.coeffs[2] * self.coords[2]
    }

    /// Relative incidence test.
    pub fn lies_on(&self, l: &PLine, tol: f64) -> bool {
        self.incidence(l).norm() <= tol * herm_norm(&self.coords) * herm_norm(&l.coeffs)
    }
}

impl PLine {
    pub fn new(a: C64, b: C64, c: C64) -> Self {
        PLine { coeffs: [a, b, c] }
    }

    pub fn real(a: f64, b: f64, c: f64) -> Self {
        PLine::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0))
    }

    pub fn infinity() -> Self {
        PLine::new(ZERO, ZERO, ONE)
    }

    /// Line through a finite point with the given direction.
    pub fn through(p: &PPoint, d: Dir2) -> Result<PLine> {
        join(p, &d.at_infinity())
    }

    pub fn normalize(&self) -> PLine {
        PLine {
            coeffs: normalize3(self.coeffs),
        }
    }

    pub fn chordal(&self, other: &PLine) -> f64 {
        chordal(&self.coeffs, &other.coeffs)
    }

    pub fn proj_eq(&self, other: &PLine) -> bool {
        self.chordal(other) < tol::PROJ_EQ
    }

    pub fn is_infinity(&self) -> bool {
        let n = herm_norm(&self.coeffs);
        (self.coeffs[0].norm_sqr() + self.coeffs[1].norm_sqr()).sqrt() <= 1e-12 * n
    }

    /// Direction vector `(-b, a)` of a finite line.
    pub fn direction(&self) -> Dir2 {
        Dir2::new(-self.coeffs[1], self.coeffs[0])
    }
}

/// Line through two distinct points.
pub fn join(p: &PPoint, q: &PPoint) -> Result<PLine> {
    let c = cross(&p.coords, &q.coords);
    if herm_norm(&c) <= tol::PROJ_EQ * herm_norm(&p.coords) * herm_norm(&q.coords) {
        return Err(Error::CoincidentPoints);
    }
    Ok(PLine { coeffs: c })
}

/// Intersection point of two distinct lines.
pub fn meet(l1: &PLine, l2: &PLine) -> Result<PPoint> {
    let c = cross(&l1.coeffs, &l2.coeffs);
    if herm_norm(&c) <= tol::PROJ_EQ * herm_norm(&l1.coeffs) * herm_norm(&l2.coeffs) {
        return Err(Error::CoincidentLines);
    }
    Ok(PPoint { coords: c })
}

/// True iff the line passes through `I1` or `I2`, or is the infinity line.
pub fn is_isotropic_line(l: &PLine) -> bool {
    is_isotropic_line_tol(l, tol::ISOTROPY)
}

pub fn is_isotropic_line_tol(l: &PLine, tol: f64) -> bool {
    if l.is_infinity() {
        return true;
    }
    let [a, b, _] = l.coeffs;
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a + b * I).norm() < tol * n || (a - b * I).norm() < tol * n
}

/// Point at infinity of a finite line.
pub fn infinity_point_of(l: &PLine) -> Result<PPoint> {
    if l.is_infinity() {
        return Err(Error::InfinityLine);
    }
    meet(l, &PLine::infinity())
}
