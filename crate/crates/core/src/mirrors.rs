//! Algebraic plane curves used as billiard mirrors.

use serde::{Deserialize, Serialize};

use crate::elim::common_zeros;
use crate::error::{Error, Result};
use crate::poly::{cluster_roots, HPoly, Poly1};
use crate::projective::{herm_norm, is_isotropic_line, PLine, PPoint};
use crate::tol;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Relative residual under which a point counts as lying on a curve.
pub const ON_CURVE: f64 = 1e-8;

/// Rational parametrization `s -> (x(s) : y(s) : t(s))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Param {
    pub x: Poly1,
    pub y: Poly1,
    pub t: Poly1,
}

impl Param {
    pub fn coords(&self, s: C64) -> [C64; 3] {
        [self.x.eval(s), self.y.eval(s), self.t.eval(s)]
    }

    pub fn point(&self, s: C64) -> PPoint {
        PPoint {
            coords: self.coords(s),
        }
    }

    /// Affine point and its derivative in `s`. `None` where `t(s)` is tiny.
    pub fn affine_jet(&self, s: C64) -> Option<([C64; 2], [C64; 2])> {
        let [x, y, t] = self.coords(s);
        let scale = x.norm().max(y.norm()).max(t.norm());
        if t.norm() <= 1e-9 * scale {
            return None;
        }
        let (dx, dy, dt) = (
            self.x.deriv().eval(s),
            self.y.deriv().eval(s),
            self.t.deriv().eval(s),
        );
        let t2 = t * t;
        Some((
            [x / t, y / t],
            [(dx * t - x * dt) / t2, (dy * t - y * dt) / t2],
        ))
    }

    /// Parameter value whose image is `p`, if it is finite in `s`.
    pub fn locate(&self, p: &PPoint) -> Option<C64> {
        let [px, py, pt] = p.coords;
        // (x(s) : y(s) : t(s)) proportional to p: two cross-products vanish
        let e1 = self.x.scaled(pt).add(&self.t.scaled(-px));
        let e2 = self.y.scaled(pt).add(&self.t.scaled(-py));
        let e3 = self.x.scaled(py).add(&self.y.scaled(-px));
        let mut best: Option<(f64, C64)> = None;
        for e in [&e1, &e2, &e3] {
            for s in e.roots() {
                let d = self.point(s).chordal(p);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, s));
                }
            }
        }
        best.filter(|(d, _)| *d < 1e-8).map(|(_, s)| s)
    }
}

/// Tag of a special point of a mirror or a pair of mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialTag {
    /// Cusp or other point with vanishing gradient.
    Singular,
    /// Smooth point with isotropic tangent line.
    IsotropicTangency,
    /// Intersection of two distinct mirrors.
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialPoint {
    pub point: PPoint,
    pub tag: SpecialTag,
}

/// How a [`CurvePoint`] was located: a parameter value or an affine seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seed {
    Param(C64),
    Affine(C64, C64),
}

/// A point on a mirror together with its tangent line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub mirror: String,
    pub seed: Seed,
    pub point: PPoint,
    pub tangent: PLine,
}

/// JSON form of a mirror: `coeffs` lists `[i, j, [re, im]]` for the monomial
/// `x^i y^j t^(degree-i-j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorSpec {
    pub label: String,
    pub degree: usize,
    pub coeffs: Vec<(usize, usize, C64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arcs: Option<Vec<[f64; 2]>>,
}

/// A plane algebraic curve `F = 0`, never an isotropic line.
#[derive(Debug, Clone, PartialEq)]
pub struct Mirror {
    pub label: String,
    poly: HPoly,
    param: Option<Param>,
    arcs: Option<Vec<[f64; 2]>>,
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl Mirror {
    /// Validated mirror. A parametrization is derived automatically for lines
    /// and conics when none is given.
    pub fn new(label: impl Into<String>, poly: HPoly, param: Option<Param>) -> Result<Mirror> {
        let label = label.into();
        if poly.degree() == 0 {
            return Err(Error::InvalidMirror(format!(
                "{label}: degree must be at least 1"
            )));
        }
        if poly.is_zero() {
            return Err(Error::InvalidMirror(format!("{label}: zero polynomial")));
        }
        if poly.degree() == 1 && is_isotropic_line(&line_of(&poly)) {
            return Err(Error::IsotropicMirror);
        }
        let param = match param {
            Some(p) => Some(p),
            None => derive_param(&poly),
        };
        let m = Mirror {
            label,
            poly,
            param,
            arcs: None,
        };
        if let Some(p) = &m.param {
            let samples = [
                r(0.3),
                C64::new(-0.7, 0.2),
                r(1.9),
                C64::new(0.1, -1.3),
                r(-2.4),
            ];
            for s in samples {
                let q = p.point(s);
                if herm_norm(&q.coords) == 0.0 || m.residual(&q) > 1e-10 {
                    return Err(Error::InvalidMirror(format!(
                        "{}: parametrization does not lie on the curve",
                        m.label
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn with_arcs(mut self, arcs: Vec<[f64; 2]>) -> Mirror {
        self.arcs = Some(arcs);
        self
    }

    /// Line `a x + b y + c = 0`.
    pub fn line(label: &str, a: C64, b: C64, c: C64) -> Result<Mirror> {
        let poly = HPoly::from_terms(1, &[(1, 0, a), (0, 1, b), (0, 0, c)]).expect("degree 1");
        Mirror::new(label, poly, None)
    }

    pub fn real_line(label: &str, a: f64, b: f64, c: f64) -> Result<Mirror> {
        Mirror::line(label, r(a), r(b), r(c))
    }

    /// Circle with center `(cx, cy)` and radius `rad`, parametrized by
    /// `s -> (cx + rad (1 - s²)/(1 + s²), cy + 2 rad s/(1 + s²))`.
    pub fn circle(label: &str, cx: f64, cy: f64, rad: f64) -> Result<Mirror> {
        let poly = HPoly::from_terms(
            2,
            &[
                (2, 0, r(1.0)),
                (0, 2, r(1.0)),
                (1, 0, r(-2.0 * cx)),
                (0, 1, r(-2.0 * cy)),
                (0, 0, r(cx * cx + cy * cy - rad * rad)),
            ],
        )
        .expect("degree 2");
        let param = Param {
            x: Poly1::new(vec![r(cx + rad), ZERO, r(cx - rad)]),
            y: Poly1::new(vec![r(cy), r(2.0 * rad), r(cy)]),
            t: Poly1::new(vec![ONE, ZERO, ONE]),
        };
        Mirror::new(label, poly, Some(param))
    }

    /// Parabola `y = a x² + b x + c`, parametrized by `x = s`.
    pub fn parabola(label: &str, a: f64, b: f64, c: f64) -> Result<Mirror> {
        let poly = HPoly::from_terms(
            2,
            &[(2, 0, r(-a)), (1, 0, r(-b)), (0, 0, r(-c)), (0, 1, ONE)],
        )
        .expect("degree 2");
        let param = Param {
            x: Poly1::new(vec![ZERO, ONE]),
            y: Poly1::new(vec![r(c), r(b), r(a)]),
            t: Poly1::constant(ONE),
        };
        Mirror::new(label, poly, Some(param))
    }

    /// General conic `a x² + b xy + c y² + d x + e y + f = 0`.
    pub fn conic(label: &str, k: [C64; 6]) -> Result<Mirror> {
        let [a, b, c, d, e, f] = k;
        let poly = HPoly::from_terms(
            2,
            &[
                (2, 0, a),
                (1, 1, b),
                (0, 2, c),
                (1, 0, d),
                (0, 1, e),
                (0, 0, f),
            ],
        )
        .expect("degree 2");
        Mirror::new(label, poly, None)
    }

    pub fn from_spec(spec: &MirrorSpec) -> Result<Mirror> {
        let poly = HPoly::from_terms(spec.degree, &spec.coeffs).ok_or_else(|| {
            Error::InvalidMirror(format!(
                "{}: monomial exponent exceeds the degree",
                spec.label
            ))
        })?;
        let mut m = Mirror::new(spec.label.clone(), poly, spec.param.clone())?;
        m.arcs = spec.arcs.clone();
        Ok(m)
    }

    pub fn to_spec(&self) -> MirrorSpec {
        MirrorSpec {
            label: self.label.clone(),
            degree: self.poly.degree(),
            coeffs: self.poly.terms(),
            param: self.param.clone(),
            arcs: self.arcs.clone(),
        }
    }

    pub fn poly(&self) -> &HPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn param(&self) -> Option<&Param> {
        self.param.as_ref()
    }

    pub fn arcs(&self) -> Option<&[[f64; 2]]> {
        self.arcs.as_deref()
    }

    pub fn is_real(&self) -> bool {
        self.poly.terms().iter().all(|(_, _, c)| c.im == 0.0)
    }

    pub fn eval(&self, p: &PPoint) -> C64 {
        self.poly.eval(&p.coords)
    }

    /// `|F(p)|` relative to the coefficient scale and `|p|^d`.
    pub fn residual(&self, p: &PPoint) -> f64 {
        let n = herm_norm(&p.coords);
        self.eval(p).norm() / (self.poly.scale() * n.powi(self.degree() as i32))
    }

    /// Homogeneous gradient `(F_x, F_y, F_t)`.
    pub fn gradient(&self, p: &PPoint) -> [C64; 3] {
        self.poly.grad(&p.coords)
    }

    fn gradient_is_small(&self, g: &[C64; 3], p: &PPoint) -> bool {
        let n = herm_norm(&p.coords);
        herm_norm(g) < tol::SINGULAR_GUARD * self.poly.scale() * n.powi(self.degree() as i32 - 1)
    }

    /// Tangent line at a smooth point; its coefficients are the gradient.
    pub fn tangent_line_at(&self, p: &PPoint) -> Result<PLine> {
        let res = self.residual(p);
        if res > ON_CURVE {
            return Err(Error::NotOnCurve(res));
        }
        let g = self.gradient(p);
        if self.gradient_is_small(&g, p) {
            return Err(Error::SingularPoint);
        }
        Ok(PLine { coeffs: g })
    }

    /// Whether `F` vanishes at `I1` and at `I2`.
    pub fn contains_isotropic_infinity(&self) -> (bool, bool) {
        (
            self.residual(&PPoint::i1()) < 1e-10,
            self.residual(&PPoint::i2()) < 1e-10,
        )
    }

    /// Curve point from a parameter value.
    pub fn point_from_param(&self, s: C64) -> Result<CurvePoint> {
        let p = self.param.as_ref().ok_or_else(|| {
            Error::InvalidArgument(format!("{} has no parametrization", self.label))
        })?;
        let point = p.point(s);
        let tangent = self.tangent_line_at(&point)?;
        Ok(CurvePoint {
            mirror: self.label.clone(),
            seed: Seed::Param(s),
            point,
            tangent,
        })
    }

    /// Curve point at a point known to lie on the curve; the seed is the
    /// parameter value when the parametrization covers it.
    pub fn curve_point(&self, p: PPoint) -> Result<CurvePoint> {
        let tangent = self.tangent_line_at(&p)?;
        let seed = match self.param.as_ref().and_then(|q| q.locate(&p)) {
            Some(s) => Seed::Param(s),
            None => {
                let (x, y) = p.to_affine()?;
                Seed::Affine(x, y)
            }
        };
        Ok(CurvePoint {
            mirror: self.label.clone(),
            seed,
            point: p,
            tangent,
        })
    }
}

fn line_of(poly: &HPoly) -> PLine {
    PLine::new(poly.coeff(1, 0), poly.coeff(0, 1), poly.coeff(0, 0))
}

/// Two points spanning a line: a base point and the point at infinity.
fn line_frame(l: &PLine) -> ([C64; 3], [C64; 3]) {
    if l.is_infinity() {
        return ([ONE, ZERO, ZERO], [ZERO, ONE, ZERO]);
    }
    let [a, b, c] = l.coeffs;
    let n2 = a.norm_sqr() + b.norm_sqr();
    ([-c * a.conj(), -c * b.conj(), r(n2)], [-b, a, ZERO])
}

fn derive_param(poly: &HPoly) -> Option<Param> {
    match poly.degree() {
        1 => {
            let (p, q) = line_frame(&line_of(poly));
            let t = p[2];
            Some(Param {
                x: Poly1::linear(p[0] / t, q[0]),
                y: Poly1::linear(p[1] / t, q[1]),
                t: Poly1::constant(ONE),
            })
        }
        2 => conic_param(poly),
        _ => None,
    }
}

/// Projection of a conic from one of its finite points `P0`: the line through
/// `P0` with direction `(1, s)` meets the conic again at `P0 + lambda (1, s)`
/// with `lambda = -L(s)/Q(s)`.
fn conic_param(poly: &HPoly) -> Option<Param> {
    let p0 = [0.371_9, -0.583_1, 1.213_7].iter().find_map(|&x0| {
        let l = PLine::new(ONE, ZERO, r(-x0));
        let (p, q) = line_frame(&l);
        let g = poly.restrict(&p, &q);
        g.roots().into_iter().find_map(|s| {
            let pt = PPoint {
                coords: [p[0] + s * q[0], p[1] + s * q[1], p[2]],
            };
            let (x, y) = pt.to_affine().ok()?;
            let grad = poly.grad(&[x, y, ONE]);
            (grad[0].norm() + grad[1].norm() > 1e-6 * poly.scale()).then_some((x, y))
        })
    })?;
    let (x0, y0) = p0;
    let q = |i: usize, j: usize| poly.coeff(i, j);
    // Q(1, s) = a + b s + c s², L(s) = F_x(P0) + F_y(P0) s
    let quad = Poly1::new(vec![q(2, 0), q(1, 1), q(0, 2)]);
    let g = poly.grad(&[x0, y0, ONE]);
    let lin = Poly1::linear(g[0], g[1]);
    let s = Poly1::linear(ZERO, ONE);
    Some(Param {
        x: quad.scaled(x0).add(&lin.scaled(-ONE)),
        y: quad.scaled(y0).add(&s.mul(&lin).scaled(-ONE)),
        t: quad,
    })
}

/// Intersection points of a line with a mirror, with multiplicities.
pub fn intersect_line_curve(l: &PLine, m: &Mirror) -> Result<Vec<(PPoint, usize)>> {
    let (p, q) = line_frame(l);
    let g = m.poly.restrict(&p, &q);
    let size = m.poly.scale() * (herm_norm(&p) + herm_norm(&q)).powi(m.degree() as i32);
    let Some(deg) = g.degree_rel(1e-12 * size / g.scale().max(f64::MIN_POSITIVE)) else {
        return Err(Error::LineContainedInCurve);
    };
    if g.scale() <= 1e-12 * size {
        return Err(Error::LineContainedInCurve);
    }
    let trimmed = Poly1::new(g.coeffs[..=deg].to_vec());
    let mut out: Vec<(PPoint, usize)> = cluster_roots(&trimmed.roots(), tol::ROOT_CLUSTER)
        .into_iter()
        .map(|(s, k)| {
            (
                PPoint {
                    coords: [p[0] + s * q[0], p[1] + s * q[1], p[2] + s * q[2]],
                },
                k,
            )
        })
        .collect();
    if deg < m.degree() {
        out.push((PPoint { coords: q }, m.degree() - deg));
    }
    Ok(out)
}

/// Marked points of `m1` (singular points and isotropic tangencies, including
/// those at infinity) and, with `m2`, the double points `m1 ∩ m2`.
pub fn find_special_points(m1: &Mirror, m2: Option<&Mirror>) -> Result<Vec<SpecialPoint>> {
    let f = &m1.poly;
    let mut out: Vec<SpecialPoint> = Vec::new();
    let push = |point: PPoint, tag: SpecialTag, out: &mut Vec<SpecialPoint>| {
        if !out
            .iter()
            .any(|s| s.tag == tag && s.point.chordal(&point) < 1e-6)
        {
            out.push(SpecialPoint { point, tag });
        }
    };
    if m1.degree() >= 2 {
        let (fx, fy) = (f.d_x(), f.d_y());
        let k = C64::new(0.618_034, 0.271_828);
        let comb = fx.add(
            &HPoly::from_terms(
                fx.degree(),
                &fy.terms()
                    .iter()
                    .map(|&(i, j, c)| (i, j, c * k))
                    .collect::<Vec<_>>(),
            )
            .expect("same degree"),
        );
        for p in common_zeros(f, &comb)? {
            if m1.gradient_is_small(&m1.gradient(&p), &p) {
                push(p.normalize(), SpecialTag::Singular, &mut out);
            }
        }
        let iso = fx.mul(&fx).add(&fy.mul(&fy));
        if !iso.is_zero() {
            for p in common_zeros(f, &iso)? {
                let g = m1.gradient(&p);
                if !m1.gradient_is_small(&g, &p) {
                    push(p.normalize(), SpecialTag::IsotropicTangency, &mut out);
                }
            }
        }
    }
    if let Some(m2) = m2 {
        for p in common_zeros(f, &m2.poly)? {
            push(p.normalize(), SpecialTag::Double, &mut out);
        }
    }
    Ok(out)
}

/// Newton projection of an affine guess onto the curve along the conjugate
/// gradient (minimum-norm correction).
pub fn project_to_curve(m: &Mirror, guess: &PPoint) -> Result<CurvePoint> {
    let (mut x, mut y) = guess.to_affine()?;
    let (fx, fy) = (m.poly.d_x(), m.poly.d_y());
    let scale = m.poly.scale();
    let guard = |x: C64, y: C64| {
        let g = (fx.eval_affine(x, y).norm_sqr() + fy.eval_affine(x, y).norm_sqr()).sqrt();
        g < tol::SINGULAR_GUARD * scale
    };
    let start = (x.norm_sqr() + y.norm_sqr()).sqrt();
    let mut converged = false;
    for _ in 0..60 {
        if guard(x, y) {
            return Err(Error::SingularPoint);
        }
        let f = m.poly.eval_affine(x, y);
        let (a, b) = (fx.eval_affine(x, y), fy.eval_affine(x, y));
        let n2 = a.norm_sqr() + b.norm_sqr();
        let dx = f * a.conj() / n2;
        let dy = f * b.conj() / n2;
        x -= dx;
        y -= dy;
        let step = (dx.norm_sqr() + dy.norm_sqr()).sqrt();
        if !step.is_finite() || (x.norm_sqr() + y.norm_sqr()).sqrt() > 1e8 * (1.0 + start) {
            return Err(Error::Divergence);
        }
        if step <= 1e-15 * (1.0 + (x.norm_sqr() + y.norm_sqr()).sqrt()) {
            converged = true;
            break;
        }
    }
    let p = PPoint::affine(x, y);
    if !converged && m.residual(&p) > 1e-13 {
        return Err(Error::Divergence);
    }
    if guard(x, y) {
        return Err(Error::SingularPoint);
    }
    m.curve_point(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::I;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cusp() -> Mirror {
        // y² t - x³
        let f = HPoly::from_terms(3, &[(0, 2, r(1.0)), (3, 0, r(-1.0))]).unwrap();
        Mirror::new("cusp", f, None).unwrap()
    }

    #[test]
    fn tangent_line_examples() {
        let circ = Mirror::circle("c", 0.0, 0.0, 1.0).unwrap();
        let t = circ.tangent_line_at(&PPoint::real(1.0, 0.0)).unwrap();
        assert!(t.proj_eq(&PLine::real(1.0, 0.0, -1.0)));
        let par = Mirror::parabola("p", 1.0, 0.0, 0.0).unwrap();
        let t = par.tangent_line_at(&PPoint::real(1.0, 1.0)).unwrap();
        assert!(t.proj_eq(&PLine::real(2.0, -1.0, -1.0)));
        assert_eq!(
            cusp().tangent_line_at(&PPoint::real(0.0, 0.0)),
            Err(Error::SingularPoint)
        );
    }

    #[test]
    fn isotropic_infinity_examples() {
        assert_eq!(
            Mirror::circle("c", 0.0, 0.0, 1.0)
                .unwrap()
                .contains_isotropic_infinity(),
            (true, true)
        );
        assert_eq!(
            Mirror::parabola("p", 1.0, 0.0, 0.0)
                .unwrap()
                .contains_isotropic_infinity(),
            (false, false)
        );
        assert_eq!(
            Mirror::real_line("l", 1.0, 0.0, 0.0)
                .unwrap()
                .contains_isotropic_infinity(),
            (false, false)
        );
    }

    #[test]
    fn isotropic_line_mirror_is_rejected() {
        assert_eq!(
            Mirror::line("iso", I, r(-1.0), ZERO),
            Err(Error::IsotropicMirror)
        );
        assert_eq!(
            Mirror::line("inf", ZERO, ZERO, ONE),
            Err(Error::IsotropicMirror)
        );
    }

    #[test]
    fn special_points_of_circle_are_at_infinity() {
        let circ = Mirror::circle("c", 0.0, 0.0, 1.0).unwrap();
        let sp = find_special_points(&circ, None).unwrap();
        assert!(sp.iter().all(|s| !s.point.is_finite()));
        assert!(sp.iter().any(|s| s.point.chordal(&PPoint::i1()) < 1e-10));
    }

    #[test]
    fn special_points_of_parabola() {
        let par = Mirror::parabola("p", 1.0, 0.0, 0.0).unwrap();
        let sp = find_special_points(&par, None).unwrap();
        let finite: Vec<_> = sp.iter().filter(|s| s.point.is_finite()).collect();
        assert_eq!(finite.len(), 2);
        for s in &finite {
            assert_eq!(s.tag, SpecialTag::IsotropicTangency);
            let (x, y) = s.point.to_affine().unwrap();
            assert!((x.norm() - 0.5).abs() < 1e-10 && x.re.abs() < 1e-10);
            assert!((y - r(-0.25)).norm() < 1e-10);
            assert!(is_isotropic_line(&par.tangent_line_at(&s.point).unwrap()));
        }
    }

    #[test]
    fn special_points_of_cusp() {
        let sp = find_special_points(&cusp(), None).unwrap();
        assert!(sp
            .iter()
            .any(|s| s.tag == SpecialTag::Singular
                && s.point.chordal(&PPoint::real(0.0, 0.0)) < 1e-6));
    }

    #[test]
    fn double_points_of_two_circles() {
        let a = Mirror::circle("a", 0.0, 0.0, 1.0).unwrap();
        let b = Mirror::circle("b", 1.0, 0.0, 1.0).unwrap();
        let sp = find_special_points(&a, Some(&b)).unwrap();
        let doubles = sp.iter().filter(|s| s.tag == SpecialTag::Double).count();
        assert_eq!(doubles, 4);
    }

    #[test]
    fn intersect_examples() {
        let circ = Mirror::circle("c", 0.0, 0.0, 1.0).unwrap();
        let pts = intersect_line_curve(&PLine::real(0.0, 1.0, 0.0), &circ).unwrap();
        assert_eq!(pts.len(), 2);
        for x in [1.0, -1.0] {
            assert!(pts
                .iter()
                .any(|(p, k)| *k == 1 && p.chordal(&PPoint::real(x, 0.0)) < 1e-13));
        }
        let iso = PLine::new(I, r(-1.0), ZERO);
        let pts = intersect_line_curve(&iso, &circ).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].0.proj_eq(&PPoint::i1()) && pts[0].1 == 2);
        let axis = Mirror::real_line("x", 0.0, 1.0, 0.0).unwrap();
        assert_eq!(
            intersect_line_curve(&PLine::real(0.0, 1.0, 0.0), &axis),
            Err(Error::LineContainedInCurve)
        );
    }

    #[test]
    fn tangent_intersection_has_multiplicity_two() {
        let circ = Mirror::circle("c", 0.0, 0.0, 1.0).unwrap();
        let pts = intersect_line_curve(&PLine::real(0.0, 1.0, -1.0), &circ).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].1, 2);
    }

    #[test]
    fn project_examples() {
        let circ = Mirror::circle("c", 0.0, 0.0, 1.0).unwrap();
        let cp = project_to_curve(&circ, &PPoint::real(1.001, 0.002)).unwrap();
        assert!(cp.point.chordal(&PPoint::real(1.0, 0.0)) < 2e-3);
        assert!(circ.residual(&cp.point) < 1e-14);
        assert!(cp.tangent.chordal(&PLine::real(1.0, 0.0, -1.0)) < 2e-3);

        let par = Mirror::parabola("p", 1.0, 0.0, 0.0).unwrap();
        let cp = project_to_curve(&par, &PPoint::real(1.0, 1.0)).unwrap();
        assert_eq!(cp.point, PPoint::real(1.0, 1.0));
        assert_eq!(cp.seed, Seed::Param(r(1.0)));

        assert_eq!(
            project_to_curve(&cusp(), &PPoint::real(1e-9, 1e-9)),
            Err(Error::SingularPoint)
        );
    }

    #[test]
    fn auto_params_lie_on_the_curves() {
        let line = Mirror::line("l", c(1.0, 0.5), r(2.0), c(-3.0, 1.0)).unwrap();
        let conic = Mirror::conic("q", [r(1.0), r(0.3), r(2.0), r(-1.0), r(0.5), r(-4.0)]).unwrap();
        for m in [&line, &conic] {
            let p = m.param().unwrap();
            for k in 0..20 {
                let s = C64::from_polar(0.2 + 0.3 * k as f64, 0.7 * k as f64);
                assert!(m.residual(&p.point(s)) < 1e-12, "{}", m.label);
            }
        }
    }

    #[test]
    fn locate_inverts_the_parametrization() {
        let conic = Mirror::conic("q", [r(1.0), r(0.3), r(2.0), r(-1.0), r(0.5), r(-4.0)]).unwrap();
        let p = conic.param().unwrap();
        let s = c(0.4, -0.3);
        let back = p.locate(&p.point(s)).unwrap();
        assert!(p.point(back).chordal(&p.point(s)) < 1e-10);
    }

    #[test]
    fn spec_json_round_trip() {
        let m = Mirror::circle("c", 0.5, -1.0, 2.0).unwrap();
        let text = serde_json::to_string(&m.to_spec()).unwrap();
        let back = Mirror::from_spec(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
