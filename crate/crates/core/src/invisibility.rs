//! Real billiards: bodies bounded by algebraic arcs, ray tracing and
//! invisibility checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mirrors::{Mirror, MirrorSpec, Param};
use crate::orbits::{orbit_residual, Billiard, Orbit};
use crate::poly::{cluster_roots, HPoly, Poly1};
use crate::projective::PPoint;
use crate::tol;
use crate::C64;

type P2 = [f64; 2];

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn det(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: P2) -> f64 {
    a[0].hypot(a[1])
}

fn unit(a: P2) -> Option<P2> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| [a[0] / n, a[1] / n])
}

/// A piece of a real mirror: the image of `interval` under its
/// parametrization. `outward` says that the gradient of the defining
/// polynomial points out of the body along the arc.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub mirror: usize,
    pub interval: [f64; 2],
    pub outward: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Body {
    mirrors: Vec<Mirror>,
    arcs: Vec<Arc>,
    bbox: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec {
    pub mirror: String,
    pub interval: [f64; 2],
    pub outward: bool,
}

/// Serialized form of a body: mirrors plus arcs that refer to them by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub mirrors: Vec<MirrorSpec>,
    pub arcs: Vec<ArcSpec>,
}

impl Body {
    pub fn new(mirrors: Vec<Mirror>, arcs: Vec<Arc>) -> Result<Body> {
        if arcs.is_empty() {
            return Err(Error::InvalidBody("no arcs".into()));
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for a in &arcs {
            let m = mirrors.get(a.mirror).ok_or_else(|| {
                Error::InvalidBody(format!("arc refers to missing mirror {}", a.mirror))
            })?;
            if !m.is_real() {
                return Err(Error::InvalidBody(format!(
                    "{} has non-real coefficients",
                    m.label
                )));
            }
            let [s0, s1] = a.interval;
            if !(s0.is_finite() && s1.is_finite() && s0 < s1) {
                return Err(Error::InvalidBody(format!(
                    "{}: bad interval [{s0}, {s1}]",
                    m.label
                )));
            }
            let p = m
                .param()
                .ok_or_else(|| Error::InvalidBody(format!("{} has no parametrization", m.label)))?;
            for i in 0..=64 {
                let s = s0 + (s1 - s0) * i as f64 / 64.0;
                let q = arc_point(p, s)
                    .ok_or_else(|| Error::InvalidBody(format!("{}: arc is unbounded", m.label)))?;
                for c in 0..2 {
                    lo[c] = lo[c].min(q[c]);
                    hi[c] = hi[c].max(q[c]);
                }
            }
        }
        let pad = 1e-3 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let bbox = [lo[0] - pad, lo[1] - pad, hi[0] + pad, hi[1] + pad];
        Ok(Body {
            mirrors,
            arcs,
            bbox,
        })
    }

    /// Closed polygon whose sides are parametrized by `s ∈ [0, 1]`.
    pub fn polygon(vertices: &[P2]) -> Result<Body> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidBody("a polygon needs three vertices".into()));
        }
        let orient: f64 = (0..n)
            .map(|i| det(vertices[i], vertices[(i + 1) % n]))
            .sum();
        let mut mirrors = Vec::new();
        let mut arcs = Vec::new();
        for i in 0..n {
            let (p, q) = (vertices[i], vertices[(i + 1) % n]);
            let d = sub(q, p);
            // F = d_y x - d_x y + det(d, p); its gradient (d_y, -d_x) is the
            // right-hand normal, which points out of a counterclockwise polygon
            let poly = HPoly::from_terms(
                1,
                &[(1, 0, r(d[1])), (0, 1, r(-d[0])), (0, 0, r(det(d, p)))],
            )
            .expect("degree 1");
            let param = Param {
                x: Poly1::new(vec![r(p[0]), r(d[0])]),
                y: Poly1::new(vec![r(p[1]), r(d[1])]),
                t: Poly1::constant(r(1.0)),
            };
            mirrors.push(Mirror::new(format!("side{i}"), poly, Some(param))?);
            arcs.push(Arc {
                mirror: i,
                interval: [0.0, 1.0],
                outward: orient > 0.0,
            });
        }
        Body::new(mirrors, arcs)
    }

    /// Round disk bounded by two half circles that meet at the angles 45° and 225°.
    pub fn disk(cx: f64, cy: f64, rad: f64) -> Result<Body> {
        if !(rad > 0.0) {
            return Err(Error::InvalidBody("radius must be positive".into()));
        }
        let base = Mirror::circle("disk", cx, cy, rad)?;
        let mut mirrors = Vec::new();
        let mut arcs = Vec::new();
        for (i, phi) in [
            -std::f64::consts::FRAC_PI_4,
            3.0 * std::f64::consts::FRAC_PI_4,
        ]
        .into_iter()
        .enumerate()
        {
            let (sn, cs) = phi.sin_cos();
            // s in [-1, 1] covers the half circle centred at angle phi
            let param = Param {
                x: Poly1::new(vec![r(cx + rad * cs), r(-2.0 * rad * sn), r(cx - rad * cs)]),
                y: Poly1::new(vec![r(cy + rad * sn), r(2.0 * rad * cs), r(cy - rad * sn)]),
                t: Poly1::new(vec![r(1.0), r(0.0), r(1.0)]),
            };
            mirrors.push(Mirror::new(
                format!("disk{i}"),
                base.poly().clone(),
                Some(param),
            )?);
            arcs.push(Arc {
                mirror: i,
                interval: [-1.0, 1.0],
                outward: true,
            });
        }
        Body::new(mirrors, arcs)
    }

    pub fn mirrors(&self) -> &[Mirror] {
        &self.mirrors
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// `[x_min, y_min, x_max, y_max]`.
    pub fn bbox(&self) -> [f64; 4] {
        self.bbox
    }

    pub fn mirror_of(&self, arc: usize) -> &Mirror {
        &self.mirrors[self.arcs[arc].mirror]
    }

    /// Points along an arc, for drawing.
    pub fn sample_arc(&self, arc: usize, n: usize) -> Vec<P2> {
        let a = &self.arcs[arc];
        let p = self.mirrors[a.mirror]
            .param()
            .expect("checked in Body::new");
        let [s0, s1] = a.interval;
        (0..=n.max(1))
            .filter_map(|i| arc_point(p, s0 + (s1 - s0) * i as f64 / n.max(1) as f64))
            .collect()
    }

    pub fn to_spec(&self) -> BodySpec {
        BodySpec {
            mirrors: self.mirrors.iter().map(Mirror::to_spec).collect(),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcSpec {
                    mirror: self.mirrors[a.mirror].label.clone(),
                    interval: a.interval,
                    outward: a.outward,
                })
                .collect(),
        }
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Body> {
        let mirrors = spec
            .mirrors
            .iter()
            .map(Mirror::from_spec)
            .collect::<Result<Vec<_>>>()?;
        let arcs = spec
            .arcs
            .iter()
            .map(|a| {
                let idx = mirrors
                    .iter()
                    .position(|m| m.label == a.mirror)
                    .ok_or_else(|| {
                        Error::InvalidBody(format!("unknown mirror label {}", a.mirror))
                    })?;
                Ok(Arc {
                    mirror: idx,
                    interval: a.interval,
                    outward: a.outward,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Body::new(mirrors, arcs)
    }

    /// The same body scaled by `k` about the origin.
    pub fn scaled(&self, k: f64) -> Result<Body> {
        if !(k > 0.0) {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        let mirrors = self
            .mirrors
            .iter()
            .map(|m| {
                // F(x / k, y / k) up to the factor k^-d: scale each monomial by k^t-degree
                let d = m.degree();
                let terms: Vec<_> = m
                    .poly()
                    .terms()
                    .into_iter()
                    .map(|(i, j, c)| (i, j, c * k.powi((d - i - j) as i32)))
                    .collect();
                let poly = HPoly::from_terms(d, &terms).expect("same degree");
                let param = m.param().map(|p| Param {
                    x: p.x.scaled(r(k)),
                    y: p.y.scaled(r(k)),
                    t: p.t.clone(),
                });
                Mirror::new(m.label.clone(), poly, param)
            })
            .collect::<Result<Vec<_>>>()?;
        Body::new(mirrors, self.arcs.clone())
    }
}

fn arc_point(p: &Param, s: f64) -> Option<P2> {
    let [x, y, t] = p.coords(r(s));
    (t.norm() > 1e-300)
        .then(|| [(x / t).re, (y / t).re])
        .filter(|q| q[0].is_finite() && q[1].is_finite())
}

/// Oriented real ray with unit direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ORay {
    pub origin: P2,
    pub direction: P2,
}

impl ORay {
    pub fn new(origin: P2, direction: P2) -> Result<ORay> {
        let direction =
            unit(direction).ok_or_else(|| Error::InvalidArgument("zero ray direction".into()))?;
        if !(origin[0].is_finite() && origin[1].is_finite()) {
            return Err(Error::InvalidArgument("ray origin is not finite".into()));
        }
        Ok(ORay { origin, direction })
    }

    pub fn at(&self, t: f64) -> P2 {
        [
            self.origin[0] + t * self.direction[0],
            self.origin[1] + t * self.direction[1],
        ]
    }

    /// Distance between the supporting lines of two rays, measured at `self`'s
    /// origin, plus the mismatch of directions. Zero iff the oriented lines agree.
    pub fn line_deviation(&self, other: &ORay) -> f64 {
        let dd = norm(sub(self.direction, other.direction));
        let offset = det(other.direction, sub(self.origin, other.origin)).abs();
        dd.max(offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HitKind {
    Transversal,
    /// The ray touches the arc at a root of even multiplicity.
    Tangency,
    /// The hit is within tolerance of an arc endpoint.
    Corner,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub point: P2,
    pub arc: usize,
    pub t: f64,
    pub kind: HitKind,
}

/// First point where the ray meets the boundary, at parameter `t > 1e-9`.
pub fn first_intersection(body: &Body, ray: &ORay) -> Option<Hit> {
    let p = [r(ray.origin[0]), r(ray.origin[1]), r(1.0)];
    let q = [r(ray.direction[0]), r(ray.direction[1]), r(0.0)];
    let mut best: Option<Hit> = None;
    for (idx, a) in body.arcs.iter().enumerate() {
        let m = &body.mirrors[a.mirror];
        let f = m.poly().restrict(&p, &q);
        if f.degree_rel(1e-13).is_none_or(|d| d == 0) {
            continue;
        }
        let roots = f.roots();
        let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (z, mult) in cluster_roots(&roots, 1e-6 * scale) {
            if z.im.abs() > 1e-7 * scale || z.re <= tol::RAY_EPS {
                continue;
            }
            let t = z.re;
            if best.is_some_and(|b| b.t <= t) {
                continue;
            }
            let point = ray.at(t);
            let Some(kind) = classify_hit(m, a, point, mult) else {
                continue;
            };
            best = Some(Hit {
                point,
                arc: idx,
                t,
                kind,
            });
        }
    }
    best
}

fn classify_hit(m: &Mirror, a: &Arc, point: P2, mult: usize) -> Option<HitKind> {
    let param = m.param()?;
    let s = param.locate(&PPoint::real(point[0], point[1]))?;
    let [s0, s1] = a.interval;
    let span = s1 - s0;
    let slack = 1e-12 * (1.0 + span);
    if s.im.abs() > 1e-6 * (1.0 + s.norm()) || s.re < s0 - slack || s.re > s1 + slack {
        return None;
    }
    let ends = [arc_point(param, s0), arc_point(param, s1)];
    let size = 1.0 + norm(point);
    if ends
        .iter()
        .flatten()
        .any(|e| norm(sub(*e, point)) < tol::RAY_EPS * size)
    {
        return Some(HitKind::Corner);
    }
    Some(if mult.is_multiple_of(2) {
        HitKind::Tangency
    } else {
        HitKind::Transversal
    })
}

/// Real unit normal of the mirror at a point: the normalized gradient.
fn normal(m: &Mirror, point: P2) -> Option<P2> {
    let g = m.gradient(&PPoint::real(point[0], point[1]));
    unit([g[0].re, g[1].re])
}

/// Classical reflection of a direction in the line with unit normal `n`.
pub fn reflect_real(d: P2, n: P2) -> P2 {
    let k = 2.0 * dot(d, n);
    [d[0] - k * n[0], d[1] - k * n[1]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEnd {
    /// The last ray misses the body.
    Exited,
    MaxReflections,
    Tangency,
    Corner,
    /// The ray reached an arc from the inside of the body.
    InteriorHit,
    SingularPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub input: ORay,
    /// Reflection points in order.
    pub points: Vec<P2>,
    /// Arc index of each reflection.
    pub arcs: Vec<usize>,
    pub segments: Vec<[P2; 2]>,
    /// Ray leaving the last reflection point (the input ray if nothing was hit).
    pub output: ORay,
    pub reflections: usize,
    pub end: TraceEnd,
}

/// Follows the ray through at most `max_n` reflections.
pub fn trace(body: &Body, ray: &ORay, max_n: usize) -> Trajectory {
    let mut cur = *ray;
    let mut points = Vec::new();
    let mut arcs = Vec::new();
    let mut segments = Vec::new();
    let end = loop {
        let Some(hit) = first_intersection(body, &cur) else {
            break TraceEnd::Exited;
        };
        match hit.kind {
            HitKind::Tangency => break TraceEnd::Tangency,
            HitKind::Corner => break TraceEnd::Corner,
            HitKind::Transversal => {}
        }
        if points.len() == max_n {
            break TraceEnd::MaxReflections;
        }
        let m = body.mirror_of(hit.arc);
        let Some(n) = normal(m, hit.point) else {
            break TraceEnd::SingularPoint;
        };
        let going_out = dot(cur.direction, n) > 0.0;
        if going_out == body.arcs[hit.arc].outward {
            break TraceEnd::InteriorHit;
        }
        segments.push([cur.origin, hit.point]);
        points.push(hit.point);
        arcs.push(hit.arc);
        cur = ORay {
            origin: hit.point,
            direction: reflect_real(cur.direction, n),
        };
    };
    Trajectory {
        input: *ray,
        reflections: points.len(),
        points,
        arcs,
        segments,
        output: cur,
        end,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Visibility {
    Invisible {
        reflections: usize,
    },
    Visible {
        reflections: usize,
        deviation: f64,
    },
    /// The ray never meets the body; there is nothing to judge.
    Miss,
    Aborted {
        end: TraceEnd,
    },
}

impl Visibility {
    pub fn is_invisible(&self) -> bool {
        matches!(self, Visibility::Invisible { .. })
    }
}

/// Whether the body is invisible for the given oriented line.
pub fn check_invisible(body: &Body, ray: &ORay, max_n: usize) -> Visibility {
    let tr = trace(body, ray, max_n);
    if tr.end != TraceEnd::Exited {
        return Visibility::Aborted { end: tr.end };
    }
    if tr.reflections == 0 {
        return Visibility::Miss;
    }
    let deviation = tr.output.line_deviation(ray);
    let [x0, y0, x1, y1] = body.bbox;
    let size = (x1 - x0).max(y1 - y0).max(1.0);
    if deviation < tol::RAY_EPS * size {
        Visibility::Invisible {
            reflections: tr.reflections,
        }
    } else {
        Visibility::Visible {
            reflections: tr.reflections,
            deviation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonLaw {
    pub pass: bool,
    /// Vertices where the law fails.
    pub failing: Vec<usize>,
}

fn bisector_law(curves: &[Mirror], polygon: &[P2], interior_at_ends: bool) -> Result<PolygonLaw> {
    let k = polygon.len();
    if k < 2 || curves.len() != k {
        return Err(Error::InvalidArgument(
            "one curve per polygon vertex is required".into(),
        ));
    }
    for j in 0..k {
        if norm(sub(polygon[(j + 1) % k], polygon[j])) < tol::RAY_EPS {
            return Err(Error::CoincidentVertices(j));
        }
    }
    let mut failing = Vec::new();
    for j in 0..k {
        let a = polygon[j];
        let pa = PPoint::real(a[0], a[1]);
        let res = curves[j].residual(&pa);
        if res > crate::mirrors::ON_CURVE {
            return Err(Error::NotOnCurve(res));
        }
        let n = normal(&curves[j], a).ok_or(Error::SingularPoint)?;
        let tangent = [-n[1], n[0]];
        let u = unit(sub(polygon[(j + k - 1) % k], a)).expect("distinct vertices");
        let w = unit(sub(polygon[(j + 1) % k], a)).expect("distinct vertices");
        let interior = interior_at_ends && (j == 0 || j == k - 1);
        let bis = if interior {
            [u[0] + w[0], u[1] + w[1]]
        } else {
            [u[0] - w[0], u[1] - w[1]]
        };
        let bis = match unit(bis) {
            Some(b) if norm(bis) > tol::RAY_EPS => b,
            _ => return Err(Error::DegenerateAngle(j)),
        };
        if det(tangent, bis).abs() > tol::RAY_EPS {
            failing.push(j);
        }
    }
    Ok(PolygonLaw {
        pass: failing.is_empty(),
        failing,
    })
}

/// Reflection law of an invisible trajectory `A_1 … A_k`, where the entry and
/// exit lie on one line through `A_k` and `A_1`: the tangent is the exterior
/// bisector at inner vertices and the interior bisector at `A_1` and `A_k`.
pub fn check_invisible_orbit(curves: &[Mirror], polygon: &[P2]) -> Result<PolygonLaw> {
    bisector_law(curves, polygon, true)
}

/// Classical billiard law on a closed real polygon: the tangent is the
/// exterior bisector at every vertex.
pub fn check_billiard_polygon(curves: &[Mirror], polygon: &[P2]) -> Result<PolygonLaw> {
    bisector_law(curves, polygon, false)
}

/// The complex billiard on the full curves hit by a trajectory, with the
/// reflection points as a periodic orbit.
pub fn complexify(body: &Body, tr: &Trajectory) -> Result<(Billiard, Orbit)> {
    if tr.points.len() < 2 {
        return Err(Error::InvalidArgument(
            "trajectory needs at least two reflections".into(),
        ));
    }
    let mirrors: Vec<Mirror> = tr.arcs.iter().map(|&a| body.mirror_of(a).clone()).collect();
    let b = Billiard::new(mirrors)?;
    let vertices = tr
        .points
        .iter()
        .enumerate()
        .map(|(j, p)| b.mirror(j).curve_point(PPoint::real(p[0], p[1])))
        .collect::<Result<Vec<_>>>()?;
    let residual = orbit_residual(&b, &vertices)?.values;
    Ok((b, Orbit { vertices, residual }))
}

/// Abscissa range of the inner parabola arcs, in units of the scale.
const ARC_X: [f64; 2] = [1.2, 2.0];
/// Half the vertical distance between the two units.
const UNIT_GAP: f64 = 2.5;
/// Bulge of the closing arcs of each lens.
const LENS: f64 = 0.3;

/// Reflections along an invisible ray of the two-parabola body.
pub const TWO_PARABOLA_REFLECTIONS: usize = 4;

/// Open interval of abscissas where vertical downward rays pass the
/// two-parabola body unseen.
pub fn two_parabola_aperture(scale: f64) -> [f64; 2] {
    [ARC_X[0] * scale, ARC_X[1] * scale]
}

/// Body invisible in the vertical direction. The upper unit consists of a
/// lens on `y = (x² - 1)/2` over `x ∈ [a, b]` and a lens on `y = (1 - x²)/2`
/// over `[-b, -a]`; both parabolas have their focus at the origin, so a
/// downward ray at `x` is sent through the focus and leaves downward at
/// `-x`. The lower unit, mirrored across `y = -H`, sends it back to `x`.
pub fn build_two_parabola_body(scale: f64) -> Result<Body> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    let s = scale;
    let [a, b] = ARC_X;
    let h = UNIT_GAP * s;
    // y = c2 x² + c1 x + c0
    let p1 = [-s / 2.0, 0.0, 1.0 / (2.0 * s)];
    let l1 = [
        -s / 2.0 + LENS * a * b * s,
        -LENS * (a + b),
        1.0 / (2.0 * s) + LENS / s,
    ];
    let p2 = [s / 2.0, 0.0, -1.0 / (2.0 * s)];
    let u2 = [
        s / 2.0 - LENS * a * b * s,
        -LENS * (a + b),
        -1.0 / (2.0 * s) - LENS / s,
    ];
    let flip = |c: [f64; 3]| [-c[0] - 2.0 * h, -c[1], -c[2]];
    let right = [a * s, b * s];
    let left = [-b * s, -a * s];
    // (label, coefficients, interval, gradient of y - f(x) points out)
    let pieces = [
        ("p1", p1, right, true),
        ("l1", l1, right, false),
        ("p2", p2, left, false),
        ("u2", u2, left, true),
        ("p1_low", flip(p1), right, false),
        ("l1_low", flip(l1), right, true),
        ("p2_low", flip(p2), left, true),
        ("u2_low", flip(u2), left, false),
    ];
    let mut mirrors = Vec::new();
    let mut arcs = Vec::new();
    for (i, (label, c, interval, outward)) in pieces.into_iter().enumerate() {
        mirrors.push(Mirror::parabola(label, c[2], c[1], c[0])?);
        arcs.push(Arc {
            mirror: i,
            interval,
            outward,
        });
    }
    let body = Body::new(mirrors, arcs)?;
    self_check(&body, scale)?;
    Ok(body)
}

/// Vertical downward ray above the body at abscissa `x`.
pub fn vertical_ray(body: &Body, x: f64) -> ORay {
    let top = body.bbox[3];
    let height = body.bbox[3] - body.bbox[1];
    ORay {
        origin: [x, top + 0.25 * height],
        direction: [0.0, -1.0],
    }
}

fn self_check(body: &Body, scale: f64) -> Result<()> {
    let [x0, x1] = two_parabola_aperture(scale);
    for i in 0..17 {
        let x = x0 + (x1 - x0) * (i as f64 + 0.5) / 17.0;
        match check_invisible(body, &vertical_ray(body, x), 16) {
            Visibility::Invisible {
                reflections: TWO_PARABOLA_REFLECTIONS,
            } => {}
            v => return Err(Error::SelfCheck(format!("ray at x = {x}: {v:?}"))),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> Body {
        Body::disk(0.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn hits_the_unit_circle() {
        let b = disk();
        let h = first_intersection(&b, &ORay::new([-2.0, 0.0], [1.0, 0.0]).unwrap()).unwrap();
        assert!(norm(sub(h.point, [-1.0, 0.0])) < 1e-12);
        assert_eq!(h.kind, HitKind::Transversal);
        assert!(first_intersection(&b, &ORay::new([-2.0, 2.0], [1.0, 0.0]).unwrap()).is_none());
        let h = first_intersection(&b, &ORay::new([-2.0, 1.0], [1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(h.kind, HitKind::Tangency);
    }

    #[test]
    fn normal_incidence_returns() {
        let b = disk();
        let tr = trace(&b, &ORay::new([-2.0, 0.0], [1.0, 0.0]).unwrap(), 10);
        assert_eq!(tr.reflections, 1);
        assert_eq!(tr.end, TraceEnd::Exited);
        assert!(norm(sub(tr.output.direction, [-1.0, 0.0])) < 1e-12);
        assert!(!check_invisible(&b, &tr.input, 10).is_invisible());
    }

    #[test]
    fn miss_leaves_the_ray_unchanged() {
        let b = disk();
        let ray = ORay::new([-2.0, 3.0], [1.0, 0.0]).unwrap();
        let tr = trace(&b, &ray, 10);
        assert_eq!(tr.reflections, 0);
        assert_eq!(tr.output, ray);
        assert_eq!(check_invisible(&b, &ray, 10), Visibility::Miss);
    }

    #[test]
    fn square_bounces_from_outside() {
        let b = Body::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let ray = ORay::new([-1.0, -0.5], [1.0, 1.0]).unwrap();
        let tr = trace(&b, &ray, 10);
        assert_eq!(tr.reflections, 1);
        assert!(norm(sub(tr.points[0], [0.0, 0.5])) < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(norm(sub(tr.output.direction, [-s, s])) < 1e-12);
    }

    #[test]
    fn square_from_inside_is_an_interior_hit() {
        let b = Body::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let tr = trace(&b, &ORay::new([0.5, 0.25], [1.0, 1.0]).unwrap(), 10);
        assert_eq!(tr.end, TraceEnd::InteriorHit);
    }

    #[test]
    fn corner_aborts() {
        let b = Body::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let tr = trace(&b, &ORay::new([-1.0, -1.0], [1.0, 1.0]).unwrap(), 10);
        assert_eq!(tr.end, TraceEnd::Corner);
    }

    #[test]
    fn two_parabola_body_is_invisible_in_its_aperture() {
        let body = build_two_parabola_body(1.0).unwrap();
        for x in [1.25, 1.5, 1.93] {
            let ray = vertical_ray(&body, x);
            assert_eq!(
                check_invisible(&body, &ray, 16),
                Visibility::Invisible { reflections: 4 }
            );
            let tr = trace(&body, &ray, 16);
            let curves: Vec<Mirror> = tr.arcs.iter().map(|&a| body.mirror_of(a).clone()).collect();
            assert!(check_invisible_orbit(&curves, &tr.points).unwrap().pass);
        }
        for x in [0.5, -1.5, 2.4] {
            assert!(!check_invisible(&body, &vertical_ray(&body, x), 16).is_invisible());
        }
    }

    #[test]
    fn two_parabola_body_scales() {
        let one = build_two_parabola_body(1.0).unwrap();
        let two = build_two_parabola_body(2.0).unwrap();
        for x in [-1.5, 0.3, 1.4, 1.8, 2.2] {
            let v1 = check_invisible(&one, &vertical_ray(&one, x), 16).is_invisible();
            let v2 = check_invisible(&two, &vertical_ray(&two, 2.0 * x), 16).is_invisible();
            assert_eq!(v1, v2);
        }
        let scaled = one.scaled(2.0).unwrap();
        assert!(check_invisible(&scaled, &vertical_ray(&scaled, 3.0), 16).is_invisible());
    }

    #[test]
    fn bisector_laws() {
        let line = |a: f64, b: f64, c: f64| Mirror::real_line("l", a, b, c).unwrap();
        // y = 1 through A_2 = (1, 1); the other curves only need to contain their vertex
        let curves = vec![
            line(1.0, -1.0, 0.0),
            line(0.0, 1.0, -1.0),
            line(1.0, 1.0, -2.0),
        ];
        let poly = [[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]];
        let law = bisector_law(&curves, &poly, false).unwrap();
        assert!(!law.failing.contains(&1));
        // neighbours along (1, 0) and (0, 1) from the origin, tangent (1, 1)
        let curves = vec![
            line(1.0, -1.0, 0.0),
            line(0.0, 1.0, 0.0),
            line(1.0, 0.0, 0.0),
        ];
        let poly = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let law = check_invisible_orbit(&curves, &poly).unwrap();
        assert!(!law.failing.contains(&0));
        let curves = vec![
            line(1.0, 1.0, 0.0),
            line(0.0, 1.0, 0.0),
            line(1.0, 0.0, 0.0),
        ];
        let law = check_invisible_orbit(&curves, &poly).unwrap();
        assert!(law.failing.contains(&0));
    }

    #[test]
    fn body_spec_round_trip() {
        let body = build_two_parabola_body(1.0).unwrap();
        let back = Body::from_spec(&body.to_spec()).unwrap();
        assert_eq!(back, body);
    }
}
