//! Periodic orbits of complex billiards: the reflection-law residual,
//! validation, Gauss–Newton solving and isotropic-edge bookkeeping.

mod collision;
mod solve;

pub use collision::{classify_collision, CollisionCase};
pub(crate) use solve::{gauss_newton, jacobian_at, move_vertex};
pub use solve::{solve_periodic, SolveOptions};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mirrors::{CurvePoint, Mirror};
use crate::poly::HPoly;
use crate::projective::{bilinear_form, chordal, is_isotropic_direction, Dir2, PPoint};
use crate::tol;
use crate::C64;

/// Residual entry reported at a vertex whose tangent is isotropic. Genuine
/// entries are normalized determinants and never exceed 1 in modulus.
pub const FLAGGED_RESIDUAL: f64 = 2.0;

/// An ordered collection of mirrors `a_1 .. a_m`, indexed cyclically.
#[derive(Debug, Clone)]
pub struct Billiard {
    mirrors: Vec<Mirror>,
    grads: Vec<(HPoly, HPoly)>,
}

impl Billiard {
    /// At least two mirrors; the mirror constructors already exclude
    /// isotropic lines.
    pub fn new(mirrors: Vec<Mirror>) -> Result<Billiard> {
        if mirrors.len() < 2 {
            return Err(Error::InvalidBilliard(
                "a billiard needs at least two mirrors".into(),
            ));
        }
        let grads = mirrors
            .iter()
            .map(|m| (m.poly().d_x(), m.poly().d_y()))
            .collect();
        Ok(Billiard { mirrors, grads })
    }

    /// A single mirror repeated `k` times.
    pub fn repeated(m: Mirror, k: usize) -> Result<Billiard> {
        Billiard::new(vec![m; k])
    }

    pub fn mirrors(&self) -> &[Mirror] {
        &self.mirrors
    }

    pub fn len(&self) -> usize {
        self.mirrors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mirrors.is_empty()
    }

    /// Mirror of vertex `j` of a periodic orbit; indices wrap around.
    pub fn mirror(&self, j: usize) -> &Mirror {
        &self.mirrors[j % self.mirrors.len()]
    }

    /// Tangent direction `(-F_y, F_x)` at an affine point of mirror `j`.
    pub(crate) fn tangent_dir(&self, j: usize, p: [C64; 2]) -> Dir2 {
        let (fx, fy) = &self.grads[j % self.mirrors.len()];
        Dir2::new(-fy.eval_affine(p[0], p[1]), fx.eval_affine(p[0], p[1]))
    }
}

/// A closed polygon of mirror points with its reflection-law residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub vertices: Vec<CurvePoint>,
    pub residual: Vec<C64>,
}

impl Orbit {
    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.residual.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    /// Finite affine vertices, or the index of the first vertex at infinity.
    pub fn affine_vertices(&self) -> Result<Vec<[C64; 2]>> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(j, v)| {
                v.point
                    .to_affine()
                    .map(|(x, y)| [x, y])
                    .map_err(|_| Error::VertexAtInfinity(j))
            })
            .collect()
    }
}

/// Direction class of an orbit edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTag {
    ThroughI1,
    ThroughI2,
    NonIsotropic,
}

impl EdgeTag {
    pub fn is_isotropic(self) -> bool {
        self != EdgeTag::NonIsotropic
    }
}

/// Residual vector plus the vertices whose tangent was isotropic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub values: Vec<C64>,
    pub isotropic_tangents: Vec<usize>,
}

fn sub(a: [C64; 2], b: [C64; 2]) -> Dir2 {
    Dir2::new(a[0] - b[0], a[1] - b[1])
}

/// `sigma_v(u)` without the isotropy check.
pub(crate) fn sigma(u: Dir2, v: Dir2) -> Dir2 {
    let k = C64::new(2.0, 0.0) * bilinear_form(u, v) / bilinear_form(v, v);
    Dir2::new(k * v.dx - u.dx, k * v.dy - u.dy)
}

/// Reflection-law residual at vertex `j` of a closed polygon:
/// `det(sigma(A_j - A_{j-1}), A_{j+1} - A_j)` divided by `norms` (or by the
/// product of the Hermitian norms when `norms` is `None`).
pub(crate) fn law_entry(pts: &[[C64; 2]], v: Dir2, j: usize, norm: Option<f64>) -> C64 {
    let k = pts.len();
    let u = sigma(sub(pts[j], pts[(j + k - 1) % k]), v);
    let w = sub(pts[(j + 1) % k], pts[j]);
    let d = u.det(&w);
    match norm {
        Some(n) => d / n,
        None => d / (u.norm() * w.norm()),
    }
}

pub(crate) fn law_norm(pts: &[[C64; 2]], v: Dir2, j: usize) -> f64 {
    let k = pts.len();
    sigma(sub(pts[j], pts[(j + k - 1) % k]), v).norm() * sub(pts[(j + 1) % k], pts[j]).norm()
}

fn check_distinct(pts: &[[C64; 2]]) -> Result<()> {
    let k = pts.len();
    for j in 0..k {
        let d = sub(pts[(j + 1) % k], pts[j]);
        let scale = 1.0 + Dir2::new(pts[j][0], pts[j][1]).norm();
        if d.norm() <= tol::PROJ_EQ * scale {
            return Err(Error::CoincidentVertices(j));
        }
    }
    Ok(())
}

/// Per-vertex residual of the reflection law for vertices `A_1 .. A_k`
/// (vertex `j` on mirror `j mod m`). Vertices with an isotropic tangent get
/// [`FLAGGED_RESIDUAL`] and are listed separately.
pub fn orbit_residual(b: &Billiard, vertices: &[CurvePoint]) -> Result<Residual> {
    let pts = vertices
        .iter()
        .enumerate()
        .map(|(j, v)| {
            v.point
                .to_affine()
                .map(|(x, y)| [x, y])
                .map_err(|_| Error::VertexAtInfinity(j))
        })
        .collect::<Result<Vec<_>>>()?;
    if pts.len() < 2 {
        return Err(Error::InvalidArgument(
            "an orbit has at least two vertices".into(),
        ));
    }
    check_distinct(&pts)?;
    let mut values = Vec::with_capacity(pts.len());
    let mut isotropic_tangents = Vec::new();
    for (j, p) in pts.iter().enumerate() {
        let v = b.tangent_dir(j, *p);
        if is_isotropic_direction(v) {
            values.push(C64::new(FLAGGED_RESIDUAL, 0.0));
            isotropic_tangents.push(j);
        } else {
            values.push(law_entry(&pts, v, j, None));
        }
    }
    Ok(Residual {
        values,
        isotropic_tangents,
    })
}

/// First violated clause of the periodic-orbit definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Violation {
    VertexAtInfinity { vertex: usize },
    NotOnMirror { vertex: usize, value: f64 },
    CoincidentVertices { vertex: usize },
    IsotropicTangent { vertex: usize },
    Transversality { vertex: usize },
    Residual { vertex: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitVerdict {
    pub pass: bool,
    pub failure: Option<Violation>,
}

/// Checks finiteness, incidence, distinct consecutive vertices, non-isotropic
/// tangents, transversality of both edges at every vertex and the residual.
pub fn validate_orbit(b: &Billiard, o: &Orbit) -> OrbitVerdict {
    let fail = |v| OrbitVerdict {
        pass: false,
        failure: Some(v),
    };
    let pts = match o.affine_vertices() {
        Ok(p) => p,
        Err(Error::VertexAtInfinity(j)) => return fail(Violation::VertexAtInfinity { vertex: j }),
        Err(_) => unreachable!("affine_vertices only reports vertices at infinity"),
    };
    let k = pts.len();
    for (j, v) in o.vertices.iter().enumerate() {
        let value = b.mirror(j).residual(&v.point);
        if value > crate::mirrors::ON_CURVE {
            return fail(Violation::NotOnMirror { vertex: j, value });
        }
    }
    if let Err(Error::CoincidentVertices(j)) = check_distinct(&pts) {
        return fail(Violation::CoincidentVertices { vertex: j });
    }
    for j in 0..k {
        let v = b.tangent_dir(j, pts[j]);
        if is_isotropic_direction(v) {
            return fail(Violation::IsotropicTangent { vertex: j });
        }
        let a = sub(pts[j], pts[(j + k - 1) % k]);
        let c = sub(pts[(j + 1) % k], pts[j]);
        if a.chordal(&v) < tol::EDGE_CHORDAL || c.chordal(&v) < tol::EDGE_CHORDAL {
            return fail(Violation::Transversality { vertex: j });
        }
    }
    for j in 0..k {
        let value = law_entry(&pts, b.tangent_dir(j, pts[j]), j, None).norm();
        if !(value < tol::RESIDUAL_VALID) {
            return fail(Violation::Residual { vertex: j, value });
        }
    }
    OrbitVerdict {
        pass: true,
        failure: None,
    }
}

/// Tag of the edge direction `d` against `I1 = (1 : i)` and `I2 = (1 : -i)`.
pub fn tag_direction(d: Dir2, tol: f64) -> EdgeTag {
    let v = [d.dx, d.dy];
    if chordal(&v, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]) < tol {
        EdgeTag::ThroughI1
    } else if chordal(&v, &[C64::new(1.0, 0.0), C64::new(0.0, -1.0)]) < tol {
        EdgeTag::ThroughI2
    } else {
        EdgeTag::NonIsotropic
    }
}

/// Tags of the edges `A_j A_{j+1}` of a closed polygon of finite points.
pub fn classify_points(points: &[PPoint]) -> Result<Vec<EdgeTag>> {
    let pts = points
        .iter()
        .enumerate()
        .map(|(j, p)| {
            p.to_affine()
                .map(|(x, y)| [x, y])
                .map_err(|_| Error::VertexAtInfinity(j))
        })
        .collect::<Result<Vec<_>>>()?;
    check_distinct(&pts)?;
    let k = pts.len();
    Ok((0..k)
        .map(|j| tag_direction(sub(pts[(j + 1) % k], pts[j]), tol::EDGE_CHORDAL))
        .collect())
}

/// Edge tags of an orbit; edge `j` joins vertex `j` to vertex `j + 1`.
pub fn classify_edges(o: &Orbit) -> Result<Vec<EdgeTag>> {
    classify_points(&o.vertices.iter().map(|v| v.point).collect::<Vec<_>>())
}

/// Outcome of the intermittency check on a cyclic list of edge tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intermittency {
    /// No isotropic edge at all.
    Vacuous,
    /// All edges isotropic, alternating `I1`/`I2`, even count.
    Alternating,
    MixedEdges,
    NotAlternating,
    OddPeriod,
}

impl Intermittency {
    pub fn passes(self) -> bool {
        matches!(self, Intermittency::Vacuous | Intermittency::Alternating)
    }
}

pub fn check_intermittency(tags: &[EdgeTag]) -> Intermittency {
    if tags.iter().all(|t| !t.is_isotropic()) {
        return Intermittency::Vacuous;
    }
    if tags.iter().any(|t| !t.is_isotropic()) {
        return Intermittency::MixedEdges;
    }
    let k = tags.len();
    if (0..k).any(|j| tags[j] == tags[(j + 1) % k]) {
        return Intermittency::NotAlternating;
    }
    if k % 2 == 1 {
        // unreachable for a cyclic alternation, kept for completeness
        return Intermittency::OddPeriod;
    }
    Intermittency::Alternating
}
